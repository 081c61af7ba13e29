use crate::error::{Error, Result};
use crate::fem::FeFunction;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Writes through a temporary file in the target directory, then renames it
/// into place, so the final path never holds a partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_atomic(path, |w| {
        let mut c = csv::Writer::from_writer(w);
        for r in rows {
            c.serialize(r)?;
        }
        c.flush()?;
        Ok(())
    })
}

/// Plain-text dump: a header line `d nodes_per_axis level`, then one line of
/// nodal values per mesh row, `x₁` varying fastest.
pub fn write_nodal_text(path: &Path, f: &FeFunction, title: &str) -> Result<()> {
    let n = f.mesh().nodes_per_axis();
    write_atomic(path, |w| {
        writeln!(w, "# {title}")?;
        writeln!(w, "# d nodes_per_axis level")?;
        writeln!(w, "2 {n} {}", f.level())?;
        for row in f.values().chunks(n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    })
}

#[derive(Serialize)]
struct NodalRow {
    x1: f64,
    x2: f64,
    value: f64,
}

/// `x₁, x₂, value` rows for plotting.
pub fn write_nodal_csv(path: &Path, f: &FeFunction) -> Result<()> {
    let mesh = f.mesh();
    let rows: Vec<NodalRow> = f
        .values()
        .iter()
        .enumerate()
        .map(|(k, &value)| {
            let [x1, x2] = mesh.node(k);
            NodalRow { x1, x2, value }
        })
        .collect();
    write_csv(path, &rows)
}

/// Parses a dump written by [`write_nodal_text`]: `(nodes_per_axis, level, values)`.
pub fn read_nodal_text(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let bad = |m: &str| Error::Domain(format!("nodal dump: {m}"));
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad("missing header"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("bad header")))
        .collect::<Result<_>>()?;
    let [2, n, level] = header[..] else {
        return Err(bad("header must be '2 n level'"));
    };
    let values: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .map(|t| t.parse().map_err(|_| bad("bad value")))
        .collect::<Result<_>>()?;
    if values.len() != n * n {
        return Err(bad("value count does not match header"));
    }
    Ok((n, level, values))
}
