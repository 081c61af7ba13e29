use crate::error::{Error, Result};
use crate::rng::{keyed_rng, Stream};
use rand::Rng;
use std::path::Path;

/// Embedded rank-1 lattice generating vector, 3600 dimensions,
/// designed for `N ∈ [2^10, 2^20]`.
const DEFAULT_VECTOR: &str = include_str!("../../data/lattice-32001-1024-1048576.3600.txt");

pub const DEFAULT_N_MIN: u64 = 1 << 10;
pub const DEFAULT_N_MAX: u64 = 1 << 20;

/// Generating vector of a rank-1 lattice rule: a loaded prefix, optionally
/// followed by random odd entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingVector {
    entries: Vec<u64>,
    n_min: u64,
    n_max: u64,
    loaded_len: usize,
}

impl GeneratingVector {
    /// Parses a generating-vector file.
    ///
    /// Each non-empty line not starting with `#` is either `value` or
    /// `index value`; only the value is used and entries keep file order.
    pub fn parse(text: &str, n_min: u64, n_max: u64) -> Result<Self> {
        if !(1 <= n_min && n_min <= n_max) {
            return Err(Error::GeneratingVector(format!(
                "invalid point-count range [{n_min}, {n_max}]"
            )));
        }
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let tok = match tokens.as_slice() {
                [v] | [_, v] => *v,
                _ => {
                    return Err(Error::GeneratingVector(format!(
                        "line {}: expected 1 or 2 columns, got {}",
                        lineno + 1,
                        tokens.len()
                    )))
                }
            };
            let v: u64 = tok.parse().map_err(|_| {
                Error::GeneratingVector(format!("line {}: bad integer {tok:?}", lineno + 1))
            })?;
            if v == 0 || v >= n_max {
                return Err(Error::GeneratingVector(format!(
                    "line {}: entry {v} outside [1, {}]",
                    lineno + 1,
                    n_max - 1
                )));
            }
            entries.push(v);
        }
        if entries.is_empty() {
            return Err(Error::GeneratingVector("no entries".into()));
        }
        let loaded_len = entries.len();
        Ok(Self {
            entries,
            n_min,
            n_max,
            loaded_len,
        })
    }

    pub fn from_file(path: &Path, n_min: u64, n_max: u64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::GeneratingVector(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::parse(&text, n_min, n_max)
    }

    /// The bundled 3600-dimensional embedded lattice vector.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_VECTOR, DEFAULT_N_MIN, DEFAULT_N_MAX)
            .expect("bundled generating vector parses")
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn loaded_len(&self) -> usize {
        self.loaded_len
    }

    pub fn n_range(&self) -> (u64, u64) {
        (self.n_min, self.n_max)
    }

    /// Whether `n` lies in the range the loaded prefix was designed for.
    pub fn designed_for(&self, n: u64) -> bool {
        (self.n_min..=self.n_max).contains(&n)
    }

    /// Appends odd integers drawn uniformly from `[1, n_max − 1]` until the
    /// vector has `s_needed` entries. The result depends only on `seed`;
    /// entry `j` is drawn from its own keyed stream.
    pub fn extend_vector(&self, s_needed: usize, seed: u64) -> Self {
        let mut out = self.clone();
        if s_needed <= out.entries.len() {
            return out;
        }
        let odd_count = self.n_max / 2;
        out.entries.reserve(s_needed - out.entries.len());
        for j in out.entries.len()..s_needed {
            let mut rng = keyed_rng(seed, Stream::VectorExtension, &[j as u64]);
            let k: u64 = rng.gen_range(0..odd_count);
            out.entries.push(2 * k + 1);
        }
        out
    }
}
