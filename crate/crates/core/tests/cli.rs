mod common;

use common::config;
use mlqmc::estimators::Method;
use mlqmc::experiment::{read_nodal_text, Experiment, Preset, RunConfig, RunManifest};
use std::path::Path;
use std::process::Command;

const TINY: &str = r#"
[geometry]
max_level = 1

[estimator]
eps = [1e-2, 1e-3]
methods = ["mlqmc", "mc"]
timing_reps = 3

[variance_study]
n_max_log2 = 4
fit_min_log2 = 1
fit_max_log2 = 4
"#;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mlqmc"));
    c.env("RUST_LOG", "warn").env_remove("MLQMC_OUT_DIR");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn manifest(p: &Path) -> RunManifest {
    serde_json::from_str(&read(p)).unwrap()
}

fn header(p: &Path) -> String {
    read(p).lines().next().unwrap().to_string()
}

/// CSV body with the named column removed.
fn without_column(p: &Path, col: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == col);
    r.records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != idx)
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn run_writes_reproducible_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", TINY);
    for out in ["a", "b"] {
        let st = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(st.success());
    }
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for f in ["run.csv", "run_manifest.json", "gradient.txt", "gradient.csv", "mean_adjoint.txt", "target.csv", "control.csv"] {
        assert!(a.join(f).exists(), "{f}");
    }
    assert_eq!(header(&a.join("run.csv")), "eps,method,rmse_quadrature,normalized_cost,measured_cost");
    assert_eq!(header(&a.join("gradient.csv")), "x1,x2,value");
    assert_eq!(
        without_column(&a.join("run.csv"), "measured_cost"),
        without_column(&b.join("run.csv"), "measured_cost")
    );
    assert_eq!(read(&a.join("gradient.txt")), read(&b.join("gradient.txt")));
    assert_eq!(read(&a.join("gradient.csv")), read(&b.join("gradient.csv")));
    let (ma, mb) = (manifest(&a.join("run_manifest.json")), manifest(&b.join("run_manifest.json")));
    assert_eq!(ma.without_timing(), mb.without_timing());
    assert_eq!(ma.runs.len(), 2);
    assert!(ma.runs.iter().all(|r| r.method == Method::Mlqmc && r.config_hash == ma.config_hash));

    let (n, level, values) = read_nodal_text(&read(&a.join("gradient.txt"))).unwrap();
    assert_eq!((n, level), (9, 1));
    assert_eq!(values.len(), 81);
}

#[test]
fn gradient_dump_matches_library_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::from_toml_str(TINY, None).unwrap();
    c.output.dir = dir.path().to_path_buf();
    let exp = Experiment::new(c).unwrap();
    let (m, est) = exp.dump_gradient().unwrap();
    assert_eq!(m.runs[0].eps, 1e-3);
    let (_, _, values) = read_nodal_text(&read(&dir.path().join("gradient.txt"))).unwrap();
    assert_eq!(values, est.gradient.values());
    let (_, _, mean) = read_nodal_text(&read(&dir.path().join("mean_adjoint.txt"))).unwrap();
    assert_eq!(mean, est.mean_q.values());
}

#[test]
fn variance_study_and_cost_curve_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", TINY);
    let out = dir.path().join("o");
    for cmd in ["variance-study", "cost-curve"] {
        let st = bin().arg(cmd).arg("--config").arg(&cfg).arg("--out").arg(&out).status().unwrap();
        assert!(st.success(), "{cmd}");
    }
    assert_eq!(header(&out.join("variance_decay.csv")), "ell,n,r,rv,variance");
    assert_eq!(header(&out.join("variance_slopes.csv")), "ell,slope,n_from,n_to");
    assert_eq!(header(&out.join("cost_curve.csv")), "eps,method,rmse_quadrature,normalized_cost,measured_cost");
    assert_eq!(header(&out.join("cost_exponents.csv")), "method,exponent");
    assert_eq!(header(&out.join("level_cost.csv")), "ell,ce_secs,fe_secs,model_cost");
    // 2 levels x N = 1..16
    assert_eq!(without_column(&out.join("variance_decay.csv"), "").len(), 10);
    let curve = without_column(&out.join("cost_curve.csv"), "measured_cost");
    assert_eq!(curve.len(), 4);
    assert!(!out.join(".cost_curve.checkpoint.json").exists());
}

#[test]
fn cost_curve_is_monotone_and_resumes_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::from_toml_str(TINY, None).unwrap();
    c.output.dir = dir.path().join("full");
    let full = Experiment::new(c.clone()).unwrap().cost_curve().unwrap();
    for m in [Method::Mlqmc, Method::Mc] {
        let costs = full.costs(m);
        assert!(costs.windows(2).all(|w| w[0] <= w[1]), "{m:?} {costs:?}");
    }

    // pretend the first two runs finished before an interruption
    let resumed_dir = dir.path().join("resumed");
    std::fs::create_dir_all(&resumed_dir).unwrap();
    let mut partial = full.manifest.clone();
    partial.runs.truncate(2);
    std::fs::write(
        resumed_dir.join(".cost_curve.checkpoint.json"),
        serde_json::to_string(&partial).unwrap(),
    )
    .unwrap();
    c.output.dir = resumed_dir;
    let resumed = Experiment::new(c).unwrap().cost_curve().unwrap();
    assert_eq!(resumed.manifest.config_hash, full.manifest.config_hash);
    assert_eq!(resumed.manifest.without_timing().runs, full.manifest.without_timing().runs);
    // the checkpointed runs were reused, timings included
    assert_eq!(resumed.manifest.runs[..2], full.manifest.runs[..2]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let code = |args: &[&str], cfg: Option<&Path>| {
        let mut c = bin();
        c.args(args).arg("--out").arg(&out);
        if let Some(p) = cfg {
            c.arg("--config").arg(p);
        }
        c.output().unwrap().status.code()
    };
    let bad = write(dir.path(), "bad.toml", "[estimator]\neps = [1e-3, 1e-2]\n");
    assert_eq!(code(&["run"], Some(&bad)), Some(2));
    assert_eq!(code(&["run"], Some(&dir.path().join("missing.toml"))), Some(2));
    let gv = write(dir.path(), "gv.toml", "[qmc]\ngenerating_vector = \"nope.txt\"\n");
    assert_eq!(code(&["run"], Some(&gv)), Some(2));
    let capped = write(
        dir.path(),
        "cap.toml",
        "[geometry]\nmax_level = 1\n[estimator]\nmethod = \"mc\"\neps = [1e-5]\ncost_cap = 10.0\ntiming_reps = 1\n",
    );
    assert_eq!(code(&["run"], Some(&capped)), Some(3));
    assert_eq!(code(&["run", "--preset", "problem3"], None), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", TINY);
    let run = |extra: &[&str], out: &str| {
        let st = bin()
            .arg("dump-gradient")
            .arg("--config")
            .arg(&cfg)
            .args(extra)
            .arg("--out")
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(st.success());
        manifest(&dir.path().join(out).join("gradient_manifest.json"))
    };
    let base = run(&[], "base");
    let seeded = run(&["--seed", "42", "--threads", "2"], "seeded");
    let p2 = run(&["--preset", "problem2"], "p2");
    assert_eq!(base.master_seed, 1);
    assert_eq!(seeded.master_seed, 42);
    assert_ne!(base.config_hash, seeded.config_hash);
    assert_ne!(base.runs[0].stream_seed, seeded.runs[0].stream_seed);
    assert_eq!(p2.config.problem.nu, 2.5);
    assert_eq!(p2.config.geometry.max_level, 1);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", TINY);
    let env_out = dir.path().join("from-env");
    let st = bin()
        .arg("dump-gradient")
        .arg("--config")
        .arg(&cfg)
        .env("MLQMC_OUT_DIR", &env_out)
        .current_dir(dir.path())
        .status()
        .unwrap();
    assert!(st.success());
    assert!(env_out.join("gradient.txt").exists());
}

#[test]
fn generating_vector_path_is_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "short.txt", "# test vector\n1\n182667\n469891\n498753\n110745\n");
    let cfg = write(
        dir.path(),
        "c.toml",
        "[geometry]\nmax_level = 1\n[qmc]\ngenerating_vector = \"short.txt\"\n",
    );
    let c = RunConfig::load(&cfg, None).unwrap();
    assert_eq!(c.qmc.generating_vector.as_deref(), Some(dir.path().join("short.txt").as_path()));
    let exp = Experiment::with_output(c, dir.path()).unwrap();
    let gv = &exp.hierarchy().level(1).genvec;
    assert_eq!(&gv.entries()[..5], &[1, 182667, 469891, 498753, 110745]);
    assert_eq!(gv.len(), 16);
}

#[test]
fn zero_data_variance_rows_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::from_toml_str(
        &format!("{TINY}\n[objective]\ng = {{ kind = \"zero\" }}\nz = {{ kind = \"zero\" }}\n"),
        None,
    )
    .unwrap();
    c.output.dir = dir.path().to_path_buf();
    let study = Experiment::new(c).unwrap().variance_study().unwrap();
    assert!(!study.rows.is_empty());
    assert!(study.rows.iter().all(|r| r.rv == 0.0));
}

#[test]
fn presets_match_reference_problems() {
    let p1 = config(Preset::Problem1, 4);
    let p2 = config(Preset::Problem2, 4);
    assert_eq!((p1.problem.nu, p1.problem.sigma2, p1.problem.lambda_c), (0.5, 0.1, 1.0));
    assert_eq!((p2.problem.nu, p2.problem.sigma2, p2.problem.lambda_c), (2.5, 0.1, 1.0));
    let g = &p1.objective.g;
    assert_eq!(g.eval([0.5, 0.5]), 1.0);
    assert_eq!(g.eval([0.1, 0.5]), 0.0);
    let z = &p1.objective.z;
    assert!((z.eval([0.5, 0.5]) - 20.0).abs() < 1e-12);
    assert_eq!(z.eval([0.0, 0.3]), 0.0);
    let text = p2.to_toml_string().unwrap();
    assert_eq!(RunConfig::from_toml_str(&text, Some(Preset::Problem1)).unwrap(), p2);
}
