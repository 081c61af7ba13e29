use clap::{Parser, Subcommand};
use mlqmc::experiment::{load_config, Experiment, Preset};
use mlqmc::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mlqmc", version, about = "Multilevel QMC gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config; keys not given fall back to the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides the config and MLQMC_OUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_parser = ["problem1", "problem2"])]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the gradient at every configured tolerance.
    Run,
    /// Level variances against the number of lattice points.
    VarianceStudy,
    /// Cost against tolerance for all configured methods.
    CostCurve,
    /// Gradient field at the smallest tolerance.
    DumpGradient,
}

fn execute(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let preset = cli.preset.as_deref().map(str::parse::<Preset>).transpose()?;
    let mut cfg = load_config(cli.config.as_deref(), preset)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    let out = cli.out.unwrap_or_else(|| cfg.resolved_output_dir());
    let exp = Experiment::with_output(cfg, &out)?;
    match cli.command {
        Command::Run => {
            let (m, _) = exp.run()?;
            for r in &m.runs {
                println!(
                    "{} eps={:e} rmse={:e} cost={:.4}",
                    r.method.name(),
                    r.eps,
                    r.rmse_quadrature,
                    r.model_cost
                );
            }
        }
        Command::VarianceStudy => {
            let study = exp.variance_study()?;
            for s in &study.slopes {
                println!("level {} slope {:.3} (N {}..{})", s.ell, s.slope, s.n_from, s.n_to);
            }
        }
        Command::CostCurve => {
            let curve = exp.cost_curve()?;
            for e in &curve.exponents {
                println!("{} exponent {:.3}", e.method.name(), e.exponent);
            }
        }
        Command::DumpGradient => {
            let (_, est) = exp.dump_gradient()?;
            println!(
                "gradient on {} nodes per axis, rmse {:e}",
                est.gradient.mesh().nodes_per_axis(),
                est.rmse_quadrature
            );
        }
    }
    println!("artifacts in {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
