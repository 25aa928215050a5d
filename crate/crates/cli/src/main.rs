use std::path::PathBuf;
use std::process::ExitCode;

use cauchy_cli::{run, Command, ExperimentConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use cauchy_core::CauchyError;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cauchy", version, about = "Dirac kernels on Cauchy surfaces: identity checks and refinement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Small grids for a fast run.
    #[arg(long, global = true)]
    quick: bool,
    /// Output directory for CSV tables.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Klein-Gordon, Lorentz symmetry, r^2 dslash D and Dirac identities; gauge and boost covariance.
    VerifyIdentities,
    /// Sampled upper and lower bounds on K_1, D and p^-.
    VerifyBounds,
    /// HS growth of Delta P^A - Delta P^B under grid refinement.
    Dichotomy,
    /// Unitary representative e^Q P^- e^-Q on a flat grid.
    Representative,
    /// Flow derivative scaling and remainder HS norms.
    Flow,
    /// Analytic kernels against mass-shell quadrature.
    OracleCrosscheck,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::VerifyIdentities => Command::VerifyIdentities,
            Sub::VerifyBounds => Command::VerifyBounds,
            Sub::Dichotomy => Command::Dichotomy,
            Sub::Representative => Command::Representative,
            Sub::Flow => Command::Flow,
            Sub::OracleCrosscheck => Command::OracleCrosscheck,
        }
    }
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return exit(if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS });
        }
    };
    let mut cfg = match &cli.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return exit(EXIT_CONFIG);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let cmd = Command::from(cli.command);
    let table = match run(cmd, &cfg, cli.quick) {
        Ok(t) => t,
        Err(e @ CauchyError::Config(_)) => {
            eprintln!("error: {e}");
            return exit(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return exit(EXIT_FAIL);
        }
    };
    if let Err(e) = table.write(&cli.out, cmd.name()) {
        eprintln!("error: cannot write results to {}: {e}", cli.out.display());
        return exit(EXIT_CONFIG);
    }
    let config_path = cli.out.join(format!("{}_config.json", cmd.name()));
    if let Err(e) = std::fs::write(&config_path, cfg.canonical_json()) {
        eprintln!("error: cannot write {}: {e}", config_path.display());
        return exit(EXIT_CONFIG);
    }
    let checked = table.rows.iter().filter(|r| r.pass.is_some()).count();
    let failed: Vec<_> = table.failures().collect();
    for r in &failed {
        eprintln!("FAIL {} [{}] {} = {:.6e} ({})", r.experiment, r.parameters, r.metric, r.value, r.criterion);
    }
    println!(
        "{}: {} of {} checks passed; config {}; tables in {}",
        cmd.name(),
        checked - failed.len(),
        checked,
        table.config_hash,
        cli.out.display()
    );
    exit(if failed.is_empty() { EXIT_PASS } else { EXIT_FAIL })
}
