use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pq_slln_cli::commands::{
    cmd_criteria, cmd_report, cmd_simulate, cmd_verify, run_matrix, MatrixSettings, SimulateArgs, Suite,
    VerifySettings,
};
use pq_slln_cli::{CliError, Format};

#[derive(Parser)]
#[command(
    name = "pq-slln",
    version,
    about = "Criteria, simulation and exact checks for (p,q)-type strong laws"
)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "PQ_SLLN_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the membership criterion for a model and (p, q).
    Criteria {
        #[arg(long)]
        config: PathBuf,
        /// Directory for criteria.json; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo experiment.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run exact and Monte Carlo checks of the inequalities.
    Verify {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare analytic and empirical verdicts across simulate manifests.
    Report {
        manifests: Vec<PathBuf>,
        /// Also simulate the built-in model matrix into OUT/matrix and include it.
        #[arg(long)]
        matrix: bool,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        replications: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let workers = cli.workers;
    match cli.command {
        Command::Criteria { config, out } => Ok(cmd_criteria(&config, out.as_deref())?.1),
        Command::Simulate {
            config,
            out,
            seed,
            format,
        } => {
            cmd_simulate(&SimulateArgs {
                config,
                out,
                seed,
                workers,
                format,
            })?;
            Ok(0)
        }
        Command::Verify { suite, out, seed } => {
            let mut settings = VerifySettings::default();
            if let Some(s) = seed {
                settings.seed = s;
            }
            Ok(cmd_verify(suite, &settings, out.as_deref(), workers)?.1)
        }
        Command::Report {
            mut manifests,
            matrix,
            n_max,
            replications,
            seed,
            out,
            format,
        } => {
            if matrix {
                let mut s = MatrixSettings::default();
                s.n_max = n_max.unwrap_or(s.n_max);
                s.replications = replications.unwrap_or(s.replications);
                s.master_seed = seed.unwrap_or(s.master_seed);
                let base = out.clone().unwrap_or_else(|| PathBuf::from("."));
                manifests.extend(run_matrix(&base.join("matrix"), s, workers)?);
            }
            Ok(cmd_report(&manifests, out.as_deref(), format)?.1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
