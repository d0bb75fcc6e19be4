use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use mintime_cli::commands::{self, CliError, Overrides, SampleSpacing};

#[derive(Parser, Debug)]
#[command(
    name = "mintime",
    version,
    about = "Minimum-time trajectories under bounded acceleration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem file and write the solution as JSON.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        theta_grid: Option<usize>,
        #[arg(long)]
        alpha_grid: Option<usize>,
        /// Residual tolerance of the continuous search.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Report which case the boundary data fall in.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Check a solution file against its problem. Exit 0 iff it passes.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Sample a solution as CSV `t,x,y,vx,vy,ax,ay`.
    #[command(group(ArgGroup::new("spacing").required(true).args(["dt", "count"])))]
    Sample {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Solve every row of a CSV file.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Tabulate the dilation bound as CSV `theta,lambda`.
    Lambda {
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        steps: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Solve {
            input,
            output,
            theta_grid,
            alpha_grid,
            tol,
        } => commands::cmd_solve(
            &input,
            output.as_deref(),
            Overrides {
                theta_grid,
                alpha_grid,
                tol,
            },
            &mut out,
        ),
        Command::Classify { input } => commands::cmd_classify(&input, &mut out),
        Command::Verify { problem, solution } => {
            commands::cmd_verify(&problem, &solution, &mut out)
        }
        Command::Sample {
            solution,
            dt,
            count,
        } => {
            let spacing = match (dt, count) {
                (Some(dt), _) => SampleSpacing::Dt(dt),
                (_, Some(n)) => SampleSpacing::Count(n),
                _ => unreachable!("clap requires one of --dt/--count"),
            };
            commands::cmd_sample(&solution, spacing, &mut out)
        }
        Command::Batch { input, output } => commands::cmd_batch(&input, &output).map(|_| ()),
        Command::Lambda { t, steps } => commands::cmd_lambda(t, steps, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mintime: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
