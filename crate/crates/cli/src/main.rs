use clap::{Parser, Subcommand, ValueEnum};
use hypfrac::solver::Mode;
use hypfrac_cli::kernel_cmd::{self, KernelArgs};
use hypfrac_cli::verify::Suite;
use hypfrac_cli::{exit, solve, verify};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hypfrac",
    version,
    about = "Fractional kernels and variational solvers on the hyperbolic ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Subcritical,
    Critical,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Kernel,
    Embedding,
    Nehari,
    Maxprinciple,
    Critical,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the kernel on log-spaced points and write CSV.
    Kernel {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        rho_min: f64,
        #[arg(long)]
        rho_max: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the configuration in a JSON file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the mode of the configuration.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Run property suites and print a pass/fail table.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Command::Kernel {
            dim,
            s,
            rho_min,
            rho_max,
            points,
            out,
        } => kernel_cmd::run(&KernelArgs {
            dim,
            s,
            rho_min,
            rho_max,
            points,
            out,
        }),
        Command::Solve { config, mode } => solve::run(
            &config,
            mode.map(|m| match m {
                ModeArg::Subcritical => Mode::Subcritical,
                ModeArg::Critical => Mode::CriticalPerturbed,
            }),
        ),
        Command::Verify { suite } => verify::run(match suite {
            SuiteArg::Kernel => Suite::Kernel,
            SuiteArg::Embedding => Suite::Embedding,
            SuiteArg::Nehari => Suite::Nehari,
            SuiteArg::Maxprinciple => Suite::MaxPrinciple,
            SuiteArg::Critical => Suite::Critical,
            SuiteArg::All => Suite::All,
        }),
    };
    std::process::exit(code);
}
