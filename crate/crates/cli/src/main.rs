use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rentdiv_cli::{cmd_oracle, cmd_report, cmd_solve, cmd_solve_dir, cmd_verify, CommandOutput};
use rentdiv_core::{Objective, OracleObjective};

#[derive(Parser)]
#[command(name = "rentdiv", version, about = "Exact envy-free rent division")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print the result as JSON.
    Solve {
        #[arg(required_unless_present = "input_dir", conflicts_with = "input_dir")]
        input: Option<PathBuf>,
        /// Solve every `*.json` file in this directory.
        #[arg(long)]
        input_dir: Option<PathBuf>,
        #[arg(long, default_value = "any", value_parser = parse_objective)]
        objective: Objective,
        /// Include the dynamics event log.
        #[arg(long)]
        trace: bool,
    },
    /// Re-check a result file against its instance.
    Verify { input: PathBuf, result: PathBuf },
    /// Answer by linear programming over every welfare-maximizing assignment.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value = "any", value_parser = parse_oracle_objective)]
        objective: OracleObjective,
    },
    /// Print a readable table of the solution.
    Report {
        input: PathBuf,
        #[arg(long, default_value = "any", value_parser = parse_objective)]
        objective: Objective,
        /// Append the final envy graph in DOT.
        #[arg(long)]
        dot: bool,
    },
}

fn parse_objective(text: &str) -> Result<Objective, String> {
    match text.parse::<Objective>()? {
        Objective::MaxTotalRent => Err("maxtotalrent is only available from the oracle".to_string()),
        objective => Ok(objective),
    }
}

fn parse_oracle_objective(text: &str) -> Result<OracleObjective, String> {
    text.parse()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RENTDIV_LOG")).init();
    let cli = Cli::parse();
    let output: CommandOutput = match cli.command {
        Command::Solve { input_dir: Some(dir), objective, trace, .. } => cmd_solve_dir(&dir, objective, trace),
        Command::Solve { input, objective, trace, .. } => {
            cmd_solve(&input.expect("clap requires an input"), objective, trace)
        }
        Command::Verify { input, result } => cmd_verify(&input, &result),
        Command::Oracle { input, objective } => cmd_oracle(&input, objective),
        Command::Report { input, objective, dot } => cmd_report(&input, objective, dot),
    };
    let _ = std::io::stdout().write_all(output.stdout.as_bytes());
    let _ = std::io::stderr().write_all(output.stderr.as_bytes());
    ExitCode::from(output.exit_code as u8)
}
