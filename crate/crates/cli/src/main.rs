use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use proxy_belief_cli::commands::{cmd_axioms, cmd_demo, cmd_elicit, cmd_identify, cmd_sweep, Demo, EXIT_INPUT};

#[derive(Debug, Parser)]
#[command(name = "proxy-belief", version, about = "Belief identification by proxy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Identify the actual belief from a problem file.
    Identify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a built-in demonstration.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Elicit conditionals from a synthetic agent, then identify.
    Elicit {
        #[arg(long)]
        agent: PathBuf,
        /// Objective proxy marginal, e.g. `0.5,0.5`.
        #[arg(long)]
        objective: String,
        /// Uninformative event as proxy labels, e.g. `t2`.
        #[arg(long)]
        event: String,
    },
    /// Structural axiom verdicts for a representation.
    Axioms {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        objective: String,
    },
    /// Monte Carlo robustness sweep written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let code = match cli.command {
        Command::Identify { input, output } => cmd_identify(&input, &output),
        Command::Demo { which, seed } => cmd_demo(which, seed),
        Command::Elicit { agent, objective, event } => cmd_elicit(&agent, &objective, &event),
        Command::Axioms { rep, objective } => cmd_axioms(&rep, &objective),
        Command::Sweep { config, csv } => cmd_sweep(&config, &csv),
    };
    ExitCode::from(code as u8)
}
