use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pdseq_cli::{parse_config, run_file, Command};

#[derive(Parser)]
#[command(name = "pdseq", version, about = "Correlation sequences for positive definite functions")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Run the command described by a TOML config.
    Run {
        config: PathBuf,
        /// Print the structured report to stdout even when `out.structured` is set.
        #[arg(long)]
        print: bool,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the available commands.
    Commands,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.action {
        Action::Run { config, print } => run_file(&config).map(|(report, code)| {
            if print || report.config.out.structured.is_none() {
                print!("{}", report.to_structured());
            }
            code
        }),
        Action::Validate { config } => std::fs::read_to_string(&config)
            .map_err(|e| pdseq_cli::CliError::io(&config, e))
            .and_then(|t| parse_config(&t))
            .map(|_| 0),
        Action::Commands => {
            for c in Command::ALL {
                println!("{}", c.name());
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("pdseq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
