mod args;
mod commands;
mod metric;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let command = std::env::args()
        .skip(1)
        .find(|a| ["generate", "select", "evaluate", "simulate", "experiment", "verify"].contains(&a.as_str()))
        .unwrap_or_default();
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            if failure.code == output::EXIT_INVALID {
                eprintln!("\nFor usage, run: inputsel {command} --help");
            }
            ExitCode::from(failure.code)
        }
    }
}
