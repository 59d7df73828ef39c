use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match ensemble_gp::run(ensemble_gp::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
