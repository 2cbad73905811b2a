use std::process::ExitCode;

use clap::Parser;
use susy_damp::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    match cli::run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("susy-damp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
