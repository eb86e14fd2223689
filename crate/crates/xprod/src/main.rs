use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = xprod::Cli::parse();
    match xprod::run(&cli) {
        Ok(report) => {
            print!("{}", report.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
