use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use idgauss_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok((outcome, out)) => {
            if let Err(e) = emit(out.as_deref(), &outcome.output) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            eprintln!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
