use std::process::ExitCode;

use blochsep_cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            match outcome.written_to {
                Some(path) => eprintln!("wrote {}", path.display()),
                None => print!("{}", outcome.text),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
