use std::process::ExitCode;

use clap::Parser;
use polylift::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    let out = match run(&config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match &config.options.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", out.json),
    }
    ExitCode::from(out.code as u8)
}
