use std::process::ExitCode;

use clap::Parser;
use env_logger::Env;

use bmin::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::new().filter_or("BMIN_LOG", "off")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.stdout)
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", outcome.stdout);
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::from(outcome.code as u8),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
