use std::process::ExitCode;

use clap::Parser;
use relfix::cli::Cli;

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "not converged"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match relfix::run::run_and_write(&cli.into_config()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
