use std::process::ExitCode;

use clap::Parser;

use qstar_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("qstar: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
