use std::process::ExitCode;

use clap::Parser;
use qcap_cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
