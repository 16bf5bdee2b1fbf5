use clap::Parser;
use std::process::ExitCode;
use xregex::cli::{run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("xregex: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
