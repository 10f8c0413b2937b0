use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = sketchnes::cli::Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match sketchnes::cli::run(args, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
