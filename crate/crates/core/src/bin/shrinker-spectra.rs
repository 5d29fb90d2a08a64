use std::io::{stderr, stdout};
use std::process::ExitCode;

use shrinker_spectra::cli;

fn main() -> ExitCode {
    if let Err(e) = cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(cli::EXIT_INPUT as u8);
    }
    let code = cli::run(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code as u8)
}
