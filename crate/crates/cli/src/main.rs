//! `posmap`: analysis, conversion, bridging and evolution over the shared
//! JSON formats.

mod commands;
mod gallery;

use std::process::ExitCode;

use clap::Parser;

use posmap::Error;

/// Exit status for a library error: 2 for unusable input, 4 for resource
/// limits, 3 for everything the input was well-formed but mathematically
/// unsuitable for.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::KindMismatch(_)
        | Error::BadParameter(_) => 2,
        Error::ResourceLimit(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = commands::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
