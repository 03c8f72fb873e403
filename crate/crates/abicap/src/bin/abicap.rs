use std::process::ExitCode;

use abicap::cli::{dispatch, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(dispatch(cli) as u8)
}
