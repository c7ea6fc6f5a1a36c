use std::process::ExitCode;

use clap::Parser;

use limitkit::cli::Cli;
use limitkit::commands;

fn main() -> ExitCode {
    // Usage errors exit with code 2 through clap before we get here.
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.class.exit_code()
        }
    }
}
