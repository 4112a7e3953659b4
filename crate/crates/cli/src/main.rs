use std::process::ExitCode;

use clap::Parser;
use qsera_cli::args::Cli;
use qsera_cli::commands::dispatch;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QSERA_LOG", "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qsera: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
