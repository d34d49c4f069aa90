use std::process::ExitCode;

use clap::Parser;
use lisf::cli::{run, Cli};
use lisf::export::emit;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| emit(&out).map_err(|e| lisf::CliError::io("<stdout>", e)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lisf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
