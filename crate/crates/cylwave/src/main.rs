use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cylwave::config::{load_file_config, parse_config, Args};
use cylwave::{run, CliError};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            eprintln!("cylwave: {}", CliError::usage(e.to_string().trim_start_matches("error: ").trim_end().to_string()));
            return ExitCode::from(1);
        }
    };
    let result = load_file_config(&args).and_then(|file| parse_config(args, file)).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cylwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
