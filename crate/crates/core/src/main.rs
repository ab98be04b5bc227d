use std::process::ExitCode;

use clap::Parser;

use bcsi::cli::{configure_threads, run, write_output, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result =
        configure_threads().and_then(|_| run(&cli.command)).and_then(|text| write_output(cli.command.out(), &text));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
