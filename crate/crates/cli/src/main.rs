use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use randseries_cli::{output, run, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.to_config().and_then(|cfg| Ok((cfg.command, run(&cfg)?)));
    match outcome {
        Ok((command, o)) => {
            if let Some(text) = &o.stdout {
                let _ = std::io::stdout().write_all(text.as_bytes());
            }
            if command == Command::Verify {
                eprint!("{}", output::report_table(&o.reports));
            }
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
