mod args;
mod artifact;
mod commands;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Generate(a) => commands::generate(a, seed),
        Command::Matrix(a) => commands::matrix(a, seed),
        Command::Project(a) => commands::project(a, seed),
        Command::Cluster(a) => commands::cluster(a, seed),
        Command::Cocluster(a) => commands::cocluster(a, seed, cli.jobs),
        Command::Evaluate(a) => commands::evaluate(a, seed),
        Command::Report(a) => commands::report(a, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version land here too and are not failures.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            match outcome.stdout {
                Some(doc) => {
                    let _ = std::io::stdout().write_all(doc.as_bytes());
                    eprintln!("{}", outcome.summary);
                }
                None => println!("{}", outcome.summary),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
