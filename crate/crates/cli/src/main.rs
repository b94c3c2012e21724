#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use args::{Cli, Command};
use commands::Failure;

fn run(cli: &Cli) -> Result<String, Failure> {
    let common = &cli.common;
    if let Some(recipe) = cli.recipe {
        return commands::run_recipe(recipe, common);
    }
    match cli.command.as_ref() {
        Some(Command::Capacity(a)) => commands::run_capacity(a, common),
        Some(Command::Dispersion(a)) => commands::run_dispersion(a, common),
        Some(Command::SecondOrder(a)) => commands::run_second_order(a, common),
        Some(Command::Markov(a)) => commands::run_markov(a),
        Some(Command::Gaussian(a)) => commands::run_gaussian(a),
        Some(Command::GallagerCompare(a)) => commands::run_gallager_compare(a, common),
        Some(Command::GallagerLimit(a)) => commands::run_gallager_limit(a, common),
        Some(Command::Simulate(a)) => commands::run_simulate(a, common),
        Some(Command::Oracle(a)) => commands::run_oracle(a, common),
        Some(Command::Example61(a)) => commands::run_example(a, common),
        None => Err(Failure::Input(
            "a subcommand or --recipe is required".into(),
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
