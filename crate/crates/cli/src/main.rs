mod args;
mod commands;
mod error;
mod output;
mod selfcheck;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Matrix(a) => commands::matrix(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Moments(a) => commands::moments(a),
        Command::Topeig(a) => commands::topeig(a),
        Command::Selfcheck(a) => selfcheck::selfcheck(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
