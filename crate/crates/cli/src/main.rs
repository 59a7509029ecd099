mod args;
mod io;
mod reproduce;
mod run;
mod sim;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use clustcert::{Error, ErrorFamily, Result};

use args::{Cli, Command};
use io::{Manifest, Outputs};

fn exit_code(e: &Error) -> u8 {
    match e.family() {
        ErrorFamily::Ingestion => 3,
        ErrorFamily::Validation => 4,
        ErrorFamily::Solver => 5,
        ErrorFamily::Tuning => 6,
    }
}

fn execute(command: &Command, out_dir: &Path) -> Result<()> {
    if let Command::Replay(a) = command {
        let manifest = Manifest::load(&a.manifest)?;
        if manifest.tool != "clustcert" {
            return Err(Error::Validation(format!(
                "'{}' is not a clustcert manifest",
                a.manifest.display()
            )));
        }
        if matches!(manifest.command, Command::Replay(_)) {
            return Err(Error::Validation("manifest records a replay".into()));
        }
        if manifest.version != env!("CARGO_PKG_VERSION") {
            eprintln!(
                "warning: manifest written by version {}, replaying with {}",
                manifest.version,
                env!("CARGO_PKG_VERSION")
            );
        }
        return execute(&manifest.command, out_dir);
    }

    let mut out = Outputs::create(out_dir)?;
    match command {
        Command::Certainty(a) => run::certainty(a, &mut out)?,
        Command::Fanny(a) => run::fanny_cmd(a, &mut out)?,
        Command::Simulate(a) => sim::simulate(a, &mut out)?,
        Command::Reproduce(a) => reproduce::reproduce(a, &mut out)?,
        Command::Hist(a) => run::hist(a, &mut out)?,
        Command::Replay(_) => unreachable!("handled above"),
    }
    out.finish(command)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut command = cli.command;
    io::absolutize(&mut command);
    match execute(&command, &cli.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
