//! Command-line front end for `heunrwe`. Every command produces a
//! [`report::Report`]; exit codes are 0 on success, 2 for bad input,
//! 3 when a series fails to converge and 4 for solver configuration errors.

pub mod args;
pub mod commands;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{CommandFactory, FromArgMatches};
use heunrwe::Units;
use serde_json::Map;

use args::{Cli, Format, GlobalOpts, UnitChoice};
use report::{Failure, Report};

pub const HBAR_SI: f64 = 1.054_571_817e-34;
pub const C_SI: f64 = 299_792_458.0;
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;

/// The unit system selected by the global flags.
pub fn units(g: &GlobalOpts) -> Result<Units, Failure> {
    match g.units {
        UnitChoice::Natural => {
            if g.mass.is_some() || g.charge.is_some() {
                return Err(Failure::input("--mass and --charge need --units si"));
            }
            Ok(Units::natural())
        }
        UnitChoice::Si => Ok(Units::new(
            HBAR_SI,
            g.mass.unwrap_or(ELECTRON_MASS_SI),
            C_SI,
            g.charge.unwrap_or(ELEMENTARY_CHARGE_SI),
        )?),
    }
}

/// Runs already-parsed arguments.
pub fn execute(cli: &Cli, command: Vec<String>) -> Report {
    let (units, outcome) = match units(&cli.global) {
        Ok(u) => (Some((cli.global.units, u)), commands::run(&cli.command, &u)),
        Err(f) => (None, Err(f)),
    };
    Report {
        command,
        inputs: Map::new(),
        units,
        outcome,
    }
}

/// The clap command with negative numbers accepted as values everywhere.
pub fn command_tree() -> clap::Command {
    fn relax(cmd: clap::Command) -> clap::Command {
        let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_owned()).collect();
        names
            .iter()
            .fold(cmd.allow_negative_numbers(true), |c, n| c.mut_subcommand(n, relax))
    }
    relax(Cli::command())
}

/// Parses `argv`, runs the command, writes the report and returns the exit code.
pub fn main_with(argv: Vec<OsString>) -> i32 {
    let command: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match command_tree()
        .try_get_matches_from(&argv)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            let report = Report {
                command,
                inputs: Map::new(),
                units: None,
                outcome: Err(Failure::input(line.trim_start_matches("error: "))),
            };
            eprintln!("heunrwe: {line}");
            print!("{}", report.render_json());
            return report.exit_code();
        }
    };
    let report = execute(&cli, command);
    let text = match cli.global.format {
        Format::Json => report.render_json(),
        Format::Csv => report.render_csv(),
    };
    if let Err(f) = &report.outcome {
        eprintln!("heunrwe: {}", f.message);
    }
    let written = match &cli.global.out {
        Some(path) => fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("heunrwe: cannot write report: {e}");
        return 2;
    }
    report.exit_code()
}
