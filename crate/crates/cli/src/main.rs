//! `flagsym`: enumerate classes, print frames and symmetries, verify them,
//! and run the point analyses.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flagsym_core::Mode;

#[derive(Parser, Debug)]
#[command(name = "flagsym", version, about = "Symmetries of Goursat flags and special 2-flags")]
pub struct Cli {
    /// goursat or flag2
    #[arg(long, global = true, default_value = "flag2", value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Args, Debug)]
pub struct CodeArg {
    /// Class code in dotted notation, e.g. 1.2.1
    #[arg(long)]
    pub code: String,
}

#[derive(Args, Debug)]
pub struct PointArg {
    /// Comma-separated name=value list; omitted coordinates are 0.
    #[arg(long, default_value = "")]
    pub point: String,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// List the classes of a given length.
    Enumerate {
        #[arg(long)]
        length: usize,
        /// Print only the number of classes.
        #[arg(long)]
        count: bool,
    },
    /// Print the frame ladder of a chart.
    Frame {
        #[command(flatten)]
        code: CodeArg,
    },
    /// Print the general infinitesimal symmetry of a chart.
    Symmetry {
        #[command(flatten)]
        code: CodeArg,
        /// Print term counts per component instead of the formulas.
        #[arg(long)]
        manifest: bool,
    },
    /// Check tangency of the symmetry, symbolically and on random instances.
    Verify {
        #[arg(long, conflicts_with = "length", required_unless_present = "length")]
        code: Option<String>,
        /// Verify every class of this length.
        #[arg(long)]
        length: Option<usize>,
        /// Random polynomial instances per class.
        #[arg(long, default_value_t = 0)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Small growth vector at a point.
    Sgv {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        point: PointArg,
    },
    /// Singularity class of a point of a chart.
    Classify {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        point: PointArg,
    },
    /// Freeze all but the exempt components at a point and decide the targets.
    Freeze {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        point: PointArg,
        /// Components left free (the targets), e.g. F7.
        #[arg(long, value_delimiter = ',', required = true)]
        exempt: Vec<String>,
        /// Assumptions of the form `c!=0`.
        #[arg(long)]
        assume: Vec<String>,
    },
    /// Orbit representatives of the class 1.2.1.1.
    Orbits,
    /// F5, G5 over the orbits of 1.2.1.1 prolonged by a fifth letter.
    Prolong1211 {
        /// Fifth letter: 1, 2 or 3.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        i5: u8,
        /// Orbit number (1-6) or name; all orbits when omitted.
        #[arg(long)]
        orbit: Option<String>,
        #[arg(long, default_value = "0")]
        x5: String,
        #[arg(long, default_value = "0")]
        y5: String,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (report, failure) = match commands::run(&cli) {
        Ok(report) => (Some(report), None),
        Err(e) => (e.report().map(str::to_string), Some(e)),
    };
    if let Some(report) = report {
        match &cli.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, report) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => print!("{report}"),
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
