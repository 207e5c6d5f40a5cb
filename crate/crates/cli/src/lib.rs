//! Command-line front end for the `confound` toolkit.
//!
//! [`run`] parses arguments, executes one command and returns what should be
//! written to standard output together with the exit code, so the binary is
//! a thin wrapper and the commands can be tested in-process.

pub mod bundled;
mod commands;
pub mod model;
mod output;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use confound::latent::Template;
use confound::ErrorClass;

pub use model::{parse_model, Location, ModelFile, ParseError};

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A boolean query answered "false".
    pub const FALSE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const MATH: i32 = 4;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: exit::INPUT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<confound::Error> for CliError {
    fn from(e: confound::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Usage => exit::USAGE,
            ErrorClass::Input => exit::INPUT,
            ErrorClass::Math => exit::MATH,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::input(format!("parse error: {e}"))
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub code: i32,
}

#[derive(Debug, Parser)]
#[command(
    name = "confound",
    version,
    about = "Exact causal effects, adjustment bias and confounder selection on discrete Bayesian networks"
)]
pub struct Cli {
    /// Emit JSON instead of text tables.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// `NAME=state` on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment(pub String, pub String);

fn parse_assignment(s: &str) -> Result<Assignment, String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => {
            Ok(Assignment(k.trim().into(), v.trim().into()))
        }
        _ => Err(format!("expected NAME=VALUE, got `{s}`")),
    }
}

/// `NAME=start:stop:step` for a scan axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisArg {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

fn parse_axis(s: &str) -> Result<AxisArg, String> {
    let Assignment(name, range) = parse_assignment(s)?;
    let parts: Vec<&str> = range.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected NAME=start:stop:step, got `{s}`"));
    };
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    Ok(AxisArg {
        name,
        start: num(a)?,
        stop: num(b)?,
        step: num(c)?,
    })
}

fn parse_fixed(s: &str) -> Result<(String, f64), String> {
    let Assignment(name, v) = parse_assignment(s)?;
    let v = v
        .parse::<f64>()
        .map_err(|_| format!("`{v}` is not a number"))?;
    Ok((name, v))
}

fn parse_template(s: &str) -> Result<Template, String> {
    s.parse::<Template>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Graph,
    Dist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Sum,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    /// `t` takes the upper endpoint.
    Upper,
    /// `t` takes the lower endpoint.
    Lower,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional distribution p(targets | evidence).
    Query {
        /// Model file path or bundled model name.
        model: String,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(long, value_delimiter = ',', value_parser = parse_assignment)]
        given: Vec<Assignment>,
    },
    /// Interventional distribution p(targets | do(assignments)).
    Do {
        model: String,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(long = "do", value_delimiter = ',', value_parser = parse_assignment, required = true)]
        assign: Vec<Assignment>,
    },
    /// Average causal effect E[Y | do(z1)] - E[Y | do(z0)].
    Ace {
        model: String,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        /// Treatment level of the first arm (default: last state).
        #[arg(long)]
        z1: Option<String>,
        /// Treatment level of the baseline arm (default: first state).
        #[arg(long)]
        z0: Option<String>,
        /// Real value of each outcome state, in state order.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Adjusted estimate over a covariate set, compared with the truth.
    Adjust {
        model: String,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        /// Adjustment set; omit or pass an empty string for the empty set.
        #[arg(long, value_delimiter = ',')]
        set: Vec<String>,
    },
    /// d-separation test; exit code 0 for true, 1 for false.
    Dsep {
        model: String,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
    },
    /// Back-door criterion test; exit code 0 for true, 1 for false.
    Backdoor {
        model: String,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        #[arg(long, value_delimiter = ',')]
        set: Vec<String>,
    },
    /// Two-stage selection of a sufficient confounder set.
    Select {
        model: String,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        #[arg(long, value_enum, default_value = "graph")]
        mode: ModeArg,
        /// Equality tolerance in dist mode.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value = "sum")]
        metric: MetricArg,
    },
    /// Bias of conditioning on covariates instead of ignoring them.
    Bias {
        model: String,
        #[arg(long)]
        treatment: String,
        #[arg(long)]
        outcome: String,
        #[arg(long, value_delimiter = ',', required = true)]
        covariate: Vec<String>,
        #[arg(long)]
        z1: Option<String>,
        #[arg(long)]
        z0: Option<String>,
    },
    /// Exact condition-versus-ignore scan over a template's parameters.
    Scan {
        #[arg(long, value_parser = parse_template)]
        template: Template,
        /// Scanned parameter, NAME=start:stop:step; repeat for more axes.
        #[arg(long, value_parser = parse_axis, required = true)]
        param: Vec<AxisArg>,
        /// Fixed parameter override, NAME=value.
        #[arg(long, value_parser = parse_fixed)]
        set: Vec<(String, f64)>,
        /// CSV destination; the CSV goes to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate cells on one thread.
        #[arg(long)]
        serial: bool,
        /// Add mutual-information columns.
        #[arg(long)]
        mi: bool,
        #[arg(long, default_value = "Z")]
        treatment: String,
        #[arg(long, default_value = "Y")]
        outcome: String,
        #[arg(long, default_value = "X")]
        covariate: String,
    },
    /// Common-cause decomposition of p(x|y), p(x|y').
    Decompose {
        #[arg(long)]
        py: f64,
        #[arg(long)]
        pyp: f64,
        #[arg(long, requires = "hi", conflicts_with = "margin")]
        lo: Option<f64>,
        #[arg(long, requires = "lo", conflicts_with = "margin")]
        hi: Option<f64>,
        /// Endpoints at min - margin and max + margin (default 0.05).
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long, value_enum, default_value = "upper")]
        orientation: OrientationArg,
    },
    /// Feasible range of a third correlation; with --r3, a verdict.
    Corr {
        #[arg(long, allow_hyphen_values = true)]
        r1: f64,
        #[arg(long, allow_hyphen_values = true)]
        r2: f64,
        #[arg(long, allow_hyphen_values = true)]
        r3: Option<f64>,
    },
    /// Seeded forward sampling to CSV.
    Sample {
        model: String,
        #[arg(short = 'n', long = "rows")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a model in canonical form.
    Show { model: String },
}

/// Parses `args` (program name first) and runs the command.
///
/// Diagnostics are returned as `Err` and belong on standard error.
pub fn run<I, S>(args: I) -> Result<Report, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Report {
                    stdout: e.to_string(),
                    code: exit::OK,
                }),
                _ => Err(CliError::usage(e.to_string().trim_end())),
            };
        }
    };
    commands::execute(&cli.command, cli.json)
}
