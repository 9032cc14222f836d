//! Command-line front end: an expression language for polynomials, rational
//! functions and Darboux functions, `key: value` job documents, and one
//! subcommand per verification in `foliage-core`.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on malformed input.

pub mod commands;
pub mod error;
pub mod expr;
pub mod job;
pub mod lower;

pub use commands::{run_command, Command, Format, JobConfig, Outcome, Overrides};
pub use error::CliError;
pub use expr::{parse_expression, Expr, ParseError};
pub use lower::{lower_to_semantics, LowerError, Semantic};

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "foliage", version, about = "Verify first integrals, blow-ups, singular points and conjugacies")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Job documents; `-` reads standard input.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    /// Ordered variable list, e.g. `x,y,z`.
    #[arg(long)]
    pub vars: Option<String>,
    /// Blow-up chart name.
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// Escape radius for leaf tracing.
    #[arg(long)]
    pub escape: Option<f64>,
    /// Tolerance for numeric checks.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Write results here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read_input(path: &str) -> Result<String, CliError> {
    let mut s = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut s).map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
    } else {
        s = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    }
    Ok(s)
}

/// Runs every input and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let flags = Overrides {
        vars: cli.vars.clone(),
        chart: cli.chart.clone(),
        step: cli.step,
        n_steps: cli.n_steps,
        escape: cli.escape,
        tol: cli.tol,
    };
    let mut rendered = String::new();
    let mut code = 0;
    for input in &cli.inputs {
        let result = read_input(input)
            .and_then(|text| job::JobDoc::parse(input, &text))
            .and_then(|doc| JobConfig::new(cli.command, doc, &flags))
            .and_then(|cfg| run_command(&cfg));
        match result {
            Ok(o) => {
                rendered.push_str(&o.render(cli.format));
                if !o.passed {
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = 2;
            }
        }
    }
    let written = match &cli.out {
        Some(p) => {
            std::fs::write(p, &rendered).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        None => std::io::stdout()
            .write_all(rendered.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    code
}
