//! CSV/JSON emission helpers shared by the subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use neurokernel::Error;

/// A failure carrying the process exit code.
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError { code: 2, message: message.into() }
    }

    pub fn resource(message: impl Into<String>) -> CliError {
        CliError { code: 4, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match &e {
            // arguments outside an operation's domain are config errors
            Error::InvalidInput(_) | Error::Domain(_) => 2,
            Error::NumericalInconsistency(_) => 3,
            // Unsupported marks dimension/size limits of dense routines
            Error::Unsupported(_) => 4,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError { code: 2, message: format!("io error: {e}") }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Fixed 17-significant-digit scientific formatting, so reruns are
/// byte-identical and parsing back loses nothing.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` + `rows` to `path`, or to stdout when no path given.
pub fn write_csv(path: Option<&Path>, header: &str, rows: &[String]) -> CliResult<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 2);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
