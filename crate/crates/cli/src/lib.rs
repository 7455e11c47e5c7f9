//! `kproj`: generate, analyze and verify k-projective sequences from JSON specs.
//!
//! Exit codes: 0 success, 1 the mathematics says no (a hypothesis or a
//! verification failed), 2 bad usage or a malformed document.

pub mod builtins;
pub mod cache;
pub mod commands;
pub mod document;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid document {0}")]
    Schema(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] kproj_core::Error),
}

impl CliError {
    pub fn io(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_math_failure() => 1,
            _ => 2,
        }
    }
}

/// What a command printed and whether its checks passed.
pub struct Outcome {
    pub stdout: Vec<u8>,
    pub passed: bool,
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::execute(cli) {
        Ok(out) => {
            let _ = stdout.write_all(&out.stdout);
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
