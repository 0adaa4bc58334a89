//! The `onebit` command line.
//!
//! Exit codes: 0 on success or a passing check, 1 on usage and runtime
//! errors, 2 when `check` finds a violation, 3 when an m-window is asked for
//! below its proven range of `n` without `--force`.

mod args;
mod commands;
mod svg;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::Parser;

pub use args::Cli;
pub use svg::{render_figure, FigureLine};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_VALIDITY: i32 = 3;

/// Parses `args` (program name first) and runs the subcommand against the
/// process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match commands::execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
