//! Library side of the `rabi` command: configuration, the time sweep, and
//! report rendering. The binary is a thin wrapper around [`execute`].

pub mod config;
pub mod error;
pub mod report;

pub use config::{parse_config, validate, Cli, Format, MethodChoice, RawConfig, RunConfig, TimeGrid};
pub use error::{CliError, Result};
pub use report::{run_sweep, write_output, Report};

/// Parses, sweeps, and writes. Returns the rendered output when no path is
/// configured, so the caller can print it.
pub fn execute(cli: &Cli) -> Result<Option<String>> {
    let cfg = parse_config(cli)?;
    let report = run_sweep(&cfg)?;
    let text = report.render(cfg.output.format);
    match &cfg.output.path {
        Some(path) => {
            write_output(path, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}
