//! Flags, config files, and the validated [`RunConfig`].

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rabi_core::{CouplingVector, DriveConfig, Execution, InitialState, Method, DEFAULT_TOL};
use serde::Deserialize;

use crate::error::{classify, CliError, Result};

/// Largest level count served by the radical eigenvalue formulas.
pub const CLOSED_FORM_MAX_LEVELS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    /// `closed` up to 7 levels, `general` above.
    Auto,
    Closed,
    General,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Time sweep of an n-level atom under n − 1 resonant drives.
///
/// Every flag may also be given in a TOML or JSON file passed with
/// `--config`, using the flag name with underscores; flags win.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "rabi", version, about)]
pub struct Cli {
    /// TOML (`.toml`) or JSON (anything else) file with the same fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of levels; inferred from the couplings when omitted.
    #[arg(long)]
    pub n: Option<usize>,
    /// Coupling strengths g_1..g_{n-1}, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub couplings: Option<Vec<f64>>,
    /// Drive frequencies ω_1..ω_{n-1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omegas: Option<Vec<f64>>,
    /// Drive phases φ_1..φ_{n-1}; zero when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phis: Option<Vec<f64>>,
    /// Ground energy E_0.
    #[arg(long, allow_hyphen_values = true)]
    pub e0: Option<f64>,
    /// Level energies E_0..E_{n-1}; replaces --omegas and --e0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub energies: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Number of intervals; the grid has steps + 1 points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    /// A level index, or n comma-separated complex amplitudes such as `0.6,0.8i`.
    #[arg(long, allow_hyphen_values = true)]
    pub initial: Option<String>,
    /// Eigenvalue tolerance relative to the spectral bound.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Defaults to json for a `.json` output path, csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Evaluate time samples on one thread.
    #[arg(long)]
    pub sequential: bool,
}

/// One complex amplitude as written in a config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeSpec {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl AmplitudeSpec {
    fn to_complex(&self) -> std::result::Result<Complex64, String> {
        match self {
            AmplitudeSpec::Real(x) => Ok(Complex64::new(*x, 0.0)),
            AmplitudeSpec::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            AmplitudeSpec::Text(s) => Complex64::from_str(s.trim()).map_err(|_| format!("bad amplitude {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Level(usize),
    Amplitudes(Vec<AmplitudeSpec>),
}

impl FromStr for InitialSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> = s.split(',').map(str::trim).collect();
        if let [single] = tokens.as_slice() {
            return single
                .parse()
                .map(InitialSpec::Level)
                .map_err(|_| CliError::invalid("initial", format!("{single:?} is not a level index")));
        }
        Ok(InitialSpec::Amplitudes(
            tokens.into_iter().map(|t| AmplitudeSpec::Text(t.to_string())).collect(),
        ))
    }
}

/// Unvalidated settings, from a file or from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub n: Option<usize>,
    pub couplings: Option<Vec<f64>>,
    pub omegas: Option<Vec<f64>>,
    pub phis: Option<Vec<f64>>,
    pub e0: Option<f64>,
    pub energies: Option<Vec<f64>>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub method: Option<MethodChoice>,
    pub initial: Option<InitialSpec>,
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub sequential: Option<bool>,
}

impl RawConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let parsed = if is_toml {
            toml::from_str(&text).map_err(|e| e.to_string())
        } else {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|message| CliError::ParseConfig {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Values in `over` replace those in `self`. The drive is handled as a
    /// unit: energies on one side clear omegas and e0 on the other.
    pub fn overridden_by(mut self, over: RawConfig) -> RawConfig {
        if over.energies.is_some() {
            self.omegas = None;
            self.e0 = None;
        }
        if over.omegas.is_some() || over.e0.is_some() {
            self.energies = None;
        }
        RawConfig {
            n: over.n.or(self.n),
            couplings: over.couplings.or(self.couplings),
            omegas: over.omegas.or(self.omegas),
            phis: over.phis.or(self.phis),
            e0: over.e0.or(self.e0),
            energies: over.energies.or(self.energies),
            t_start: over.t_start.or(self.t_start),
            t_end: over.t_end.or(self.t_end),
            steps: over.steps.or(self.steps),
            method: over.method.or(self.method),
            initial: over.initial.or(self.initial),
            tol: over.tol.or(self.tol),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
            sequential: over.sequential.or(self.sequential),
        }
    }
}

impl TryFrom<&Cli> for RawConfig {
    type Error = CliError;

    fn try_from(cli: &Cli) -> Result<Self> {
        Ok(RawConfig {
            n: cli.n,
            couplings: cli.couplings.clone(),
            omegas: cli.omegas.clone(),
            phis: cli.phis.clone(),
            e0: cli.e0,
            energies: cli.energies.clone(),
            t_start: cli.t_start,
            t_end: cli.t_end,
            steps: cli.steps,
            method: cli.method,
            initial: cli.initial.as_deref().map(str::parse).transpose()?,
            tol: cli.tol,
            output: cli.output.clone(),
            format: cli.format,
            sequential: cli.sequential.then_some(true),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        rabi_core::time_grid(self.start, self.end, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub couplings: CouplingVector,
    pub drive: DriveConfig,
    pub time: TimeGrid,
    pub requested: MethodChoice,
    /// `requested` with `auto` resolved.
    pub method: Method,
    pub initial: InitialState,
    pub output: OutputSpec,
    /// Relative eigenvalue tolerance.
    pub tol: f64,
    pub execution: Execution,
}

/// Reads `--config` if given, lays the flags over it, and validates.
pub fn parse_config(cli: &Cli) -> Result<RunConfig> {
    let flags = RawConfig::try_from(cli)?;
    let raw = match &cli.config {
        Some(path) => RawConfig::from_file(path)?.overridden_by(flags),
        None => flags,
    };
    validate(raw)
}

fn finite(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::invalid(field, format!("{x} is not finite")))
    }
}

fn arity(field: &'static str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(CliError::invalid(
            field,
            format!("expected {expected} values, got {}", v.len()),
        ));
    }
    Ok(())
}

pub fn validate(raw: RawConfig) -> Result<RunConfig> {
    let couplings = raw
        .couplings
        .ok_or_else(|| CliError::invalid("couplings", "required"))?;
    let n = raw.n.unwrap_or(couplings.len() + 1);
    if n < 2 {
        return Err(CliError::invalid("n", format!("need at least 2 levels, got {n}")));
    }
    arity("couplings", &couplings, n - 1)?;
    let couplings = CouplingVector::with_levels(n, couplings).map_err(|e| classify("couplings", e))?;

    let phis = raw.phis.unwrap_or_else(|| vec![0.0; n - 1]);
    arity("phis", &phis, n - 1)?;
    let drive = match raw.energies {
        Some(energies) => {
            if raw.omegas.is_some() || raw.e0.is_some() {
                return Err(CliError::invalid("energies", "cannot be combined with omegas or e0"));
            }
            arity("energies", &energies, n)?;
            DriveConfig::from_energies(energies, phis).map_err(|e| classify("energies", e))?
        }
        None => {
            let omegas = raw.omegas.unwrap_or_else(|| vec![0.0; n - 1]);
            arity("omegas", &omegas, n - 1)?;
            let e0 = finite("e0", raw.e0.unwrap_or(0.0))?;
            DriveConfig::new(omegas, phis, e0).map_err(|e| classify("omegas", e))?
        }
    };
    if !drive.gaps_decreasing() {
        log::warn!("level gaps {:?} are not strictly decreasing", drive.omegas());
    }

    let start = finite("t_start", raw.t_start.unwrap_or(0.0))?;
    let end = finite(
        "t_end",
        raw.t_end.ok_or_else(|| CliError::invalid("t_end", "required"))?,
    )?;
    if end < start {
        return Err(CliError::invalid("t_end", format!("{end} is before t_start = {start}")));
    }
    let steps = raw.steps.ok_or_else(|| CliError::invalid("steps", "required"))?;
    if steps == 0 {
        return Err(CliError::invalid("steps", "must be at least 1"));
    }

    let requested = raw.method.unwrap_or(MethodChoice::Auto);
    let method = match requested {
        MethodChoice::Auto if n <= CLOSED_FORM_MAX_LEVELS => Method::Closed,
        MethodChoice::Auto | MethodChoice::General => Method::General,
        MethodChoice::Closed if n > CLOSED_FORM_MAX_LEVELS => {
            return Err(CliError::invalid(
                "method",
                format!("closed needs n <= {CLOSED_FORM_MAX_LEVELS}, got n = {n}"),
            ));
        }
        MethodChoice::Closed => Method::Closed,
        MethodChoice::Oracle => Method::Oracle,
    };

    let initial = match raw.initial.unwrap_or(InitialSpec::Level(0)) {
        InitialSpec::Level(k) => InitialState::Level(k),
        InitialSpec::Amplitudes(a) => InitialState::Amplitudes(
            a.iter()
                .map(AmplitudeSpec::to_complex)
                .collect::<std::result::Result<_, _>>()
                .map_err(|m| CliError::invalid("initial", m))?,
        ),
    };
    initial.to_vector(n).map_err(|e| classify("initial", e))?;

    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::invalid(
            "tol",
            format!("must be positive and finite, got {tol}"),
        ));
    }

    let format = raw.format.unwrap_or_else(|| match &raw.output {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
        _ => Format::Csv,
    });

    Ok(RunConfig {
        n,
        couplings,
        drive,
        time: TimeGrid { start, end, steps },
        requested,
        method,
        initial,
        output: OutputSpec {
            path: raw.output,
            format,
        },
        tol,
        execution: if raw.sequential.unwrap_or(false) {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    })
}
