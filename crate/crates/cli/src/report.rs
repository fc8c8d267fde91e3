//! Sweep orchestration and the CSV/JSON writers.

use std::fmt::Write as _;
use std::path::Path;

use rabi_core::{
    char_poly_closed_form, char_poly_recurrence, check_unitarity, Error as CoreError, Method, Propagator, Sample,
    UNITARITY_TOL,
};
use serde::Serialize;

use crate::config::{Format, MethodChoice, RunConfig};
use crate::error::{CliError, Result};

/// The gap-enumeration builder visits a Fibonacci number of index tuples, so
/// it is only run for moderate chains.
pub const CLOSED_FORM_POLY_MAX_LEVELS: usize = 32;

/// Allowed drift of `Σ_k P_k` from 1 in any emitted row.
pub const POPULATION_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharPolyReport {
    /// `φ_2, φ_4, …` from the determinant recurrence.
    pub recurrence: Vec<f64>,
    /// The same coefficients from gap enumeration, or `None` above
    /// [`CLOSED_FORM_POLY_MAX_LEVELS`].
    pub closed_form: Option<Vec<f64>>,
    pub max_rel_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub levels: usize,
    pub method_requested: &'static str,
    pub method: &'static str,
    /// Why the requested method was abandoned, if it was.
    pub fallback: Option<String>,
    pub eigenvalues: Vec<f64>,
    pub char_poly: CharPolyReport,
    pub max_unitarity_defect: f64,
    pub max_population_error: f64,
    pub columns: Vec<String>,
    /// One row per time: `t, P0, …, P{n-1}`.
    pub rows: Vec<Vec<f64>>,
}

fn choice_name(c: MethodChoice) -> &'static str {
    match c {
        MethodChoice::Auto => "auto",
        MethodChoice::Closed => "closed",
        MethodChoice::General => "general",
        MethodChoice::Oracle => "oracle",
    }
}

fn numerical(context: &'static str) -> impl FnOnce(CoreError) -> CliError {
    move |source| CliError::Numerical { context, source }
}

fn char_poly_report(cfg: &RunConfig) -> CharPolyReport {
    let recurrence = char_poly_recurrence(&cfg.couplings).even_coeffs().to_vec();
    if cfg.n > CLOSED_FORM_POLY_MAX_LEVELS {
        return CharPolyReport {
            recurrence,
            closed_form: None,
            max_rel_diff: None,
        };
    }
    let closed = char_poly_closed_form(&cfg.couplings).even_coeffs().to_vec();
    let diff = recurrence
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    CharPolyReport {
        recurrence,
        closed_form: Some(closed),
        max_rel_diff: Some(diff),
    }
}

/// Like `f64::max`, but a NaN wins instead of being skipped.
fn nan_max(m: f64, x: f64) -> f64 {
    if x.is_nan() || x > m {
        x
    } else {
        m
    }
}

/// Sweeps with `method`, insisting on unitarity of every sample.
fn attempt(
    cfg: &RunConfig,
    method: Method,
    times: &[f64],
) -> std::result::Result<(Propagator, Vec<Sample>), CoreError> {
    let p = Propagator::new(&cfg.couplings, method, cfg.tol)?;
    let samples = p.sweep(&cfg.drive, &cfg.initial, times, cfg.execution)?;
    check_unitarity(&samples, UNITARITY_TOL)?;
    Ok((p, samples))
}

/// Evaluates the populations on the configured grid.
///
/// An interpolating method that meets a degenerate spectrum or loses
/// unitarity hands over to the series exponential; the report records both
/// the request and what actually ran.
pub fn run_sweep(cfg: &RunConfig) -> Result<Report> {
    let times = cfg.time.points();
    let (propagator, samples, fallback) = match attempt(cfg, cfg.method, &times) {
        Ok((p, s)) => (p, s, None),
        Err(err @ (CoreError::DegenerateSpectrum { .. } | CoreError::UnitarityLoss { .. }))
            if cfg.method != Method::Oracle =>
        {
            log::warn!(
                "{} method failed ({err}); using the series exponential",
                cfg.method.name()
            );
            let (p, s) = attempt(cfg, Method::Oracle, &times).map_err(numerical("oracle fallback"))?;
            (p, s, Some(err.to_string()))
        }
        Err(err) => return Err(numerical("sweep")(err)),
    };

    let max_unitarity_defect = samples.iter().map(|s| s.unitarity_defect).fold(0.0, nan_max);
    let max_population_error = samples
        .iter()
        .map(|s| (s.populations.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, nan_max);
    if max_population_error.is_nan() || max_population_error > POPULATION_SUM_TOL {
        return Err(CliError::Numerical {
            context: "population check",
            source: CoreError::NotNormalized(1.0 + max_population_error),
        });
    }

    let columns = std::iter::once("t".to_string())
        .chain((0..cfg.n).map(|k| format!("P{k}")))
        .collect();
    let rows = samples
        .into_iter()
        .map(|s| std::iter::once(s.t).chain(s.populations).collect())
        .collect();
    Ok(Report {
        levels: cfg.n,
        method_requested: choice_name(cfg.requested),
        method: propagator.method().name(),
        fallback,
        eigenvalues: propagator.spectrum().eigenvalues().to_vec(),
        char_poly: char_poly_report(cfg),
        max_unitarity_defect,
        max_population_error,
        columns,
        rows,
    })
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn num_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("# levels: {}", self.levels));
        line(format!("# method_requested: {}", self.method_requested));
        line(format!("# method: {}", self.method));
        if let Some(why) = &self.fallback {
            line(format!("# fallback: {why}"));
        }
        line(format!("# eigenvalues: {}", num_list(&self.eigenvalues)));
        line(format!(
            "# char_poly_recurrence: {}",
            num_list(&self.char_poly.recurrence)
        ));
        match &self.char_poly.closed_form {
            Some(c) => line(format!("# char_poly_closed_form: {}", num_list(c))),
            None => line("# char_poly_closed_form: skipped".to_string()),
        }
        if let Some(d) = self.char_poly.max_rel_diff {
            line(format!("# char_poly_max_rel_diff: {}", num(d)));
        }
        line(format!("# max_unitarity_defect: {}", num(self.max_unitarity_defect)));
        line(format!("# max_population_error: {}", num(self.max_population_error)));
        line(self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", num_list(row));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes `contents` to `path`, deleting whatever was created if the write
/// does not complete.
pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| {
        let _ = std::fs::remove_file(path);
        CliError::Write {
            path: path.to_path_buf(),
            source,
        }
    })
}
