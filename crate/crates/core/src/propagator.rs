//! `exp(−itC)` by Lagrange–Sylvester interpolation on the spectrum of the
//! coupling matrix, and the full evolution operator
//! `U(t) = e^{−itE₀} V(t)† exp(−itC)` with the diagonal drive phases `V(t)`.
//!
//! For a simple spectrum `λ_1, …, λ_n`,
//!
//! ```text
//! exp(−itC) = Σ_{l=0}^{n−1} f_l(t) C^l
//! f_l(t)    = (−1)^{n+1} Σ_k (p_{n−l−1})_k e^{−itλ_k} / Π_{j≠k} (λ_j − λ_k)
//! ```
//!
//! where `(p_j)_k = (−1)^j e_j(λ_1, …, λ̂_k, …, λ_n)` are the signed elementary
//! symmetric polynomials of the eigenvalues with `λ_k` left out. Only the
//! scalar `f_l(t)` depend on time, so a sweep computes the powers `C^l` and the
//! time-independent weights once.

use num_complex::{Complex, Complex64};
use num_traits::Zero;
use twofloat::TwoFloat;

use crate::eigen::{eigenvalues_closed, eigenvalues_general, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::oracle::{oracle_eigen, oracle_expm};
use crate::par::{try_map_indexed, Execution};
use crate::spectral::{build_coupling_matrix, CouplingVector, Spectrum};

/// Relative eigenvalue gap below which the interpolation formula is refused.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Largest `‖U†U − I‖_F` a sweep is allowed to emit.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Tolerance on `‖ψ₀‖² − 1` for a user-supplied initial state.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Which route produces `exp(−itC)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Radical formulas for the eigenvalues (n ≤ 7), then interpolation.
    Closed,
    /// Sturm bisection and Newton polish for the eigenvalues, then interpolation.
    General,
    /// Series exponential, no eigenvalues needed.
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::General => "general",
            Method::Oracle => "oracle",
        }
    }
}

type Wide = TwoFloat;
type WideComplex = Complex<TwoFloat>;

fn wide(x: f64) -> Wide {
    Wide::from(x)
}

fn narrow(z: WideComplex) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// Time-independent part of the interpolation coefficients.
///
/// The weights, matrix powers, and the final sum are carried in double-double
/// precision: the terms `f_l(t) C^l` cancel heavily once `n` grows, and plain
/// `f64` loses the unitarity of the result.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterBasis {
    eigenvalues: Vec<Wide>,
    /// `esym[k][j] = (p_j)_k` for `j = 0..n−1`, with `(p_0)_k = 1`.
    esym: Vec<Vec<f64>>,
    /// `weights[k][l]`: `f_l(t) = Σ_k weights[k][l] e^{−itλ_k}`.
    weights: Vec<Vec<Wide>>,
}

impl SylvesterBasis {
    pub fn new(spec: &Spectrum) -> Result<Self> {
        check_gaps(spec)?;
        Ok(Self::from_nodes(spec.eigenvalues().iter().map(|&x| wide(x)).collect()))
    }

    /// Like [`SylvesterBasis::new`], but first sharpens each eigenvalue of
    /// `spec` to double-double precision by Newton steps on the determinant
    /// recurrence of `g`. A double-precision eigenvalue error is amplified by
    /// the interpolation weights, which dominates the unitarity defect once
    /// `n` exceeds about 8; the refined nodes remove that source.
    pub fn refined(spec: &Spectrum, g: &CouplingVector) -> Result<Self> {
        if spec.len() != g.levels() {
            return Err(Error::LengthMismatch {
                what: "spectrum",
                expected: g.levels(),
                got: spec.len(),
            });
        }
        check_gaps(spec)?;
        Ok(Self::from_nodes(
            spec.eigenvalues().iter().map(|&x| refine_root(g, x)).collect(),
        ))
    }

    fn from_nodes(lam: Vec<Wide>) -> Self {
        let n = lam.len();
        let sign = if n % 2 == 1 { wide(1.0) } else { wide(-1.0) };
        let mut esym = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let mut e = vec![wide(1.0)];
            let mut denom = wide(1.0);
            for (j, &lj) in lam.iter().enumerate() {
                if j == k {
                    continue;
                }
                e.push(wide(0.0));
                for i in (1..e.len()).rev() {
                    let carried = e[i - 1] * lj;
                    e[i] += carried;
                }
                denom *= lj - lam[k];
            }
            let p: Vec<Wide> = e
                .iter()
                .enumerate()
                .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
                .collect();
            weights.push((0..n).map(|l| sign * p[n - l - 1] / denom).collect());
            esym.push(p.into_iter().map(f64::from).collect());
        }
        Self {
            eigenvalues: lam,
            esym,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn coeffs_at(&self, t: f64) -> SylvesterCoeffs {
        let n = self.len();
        let mut f = vec![WideComplex::new(wide(0.0), wide(0.0)); n];
        for (k, &lk) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -f64::from(lk * t));
            let phase = WideComplex::new(wide(phase.re), wide(phase.im));
            for (fl, &w) in f.iter_mut().zip(&self.weights[k]) {
                *fl += phase * WideComplex::new(w, wide(0.0));
            }
        }
        SylvesterCoeffs {
            t,
            f: f.iter().copied().map(narrow).collect(),
            esym_tables: self.esym.clone(),
            wide: f,
        }
    }
}

fn check_gaps(spec: &Spectrum) -> Result<()> {
    let threshold = DEGENERACY_THRESHOLD * spec.scale();
    if spec.len() > 1 && (spec.gap_min().is_nan() || spec.gap_min() < threshold) {
        return Err(Error::DegenerateSpectrum {
            gap_min: spec.gap_min(),
            threshold,
        });
    }
    Ok(())
}

/// Two Newton steps on `f_n(λ)` in double-double, starting from an `f64`
/// root. Exact zeros (odd `n`) stay put.
fn refine_root(g: &CouplingVector, x: f64) -> Wide {
    const BIG: f64 = 1e150;
    let mut x = wide(x);
    if x == wide(0.0) {
        return x;
    }
    for _ in 0..2 {
        let (mut f_older, mut f_prev) = (wide(1.0), x);
        let (mut d_older, mut d_prev) = (wide(0.0), wide(1.0));
        for &gk in g.as_slice() {
            let w = wide(gk) * gk;
            let f_next = x * f_prev - w * f_older;
            let d_next = f_prev + x * d_prev - w * d_older;
            f_older = f_prev;
            f_prev = f_next;
            d_older = d_prev;
            d_prev = d_next;
            if f64::from(f_prev).abs() > BIG || f64::from(d_prev).abs() > BIG {
                let s = 1.0 / BIG;
                f_older *= s;
                f_prev *= s;
                d_older *= s;
                d_prev *= s;
            }
        }
        if d_prev == wide(0.0) {
            break;
        }
        let step = f_prev / d_prev;
        if !f64::from(step).is_finite() {
            break;
        }
        x -= step;
    }
    x
}

/// Interpolation coefficients `f_0(t), …, f_{n−1}(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterCoeffs {
    pub t: f64,
    pub f: Vec<Complex64>,
    /// `esym_tables[k][j] = (p_j)_k`.
    pub esym_tables: Vec<Vec<f64>>,
    wide: Vec<WideComplex>,
}

/// Coefficients of the interpolating polynomial for `e^{−itλ}` on `spec`.
pub fn sylvester_coeffs(spec: &Spectrum, t: f64) -> Result<SylvesterCoeffs> {
    Ok(SylvesterBasis::new(spec)?.coeffs_at(t))
}

/// `C^0, C^1, …, C^{n−1}` in double-double precision, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPowers {
    dim: usize,
    powers: Vec<Vec<WideComplex>>,
}

impl MatrixPowers {
    pub fn new(c: &ComplexMatrix) -> Self {
        let n = c.dim();
        let base: Vec<WideComplex> = c
            .as_slice()
            .iter()
            .map(|z| WideComplex::new(wide(z.re), wide(z.im)))
            .collect();
        let zero = WideComplex::new(wide(0.0), wide(0.0));
        let mut identity = vec![zero; n * n];
        for i in 0..n {
            identity[i * n + i] = WideComplex::new(wide(1.0), wide(0.0));
        }
        let mut powers = Vec::with_capacity(n);
        powers.push(identity);
        for l in 1..n {
            let prev = &powers[l - 1];
            let mut next = vec![zero; n * n];
            for i in 0..n {
                for k in 0..n {
                    let a = prev[i * n + k];
                    if a.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        next[i * n + j] += a * base[k * n + j];
                    }
                }
            }
            powers.push(next);
        }
        Self { dim: n, powers }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σ_l f_l C^l`, rounded to `f64` at the end.
    pub fn combine(&self, coeffs: &SylvesterCoeffs) -> Result<ComplexMatrix> {
        if coeffs.wide.len() != self.powers.len() {
            return Err(Error::DimensionMismatch {
                left: self.powers.len(),
                right: coeffs.wide.len(),
            });
        }
        let n = self.dim;
        let mut acc = vec![WideComplex::new(wide(0.0), wide(0.0)); n * n];
        for (fl, pl) in coeffs.wide.iter().zip(&self.powers) {
            for (a, p) in acc.iter_mut().zip(pl) {
                *a += *fl * *p;
            }
        }
        ComplexMatrix::from_row_major(n, acc.into_iter().map(narrow).collect())
    }
}

/// `Σ_l f_l(t) C^l`.
pub fn expm_sylvester(c: &ComplexMatrix, coeffs: &SylvesterCoeffs) -> Result<ComplexMatrix> {
    if c.dim() != coeffs.f.len() {
        return Err(Error::DimensionMismatch {
            left: c.dim(),
            right: coeffs.f.len(),
        });
    }
    MatrixPowers::new(c).combine(coeffs)
}

/// Drive frequencies, phases, and ground energy.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    omegas: Vec<f64>,
    phis: Vec<f64>,
    e0: f64,
    energies: Option<Vec<f64>>,
}

impl DriveConfig {
    pub fn new(omegas: Vec<f64>, phis: Vec<f64>, e0: f64) -> Result<Self> {
        if omegas.len() != phis.len() {
            return Err(Error::LengthMismatch {
                what: "phases",
                expected: omegas.len(),
                got: phis.len(),
            });
        }
        if omegas.iter().chain(&phis).any(|x| !x.is_finite()) || !e0.is_finite() {
            return Err(Error::NonFinite("drive configuration"));
        }
        Ok(Self {
            omegas,
            phis,
            e0,
            energies: None,
        })
    }

    /// Resonant drive on the level energies `E_0, …, E_{n−1}`:
    /// `ω_k = E_k − E_{k−1}` and the ground energy is `E_0`.
    pub fn from_energies(energies: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::TooFewLevels(energies.len()));
        }
        let omegas = energies.windows(2).map(|w| w[1] - w[0]).collect();
        let mut dc = Self::new(omegas, phis, energies[0])?;
        if energies.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("energies"));
        }
        dc.energies = Some(energies);
        Ok(dc)
    }

    /// No drive phases and zero ground energy, so `U(t) = exp(−itC)`.
    pub fn zero(levels: usize) -> Self {
        let k = levels.saturating_sub(1);
        Self {
            omegas: vec![0.0; k],
            phis: vec![0.0; k],
            e0: 0.0,
            energies: None,
        }
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }

    /// `Δ_k = E_k − E_0`, when energies were supplied.
    pub fn detunings(&self) -> Option<Vec<f64>> {
        self.energies
            .as_ref()
            .map(|e| e[1..].iter().map(|x| x - e[0]).collect())
    }

    /// Whether the level gaps `E_k − E_{k−1}` strictly decrease. Vacuously
    /// true without energies.
    pub fn gaps_decreasing(&self) -> bool {
        self.energies.is_none() || self.omegas.windows(2).all(|w| w[0] > w[1])
    }

    pub fn check_levels(&self, levels: usize) -> Result<()> {
        if self.omegas.len() + 1 != levels {
            return Err(Error::LengthMismatch {
                what: "drive frequencies",
                expected: levels - 1,
                got: self.omegas.len(),
            });
        }
        Ok(())
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.omegas.len() + 1);
        let (mut omega, mut phi) = (0.0, 0.0);
        out.push(Complex64::new(1.0, 0.0));
        for (w, p) in self.omegas.iter().zip(&self.phis) {
            omega += w;
            phi += p;
            out.push(Complex64::from_polar(1.0, omega * t + phi));
        }
        out
    }
}

/// Diagonal `V(t)` with entries `exp(i(Ω_j t + Φ_j))`, where `Ω_j` and `Φ_j`
/// are the running sums of the drive frequencies and phases.
pub fn phase_matrix(dc: &DriveConfig, t: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&dc.phases(t))
}

fn compose(dc: &DriveConfig, t: f64, exp_c: &ComplexMatrix) -> ComplexMatrix {
    let global = Complex64::from_polar(1.0, -t * dc.e0);
    let phases = dc.phases(t);
    let n = exp_c.dim();
    let mut u = exp_c.clone();
    for (i, v) in phases.iter().enumerate() {
        let s = global * v.conj();
        for j in 0..n {
            u[(i, j)] *= s;
        }
    }
    u
}

/// Starting state of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Level(usize),
    Amplitudes(Vec<Complex64>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Level(0)
    }
}

impl InitialState {
    pub fn to_vector(&self, levels: usize) -> Result<Vec<Complex64>> {
        match self {
            InitialState::Level(k) => {
                if *k >= levels {
                    return Err(Error::LevelOutOfRange { index: *k, n: levels });
                }
                let mut v = vec![Complex64::new(0.0, 0.0); levels];
                v[*k] = Complex64::new(1.0, 0.0);
                Ok(v)
            }
            InitialState::Amplitudes(a) => {
                if a.len() != levels {
                    return Err(Error::LengthMismatch {
                        what: "initial amplitudes",
                        expected: levels,
                        got: a.len(),
                    });
                }
                let norm_sqr: f64 = a.iter().map(|z| z.norm_sqr()).sum();
                if norm_sqr.is_nan() || (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::NotNormalized(norm_sqr.sqrt()));
                }
                let inv = 1.0 / norm_sqr.sqrt();
                Ok(a.iter().map(|z| z * inv).collect())
            }
        }
    }
}

/// `P_k = |(U ψ₀)_k|²`.
pub fn populations(u: &ComplexMatrix, initial: &InitialState) -> Result<Vec<f64>> {
    let psi = initial.to_vector(u.dim())?;
    Ok(u.mul_vec(&psi)?.iter().map(|z| z.norm_sqr()).collect())
}

/// A coupling chain prepared for repeated evaluation of `exp(−itC)`.
#[derive(Debug, Clone)]
pub struct Propagator {
    method: Method,
    coupling: CouplingVector,
    matrix: ComplexMatrix,
    spectrum: Spectrum,
    engine: Engine,
}

#[derive(Debug, Clone)]
enum Engine {
    Sylvester {
        basis: SylvesterBasis,
        powers: MatrixPowers,
    },
    Series,
}

impl Propagator {
    /// Computes the spectrum with the requested method and, for the
    /// interpolating methods, the weights and matrix powers. The interpolation
    /// nodes are the method's eigenvalues sharpened by
    /// [`SylvesterBasis::refined`]; [`Propagator::spectrum`] reports them
    /// unrefined.
    pub fn new(g: &CouplingVector, method: Method, tol: f64) -> Result<Self> {
        let matrix = build_coupling_matrix(g);
        let (spectrum, engine) = match method {
            Method::Closed | Method::General => {
                let spectrum = if method == Method::Closed {
                    eigenvalues_closed(g)?
                } else {
                    eigenvalues_general(g, tol)?
                };
                let basis = SylvesterBasis::refined(&spectrum, g)?;
                let powers = MatrixPowers::new(&matrix);
                (spectrum, Engine::Sylvester { basis, powers })
            }
            Method::Oracle => (oracle_eigen(g)?, Engine::Series),
        };
        Ok(Self {
            method,
            coupling: g.clone(),
            matrix,
            spectrum,
            engine,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn levels(&self) -> usize {
        self.coupling.levels()
    }

    pub fn coupling(&self) -> &CouplingVector {
        &self.coupling
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `exp(−itC)`.
    pub fn exp_minus_itc(&self, t: f64) -> Result<ComplexMatrix> {
        match &self.engine {
            Engine::Sylvester { basis, powers } => powers.combine(&basis.coeffs_at(t)),
            Engine::Series => oracle_expm(&self.matrix, t),
        }
    }

    /// `U(t) = e^{−itE₀} V(t)† exp(−itC)`.
    pub fn evolution(&self, dc: &DriveConfig, t: f64) -> Result<ComplexMatrix> {
        dc.check_levels(self.levels())?;
        Ok(compose(dc, t, &self.exp_minus_itc(t)?))
    }

    /// Populations and unitarity defect at every time in `times`, in order.
    pub fn sweep(
        &self,
        dc: &DriveConfig,
        initial: &InitialState,
        times: &[f64],
        exec: Execution,
    ) -> Result<Vec<Sample>> {
        dc.check_levels(self.levels())?;
        initial.to_vector(self.levels())?;
        try_map_indexed(exec, times.len(), |i| {
            let t = times[i];
            let u = self.evolution(dc, t)?;
            Ok(Sample {
                t,
                populations: populations(&u, initial)?,
                unitarity_defect: u.unitarity_defect(),
            })
        })
    }
}

/// One time sample of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub populations: Vec<f64>,
    pub unitarity_defect: f64,
}

/// Fails on the first sample whose unitarity defect exceeds `tolerance`.
///
/// The monomial basis `C^l` grows like `R^l`, so for long chains the
/// interpolated exponential eventually loses unitarity even in double-double
/// arithmetic; callers use this to detect that and switch methods.
pub fn check_unitarity(samples: &[Sample], tolerance: f64) -> Result<()> {
    match samples
        .iter()
        .find(|s| s.unitarity_defect.is_nan() || s.unitarity_defect > tolerance)
    {
        Some(s) => Err(Error::UnitarityLoss {
            t: s.t,
            defect: s.unitarity_defect,
            tolerance,
        }),
        None => Ok(()),
    }
}

/// `U(t) = e^{−itE₀} V(t)† exp(−itC)` with `exp(−itC)` from `method`.
pub fn evolution_operator(g: &CouplingVector, dc: &DriveConfig, t: f64, method: Method) -> Result<ComplexMatrix> {
    Propagator::new(g, method, DEFAULT_TOL)?.evolution(dc, t)
}

/// Uniform grid of `steps + 1` times covering `[start, end]` inclusively.
pub fn time_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    let h = (end - start) / steps as f64;
    (0..=steps)
        .map(|i| if i == steps { end } else { start + h * i as f64 })
        .collect()
}
