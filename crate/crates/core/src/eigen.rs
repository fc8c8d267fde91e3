//! Eigenvalues of the coupling matrix from its characteristic polynomial.
//!
//! Two routes:
//!
//! * [`eigenvalues_closed`] evaluates explicit radical formulas for chains of
//!   2 to 7 levels. Six and seven levels reduce to a cubic in `x = λ²`, solved
//!   with Cardano's formula ([`cardano_cubic`]).
//! * [`eigenvalues_general`] works for any chain length. Each non-negative
//!   root is isolated by bisection on a Sturm count taken from the
//!   determinant recurrence, then polished with a bracketed Newton iteration
//!   on the same recurrence. Negative roots are mirrored, and the
//!   zero root of odd chains is inserted exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{try_map_indexed, Execution};
use crate::spectral::{char_poly_closed_form, CouplingVector, Spectrum};

/// Default polish tolerance, relative to the Gershgorin radius.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Newton/bisection iteration cap for the polish phase.
pub const MAX_POLISH_ITERATIONS: usize = 60;

const MAX_ISOLATION_STEPS: usize = 200;

/// Real roots of `x³ − a x² + b x − c` with the Cardano intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub p: f64,
    pub q: f64,
    /// `q² + 4p³`; non-positive when all roots are real.
    pub discriminant: f64,
    /// Largest imaginary part left over after combining the cube roots.
    pub residual_imag: f64,
}

impl CubicRoots {
    pub fn roots(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

/// Solves `x³ − a x² + b x − c = 0` by Cardano's formula.
///
/// With `x = y + a/3` the cubic becomes `y³ + 3p y + q = 0`, where
/// `p = b/3 − a²/9` and `q = −c + ab/3 − 2a³/27`. Then `y = u + v` with
/// `u³, v³ = (−q ± √(q² + 4p³))/2`. `u₀` is the principal cube root and `v₀`
/// is paired through `u₀v₀ = −p`; the other two roots rotate by
/// `σ = e^{2πi/3}`.
pub fn cardano_cubic(a: f64, b: f64, c: f64) -> Result<CubicRoots> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::NonFinite("cubic coefficients"));
    }
    let p = b / 3.0 - a * a / 9.0;
    let q = -c + a * b / 3.0 - 2.0 * a * a * a / 27.0;
    let discriminant = q * q + 4.0 * p * p * p;
    let magnitude = q * q + 4.0 * (p * p * p).abs();
    // Repeated roots land on either side of zero after rounding.
    let disc = if discriminant > 1e-10 * magnitude {
        return Err(Error::ComplexCubicRoots { discriminant });
    } else {
        discriminant.min(0.0)
    };

    let u_cubed = Complex64::new(-q / 2.0, disc.abs().sqrt() / 2.0);
    let u0 = if u_cubed.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else if disc == 0.0 {
        Complex64::new(u_cubed.re.cbrt(), 0.0)
    } else {
        u_cubed.powf(1.0 / 3.0)
    };
    let v0 = if u0.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        -p / u0
    };

    let sigma = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let sigma2 = sigma * sigma;
    let shift = a / 3.0;
    let raw = [u0 + v0, sigma * u0 + sigma2 * v0, sigma2 * u0 + sigma * v0];
    let residual_imag = raw.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    let mut xs = raw.map(|z| z.re + shift);
    xs.sort_by(|l, r| r.total_cmp(l));
    Ok(CubicRoots {
        x1: xs[0],
        x2: xs[1],
        x3: xs[2],
        p,
        q,
        discriminant,
        residual_imag,
    })
}

fn spectrum_from_nonnegative(positive: &[f64], odd: bool) -> Result<Spectrum> {
    let mut all: Vec<f64> = positive.iter().flat_map(|&x| [x, -x]).collect();
    if odd {
        all.push(0.0);
    }
    Spectrum::new(all)
}

/// Eigenvalues from the explicit formulas for `2 ≤ n ≤ 7`.
pub fn eigenvalues_closed(g: &CouplingVector) -> Result<Spectrum> {
    let n = g.levels();
    let s = g.as_slice();
    let sq = g.squares();
    let positive: Vec<f64> = match n {
        2 => vec![s[0]],
        3 => vec![(sq[0] + sq[1]).sqrt()],
        4 => {
            let a = sq[1] + (s[0] + s[2]).powi(2);
            let b = sq[1] + (s[0] - s[2]).powi(2);
            pair_from_ab(a, b).to_vec()
        }
        5 => {
            let sum = sq[0] + sq[1] + sq[2] + sq[3];
            let r = (sq[0] * sq[2] + sq[0] * sq[3] + sq[1] * sq[3]).sqrt();
            let a = sum + 2.0 * r;
            let b = (sum - 2.0 * r).max(0.0);
            pair_from_ab(a, b).to_vec()
        }
        6 | 7 => {
            let poly = char_poly_closed_form(g);
            let [a, b, c] = [poly.phi(1), poly.phi(2), poly.phi(3)];
            cardano_cubic(a, b, c)?
                .roots()
                .iter()
                .map(|&x| x.max(0.0).sqrt())
                .collect()
        }
        _ => return Err(Error::ClosedFormUnsupported(n)),
    };
    spectrum_from_nonnegative(&positive, n % 2 == 1)
}

fn pair_from_ab(a: f64, b: f64) -> [f64; 2] {
    let (ra, rb) = (a.sqrt(), b.sqrt());
    [(ra + rb) / 2.0, (ra - rb) / 2.0]
}

/// Number of eigenvalues of the coupling matrix strictly below `lambda`.
///
/// Walks the ratios `f_k(λ)/f_{k−1}(λ)` of the determinant recurrence; each
/// positive ratio is an eigenvalue below `λ`. A vanishing ratio is replaced by
/// a tiny negative pivot, which leaves an eigenvalue sitting exactly at `λ`
/// out of the count.
pub fn sturm_count(g: &CouplingVector, lambda: f64) -> usize {
    let gsq = g.squares();
    let pivmin = f64::MIN_POSITIVE * gsq.iter().fold(1.0_f64, |m, &x| m.max(x));
    let guard = |q: f64| if q.abs() < pivmin { -pivmin } else { q };
    let mut q = guard(lambda);
    let mut below = usize::from(q > 0.0);
    for &w in &gsq {
        q = guard(lambda - w / q);
        below += usize::from(q > 0.0);
    }
    below
}

/// All eigenvalues for any chain length, polished to `tol` relative to the
/// Gershgorin radius.
pub fn eigenvalues_general(g: &CouplingVector, tol: f64) -> Result<Spectrum> {
    let exec = if g.levels() >= 64 {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    eigenvalues_general_with(g, tol, exec)
}

/// [`eigenvalues_general`] with explicit control over per-root parallelism.
pub fn eigenvalues_general_with(g: &CouplingVector, tol: f64, exec: Execution) -> Result<Spectrum> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let n = g.levels();
    let m = n / 2;
    let radius = g.gershgorin_radius();
    let upper = radius * (1.0 + 1e-3) + f64::MIN_POSITIVE;
    let abs_tol = tol * radius;

    // Ascending index n − m + j is the j-th smallest positive eigenvalue.
    let positive = try_map_indexed(exec, m, |j| {
        let target = n - m + j;
        let (lo, hi) = isolate(g, target, 0.0, upper)?;
        polish(g, target, lo, hi, abs_tol)
    })?;
    spectrum_from_nonnegative(&positive, n % 2 == 1)
}

/// Shrinks `[lo, hi]` until it holds exactly the eigenvalue with ascending
/// index `target`.
fn isolate(g: &CouplingVector, target: usize, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    for _ in 0..MAX_ISOLATION_STEPS {
        if sturm_count(g, lo) == target && sturm_count(g, hi) == target + 1 {
            return Ok((lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        if sturm_count(g, mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        index: target,
        iterations: MAX_ISOLATION_STEPS,
    })
}

/// `f_n(λ)` and `f_n'(λ)` evaluated pointwise through the determinant
/// recurrence, rescaled on the fly so long chains do not overflow. Only the
/// ratio is meaningful after rescaling, which is all Newton needs.
pub fn recurrence_newton_pair(g: &CouplingVector, lambda: f64) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let (mut f_older, mut f_prev) = (1.0, lambda);
    let (mut d_older, mut d_prev) = (0.0, 1.0);
    for &gk in g.as_slice() {
        let w = gk * gk;
        let f_next = lambda * f_prev - w * f_older;
        let d_next = f_prev + lambda * d_prev - w * d_older;
        f_older = f_prev;
        f_prev = f_next;
        d_older = d_prev;
        d_prev = d_next;
        if f_prev.abs() > BIG || d_prev.abs() > BIG {
            let s = 1.0 / BIG;
            f_older *= s;
            f_prev *= s;
            d_older *= s;
            d_prev *= s;
        }
    }
    (f_prev, d_prev)
}

/// Newton iteration on the characteristic polynomial, safeguarded by the
/// Sturm bracket. A step that leaves the bracket, or fails to shrink fast
/// enough, is replaced by bisection.
///
/// The polynomial is evaluated through the recurrence rather than from its
/// expanded coefficients: the expanded form loses about two digits of root
/// accuracy, which the interpolation step downstream amplifies.
fn polish(g: &CouplingVector, target: usize, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64> {
    let mut x = 0.5 * (lo + hi);
    let mut dx_prev = hi - lo;
    let mut dx_prev2 = dx_prev;
    for _ in 0..MAX_POLISH_ITERATIONS {
        if sturm_count(g, x) <= target {
            lo = x;
        } else {
            hi = x;
        }
        // Bracket collapsed to a few ulps: nothing left to refine.
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            return Ok(x);
        }
        let (f, df) = recurrence_newton_pair(g, x);
        if f == 0.0 {
            return Ok(x);
        }
        let newton = x - f / df;
        // The Sturm count and the recurrence can disagree by an ulp about
        // which side of the root `x` is on; a sub-tolerance correction wins.
        if newton.is_finite() && (newton - x).abs() <= abs_tol {
            return Ok(newton.clamp(lo, hi));
        }
        let use_newton = df != 0.0
            && newton.is_finite()
            && newton >= lo
            && newton <= hi
            && (newton - x).abs() <= 0.5 * dx_prev2.abs();
        let next = if use_newton { newton } else { 0.5 * (lo + hi) };
        let dx = next - x;
        x = next;
        dx_prev2 = dx_prev;
        dx_prev = dx;
    }
    Err(Error::NoConvergence {
        index: target,
        iterations: MAX_POLISH_ITERATIONS,
    })
}
