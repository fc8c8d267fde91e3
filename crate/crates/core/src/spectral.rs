//! Coupling vectors, the tridiagonal coupling matrix, and its characteristic
//! polynomial.
//!
//! The coupling matrix of an `n`-level chain is the real symmetric tridiagonal
//! matrix with zero diagonal and `g_1, …, g_{n-1}` on the off-diagonals. Its
//! characteristic polynomial `det(λI − C)` only carries powers of `λ` with the
//! parity of `n`, so it is stored as the list of even-part coefficients
//! `φ_2, φ_4, …, φ_{2m}` (`m = ⌊n/2⌋`) together with a parity flag:
//!
//! ```text
//! n = 2m    : λ^{2m} − φ_2 λ^{2m−2} + φ_4 λ^{2m−4} − … + (−1)^m φ_{2m}
//! n = 2m+1  : λ · (the same bracket)
//! ```
//!
//! Two independent constructions are provided: the three-term determinant
//! recurrence run on dense coefficient vectors, and direct enumeration of the
//! "no two adjacent indices" products of squared couplings.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// The `n − 1` strictly positive coupling constants of an `n`-level chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingVector {
    g: Vec<f64>,
}

impl CouplingVector {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::TooFewLevels(g.len() + 1));
        }
        for (i, &v) in g.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidCoupling { index: i + 1, value: v });
            }
        }
        Ok(Self { g })
    }

    /// Builds the coupling vector and checks it describes an `n`-level system.
    pub fn with_levels(n: usize, g: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewLevels(n));
        }
        if g.len() != n - 1 {
            return Err(Error::LengthMismatch {
                what: "couplings",
                expected: n - 1,
                got: g.len(),
            });
        }
        Self::new(g)
    }

    /// Number of levels.
    #[inline]
    pub fn levels(&self) -> usize {
        self.g.len() + 1
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    pub fn squares(&self) -> Vec<f64> {
        self.g.iter().map(|g| g * g).collect()
    }

    /// Gershgorin radius `max_k (g_{k−1} + g_k)` with `g_0 = g_n = 0`. Every
    /// eigenvalue of the coupling matrix lies in `[−r, r]`.
    pub fn gershgorin_radius(&self) -> f64 {
        let g = &self.g;
        (0..=g.len())
            .map(|k| {
                let left = if k > 0 { g[k - 1] } else { 0.0 };
                let right = g.get(k).copied().unwrap_or(0.0);
                left + right
            })
            .fold(0.0, f64::max)
    }

    /// The chain with its last level removed, or `None` for a two-level chain.
    pub fn truncated(&self) -> Option<CouplingVector> {
        (self.g.len() > 1).then(|| CouplingVector {
            g: self.g[..self.g.len() - 1].to_vec(),
        })
    }
}

/// `det(λI − C)` in even-part form.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    n: usize,
    even_coeffs: Vec<f64>,
    odd_parity: bool,
}

impl CharPoly {
    /// `even_coeffs` holds `φ_2, …, φ_{2⌊n/2⌋}`.
    pub fn new(n: usize, even_coeffs: Vec<f64>) -> Result<Self> {
        if even_coeffs.len() != n / 2 {
            return Err(Error::LengthMismatch {
                what: "even coefficients",
                expected: n / 2,
                got: even_coeffs.len(),
            });
        }
        if even_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("characteristic polynomial"));
        }
        Ok(Self {
            n,
            even_coeffs,
            odd_parity: n % 2 == 1,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn even_coeffs(&self) -> &[f64] {
        &self.even_coeffs
    }

    #[inline]
    pub fn odd_parity(&self) -> bool {
        self.odd_parity
    }

    /// `φ_{2k}` with `φ_0 = 1`; zero past the end.
    pub fn phi(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            _ => self.even_coeffs.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    /// Ascending dense coefficients `[c_0, c_1, …, c_n]` of the full signed
    /// polynomial.
    pub fn dense_coeffs(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n + 1];
        for k in 0..=self.n / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c[self.n - 2 * k] = sign * self.phi(k);
        }
        c
    }

    /// Value of the even bracket `h(x) = Σ_k (−1)^k φ_{2k} x^{m−k}` and its
    /// derivative in `x`.
    fn bracket(&self, x: f64) -> (f64, f64) {
        let mut h = 1.0;
        let mut dh = 0.0;
        for (k, &phi) in self.even_coeffs.iter().enumerate() {
            let signed = if k % 2 == 0 { -phi } else { phi };
            dh = dh * x + h;
            h = h * x + signed;
        }
        (h, dh)
    }

    /// Value and first derivative of the full polynomial at `lambda`.
    pub fn eval_with_derivative(&self, lambda: f64) -> (f64, f64) {
        let x = lambda * lambda;
        let (h, dh) = self.bracket(x);
        if self.odd_parity {
            (lambda * h, h + 2.0 * x * dh)
        } else {
            (h, 2.0 * lambda * dh)
        }
    }
}

/// Value of the full signed characteristic polynomial at `lambda`.
pub fn eval_char_poly(p: &CharPoly, lambda: f64) -> f64 {
    p.eval_with_derivative(lambda).0
}

/// The real symmetric tridiagonal coupling matrix with zero diagonal.
pub fn build_coupling_matrix(g: &CouplingVector) -> ComplexMatrix {
    let n = g.levels();
    let mut c = ComplexMatrix::zeros(n);
    for (k, &gk) in g.as_slice().iter().enumerate() {
        c[(k, k + 1)] = Complex64::new(gk, 0.0);
        c[(k + 1, k)] = Complex64::new(gk, 0.0);
    }
    c
}

/// Runs `f_k = λ f_{k−1} − g_{k−1}² f_{k−2}` (`f_0 = 1`, `f_1 = λ`) on dense
/// ascending coefficient vectors and returns `f_n` in even-part form.
pub fn char_poly_recurrence(g: &CouplingVector) -> CharPoly {
    let n = g.levels();
    let gsq = g.squares();
    let mut older: Vec<f64> = vec![1.0];
    let mut prev: Vec<f64> = vec![0.0, 1.0];
    for k in 2..=n {
        let mut next = vec![0.0; k + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in older.iter().enumerate() {
            next[i] -= gsq[k - 2] * c;
        }
        older = std::mem::replace(&mut prev, next);
    }
    let even = (1..=n / 2)
        .map(|k| {
            let c = prev[n - 2 * k];
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    CharPoly::new(n, even).expect("recurrence yields n/2 finite coefficients")
}

/// Builds the characteristic polynomial by summing, for each `k`, the
/// products `g_{i_1}² ⋯ g_{i_k}²` over every strictly increasing index tuple
/// whose consecutive entries differ by at least two.
pub fn char_poly_closed_form(g: &CouplingVector) -> CharPoly {
    let n = g.levels();
    let gsq = g.squares();
    let even = (1..=n / 2).map(|k| gap_sum(&gsq, k)).collect();
    CharPoly::new(n, even).expect("enumeration yields n/2 finite coefficients")
}

/// `Σ w_{i_1} ⋯ w_{i_k}` over admissible `k`-tuples of indices into
/// `weights`. `gap_sum(w, 0) = 1`.
pub fn gap_sum(weights: &[f64], k: usize) -> f64 {
    let mut tuples = AdmissibleTuples::new(weights.len(), k);
    let mut total = 0.0;
    while let Some(idx) = tuples.advance() {
        total += idx.iter().map(|&i| weights[i]).product::<f64>();
    }
    total
}

/// Number of admissible `k`-subsets of `{0, …, len − 1}`:
/// `binomial(len − k + 1, k)`.
pub fn admissible_count(len: usize, k: usize) -> u64 {
    if k == 0 {
        return 1;
    }
    if len + 1 < 2 * k {
        return 0;
    }
    binomial((len - k + 1) as u64, k as u64)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographic enumeration of strictly increasing `k`-tuples drawn from
/// `0..len` with consecutive entries at least two apart. Iterative, so the
/// only state is the current tuple.
#[derive(Debug, Clone)]
pub struct AdmissibleTuples {
    len: usize,
    idx: Vec<usize>,
    started: bool,
    done: bool,
}

impl AdmissibleTuples {
    pub fn new(len: usize, k: usize) -> Self {
        let done = k > 0 && 2 * (k - 1) >= len;
        Self {
            len,
            idx: (0..k).map(|j| 2 * j).collect(),
            started: false,
            done,
        }
    }

    /// Moves to the next tuple and returns it, or `None` once exhausted.
    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        // Rightmost slot that still has room to move.
        let slot = (0..k).rev().find(|&i| self.idx[i] + 2 * (k - 1 - i) + 1 < self.len);
        match slot {
            None => {
                self.done = true;
                None
            }
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 2;
                }
                Some(&self.idx)
            }
        }
    }
}

/// The `n` real eigenvalues of a coupling matrix, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    gap_min: f64,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("eigenvalues"));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let gap_min = eigenvalues
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        Ok(Self { eigenvalues, gap_min })
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Smallest distance between two eigenvalues (`∞` for a single one).
    #[inline]
    pub fn gap_min(&self) -> f64 {
        self.gap_min
    }

    /// Spectral radius.
    pub fn scale(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `max_i |λ_i + λ_{n−1−i}|`, zero for an exactly `±`-paired spectrum.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        (0..n)
            .map(|i| (self.eigenvalues[i] + self.eigenvalues[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}
