//! Reference implementations that share no code path with the polynomial
//! route: a Taylor scaling-and-squaring exponential and a cyclic Jacobi
//! eigensolver. Used by the tests and as a runtime fallback.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spectral::{CouplingVector, Spectrum};

const MIN_TAYLOR_TERMS: usize = 20;
const MAX_TAYLOR_TERMS: usize = 60;
const TAYLOR_TAIL: f64 = 1e-18;

const MAX_JACOBI_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-14;

/// `exp(−i t M)` by scaling and squaring a truncated Taylor series.
///
/// `−i t M` is scaled by `2^{−s}` until its infinity norm is at most 1/2,
/// summed until a term drops below `1e−18` (at least 20 terms), then squared
/// `s` times.
pub fn oracle_expm(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite("oracle_expm input"));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let n = m.dim();
    let generator = m.scale(Complex64::new(0.0, -t));
    let norm = generator.inf_norm();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let scaled = generator.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=MAX_TAYLOR_TERMS {
        term = term.matmul(&scaled)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        sum.add_scaled(Complex64::new(1.0, 0.0), &term)?;
        if k >= MIN_TAYLOR_TERMS && term.inf_norm() < TAYLOR_TAIL {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum)?;
    }
    Ok(sum)
}

/// Eigenvalues of the coupling matrix by cyclic Jacobi rotations on the dense
/// real symmetric matrix.
pub fn oracle_eigen(g: &CouplingVector) -> Result<Spectrum> {
    let n = g.levels();
    let mut a = vec![0.0; n * n];
    for (k, &gk) in g.as_slice().iter().enumerate() {
        a[k * n + k + 1] = gk;
        a[(k + 1) * n + k] = gk;
    }
    Spectrum::new(jacobi_eigenvalues(&mut a, n)?)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes the row-major symmetric matrix `a` in place and returns its
/// diagonal.
pub fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = JACOBI_REL_TOL * scale;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(a, n) <= threshold {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Err(Error::NoConvergence {
        index: 0,
        iterations: MAX_JACOBI_SWEEPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_coupling_matrix;
    use std::f64::consts::PI;

    fn cv(g: &[f64]) -> CouplingVector {
        CouplingVector::new(g.to_vec()).unwrap()
    }

    #[test]
    fn expm_trivial_cases() {
        let c = build_coupling_matrix(&cv(&[1.3, 0.4]));
        assert_eq!(oracle_expm(&c, 0.0).unwrap(), ComplexMatrix::identity(3));
        let zero = ComplexMatrix::zeros(1);
        assert_eq!(oracle_expm(&zero, 2.0).unwrap(), ComplexMatrix::identity(1));
    }

    #[test]
    fn expm_two_level_half_period() {
        let c = build_coupling_matrix(&cv(&[1.0]));
        let u = oracle_expm(&c, PI).unwrap();
        let diff = u
            .sub(&ComplexMatrix::identity(2).scale(Complex64::new(-1.0, 0.0)))
            .unwrap();
        assert!(diff.frobenius_norm() < 1e-13);
    }

    #[test]
    fn expm_two_level_quarter_period() {
        let c = build_coupling_matrix(&cv(&[1.0]));
        let u = oracle_expm(&c, PI / 2.0).unwrap();
        assert!(u[(0, 0)].norm() < 1e-14);
        assert!((u[(0, 1)] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn expm_rejects_nan_time() {
        let c = build_coupling_matrix(&cv(&[1.0]));
        assert!(oracle_expm(&c, f64::NAN).is_err());
    }

    #[test]
    fn jacobi_known_spectra() {
        let s = oracle_eigen(&cv(&[3.0, 4.0])).unwrap();
        for (a, b) in s.eigenvalues().iter().zip([5.0, 0.0, -5.0]) {
            assert!((a - b).abs() < 1e-13);
        }
        let s = oracle_eigen(&cv(&[1.0])).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-15 && (s.eigenvalues()[1] + 1.0).abs() < 1e-15);
        let s = oracle_eigen(&cv(&[1.0; 7])).unwrap();
        for (k, a) in s.eigenvalues().iter().enumerate() {
            let want = 2.0 * ((k + 1) as f64 * PI / 9.0).cos();
            assert!((a - want).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_preserves_trace() {
        let s = oracle_eigen(&cv(&[0.2, 3.1, 0.9, 7.5, 1.4, 2.2])).unwrap();
        assert!(s.eigenvalues().iter().sum::<f64>().abs() < 1e-12);
    }
}
