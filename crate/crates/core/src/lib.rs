//! Exact propagators for an `n`-level atom driven by `n − 1` resonant fields.
//!
//! The dynamics reduce to the exponential of a real symmetric tridiagonal
//! coupling matrix `C`. This crate builds its characteristic polynomial,
//! extracts the (real, simple, `±`-paired) spectrum, and assembles
//! `exp(−itC)` as a polynomial in `C` with eigenvalue-dependent coefficients.
//! Independent reference routines live in [`oracle`].
//!
//! Time sweeps run on the rayon pool when the `parallel` feature is enabled
//! (the default) and sequentially otherwise.

pub mod eigen;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod par;
pub mod propagator;
pub mod spectral;

pub use eigen::{
    cardano_cubic, eigenvalues_closed, eigenvalues_general, eigenvalues_general_with, sturm_count, CubicRoots,
    DEFAULT_TOL,
};
pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use oracle::{oracle_eigen, oracle_expm};
pub use par::Execution;
pub use propagator::{
    check_unitarity, evolution_operator, expm_sylvester, phase_matrix, populations, sylvester_coeffs, time_grid,
    DriveConfig, InitialState, MatrixPowers, Method, Propagator, Sample, SylvesterBasis, SylvesterCoeffs,
    DEGENERACY_THRESHOLD, NORMALIZATION_TOL, UNITARITY_TOL,
};
pub use spectral::{
    admissible_count, build_coupling_matrix, char_poly_closed_form, char_poly_recurrence, eval_char_poly, gap_sum,
    AdmissibleTuples, CharPoly, CouplingVector, Spectrum,
};
