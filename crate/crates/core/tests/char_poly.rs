mod common;

use common::{random_coupling, rel_err, rng};
use proptest::prelude::*;
use rabi_core::{
    admissible_count, char_poly_closed_form, char_poly_recurrence, eval_char_poly, gap_sum, AdmissibleTuples, CharPoly,
    CouplingVector,
};

/// The explicit `f_2 … f_7`, written out term by term. `q[i]` is `g_{i+1}²`.
fn literal_phis(q: &[f64]) -> Vec<f64> {
    match q.len() + 1 {
        2 => vec![q[0]],
        3 => vec![q[0] + q[1]],
        4 => vec![q[0] + q[1] + q[2], q[0] * q[2]],
        5 => vec![q[0] + q[1] + q[2] + q[3], q[0] * q[2] + q[0] * q[3] + q[1] * q[3]],
        6 => vec![
            q[0] + q[1] + q[2] + q[3] + q[4],
            q[0] * q[2] + q[0] * q[3] + q[0] * q[4] + q[1] * q[3] + q[1] * q[4] + q[2] * q[4],
            q[0] * q[2] * q[4],
        ],
        7 => vec![
            q[0] + q[1] + q[2] + q[3] + q[4] + q[5],
            q[0] * q[2]
                + q[0] * q[3]
                + q[0] * q[4]
                + q[0] * q[5]
                + q[1] * q[3]
                + q[1] * q[4]
                + q[1] * q[5]
                + q[2] * q[4]
                + q[2] * q[5]
                + q[3] * q[5],
            q[0] * q[2] * q[4] + q[0] * q[2] * q[5] + q[0] * q[3] * q[5] + q[1] * q[3] * q[5],
        ],
        n => panic!("no literal fixture for n = {n}"),
    }
}

fn max_coeff_rel_err(a: &CharPoly, b: &CharPoly) -> f64 {
    assert_eq!(a.degree(), b.degree());
    a.even_coeffs()
        .iter()
        .zip(b.even_coeffs())
        .map(|(&x, &y)| rel_err(x, y))
        .fold(0.0, f64::max)
}

#[test]
fn builders_agree_for_random_couplings() {
    let mut rng = rng(11);
    for n in 2..=14 {
        for _ in 0..200 {
            let g = random_coupling(&mut rng, n);
            let err = max_coeff_rel_err(&char_poly_closed_form(&g), &char_poly_recurrence(&g));
            assert!(err <= 1e-12, "n = {n}, g = {:?}, err = {err:e}", g.as_slice());
        }
    }
}

#[test]
fn literal_fixtures_match_both_builders() {
    let mut rng = rng(12);
    for n in 2..=7 {
        for _ in 0..50 {
            let g = random_coupling(&mut rng, n);
            let want = literal_phis(&g.squares());
            for poly in [char_poly_closed_form(&g), char_poly_recurrence(&g)] {
                assert_eq!(poly.even_coeffs().len(), want.len());
                for (&got, &w) in poly.even_coeffs().iter().zip(&want) {
                    assert!(rel_err(got, w) <= 1e-12, "n = {n}: {got} vs {w}");
                }
            }
        }
    }
}

#[test]
fn unit_couplings_give_tuple_counts() {
    // With every g = 1 each admissible tuple contributes exactly 1.
    for n in 2..=14 {
        let g = CouplingVector::with_levels(n, vec![1.0; n - 1]).unwrap();
        let poly = char_poly_closed_form(&g);
        for k in 1..=n / 2 {
            assert_eq!(poly.phi(k), admissible_count(n - 1, k) as f64);
        }
    }
}

#[test]
fn enumerated_tuples_match_binomial_counts() {
    for len in 0..=13 {
        for k in 0..=7 {
            let mut it = AdmissibleTuples::new(len, k);
            let mut count = 0u64;
            let mut last: Option<Vec<usize>> = None;
            while let Some(idx) = it.advance() {
                assert_eq!(idx.len(), k);
                assert!(idx.windows(2).all(|w| w[1] >= w[0] + 2));
                assert!(idx.iter().all(|&i| i < len));
                if let Some(prev) = &last {
                    assert!(prev.as_slice() < idx, "not lexicographic");
                }
                last = Some(idx.to_vec());
                count += 1;
            }
            assert_eq!(count, admissible_count(len, k), "len = {len}, k = {k}");
        }
    }
}

/// `φ_{2k}(w_1..w_N) = φ_{2(k−1)}(w_1..w_{N−2}) w_N + φ_{2k}(w_1..w_{N−1})`.
fn reduction_residual(w: &[f64], k: usize) -> f64 {
    let big = w.len();
    let head = if big >= 2 {
        gap_sum(&w[..big - 2], k - 1)
    } else {
        f64::from(u8::from(k == 1))
    };
    let split = head * w[big - 1] + gap_sum(&w[..big - 1], k);
    rel_err(gap_sum(w, k), split)
}

#[test]
fn reduction_identities_hold() {
    let mut rng = rng(13);
    for n in 2..=14 {
        for _ in 0..20 {
            let g = random_coupling(&mut rng, n);
            let w = g.squares();
            for k in 1..=n / 2 {
                let r = reduction_residual(&w, k);
                assert!(r <= 1e-12, "n = {n}, k = {k}: {r:e}");
            }
        }
    }
}

#[test]
fn evaluation_has_parity_symmetry() {
    let mut rng = rng(14);
    for n in 2..=12 {
        let g = random_coupling(&mut rng, n);
        let poly = char_poly_recurrence(&g);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for &x in &[0.0, 0.37, 1.5, 4.0, 11.0] {
            let (a, b) = (eval_char_poly(&poly, x), eval_char_poly(&poly, -x));
            assert!((a - sign * b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

#[test]
fn dense_coefficients_have_alternating_even_layout() {
    let g = CouplingVector::new(vec![1.0, 2.0, 3.0]).unwrap();
    // λ⁴ − 14λ² + 9
    assert_eq!(char_poly_recurrence(&g).dense_coeffs(), vec![9.0, 0.0, -14.0, 0.0, 1.0]);
    let g = CouplingVector::new(vec![1.0, 2.0]).unwrap();
    assert_eq!(char_poly_closed_form(&g).dense_coeffs(), vec![0.0, -5.0, 0.0, 1.0]);
}

proptest! {
    #[test]
    fn builders_agree(g in prop::collection::vec(0.1f64..10.0, 1..14)) {
        let g = CouplingVector::new(g).unwrap();
        prop_assert!(max_coeff_rel_err(&char_poly_closed_form(&g), &char_poly_recurrence(&g)) <= 1e-12);
    }

    #[test]
    fn reduction_identity(g in prop::collection::vec(0.1f64..10.0, 2..14), k in 1usize..8) {
        let w: Vec<f64> = g.iter().map(|x| x * x).collect();
        prop_assume!(2 * k <= w.len() + 1);
        prop_assert!(reduction_residual(&w, k) <= 1e-12);
    }

    #[test]
    fn sign_changes_bounded_by_degree(g in prop::collection::vec(0.1f64..10.0, 1..10)) {
        // Sign changes of f_n on a fine grid cannot exceed the degree.
        let g = CouplingVector::new(g).unwrap();
        let poly = char_poly_recurrence(&g);
        let r = g.gershgorin_radius() * 1.01;
        let vals: Vec<f64> = (0..=400).map(|i| eval_char_poly(&poly, -r + 2.0 * r * i as f64 / 400.0)).collect();
        let changes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        prop_assert!(changes <= poly.degree());
        prop_assert!(vals[0] * vals[400] != 0.0);
    }
}
