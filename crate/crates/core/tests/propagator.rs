mod common;

use std::f64::consts::PI;

use common::{random_coupling, rng};
use num_complex::{Complex, Complex64};
use proptest::prelude::*;
use rabi_core::{
    build_coupling_matrix, eigenvalues_general, evolution_operator, expm_sylvester, oracle_expm, populations,
    sylvester_coeffs, time_grid, CouplingVector, DriveConfig, Execution, InitialState, Method, Propagator, DEFAULT_TOL,
};
use rand::Rng;
use twofloat::TwoFloat;

type W = TwoFloat;
type Wc = Complex<TwoFloat>;

fn w(x: f64) -> W {
    W::from(x)
}

fn phase(t: f64, l: f64) -> Wc {
    let z = Complex64::from_polar(1.0, -t * l);
    Wc::new(w(z.re), w(z.im))
}

// The explicit expressions are evaluated in double-double so that their own
// cancellation does not swamp the comparison.

/// The n = 3 coefficients written out term by term.
fn explicit_three(l: [f64; 3], t: f64) -> [Wc; 3] {
    let (e1, e2, e3) = (phase(t, l[0]), phase(t, l[1]), phase(t, l[2]));
    let [l1, l2, l3] = l.map(w);
    let d1 = (l2 - l1) * (l3 - l1);
    let d2 = (l1 - l2) * (l3 - l2);
    let d3 = (l1 - l3) * (l2 - l3);
    [
        e1 * (l2 * l3 / d1) + e2 * (l1 * l3 / d2) + e3 * (l1 * l2 / d3),
        -e1 * ((l2 + l3) / d1) - e2 * ((l1 + l3) / d2) - e3 * ((l1 + l2) / d3),
        e1 / d1 + e2 / d2 + e3 / d3,
    ]
}

/// The n = 4 coefficients written out term by term.
fn explicit_four(l: [f64; 4], t: f64) -> [Wc; 4] {
    let (e1, e2, e3, e4) = (phase(t, l[0]), phase(t, l[1]), phase(t, l[2]), phase(t, l[3]));
    let [l1, l2, l3, l4] = l.map(w);
    let d1 = (l2 - l1) * (l3 - l1) * (l4 - l1);
    let d2 = (l1 - l2) * (l3 - l2) * (l4 - l2);
    let d3 = (l1 - l3) * (l2 - l3) * (l4 - l3);
    let d4 = (l1 - l4) * (l2 - l4) * (l3 - l4);
    [
        e1 * (l2 * l3 * l4 / d1) + e2 * (l1 * l3 * l4 / d2) + e3 * (l1 * l2 * l4 / d3) + e4 * (l1 * l2 * l3 / d4),
        -e1 * ((l2 * l3 + l2 * l4 + l3 * l4) / d1)
            - e2 * ((l1 * l3 + l1 * l4 + l3 * l4) / d2)
            - e3 * ((l1 * l2 + l1 * l4 + l2 * l4) / d3)
            - e4 * ((l1 * l2 + l1 * l3 + l2 * l3) / d4),
        e1 * ((l2 + l3 + l4) / d1)
            + e2 * ((l1 + l3 + l4) / d2)
            + e3 * ((l1 + l2 + l4) / d3)
            + e4 * ((l1 + l2 + l3) / d4),
        -e1 / d1 - e2 / d2 - e3 / d3 - e4 / d4,
    ]
}

fn assert_coeffs_close(got: &[Complex64], want: &[Wc]) {
    for (a, b) in got.iter().zip(want) {
        let b = Complex64::new(f64::from(b.re), f64::from(b.im));
        let rel = (a - b).norm() / a.norm().max(b.norm()).max(1e-300);
        assert!(rel <= 1e-11, "{a} vs {b}: {rel:e}");
    }
}

#[test]
fn explicit_small_coefficients_match() {
    let mut rng = rng(31);
    for _ in 0..100 {
        let t = rng.gen_range(-5.0..5.0);
        let g = random_coupling(&mut rng, 3);
        let s = eigenvalues_general(&g, DEFAULT_TOL).unwrap();
        let l: [f64; 3] = s.eigenvalues().try_into().unwrap();
        assert_coeffs_close(&sylvester_coeffs(&s, t).unwrap().f, &explicit_three(l, t));

        let g = random_coupling(&mut rng, 4);
        let s = eigenvalues_general(&g, DEFAULT_TOL).unwrap();
        let l: [f64; 4] = s.eigenvalues().try_into().unwrap();
        assert_coeffs_close(&sylvester_coeffs(&s, t).unwrap().f, &explicit_four(l, t));
    }
}

#[test]
fn sylvester_matches_series_exponential() {
    let mut rng = rng(32);
    for n in 2..=10 {
        for _ in 0..100 {
            let g = random_coupling(&mut rng, n);
            let gmax = g.as_slice().iter().cloned().fold(0.0, f64::max);
            let t = rng.gen_range(-20.0..=20.0) / gmax;
            let c = build_coupling_matrix(&g);
            let spec = eigenvalues_general(&g, DEFAULT_TOL).unwrap();
            let u = expm_sylvester(&c, &sylvester_coeffs(&spec, t).unwrap()).unwrap();
            let err = u.sub(&oracle_expm(&c, t).unwrap()).unwrap().frobenius_norm();
            assert!(err <= 1e-8 * n as f64, "n = {n}, t = {t}: {err:e}");
        }
    }
}

#[test]
fn two_level_rabi_oscillation() {
    let g = CouplingVector::new(vec![1.0]).unwrap();
    let p = Propagator::new(&g, Method::Closed, DEFAULT_TOL).unwrap();
    let times = time_grid(0.0, 2.0 * PI, 999);
    let samples = p
        .sweep(
            &DriveConfig::zero(2),
            &InitialState::Level(0),
            &times,
            Execution::Sequential,
        )
        .unwrap();
    for s in &samples {
        assert!((s.populations[1] - s.t.sin().powi(2)).abs() <= 1e-12);
    }
    let half = p.evolution(&DriveConfig::zero(2), PI / 2.0).unwrap();
    let pop = populations(&half, &InitialState::Level(0)).unwrap();
    assert!(pop[0] <= 1e-12 && (pop[1] - 1.0).abs() <= 1e-12);
}

#[test]
fn parallel_and_sequential_sweeps_are_identical() {
    let mut rng = rng(33);
    let g = random_coupling(&mut rng, 9);
    let dc = DriveConfig::new(vec![3.0; 8], vec![0.1; 8], 0.5).unwrap();
    let p = Propagator::new(&g, Method::General, DEFAULT_TOL).unwrap();
    let times = time_grid(-1.0, 3.0, 200);
    let init = InitialState::Level(4);
    let seq = p.sweep(&dc, &init, &times, Execution::Sequential).unwrap();
    let par = p.sweep(&dc, &init, &times, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

fn drive_for(n: usize, seed: f64) -> DriveConfig {
    let omegas = (0..n - 1).map(|k| 1.0 + seed * k as f64).collect();
    let phis = (0..n - 1).map(|k| seed * (k as f64 + 0.5)).collect();
    DriveConfig::new(omegas, phis, seed - 0.3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_property(g in prop::collection::vec(0.1f64..10.0, 1..12), t in -2.0f64..2.0, s in -2.0f64..2.0) {
        let g = CouplingVector::new(g).unwrap();
        let p = Propagator::new(&g, Method::General, DEFAULT_TOL).unwrap();
        let lhs = p.exp_minus_itc(t + s).unwrap();
        let rhs = p.exp_minus_itc(t).unwrap().matmul(&p.exp_minus_itc(s).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().frobenius_norm() <= 1e-10);
    }

    #[test]
    fn time_reversal_is_adjoint(g in prop::collection::vec(0.1f64..10.0, 1..12), t in -3.0f64..3.0) {
        let g = CouplingVector::new(g).unwrap();
        let p = Propagator::new(&g, Method::General, DEFAULT_TOL).unwrap();
        let fwd = p.exp_minus_itc(t).unwrap();
        let back = p.exp_minus_itc(-t).unwrap();
        prop_assert!(back.sub(&fwd.adjoint()).unwrap().frobenius_norm() <= 1e-10);
    }

    #[test]
    fn evolution_is_unitary(g in prop::collection::vec(0.1f64..10.0, 1..16), t in -5.0f64..5.0, seed in 0.0f64..1.0) {
        let g = CouplingVector::new(g).unwrap();
        let dc = drive_for(g.levels(), seed);
        let u = evolution_operator(&g, &dc, t, Method::General).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-10, "{}", u.unitarity_defect());
    }

    #[test]
    fn populations_ignore_drive_phases(g in prop::collection::vec(0.1f64..10.0, 1..10), t in -5.0f64..5.0, seed in 0.0f64..1.0, level in 0usize..10) {
        let g = CouplingVector::new(g).unwrap();
        let n = g.levels();
        let init = InitialState::Level(level % n);
        let p = Propagator::new(&g, Method::General, DEFAULT_TOL).unwrap();
        let bare = populations(&p.evolution(&DriveConfig::zero(n), t).unwrap(), &init).unwrap();
        let driven = populations(&p.evolution(&drive_for(n, seed), t).unwrap(), &init).unwrap();
        prop_assert!((bare.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((driven.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (a, b) in bare.iter().zip(&driven) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn methods_agree_on_populations(g in prop::collection::vec(0.1f64..10.0, 1..7), t in -5.0f64..5.0) {
        let g = CouplingVector::new(g).unwrap();
        let n = g.levels();
        let pops: Vec<Vec<f64>> = [Method::Closed, Method::General, Method::Oracle]
            .into_iter()
            .map(|m| {
                let u = evolution_operator(&g, &DriveConfig::zero(n), t, m).unwrap();
                populations(&u, &InitialState::Level(0)).unwrap()
            })
            .collect();
        for other in &pops[1..] {
            for (a, b) in pops[0].iter().zip(other) {
                prop_assert!((a - b).abs() <= 1e-8);
            }
        }
    }
}
