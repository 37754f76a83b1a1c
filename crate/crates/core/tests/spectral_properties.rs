mod common;

use common::*;
use epdyn::model::{hamiltonian, rotate_state, rotated_hamiltonian};
use epdyn::spectral::{
    c_product, discriminant, eigen_residual, eigenvalues, eigenvectors, exceptional_points,
};
use epdyn::{ModelParams, StateVector};
use proptest::prelude::*;

fn finite_complex() -> impl Strategy<Value = epdyn::Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| c(re, im))
}

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        finite_complex(),
        finite_complex(),
        finite_complex(),
        finite_complex(),
        finite_complex(),
    )
        .prop_map(|(a, b, e1, e2, d)| ModelParams::new(a, b, e1, e2, d).unwrap())
}

proptest! {
    #[test]
    fn trace_is_sum_of_diagonal_energies(p in params_strategy(), l in finite_complex()) {
        let h = hamiltonian(&p, l).unwrap();
        let want = p.omega1 + p.omega2 + l * (p.epsilon1 + p.epsilon2);
        let scale = p.omega1.norm() + p.omega2.norm() + l.norm() * (p.epsilon1.norm() + p.epsilon2.norm());
        prop_assert!((h.trace() - want).norm() <= 1e-13 * scale.max(1e-300));
        prop_assert_eq!(h.a12, h.a21);
    }

    #[test]
    fn rotation_preserves_characteristic_polynomial(p in params_strategy(), l in finite_complex()) {
        let h = hamiltonian(&p, l).unwrap();
        let r = rotated_hamiltonian(&p, l).unwrap();
        let scale = h.norm();
        prop_assert!((h.trace() - r.trace()).norm() <= 1e-12 * scale);
        prop_assert!((h.det() - r.det()).norm() <= 1e-12 * scale * scale);
        prop_assert!((r.a12 - r.a21).norm() <= 1e-15 * scale);
    }

    #[test]
    fn rotation_preserves_norm(
        a in finite_complex(), b in finite_complex(), angle in -10.0f64..10.0
    ) {
        let s = StateVector::new(a, b);
        let r = rotate_state(s, angle).unwrap();
        prop_assert!((r.norm() - s.norm()).abs() <= 1e-14 * s.norm().max(1e-300));
        let back = rotate_state(r, -angle).unwrap();
        prop_assert!((back - s).norm() <= 1e-14 * s.norm().max(1e-300));
    }
}

#[test]
fn eigenvalues_reproduce_trace_and_determinant() {
    let mut rng = rng(11);
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let l = random_lambda(&mut rng);
        let h = hamiltonian(&p, l).unwrap();
        let s = eigenvalues(&p, l).unwrap();
        assert!((s.e1 + s.e2 - h.trace()).norm() <= 1e-12 * h.trace().norm());
        let det_scale = (h.a11 * h.a22).norm() + (h.a12 * h.a21).norm();
        assert!((s.e1 * s.e2 - h.det()).norm() <= 1e-12 * det_scale);
        assert!((s.e2 - s.e1 - s.d).norm() <= 1e-12 * s.d.norm().max(s.mean.norm()));
        assert!((s.e1 + s.e2 - 2.0 * s.mean).norm() <= 1e-12 * s.mean.norm());
    }
}

#[test]
fn discriminant_factorizes_through_the_eps() {
    let mut rng = rng(12);
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let pair = exceptional_points(&p).unwrap();
        for _ in 0..1000 {
            let l = complex_in(&mut rng, (-2.0, 2.0), (-1.0, 1.0));
            let direct = discriminant(&p, l);
            let factored = pair.cc * (l - pair.ep1) * (l - pair.ep2);
            // scale of the summands, so that cancellation near an EP is not
            // mistaken for a factorisation error
            let det = p.detuning(l);
            let scale = det.norm_sqr() + 4.0 * (l * p.delta).norm_sqr();
            assert!((direct - factored).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn eigenvectors_are_c_orthogonal_away_from_eps() {
    let mut rng = rng(13);
    let mut checked = 0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let l = random_lambda(&mut rng);
        let s = eigenvalues(&p, l).unwrap();
        if s.d.norm() <= 1e-6 * s.mean.norm() {
            continue;
        }
        let sys = eigenvectors(&p, l).unwrap();
        let n1 = (sys.v1[0].norm_sqr() + sys.v1[1].norm_sqr()).sqrt();
        let n2 = (sys.v2[0].norm_sqr() + sys.v2[1].norm_sqr()).sqrt();
        assert!(c_product(sys.v1, sys.v2).norm() <= 1e-10 * n1 * n2);
        let h_norm = rotated_hamiltonian(&p, l).unwrap().norm();
        assert!(eigen_residual(&p, l, s.e1, sys.v1).unwrap() <= 1e-10 * h_norm);
        assert!(eigen_residual(&p, l, s.e2, sys.v2).unwrap() <= 1e-10 * h_norm);
        checked += 1;
    }
    assert!(checked > 900);
}

#[test]
fn flipping_the_coupling_swaps_eigenvectors_up_to_reflection() {
    // v1(−δ) = diag(1,−1)·v2(δ) and v2(−δ) = diag(1,−1)·v1(δ)
    let mut rng = rng(14);
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let l = random_lambda(&mut rng);
        let (Ok(a), Ok(b)) = (eigenvectors(&p, l), eigenvectors(&p.flip_delta(), l)) else {
            continue;
        };
        let scale = a.v1[0].norm() + a.v1[1].norm() + a.v2[0].norm() + a.v2[1].norm();
        assert!((b.v1[0] - a.v2[0]).norm() <= 1e-12 * scale);
        assert!((b.v1[1] + a.v2[1]).norm() <= 1e-12 * scale);
        assert!((b.v2[0] - a.v1[0]).norm() <= 1e-12 * scale);
        assert!((b.v2[1] + a.v1[1]).norm() <= 1e-12 * scale);
    }
}

#[test]
fn c_norm_vanishes_as_quarter_power() {
    let p = ModelParams::paper();
    for ep in [
        exceptional_points(&p).unwrap().ep1,
        exceptional_points(&p).unwrap().ep2,
    ] {
        let dir = c(0.6, 0.8);
        let points: Vec<(f64, f64)> = (0..=30)
            .map(|k| {
                let r = 1e-6 * 1e3f64.powf(k as f64 / 30.0);
                let n = eigenvectors(&p, ep + dir * r).unwrap().n1.norm();
                (r.ln(), n.ln())
            })
            .collect();
        let slope = slope(&points);
        assert!((slope - 0.25).abs() <= 0.02, "slope {slope}");
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
