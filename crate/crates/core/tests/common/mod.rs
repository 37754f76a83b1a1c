#![allow(dead_code)]

use epdyn::{Complex64, ModelParams, StateVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complex_in(rng: &mut impl Rng, re: (f64, f64), im: (f64, f64)) -> Complex64 {
    c(rng.gen_range(re.0..=re.1), rng.gen_range(im.0..=im.1))
}

/// Resonance-like parameters: bare energies of order one with small widths,
/// perturbations of order one, couplings up to a few percent.
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    ModelParams::new(
        complex_in(rng, (0.5, 2.0), (-0.02, 0.0)),
        complex_in(rng, (0.5, 2.0), (-0.02, 0.0)),
        complex_in(rng, (-1.0, 1.0), (-0.002, 0.002)),
        complex_in(rng, (-1.0, 1.0), (-0.002, 0.002)),
        complex_in(rng, (-0.05, 0.05), (-0.05, 0.05)),
    )
    .unwrap()
}

pub fn random_lambda(rng: &mut impl Rng) -> Complex64 {
    complex_in(rng, (0.0, 1.0), (-0.01, 0.01))
}

pub fn random_state(rng: &mut impl Rng) -> StateVector {
    StateVector::new(
        complex_in(rng, (-1.0, 1.0), (-1.0, 1.0)),
        complex_in(rng, (-1.0, 1.0), (-1.0, 1.0)),
    )
}

pub fn rel_err(got: StateVector, want: StateVector) -> f64 {
    (got - want).norm() / want.norm()
}
