//! Two-level model Hamiltonian `H(λ) = H₀ + λV` and the observational basis.
//!
//! The canonical (internal) basis is the one in which `H₀ = diag(ω₁, ω₂)`.
//! States handed to and returned from the public evolution API live in the
//! observational basis, obtained from the canonical one by the real rotation
//!
//! ```text
//! ψ_obs = R(π/4) ψ_can,   R(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]
//! H_obs = R(π/4) H R(π/4)ᵀ = mean·I + [[−λδ, Δ/2], [Δ/2, λδ]]
//! ```
//!
//! with `Δ = ω₁−ω₂+λ(ε₁−ε₂)`. This orientation is the one for which the
//! exceptional-point limit formulas and the closed-form Jordan basis at `EP1`
//! hold as written (see `docs/FORMULAS.md`).

use std::f64::consts::FRAC_PI_4;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Angle of the rotation taking canonical components to observational ones.
pub const OBSERVATIONAL_ANGLE: f64 = FRAC_PI_4;

pub(crate) fn check_finite(name: &str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} is not finite: {z}")))
    }
}

pub(crate) fn check_finite_real(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} is not finite: {x}")))
    }
}

/// The five complex model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub epsilon1: Complex64,
    pub epsilon2: Complex64,
    pub delta: Complex64,
}

impl ModelParams {
    pub fn new(
        omega1: Complex64,
        omega2: Complex64,
        epsilon1: Complex64,
        epsilon2: Complex64,
        delta: Complex64,
    ) -> Result<Self> {
        let params = Self {
            omega1,
            omega2,
            epsilon1,
            epsilon2,
            delta,
        };
        params.validate()?;
        Ok(params)
    }

    /// The two-resonance parameter set with a pair of nearby exceptional
    /// points for real `λ ≈ 0.55–0.58`.
    pub fn paper() -> Self {
        Self {
            omega1: Complex64::new(1.55, -0.007),
            omega2: Complex64::new(1.1, -0.007),
            epsilon1: Complex64::new(-0.4, -0.0006),
            epsilon2: Complex64::new(0.4, 0.0005),
            delta: Complex64::new(0.0, 0.0115),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("omega1", self.omega1)?;
        check_finite("omega2", self.omega2)?;
        check_finite("epsilon1", self.epsilon1)?;
        check_finite("epsilon2", self.epsilon2)?;
        check_finite("delta", self.delta)
    }

    /// Same parameters with `δ → −δ`.
    pub fn flip_delta(&self) -> Self {
        Self {
            delta: -self.delta,
            ..*self
        }
    }

    /// `ω₁ − ω₂`
    pub fn omega_diff(&self) -> Complex64 {
        self.omega1 - self.omega2
    }

    /// `ε₁ − ε₂`
    pub fn epsilon_diff(&self) -> Complex64 {
        self.epsilon1 - self.epsilon2
    }

    /// Detuning `Δ(λ) = ω₁−ω₂+λ(ε₁−ε₂)` of the non-interacting energies.
    pub fn detuning(&self, lambda: Complex64) -> Complex64 {
        self.omega_diff() + lambda * self.epsilon_diff()
    }

    /// Half the trace of `H(λ)`.
    pub fn mean_energy(&self, lambda: Complex64) -> Complex64 {
        0.5 * (self.omega1 + self.omega2 + lambda * (self.epsilon1 + self.epsilon2))
    }
}

/// A 2×2 complex matrix in row-major entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Matrix2 {
    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Self::diag(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(d1, zero, zero, d2)
    }

    pub fn real_rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c.into(), (-s).into(), s.into(), c.into())
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(k * self.a11, k * self.a12, k * self.a21, k * self.a22)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[self.a11, self.a12, self.a21, self.a22])
    }

    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.shape() != (2, 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.nrows().max(m.ncols()),
            });
        }
        Ok(Self::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

/// Two complex amplitudes `(z₁, z₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl StateVector {
    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        Self { z1, z2 }
    }

    pub fn from_real(z1: f64, z2: f64) -> Self {
        Self::new(z1.into(), z2.into())
    }

    pub fn as_array(&self) -> [Complex64; 2] {
        [self.z1, self.z2]
    }

    pub fn from_array(v: [Complex64; 2]) -> Self {
        Self::new(v[0], v[1])
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&[self.z1, self.z2])
    }

    pub fn from_dvector(v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: v.len(),
            });
        }
        Ok(Self::new(v[0], v[1]))
    }

    /// Euclidean norm `√(|z₁|² + |z₂|²)`.
    pub fn norm(&self) -> f64 {
        (self.z1.norm_sqr() + self.z2.norm_sqr()).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("z1", self.z1)?;
        check_finite("z2", self.z2)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(k * self.z1, k * self.z2)
    }
}

impl Add for StateVector {
    type Output = StateVector;
    fn add(self, o: StateVector) -> StateVector {
        StateVector::new(self.z1 + o.z1, self.z2 + o.z2)
    }
}

impl Sub for StateVector {
    type Output = StateVector;
    fn sub(self, o: StateVector) -> StateVector {
        StateVector::new(self.z1 - o.z1, self.z2 - o.z2)
    }
}

/// `H(λ) = diag(ω₁, ω₂) + λ·[[ε₁, δ], [δ, ε₂]]` in the canonical basis.
pub fn hamiltonian(params: &ModelParams, lambda: Complex64) -> Result<Matrix2> {
    params.validate()?;
    check_finite("lambda", lambda)?;
    let coupling = lambda * params.delta;
    Ok(Matrix2::new(
        params.omega1 + lambda * params.epsilon1,
        coupling,
        coupling,
        params.omega2 + lambda * params.epsilon2,
    ))
}

/// `R H Rᵀ` with `R = R(π/4)`: the Hamiltonian acting on observational components.
pub fn rotated_hamiltonian(params: &ModelParams, lambda: Complex64) -> Result<Matrix2> {
    let h = hamiltonian(params, lambda)?;
    let r = Matrix2::real_rotation(OBSERVATIONAL_ANGLE);
    Ok(r * h * r.transpose())
}

/// Applies the real rotation `R(angle)` to the component pair.
pub fn rotate_state(state: StateVector, angle: f64) -> Result<StateVector> {
    check_finite_real("angle", angle)?;
    state.validate()?;
    Ok(StateVector::from_array(
        Matrix2::real_rotation(angle).apply(state.as_array()),
    ))
}

/// Canonical components to observational components.
pub fn to_observational(state: StateVector) -> Result<StateVector> {
    rotate_state(state, OBSERVATIONAL_ANGLE)
}

/// Observational components to canonical components.
pub fn to_canonical(state: StateVector) -> Result<StateVector> {
    rotate_state(state, -OBSERVATIONAL_ANGLE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_c_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b}");
    }

    #[test]
    fn hamiltonian_at_zero_coupling_is_bare_energies() {
        let h = hamiltonian(&ModelParams::paper(), c(0.0, 0.0)).unwrap();
        assert_eq!(h, Matrix2::diag(c(1.55, -0.007), c(1.1, -0.007)));
    }

    #[test]
    fn hamiltonian_off_diagonal_is_lambda_delta() {
        let h = hamiltonian(&ModelParams::paper(), c(1.0, 0.0)).unwrap();
        assert_eq!(h.a12, c(0.0, 0.0115));
        assert_eq!(h.a21, c(0.0, 0.0115));
    }

    #[test]
    fn rejects_non_finite_input() {
        let p = ModelParams::paper();
        assert!(matches!(
            hamiltonian(&p, c(f64::NAN, 0.0)),
            Err(Error::InvalidArgument(_))
        ));
        let bad = ModelParams {
            delta: c(f64::INFINITY, 0.0),
            ..p
        };
        assert!(hamiltonian(&bad, c(0.5, 0.0)).is_err());
        assert!(
            ModelParams::new(p.omega1, p.omega2, p.epsilon1, c(0.0, f64::NAN), p.delta).is_err()
        );
        assert!(rotate_state(StateVector::from_real(1.0, 0.0), f64::NAN).is_err());
    }

    #[test]
    fn rotated_hamiltonian_of_scalar_model_is_scalar() {
        let w = c(1.2, -0.01);
        let e = c(0.3, 0.002);
        let p = ModelParams::new(w, w, e, e, c(0.0, 0.0)).unwrap();
        let lambda = c(0.7, 0.1);
        let h = rotated_hamiltonian(&p, lambda).unwrap();
        let expected = w + lambda * e;
        assert_c_close(h.a11, expected, 1e-15);
        assert_c_close(h.a22, expected, 1e-15);
        assert!(h.a12.norm() < 1e-15 && h.a21.norm() < 1e-15);
    }

    #[test]
    fn rotated_hamiltonian_explicit_entries() {
        // Hand-multiplied R H Rᵀ at λ = 0.53, frozen from an independent numpy run.
        let h = rotated_hamiltonian(&ModelParams::paper(), c(0.53, 0.0)).unwrap();
        assert_c_close(h.a11, c(1.325, -0.0131215), 1e-14);
        assert_c_close(h.a12, c(0.013, -0.0002915), 1e-14);
        assert_c_close(h.a21, c(0.013, -0.0002915), 1e-14);
        assert_c_close(h.a22, c(1.325, -0.0009315), 1e-14);
        // closed form mean·I + [[−λδ, Δ/2], [Δ/2, λδ]]
        let p = ModelParams::paper();
        let l = c(0.53, 0.0);
        assert_c_close(h.a11, p.mean_energy(l) - l * p.delta, 1e-14);
        assert_c_close(h.a12, 0.5 * p.detuning(l), 1e-14);
    }

    #[test]
    fn rotation_examples() {
        let e1 = StateVector::from_real(1.0, 0.0);
        assert_eq!(rotate_state(e1, 0.0).unwrap(), e1);
        let r = rotate_state(e1, FRAC_PI_2).unwrap();
        assert_c_close(r.z1, c(0.0, 0.0), 1e-16);
        assert_c_close(r.z2, c(1.0, 0.0), 1e-16);
        let r = rotate_state(StateVector::new(c(1.0, 0.0), c(0.0, 1.0)), FRAC_PI_4).unwrap();
        assert_c_close(r.z1, c(FRAC_1_SQRT_2, -FRAC_1_SQRT_2), 1e-15);
        assert_c_close(r.z2, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2), 1e-15);
    }

    #[test]
    fn observational_round_trip() {
        let s = StateVector::new(c(0.3, -0.2), c(1.1, 0.4));
        let back = to_canonical(to_observational(s).unwrap()).unwrap();
        assert_relative_eq!(back.z1.re, s.z1.re, epsilon = 1e-15);
        assert_relative_eq!(back.z2.im, s.z2.im, epsilon = 1e-15);
    }
}
