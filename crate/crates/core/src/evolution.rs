//! Solutions of `i ∂ₜψ = H ψ` for the two-level model and of `dχ/dt = O χ`
//! for general diagonalisable generators.
//!
//! All states are in the observational basis (see [`crate::model`]).
//!
//! The closed form is the exact 2×2 propagator
//!
//! ```text
//! U(t) = e^{−i·mean·t} [ cos(d t/2)·I − i t·sinc(d t/2)·K ],   K = H_obs − mean·I
//! ```
//!
//! which is even in `d`, so neither the branch of the discriminant root nor
//! the `E₁/E₂` labelling enters. Written in terms of the two exponentials
//! `x_k = e^{−iE_k t}` and `D = E₁ − E₂` it reads
//!
//! ```text
//! z₂ = C₂[(x₁+x₂)/2 + λδ(x₁−x₂)/D] + C₁(x₁−x₂)(ω₁−ω₂+λ(ε₁−ε₂))/(2D)
//! z₁ = C₁[(x₁+x₂)/2 − λδ(x₁−x₂)/D] + C₂(x₁−x₂)(ω₁−ω₂+λ(ε₁−ε₂))/(2D)
//! ```
//!
//! and `(x₁−x₂)/D = −i t e^{−i·mean·t} sinc(D t/2)` stays finite as `D → 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{check_finite, check_finite_real, ModelParams, StateVector};
use crate::numerics::sinc_c;
use crate::spectral::{defective_distance, discriminant, exceptional_points, Branch};

/// Minimum eigenvalue separation, relative to `‖O‖_F`, accepted by [`evolve_spectral`].
pub const DIAGONALIZABLE_GAP: f64 = 1e-8;

const SCHUR_MAX_ITERATIONS: usize = 10_000;

/// Which formula produced an [`EvolutionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    EpLimit,
    Jordan,
    SpectralGeneral,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::EpLimit => "ep_limit",
            Method::Jordan => "jordan",
            Method::SpectralGeneral => "spectral_general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionResult {
    pub state: StateVector,
    pub method: Method,
}

fn check_inputs(params: &ModelParams, psi0: &StateVector, t: f64) -> Result<()> {
    params.validate()?;
    psi0.validate()?;
    check_finite_real("t", t)
}

/// Closed-form state at time `t` for coupling `lambda`.
pub fn evolve_closed(
    params: &ModelParams,
    lambda: Complex64,
    psi0: StateVector,
    t: f64,
) -> Result<StateVector> {
    check_inputs(params, &psi0, t)?;
    check_finite("lambda", lambda)?;

    let mean = params.mean_energy(lambda);
    let d = discriminant(params, lambda).sqrt();
    let g = lambda * params.delta;
    let half_detuning = 0.5 * params.detuning(lambda);

    let half_phase = 0.5 * d * t;
    let cos = half_phase.cos();
    // sin(dt/2)/(d/2)
    let q = t * sinc_c(half_phase);
    let phase = (-Complex64::i() * mean * t).exp();
    let i = Complex64::i();

    let z1 = (cos + i * q * g) * psi0.z1 - i * q * half_detuning * psi0.z2;
    let z2 = (cos - i * q * g) * psi0.z2 - i * q * half_detuning * psi0.z1;
    Ok(StateVector::new(phase * z1, phase * z2))
}

/// The coalesced eigenvalue `E_EP` at the given exceptional point:
/// `[i(ε₁ω₂−ε₂ω₁) + δ(ω₁+ω₂)] / [i(ε₁−ε₂) + 2δ]` at `EP1`, `δ → −δ` for `EP2`.
pub fn ep_energy(params: &ModelParams, branch: Branch) -> Result<Complex64> {
    exceptional_points(params)?;
    let p = match branch {
        Branch::Ep1 => *params,
        Branch::Ep2 => params.flip_delta(),
    };
    let i = Complex64::i();
    Ok(
        (i * (p.epsilon1 * p.omega2 - p.epsilon2 * p.omega1) + p.delta * (p.omega1 + p.omega2))
            / (i * p.epsilon_diff() + 2.0 * p.delta),
    )
}

/// Exact state at an exceptional point: a first-degree polynomial in `t`
/// times `e^{−i E_EP t}`.
///
/// At `EP1`, with `c = ε₁−ε₂−2iδ` and `w = δ(ω₁−ω₂)`:
///
/// ```text
/// z₂ = [(c + i w t) C₂ − w t C₁] / c · e^{−i E_EP t}
/// z₁ = [(c − i w t) C₁ − w t C₂] / c · e^{−i E_EP t}
/// ```
///
/// `EP2` follows from `δ → −δ`, which in the observational basis also swaps
/// the two components.
pub fn evolve_at_ep(
    params: &ModelParams,
    branch: Branch,
    psi0: StateVector,
    t: f64,
) -> Result<StateVector> {
    check_inputs(params, &psi0, t)?;
    let energy = ep_energy(params, branch)?;
    let (p, psi0) = match branch {
        Branch::Ep1 => (*params, psi0),
        Branch::Ep2 => (params.flip_delta(), StateVector::new(psi0.z2, psi0.z1)),
    };
    let i = Complex64::i();
    let c = p.epsilon_diff() - 2.0 * i * p.delta;
    let w = p.delta * p.omega_diff();
    let phase = (-i * energy * t).exp();

    let z2 = phase * ((c + i * w * t) * psi0.z2 - w * t * psi0.z1) / c;
    let z1 = phase * ((c - i * w * t) * psi0.z1 - w * t * psi0.z2) / c;
    Ok(match branch {
        Branch::Ep1 => StateVector::new(z1, z2),
        Branch::Ep2 => StateVector::new(z2, z1),
    })
}

/// Uses the EP-limit formula when `lambda` is within the EP tolerance of an
/// exceptional point and the closed form otherwise.
pub fn evolve_auto(
    params: &ModelParams,
    lambda: Complex64,
    psi0: StateVector,
    t: f64,
) -> Result<EvolutionResult> {
    check_inputs(params, &psi0, t)?;
    check_finite("lambda", lambda)?;
    if let Some((branch, _, _)) = defective_distance(params, lambda) {
        return Ok(EvolutionResult {
            state: evolve_at_ep(params, branch, psi0, t)?,
            method: Method::EpLimit,
        });
    }
    Ok(EvolutionResult {
        state: evolve_closed(params, lambda, psi0, t)?,
        method: Method::ClosedForm,
    })
}

/// [`evolve_auto`] at each of `times`, evaluated in parallel; results are in
/// input order and identical to a sequential loop.
pub fn evolve_many(
    params: &ModelParams,
    lambda: Complex64,
    psi0: StateVector,
    times: &[f64],
) -> Result<Vec<EvolutionResult>> {
    times
        .par_iter()
        .map(|&t| evolve_auto(params, lambda, psi0, t))
        .collect()
}

/// Right eigenvectors of an upper-triangular Schur factor by back substitution.
///
/// Columns are scaled to unit Euclidean norm. A (near-)repeated eigenvalue
/// whose Schur coupling does not vanish makes the matrix defective within
/// tolerance, which is reported as [`Error::NearlyDefective`].
fn triangular_eigenvectors(t: &DMatrix<Complex64>, threshold: f64) -> Result<DMatrix<Complex64>> {
    let n = t.nrows();
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let ek = t[(k, k)];
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * x[(j, k)];
            }
            let denom = t[(i, i)] - ek;
            if denom.norm() <= threshold {
                if acc.norm() <= threshold {
                    x[(i, k)] = Complex64::new(0.0, 0.0);
                } else {
                    return Err(Error::NearlyDefective {
                        gap: denom.norm(),
                        threshold,
                    });
                }
            } else {
                x[(i, k)] = -acc / denom;
            }
        }
        let norm = x.column(k).norm();
        x.column_mut(k).unscale_mut(norm);
    }
    Ok(x)
}

/// `χ(t) = Σ_k e^{E_k t} ⟨φ_k^l|χ(0)⟩ / ⟨φ_k^l|φ_k^r⟩ |φ_k^r⟩` for `dχ/dt = O χ`.
///
/// Right eigenvectors come from a complex Schur decomposition, left
/// eigenvectors from the rows of the inverse right-eigenvector matrix.
/// Generators with coupled eigenvalues closer than
/// [`DIAGONALIZABLE_GAP`]`·‖O‖` are refused; use [`crate::jordan`] there.
pub fn evolve_spectral(
    o: &DMatrix<Complex64>,
    c0: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    let n = o.nrows();
    if n != o.ncols() {
        return Err(Error::NotSquare {
            rows: n,
            cols: o.ncols(),
        });
    }
    if c0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c0.len(),
        });
    }
    check_finite_real("t", t)?;
    if o.iter()
        .chain(c0.iter())
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidArgument(
            "non-finite generator or initial vector".into(),
        ));
    }
    if n == 0 {
        return Ok(c0.clone());
    }

    let threshold = DIAGONALIZABLE_GAP * o.norm();
    let upper = (0..n).all(|j| ((j + 1)..n).all(|i| o[(i, j)] == Complex64::new(0.0, 0.0)));
    let (q, tri) = if upper {
        (DMatrix::identity(n, n), o.clone())
    } else {
        o.clone()
            .try_schur(f64::EPSILON, SCHUR_MAX_ITERATIONS)
            .ok_or_else(|| Error::InvalidArgument("Schur iteration did not converge".into()))?
            .unpack()
    };
    let right = &q * triangular_eigenvectors(&tri, threshold)?;
    let left = right.clone().try_inverse().ok_or(Error::NearlyDefective {
        gap: 0.0,
        threshold,
    })?;

    let mut out = DVector::<Complex64>::zeros(n);
    for k in 0..n {
        let l = left.row(k);
        let r = right.column(k);
        let overlap = (l * c0)[0];
        let norm = (l * r)[0];
        let weight = (tri[(k, k)] * t).exp() * overlap / norm;
        out += r * weight;
    }
    Ok(out)
}
