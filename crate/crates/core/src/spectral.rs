//! Closed-form spectrum of the 2×2 model.
//!
//! The eigenvalues are `E₁ = mean − d/2`, `E₂ = mean + d/2` where `d` is a
//! square root of the discriminant
//!
//! ```text
//! d² = (ω₁−ω₂+λ(ε₁−ε₂))² + 4λ²δ² = CC·(λ−EP1)(λ−EP2),   CC = 4δ² + (ε₁−ε₂)².
//! ```
//!
//! Single-point queries use the principal root; sweeps track the branch
//! along the path (see [`crate::sweep::trajectory_sweep`]). The labels `E₁`,
//! `E₂` therefore follow the root, not a physical ordering.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{check_finite, check_finite_real, rotated_hamiltonian, ModelParams};

/// Relative distance (to `|EP1|+|EP2|`) below which `λ` counts as sitting on an EP.
pub const EP_RELATIVE_TOLERANCE: f64 = 1e-8;

/// Absolute tolerance in `λ` of the golden-section refinement in [`critical_lambda`].
pub const CRITICAL_LAMBDA_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub e1: Complex64,
    pub e2: Complex64,
    /// Discriminant root, `e2 − e1`.
    pub d: Complex64,
    /// Half the trace.
    pub mean: Complex64,
}

impl Spectrum {
    pub(crate) fn from_root(mean: Complex64, d: Complex64) -> Self {
        Self {
            e1: mean - 0.5 * d,
            e2: mean + 0.5 * d,
            d,
            mean,
        }
    }
}

/// Which of the two exceptional points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Ep1,
    Ep2,
}

impl Branch {
    pub fn other(self) -> Self {
        match self {
            Branch::Ep1 => Branch::Ep2,
            Branch::Ep2 => Branch::Ep1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EPPair {
    pub ep1: Complex64,
    pub ep2: Complex64,
    /// Leading coefficient of the discriminant as a polynomial in `λ`.
    pub cc: Complex64,
}

impl EPPair {
    pub fn get(&self, branch: Branch) -> Complex64 {
        match branch {
            Branch::Ep1 => self.ep1,
            Branch::Ep2 => self.ep2,
        }
    }

    /// `λ` closer than this to an EP is treated as sitting on it.
    pub fn tolerance(&self) -> f64 {
        EP_RELATIVE_TOLERANCE * (self.ep1.norm() + self.ep2.norm())
    }

    /// The closer EP and its distance from `lambda`.
    pub fn nearest(&self, lambda: Complex64) -> (Branch, f64) {
        let d1 = (lambda - self.ep1).norm();
        let d2 = (lambda - self.ep2).norm();
        if d1 <= d2 {
            (Branch::Ep1, d1)
        } else {
            (Branch::Ep2, d2)
        }
    }
}

/// Eigenvectors in the observational basis, unnormalised, with their c-norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub spectrum: Spectrum,
    pub v1: [Complex64; 2],
    pub v2: [Complex64; 2],
    /// `√(v1·v1)` under the bilinear product; vanishes at an EP.
    pub n1: Complex64,
    pub n2: Complex64,
}

impl EigenSystem {
    pub fn normalized(&self) -> ([Complex64; 2], [Complex64; 2]) {
        (
            [self.v1[0] / self.n1, self.v1[1] / self.n1],
            [self.v2[0] / self.n2, self.v2[1] / self.n2],
        )
    }
}

/// `CC = 4δ² + (ε₁−ε₂)²`
pub fn discriminant_coefficient(params: &ModelParams) -> Complex64 {
    let de = params.epsilon_diff();
    4.0 * params.delta * params.delta + de * de
}

/// `d² = (ω₁−ω₂+λ(ε₁−ε₂))² + 4λ²δ²`
pub fn discriminant(params: &ModelParams, lambda: Complex64) -> Complex64 {
    let detuning = params.detuning(lambda);
    let coupling = lambda * params.delta;
    detuning * detuning + 4.0 * coupling * coupling
}

/// Eigenvalues of `H(λ)` using the principal discriminant root.
pub fn eigenvalues(params: &ModelParams, lambda: Complex64) -> Result<Spectrum> {
    params.validate()?;
    check_finite("lambda", lambda)?;
    Ok(Spectrum::from_root(
        params.mean_energy(lambda),
        discriminant(params, lambda).sqrt(),
    ))
}

/// The two couplings at which `d² = 0`.
///
/// `EP1 = i(ω₁−ω₂)/(−2δ − i(ε₁−ε₂))`, `EP2 = i(ω₁−ω₂)/(2δ − i(ε₁−ε₂))`;
/// `δ → −δ` swaps them.
pub fn exceptional_points(params: &ModelParams) -> Result<EPPair> {
    params.validate()?;
    let cc = discriminant_coefficient(params);
    let i = Complex64::i();
    let de = params.epsilon_diff();
    let den1 = -2.0 * params.delta - i * de;
    let den2 = 2.0 * params.delta - i * de;
    // CC = −den1·den2, so CC ≠ 0 iff both denominators are nonzero.
    if cc == Complex64::new(0.0, 0.0)
        || den1 == Complex64::new(0.0, 0.0)
        || den2 == Complex64::new(0.0, 0.0)
    {
        return Err(Error::DegenerateParameters);
    }
    let num = i * params.omega_diff();
    Ok(EPPair {
        ep1: num / den1,
        ep2: num / den2,
        cc,
    })
}

/// Bilinear product `u₁v₁ + u₂v₂` (no conjugation).
pub fn c_product(u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1]
}

/// Distance from `lambda` to the nearest EP, when it is inside the EP tolerance.
pub(crate) fn defective_distance(
    params: &ModelParams,
    lambda: Complex64,
) -> Option<(Branch, f64, f64)> {
    let pair = exceptional_points(params).ok()?;
    let (branch, distance) = pair.nearest(lambda);
    let tolerance = pair.tolerance();
    (distance <= tolerance).then_some((branch, distance, tolerance))
}

/// Right eigenvectors of the observational Hamiltonian `R H Rᵀ`.
///
/// With `g = λδ`, `Δ = ω₁−ω₂+λ(ε₁−ε₂)` and `d = e2 − e1`:
///
/// ```text
/// v1 = (d + 2g, −Δ)   for e1
/// v2 = (d − 2g,  Δ)   for e2
/// ```
///
/// Both are scaled to unit Euclidean norm. Under `δ → −δ` the two swap up to
/// the reflection `diag(1, −1)`. The unscaled squared c-norm is
/// `2d(d + 2g)`, so `|n1| ~ |λ − EP|^{1/4}` near an EP.
pub fn eigenvectors(params: &ModelParams, lambda: Complex64) -> Result<EigenSystem> {
    let spectrum = eigenvalues(params, lambda)?;
    if let Some((_, distance, tolerance)) = defective_distance(params, lambda) {
        return Err(Error::DefectiveSpectrum {
            distance,
            tolerance,
        });
    }
    let d = spectrum.d;
    let g = lambda * params.delta;
    let detuning = params.detuning(lambda);
    if exceptional_points(params).is_err() {
        // No EP pair to measure against; fall back to the size of the splitting.
        let scale = spectrum.mean.norm() + detuning.norm() + g.norm();
        if d.norm() <= EP_RELATIVE_TOLERANCE * scale {
            return Err(Error::DefectiveSpectrum {
                distance: d.norm(),
                tolerance: EP_RELATIVE_TOLERANCE * scale,
            });
        }
    }

    let scale = d.norm() + g.norm() + detuning.norm();
    let mut v1 = [d + 2.0 * g, -detuning];
    let mut v2 = [d - 2.0 * g, detuning];
    // Both entries of the primary form vanish when Δ = 0 and d = ∓2g; use the
    // row-one form of the eigen-equation there instead.
    if v1[0].norm().max(v1[1].norm()) <= 1e-12 * scale {
        v1 = [detuning, 2.0 * g - d];
    }
    if v2[0].norm().max(v2[1].norm()) <= 1e-12 * scale {
        v2 = [detuning, 2.0 * g + d];
    }
    let v1 = unit(v1);
    let v2 = unit(v2);
    Ok(EigenSystem {
        spectrum,
        v1,
        v2,
        n1: c_product(v1, v1).sqrt(),
        n2: c_product(v2, v2).sqrt(),
    })
}

fn unit(v: [Complex64; 2]) -> [Complex64; 2] {
    let n = v[0].norm().hypot(v[1].norm());
    [v[0] / n, v[1] / n]
}

/// Residual `‖H v − E v‖ / ‖v‖` against the observational Hamiltonian.
pub fn eigen_residual(
    params: &ModelParams,
    lambda: Complex64,
    e: Complex64,
    v: [Complex64; 2],
) -> Result<f64> {
    let h = rotated_hamiltonian(params, lambda)?;
    let hv = h.apply(v);
    let r0 = hv[0] - e * v[0];
    let r1 = hv[1] - e * v[1];
    let vn = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    Ok((r0.norm_sqr() + r1.norm_sqr()).sqrt() / vn)
}

/// `max(Im E₁, Im E₂)` for real `λ`: the height of the resonance pole nearest the real axis.
fn top_pole_height(params: &ModelParams, lambda: f64) -> f64 {
    let l = Complex64::from(lambda);
    params.mean_energy(l).im + 0.5 * discriminant(params, l).sqrt().im.abs()
}

/// Real `λ ∈ [lo, hi]` where a resonance pole comes closest to the real axis.
///
/// A uniform scan over `grid` points brackets the maximum of
/// `max(Im E₁, Im E₂)`; golden-section search then refines it to
/// [`CRITICAL_LAMBDA_TOLERANCE`].
pub fn critical_lambda(params: &ModelParams, lo: f64, hi: f64, grid: usize) -> Result<f64> {
    params.validate()?;
    check_finite_real("lo", lo)?;
    check_finite_real("hi", hi)?;
    if lo >= hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if grid < 3 {
        return Err(Error::InvalidArgument(format!(
            "grid must be at least 3, got {grid}"
        )));
    }

    let step = (hi - lo) / (grid - 1) as f64;
    let at = |k: usize| {
        if k + 1 == grid {
            hi
        } else {
            lo + step * k as f64
        }
    };
    let best = (0..grid)
        .map(|k| (k, top_pole_height(params, at(k))))
        .fold((0, f64::NEG_INFINITY), |acc, cur| {
            if cur.1 > acc.1 {
                cur
            } else {
                acc
            }
        })
        .0;

    let mut a = at(best.saturating_sub(1));
    let mut b = at((best + 1).min(grid - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = top_pole_height(params, x1);
    let mut f2 = top_pole_height(params, x2);
    while b - a > CRITICAL_LAMBDA_TOLERANCE {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = top_pole_height(params, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = top_pole_height(params, x1);
        }
    }

    // Keep an endpoint when the refined interior point does not beat it.
    let mid = 0.5 * (a + b);
    let candidates = [mid, at(best)];
    Ok(candidates
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |acc, x| {
            let f = top_pole_height(params, x);
            if f > acc.1 {
                (x, f)
            } else {
                acc
            }
        })
        .0)
}
