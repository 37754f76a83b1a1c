//! Jordan-form propagation for defective generators.
//!
//! For `dχ/dt = O χ` with `O = S J S⁻¹`, the Jordan coordinates `ξ = S⁻¹χ`
//! evolve block by block: component `m` of a size-`k` block with eigenvalue
//! `E` is
//!
//! ```text
//! ξ_m(t) = e^{E t} Σ_{j=m}^{k−1} t^{j−m}/(j−m)! · C_j
//! ```
//!
//! which for a 2-block is `((C₁ + t C₂) e^{Et}, C₂ e^{Et})`. The second column
//! of `S` in a 2-block is an associate vector: `(O − E)φ_assoc = φ_EP`.
//!
//! Only the 2×2 decomposition is computed here. Larger generators must come
//! with their block structure and basis, as a black-box numerical Jordan form
//! is ill-posed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Matrix2;

/// Default relative eigenvalue gap below which a 2×2 generator counts as defective.
pub const DEFAULT_DEFECT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
}

/// Jordan block structure in the order the blocks appear along the diagonal of `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec(Vec<JordanBlock>);

impl BlockSpec {
    pub fn new(blocks: Vec<JordanBlock>) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| b.size == 0) {
            return Err(Error::InvalidArgument(format!(
                "Jordan block for eigenvalue {} has size 0",
                b.eigenvalue
            )));
        }
        Ok(Self(blocks))
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.iter().map(|b| b.size).sum()
    }

    /// The block-diagonal matrix `J`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut j = DMatrix::zeros(n, n);
        let mut offset = 0;
        for b in &self.0 {
            for m in 0..b.size {
                j[(offset + m, offset + m)] = b.eigenvalue;
                if m + 1 < b.size {
                    j[(offset + m, offset + m + 1)] = Complex64::new(1.0, 0.0);
                }
            }
            offset += b.size;
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanForm {
    /// Basis change; columns `(φ_EP, φ_assoc, …)`.
    pub s: DMatrix<Complex64>,
    pub j: DMatrix<Complex64>,
    pub e_ep: Complex64,
    pub phi_ep: DVector<Complex64>,
    pub phi_assoc: DVector<Complex64>,
}

impl JordanForm {
    pub fn blocks(&self) -> BlockSpec {
        BlockSpec(vec![JordanBlock {
            eigenvalue: self.e_ep,
            size: 2,
        }])
    }

    /// `‖S J S⁻¹ − O‖_F`
    pub fn reconstruction_residual(&self, o: &DMatrix<Complex64>) -> Result<f64> {
        let inv = self.s.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        Ok((&self.s * &self.j * inv - o).norm())
    }

    /// `‖(O − E)φ_assoc − φ_EP‖_F`
    pub fn associate_residual(&self, o: &DMatrix<Complex64>) -> f64 {
        (shifted(o, self.e_ep) * &self.phi_assoc - &self.phi_ep).norm()
    }
}

fn shifted(o: &DMatrix<Complex64>, e: Complex64) -> DMatrix<Complex64> {
    let mut a = o.clone();
    for i in 0..a.nrows() {
        a[(i, i)] -= e;
    }
    a
}

fn square_dim(m: &DMatrix<Complex64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// `O = −i H`, turning `i ∂ₜψ = Hψ` into `dψ/dt = Oψ`.
pub fn schrodinger_generator(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    h * Complex64::new(0.0, -1.0)
}

/// Minimum-norm solution of `(O − E) x = φ_EP`.
///
/// The solution is unique up to adding multiples of the kernel of `O − E`,
/// which is spanned by `φ_EP` when the rank deficiency is one; the
/// minimum-norm choice is the one orthogonal to it.
pub fn associate_vector(
    o: &DMatrix<Complex64>,
    e_ep: Complex64,
    phi_ep: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    let n = square_dim(o)?;
    if phi_ep.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phi_ep.len(),
        });
    }
    let a = shifted(o, e_ep);
    let scale = o.norm().max(e_ep.norm()).max(f64::MIN_POSITIVE);
    let cutoff = DEFAULT_DEFECT_TOLERANCE * scale;

    let svd = a.clone().svd(true, true);
    let deficiency = svd.singular_values.iter().filter(|&&s| s <= cutoff).count();
    if deficiency != 1 {
        return Err(Error::Rank(format!(
            "O − E has rank deficiency {deficiency}, expected exactly 1"
        )));
    }
    if (&a * phi_ep).norm() > cutoff * phi_ep.norm() {
        return Err(Error::Rank("φ_EP is not in the kernel of O − E".into()));
    }
    let x = svd
        .solve(phi_ep, cutoff)
        .map_err(|e| Error::Rank(e.to_string()))?;
    let residual = (&a * &x - phi_ep).norm();
    if residual > 1e-8 * (scale * x.norm() + phi_ep.norm()) {
        return Err(Error::Rank(format!(
            "φ_EP is not in the range of O − E (residual {residual:.3e})"
        )));
    }
    Ok(x)
}

/// Jordan decomposition of a defective 2×2 generator.
///
/// The eigenvalues must coincide to within `tolerance·‖o‖`. The eigenvector is
/// the larger column of the nilpotent part `o − E·I`, and the associate vector is
/// the minimum-norm solution of `(o − E)φ_assoc = φ_EP`, built directly from
/// the unit vector that picks out that column.
pub fn jordan_decompose_2x2(o: &Matrix2, tolerance: f64) -> Result<JordanForm> {
    if !o.is_finite() || !tolerance.is_finite() || tolerance < 0.0 {
        return Err(Error::InvalidArgument(
            "non-finite matrix or tolerance".into(),
        ));
    }
    let e_ep = 0.5 * o.trace();
    let nilpotent = *o - Matrix2::diag(e_ep, e_ep);
    let scale = o.norm();
    let threshold = tolerance * scale;
    if nilpotent.norm() <= threshold {
        return Err(Error::DiagonalDegenerate);
    }
    // eigenvalues are E ± √(−det N)
    let gap = 2.0 * (-nilpotent.det()).sqrt().norm();
    if gap > threshold {
        return Err(Error::NotDefective { gap, threshold });
    }

    let col1 = [nilpotent.a11, nilpotent.a21];
    let col2 = [nilpotent.a12, nilpotent.a22];
    let norm = |v: [Complex64; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let (phi, k) = if norm(col2) >= norm(col1) {
        (col2, 1)
    } else {
        (col1, 0)
    };
    let phi_ep = DVector::from_column_slice(&phi);

    // φ is column k of N, so N·e_k = φ exactly; removing the φ component gives
    // the minimum-norm solution. This avoids a rank decision on a matrix that
    // is only defective to rounding.
    let mut phi_assoc = DVector::<Complex64>::zeros(2);
    phi_assoc[k] = Complex64::new(1.0, 0.0);
    let overlap = phi[k].conj() / phi_ep.norm_squared();
    phi_assoc -= &phi_ep * overlap;
    let s = DMatrix::from_columns(&[phi_ep.clone(), phi_assoc.clone()]);
    let j = DMatrix::from_row_slice(
        2,
        2,
        &[
            e_ep,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            e_ep,
        ],
    );
    Ok(JordanForm {
        s,
        j,
        e_ep,
        phi_ep,
        phi_assoc,
    })
}

/// Propagates `c0` under the generator `S J S⁻¹` with `J` given by `blocks`.
pub fn evolve_jordan(
    blocks: &BlockSpec,
    s: &DMatrix<Complex64>,
    c0: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    let n = square_dim(s)?;
    if blocks.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: blocks.dim(),
        });
    }
    if c0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c0.len(),
        });
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t is not finite: {t}")));
    }

    let lu = s.clone().lu();
    let coords = lu.solve(c0).ok_or(Error::SingularMatrix)?;
    if coords
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::SingularMatrix);
    }

    let mut xi = DVector::<Complex64>::zeros(n);
    let mut offset = 0;
    for block in blocks.blocks() {
        let growth = (block.eigenvalue * t).exp();
        for m in 0..block.size {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut coeff = 1.0; // t^{j−m}/(j−m)!
            for j in m..block.size {
                acc += coords[offset + j] * coeff;
                coeff *= t / (j - m + 1) as f64;
            }
            xi[offset + m] = acc * growth;
        }
        offset += block.size;
    }
    Ok(s * xi)
}
