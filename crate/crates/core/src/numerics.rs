//! Numerical kernels shared by the evolution code and its tests.
//!
//! [`expm_apply`] is a reference propagator: it uses nothing but matrix
//! products and a truncated Taylor series, so it shares no code path with
//! the eigenvalue-based propagators it is used to check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `‖o·t‖₁` is scaled below this before the series is summed.
const SCALING_THRESHOLD: f64 = 0.5;
/// Series terms are summed until they drop below this fraction of the partial sum.
const SERIES_CUTOFF: f64 = 1e-18;
const MAX_SERIES_TERMS: usize = 64;
/// Below this modulus `sinc_c` switches to its Taylor polynomial.
const SINC_TAYLOR_RADIUS: f64 = 1e-4;

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Computes `exp(o·t)·v` by scaling and squaring a truncated Taylor series.
///
/// The trace is split off first (`exp(o t) = exp(tr(o) t / n)·exp((o − tr(o)/n) t)`),
/// which keeps the number of squarings small for the nearly scalar
/// generators that occur near resonance crossings.
pub fn expm_apply(
    o: &DMatrix<Complex64>,
    v: &DVector<Complex64>,
    t: f64,
) -> Result<DVector<Complex64>> {
    let n = o.nrows();
    if n != o.ncols() {
        return Err(Error::NotSquare {
            rows: n,
            cols: o.ncols(),
        });
    }
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if !t.is_finite() || o.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite generator or time".into(),
        ));
    }
    if n == 0 {
        return Ok(v.clone());
    }

    let shift = o.trace() / n as f64;
    let mut a = o * Complex64::from(t);
    for i in 0..n {
        a[(i, i)] -= shift * t;
    }

    let norm = one_norm(&a);
    let squarings = if norm > SCALING_THRESHOLD {
        (norm / SCALING_THRESHOLD).log2().ceil() as i32
    } else {
        0
    };
    a /= Complex64::from(2f64.powi(squarings));

    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=MAX_SERIES_TERMS {
        term = &term * &a / Complex64::from(k as f64);
        sum += &term;
        if one_norm(&term) <= SERIES_CUTOFF * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }

    Ok((sum * v) * (shift * t).exp())
}

/// `sin(z)/z`, continuous through `z = 0`.
pub fn sinc_c(z: Complex64) -> Complex64 {
    if z.norm() < SINC_TAYLOR_RADIUS {
        sinc_taylor(z)
    } else {
        z.sin() / z
    }
}

/// Degree-8 Taylor polynomial of `sin(z)/z`.
pub(crate) fn sinc_taylor(z: Complex64) -> Complex64 {
    let z2 = z * z;
    // 1 − z²/3! + z⁴/5! − z⁶/7! + z⁸/9!
    let mut acc = Complex64::from(1.0 / 362_880.0);
    acc = acc * z2 - 1.0 / 5040.0;
    acc = acc * z2 + 1.0 / 120.0;
    acc = acc * z2 - 1.0 / 6.0;
    acc * z2 + 1.0
}

/// An ordered, non-empty list of finite complex samples along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSamples(Vec<Complex64>);

impl PathSamples {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientData("empty path".into()));
        }
        if let Some(i) = samples
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "path sample {i} is not finite"
            )));
        }
        Ok(Self(samples))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }
}

/// Picks one square root per sample so that the roots vary continuously.
///
/// The first sample gets the principal root. Every later root is the sign
/// choice with non-negative real inner product against the previous nonzero
/// root. A step whose argument jumps by 90° or more (measured on the samples,
/// i.e. 45° or more on the roots) is rejected as too coarse, since the sign
/// choice is then no longer determined by continuity.
pub fn sqrt_continuous(path: &PathSamples) -> Result<PathSamples> {
    let samples = path.as_slice();
    let mut roots = Vec::with_capacity(samples.len());
    let mut prev: Option<Complex64> = None;
    for (i, &x) in samples.iter().enumerate() {
        let mut r = x.sqrt();
        if let Some(p) = prev {
            if r != Complex64::new(0.0, 0.0) {
                let inner = (r * p.conj()).re;
                if inner < 0.0 {
                    r = -r;
                }
                // cos 45° between consecutive roots
                if (r * p.conj()).re < std::f64::consts::FRAC_1_SQRT_2 * r.norm() * p.norm() {
                    return Err(Error::StepTooCoarse { index: i });
                }
            }
        }
        if r != Complex64::new(0.0, 0.0) {
            prev = Some(r);
        }
        roots.push(r);
    }
    Ok(PathSamples(roots))
}
