//! Coupling sweeps, time series and the observables read off them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::evolve_many;
use crate::model::{check_finite, check_finite_real, ModelParams, StateVector};
use crate::numerics::{sqrt_continuous, PathSamples};
use crate::spectral::{discriminant, exceptional_points, EPPair, Spectrum};

/// Eigenvalue paths over a real coupling grid, branch-tracked so that the two
/// labels never swap along the path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub lambdas: Vec<f64>,
    pub e1_path: Vec<Complex64>,
    pub e2_path: Vec<Complex64>,
    /// `None` when the parameters have no finite exceptional points.
    pub ep_pair: Option<EPPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub lambda: Complex64,
    pub psi0: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Z1,
    Z2,
}

impl TimeSeries {
    pub fn amplitudes(&self, component: Component) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| match component {
                Component::Z1 => s.z1.norm(),
                Component::Z2 => s.z2.norm(),
            })
            .collect()
    }
}

/// Widths `Γ_k = −Im E_k` (amplitude envelope `e^{−Γt}`) and the beat frequency
/// `|Re E₁ − Re E₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthBeat {
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta_e: f64,
}

impl WidthBeat {
    /// `(Γ_top, Γ_bottom)`: the narrower resonance (pole nearer the real axis) first.
    pub fn top_bottom(&self) -> (f64, f64) {
        (self.gamma1.min(self.gamma2), self.gamma1.max(self.gamma2))
    }

    /// Beat period `2π/ΔE`.
    pub fn beat_period(&self) -> f64 {
        2.0 * PI / self.delta_e
    }
}

fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + step * k as f64 })
        .collect()
}

/// Eigenvalues of `H(λ)` on `n` uniformly spaced real couplings in `[lo, hi]`.
pub fn trajectory_sweep(params: &ModelParams, lo: f64, hi: f64, n: usize) -> Result<Trajectory> {
    params.validate()?;
    check_finite_real("lo", lo)?;
    check_finite_real("hi", hi)?;
    if lo >= hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sweep needs at least 2 points, got {n}"
        )));
    }

    let lambdas = uniform_grid(lo, hi, n);
    let squares = lambdas
        .iter()
        .map(|&l| discriminant(params, l.into()))
        .collect();
    let roots = sqrt_continuous(&PathSamples::new(squares)?)?;
    let (e1_path, e2_path) = lambdas
        .iter()
        .zip(roots.as_slice())
        .map(|(&l, &d)| {
            let s = Spectrum::from_root(params.mean_energy(l.into()), d);
            (s.e1, s.e2)
        })
        .unzip();
    Ok(Trajectory {
        lambdas,
        e1_path,
        e2_path,
        ep_pair: exceptional_points(params).ok(),
    })
}

/// States at `n` uniformly spaced times in `[0, t_max]`.
pub fn time_series(
    params: &ModelParams,
    lambda: Complex64,
    psi0: StateVector,
    t_max: f64,
    n: usize,
) -> Result<TimeSeries> {
    params.validate()?;
    psi0.validate()?;
    check_finite("lambda", lambda)?;
    check_finite_real("t_max", t_max)?;
    if t_max <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "time series needs at least 2 points, got {n}"
        )));
    }
    let times = uniform_grid(0.0, t_max, n);
    let mut states: Vec<StateVector> = evolve_many(params, lambda, psi0, &times)?
        .into_iter()
        .map(|r| r.state)
        .collect();
    states[0] = psi0;
    Ok(TimeSeries {
        times,
        states,
        lambda,
        psi0,
    })
}

pub fn width_and_beat(spectrum: &Spectrum) -> Result<WidthBeat> {
    check_finite("e1", spectrum.e1)?;
    check_finite("e2", spectrum.e2)?;
    Ok(WidthBeat {
        gamma1: -spectrum.e1.im,
        gamma2: -spectrum.e2.im,
        delta_e: (spectrum.e1.re - spectrum.e2.re).abs(),
    })
}

/// Indices of local maxima: interior samples above their left neighbour and
/// not below their right one, plus the first sample when the series starts
/// out decreasing.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    if values.len() >= 2 && values[0] > values[1] {
        out.push(0);
    }
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] {
            out.push(i);
        }
    }
    out
}

/// Maxima of an amplitude exchange: the interior local maxima, preceded by the
/// starting sample when the series opens with a decrease. A monotone decay
/// has none, since its only maximum is the starting value itself.
pub fn beat_maxima(values: &[f64]) -> Vec<usize> {
    let maxima = local_maxima(values);
    if maxima.iter().all(|&i| i == 0) {
        return Vec::new();
    }
    maxima
}

/// Slope of the least-squares line through `(x, y)`.
fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Damping rate `Γ` of `|z(t)| ~ e^{−Γt}` from simulated data.
///
/// With at least three local maxima the fit runs through `log|z|` at the
/// maxima (beating signal); otherwise the amplitude must decay monotonically
/// over at least ten samples and all of `log|z|` is fitted.
pub fn envelope_fit(series: &TimeSeries, component: Component) -> Result<f64> {
    let amps = series.amplitudes(component);
    if amps.len() != series.times.len() {
        return Err(Error::InvalidArgument(
            "times and states differ in length".into(),
        ));
    }
    let maxima = local_maxima(&amps);
    let points: Vec<(f64, f64)> = if maxima.len() >= 3 {
        maxima
            .iter()
            .map(|&i| (series.times[i], amps[i].ln()))
            .collect()
    } else {
        let monotone = amps.windows(2).all(|w| w[1] <= w[0]);
        if !monotone || amps.len() < 10 {
            return Err(Error::InsufficientData(format!(
                "need at least 3 local maxima or a monotone decay over 10 samples \
                 (found {} maxima, {} samples, monotone: {monotone})",
                maxima.len(),
                amps.len()
            )));
        }
        series
            .times
            .iter()
            .zip(&amps)
            .filter(|(_, &a)| a > 0.0)
            .map(|(&t, &a)| (t, a.ln()))
            .collect()
    };
    if points.len() < 2 {
        return Err(Error::InsufficientData(
            "fewer than two nonzero amplitudes".into(),
        ));
    }
    Ok(-fit_slope(&points))
}
