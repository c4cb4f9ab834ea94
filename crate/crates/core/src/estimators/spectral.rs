//! Risk spectra and their discretisation into order-statistic weights.

use crate::error::{Result, RiskError};
use crate::quad::integrate;
use crate::weights::WeightVector;

/// Per-cell absolute quadrature tolerance.
pub const CELL_TOL: f64 = 1e-10;

const GRID: usize = 1000;

/// A non-negative, non-increasing function on `(0, 1]` with unit integral.
pub trait Spectrum: Send + Sync {
    fn density(&self, t: f64) -> f64;

    /// `sup_t phi(t)`; for a non-increasing spectrum this is the value at `0+`.
    fn sup_norm(&self) -> f64 {
        self.density(f64::MIN_POSITIVE)
    }

    /// Closed-form `int_0^t phi`, when known.
    fn cumulative(&self, _t: f64) -> Option<f64> {
        None
    }

    /// Closed-form cell integrals `int_{(i-1)/n}^{i/n} phi`, when known.
    fn cell_weights(&self, _n: usize) -> Option<Vec<f64>> {
        None
    }

    fn name(&self) -> String;

    /// `int_a^b phi`, in closed form where possible.
    fn integral(&self, a: f64, b: f64) -> f64 {
        match (self.cumulative(a), self.cumulative(b)) {
            (Some(ca), Some(cb)) => cb - ca,
            _ => integrate(|t| self.density(t), a, b, CELL_TOL),
        }
    }
}

/// The ES spectrum `(1/alpha) 1{t <= alpha}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsSpectrum {
    pub alpha: f64,
}

impl EsSpectrum {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(RiskError::InvalidSpectrum(format!("alpha must lie in (0,1], got {alpha}")));
        }
        Ok(Self { alpha })
    }
}

impl Spectrum for EsSpectrum {
    fn density(&self, t: f64) -> f64 {
        if t <= self.alpha {
            1.0 / self.alpha
        } else {
            0.0
        }
    }

    fn sup_norm(&self) -> f64 {
        1.0 / self.alpha
    }

    fn cumulative(&self, t: f64) -> Option<f64> {
        Some(t.clamp(0.0, self.alpha) / self.alpha)
    }

    fn cell_weights(&self, n: usize) -> Option<Vec<f64>> {
        // Cell i carries (clamp(alpha n - (i-1), 0, 1)) / (alpha n).
        let an = self.alpha * n as f64;
        Some(
            (0..n)
                .map(|i| {
                    let covered = (an - i as f64).clamp(0.0, 1.0);
                    if covered == 1.0 {
                        1.0 / an
                    } else {
                        covered / an
                    }
                })
                .collect(),
        )
    }

    fn name(&self) -> String {
        format!("es({})", self.alpha)
    }
}

/// `phi = 1`: the negative mean.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSpectrum;

impl Spectrum for UniformSpectrum {
    fn density(&self, _t: f64) -> f64 {
        1.0
    }

    fn cumulative(&self, t: f64) -> Option<f64> {
        Some(t.clamp(0.0, 1.0))
    }

    fn cell_weights(&self, n: usize) -> Option<Vec<f64>> {
        Some(vec![1.0 / n as f64; n])
    }

    fn name(&self) -> String {
        "uniform".into()
    }
}

/// `phi(t) = 2 (1 - t)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearSpectrum;

impl Spectrum for LinearSpectrum {
    fn density(&self, t: f64) -> f64 {
        2.0 * (1.0 - t)
    }

    fn sup_norm(&self) -> f64 {
        2.0
    }

    fn cumulative(&self, t: f64) -> Option<f64> {
        let t = t.clamp(0.0, 1.0);
        Some(2.0 * t - t * t)
    }

    fn name(&self) -> String {
        "linear".into()
    }
}

/// A spectrum given by an arbitrary closure; integrals use quadrature.
pub struct FnSpectrum<F> {
    name: String,
    sup: f64,
    f: F,
}

impl<F: Fn(f64) -> f64 + Send + Sync> FnSpectrum<F> {
    pub fn new(name: impl Into<String>, sup: f64, f: F) -> Self {
        Self { name: name.into(), sup, f }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> Spectrum for FnSpectrum<F> {
    fn density(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn sup_norm(&self) -> f64 {
        self.sup
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Checks non-negativity and monotonicity on a grid and the unit integral.
pub fn validate_spectrum<S: Spectrum + ?Sized>(spectrum: &S) -> Result<()> {
    let mut prev = f64::INFINITY;
    for k in 1..=GRID {
        let t = k as f64 / GRID as f64;
        let v = spectrum.density(t);
        if !v.is_finite() || v < 0.0 {
            return Err(RiskError::InvalidSpectrum(format!(
                "{}: phi({t}) = {v} is not a finite non-negative value",
                spectrum.name()
            )));
        }
        if v > prev + 1e-12 * prev.abs().max(1.0) {
            return Err(RiskError::InvalidSpectrum(format!(
                "{}: phi increases at t = {t}",
                spectrum.name()
            )));
        }
        prev = v;
    }
    let total = spectrum.integral(0.0, 1.0);
    if (total - 1.0).abs() > 1e-8 {
        return Err(RiskError::InvalidSpectrum(format!(
            "{}: integral is {total}, expected 1",
            spectrum.name()
        )));
    }
    Ok(())
}

/// Plug-in weights `a_i = int_{(i-1)/n}^{i/n} phi`.
pub fn build_spectral_weights<S: Spectrum + ?Sized>(spectrum: &S, n: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(RiskError::InvalidParameter("sample size must be at least 1".into()));
    }
    validate_spectrum(spectrum)?;
    let mut w = match spectrum.cell_weights(n) {
        Some(w) => w,
        None => {
            let nf = n as f64;
            (1..=n)
                .map(|i| spectrum.integral((i - 1) as f64 / nf, i as f64 / nf).max(0.0))
                .collect()
        }
    };
    finish(&mut w)
}

/// Pointwise weights `a_i = phi(i/n) / sum_k phi(k/n)`.
pub fn build_spectral_weights_alt<S: Spectrum + ?Sized>(spectrum: &S, n: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(RiskError::InvalidParameter("sample size must be at least 1".into()));
    }
    validate_spectrum(spectrum)?;
    let nf = n as f64;
    let mut w: Vec<f64> = (1..=n).map(|i| spectrum.density(i as f64 / nf)).collect();
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(RiskError::InvalidSpectrum(format!(
            "{}: spectrum vanishes on the grid i/{n}",
            spectrum.name()
        )));
    }
    for v in &mut w {
        *v /= total;
    }
    finish(&mut w)
}

fn finish(w: &mut Vec<f64>) -> Result<WeightVector> {
    // Quadrature noise must not break monotonicity.
    for i in 1..w.len() {
        if w[i] > w[i - 1] {
            w[i] = w[i - 1];
        }
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(RiskError::InvalidSpectrum(format!("discretised weights sum to {sum}")));
    }
    if (sum - 1.0).abs() > crate::weights::WEIGHT_SUM_TOL {
        for v in w.iter_mut() {
            *v /= sum;
        }
    }
    WeightVector::monotone(std::mem::take(w))
}
