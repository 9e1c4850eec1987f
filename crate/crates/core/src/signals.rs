//! Source-time models: the deterministic pulse fired with random delays
//! (blended sources), independent stationary Gaussian noise sources, and the
//! frequency grids every spectral integral runs on.

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_on, midpoint_on, splitmix64};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Derive an independent stream seed for one realization of an ensemble.
/// Two mixing rounds keep nearby indices statistically unrelated.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ index.wrapping_mul(0xA076_1D64_78BD_642F)))
}

/// Gaussian-modulated cosine pulse, `f(t) = cos(w0 t) exp(-b^2 t^2 / 2)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Carrier frequency (rad / time).
    pub omega0: f64,
    /// Bandwidth (rad / time); must stay below the carrier.
    pub bandwidth: f64,
}

impl PulseSpec {
    pub fn new(omega0: f64, bandwidth: f64) -> Result<Self> {
        if !(omega0 > 0.0 && bandwidth > 0.0 && bandwidth < omega0) {
            return Err(Error::InvalidArgument(format!(
                "pulse requires 0 < bandwidth < omega0, got omega0 = {omega0}, bandwidth = {bandwidth}"
            )));
        }
        Ok(Self { omega0, bandwidth })
    }

    /// Pulse value at time `t`.
    pub fn value(&self, t: f64) -> f64 {
        let b = self.bandwidth;
        (self.omega0 * t).cos() * (-0.5 * b * b * t * t).exp()
    }

    /// Analytic spectrum with the `f_hat(w) = integral f(t) exp(i w t) dt`
    /// convention: a pair of Gaussians centered at +/- omega0.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let b = self.bandwidth;
        let amp = (2.0 * PI).sqrt() / (2.0 * b);
        let g = |d: f64| (-d * d / (2.0 * b * b)).exp();
        Complex64::new(amp * (g(omega - self.omega0) + g(omega + self.omega0)), 0.0)
    }

    /// Frequency band carrying essentially all pulse energy.
    pub fn band(&self) -> (f64, f64) {
        (self.omega0 - 3.0 * self.bandwidth, self.omega0 + 3.0 * self.bandwidth)
    }
}

/// Spectrum of the pulse (free-function form of [`PulseSpec::spectrum`]).
pub fn pulse_spectrum(pulse: &PulseSpec, omega: f64) -> Complex64 {
    pulse.spectrum(omega)
}

/// Probability law of the random source time delays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DelayModel {
    /// Uniform on `[-tau_max, tau_max]`.
    Uniform { tau_max: f64 },
    /// Piecewise-linear density tabulated on a sorted grid.
    Tabulated { ts: Vec<f64>, ps: Vec<f64> },
}

impl DelayModel {
    pub fn uniform(tau_max: f64) -> Result<Self> {
        if !(tau_max > 0.0) {
            return Err(Error::InvalidArgument("tau_max must be positive".into()));
        }
        Ok(DelayModel::Uniform { tau_max })
    }

    pub fn tabulated(ts: Vec<f64>, ps: Vec<f64>) -> Result<Self> {
        if ts.len() != ps.len() || ts.len() < 2 {
            return Err(Error::InvalidArgument("tabulated pdf needs matching grids, len >= 2".into()));
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("tabulated grid must be strictly increasing".into()));
        }
        if ps.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidArgument("pdf values must be finite and nonnegative".into()));
        }
        let model = DelayModel::Tabulated { ts, ps };
        let total = model.trapezoid(|t, p| p * 1.0 + 0.0 * t);
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "tabulated pdf must integrate to 1, got {total}"
            )));
        }
        let mean = model.trapezoid(|t, p| t * p);
        if mean.abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "delay law must have zero mean, got {mean}"
            )));
        }
        Ok(model)
    }

    fn trapezoid(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        match self {
            DelayModel::Uniform { .. } => unreachable!(),
            DelayModel::Tabulated { ts, ps } => ts
                .windows(2)
                .zip(ps.windows(2))
                .map(|(t, p)| 0.5 * (t[1] - t[0]) * (f(t[0], p[0]) + f(t[1], p[1])))
                .sum(),
        }
    }

    /// Largest delay magnitude the law can produce.
    pub fn tau_max(&self) -> f64 {
        match self {
            DelayModel::Uniform { tau_max } => *tau_max,
            DelayModel::Tabulated { ts, .. } => ts[0].abs().max(ts[ts.len() - 1].abs()),
        }
    }

    /// Statistical-stability time `(integral of pdf^2)^{-1}`; equal to
    /// `2 tau_max` for the uniform law, which maximizes it among laws
    /// supported on `[-tau_max, tau_max]`.
    pub fn t_tau(&self) -> Result<f64> {
        match self {
            DelayModel::Uniform { tau_max } => Ok(2.0 * tau_max),
            DelayModel::Tabulated { .. } => {
                let sq = self.trapezoid(|_, p| p * p);
                if sq <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "pdf with zero square integral has no stability time".into(),
                    ));
                }
                Ok(1.0 / sq)
            }
        }
    }

    /// Draw `n` i.i.d. delays; deterministic for a fixed seed.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            DelayModel::Uniform { tau_max } => {
                (0..n).map(|_| rng.gen_range(-tau_max..=*tau_max)).collect()
            }
            DelayModel::Tabulated { ts, ps } => {
                // Inverse-CDF sampling on the piecewise-linear density.
                let mut cdf = vec![0.0];
                for (t, p) in ts.windows(2).zip(ps.windows(2)) {
                    let seg = 0.5 * (t[1] - t[0]) * (p[0] + p[1]);
                    cdf.push(cdf.last().unwrap() + seg);
                }
                let total = *cdf.last().unwrap();
                (0..n)
                    .map(|_| {
                        let u: f64 = rng.gen::<f64>() * total;
                        let k = match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                            Ok(k) => k.min(ts.len() - 2),
                            Err(k) => k.saturating_sub(1).min(ts.len() - 2),
                        };
                        let frac = (u - cdf[k]) / (cdf[k + 1] - cdf[k]).max(1e-300);
                        ts[k] + frac * (ts[k + 1] - ts[k])
                    })
                    .collect()
            }
        }
    }
}

/// Free-function form of [`DelayModel::t_tau`].
pub fn t_tau(model: &DelayModel) -> Result<f64> {
    model.t_tau()
}

/// Free-function form of [`DelayModel::sample`].
pub fn sample_delays(model: &DelayModel, n_sources: usize, seed: u64) -> Vec<f64> {
    model.sample(n_sources, seed)
}

/// Power spectrum shape of the stationary noise sources. All shapes are
/// nonnegative by construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum SpectrumSpec {
    /// `exp(-(|w| - omega0)^2 / b^2)`: a band mirroring the pulse's.
    GaussianBand { omega0: f64, bandwidth: f64 },
    /// Constant level on `[lo, hi]` (and its mirror image), zero outside.
    FlatBand { lo: f64, hi: f64, level: f64 },
}

impl SpectrumSpec {
    /// Power spectral density at `omega` (even in `omega`).
    pub fn density(&self, omega: f64) -> f64 {
        match *self {
            SpectrumSpec::GaussianBand { omega0, bandwidth } => {
                let d = omega.abs() - omega0;
                (-d * d / (bandwidth * bandwidth)).exp()
            }
            SpectrumSpec::FlatBand { lo, hi, level } => {
                let a = omega.abs();
                if a >= lo && a <= hi {
                    level
                } else {
                    0.0
                }
            }
        }
    }

    /// Band outside which the density is negligible.
    pub fn band(&self) -> (f64, f64) {
        match *self {
            SpectrumSpec::GaussianBand { omega0, bandwidth } => {
                ((omega0 - 6.0 * bandwidth).max(0.0), omega0 + 6.0 * bandwidth)
            }
            SpectrumSpec::FlatBand { lo, hi, .. } => (lo, hi),
        }
    }
}

/// Zero-mean stationary Gaussian source model with a common power spectrum
/// and a recording duration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StationaryNoiseModel {
    pub spectrum: SpectrumSpec,
    /// Recording duration T.
    pub duration: f64,
}

impl StationaryNoiseModel {
    pub fn new(spectrum: SpectrumSpec, duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::InvalidArgument("duration must be positive".into()));
        }
        if let SpectrumSpec::FlatBand { lo, hi, level } = spectrum {
            if !(0.0 <= lo && lo < hi && level >= 0.0) {
                return Err(Error::InvalidArgument("flat band requires 0 <= lo < hi, level >= 0".into()));
            }
        }
        Ok(Self { spectrum, duration })
    }

    /// Autocorrelation `F(lag) = (1/2pi) integral density(w) exp(-i w lag) dw`,
    /// evaluated by band quadrature (the density is even, so this is real).
    pub fn autocorrelation(&self, lag: f64) -> f64 {
        let (lo, hi) = self.spectrum.band();
        let (xs, ws) = gauss_legendre_on(lo, hi, 200);
        // Even density: integral over the real line = 2 * integral over the
        // positive band of density * cos(w * lag).
        let half: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(&w, &wt)| wt * self.spectrum.density(w) * (w * lag).cos())
            .sum();
        half / PI
    }

    /// One realization of the process sampled at step `dt`, length
    /// `ceil(duration / dt)`.
    ///
    /// Spectral synthesis: independent complex Gaussian amplitudes with
    /// variance proportional to the density, Hermitian symmetry, inverse
    /// transform. The ensemble autocorrelation of the output is `F`.
    pub fn synthesize(&self, dt: f64, seed: u64) -> Result<Vec<f64>> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let (_, hi) = self.spectrum.band();
        if PI / dt <= hi {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} does not resolve the spectrum (Nyquist {} <= band top {hi})",
                PI / dt
            )));
        }
        let n = (self.duration / dt).ceil() as usize;
        if n < 2 {
            return Err(Error::InvalidArgument("duration must cover at least two samples".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        let d_omega = 2.0 * PI / (n as f64 * dt);
        // Bin variance N * density / dt makes the inverse DFT (1/N sum)
        // reproduce the target autocorrelation.
        let scale = |k: usize| (n as f64 * self.spectrum.density(k as f64 * d_omega) / dt).sqrt();
        for k in 1..(n + 1) / 2 {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            let v = Complex64::new(a, b) * (0.5f64).sqrt() * scale(k);
            spec[k] = v;
            spec[n - k] = v.conj();
        }
        let g0: f64 = StandardNormal.sample(&mut rng);
        spec[0] = Complex64::new(g0 * scale(0), 0.0);
        if n % 2 == 0 {
            let gn: f64 = StandardNormal.sample(&mut rng);
            spec[n / 2] = Complex64::new(gn * scale(n / 2), 0.0);
        }
        let mut planner = FftPlanner::new();
        let ifft = planner.plan_fft_inverse(n);
        ifft.process(&mut spec);
        Ok(spec.iter().map(|c| c.re / n as f64).collect())
    }
}

/// Free-function form of [`StationaryNoiseModel::synthesize`].
pub fn synthesize_stationary(m: &StationaryNoiseModel, dt: f64, seed: u64) -> Result<Vec<f64>> {
    m.synthesize(dt, seed)
}

/// Positive-frequency grid with quadrature weights for band integrals.
/// Negative-frequency contributions are folded in by reality symmetry at the
/// call sites.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omegas: Vec<f64>,
    pub weights: Vec<f64>,
    /// Uniform spacing when the grid is equispaced (enables fast phase
    /// recurrences in the hot loops).
    pub step: Option<f64>,
}

impl FrequencyGrid {
    fn validate(omegas: &[f64]) -> Result<()> {
        if omegas.is_empty() {
            return Err(Error::InvalidArgument("frequency grid is empty".into()));
        }
        if omegas[0] <= 0.0 {
            return Err(Error::InvalidArgument("frequency grid must be strictly positive".into()));
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("frequency grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Gauss-Legendre nodes on `[lo, hi]`.
    pub fn gauss_legendre(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let (omegas, weights) = gauss_legendre_on(lo, hi, n);
        Self::validate(&omegas)?;
        Ok(Self { omegas, weights, step: None })
    }

    /// Midpoint nodes on `[lo, hi]`; uniform spacing.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let (omegas, weights) = midpoint_on(lo, hi, n);
        Self::validate(&omegas)?;
        let step = (hi - lo) / n as f64;
        Ok(Self { omegas, weights, step: Some(step) })
    }

    /// DFT bins `2 pi k / total_time` restricted to `[lo, hi]`, each with
    /// weight `2 pi / total_time`. The natural grid for signals recorded
    /// over a window of length `total_time`.
    pub fn dft(total_time: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(total_time > 0.0) {
            return Err(Error::InvalidArgument("total_time must be positive".into()));
        }
        let d = 2.0 * PI / total_time;
        let k_lo = (lo / d).ceil().max(1.0) as u64;
        let k_hi = (hi / d).floor() as u64;
        if k_hi < k_lo {
            return Err(Error::InvalidArgument("band holds no DFT bins at this record length".into()));
        }
        let omegas: Vec<f64> = (k_lo..=k_hi).map(|k| k as f64 * d).collect();
        let weights = vec![d; omegas.len()];
        Self::validate(&omegas)?;
        Ok(Self { omegas, weights, step: Some(d) })
    }

    /// Default band grid for a pulse: 33 Gauss-Legendre nodes covering
    /// three bandwidths either side of the carrier.
    pub fn pulse_band(pulse: &PulseSpec) -> Result<Self> {
        let (lo, hi) = pulse.band();
        Self::gauss_legendre(lo.max(1e-12), hi, 33)
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn max_omega(&self) -> f64 {
        *self.omegas.last().unwrap()
    }

    /// Band quadrature of `f` over the stored (positive) grid.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.omegas
            .iter()
            .zip(&self.weights)
            .map(|(&w, &wt)| wt * f(w))
            .sum()
    }
}

/// Number of uniform grid nodes needed so trapezoid-type band sums resolve
/// delay-phase factors `exp(i w dtau)` with `|dtau| <= max_delay_spread`,
/// at `samples_per_period` nodes per oscillation period.
pub fn resolved_node_count(
    band_lo: f64,
    band_hi: f64,
    max_delay_spread: f64,
    samples_per_period: f64,
) -> usize {
    let width = band_hi - band_lo;
    ((width * max_delay_spread * samples_per_period / (2.0 * PI)).ceil() as usize).max(65)
}
