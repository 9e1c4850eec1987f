//! Born-approximation forward modeling: synthesize the recorded data vector
//! in the frequency domain for a given perturbation and source realization.
//!
//! All modeling runs on a positive-frequency band grid; real time traces are
//! reconstructed only for diagnostics and the correlation-form imaging path.

use crate::error::{Error, Result};
use crate::geometry::{Point3, QuadratureRule, SphereArray};
use crate::signals::{FrequencyGrid, PulseSpec, StationaryNoiseModel};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

/// `dest[i] += amp * exp(i * omega_i * delay)`.
///
/// On uniform grids the per-frequency phase advances by a fixed rotation, so
/// the loop runs on one complex multiply per node instead of an `exp`.
pub(crate) fn accumulate_phased(
    dest: &mut [Complex64],
    omegas: &[f64],
    step: Option<f64>,
    delay: f64,
    amp: Complex64,
) {
    debug_assert_eq!(dest.len(), omegas.len());
    match step {
        Some(h) => {
            let rot = Complex64::from_polar(1.0, h * delay);
            let mut ph = Complex64::from_polar(1.0, omegas[0] * delay) * amp;
            for d in dest.iter_mut() {
                *d += ph;
                ph *= rot;
            }
        }
        None => {
            for (d, &w) in dest.iter_mut().zip(omegas) {
                *d += amp * Complex64::from_polar(1.0, w * delay);
            }
        }
    }
}

/// `dest[i] += amp * factors[i] * exp(i * omega_i * delay)`.
pub(crate) fn accumulate_phased_weighted(
    dest: &mut [Complex64],
    omegas: &[f64],
    step: Option<f64>,
    delay: f64,
    amp: f64,
    factors: &[Complex64],
) {
    debug_assert_eq!(dest.len(), omegas.len());
    debug_assert_eq!(dest.len(), factors.len());
    match step {
        Some(h) => {
            let rot = Complex64::from_polar(1.0, h * delay);
            let mut ph = Complex64::from_polar(1.0, omegas[0] * delay) * amp;
            for (d, &f) in dest.iter_mut().zip(factors) {
                *d += ph * f;
                ph *= rot;
            }
        }
        None => {
            for ((d, &w), &f) in dest.iter_mut().zip(omegas).zip(factors) {
                *d += amp * f * Complex64::from_polar(1.0, w * delay);
            }
        }
    }
}

/// Spectrum of one blended source: the pulse spectrum carrying the delay as
/// a unit-modulus phase factor.
pub fn blended_source_spectrum(pulse: &PulseSpec, delays: &[f64], s: usize, omega: f64) -> Complex64 {
    pulse.spectrum(omega) * Complex64::from_polar(1.0, omega * delays[s])
}

/// One realization of the per-source spectra `n_s(omega)` on a frequency
/// grid.
#[derive(Debug, Clone)]
pub enum SourceSpectra {
    /// All sources fire the same pulse with per-source delays.
    Blended { pulse: PulseSpec, delays: Vec<f64> },
    /// Independent stationary Gaussian records: materialized spectra, one
    /// row per source on the grid the realization was drawn for.
    Stationary { n_omegas: usize, values: Vec<Complex64> },
}

impl SourceSpectra {
    pub fn blended(pulse: PulseSpec, delays: Vec<f64>) -> Self {
        SourceSpectra::Blended { pulse, delays }
    }

    /// Draw the truncated-record spectra of independent stationary sources:
    /// independent complex Gaussians with `E|n_s(w_k)|^2 = T * density(w_k)`
    /// per bin. Valid on grids whose spacing is the record's bin width.
    pub fn stationary_realization(
        model: &StationaryNoiseModel,
        grid: &FrequencyGrid,
        n_sources: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_omegas = grid.len();
        let mut values = Vec::with_capacity(n_sources * n_omegas);
        for _ in 0..n_sources {
            for &w in &grid.omegas {
                let sd = (model.duration * model.spectrum.density(w) * 0.5).sqrt();
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                values.push(Complex64::new(sd * a, sd * b));
            }
        }
        SourceSpectra::Stationary { n_omegas, values }
    }

    pub fn n_sources(&self) -> usize {
        match self {
            SourceSpectra::Blended { delays, .. } => delays.len(),
            SourceSpectra::Stationary { n_omegas, values } => values.len() / n_omegas,
        }
    }

    /// Spectrum of source `s` at grid node `i` (frequency `omega`).
    pub fn value(&self, s: usize, i: usize, omega: f64) -> Complex64 {
        match self {
            SourceSpectra::Blended { pulse, delays } => {
                pulse.spectrum(omega) * Complex64::from_polar(1.0, omega * delays[s])
            }
            SourceSpectra::Stationary { n_omegas, values } => values[s * n_omegas + i],
        }
    }

    pub(crate) fn stationary_row(&self, s: usize) -> Option<&[Complex64]> {
        match self {
            SourceSpectra::Stationary { n_omegas, values } => {
                Some(&values[s * n_omegas..(s + 1) * n_omegas])
            }
            SourceSpectra::Blended { .. } => None,
        }
    }
}

/// Descriptor of the realization a data set was synthesized from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DataMeta {
    pub source_kind: String,
    pub seed: Option<u64>,
    pub config_hash: Option<String>,
    pub description: String,
}

/// Recorded data in the frequency domain: one spectrum per receiver on a
/// positive-frequency grid (the real time signals are recovered by the
/// Hermitian extension).
#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub grid: FrequencyGrid,
    pub n_receivers: usize,
    /// Receiver-major: `values[r * grid.len() + i]`.
    pub values: Vec<Complex64>,
    pub meta: DataMeta,
}

impl DataMatrix {
    pub fn zeros(grid: FrequencyGrid, n_receivers: usize) -> Self {
        let n = grid.len() * n_receivers;
        Self { grid, n_receivers, values: vec![Complex64::new(0.0, 0.0); n], meta: DataMeta::default() }
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[r * n..(r + 1) * n]
    }

    /// Sum over sources of `G(x, y_s) * n_s(omega)` for every grid node,
    /// evaluated at a single spatial point. Shared by forward modeling and
    /// the adjoint.
    pub(crate) fn source_field_at(
        point: Point3,
        sources: &[Point3],
        src: &SourceSpectra,
        omegas: &[f64],
        step: Option<f64>,
        omega_offset: usize,
        c0: f64,
        dest: &mut [Complex64],
    ) {
        dest.fill(Complex64::new(0.0, 0.0));
        match src {
            SourceSpectra::Blended { pulse, delays } => {
                for (s, &y) in sources.iter().enumerate() {
                    let rho = point.distance_to(y);
                    let amp = Complex64::new(1.0 / (4.0 * PI * rho), 0.0);
                    accumulate_phased(dest, omegas, step, rho / c0 + delays[s], amp);
                }
                for (d, &w) in dest.iter_mut().zip(omegas) {
                    *d *= pulse.spectrum(w);
                }
            }
            SourceSpectra::Stationary { .. } => {
                for (s, &y) in sources.iter().enumerate() {
                    let rho = point.distance_to(y);
                    let row = src.stationary_row(s).unwrap();
                    accumulate_phased_weighted(
                        dest,
                        omegas,
                        step,
                        rho / c0,
                        1.0 / (4.0 * PI * rho),
                        &row[omega_offset..omega_offset + omegas.len()],
                    );
                }
            }
        }
    }
}

/// Synthesize the Born-scattered data for a perturbation sampled on the
/// given support quadrature: for each receiver and frequency,
/// `d(w, x_r) = w^2 sum_k q_k m_k G(w, x_r, x_k) sum_s G(w, x_k, y_s) n_s(w)`.
pub fn born_forward(
    pert: &crate::geometry::Perturbation,
    quad: &QuadratureRule,
    array: &SphereArray,
    src: &SourceSpectra,
    grid: &FrequencyGrid,
    c0: f64,
) -> Result<DataMatrix> {
    if !(c0 > 0.0) {
        return Err(Error::InvalidArgument("background speed must be positive".into()));
    }
    if src.n_sources() != array.n_sources() {
        return Err(Error::InvalidArgument(format!(
            "source spectra cover {} sources, array has {}",
            src.n_sources(),
            array.n_sources()
        )));
    }
    if let SourceSpectra::Stationary { n_omegas, .. } = src {
        if *n_omegas != grid.len() {
            return Err(Error::InvalidArgument(
                "stationary spectra were drawn on a different grid".into(),
            ));
        }
    }
    pert.validate_against_radius(array.radius)?;
    array.validate_interior_points(&quad.nodes)?;

    let n_omega = grid.len();
    let model: Vec<f64> = quad.nodes.iter().map(|&x| pert.indicator(x)).collect();

    // Incident field from all sources at every support node.
    let fields: Vec<Vec<Complex64>> = quad
        .nodes
        .par_iter()
        .map(|&node| {
            let mut row = vec![Complex64::new(0.0, 0.0); n_omega];
            DataMatrix::source_field_at(
                node,
                &array.source_positions,
                src,
                &grid.omegas,
                grid.step,
                0,
                c0,
                &mut row,
            );
            row
        })
        .collect();

    // Scatter to every receiver.
    let values: Vec<Complex64> = array
        .receiver_positions
        .par_iter()
        .flat_map_iter(|&recv| {
            let mut row = vec![Complex64::new(0.0, 0.0); n_omega];
            for (k, &node) in quad.nodes.iter().enumerate() {
                if model[k] == 0.0 {
                    continue;
                }
                let rho = recv.distance_to(node);
                accumulate_phased_weighted(
                    &mut row,
                    &grid.omegas,
                    grid.step,
                    rho / c0,
                    quad.weights[k] * model[k] / (4.0 * PI * rho),
                    &fields[k],
                );
            }
            for (v, &w) in row.iter_mut().zip(&grid.omegas) {
                *v *= w * w;
            }
            row.into_iter()
        })
        .collect();

    Ok(DataMatrix {
        grid: grid.clone(),
        n_receivers: array.n_receivers(),
        values,
        meta: DataMeta {
            source_kind: match src {
                SourceSpectra::Blended { .. } => "blended".into(),
                SourceSpectra::Stationary { .. } => "stationary".into(),
            },
            ..DataMeta::default()
        },
    })
}

/// Real time traces sampled on a uniform grid starting at `t0`.
#[derive(Debug, Clone)]
pub struct TimeTraces {
    pub t0: f64,
    pub dt: f64,
    /// One row per receiver.
    pub samples: Vec<Vec<f64>>,
}

impl TimeTraces {
    pub fn n_samples(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }
}

/// Reconstruct real time traces over `[-total_time/2, total_time/2]` from a
/// positive-band spectrum by Hermitian-symmetric inverse synthesis.
pub fn to_time_domain(d: &DataMatrix, dt: f64, total_time: f64) -> Result<TimeTraces> {
    if !(dt > 0.0 && total_time > dt) {
        return Err(Error::InvalidArgument("need dt > 0 and total_time > dt".into()));
    }
    let omega_max = d.grid.max_omega();
    if dt >= PI / omega_max {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} aliases the band (needs dt < {})",
            PI / omega_max
        )));
    }
    let n = (total_time / dt).round() as usize;
    let t0 = -0.5 * total_time;
    let samples: Vec<Vec<f64>> = (0..d.n_receivers)
        .into_par_iter()
        .map(|r| {
            let spec = d.row(r);
            let mut out = vec![0.0f64; n];
            for (i, (&w, &wt)) in d.grid.omegas.iter().zip(&d.grid.weights).enumerate() {
                // (1/2pi) * 2 Re[ spec * exp(-i w t) ] per band node.
                let rot = Complex64::from_polar(1.0, -w * dt);
                let mut ph = Complex64::from_polar(1.0, -w * t0) * spec[i] * (wt / PI);
                for o in out.iter_mut() {
                    *o += ph.re;
                    ph *= rot;
                }
            }
            out
        })
        .collect();
    Ok(TimeTraces { t0, dt, samples })
}

/// Sampled forward transform of the traces on the grid nodes:
/// `d(w_i) = dt * sum_n d(t_n) exp(i w_i t_n)`. Inverse of
/// [`to_time_domain`] when the grid is a DFT grid for the record length.
pub fn forward_transform_on_grid(traces: &TimeTraces, grid: &FrequencyGrid) -> Vec<Vec<Complex64>> {
    traces
        .samples
        .par_iter()
        .map(|row| {
            grid.omegas
                .iter()
                .map(|&w| {
                    let rot = Complex64::from_polar(1.0, w * traces.dt);
                    let mut ph = Complex64::from_polar(1.0, w * traces.t0);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &v in row {
                        acc += v * ph;
                        ph *= rot;
                    }
                    acc * traces.dt
                })
                .collect()
        })
        .collect()
}

const MAGIC: &[u8; 8] = b"BMDX0001";

#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    n_receivers: usize,
    omegas: Vec<f64>,
    weights: Vec<f64>,
    step: Option<f64>,
    meta: DataMeta,
}

impl DataMatrix {
    /// Self-describing binary container: magic, JSON header, then
    /// little-endian (re, im) f64 pairs in receiver-major order.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let header = BinaryHeader {
            n_receivers: self.n_receivers,
            omegas: self.grid.omegas.clone(),
            weights: self.grid.weights.clone(),
            step: self.grid.step,
            meta: self.meta.clone(),
        };
        let header_json =
            serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(MAGIC)?;
        f.write_all(&(header_json.len() as u64).to_le_bytes())?;
        f.write_all(&header_json)?;
        for v in &self.values {
            f.write_all(&v.re.to_le_bytes())?;
            f.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 8];
        f.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a data-matrix file (bad magic)".into()));
        }
        let mut len_bytes = [0u8; 8];
        f.read_exact(&mut len_bytes)?;
        let header_len = u64::from_le_bytes(len_bytes) as usize;
        let mut header_json = vec![0u8; header_len];
        f.read_exact(&mut header_json)?;
        let header: BinaryHeader =
            serde_json::from_slice(&header_json).map_err(|e| Error::Format(e.to_string()))?;
        let n = header.n_receivers * header.omegas.len();
        let mut values = Vec::with_capacity(n);
        let mut buf = [0u8; 16];
        for _ in 0..n {
            f.read_exact(&mut buf)?;
            values.push(Complex64::new(
                f64::from_le_bytes(buf[0..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..16].try_into().unwrap()),
            ));
        }
        Ok(DataMatrix {
            grid: FrequencyGrid {
                omegas: header.omegas,
                weights: header.weights,
                step: header.step,
            },
            n_receivers: header.n_receivers,
            values,
            meta: header.meta,
        })
    }

    /// Plain-text dump for small cases: one row per (receiver, frequency).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "receiver,omega,re,im")?;
        for r in 0..self.n_receivers {
            for (i, &w) in self.grid.omegas.iter().enumerate() {
                let v = self.values[r * self.grid.len() + i];
                writeln!(f, "{r},{:.16e},{:.16e},{:.16e}", w, v.re, v.im)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{forward_quadrature, Perturbation, SphereArray};
    use crate::greens::green_hat;
    use crate::signals::DelayModel;

    fn small_setup() -> (Perturbation, QuadratureRule, SphereArray, FrequencyGrid, PulseSpec) {
        let pert = Perturbation::ball(0.05, 1.0).unwrap();
        let grid = FrequencyGrid::uniform(4.0, 16.0, 24).unwrap();
        let quad = forward_quadrature(&pert, grid.max_omega(), 1.0, 8.0).unwrap();
        let array = SphereArray::new(2.0, 24, 18).unwrap();
        let pulse = PulseSpec::new(10.0, 2.0).unwrap();
        (pert, quad, array, grid, pulse)
    }

    #[test]
    fn blended_spectrum_phase_cases() {
        let pulse = PulseSpec::new(10.0, 2.0).unwrap();
        let delays = vec![0.0, 0.7, 2.0 * PI / 10.0];
        let w = 10.0;
        // Zero delay: the bare pulse spectrum.
        assert_eq!(blended_source_spectrum(&pulse, &delays, 0, w), pulse.spectrum(w));
        // Any delay: unchanged modulus.
        let v = blended_source_spectrum(&pulse, &delays, 1, w);
        assert!((v.norm() - pulse.spectrum(w).norm()).abs() < 1e-14);
        // Full-period delay at this frequency: back to the bare spectrum.
        let v = blended_source_spectrum(&pulse, &delays, 2, w);
        assert!((v - pulse.spectrum(w)).norm() < 1e-12);
    }

    #[test]
    fn born_zero_amplitude_gives_zero_data() {
        let (mut pert, quad, array, grid, pulse) = small_setup();
        pert.alpha = 0.0;
        let delays = DelayModel::uniform(1.0).unwrap().sample(array.n_sources(), 3);
        let src = SourceSpectra::blended(pulse, delays);
        let d = born_forward(&pert, &quad, &array, &src, &grid, 1.0).unwrap();
        assert!(d.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn born_is_linear_in_amplitude() {
        let (pert, quad, array, grid, pulse) = small_setup();
        let delays = DelayModel::uniform(1.0).unwrap().sample(array.n_sources(), 3);
        let src = SourceSpectra::blended(pulse, delays);
        let d1 = born_forward(&pert, &quad, &array, &src, &grid, 1.0).unwrap();
        let mut pert2 = pert;
        pert2.alpha = 2.0;
        let d2 = born_forward(&pert2, &quad, &array, &src, &grid, 1.0).unwrap();
        for (a, b) in d1.values.iter().zip(&d2.values) {
            assert!((b - a * 2.0).norm() <= 1e-12 * b.norm().max(1e-30));
        }
    }

    #[test]
    fn born_single_path_matches_unrolled_product() {
        // One source, one receiver, one node: the entry is the bare product
        // w^2 G(recv, node) G(node, src) n(w) q alpha.
        let pert = Perturbation::ball(0.01, 1.3).unwrap();
        let grid = FrequencyGrid::uniform(6.0, 14.0, 7).unwrap();
        let array = SphereArray::new(1.5, 1, 1).unwrap();
        let pulse = PulseSpec::new(10.0, 2.0).unwrap();
        let delays = vec![0.37];
        let node = Point3::new(0.003, -0.002, 0.001);
        let quad = QuadratureRule { nodes: vec![node], weights: vec![0.42] };
        let src = SourceSpectra::blended(pulse, delays.clone());
        let d = born_forward(&pert, &quad, &array, &src, &grid, 1.0).unwrap();
        for (i, &w) in grid.omegas.iter().enumerate() {
            let expected = w * w
                * green_hat(w, array.receiver_positions[0], node, 1.0).unwrap()
                * green_hat(w, node, array.source_positions[0], 1.0).unwrap()
                * blended_source_spectrum(&pulse, &delays, 0, w)
                * 0.42
                * 1.3;
            assert!(
                (d.values[i] - expected).norm() <= 1e-12 * expected.norm(),
                "bin {i}"
            );
        }
    }

    #[test]
    fn born_additive_over_perturbations() {
        // Same realization: data of a two-piece model equals the sum of the
        // single-piece data sets.
        let (pert, quad, array, grid, pulse) = small_setup();
        let delays = DelayModel::uniform(1.0).unwrap().sample(array.n_sources(), 9);
        let src = SourceSpectra::blended(pulse, delays);
        let shifted = Perturbation::new(
            crate::geometry::PerturbationKind::Ball,
            0.05,
            0.8,
            Point3::new(0.12, 0.0, 0.0),
        )
        .unwrap();
        let quad2 = forward_quadrature(&shifted, grid.max_omega(), 1.0, 8.0).unwrap();
        let da = born_forward(&pert, &quad, &array, &src, &grid, 1.0).unwrap();
        let db = born_forward(&shifted, &quad2, &array, &src, &grid, 1.0).unwrap();
        // Combined model: both node sets with their own indicator values.
        let mut nodes = quad.nodes.clone();
        nodes.extend_from_slice(&quad2.nodes);
        let mut weights = quad.weights.clone();
        weights.extend_from_slice(&quad2.weights);
        let combined = QuadratureRule { nodes, weights };
        // Indicators are disjoint, so summing the one-piece runs on the
        // union rule reproduces each: model both pieces by two passes.
        let dc1 = born_forward(&pert, &combined, &array, &src, &grid, 1.0).unwrap();
        let dc2 = born_forward(&shifted, &combined, &array, &src, &grid, 1.0).unwrap();
        for i in 0..da.values.len() {
            let lhs = dc1.values[i] + dc2.values[i];
            let rhs = da.values[i] + db.values[i];
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-30));
        }
    }

    #[test]
    fn born_rejects_node_on_sensor() {
        let (pert, _, array, grid, pulse) = small_setup();
        let src = SourceSpectra::blended(pulse, vec![0.0; array.n_sources()]);
        let quad = QuadratureRule {
            nodes: vec![array.receiver_positions[0].scale(1.0 - 1e-9)],
            weights: vec![1.0],
        };
        assert!(born_forward(&pert, &quad, &array, &src, &grid, 1.0).is_err());
    }

    #[test]
    fn time_domain_zero_spectrum_zero_trace() {
        let grid = FrequencyGrid::dft(16.0, 4.0, 12.0).unwrap();
        let d = DataMatrix::zeros(grid, 3);
        let traces = to_time_domain(&d, 0.125, 16.0).unwrap();
        assert!(traces.samples.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn time_domain_round_trip_on_dft_grid() {
        let total = 16.0;
        let grid = FrequencyGrid::dft(total, 4.0, 12.0).unwrap();
        let mut d = DataMatrix::zeros(grid.clone(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for v in d.values.iter_mut() {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            *v = Complex64::new(a, b);
        }
        let traces = to_time_domain(&d, total / 128.0, total).unwrap();
        let back = forward_transform_on_grid(&traces, &grid);
        for r in 0..2 {
            for (i, &v) in back[r].iter().enumerate() {
                let orig = d.values[r * grid.len() + i];
                assert!(
                    (v - orig).norm() <= 1e-8 * orig.norm().max(1e-12),
                    "r={r} i={i}: {v} vs {orig}"
                );
            }
        }
    }

    #[test]
    fn time_domain_single_bin_is_sampled_cosine() {
        let total = 8.0;
        let grid = FrequencyGrid::dft(total, 2.0, 2.5).unwrap();
        assert_eq!(grid.len(), 1);
        let w0 = grid.omegas[0];
        let wt = grid.weights[0];
        let mut d = DataMatrix::zeros(grid, 1);
        d.values[0] = Complex64::new(1.0, 0.0);
        let traces = to_time_domain(&d, 0.05, total).unwrap();
        for (n, &v) in traces.samples[0].iter().enumerate() {
            let t = traces.time(n);
            let expected = wt / PI * (w0 * t).cos();
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn time_domain_rejects_aliasing_dt() {
        let grid = FrequencyGrid::dft(16.0, 4.0, 12.0).unwrap();
        let d = DataMatrix::zeros(grid, 1);
        assert!(to_time_domain(&d, 0.5, 16.0).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let (pert, quad, array, grid, pulse) = small_setup();
        let delays = DelayModel::uniform(1.0).unwrap().sample(array.n_sources(), 5);
        let src = SourceSpectra::blended(pulse, delays);
        let mut d = born_forward(&pert, &quad, &array, &src, &grid, 1.0).unwrap();
        d.meta.seed = Some(5);
        d.meta.config_hash = Some("cafe".into());
        let dir = std::env::temp_dir().join("blendmig_test_bin");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d.bmdx");
        d.write_binary(&path).unwrap();
        let back = DataMatrix::read_binary(&path).unwrap();
        assert_eq!(back.n_receivers, d.n_receivers);
        assert_eq!(back.grid.omegas, d.grid.omegas);
        assert_eq!(back.meta.config_hash.as_deref(), Some("cafe"));
        for (a, b) in d.values.iter().zip(&back.values) {
            assert_eq!(a, b);
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
