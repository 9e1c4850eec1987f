//! One-dimensional quadrature rules and low-discrepancy sequences used by the
//! spatial integration routines.

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre polynomial with the Tricomi initial
/// guess; accurate to near machine precision for `n` up to several thousand.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P'_n(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&v| v * half).collect(),
    )
}

/// Midpoint rule on `[a, b]`; exact for constants, spectrally accurate for
/// periodic integrands over a full period.
pub fn midpoint_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let h = (b - a) / n as f64;
    (
        (0..n).map(|i| a + (i as f64 + 0.5) * h).collect(),
        vec![h; n],
    )
}

const HALTON_BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Radical inverse of `i` in the given base, in `[0, 1)`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut f = inv_base;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv_base;
    }
    r
}

/// Randomized Halton sequence in up to 6 dimensions.
///
/// Scrambling is a Cranley-Patterson rotation: a seed-derived shift per
/// dimension, applied modulo one. Deterministic for a fixed seed.
pub struct LowDiscrepancy {
    dims: usize,
    shifts: [f64; 6],
}

impl LowDiscrepancy {
    pub fn new(dims: usize, seed: u64) -> Self {
        assert!(dims >= 1 && dims <= 6, "supported dimensions: 1..=6");
        let mut shifts = [0.0; 6];
        let mut s = seed;
        for shift in shifts.iter_mut() {
            s = splitmix64(s);
            *shift = (s >> 11) as f64 / (1u64 << 53) as f64;
        }
        Self { dims, shifts }
    }

    /// The `i`-th point of the sequence, written into `out[..dims]`.
    pub fn point(&self, i: u64, out: &mut [f64]) {
        // Skip index 0 (the all-zeros point degrades uniformity).
        let idx = i + 1;
        for d in 0..self.dims {
            let v = radical_inverse(idx, HALTON_BASES[d]) + self.shifts[d];
            out[d] = v - v.floor();
        }
    }
}

/// SplitMix64 step; used for seed derivation and scrambling shifts.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1.
        let (x, w) = gauss_legendre(5);
        for deg in 0..=9 {
            let got: f64 = x
                .iter()
                .zip(&w)
                .map(|(&t, &v)| v * t.powi(deg))
                .sum();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!(
                (got - exact).abs() < 1e-13,
                "degree {deg}: got {got}, expected {exact}"
            );
        }
    }

    #[test]
    fn gauss_legendre_large_n_weight_sum() {
        let (_, w) = gauss_legendre(600);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_on_interval() {
        let (x, w) = gauss_legendre_on(1.0, 3.0, 8);
        let got: f64 = x.iter().zip(&w).map(|(&t, &v)| v * t * t).sum();
        assert!((got - 26.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_weight_sum() {
        let (_, w) = midpoint_on(-1.0, 1.0, 37);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn halton_is_deterministic_and_in_unit_cube() {
        let a = LowDiscrepancy::new(6, 42);
        let b = LowDiscrepancy::new(6, 42);
        let mut pa = [0.0; 6];
        let mut pb = [0.0; 6];
        for i in 0..1000 {
            a.point(i, &mut pa);
            b.point(i, &mut pb);
            assert_eq!(pa, pb);
            for &v in &pa {
                assert!((0.0..1.0).contains(&v));
            }
        }
    }

    #[test]
    fn halton_estimates_cube_mean() {
        // QMC estimate of the mean of x*y*z over the unit cube (= 1/8).
        let seq = LowDiscrepancy::new(3, 7);
        let mut p = [0.0; 6];
        let n = 20000u64;
        let mut acc = 0.0;
        for i in 0..n {
            seq.point(i, &mut p);
            acc += p[0] * p[1] * p[2];
        }
        let mean = acc / n as f64;
        assert!((mean - 0.125).abs() < 1e-3, "mean {mean}");
    }
}
