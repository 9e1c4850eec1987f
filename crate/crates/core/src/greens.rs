//! Frequency-domain Green's function of the constant-speed background and
//! the surface-sum identity that collapses sensor sums into a sinc kernel.

use crate::error::{Error, Result};
use crate::geometry::{Point3, SphereArray};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Outgoing Green's function `exp(i w |x1-x2| / c0) / (4 pi |x1-x2|)`.
pub fn green_hat(omega: f64, x1: Point3, x2: Point3, c0: f64) -> Result<Complex64> {
    let d = x1.distance_to(x2);
    if d < 1e-12 {
        return Err(Error::SingularEvaluation(format!(
            "Green's function at coincident points (separation {d:.3e})"
        )));
    }
    let phase = omega * d / c0;
    Ok(Complex64::from_polar(1.0, phase) / (4.0 * PI * d))
}

/// Continuum limit of the sensor-sum kernel for a constant-density surface
/// layout: `sinc(w |x-y| / c0) / (4 pi)`.
pub fn sinc_kernel(omega: f64, x: Point3, y: Point3, c0: f64) -> f64 {
    sinc(omega * x.distance_to(y) / c0) / (4.0 * PI)
}

/// Relative error of the discrete surface-sum identity
/// `(2 i w / c0) * sum_r w_r conj(G(x_r, x)) G(x_r, y) ~ 2 i Im G(x, y)`
/// over the receiver layout. Returns `|lhs - rhs| / |rhs|`; the caller
/// judges whether the array is dense enough and the geometry deep enough.
pub fn hk_identity_check(
    array: &SphereArray,
    omega: f64,
    x: Point3,
    y: Point3,
    c0: f64,
) -> Result<f64> {
    let w = array.receiver_weight();
    let mut acc = Complex64::new(0.0, 0.0);
    for &r in &array.receiver_positions {
        acc += green_hat(omega, r, x, c0)?.conj() * green_hat(omega, r, y, c0)?;
    }
    let lhs = Complex64::new(0.0, 2.0 * omega / c0) * acc * w;
    let g = green_hat(omega, x, y, c0)?;
    let rhs = Complex64::new(0.0, 2.0 * g.im);
    let denom = rhs.norm();
    if denom == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((lhs - rhs).norm() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fibonacci_sphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball_point(rng: &mut ChaCha8Rng, r: f64) -> Point3 {
        loop {
            let p = Point3::new(
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
                rng.gen_range(-r..r),
            );
            if p.norm() <= r {
                return p;
            }
        }
    }

    #[test]
    fn green_zero_frequency_is_static_kernel() {
        let a = Point3::new(0.1, 0.0, 0.0);
        let b = Point3::new(0.0, 0.3, 0.0);
        let g = green_hat(0.0, a, b, 1.0).unwrap();
        let d = a.distance_to(b);
        assert!((g.re - 1.0 / (4.0 * PI * d)).abs() < 1e-15);
        assert!(g.im.abs() < 1e-15);
    }

    #[test]
    fn green_full_period_is_real_positive() {
        let omega = 8.0;
        let c0 = 1.0;
        let d = 2.0 * PI * c0 / omega;
        let a = Point3::ORIGIN;
        let b = Point3::new(d, 0.0, 0.0);
        let g = green_hat(omega, a, b, c0).unwrap();
        assert!(g.re > 0.0);
        assert!(g.im.abs() < 1e-12 * g.re);
    }

    #[test]
    fn green_reality_and_reciprocity() {
        let a = Point3::new(0.2, -0.1, 0.4);
        let b = Point3::new(-0.3, 0.2, 0.1);
        let g = green_hat(5.0, a, b, 1.0).unwrap();
        assert!((g.conj() - green_hat(-5.0, a, b, 1.0).unwrap()).norm() < 1e-15);
        assert!((g - green_hat(5.0, b, a, 1.0).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn green_coincident_points_error() {
        let a = Point3::new(0.1, 0.2, 0.3);
        assert!(green_hat(1.0, a, a, 1.0).is_err());
    }

    #[test]
    fn sinc_kernel_values() {
        let a = Point3::ORIGIN;
        assert!((sinc_kernel(3.0, a, a, 1.0) - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let b = Point3::new(PI / 3.0, 0.0, 0.0);
        assert!(sinc_kernel(3.0, a, b, 1.0).abs() < 1e-12);
    }

    #[test]
    fn sinc_kernel_symmetry() {
        let a = Point3::new(0.05, -0.02, 0.01);
        let b = Point3::new(-0.01, 0.04, 0.03);
        assert_eq!(sinc_kernel(7.0, a, b, 1.0), sinc_kernel(7.0, b, a, 1.0));
        assert_eq!(sinc_kernel(-7.0, a, b, 1.0), sinc_kernel(7.0, a, b, 1.0));
    }

    /// Sensor count giving max nearest-neighbor spacing about `spacing` on a
    /// sphere of radius `radius` (Fibonacci layout, empirical factor).
    fn count_for_spacing(radius: f64, spacing: f64) -> usize {
        ((4.0 * PI * radius * radius) / (spacing / 1.35).powi(2)).ceil() as usize
    }

    #[test]
    fn hk_identity_at_coincident_arguments() {
        // x = y: rhs reduces to 2i * (w / 4 pi c0); the surface sum of
        // |G|^2-type terms must reproduce it.
        let eta = 0.05;
        let omega = 1.0 / eta;
        let radius = 20.0 * eta;
        let n = count_for_spacing(radius, PI * eta);
        let mut array = SphereArray::new(radius, 8, n).unwrap();
        array.source_positions = fibonacci_sphere(8, radius).unwrap();
        let x = Point3::new(0.01, -0.02, 0.015);
        let err = hk_identity_check(&array, omega, x, x, 1.0).unwrap();
        assert!(err < 0.05, "coincident-argument error {err}");
    }

    #[test]
    fn hk_identity_small_error_at_depth_20_wavescales() {
        let eta = 0.05;
        let omega = 1.0 / eta;
        let radius = 20.0 * eta;
        let n = count_for_spacing(radius, PI * eta);
        let array = SphereArray::new(radius, 8, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut checked = 0;
        while checked < 12 {
            let x = ball_point(&mut rng, radius / 10.0);
            let y = ball_point(&mut rng, radius / 10.0);
            // Relative error is meaningful only away from the reference's
            // zeros; skip pairs near a sinc null.
            if sinc(omega * x.distance_to(y)).abs() < 0.15 {
                continue;
            }
            let err = hk_identity_check(&array, omega, x, y, 1.0).unwrap();
            assert!(err < 0.05, "pair error {err}");
            checked += 1;
        }
    }

    #[test]
    fn hk_identity_doubling_receivers_reduces_error() {
        // Start under-resolved so the spacing error dominates.
        let eta = 0.05;
        let omega = 1.0 / eta;
        let radius = 20.0 * eta;
        let x = Point3::new(0.03, -0.02, 0.01);
        let y = Point3::new(-0.04, 0.01, 0.035);
        let n0 = count_for_spacing(radius, 2.2 * PI * eta);
        let e_coarse = hk_identity_check(
            &SphereArray::new(radius, 8, n0).unwrap(),
            omega,
            x,
            y,
            1.0,
        )
        .unwrap();
        let e_fine = hk_identity_check(
            &SphereArray::new(radius, 8, 2 * n0).unwrap(),
            omega,
            x,
            y,
            1.0,
        )
        .unwrap();
        assert!(
            e_fine < e_coarse,
            "doubling receivers: {e_coarse} -> {e_fine}"
        );
    }

    #[test]
    fn hk_identity_refinement_ladder_is_monotone() {
        // Refine radius and density together; the identity error must drop
        // at each rung.
        let eta = 0.05;
        let omega = 1.0 / eta;
        let x = Point3::new(0.03, -0.02, 0.01);
        let y = Point3::new(-0.04, 0.01, 0.035);
        let mut last = f64::INFINITY;
        for (fac, dens) in [(10.0, 1.0), (20.0, 2.0), (40.0, 4.0)] {
            let radius = fac * eta;
            let n = count_for_spacing(radius, PI * eta / dens);
            let array = SphereArray::new(radius, 8, n).unwrap();
            let err = hk_identity_check(&array, omega, x, y, 1.0).unwrap();
            assert!(err < last, "ladder not monotone: {err} after {last}");
            last = err;
        }
    }
}
