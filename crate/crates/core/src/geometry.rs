//! Spatial primitives: points, the spherical measurement surface with
//! quasi-uniform sensor layouts, perturbation supports, and quadrature over
//! those supports.
//!
//! Lengths are nondimensional with the background speed fixed to 1 by
//! convention; the perturbation support has O(1) extent and sits well inside
//! the measurement sphere.

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre_on, midpoint_on};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance_to(self, o: Point3) -> f64 {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Golden ratio, for the Fibonacci lattice.
const PHI: f64 = 1.618033988749894848;

/// `n` quasi-uniform points on the sphere of the given radius.
///
/// Canonical Fibonacci lattice: latitudes equally spaced in z, longitudes
/// advanced by the golden angle. Deterministic; every point lies on the
/// sphere to machine precision and carries surface weight `4 pi R^2 / n`.
///
/// `phase` rotates the longitude origin; use distinct phases when two
/// independent layouts (sources and receivers) must not coincide.
pub fn fibonacci_sphere_phased(n: usize, radius: f64, phase: f64) -> Result<Vec<Point3>> {
    if n == 0 {
        return Err(Error::InvalidArgument("point count must be >= 1".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let nf = n as f64;
    Ok((0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / nf;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let lon = 2.0 * PI * (i as f64 / PHI + phase);
            Point3::new(radius * s * lon.cos(), radius * s * lon.sin(), radius * z)
        })
        .collect())
}

/// `n` quasi-uniform points on the sphere of the given radius.
pub fn fibonacci_sphere(n: usize, radius: f64) -> Result<Vec<Point3>> {
    fibonacci_sphere_phased(n, radius, 0.0)
}

/// Largest nearest-neighbor distance over a point set.
pub fn max_nearest_neighbor_spacing(points: &[Point3]) -> f64 {
    if points.len() < 2 {
        return f64::INFINITY;
    }
    points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &q)| p.distance_to(q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Sources and receivers laid out quasi-uniformly on the sphere `|p| = R`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereArray {
    pub radius: f64,
    pub source_positions: Vec<Point3>,
    pub receiver_positions: Vec<Point3>,
}

impl SphereArray {
    /// Build an array with Fibonacci-lattice layouts. The receiver lattice is
    /// rotated by half a golden angle so sources and receivers never coincide
    /// exactly.
    pub fn new(radius: f64, n_sources: usize, n_receivers: usize) -> Result<Self> {
        let source_positions = fibonacci_sphere_phased(n_sources, radius, 0.0)?;
        let receiver_positions = fibonacci_sphere_phased(n_receivers, radius, 0.5 / PHI)?;
        Ok(Self { radius, source_positions, receiver_positions })
    }

    pub fn n_sources(&self) -> usize {
        self.source_positions.len()
    }

    pub fn n_receivers(&self) -> usize {
        self.receiver_positions.len()
    }

    /// Surface weight per source in the discrete surface sum.
    pub fn source_weight(&self) -> f64 {
        4.0 * PI * self.radius * self.radius / self.n_sources() as f64
    }

    /// Surface weight per receiver in the discrete surface sum.
    pub fn receiver_weight(&self) -> f64 {
        4.0 * PI * self.radius * self.radius / self.n_receivers() as f64
    }

    /// Surface density (count per area) of sources.
    pub fn source_density(&self) -> f64 {
        self.n_sources() as f64 / (4.0 * PI * self.radius * self.radius)
    }

    /// Surface density (count per area) of receivers.
    pub fn receiver_density(&self) -> f64 {
        self.n_receivers() as f64 / (4.0 * PI * self.radius * self.radius)
    }

    /// Whether both layouts sample the sphere at least at half the central
    /// wavelength (spacing at most `pi * eta`; the wavelength is `2 pi eta`).
    pub fn is_adequate(&self, eta: f64) -> bool {
        let s = max_nearest_neighbor_spacing(&self.source_positions)
            .max(max_nearest_neighbor_spacing(&self.receiver_positions));
        s <= PI * eta
    }

    /// Whether the layouts are dense enough that the discrete surface sums
    /// are accurate for evaluation points within `|x| <= r_region`.
    ///
    /// The integrands seen by the surface sums are band-limited on the sphere
    /// with degree ~ `2 r_region / eta`, independent of the sphere radius, so
    /// the requirement relaxes by `R / r_region` relative to the strict
    /// half-wavelength rule.
    pub fn is_adequate_for_region(&self, eta: f64, r_region: f64) -> bool {
        self.is_adequate(eta * (self.radius / r_region).max(1.0))
    }

    /// Smallest distance from `p` to any sensor (source or receiver).
    pub fn min_sensor_distance(&self, p: Point3) -> f64 {
        let a = self
            .source_positions
            .iter()
            .map(|&q| p.distance_to(q))
            .fold(f64::INFINITY, f64::min);
        let b = self
            .receiver_positions
            .iter()
            .map(|&q| p.distance_to(q))
            .fold(f64::INFINITY, f64::min);
        a.min(b)
    }

    /// Check that every point keeps the required clearance (1e-6 R) from all
    /// sensor positions and stays inside the sphere.
    pub fn validate_interior_points(&self, points: &[Point3]) -> Result<()> {
        let clearance = 1e-6 * self.radius;
        for (i, &p) in points.iter().enumerate() {
            if p.norm() >= self.radius {
                return Err(Error::InvalidArgument(format!(
                    "point {i} at |p| = {} lies outside the sensor sphere R = {}",
                    p.norm(),
                    self.radius
                )));
            }
            if self.min_sensor_distance(p) < clearance {
                return Err(Error::SingularEvaluation(format!(
                    "point {i} is within {clearance:.3e} of a sensor position"
                )));
            }
        }
        Ok(())
    }
}

/// Sensor count needed so the discrete surface sums resolve evaluation
/// points out to `|x| <= r_region` at reciprocal wavenumber `eta`.
pub fn sensor_count_for_region(r_region: f64, eta: f64) -> usize {
    ((16.0 * r_region * r_region / (PI * eta * eta)).ceil() as usize).max(64)
}

/// Shape of a localized velocity perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationKind {
    /// Supported on the ball of radius `epsilon`.
    Ball,
    /// Supported on a tube: cross-section of radius `epsilon` in (x, y),
    /// axis along z over [-1, 1].
    Cylinder,
    /// Supported on a slab of half-thickness `epsilon` along x times the
    /// unit disc in (y, z).
    Disc,
}

/// A compactly supported perturbation of `1/c^2`, constant amplitude `alpha`
/// on its support.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub epsilon: f64,
    pub alpha: f64,
    pub center: Point3,
}

impl Perturbation {
    pub fn new(kind: PerturbationKind, epsilon: f64, alpha: f64, center: Point3) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        if !epsilon.is_finite() || !alpha.is_finite() || !center.is_finite() {
            return Err(Error::InvalidArgument("perturbation fields must be finite".into()));
        }
        Ok(Self { kind, epsilon, alpha, center })
    }

    pub fn ball(epsilon: f64, alpha: f64) -> Result<Self> {
        Self::new(PerturbationKind::Ball, epsilon, alpha, Point3::ORIGIN)
    }

    pub fn cylinder(epsilon: f64, alpha: f64) -> Result<Self> {
        Self::new(PerturbationKind::Cylinder, epsilon, alpha, Point3::ORIGIN)
    }

    pub fn disc(epsilon: f64, alpha: f64) -> Result<Self> {
        Self::new(PerturbationKind::Disc, epsilon, alpha, Point3::ORIGIN)
    }

    /// Perturbation value at `x`: `alpha` on the support, zero outside.
    pub fn indicator(&self, x: Point3) -> f64 {
        let p = x.sub(self.center);
        let inside = match self.kind {
            PerturbationKind::Ball => p.norm() <= self.epsilon,
            PerturbationKind::Cylinder => {
                (p.x * p.x + p.y * p.y).sqrt() <= self.epsilon && p.z.abs() <= 1.0
            }
            PerturbationKind::Disc => {
                p.x.abs() <= self.epsilon && (p.y * p.y + p.z * p.z).sqrt() <= 1.0
            }
        };
        if inside {
            self.alpha
        } else {
            0.0
        }
    }

    /// Exact volume of the support.
    pub fn support_volume(&self) -> f64 {
        let e = self.epsilon;
        match self.kind {
            PerturbationKind::Ball => 4.0 / 3.0 * PI * e * e * e,
            PerturbationKind::Cylinder => 2.0 * PI * e * e,
            PerturbationKind::Disc => 2.0 * PI * e,
        }
    }

    /// Diameter of the support (largest pairwise distance).
    pub fn support_diameter(&self) -> f64 {
        let e = self.epsilon;
        match self.kind {
            PerturbationKind::Ball => 2.0 * e,
            PerturbationKind::Cylinder => 2.0 * (1.0 + e * e).sqrt(),
            PerturbationKind::Disc => 2.0 * (1.0 + e * e).sqrt(),
        }
    }

    /// Check the geometric separation between support and sensor sphere:
    /// the sphere radius must be at least ten support diameters.
    pub fn validate_against_radius(&self, radius: f64) -> Result<()> {
        if 10.0 * self.support_diameter() > radius {
            return Err(Error::InvalidArgument(format!(
                "support diameter {} too large for sphere radius {} (need 10x separation)",
                self.support_diameter(),
                radius
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of a volume quadrature over a perturbation support.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of weights; equals the support volume for the product rules here.
    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Per-dimension node counts for the product rules.
#[derive(Debug, Clone, Copy)]
pub struct RuleCounts {
    /// Radial nodes (ball radius, cylinder cross-section, or disc plane).
    pub radial: usize,
    /// Angular nodes (azimuthal midpoint rule), or polar nodes for the ball.
    pub angular: usize,
    /// Axis nodes: cylinder z, disc thickness; unused for the ball.
    pub axial: usize,
}

/// Product Gauss-Legendre / midpoint rule adapted to the support geometry.
/// The weight sum reproduces the support volume to near machine precision.
pub fn product_rule(p: &Perturbation, counts: RuleCounts) -> QuadratureRule {
    let e = p.epsilon;
    let c = p.center;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    match p.kind {
        PerturbationKind::Ball => {
            // Spherical coordinates: GL in r (with r^2 Jacobian), GL in
            // cos(theta), midpoint in phi.
            let (rs, rw) = gauss_legendre_on(0.0, e, counts.radial.max(2));
            let (cs, cw) = gauss_legendre_on(-1.0, 1.0, counts.angular.max(2));
            let na = (2 * counts.angular).max(4);
            let (ps, pw) = midpoint_on(0.0, 2.0 * PI, na);
            for (r, wr) in rs.iter().zip(&rw) {
                for (ct, wc) in cs.iter().zip(&cw) {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    for (ph, wp) in ps.iter().zip(&pw) {
                        nodes.push(Point3::new(
                            c.x + r * st * ph.cos(),
                            c.y + r * st * ph.sin(),
                            c.z + r * ct,
                        ));
                        weights.push(wr * r * r * wc * wp);
                    }
                }
            }
        }
        PerturbationKind::Cylinder => {
            // Polar cross-section in (x, y), GL along z.
            let (rs, rw) = gauss_legendre_on(0.0, e, counts.radial.max(2));
            let (ps, pw) = midpoint_on(0.0, 2.0 * PI, counts.angular.max(4));
            let (zs, zw) = gauss_legendre_on(-1.0, 1.0, counts.axial.max(2));
            for (r, wr) in rs.iter().zip(&rw) {
                for (ph, wp) in ps.iter().zip(&pw) {
                    for (z, wz) in zs.iter().zip(&zw) {
                        nodes.push(Point3::new(
                            c.x + r * ph.cos(),
                            c.y + r * ph.sin(),
                            c.z + z,
                        ));
                        weights.push(wr * r * wp * wz);
                    }
                }
            }
        }
        PerturbationKind::Disc => {
            // GL across the thickness (x), polar over the unit disc (y, z).
            let (xs, xw) = gauss_legendre_on(-e, e, counts.axial.max(2));
            let (rs, rw) = gauss_legendre_on(0.0, 1.0, counts.radial.max(2));
            let (ps, pw) = midpoint_on(0.0, 2.0 * PI, counts.angular.max(4));
            for (x, wx) in xs.iter().zip(&xw) {
                for (r, wr) in rs.iter().zip(&rw) {
                    for (ph, wp) in ps.iter().zip(&pw) {
                        nodes.push(Point3::new(
                            c.x + x,
                            c.y + r * ph.cos(),
                            c.z + r * ph.sin(),
                        ));
                        weights.push(wx * wr * r * wp);
                    }
                }
            }
        }
    }
    QuadratureRule { nodes, weights }
}

/// Product quadrature over the support at a refinement level; `level`
/// scales all per-dimension node counts.
pub fn support_quadrature(p: &Perturbation, level: usize) -> Result<QuadratureRule> {
    if level == 0 {
        return Err(Error::InvalidArgument("quadrature level must be >= 1".into()));
    }
    let counts = match p.kind {
        PerturbationKind::Ball => RuleCounts {
            radial: 2 + 2 * level,
            angular: 2 + 2 * level,
            axial: 0,
        },
        PerturbationKind::Cylinder => RuleCounts {
            radial: 2 + 2 * level,
            angular: 4 + 4 * level,
            axial: 8 * level,
        },
        PerturbationKind::Disc => RuleCounts {
            radial: 8 * level,
            angular: 4 + 4 * level,
            axial: 2 + 2 * level,
        },
    };
    Ok(product_rule(p, counts))
}

/// Quadrature resolving the Green's-function phase over the support for
/// forward modeling: node spacing of at most one `points_per_wavelength`-th
/// of the shortest wavelength `2 pi c0 / omega_max` in every dimension.
pub fn forward_quadrature(
    p: &Perturbation,
    omega_max: f64,
    c0: f64,
    points_per_wavelength: f64,
) -> Result<QuadratureRule> {
    if !(omega_max > 0.0) || !(c0 > 0.0) || !(points_per_wavelength > 0.0) {
        return Err(Error::InvalidArgument(
            "omega_max, c0, points_per_wavelength must be positive".into(),
        ));
    }
    let spacing = 2.0 * PI * c0 / omega_max / points_per_wavelength;
    let n_for = |extent: f64| ((extent / spacing).ceil() as usize).max(2);
    let e = p.epsilon;
    let counts = match p.kind {
        PerturbationKind::Ball => RuleCounts {
            radial: n_for(e),
            angular: n_for(e).max(2),
            axial: 0,
        },
        PerturbationKind::Cylinder => RuleCounts {
            radial: n_for(e),
            angular: n_for(2.0 * PI * e).max(4),
            axial: n_for(2.0),
        },
        PerturbationKind::Disc => RuleCounts {
            radial: n_for(1.0),
            angular: n_for(2.0 * PI).max(4),
            axial: n_for(2.0 * e),
        },
    };
    Ok(product_rule(p, counts))
}

/// Evaluation points "far" from a perturbation: for balls and cylinders,
/// `n_directions` azimuthal directions in the x-y plane at each radius; for
/// discs, points along the +/- x axis (where the support is thin) at each
/// radius.
pub fn far_point_set(kind: PerturbationKind, radii: &[f64], n_directions: usize) -> Vec<Point3> {
    let mut pts = Vec::new();
    match kind {
        PerturbationKind::Ball | PerturbationKind::Cylinder => {
            let nd = n_directions.max(1);
            for k in 0..nd {
                let phi = 2.0 * PI * k as f64 / nd as f64;
                for &r in radii {
                    pts.push(Point3::new(r * phi.cos(), r * phi.sin(), 0.0));
                }
            }
        }
        PerturbationKind::Disc => {
            for &sign in &[1.0, -1.0] {
                for &r in radii {
                    pts.push(Point3::new(sign * r, 0.0, 0.0));
                }
            }
        }
    }
    pts
}
