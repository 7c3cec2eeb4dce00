//! Seeded samplers: low-discrepancy points on cone/Euclidean spheres and
//! uniform points inside the upper cone.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ConePoint, Half, NormKind};
use crate::error::{Error, Result};

const PRIMES: [u32; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// Halton sequence with a seeded Cranley–Patterson rotation.
///
/// Point `i` does not depend on how many points are requested, so a larger
/// sample always contains a smaller one with the same seed.
#[derive(Clone, Debug)]
pub struct Halton {
    shift: Vec<f64>,
}

impl Halton {
    pub fn new(dims: usize, seed: u64) -> Self {
        assert!(dims <= PRIMES.len(), "Halton sequence supports at most {} dimensions", PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { shift: (0..dims).map(|_| rng.gen::<f64>()).collect() }
    }

    pub fn dims(&self) -> usize {
        self.shift.len()
    }

    /// Coordinates of point `index` in `[0, 1)^dims`.
    pub fn point(&self, index: u64) -> Vec<f64> {
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(&shift, base)| (radical_inverse(index + 1, base) + shift).fract())
            .collect()
    }
}

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let base = base as u64;
    let inv = 1.0 / base as f64;
    let (mut value, mut scale) = (0.0, inv);
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    value
}

/// Number of uniform coordinates consumed by [`direction`] on `S^{d-1}`.
fn direction_dims(d: usize) -> usize {
    match d {
        1 | 2 => 1,
        _ => 2 * d.div_ceil(2),
    }
}

/// Unit vector in `ℝ^d` from uniform coordinates.
fn direction(d: usize, u: &[f64]) -> Vec<f64> {
    match d {
        1 => vec![if u[0] < 0.5 { -1.0 } else { 1.0 }],
        2 => {
            let angle = 2.0 * PI * u[0];
            vec![angle.cos(), angle.sin()]
        }
        _ => {
            let mut v: Vec<f64> = u
                .chunks(2)
                .flat_map(|pair| {
                    let radius = (-2.0 * pair[0].max(1e-300).ln()).sqrt();
                    let angle = 2.0 * PI * pair[1];
                    [radius * angle.cos(), radius * angle.sin()]
                })
                .take(d)
                .collect();
            let norm = v.iter().fold(0.0f64, |acc, &c| acc.hypot(c));
            if norm == 0.0 {
                v[0] = 1.0;
            } else {
                v.iter_mut().for_each(|c| *c /= norm);
            }
            v
        }
    }
}

/// Volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

/// Volume of the upper cone `{|x| + t ≤ 1, t ≥ 0}` in `ℝ^n`.
pub fn upper_cone_volume(n: usize) -> f64 {
    unit_ball_volume(n - 1) / n as f64
}

/// `count` seeded low-discrepancy points on `{‖X‖ = r}` (cone or Euclidean norm)
/// in the requested half, led by the axis points `(0, ±r)` of that half.
///
/// With `require_membership` the call fails unless the whole sphere lies in the
/// closed double cone, i.e. `r ≤ 1` for the cone norm and `r ≤ 1/√2` for the
/// Euclidean one.
pub fn sample_cone_sphere(
    n: usize,
    r: f64,
    norm: NormKind,
    half: Half,
    count: usize,
    seed: u64,
    require_membership: bool,
) -> Result<Vec<ConePoint<f64>>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    if !(r > 0.0) || count == 0 {
        return Err(Error::InvalidParameter(format!("sphere sampling needs r > 0 and count ≥ 1, got r = {r}, count = {count}")));
    }
    let reach = match norm {
        NormKind::Cone => r,
        NormKind::Euclid => r * 2f64.sqrt(),
    };
    if require_membership && reach > 1.0 {
        return Err(Error::OutOfDomain(format!("sphere of radius {r} ({norm:?} norm) leaves the cone")));
    }
    let mut points = match half {
        Half::Upper => vec![ConePoint::axis(n, r)],
        Half::Lower => vec![ConePoint::axis(n, -r)],
        Half::Both => vec![ConePoint::axis(n, r), ConePoint::axis(n, -r)],
    };
    let d = n - 1;
    let halton = Halton::new(1 + direction_dims(d), seed);
    let mut index = 0;
    while points.len() < count {
        let u = halton.point(index);
        index += 1;
        let t = match half {
            Half::Upper => r * u[0],
            Half::Lower => -r * u[0],
            Half::Both => r * (2.0 * u[0] - 1.0),
        };
        let radial = match norm {
            NormKind::Cone => r - t.abs(),
            NormKind::Euclid => ((r - t.abs()) * (r + t.abs())).max(0.0).sqrt(),
        };
        let x = direction(d, &u[1..]).into_iter().map(|c| c * radial).collect();
        points.push(ConePoint::new(x, t));
    }
    Ok(points)
}

/// Uniform points of the upper cone with an axis and boundary margin.
#[derive(Clone, Debug)]
pub struct InteriorSample {
    pub points: Vec<ConePoint<f64>>,
    pub attempts: u64,
    /// Accepted fraction of cylinder draws; times the cylinder volume `V_{n-1}`
    /// it estimates the volume of the sampled region.
    pub acceptance_rate: f64,
}

/// One uniform draw from the cylinder `{|x| ≤ 1, 0 ≤ t ≤ 1}`, kept if it lies in
/// the upper cone with `|x| ≥ axis_margin` and distance `≥ boundary_margin` to
/// the cone's boundary.
pub fn draw_interior<R: Rng>(rng: &mut R, n: usize, axis_margin: f64, boundary_margin: f64) -> Option<ConePoint<f64>> {
    let d = n - 1;
    let mut dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = dir.iter().fold(0.0f64, |acc, &c| acc.hypot(c));
    let radius = rng.gen::<f64>().powf(1.0 / d as f64);
    let t = rng.gen::<f64>();
    if norm == 0.0 {
        return None;
    }
    dir.iter_mut().for_each(|c| *c *= radius / norm);
    let point = ConePoint::new(dir, t);
    accept(&point, axis_margin, boundary_margin).then_some(point)
}

fn accept(p: &ConePoint<f64>, axis_margin: f64, boundary_margin: f64) -> bool {
    let rho = p.x_norm();
    let slack = 1.0 - rho - p.t;
    slack >= 0.0 && rho >= axis_margin && p.t >= boundary_margin && slack >= boundary_margin * 2f64.sqrt()
}

/// Seeded rejection sampling of `count` points (see [`draw_interior`]); fails when
/// fewer than one draw in a thousand is accepted.
pub fn sample_cone_interior(
    n: usize,
    count: usize,
    seed: u64,
    axis_margin: f64,
    boundary_margin: f64,
) -> Result<InteriorSample> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    if !(axis_margin >= 0.0 && boundary_margin >= 0.0) {
        return Err(Error::InvalidParameter("margins must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0u64;
    while points.len() < count {
        attempts += 1;
        if let Some(p) = draw_interior(&mut rng, n, axis_margin, boundary_margin) {
            points.push(p);
        }
        if attempts >= 1000 && (points.len() as f64) < 1e-3 * attempts as f64 {
            return Err(Error::Degenerate(format!(
                "acceptance rate {} after {attempts} draws",
                points.len() as f64 / attempts as f64
            )));
        }
    }
    Ok(InteriorSample { acceptance_rate: count as f64 / attempts.max(1) as f64, points, attempts })
}

/// `count` low-discrepancy points of the upper cone at distance `≥ margin` from
/// the axis and the boundary.
pub fn quasi_interior_points(n: usize, count: usize, seed: u64, margin: f64) -> Vec<ConePoint<f64>> {
    let d = n - 1;
    let halton = Halton::new(2 + direction_dims(d), seed);
    let mut points = Vec::with_capacity(count);
    let mut index = 0;
    while points.len() < count {
        let u = halton.point(index);
        index += 1;
        let radius = u[0].powf(1.0 / d as f64);
        let x = direction(d, &u[2..]).into_iter().map(|c| c * radius).collect();
        let p = ConePoint::new(x, u[1]);
        if accept(&p, margin, margin) {
            points.push(p);
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn ball_and_cone_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-15);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        assert_eq!(upper_cone_volume(2), 1.0);
        assert_relative_eq!(upper_cone_volume(3), PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn halton_is_prefix_stable_and_in_range() {
        let h = Halton::new(3, 11);
        let a: Vec<Vec<f64>> = (0..50).map(|i| h.point(i)).collect();
        let b: Vec<Vec<f64>> = (0..50).map(|i| Halton::new(3, 11).point(i)).collect();
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|&c| (0.0..1.0).contains(&c)));
        assert_ne!(Halton::new(3, 12).point(0), a[0]);
    }

    #[test]
    fn sphere_examples() {
        let pts = sample_cone_sphere(3, 0.5, NormKind::Cone, Half::Upper, 3, 7, true).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| (p.cone_norm() - 0.5).abs() <= 1e-15));
        assert!(pts.contains(&ConePoint::axis(3, 0.5)));
        assert_eq!(pts, sample_cone_sphere(3, 0.5, NormKind::Cone, Half::Upper, 3, 7, true).unwrap());
        assert!(sample_cone_sphere(3, 1.5, NormKind::Cone, Half::Upper, 3, 7, true).is_err());
        assert!(sample_cone_sphere(3, 1.5, NormKind::Cone, Half::Upper, 3, 7, false).is_ok());
    }

    #[test]
    fn sphere_norms_and_halves() {
        for n in 2..=6 {
            for (norm, half) in [
                (NormKind::Cone, Half::Both),
                (NormKind::Euclid, Half::Both),
                (NormKind::Euclid, Half::Upper),
                (NormKind::Cone, Half::Lower),
            ] {
                let r = 0.3;
                let pts = sample_cone_sphere(n, r, norm, half, 500, 3, false).unwrap();
                assert_eq!(pts.len(), 500);
                for p in &pts {
                    assert!((p.norm(norm) - r).abs() <= 1e-14, "{n} {norm:?} {p:?}");
                    match half {
                        Half::Upper => assert!(p.t >= 0.0),
                        Half::Lower => assert!(p.t <= 0.0),
                        Half::Both => {}
                    }
                }
                if half == Half::Both {
                    assert!(pts.contains(&ConePoint::axis(n, r)) && pts.contains(&ConePoint::axis(n, -r)));
                }
            }
        }
    }

    #[test]
    fn larger_samples_extend_smaller_ones() {
        let small = sample_cone_sphere(4, 0.2, NormKind::Cone, Half::Both, 64, 9, true).unwrap();
        let large = sample_cone_sphere(4, 0.2, NormKind::Cone, Half::Both, 256, 9, true).unwrap();
        assert_eq!(&large[..64], &small[..]);
    }

    #[test]
    fn interior_acceptance_matches_cone_volume() {
        for n in [2usize, 3] {
            let s = sample_cone_interior(n, 100_000, 5, 0.0, 0.0).unwrap();
            assert!((s.acceptance_rate - 1.0 / n as f64).abs() < 0.01, "{n}: {}", s.acceptance_rate);
            assert!(s.points.iter().all(|p| p.in_upper_cone()));
        }
        let a = sample_cone_interior(3, 100, 1, 1e-6, 1e-6).unwrap();
        let b = sample_cone_interior(3, 100, 1, 1e-6, 1e-6).unwrap();
        assert_eq!(a.points, b.points);
        assert!(matches!(sample_cone_interior(2, 10, 1, 0.6, 0.3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn quasi_interior_points_respect_margins() {
        let pts = quasi_interior_points(3, 1000, 2, 1e-3);
        assert_eq!(pts.len(), 1000);
        assert!(pts.iter().all(|p| p.in_upper_cone() && p.x_norm() >= 1e-3 && p.t >= 1e-3));
    }
}
