use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::geometry::{quasi_interior_points, NormKind};

type Phi = ModulusFunction<f64>;

fn admissible(n: usize) -> Vec<Phi> {
    let mut list = vec![Phi::identity(n).unwrap(), Phi::power(0.5, n).unwrap()];
    list.extend((1..=3).map(|k| Phi::iter_log(k, 1.0, n).unwrap()));
    list
}

#[test]
fn axis_and_base() {
    let map = ConeMap::new(Phi::iter_log(2, 1.0, 3).unwrap());
    for &t in &[1e-12, 1e-3, 0.25, 1.0] {
        let image = map.eval(&ConePoint::axis(3, t)).unwrap();
        assert_eq!(image.x, vec![0.0, 0.0]);
        assert_relative_eq!(image.t, map.phi().eval(t), max_relative = 1e-14);
    }
    let base = ConePoint::new(vec![0.4, 0.0], 0.0);
    assert_eq!(map.eval(&base).unwrap(), base);
    assert_eq!(map.eval(&ConePoint::origin(3)).unwrap(), ConePoint::origin(3));
    assert!(map.eval(&ConePoint::new(vec![0.6, 0.0], 0.5)).is_err());
    assert!(map.eval(&ConePoint::new(vec![0.1, 0.0], -0.1)).is_err());
}

#[test]
fn boundary_of_cone_is_fixed() {
    let map = ConeMap::new(Phi::iter_log(1, 1.0, 2).unwrap());
    for &t in &[0.1, 0.5, 0.9] {
        let p = ConePoint::new(vec![1.0 - t], t);
        let image = map.eval(&p).unwrap();
        assert_relative_eq!(image.t, t, max_relative = 1e-15);
    }
}

#[test]
fn identity_phi_gives_identity_map() {
    let map = ConeMap::new(Phi::identity(3).unwrap());
    for p in quasi_interior_points(3, 200, 1, 1e-6) {
        assert_eq!(map.eval(&p).unwrap(), p);
        assert_eq!(map.inverse(&p).unwrap(), p);
        let jac = map.jacobian(&p).unwrap();
        assert_eq!(jac.matrix, DMatrix::identity(3, 3));
        assert_eq!(jac.det, 1.0);
        assert_relative_eq!(jac.hs_norm * jac.hs_norm, 3.0, max_relative = 1e-15);
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    for n in [2usize, 3] {
        for phi in admissible(n) {
            let map = ConeMap::new(phi);
            for p in quasi_interior_points(n, 300, 3, 1e-3) {
                let jac = map.jacobian(&p).unwrap();
                let h = 1e-6;
                for j in 0..n {
                    let mut plus: Vec<f64> = p.coords().collect();
                    let mut minus = plus.clone();
                    plus[j] += h;
                    minus[j] -= h;
                    let fp = map.eval(&ConePoint::from_coords(&plus).unwrap()).unwrap();
                    let fm = map.eval(&ConePoint::from_coords(&minus).unwrap()).unwrap();
                    for (i, (a, b)) in fp.coords().zip(fm.coords()).enumerate() {
                        let fd = (a - b) / (2.0 * h);
                        let exact = jac.matrix[(i, j)];
                        assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "{} {p:?} ({i},{j}): {exact} vs {fd}", map.describe());
                    }
                }
            }
        }
    }
}

#[test]
fn jacobian_algebra() {
    let map = ConeMap::new(Phi::iter_log(2, 1.0, 4).unwrap());
    for p in quasi_interior_points(4, 200, 8, 1e-4) {
        let jac = map.jacobian(&p).unwrap();
        let hs2: f64 = jac.matrix.iter().map(|v| v * v).sum();
        assert_relative_eq!(jac.hs_norm * jac.hs_norm, hs2, max_relative = 1e-12);
        let inv2: f64 = jac.inverse.iter().map(|v| v * v).sum();
        assert_relative_eq!(jac.inv_hs_norm * jac.inv_hs_norm, inv2, max_relative = 1e-12);
        let oracle = jac.matrix.clone().try_inverse().unwrap();
        assert!((&oracle - &jac.inverse).amax() <= 1e-12 * oracle.amax());
        assert_relative_eq!(jac.matrix.determinant(), jac.det, max_relative = 1e-12);
        // Cramer: det · A^{-1} is the adjugate; its HS norm is the cofactor norm
        let adjugate = &jac.inverse * jac.det;
        assert_relative_eq!(adjugate.norm(), jac.cofactor_norm, max_relative = 1e-12);
        assert_relative_eq!(jac.inner_distortion, jac.cofactor_norm.powi(4) / jac.det.powi(3), max_relative = 1e-12);
    }
}

#[test]
fn jacobian_refuses_axis_and_boundary() {
    let map = ConeMap::new(Phi::power(0.5, 2).unwrap());
    assert!(map.jacobian(&ConePoint::axis(2, 0.3)).is_err());
    assert!(map.jacobian(&ConePoint::new(vec![0.3], 0.0)).is_err());
    assert!(map.jacobian(&ConePoint::new(vec![0.5], 0.5)).is_err());
}

#[test]
fn determinant_bounds() {
    for n in [2usize, 3] {
        for phi in admissible(n) {
            let m = phi.m_constant;
            let map = ConeMap::new(phi);
            for p in quasi_interior_points(n, 2000, 5, 1e-6) {
                let jac = map.jacobian(&p).unwrap();
                let lambda = map.phi().lambda(p.cone_norm()).unwrap();
                assert!(jac.det >= 1.0 / m - 1e-12 && jac.det <= lambda + 1e-12);
            }
        }
    }
}

#[test]
fn inverse_round_trip_and_axis() {
    for n in [2usize, 3] {
        for phi in admissible(n) {
            let map = ConeMap::new(phi);
            for p in quasi_interior_points(n, 1000, 6, 0.0) {
                let back = map.inverse(&map.eval(&p).unwrap()).unwrap();
                assert!(back.distance(&p, NormKind::Cone) <= 1e-9);
            }
            for &t in &[1e-9, 1e-4, 0.3] {
                let y = ConePoint::axis(n, map.phi().eval(t));
                assert_relative_eq!(map.inverse(&y).unwrap().t, t, max_relative = 1e-6);
            }
        }
    }
}

#[test]
fn sandwich_bounds() {
    let map = ConeMap::new(Phi::iter_log(2, 1.0, 3).unwrap());
    for p in quasi_interior_points(3, 1000, 9, 0.0) {
        let h = map.eval(&p).unwrap();
        let phi = map.phi();
        assert_eq!(h.x, p.x);
        assert!(p.cone_norm() <= h.cone_norm() + 1e-15 && h.cone_norm() <= phi.eval(p.cone_norm()) + 1e-15);
        assert!(p.euclid_norm() <= h.euclid_norm() + 1e-15 && h.euclid_norm() <= phi.eval(p.euclid_norm()) + 1e-15);
        let f = map.inverse(&p).unwrap();
        let psi = phi.invert(p.euclid_norm(), 1e-13).unwrap();
        assert!(psi <= f.euclid_norm() + 1e-12 && f.euclid_norm() <= p.euclid_norm() + 1e-12);
    }
}

#[test]
fn inverse_height_derivative_bounds() {
    let map = ConeMap::new(Phi::iter_log(1, 1.0, 2).unwrap()).with_tolerance(1e-15);
    let m = map.phi().m_constant;
    let r = map.phi().concavity_radius;
    let h = 1e-7;
    for p in quasi_interior_points(2, 500, 10, 1e-3) {
        let height = |y: f64, tau: f64| map.inverse(&ConePoint::new(vec![y], tau)).unwrap().t;
        let (y, tau) = (p.x[0].abs(), p.t);
        if y + tau + h >= 1.0 || y <= h {
            continue;
        }
        let d_tau = (height(y, tau + h) - height(y, tau - h)) / (2.0 * h);
        assert!(d_tau >= -1e-6 && d_tau <= m + 1e-6, "{d_tau}");
        if p.cone_norm() <= r / m {
            let d_y = (height(y + h, tau) - height(y - h, tau)) / (2.0 * h);
            assert!(d_y >= -1e-6 && d_y <= m * map.phi().derivative(y).unwrap() + 1e-6);
        }
    }
}

#[test]
fn glued_map_pieces() {
    let glued = GluedMap::new(Phi::iter_log(2, 1.0, 2).unwrap());
    let phi = glued.phi().clone();
    // ψ(1e-6) underflows for this φ: the lower axis collapses onto the origin
    let deep = glued.eval(&ConePoint::axis(2, -1e-6)).unwrap();
    assert!(deep.t <= 0.0 && deep.t > -1e-300);
    for &t in &[0.02, 0.1, 0.5] {
        let up = glued.eval(&ConePoint::axis(2, t)).unwrap();
        assert_relative_eq!(up.t, phi.eval(t), max_relative = 1e-14);
        let down = glued.eval(&ConePoint::axis(2, -t)).unwrap();
        assert_relative_eq!(down.t, -phi.invert(t, 1e-14).unwrap(), max_relative = 1e-6);
        let f_up = glued.inverse(&ConePoint::axis(2, t)).unwrap();
        assert_relative_eq!(f_up.t, phi.invert(t, 1e-14).unwrap(), max_relative = 1e-6);
        let f_down = glued.inverse(&ConePoint::axis(2, -t)).unwrap();
        assert_relative_eq!(f_down.t, -phi.eval(t), max_relative = 1e-14);
    }
    let outside = ConePoint::new(vec![1.0], 0.5);
    assert_eq!(glued.eval(&outside).unwrap(), outside);
    for &x in &[-0.7, 1e-2, 0.3] {
        let above = glued.eval(&ConePoint::new(vec![x], 1e-14)).unwrap();
        let below = glued.eval(&ConePoint::new(vec![x], -1e-14)).unwrap();
        assert!(above.distance(&below, NormKind::Euclid) <= 1e-12);
    }
}

#[test]
fn glued_round_trip_and_injectivity() {
    let glued = GluedMap::new(Phi::iter_log(1, 1.0, 3).unwrap());
    let mut points = quasi_interior_points(3, 300, 12, 0.0);
    points.extend(points.clone().iter().map(|p| p.reflect()));
    points.push(ConePoint::new(vec![0.9, 0.4], 0.3));
    let images: Vec<_> = points.iter().map(|p| glued.eval(p).unwrap()).collect();
    for (p, y) in points.iter().zip(&images) {
        assert!(glued.inverse(y).unwrap().distance(p, NormKind::Cone) <= 1e-9);
    }
    for i in 0..points.len() {
        for j in 0..i {
            if points[i].distance(&points[j], NormKind::Cone) >= 1e-6 {
                assert!(images[i].distance(&images[j], NormKind::Cone) > 1e-12);
            }
        }
    }
}

#[test]
fn single_precision_cone_map() {
    let map = ConeMap::new(ModulusFunction::<f32>::iter_log(1, 1.0, 2).unwrap());
    let p = ConePoint::<f32>::new(vec![0.2], 0.3);
    let back = map.inverse(&map.eval(&p).unwrap()).unwrap();
    assert!(back.distance(&p, NormKind::Cone) < 1e-5);
    let jac = map.jacobian(&p).unwrap();
    assert!(jac.det > 0.0);
}

proptest! {
    #[test]
    fn round_trip_any_point(rho in 0.0f64..1.0, frac in 0.0f64..=1.0, k in 1usize..=3) {
        let map = ConeMap::new(Phi::iter_log(k, 1.0, 2).unwrap());
        let p = ConePoint::new(vec![rho], (1.0 - rho) * frac);
        let back = map.inverse(&map.eval(&p).unwrap()).unwrap();
        prop_assert!(back.distance(&p, NormKind::Cone) <= 1e-9);
    }
}
