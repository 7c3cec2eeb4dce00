use super::Deformation;
use crate::error::{Error, Result};
use crate::geometry::ConePoint;
use crate::roots::{bisect_increasing, Midpoint};
use crate::scalar::Scalar;

/// Increasing stress function `𝐇` with `𝐇(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stress<T> {
    /// `𝐇(r) = r^ε`.
    Power { eps: T },
    /// `𝐇(r) = (1 - log r)^{-1/n} [log(e - log r)]^{-β}` on `(0, 1]`, identity beyond.
    LogExample { beta: T, n: usize },
}

impl<T: Scalar> Stress<T> {
    pub fn eval(&self, r: T) -> T {
        if r <= T::zero() {
            return T::zero();
        }
        match *self {
            Stress::Power { eps } => r.powf(eps),
            Stress::LogExample { beta, n } => {
                if r >= T::one() {
                    return r;
                }
                let depth = -r.ln();
                let log_value = -(T::one() + depth).ln() / T::from_usize_lossy(n) - beta * (T::E() + depth).ln().ln();
                log_value.exp()
            }
        }
    }

    /// `𝐅 = 𝐇^{-1}`.
    pub fn inverse(&self, v: T, tol: T) -> Result<T> {
        if v <= T::zero() {
            return Ok(T::zero());
        }
        match *self {
            Stress::Power { eps } => Ok(v.powf(T::one() / eps)),
            Stress::LogExample { .. } => {
                if v >= T::one() {
                    return Ok(v);
                }
                bisect_increasing(|r| self.eval(r) - v, T::zero(), T::one(), tol, Midpoint::Geometric)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Stress::Power { eps } => format!("power:eps={eps}"),
            Stress::LogExample { beta, n } => format!("logexample:beta={beta},n={n}"),
        }
    }
}

/// `h(X) = 𝐇(|X|) X/|X|` on `ℝ^n`.
#[derive(Clone, Copy, Debug)]
pub struct RadialMap<T> {
    pub stress: Stress<T>,
    pub n: usize,
    pub tol: T,
}

impl<T: Scalar> RadialMap<T> {
    pub fn new(stress: Stress<T>, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
        }
        match stress {
            Stress::Power { eps } if !(eps > T::zero()) => {
                return Err(Error::InvalidParameter(format!("radial power exponent must be positive, got {eps}")))
            }
            Stress::LogExample { beta, .. } if !(beta > T::zero()) => {
                return Err(Error::InvalidParameter(format!("β must be positive, got {beta}")))
            }
            _ => {}
        }
        Ok(Self { stress, n, tol: T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) })
    }

    fn apply(&self, v: &[T], radius: impl Fn(T) -> Result<T>) -> Result<Vec<T>> {
        let norm = v.iter().fold(T::zero(), |acc, &c| acc.hypot(c));
        if norm == T::zero() {
            return Ok(v.to_vec());
        }
        let factor = radius(norm)? / norm;
        Ok(v.iter().map(|&c| c * factor).collect())
    }

    pub fn radial_eval(&self, x: &[T]) -> Result<Vec<T>> {
        self.apply(x, |r| Ok(self.stress.eval(r)))
    }

    pub fn radial_inverse(&self, y: &[T]) -> Result<Vec<T>> {
        self.apply(y, |r| self.stress.inverse(r, self.tol))
    }
}

impl<T: Scalar> Deformation<T> for RadialMap<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>> {
        ConePoint::from_coords(&self.radial_eval(&x.coords().collect::<Vec<_>>())?)
    }

    fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>> {
        ConePoint::from_coords(&self.radial_inverse(&y.coords().collect::<Vec<_>>())?)
    }

    fn describe(&self) -> String {
        format!("radial:{},n={}", self.stress.describe(), self.n)
    }
}
