//! Points of `ℝ^{n-1} × ℝ`, the cone norm `‖(x, t)‖ = |x| + |t|`, and the double cone.

mod sampling;

pub use sampling::{
    draw_interior, quasi_interior_points, sample_cone_interior, sample_cone_sphere, unit_ball_volume, upper_cone_volume, Halton,
    InteriorSample,
};

use std::ops::Sub;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which norm measures distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Cone,
    Euclid,
}

/// Half of the double cone a sampler is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Upper,
    Lower,
    Both,
}

/// `X = (x, t)` with `x ∈ ℝ^{n-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint<T> {
    pub x: Vec<T>,
    pub t: T,
}

impl<T: Scalar> ConePoint<T> {
    pub fn new(x: Vec<T>, t: T) -> Self {
        Self { x, t }
    }

    /// Builds a point from `n` coordinates, the last being `t`.
    pub fn from_coords(coords: &[T]) -> Result<Self> {
        match coords.split_last() {
            Some((&t, x)) if !x.is_empty() => Ok(Self { x: x.to_vec(), t }),
            _ => Err(Error::InvalidParameter(format!("a cone point needs at least 2 coordinates, got {}", coords.len()))),
        }
    }

    pub fn origin(n: usize) -> Self {
        Self { x: vec![T::zero(); n - 1], t: T::zero() }
    }

    /// `(0, t)` in dimension `n`.
    pub fn axis(n: usize, t: T) -> Self {
        Self { x: vec![T::zero(); n - 1], t }
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.x.len() + 1
    }

    pub fn coords(&self) -> impl Iterator<Item = T> + '_ {
        self.x.iter().copied().chain(std::iter::once(self.t))
    }

    /// `|x|`.
    pub fn x_norm(&self) -> T {
        self.x.iter().fold(T::zero(), |acc, &v| acc.hypot(v))
    }

    pub fn cone_norm(&self) -> T {
        self.x_norm() + self.t.abs()
    }

    pub fn euclid_norm(&self) -> T {
        self.x_norm().hypot(self.t)
    }

    pub fn norm(&self, kind: NormKind) -> T {
        match kind {
            NormKind::Cone => self.cone_norm(),
            NormKind::Euclid => self.euclid_norm(),
        }
    }

    /// `𝔯(x, t) = (x, -t)`.
    pub fn reflect(&self) -> Self {
        Self { x: self.x.clone(), t: -self.t }
    }

    pub fn in_upper_cone(&self) -> bool {
        self.t >= T::zero() && self.x_norm() + self.t <= T::one()
    }

    pub fn in_lower_cone(&self) -> bool {
        self.t <= T::zero() && self.x_norm() - self.t <= T::one()
    }

    pub fn in_double_cone(&self) -> bool {
        self.cone_norm() <= T::one()
    }

    pub fn is_on_axis(&self) -> bool {
        self.x.iter().all(|v| *v == T::zero())
    }

    pub fn distance(&self, other: &Self, kind: NormKind) -> T {
        (self - other).norm(kind)
    }

    pub fn scale(&self, factor: T) -> Self {
        Self { x: self.x.iter().map(|&v| v * factor).collect(), t: self.t * factor }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { x: self.x.iter().zip(&other.x).map(|(&a, &b)| a + b).collect(), t: self.t + other.t }
    }

    pub fn cast<U: Scalar>(&self) -> ConePoint<U> {
        ConePoint { x: self.x.iter().map(|&v| U::lit(v.to_f64_lossy())).collect(), t: U::lit(self.t.to_f64_lossy()) }
    }
}

impl<T: Scalar> Sub for &ConePoint<T> {
    type Output = ConePoint<T>;

    fn sub(self, rhs: Self) -> ConePoint<T> {
        ConePoint { x: self.x.iter().zip(&rhs.x).map(|(&a, &b)| a - b).collect(), t: self.t - rhs.t }
    }
}
