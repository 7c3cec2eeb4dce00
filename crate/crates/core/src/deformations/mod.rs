//! The cone map `H`, its inverse `F`, the glued double-cone homeomorphism and
//! radial stretchings, all behind the [`Deformation`] trait.

mod cone;
mod radial;

pub use cone::{ConeMap, GluedMap, JacobianData};
pub use radial::{RadialMap, Stress};

use crate::error::Result;
use crate::geometry::ConePoint;
use crate::scalar::Scalar;

/// A homeomorphism with an exact inverse.
pub trait Deformation<T: Scalar>: Send + Sync {
    /// Ambient dimension `n`.
    fn dim(&self) -> usize;

    fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>>;

    fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>>;

    /// Whether `x` lies in the domain of [`Deformation::eval`].
    fn contains(&self, _x: &ConePoint<T>) -> bool {
        true
    }

    fn describe(&self) -> String;
}

/// The identity of `ℝ^n`.
#[derive(Clone, Copy, Debug)]
pub struct IdentityMap {
    pub n: usize,
}

impl<T: Scalar> Deformation<T> for IdentityMap {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>> {
        Ok(x.clone())
    }

    fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>> {
        Ok(y.clone())
    }

    fn describe(&self) -> String {
        format!("identity:n={}", self.n)
    }
}

/// Swaps the roles of a map and its inverse.
#[derive(Clone, Copy, Debug)]
pub struct InverseOf<'a, D: ?Sized>(pub &'a D);

impl<T: Scalar, D: Deformation<T> + ?Sized> Deformation<T> for InverseOf<'_, D> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>> {
        self.0.inverse(x)
    }

    fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>> {
        self.0.eval(y)
    }

    fn contains(&self, x: &ConePoint<T>) -> bool {
        self.0.contains(x)
    }

    fn describe(&self) -> String {
        format!("inverse({})", self.0.describe())
    }
}
