use nalgebra::DMatrix;

use super::Deformation;
use crate::error::{Error, Result};
use crate::geometry::ConePoint;
use crate::modulus::ModulusFunction;
use crate::roots::{bisect_increasing, Midpoint};
use crate::scalar::Scalar;

/// `H(x, t) = (x, t λ(t + |x|))` on the upper cone.
#[derive(Clone, Debug)]
pub struct ConeMap<T: Scalar> {
    phi: ModulusFunction<T>,
    /// Residual tolerance of the scalar equation solved by [`ConeMap::inverse`].
    pub tol: T,
}

/// Jacobian of `H` at an interior off-axis point.
#[derive(Clone, Debug)]
pub struct JacobianData<T: Scalar> {
    pub matrix: DMatrix<T>,
    pub inverse: DMatrix<T>,
    /// `𝔇 = J_H = λ + t λ'`.
    pub det: T,
    /// `|DH|`.
    pub hs_norm: T,
    /// `|(DH)^{-1}|`.
    pub inv_hs_norm: T,
    /// `|D♯H| = J_H |(DH)^{-1}|`.
    pub cofactor_norm: T,
    /// `K_H = |(DH)^{-1}|^n J_H`.
    pub inner_distortion: T,
}

fn slack<T: Scalar>() -> T {
    T::epsilon() * T::lit(8.0)
}

fn in_upper<T: Scalar>(p: &ConePoint<T>) -> bool {
    p.t >= T::zero() && p.x_norm() + p.t <= T::one() + slack::<T>()
}

impl<T: Scalar> ConeMap<T> {
    pub fn new(phi: ModulusFunction<T>) -> Self {
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
        Self { phi, tol }
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn phi(&self) -> &ModulusFunction<T> {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.dimension()
    }

    fn check(&self, p: &ConePoint<T>, what: &str) -> Result<()> {
        if p.dim() != self.n() {
            return Err(Error::InvalidParameter(format!("{what} has dimension {}, map has {}", p.dim(), self.n())));
        }
        if !in_upper(p) {
            return Err(Error::OutOfDomain(format!("{what} {:?} is not in the upper cone", p)));
        }
        Ok(())
    }

    /// `H(X)`; the base `t = 0` and the origin are fixed.
    pub fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>> {
        self.check(x, "X")?;
        let s = x.x_norm() + x.t;
        if x.t == T::zero() || s == T::zero() {
            return Ok(x.clone());
        }
        Ok(ConePoint::new(x.x.clone(), x.t * self.phi.lambda(s)?))
    }

    /// `F(Y) = (y, T)` where `T λ(T + |y|) = τ`, by bisection on `[0, min(1 - |y|, Mτ)]`.
    pub fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>> {
        self.check(y, "Y")?;
        let tau = y.t;
        if tau == T::zero() {
            return Ok(y.clone());
        }
        let rho = y.x_norm();
        let hi = (T::one() - rho).min(self.phi.m_constant * tau).max(T::zero());
        let residual = |height: T| -> T {
            let s = height + rho;
            if s <= T::zero() {
                return -tau;
            }
            height * self.phi.lambda(s).unwrap_or(T::one()) - tau
        };
        let height = bisect_increasing(residual, T::zero(), hi, self.tol, Midpoint::Geometric)?;
        Ok(ConePoint::new(y.x.clone(), height))
    }

    /// `DH(X)` for `X` interior to the upper cone and off the axis.
    pub fn jacobian(&self, x: &ConePoint<T>) -> Result<JacobianData<T>> {
        self.check(x, "X")?;
        let rho = x.x_norm();
        let s = rho + x.t;
        if rho == T::zero() {
            return Err(Error::OutOfDomain("DH is not defined on the axis x = 0".into()));
        }
        if !(x.t > T::zero() && s < T::one()) {
            return Err(Error::OutOfDomain(format!("DH is only evaluated in the open cone, got {:?}", x)));
        }
        let (lambda, q) = self.phi.lambda_with_slope(s)?;
        let theta = x.t / s;
        // t λ'(s) = -θ λ q
        let t_lambda_prime = -theta * lambda * q;
        let det = lambda * (T::one() - theta * q);
        let n = self.n();
        let mut matrix = DMatrix::<T>::identity(n, n);
        let mut inverse = DMatrix::<T>::identity(n, n);
        for i in 0..n - 1 {
            let d_i = t_lambda_prime * x.x[i] / rho;
            matrix[(n - 1, i)] = d_i;
            inverse[(n - 1, i)] = -d_i / det;
        }
        matrix[(n - 1, n - 1)] = det;
        inverse[(n - 1, n - 1)] = T::one() / det;

        let rest = T::from_usize_lossy(n - 1);
        let hs_norm = (rest + t_lambda_prime * t_lambda_prime + det * det).sqrt();
        let inv_hs_norm = ((T::one() + t_lambda_prime * t_lambda_prime) / (det * det) + rest).sqrt();
        Ok(JacobianData {
            matrix,
            inverse,
            det,
            hs_norm,
            inv_hs_norm,
            cofactor_norm: det * inv_hs_norm,
            inner_distortion: inv_hs_norm.powi(n as i32) * det,
        })
    }

    /// `DF(Y) = [DH(F(Y))]^{-1}` together with the Jacobian data at `F(Y)`.
    pub fn inverse_jacobian(&self, y: &ConePoint<T>) -> Result<JacobianData<T>> {
        self.jacobian(&self.inverse(y)?)
    }
}

impl<T: Scalar> Deformation<T> for ConeMap<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>> {
        ConeMap::eval(self, x)
    }

    fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>> {
        ConeMap::inverse(self, y)
    }

    fn contains(&self, x: &ConePoint<T>) -> bool {
        in_upper(x)
    }

    fn describe(&self) -> String {
        format!("cone:phi={}", self.phi.spec())
    }
}

/// `H` on the upper cone, `𝔯 F 𝔯` on the lower cone, identity outside the double cone.
#[derive(Clone, Debug)]
pub struct GluedMap<T: Scalar> {
    pub cone_map: ConeMap<T>,
}

impl<T: Scalar> GluedMap<T> {
    pub fn new(phi: ModulusFunction<T>) -> Self {
        Self { cone_map: ConeMap::new(phi) }
    }

    pub fn phi(&self) -> &ModulusFunction<T> {
        self.cone_map.phi()
    }

    fn dispatch(&self, p: &ConePoint<T>, forward: bool) -> Result<ConePoint<T>> {
        if p.dim() != self.cone_map.n() {
            return Err(Error::InvalidParameter(format!("point has dimension {}, map has {}", p.dim(), self.cone_map.n())));
        }
        let rho = p.x_norm();
        if rho + p.t.abs() > T::one() {
            return Ok(p.clone());
        }
        let upper = |q: &ConePoint<T>| if forward { self.cone_map.eval(q) } else { self.cone_map.inverse(q) };
        let lower = |q: &ConePoint<T>| if forward { self.cone_map.inverse(q) } else { self.cone_map.eval(q) };
        if p.t >= T::zero() {
            upper(p)
        } else {
            Ok(lower(&p.reflect())?.reflect())
        }
    }
}

impl<T: Scalar> Deformation<T> for GluedMap<T> {
    fn dim(&self) -> usize {
        self.cone_map.n()
    }

    fn eval(&self, x: &ConePoint<T>) -> Result<ConePoint<T>> {
        self.dispatch(x, true)
    }

    fn inverse(&self, y: &ConePoint<T>) -> Result<ConePoint<T>> {
        self.dispatch(y, false)
    }

    fn describe(&self) -> String {
        format!("glued:phi={}", self.phi().spec())
    }
}

#[cfg(test)]
mod tests;
