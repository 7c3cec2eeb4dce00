//! Admissible modulus-of-continuity functions φ and their calculus.
//!
//! A family is normalised by `φ(0) = 0`, `φ(1) = 1` and extended by `φ(s) = s`
//! for `s ≥ 1`. Inside `(0, 1]` every built-in family is evaluated through its
//! *log profile*: with `L = log(1/s)` we have `φ = exp(g(L))`, and the closed
//! forms of `g`, `g'`, `g''` give
//!
//! ```text
//! φ'(s)  = -(φ/s) g'(L)
//! φ''(s) = (φ/s²) (g' + g'' + g'²)
//! λ(s)   = φ(s)/s,   s λ'(s) = -λ(s) (1 + g'(L))
//! ```
//!
//! Working in `L` keeps everything finite for `s` far below the smallest
//! positive float, which matters for the iterated-logarithm families whose
//! interesting behaviour lives at `s = exp(-10^k)`.

mod analysis;
mod chart;

use std::fmt;
use std::sync::Arc;

pub use analysis::{sample_grid, EnergyValue, QuasiInverseDefect, DEFAULT_T_MIN};
pub use chart::{ChartPoint, EnergyChart};

use crate::error::{Error, Result};
use crate::roots::{bisect_increasing, Midpoint};
use crate::scalar::Scalar;

/// Deepest iterated logarithm supported; depth 6 would need `e↑↑4`, which overflows.
pub const MAX_DEPTH: usize = 5;

/// Grid used when measuring `M` and `r` at construction time.
pub const CALIBRATION_GRID: usize = 2048;

/// User-supplied φ on `(0, 1)`.
#[derive(Clone)]
pub struct CustomFn<T> {
    label: String,
    func: Arc<dyn Fn(T) -> T + Send + Sync>,
}

impl<T> CustomFn<T> {
    pub fn label(&self) -> &str {
        &self.label
    }
}

impl<T> fmt::Debug for CustomFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn").field("label", &self.label).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum Family<T> {
    /// `φ(s) = s`.
    Identity,
    /// `φ(s) = s^ε`, `0 < ε ≤ 1`.
    Power { eps: T },
    /// `φ(s) = Π_{j<k} (1 + a_j ℓ_j)^{-1/n} · (1 + a_k ℓ_k)^{-α}` with
    /// `ℓ_j(s) = log^{(j)}(e↑↑(j-1) / s)`.
    IterLog { depth: usize, alpha: T },
    /// Evaluation only; derivatives by central differences.
    Custom(CustomFn<T>),
}

/// `log φ` and its first two derivatives with respect to `L = log(1/s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogProfile<T> {
    pub log_phi: T,
    pub dlog: T,
    pub d2log: T,
}

#[derive(Clone, Debug)]
pub struct ModulusFunction<T: Scalar> {
    family: Family<T>,
    dimension: usize,
    coefficients: Vec<T>,
    /// Constant of the two-sided derivative condition, measured.
    pub m_constant: T,
    /// Right end of the interval `(0, r]` where φ is concave, measured.
    pub concavity_radius: T,
}

/// `e↑↑m`: 1, e, e^e, e^{e^e}, ...
pub(crate) fn tower<T: Scalar>(m: usize) -> T {
    (0..m).fold(T::one(), |acc, _| acc.exp())
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension n must be at least 2, got {n}")));
    }
    Ok(())
}

impl<T: Scalar> ModulusFunction<T> {
    pub fn identity(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self::assemble(Family::Identity, n, Vec::new()))
    }

    pub fn power(eps: T, n: usize) -> Result<Self> {
        check_dimension(n)?;
        if !(eps > T::zero() && eps <= T::one()) {
            return Err(Error::InvalidParameter(format!("power exponent must lie in (0, 1], got {eps}")));
        }
        Ok(Self::assemble(Family::Power { eps }, n, Vec::new()))
    }

    /// Iterated-logarithm family of depth `k`.
    ///
    /// Any `α ∈ (0, 1]` is accepted; finiteness of the energy (`α > 1/n`) is a
    /// property checked by [`ModulusFunction::check_conditions`], not a constructor
    /// precondition, so failing cases can be studied.
    pub fn iter_log(depth: usize, alpha: T, n: usize) -> Result<Self> {
        check_dimension(n)?;
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::InvalidParameter(format!("iterated-log depth must be in 1..={MAX_DEPTH}, got {depth}")));
        }
        if !(alpha > T::zero() && alpha <= T::one()) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        let coefficients = (0..depth)
            .map(|j| T::from_usize_lossy((n - 1).pow(j as u32)) / T::from_usize_lossy(n.pow(j as u32)))
            .collect();
        Ok(Self::assemble(Family::IterLog { depth, alpha }, n, coefficients))
    }

    /// Wraps a user-supplied φ on `(0, 1)`; values outside are fixed by the normalisation.
    pub fn custom<F>(label: impl Into<String>, func: F, n: usize) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        check_dimension(n)?;
        let custom = CustomFn { label: label.into(), func: Arc::new(func) };
        Ok(Self::assemble(Family::Custom(custom), n, Vec::new()))
    }

    fn assemble(family: Family<T>, dimension: usize, coefficients: Vec<T>) -> Self {
        let mut phi = Self { family, dimension, coefficients, m_constant: T::one(), concavity_radius: T::one() };
        phi.m_constant = phi.measure_m(CALIBRATION_GRID, true);
        phi.concavity_radius = phi.measure_concavity_radius(CALIBRATION_GRID);
        phi
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `a_j = (1 - 1/n)^{j-1}`; empty unless the family is iterated-log.
    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Canonical textual form, e.g. `iterlog:k=2,alpha=1,n=2`.
    pub fn spec(&self) -> String {
        match &self.family {
            Family::Identity => format!("identity:n={}", self.dimension),
            Family::Power { eps } => format!("power:eps={},n={}", eps, self.dimension),
            Family::IterLog { depth, alpha } => format!("iterlog:k={},alpha={},n={}", depth, alpha, self.dimension),
            Family::Custom(c) => format!("custom:{},n={}", c.label, self.dimension),
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.family {
            Family::Identity => true,
            Family::Power { eps } => *eps == T::one(),
            _ => false,
        }
    }

    /// `log φ`, `d log φ / dL`, `d² log φ / dL²` at depth `L = log(1/s) ≥ 0`.
    pub fn log_profile(&self, depth: T) -> LogProfile<T> {
        match &self.family {
            Family::Identity => LogProfile { log_phi: -depth, dlog: -T::one(), d2log: T::zero() },
            Family::Power { eps } => LogProfile { log_phi: -*eps * depth, dlog: -*eps, d2log: T::zero() },
            Family::IterLog { depth: k, alpha } => self.iterlog_profile(*k, *alpha, depth),
            Family::Custom(_) => {
                let s = (-depth).exp();
                let phi = self.eval(s);
                let d1 = self.custom_derivative(s);
                let d2 = self.custom_second_derivative(s);
                let dlog = -s * d1 / phi;
                // φ'' = (φ/s²)(g' + g'' + g'²)
                let d2log = s * s * d2 / phi - dlog - dlog * dlog;
                LogProfile { log_phi: phi.ln(), dlog, d2log }
            }
        }
    }

    fn iterlog_profile(&self, k: usize, alpha: T, depth: T) -> LogProfile<T> {
        let inv_n = T::one() / T::from_usize_lossy(self.dimension);
        let mut profile = LogProfile { log_phi: T::zero(), dlog: T::zero(), d2log: T::zero() };
        for j in 1..=k {
            let a = self.coefficients[j - 1];
            let p = if j == k { alpha } else { inv_n };
            let (ell, d1, d2) = iterated_log(j, depth);
            let base = T::one() + a * ell;
            profile.log_phi = profile.log_phi - p * base.ln();
            profile.dlog = profile.dlog - p * a * d1 / base;
            profile.d2log = profile.d2log - p * a * (d2 * base - a * d1 * d1) / (base * base);
        }
        profile
    }

    /// φ(s). Total on `[0, ∞)`; non-positive input maps to 0.
    pub fn eval(&self, s: T) -> T {
        if s <= T::zero() {
            return T::zero();
        }
        if s >= T::one() {
            return s;
        }
        match &self.family {
            Family::Identity => s,
            Family::Power { eps } => s.powf(*eps),
            Family::Custom(c) => (c.func)(s),
            Family::IterLog { .. } => self.log_profile(-s.ln()).log_phi.exp(),
        }
    }

    /// φ at depth `L = log(1/s)`, usable when `s` itself underflows.
    pub fn eval_at_depth(&self, depth: T) -> T {
        if depth <= T::zero() {
            return self.eval((-depth).exp());
        }
        self.log_profile(depth).log_phi.exp()
    }

    /// φ'(s) for `s > 0`; equals 1 beyond `s = 1` and the left derivative at `s = 1`.
    pub fn derivative(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Err(Error::OutOfDomain(format!("derivative of φ needs s > 0, got {s}")));
        }
        if s > T::one() {
            return Ok(T::one());
        }
        Ok(match &self.family {
            Family::Identity => T::one(),
            Family::Power { eps } => *eps * s.powf(*eps - T::one()),
            Family::Custom(_) => self.custom_derivative(s),
            Family::IterLog { .. } => {
                let profile = self.log_profile(-s.ln());
                -(profile.log_phi.exp() / s) * profile.dlog
            }
        })
    }

    /// φ''(s) for `0 < s ≤ 1`.
    pub fn second_derivative(&self, s: T) -> Result<T> {
        if !(s > T::zero() && s <= T::one()) {
            return Err(Error::OutOfDomain(format!("second derivative of φ needs 0 < s ≤ 1, got {s}")));
        }
        Ok(match &self.family {
            Family::Identity => T::zero(),
            Family::Power { eps } => *eps * (*eps - T::one()) * s.powf(*eps - T::lit(2.0)),
            Family::Custom(_) => self.custom_second_derivative(s),
            Family::IterLog { .. } => {
                let p = self.log_profile(-s.ln());
                p.log_phi.exp() / (s * s) * (p.dlog + p.d2log + p.dlog * p.dlog)
            }
        })
    }

    /// λ(s) = φ(s)/s, which is ≥ 1 and non-increasing on `(0, 1]`.
    pub fn lambda(&self, s: T) -> Result<T> {
        if !(s > T::zero()) {
            return Err(Error::OutOfDomain(format!("λ(s) = φ(s)/s needs s > 0, got {s}")));
        }
        if s >= T::one() {
            return Ok(T::one());
        }
        Ok(self.eval(s) / s)
    }

    /// `(λ(s), q(s))` with `q = -s λ'(s)/λ(s) = 1 - s φ'(s)/φ(s)`, taken from the
    /// log profile so that `t λ' = -(t/s) λ q` carries no cancellation.
    pub fn lambda_with_slope(&self, s: T) -> Result<(T, T)> {
        if !(s > T::zero()) {
            return Err(Error::OutOfDomain(format!("λ(s) = φ(s)/s needs s > 0, got {s}")));
        }
        if s > T::one() {
            return Ok((T::one(), T::zero()));
        }
        Ok(match &self.family {
            Family::Identity => (T::one(), T::zero()),
            Family::Power { eps } => (s.powf(*eps - T::one()), T::one() - *eps),
            Family::Custom(_) => {
                let phi = self.eval(s);
                (phi / s, T::one() - s * self.custom_derivative(s) / phi)
            }
            Family::IterLog { .. } => {
                let depth = -s.ln();
                let profile = self.log_profile(depth);
                ((profile.log_phi + depth).exp(), T::one() + profile.dlog)
            }
        })
    }

    /// λ'(s) on `(0, 1]`.
    pub fn lambda_derivative(&self, s: T) -> Result<T> {
        let lambda = self.lambda(s)?;
        let phi_prime = self.derivative(s)?;
        Ok((phi_prime - lambda) / s)
    }

    /// ψ(v) = φ^{-1}(v) with `|φ(ψ) - v| ≤ tol`.
    ///
    /// Bisection on `[0, min(v, 1)]`, which brackets the root because φ is
    /// increasing and `φ(s) ≥ s`. Midpoints are geometric so that roots far below
    /// the upper end are reached within the iteration cap.
    pub fn invert(&self, v: T, tol: T) -> Result<T> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("inversion tolerance must be positive, got {tol}")));
        }
        if v <= T::zero() {
            return Ok(T::zero());
        }
        if v >= T::one() {
            return Ok(v);
        }
        if let Family::Identity = self.family {
            return Ok(v);
        }
        let floor = self.eval(T::min_positive_value());
        if floor > v + tol {
            return Err(Error::OutOfDomain(format!(
                "φ^{{-1}}({v}) is below the smallest positive float (φ(MIN_POSITIVE) = {floor}); use invert_depth"
            )));
        }
        bisect_increasing(|s| self.eval(s) - v, T::zero(), v, tol, Midpoint::Geometric)
    }

    /// `log(1/ψ(v))` for `0 < v ≤ 1`, with `|φ - v| ≤ tol` at the returned depth.
    /// Unlike [`Self::invert`] this never underflows.
    pub fn invert_depth(&self, v: T, tol: T) -> Result<T> {
        if !(v > T::zero() && v <= T::one()) {
            return Err(Error::OutOfDomain(format!("invert_depth needs 0 < v ≤ 1, got {v}")));
        }
        if !(tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("inversion tolerance must be positive, got {tol}")));
        }
        let mut hi = T::one();
        while self.eval_at_depth(hi) >= v {
            hi = hi * T::lit(16.0);
            if !hi.is_finite() {
                return Err(Error::NotConverged(format!("no depth with φ below {v}")));
            }
        }
        bisect_increasing(|depth| v - self.eval_at_depth(depth), T::zero(), hi, tol, Midpoint::Geometric)
    }

    fn custom_step(s: T) -> T {
        let h = T::lit(1e-7).max(T::lit(1e-4) * s);
        h.min(s * T::lit(0.5))
    }

    fn custom_raw(&self, s: T) -> T {
        match &self.family {
            Family::Custom(c) => (c.func)(s),
            _ => self.eval(s),
        }
    }

    fn custom_derivative(&self, s: T) -> T {
        let h = Self::custom_step(s);
        (self.custom_raw(s + h) - self.custom_raw(s - h)) / (h + h)
    }

    fn custom_second_derivative(&self, s: T) -> T {
        let h = Self::custom_step(s);
        let two = T::lit(2.0);
        (self.custom_raw(s + h) - two * self.custom_raw(s) + self.custom_raw(s - h)) / (h * h)
    }

    /// `sup φ(s) / (s φ'(s)²)` over the sampling grid, floored at 1; with `refine`
    /// the grid maximiser is polished by golden-section search.
    pub(crate) fn measure_m(&self, grid_size: usize, refine: bool) -> T {
        if self.is_identity() {
            return T::one();
        }
        let ratio = |s: T| -> T {
            match self.derivative(s) {
                Ok(d) if d > T::zero() => self.eval(s) / (s * d * d),
                _ => T::infinity(),
            }
        };
        let grid: Vec<T> = sample_grid(grid_size);
        let (mut best_idx, mut best) = (0usize, T::neg_infinity());
        for (i, &s) in grid.iter().enumerate() {
            let r = ratio(s);
            if r > best || r.is_nan() {
                best = r;
                best_idx = i;
            }
        }
        if refine && best.is_finite() && grid.len() > 2 {
            let lo = grid[best_idx.saturating_sub(1)];
            let hi = grid[(best_idx + 1).min(grid.len() - 1)];
            best = best.max(golden_max(&ratio, lo, hi));
        }
        best.max(T::one())
    }

    /// Largest grid point `r` with φ'' ≤ 0 on every grid point of `(0, r]`; 0 if
    /// concavity already fails at the smallest grid point.
    pub(crate) fn measure_concavity_radius(&self, grid_size: usize) -> T {
        let grid: Vec<T> = sample_grid(grid_size);
        let mut radius = T::zero();
        for &s in &grid {
            let Ok(second) = self.second_derivative(s) else { break };
            let scale = self.eval(s) / (s * s);
            if second <= T::lit(1e-10) * scale {
                radius = s;
            } else {
                break;
            }
        }
        radius
    }
}

/// `ℓ_j(L)`, `ℓ_j'(L)`, `ℓ_j''(L)` for `ℓ_1 = L` and
/// `ℓ_j = log^{(j-1)}(e↑↑(j-2) + L)` when `j ≥ 2`.
pub(crate) fn iterated_log<T: Scalar>(j: usize, depth: T) -> (T, T, T) {
    if j == 1 {
        return (depth, T::one(), T::zero());
    }
    let mut v = tower::<T>(j - 2) + depth;
    let mut dv = T::one();
    let mut curvature = T::zero();
    for _ in 1..j {
        curvature = curvature + dv / v;
        dv = dv / v;
        v = v.ln();
    }
    (v, dv, -dv * curvature)
}

/// Golden-section maximisation of a unimodal function in log-space on `[lo, hi]`.
fn golden_max<T: Scalar, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    for _ in 0..120 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp());
        }
    }
    fc.max(fd)
}
