//! Energy functional, condition checks, doubling and quasi-inverse constants.

use super::{Family, ModulusFunction};
use crate::error::{Error, Result};
use crate::quadrature::half_line_refined;
use crate::report::VerificationReport;
use crate::scalar::Scalar;

/// Smallest argument of the default sampling grids.
pub const DEFAULT_T_MIN: f64 = 1e-12;

/// Relative slack in grid inequality checks.
const SLACK: f64 = 1e-9;

/// Sorted grid on `(0, 1]`: `size` log-spaced points from [`DEFAULT_T_MIN`] to 1
/// merged with the uniform points `i/size`.
pub fn sample_grid<T: Scalar>(size: usize) -> Vec<T> {
    grid_between(size, DEFAULT_T_MIN)
}

pub(crate) fn grid_between<T: Scalar>(size: usize, t_min: f64) -> Vec<T> {
    let size = size.max(2);
    let span = -t_min.ln();
    let mut grid: Vec<f64> = (0..size)
        .map(|i| (-span * (1.0 - i as f64 / (size - 1) as f64)).exp())
        .chain((1..=size).map(|i| i as f64 / size as f64))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.into_iter().map(T::lit).collect()
}

/// Value of `E[φ]` together with the quadrature diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyValue {
    pub value: f64,
    pub error_estimate: f64,
    /// Last panel edge in the integration variable.
    pub cutoff: f64,
    /// Fitted algebraic decay exponent of the integrand at the cutoff.
    pub exponent: f64,
}

/// Extremes of `ψ(φ(t))/t` over a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuasiInverseDefect {
    pub lower: f64,
    pub upper: f64,
}

impl ModulusFunction<f64> {
    /// `E[φ] = ∫_0^1 φ(s)^n ds/s`, integrated in the energy chart.
    pub fn energy_functional(&self, n: usize, tol: f64) -> Result<EnergyValue> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("energy exponent n must be at least 2, got {n}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        let chart = self.energy_chart(n);
        let integrand = |w: f64| chart.at(w).log_weight.exp();
        let (value, error_estimate, last) = half_line_refined(&integrand, 0.0, tol)?;
        Ok(EnergyValue { value, error_estimate, cutoff: last.cutoff, exponent: last.exponent })
    }

    /// Grid verification of (C1)–(C4). Mathematical failures are recorded in the
    /// report; only an invalid `grid_size` is an error.
    pub fn check_conditions(&self, grid_size: usize) -> Result<VerificationReport> {
        if grid_size < 16 {
            return Err(Error::InvalidParameter(format!("grid_size must be at least 16, got {grid_size}")));
        }
        let grid: Vec<f64> = sample_grid(grid_size);
        let mut report = VerificationReport::new(self.spec());

        // (C1) normalisation, identity extension, strict monotonicity
        let mut c1 = Vec::new();
        if self.eval(0.0) != 0.0 {
            c1.push(format!("φ(0) = {}", self.eval(0.0)));
        }
        if (self.eval(1.0) - 1.0).abs() > 1e-12 {
            c1.push(format!("φ(1) = {}", self.eval(1.0)));
        }
        for s in [1.25, 2.0, 10.0] {
            if self.eval(s) != s {
                c1.push(format!("φ({s}) = {}", self.eval(s)));
            }
        }
        let values: Vec<f64> = grid.iter().map(|&s| self.eval(s)).collect();
        if let Some(i) = values.windows(2).position(|w| !(w[0] < w[1])) {
            c1.push(format!("not increasing between s = {} and {}", grid[i], grid[i + 1]));
        }
        report.push("C1", c1.is_empty(), None, grid.len(), 1e-12, c1.join("; "));

        // (C2) φ' ≤ λ ≤ M φ'², with λ ≥ 1 non-increasing
        let m = self.measure_m(grid_size, false);
        let mut c2 = Vec::new();
        let mut previous = f64::INFINITY;
        for &s in &grid {
            let (Ok(d), Ok(lambda)) = (self.derivative(s), self.lambda(s)) else {
                c2.push(format!("derivative undefined at s = {s}"));
                break;
            };
            if d > lambda * (1.0 + SLACK) {
                c2.push(format!("φ'({s}) = {d} exceeds λ = {lambda}"));
            }
            if lambda > m * d * d * (1.0 + SLACK) {
                c2.push(format!("λ({s}) = {lambda} exceeds M φ'² = {}", m * d * d));
            }
            if lambda < 1.0 - SLACK || lambda > previous * (1.0 + SLACK) {
                c2.push(format!("λ not ≥ 1 and non-increasing at s = {s}"));
            }
            previous = lambda;
            if c2.len() >= 4 {
                break;
            }
        }
        let c2_pass = c2.is_empty() && m.is_finite();
        report.push("C2", c2_pass, Some(m), grid.len(), SLACK, c2.join("; "));

        // (C3) finite energy
        let tol = 1e-8;
        match self.energy_functional(self.dimension(), tol) {
            Ok(e) => report.push("C3", true, Some(e.value), grid.len(), tol, format!("E[φ] = {} ± {:.1e}", e.value, e.error_estimate)),
            Err(err) => report.push("C3", false, None, grid.len(), tol, err.to_string()),
        }

        // (C4) concavity near the origin
        let r = self.measure_concavity_radius(grid_size);
        let detail = if r > 0.0 { String::new() } else { "φ'' > 0 at the smallest grid point".to_string() };
        report.push("C4", r > 0.0, Some(r), grid.len(), 1e-10, detail);

        Ok(report)
    }

    /// Empirical `C_φ(factor) = sup φ(factor·t)/φ(t)` over `t ∈ (0, 1/factor]`.
    pub fn doubling_constant(&self, factor: f64, grid_size: usize) -> Result<f64> {
        if !(factor >= 1.0) {
            return Err(Error::InvalidParameter(format!("doubling factor must be ≥ 1, got {factor}")));
        }
        let grid: Vec<f64> = sample_grid(grid_size);
        Ok(grid
            .iter()
            .map(|&t| t / factor)
            .map(|t| self.eval(factor * t) / self.eval(t))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `(inf, sup)` of `ψ(φ(t))/t` over the default grid.
    pub fn quasi_inverse_defect(&self, psi: &ModulusFunction<f64>, grid_size: usize) -> QuasiInverseDefect {
        self.quasi_inverse_defect_down_to(psi, grid_size, DEFAULT_T_MIN)
    }

    /// As [`Self::quasi_inverse_defect`] on a grid reaching down to `t_min`.
    pub fn quasi_inverse_defect_down_to(&self, psi: &ModulusFunction<f64>, grid_size: usize, t_min: f64) -> QuasiInverseDefect {
        let grid: Vec<f64> = grid_between(grid_size, t_min);
        let mut defect = QuasiInverseDefect { lower: f64::INFINITY, upper: f64::NEG_INFINITY };
        for t in grid {
            let ratio = psi.eval(self.eval(t)) / t;
            defect.lower = defect.lower.min(ratio);
            defect.upper = defect.upper.max(ratio);
        }
        defect
    }

    /// The closed-form `E[φ]` where one exists.
    pub fn energy_closed_form(&self, n: usize) -> Option<f64> {
        let n = n as f64;
        match self.family() {
            Family::Identity => Some(1.0 / n),
            Family::Power { eps } => Some(1.0 / (n * eps)),
            Family::IterLog { depth: 1, alpha } if n * alpha > 1.0 => Some(1.0 / (n * alpha - 1.0)),
            _ => None,
        }
    }
}
