//! Gauss–Legendre rules, adaptive finite-interval integration, and half-line
//! integration with a fitted algebraic tail.
//!
//! Every singular integral in the crate is pushed through a logarithmic
//! substitution first (`u = log(1/s)`), which turns the `ds/s` weight and the
//! endpoint blow-ups into integrands on `[u0, ∞)` that decay either
//! exponentially or like a power of `u`. [`half_line`] handles exactly that
//! class.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Adaptive Gauss–Legendre on a finite interval: a panel is accepted when the
/// one-panel and two-half-panel estimates agree within the local share of `tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, rule: &GaussLegendre) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, rule: &GaussLegendre, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let left = rule.integrate(f, a, mid);
        let right = rule.integrate(f, mid, b);
        let split = left + right;
        if depth == 0 || (split - whole).abs() <= tol.max(1e-15 * split.abs()) {
            return split;
        }
        recurse(f, a, mid, left, 0.5 * tol, rule, depth - 1) + recurse(f, mid, b, right, 0.5 * tol, rule, depth - 1)
    }
    let whole = rule.integrate(f, a, b);
    recurse(f, a, b, whole, tol, rule, 40)
}

/// Result of a half-line integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfLine {
    /// Integral over `[start, ∞)` including the tail model.
    pub value: f64,
    /// Last panel edge integrated by quadrature.
    pub cutoff: f64,
    /// Tail contribution added beyond `cutoff`.
    pub tail: f64,
    /// Fitted decay exponent `p` of `f(u) ~ u^{-p}` at the cutoff (infinite for faster-than-algebraic decay).
    pub exponent: f64,
}

/// Largest distance from `start` the panels may reach.
const MAX_REACH: f64 = 1e18;

/// Integrates `f` over `[start, ∞)` on geometric panels `[start + 2^(i-1), start + 2^i]`
/// of the given Gauss–Legendre rule.
///
/// Panels are added until the algebraic tail model `∫_U^∞ ≈ U f(U) / (p - 1)` (with
/// `p` fitted from `f(U)` and `f(2U)`) is below `tol/2` relative to the running sum.
/// If the panels reach [`MAX_REACH`] with a fitted exponent `p <= 1` the integral is
/// reported as divergent.
pub fn half_line<F: Fn(f64) -> f64>(f: &F, start: f64, tol: f64, rule: &GaussLegendre) -> Result<HalfLine> {
    let mut sum = rule.integrate(f, start, start + 1.0);
    let mut reach = 1.0;
    loop {
        let next = 2.0 * reach;
        sum += rule.integrate(f, start + reach, start + next);
        reach = next;

        let f_u = f(start + reach).abs();
        if f_u == 0.0 {
            return Ok(HalfLine { value: sum, cutoff: start + reach, tail: 0.0, exponent: f64::INFINITY });
        }
        let f_2u = f(start + 2.0 * reach).abs();
        let exponent = if f_2u == 0.0 { f64::INFINITY } else { (f_u / f_2u).log2() };
        let u = start + reach;
        let tail = if exponent > 1.0 { u * f_u / (exponent - 1.0) } else { f64::INFINITY };
        let scale = sum.abs().max(f64::MIN_POSITIVE);
        if tail.is_finite() && tail <= 0.5 * tol * scale && reach >= 8.0 {
            let tail = if exponent.is_finite() { tail * sum.signum() } else { 0.0 };
            return Ok(HalfLine { value: sum + tail, cutoff: u, tail, exponent });
        }
        if reach >= MAX_REACH {
            if exponent <= 1.0 + 1e-6 || !tail.is_finite() {
                return Err(Error::Divergent { partial: sum, cutoff: u, exponent });
            }
            let tail = tail * sum.signum();
            return Ok(HalfLine { value: sum + tail, cutoff: u, tail, exponent });
        }
    }
}

/// Re-runs [`half_line`] with doubling Gauss–Legendre order until two successive
/// estimates agree within `tol` (relative to `max(1, |value|)`).
///
/// Returns `(value, error_estimate, last_result)`.
pub fn half_line_refined<F: Fn(f64) -> f64>(f: &F, start: f64, tol: f64) -> Result<(f64, f64, HalfLine)> {
    let mut previous: Option<HalfLine> = None;
    for order in [8usize, 16, 32, 64] {
        let rule = GaussLegendre::new(order);
        let current = half_line(f, start, tol, &rule)?;
        if let Some(prev) = previous {
            let diff = (current.value - prev.value).abs();
            if diff <= tol * current.value.abs().max(1.0) {
                let err = diff + (current.tail * 1e-3).abs();
                return Ok((current.value, err, current));
            }
        }
        previous = Some(current);
    }
    let last = previous.expect("at least one refinement level");
    Err(Error::NotConverged(format!("half-line quadrature unstable at order 64 (last value {})", last.value)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(6);
        // degree 11 is the exactness limit for 6 points
        let value = rule.integrate(|x| x.powi(11) + x.powi(10), -1.0, 1.0);
        assert!((value - 2.0 / 11.0).abs() < 1e-14);
        let weights: f64 = rule.weights().iter().sum();
        assert!((weights - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_rule_integrates_exponential() {
        let rule = GaussLegendre::new(64);
        let value = rule.integrate(f64::exp, 0.0, 1.0);
        assert!((value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let rule = GaussLegendre::new(10);
        let eps = 1e-4;
        let f = |x: f64| eps / (x * x + eps * eps);
        let value = adaptive(&f, -1.0, 1.0, 1e-12, &rule);
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((value - exact).abs() < 1e-9, "{value} vs {exact}");
    }

    #[test]
    fn half_line_algebraic_tail() {
        // ∫_0^∞ (1+u)^{-3/2} du = 2
        let f = |u: f64| (1.0 + u).powf(-1.5);
        let (value, _, _) = half_line_refined(&f, 0.0, 1e-10).unwrap();
        assert!((value - 2.0).abs() < 2e-9, "{value}");
    }

    #[test]
    fn half_line_exponential() {
        let f = |u: f64| (-0.25 * u).exp();
        let (value, _, result) = half_line_refined(&f, 0.0, 1e-12).unwrap();
        assert!((value - 4.0).abs() < 1e-11);
        assert!(result.exponent > 1.0);
    }

    #[test]
    fn half_line_detects_divergence() {
        let f = |u: f64| (1.0 + u).powf(-0.8);
        assert!(matches!(half_line(&f, 0.0, 1e-8, &GaussLegendre::new(16)), Err(Error::Divergent { .. })));
        let borderline = |u: f64| 1.0 / (1.0 + u);
        assert!(matches!(half_line(&borderline, 0.0, 1e-8, &GaussLegendre::new(16)), Err(Error::Divergent { .. })));
    }
}
