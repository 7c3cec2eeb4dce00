//! Conformal energy of `H`, the inner-distortion integral, the Monte-Carlo
//! energy of `F = H^{-1}`, and the bi-conformal energy of the glued map.
//!
//! The integrands depend only on `(|x|, t)`. With `s = |x| + t = e^{-L}` and
//! `θ = t/s` the volume element of the upper cone is
//! `σ_{n-2} s^n (1-θ)^{n-2} dL dθ`, and with `q = -sλ'/λ`:
//!
//! ```text
//! s^n |DH|^n = φ^n [ (n-1)/λ² + θ²q² + (1-θq)² ]^{n/2}
//! s^n K_H    = s^{n-1} φ (1-θq) [ (1/λ² + θ²q²)/(1-θq)² + n-1 ]^{n/2}
//! ```
//!
//! The outer variable runs through the modulus function's energy chart, so the
//! same slowly decaying tails as in `E[φ]` are handled.

use std::cell::Cell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::{ConeMap, GluedMap};
use crate::error::{Error, Result};
use crate::geometry::{draw_interior, unit_ball_volume, upper_cone_volume};
use crate::modulus::ChartPoint;
use crate::quadrature::{half_line, GaussLegendre};
use crate::report::VerificationReport;

/// Margin around the axis and the cone boundary excluded from Monte-Carlo sampling.
pub const MC_MARGIN: f64 = 1e-6;

/// Points per Monte-Carlo batch; the partition is fixed so results do not depend on threading.
pub const MC_BATCH: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    TensorQuadrature,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: f64,
    pub method: EnergyMethod,
    pub samples_or_nodes: usize,
    pub error_estimate: f64,
    pub seed: Option<u64>,
}

/// `|S^{n-2}|`.
fn sphere_measure(n: usize) -> f64 {
    (n - 1) as f64 * unit_ball_volume(n - 1)
}

/// Gauss–Legendre on `[0, 1]` with panels halving toward `θ = 1`, fine enough to
/// resolve a feature of width `gap` there.
fn theta_integral(f: impl Fn(f64) -> f64, gap: f64, rule: &GaussLegendre) -> f64 {
    let levels = if gap > 0.0 { (-gap.log2()).ceil().max(0.0) as usize + 4 } else { 60 };
    let levels = levels.clamp(4, 60);
    let mut sum = 0.0;
    let mut left = 0.0;
    for j in 1..=levels {
        let right = 1.0 - 0.5f64.powi(j as i32);
        sum += rule.integrate(&f, left, right);
        left = right;
    }
    sum + rule.integrate(&f, left, 1.0)
}

fn dh_density(point: &ChartPoint, n: usize, theta: f64) -> f64 {
    let q = 1.0 + point.dlog;
    let inv_lambda = point.inv_lambda();
    let a = (theta * q).powi(2) + (1.0 - theta * q).powi(2);
    let base = (n as f64 - 1.0) * inv_lambda * inv_lambda + a;
    (1.0 - theta).powi(n as i32 - 2) * base.powf(0.5 * n as f64)
}

fn distortion_density(point: &ChartPoint, n: usize, theta: f64) -> f64 {
    let q = 1.0 + point.dlog;
    let inv_lambda = point.inv_lambda();
    let slope = 1.0 - theta * q;
    let base = (inv_lambda * inv_lambda + (theta * q).powi(2)) / (slope * slope) + (n as f64 - 1.0);
    (1.0 - theta).powi(n as i32 - 2) * slope * base.powf(0.5 * n as f64)
}

/// Tensor quadrature of `σ ∫ weight(w) ∫_0^1 density(w, θ) dθ dw`, refined by
/// doubling both orders until successive values agree within `tol`.
fn refine_tensor<W, D>(map: &ConeMap<f64>, weight: W, density: D, tol: f64) -> Result<EnergyResult>
where
    W: Fn(&ChartPoint) -> f64,
    D: Fn(&ChartPoint, usize, f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = map.n();
    let chart = map.phi().energy_chart(n);
    let sigma = sphere_measure(n);
    let mut previous: Option<f64> = None;
    for order in [8usize, 16, 32, 64] {
        let rule = GaussLegendre::new(order);
        let nodes = Cell::new(0usize);
        let outer = |w: f64| {
            let point = chart.at(w);
            let weight = weight(&point);
            if weight == 0.0 {
                return 0.0;
            }
            let gap = -point.dlog;
            weight
                * theta_integral(
                    |theta| {
                        nodes.set(nodes.get() + 1);
                        density(&point, n, theta)
                    },
                    gap,
                    &rule,
                )
        };
        let value = sigma * half_line(&outer, 0.0, 0.1 * tol, &rule)?.value;
        if let Some(prev) = previous {
            let diff = (value - prev).abs();
            if diff <= tol * value.abs().max(1.0) {
                return Ok(EnergyResult {
                    value,
                    method: EnergyMethod::TensorQuadrature,
                    samples_or_nodes: nodes.get(),
                    error_estimate: diff,
                    seed: None,
                });
            }
        }
        previous = Some(value);
    }
    Err(Error::NotConverged(format!("tensor quadrature did not settle within {tol} (last value {previous:?})")))
}

/// `∫_{C+} |DH|^n`.
pub fn conformal_energy_h(map: &ConeMap<f64>, tol: f64) -> Result<EnergyResult> {
    refine_tensor(map, |p| p.log_weight.exp(), dh_density, tol)
}

/// `∫_{C+} K_H`, equal to `∫_{C+} |DF|^n`.
pub fn inner_distortion_integral(map: &ConeMap<f64>, tol: f64) -> Result<EnergyResult> {
    let n = map.n();
    refine_tensor(map, move |p| p.distortion_weight(n), distortion_density, tol)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    sum: f64,
    sum_sq: f64,
    max: f64,
    excluded: usize,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
            max: self.max.max(other.max),
            excluded: self.excluded + other.excluded,
        }
    }
}

/// Monte-Carlo estimate of `∫_{C+} |DF(Y)|^n` with `Y` uniform in the upper cone.
///
/// Points within [`MC_MARGIN`] of the axis or the boundary are counted with
/// integrand 0; their share of the volume times the largest sampled integrand is
/// added to `error_estimate` on top of the standard error.
pub fn energy_f_monte_carlo(map: &ConeMap<f64>, samples: usize, seed: u64) -> Result<EnergyResult> {
    if samples < 1000 {
        return Err(Error::InvalidParameter(format!("Monte-Carlo needs at least 1000 samples, got {samples}")));
    }
    let n = map.n();
    let batches = samples.div_ceil(MC_BATCH);
    let run_batch = |b: usize| -> Result<Tally> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let quota = MC_BATCH.min(samples - b * MC_BATCH);
        let mut tally = Tally::default();
        for _ in 0..quota {
            let y = loop {
                if let Some(y) = draw_interior(&mut rng, n, 0.0, 0.0) {
                    break y;
                }
            };
            let rho = y.x_norm();
            if rho < MC_MARGIN || y.t < MC_MARGIN || (1.0 - rho - y.t) < MC_MARGIN * 2f64.sqrt() {
                tally.excluded += 1;
                continue;
            }
            let value = map.inverse_jacobian(&y)?.inv_hs_norm.powi(n as i32);
            tally.sum += value;
            tally.sum_sq += value * value;
            tally.max = tally.max.max(value);
        }
        Ok(tally)
    };
    let tallies: Vec<Result<Tally>> = (0..batches).into_par_iter().map(run_batch).collect();
    let mut total = Tally::default();
    for tally in tallies {
        total = total.merge(tally?);
    }
    let count = samples as f64;
    let volume = upper_cone_volume(n);
    let mean = total.sum / count;
    let variance = (total.sum_sq / count - mean * mean).max(0.0);
    let std_error = volume * (variance / (count - 1.0)).sqrt();
    let excluded = volume * total.excluded as f64 / count * total.max;
    Ok(EnergyResult {
        value: volume * mean,
        method: EnergyMethod::MonteCarlo,
        samples_or_nodes: samples,
        error_estimate: std_error + excluded,
        seed: Some(seed),
    })
}

/// Compares the Monte-Carlo energy of `F` with the quadrature of the inner
/// distortion of `H`: relative gap within `relative`, and within three combined
/// error estimates.
pub fn verify_energy_identity(map: &ConeMap<f64>, samples: usize, tol: f64, seed: u64, relative: f64) -> Result<VerificationReport> {
    let mc = energy_f_monte_carlo(map, samples, seed)?;
    let quad = inner_distortion_integral(map, tol)?;
    let gap = (mc.value - quad.value).abs();
    let combined = mc.error_estimate + quad.error_estimate;
    let detail = format!("monte carlo {} ± {}, quadrature {} ± {}", mc.value, mc.error_estimate, quad.value, quad.error_estimate);
    let mut report = VerificationReport::new(format!("energy identity, {}", map.phi().spec())).with_seed(seed);
    report.push("energy-identity-relative", gap <= relative * quad.value, Some(gap / quad.value), samples, relative, detail.clone());
    report.push("energy-identity-stderr", gap <= 3.0 * combined, Some(gap / combined), samples, 3.0, detail);
    Ok(report)
}

/// Energies of the glued map and of its inverse over the double cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiconformalEnergy {
    /// `∫_C |DH|^n = ∫_{C+} |DH|^n + ∫_{C+} |DF|^n`.
    pub energy_h: EnergyResult,
    /// `∫_C |DF|^n`; the same two upper-cone numbers by reflection.
    pub energy_f: EnergyResult,
    pub total: EnergyResult,
}

pub fn biconformal_energy(glued: &GluedMap<f64>, tol: f64) -> Result<BiconformalEnergy> {
    let upper_h = conformal_energy_h(&glued.cone_map, tol)?;
    let upper_f = inner_distortion_integral(&glued.cone_map, tol)?;
    let combine = |factor: f64| EnergyResult {
        value: factor * (upper_h.value + upper_f.value),
        method: EnergyMethod::TensorQuadrature,
        samples_or_nodes: upper_h.samples_or_nodes + upper_f.samples_or_nodes,
        error_estimate: factor * (upper_h.error_estimate + upper_f.error_estimate),
        seed: None,
    };
    Ok(BiconformalEnergy { energy_h: combine(1.0), energy_f: combine(1.0), total: combine(2.0) })
}
