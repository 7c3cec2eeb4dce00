//! Sampled moduli of continuity, linear dilatation, quasi-inverse and doubling
//! probes, and the verification suites for the cone and glued maps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::{ConeMap, Deformation, GluedMap, InverseOf};
use crate::error::{Error, Result};
use crate::geometry::{sample_cone_interior, sample_cone_sphere, ConePoint, Half, NormKind};
use crate::modulus::{sample_grid, ModulusFunction};
use crate::quadrature::{adaptive, half_line_refined, GaussLegendre};
use crate::report::VerificationReport;

/// Ratio above which a growing linear dilatation counts as a violation.
pub const DEFAULT_QC_THRESHOLD: f64 = 1e3;

/// Minimal number of radii, and their minimal span, behind a violation verdict.
const VERDICT_POINTS: usize = 4;
const VERDICT_SPAN: f64 = 16.0;

/// Global constant for `H` against `φ`.
pub const H_GLOBAL_CONSTANT: f64 = 4.0;

/// Near-origin constant for `F` is `3M`.
pub const F_LOCAL_FACTOR: f64 = 3.0;

/// Absolute slack on sampled inequalities.
const SLACK: f64 = 1e-12;

/// Sampled `ω_h(x₀; t)` over a list of radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub center: ConePoint<f64>,
    pub radii: Vec<f64>,
    /// Running maximum of the per-radius sampled sup, so non-decreasing.
    pub values: Vec<f64>,
    pub norm_used: NormKind,
    pub samples_per_radius: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    QcConsistent,
    QcViolated,
}

/// Ratio of the largest to the smallest displacement on spheres about `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilatationEstimate {
    pub center: ConePoint<f64>,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
}

/// Both composed ratios `ω_h(ω_f(s))/s` and `ω_f(ω_h(t))/t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiInverseTable {
    pub radii: Vec<f64>,
    pub h_after_f: Vec<f64>,
    pub f_after_h: Vec<f64>,
    /// Smallest `K` with every ratio in `[1/K, K]`.
    pub constant: f64,
}

fn sphere_points(n: usize, center: &ConePoint<f64>, radius: f64, norm: NormKind, count: usize, seed: u64) -> Result<Vec<ConePoint<f64>>> {
    if center.dim() != n {
        return Err(Error::InvalidParameter(format!("center has dimension {}, map has {n}", center.dim())));
    }
    Ok(sample_cone_sphere(n, radius, norm, Half::Both, count, seed, false)?
        .into_iter()
        .map(|p| center.add(&p))
        .collect())
}

/// Displacements `‖h(X) - h(x₀)‖` over the sampled sphere points that lie in the domain.
fn displacements<D: Deformation<f64> + ?Sized>(
    map: &D,
    center: &ConePoint<f64>,
    radius: f64,
    norm: NormKind,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let image = map.eval(center)?;
    let points: Vec<_> = sphere_points(map.dim(), center, radius, norm, count, seed)?
        .into_iter()
        .filter(|p| map.contains(p))
        .collect();
    if points.is_empty() {
        return Err(Error::Degenerate(format!("no sample of the sphere of radius {radius} lies in the domain of {}", map.describe())));
    }
    points.par_iter().map(|p| Ok(map.eval(p)?.distance(&image, norm))).collect()
}

/// Sampled `ω_h(x₀; r) = max_{‖X - x₀‖ = r} ‖h(X) - h(x₀)‖`; the two axis points are always sampled.
pub fn optimal_modulus<D: Deformation<f64> + ?Sized>(
    map: &D,
    center: &ConePoint<f64>,
    radius: f64,
    norm: NormKind,
    count: usize,
    seed: u64,
) -> Result<f64> {
    Ok(displacements(map, center, radius, norm, count, seed)?.into_iter().fold(0.0, f64::max))
}

/// [`optimal_modulus`] over increasing `radii`.
pub fn modulus_estimate<D: Deformation<f64> + ?Sized>(
    map: &D,
    center: &ConePoint<f64>,
    radii: &[f64],
    norm: NormKind,
    count: usize,
    seed: u64,
) -> Result<ModulusEstimate> {
    check_radii(radii)?;
    let mut values = Vec::with_capacity(radii.len());
    let mut running = 0.0f64;
    for &r in radii {
        running = running.max(optimal_modulus(map, center, r, norm, count, seed)?);
        values.push(running);
    }
    Ok(ModulusEstimate { center: center.clone(), radii: radii.to_vec(), values, norm_used: norm, samples_per_radius: count, seed })
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("radii must be a non-empty list of positive numbers".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Linear dilatation on Euclidean spheres with the default threshold.
pub fn linear_dilatation<D: Deformation<f64> + ?Sized>(
    map: &D,
    center: &ConePoint<f64>,
    radii: &[f64],
    count: usize,
    seed: u64,
) -> Result<DilatationEstimate> {
    linear_dilatation_with(map, center, radii, count, seed, DEFAULT_QC_THRESHOLD)
}

pub fn linear_dilatation_with<D: Deformation<f64> + ?Sized>(
    map: &D,
    center: &ConePoint<f64>,
    radii: &[f64],
    count: usize,
    seed: u64,
    threshold: f64,
) -> Result<DilatationEstimate> {
    check_radii(radii)?;
    let ratios = radii
        .iter()
        .map(|&r| {
            let d = displacements(map, center, r, NormKind::Euclid, count, seed)?;
            let max = d.iter().copied().fold(0.0, f64::max);
            let min = d.iter().copied().fold(f64::INFINITY, f64::min);
            // rounding can put max a hair below min for isotropic maps
            Ok(if min > 0.0 { (max / min).max(1.0) } else { f64::INFINITY })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = classify(radii, &ratios, threshold);
    Ok(DilatationEstimate { center: center.clone(), radii: radii.to_vec(), ratios, verdict })
}

/// Violation when, starting at the smallest radius, the ratios decrease with the
/// radius over at least 4 radii spanning a factor 16 and the smallest-radius ratio
/// exceeds `threshold`. `radii` must be increasing.
pub fn classify(radii: &[f64], ratios: &[f64], threshold: f64) -> Verdict {
    let mut end = 1;
    while end < ratios.len() && ratios[end] <= ratios[end - 1] {
        end += 1;
    }
    if ratios.len() >= VERDICT_POINTS && end >= VERDICT_POINTS && radii[end - 1] / radii[0] >= VERDICT_SPAN && ratios[0] > threshold {
        Verdict::QcViolated
    } else {
        Verdict::QcConsistent
    }
}

/// Tabulates `ω_h(x₀; ω_f(y₀; s))/s` and `ω_f(y₀; ω_h(x₀; t))/t` with `y₀ = h(x₀)`.
///
/// `inverse_map` must invert `map`; the round trip is checked at `x₀`.
#[allow(clippy::too_many_arguments)]
pub fn quasi_inverse_check<D: Deformation<f64> + ?Sized, E: Deformation<f64> + ?Sized>(
    map: &D,
    inverse_map: &E,
    center: &ConePoint<f64>,
    radii: &[f64],
    norm: NormKind,
    count: usize,
    seed: u64,
) -> Result<QuasiInverseTable> {
    check_radii(radii)?;
    let image = map.eval(center)?;
    let back = inverse_map.eval(&image)?;
    if back.distance(center, norm) > 1e-9 * center.norm(norm).max(1.0) {
        return Err(Error::InvalidParameter(format!("{} does not invert {} at the center", inverse_map.describe(), map.describe())));
    }
    let omega_h = |r: f64| optimal_modulus(map, center, r, norm, count, seed);
    let omega_f = |r: f64| optimal_modulus(inverse_map, &image, r, norm, count, seed);
    let mut h_after_f = Vec::with_capacity(radii.len());
    let mut f_after_h = Vec::with_capacity(radii.len());
    for &r in radii {
        h_after_f.push(omega_h(omega_f(r)?)? / r);
        f_after_h.push(omega_f(omega_h(r)?)? / r);
    }
    let constant = h_after_f.iter().chain(&f_after_h).map(|&v| v.max(1.0 / v)).fold(1.0, f64::max);
    Ok(QuasiInverseTable { radii: radii.to_vec(), h_after_f, f_after_h, constant })
}

/// Empirical `𝒦_λ`: the largest `‖h(x₁) - h(x₀)‖ / ‖h(x₂) - h(x₀)‖` over the triples.
pub fn three_points_ratio<D: Deformation<f64> + ?Sized>(
    map: &D,
    triples: &[(ConePoint<f64>, ConePoint<f64>, ConePoint<f64>)],
    lambda_bound: f64,
    norm: NormKind,
) -> Result<f64> {
    if !(lambda_bound >= 1.0) {
        return Err(Error::InvalidParameter(format!("λ must be at least 1, got {lambda_bound}")));
    }
    let mut worst = 0.0f64;
    for (i, (x0, x1, x2)) in triples.iter().enumerate() {
        let near = x1.distance(x0, norm);
        let far = x2.distance(x0, norm);
        if !(far > 0.0) || near > lambda_bound * far * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!("triple {i} violates |x₁ - x₀| ≤ λ|x₂ - x₀| with λ = {lambda_bound}")));
        }
        let y0 = map.eval(x0)?;
        let ratio = map.eval(x1)?.distance(&y0, norm) / map.eval(x2)?.distance(&y0, norm);
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// `max ω(factor·t)/ω(t)` over the radii `t` of `estimate` whose multiple is also a radius.
pub fn doubling_probe(estimate: &ModulusEstimate, factor: f64) -> Result<f64> {
    if !(factor >= 1.0) {
        return Err(Error::InvalidParameter(format!("doubling factor must be ≥ 1, got {factor}")));
    }
    let radii = &estimate.radii;
    let mut best: Option<f64> = None;
    for (i, &t) in radii.iter().enumerate() {
        let target = factor * t;
        if let Some(j) = radii.iter().position(|&r| (r - target).abs() <= 1e-9 * target) {
            let ratio = estimate.values[j] / estimate.values[i];
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter(format!("no radius t with {factor}·t also on the grid")))
}

fn random_pairs(n: usize, pairs: usize, seed: u64, scale: f64) -> Result<Vec<(ConePoint<f64>, ConePoint<f64>)>> {
    let sample = sample_cone_interior(n, 2 * pairs, seed, 0.0, 0.0)?;
    Ok(sample.points.chunks_exact(2).map(|c| (c[0].scale(scale), c[1].scale(scale))).collect())
}

/// Largest `‖h(X) - h(X')‖ / φ(‖X - X'‖)` in the cone norm.
fn max_ratio<D: Deformation<f64> + ?Sized>(map: &D, phi: &ModulusFunction<f64>, pairs: &[(ConePoint<f64>, ConePoint<f64>)]) -> Result<f64> {
    let ratios = pairs
        .par_iter()
        .map(|(a, b)| {
            let gap = a.distance(b, NormKind::Cone);
            if gap == 0.0 {
                return Ok(0.0);
            }
            Ok(map.eval(a)?.distance(&map.eval(b)?, NormKind::Cone) / phi.eval(gap))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Samples `pairs` uniform pairs of the upper cone and checks `‖H(X) - H(X')‖ ≤ 4φ(‖X - X'‖)`,
/// then the axis pairs of the default grid against `φ` itself on `(0, r]`.
pub fn verify_global_modulus_h(m: &ConeMap<f64>, pairs: usize, seed: u64) -> Result<VerificationReport> {
    let phi = m.phi();
    let mut report = VerificationReport::new(format!("global modulus of H, {}", phi.spec())).with_seed(seed);
    let sample = random_pairs(m.n(), pairs, seed, 1.0)?;
    let worst = max_ratio(m, phi, &sample)?;
    report.push(
        "H-global-4phi",
        worst <= H_GLOBAL_CONSTANT + SLACK,
        Some(worst),
        pairs,
        SLACK,
        "max sampled ‖H(X)-H(X')‖/φ(‖X-X'‖); a lower bound on the true constant",
    );

    let r = phi.concavity_radius;
    let grid: Vec<f64> = sample_grid::<f64>(64).into_iter().filter(|&t| t <= r).collect();
    let mut axis = 0.0f64;
    for &t in &grid {
        for &u in &grid {
            if t > u {
                axis = axis.max((phi.eval(t) - phi.eval(u)) / phi.eval(t - u));
            }
        }
    }
    report.push("H-axis-subadditive", axis <= 1.0 + 1e-9, Some(axis), grid.len(), 1e-9, format!("axis pairs in (0, {r}]"));
    Ok(report)
}

/// Checks `‖F(Y) - F(Y')‖ ≤ 3M φ(‖Y - Y'‖)` for pairs with `‖Y‖, ‖Y'‖ ≤ r/M`, then
/// records the global constant over uniform pairs and antipodal base pairs.
pub fn verify_global_modulus_f(m: &ConeMap<f64>, pairs: usize, seed: u64) -> Result<VerificationReport> {
    let phi = m.phi();
    let big_m = phi.m_constant;
    let r = phi.concavity_radius;
    let f = InverseOf(m);
    let mut report = VerificationReport::new(format!("global modulus of F, {}", phi.spec())).with_seed(seed);

    let near = random_pairs(m.n(), pairs, seed, r / big_m)?;
    let worst = max_ratio(&f, phi, &near)?;
    let bound = F_LOCAL_FACTOR * big_m;
    report.push(
        "F-near-origin-3M",
        worst <= bound + SLACK,
        Some(worst),
        pairs,
        SLACK,
        format!("pairs with ‖Y‖ ≤ r/M = {}; bound 3M = {bound}", r / big_m),
    );

    let general = random_pairs(m.n(), pairs, seed.wrapping_add(1), 1.0)?;
    let global = max_ratio(&f, phi, &general)?;
    report.push("F-global-measured", global.is_finite(), Some(global), pairs, 0.0, "sampled lower bound on the global constant");

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let base: Vec<_> = (0..pairs.clamp(1, 1000))
        .map(|_| {
            let x: Vec<f64> = (0..m.n() - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = x.iter().map(|c| c.abs()).sum();
            let radius = rng.gen::<f64>();
            let x: Vec<f64> = x.iter().map(|c| c * radius / norm.max(f64::MIN_POSITIVE)).collect();
            let opposite = x.iter().map(|c| -c).collect();
            (ConePoint::new(x, 0.0), ConePoint::new(opposite, 0.0))
        })
        .collect();
    let antipodal = max_ratio(&f, phi, &base)?;
    report.push("F-antipodal-base", antipodal.is_finite(), Some(antipodal), base.len(), 0.0, "");
    Ok(report)
}

/// A non-negative function `Φ` on `(0, r]`.
pub trait RadialDensity: Sync {
    fn value(&self, s: f64) -> f64;

    /// `s Φ(s)` at `s = e^{-depth}`.
    fn scaled_at_depth(&self, depth: f64) -> f64 {
        let s = (-depth).exp();
        s * self.value(s)
    }

    /// `∫_0^c Φ` when it has a closed form.
    fn primitive(&self, _c: f64) -> Option<f64> {
        None
    }
}

/// `Φ(s) = s^{-p}`, `p < 1`.
#[derive(Clone, Copy, Debug)]
pub struct PowerDensity {
    pub exponent: f64,
}

impl RadialDensity for PowerDensity {
    fn value(&self, s: f64) -> f64 {
        s.powf(-self.exponent)
    }

    fn scaled_at_depth(&self, depth: f64) -> f64 {
        (-(1.0 - self.exponent) * depth).exp()
    }

    fn primitive(&self, c: f64) -> Option<f64> {
        Some(c.powf(1.0 - self.exponent) / (1.0 - self.exponent))
    }
}

/// `Φ = φ'`.
#[derive(Clone, Copy, Debug)]
pub struct Derivative<'a>(pub &'a ModulusFunction<f64>);

impl RadialDensity for Derivative<'_> {
    fn value(&self, s: f64) -> f64 {
        self.0.derivative(s).unwrap_or(f64::NAN)
    }

    fn scaled_at_depth(&self, depth: f64) -> f64 {
        // s φ'(s) = -φ g' in the log profile
        let p = self.0.log_profile(depth);
        -p.log_phi.exp() * p.dlog
    }

    fn primitive(&self, c: f64) -> Option<f64> {
        Some(self.0.eval(c))
    }
}

/// `∫_0^c Φ`, from the closed form or in the variable `log(1/s)`.
fn density_integral(phi: &dyn RadialDensity, c: f64, tol: f64) -> Result<f64> {
    if let Some(v) = phi.primitive(c) {
        return Ok(v);
    }
    let start = -c.ln();
    Ok(half_line_refined(&|u: f64| phi.scaled_at_depth(start + u), 0.0, tol)?.0)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∫_0^1 Φ(|γa + (1-γ)b|) dγ`, split at the point of the segment closest to the
/// origin and integrated in `u` with `γ = γ_c ± w e^{-u}`.
fn segment_average(phi: &dyn RadialDensity, a: &[f64], b: &[f64], tol: f64) -> Result<f64> {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let c = dot(&diff, &diff).sqrt();
    let gamma_c = (-dot(b, &diff) / (c * c)).clamp(0.0, 1.0);
    let closest: Vec<f64> = b.iter().zip(&diff).map(|(y, d)| y + gamma_c * d).collect();
    let mut d_c = dot(&closest, &closest).sqrt();
    // below rounding level the segment cannot be told apart from one through the origin
    if d_c <= 4.0 * f64::EPSILON * (dot(a, a).sqrt() + dot(b, b).sqrt()) {
        d_c = 0.0;
    }
    let interior = gamma_c > 0.0 && gamma_c < 1.0;
    let mut total = 0.0;
    for (sign, width) in [(1.0, 1.0 - gamma_c), (-1.0, gamma_c)] {
        if width <= 0.0 {
            continue;
        }
        if interior && d_c == 0.0 {
            // through the origin: each half is a radial integral from 0
            total += density_integral(phi, c * width, tol)? / c;
            continue;
        }
        let cross = sign * dot(&closest, &diff);
        let integrand = |u: f64| {
            let ln_w = width.ln() - u;
            let ln_dist = if interior {
                let ln_cw = c.ln() + ln_w;
                if ln_cw >= d_c.ln() {
                    ln_cw + 0.5 * (2.0 * (d_c.ln() - ln_cw)).exp().ln_1p()
                } else {
                    d_c.ln() + 0.5 * (2.0 * (ln_cw - d_c.ln())).exp().ln_1p()
                }
            } else {
                let w = ln_w.exp();
                0.5 * (d_c * d_c + 2.0 * w * cross + c * c * w * w).ln()
            };
            (ln_w - ln_dist).exp() * phi.scaled_at_depth(-ln_dist)
        };
        // the decay turns from algebraic to exponential once c·w drops below d_c
        let knee = if interior { ((c * width).ln() - d_c.ln()).max(0.0) } else { 0.0 };
        if knee > 0.0 {
            total += adaptive(&integrand, 0.0, knee, 0.1 * tol, &GaussLegendre::new(16));
        }
        total += half_line_refined(&|u: f64| integrand(knee + u), 0.0, tol)?.0;
    }
    Ok(total)
}

/// Checks `∫_0^1 Φ(|γa + (1-γ)b|)dγ ≤ (∫_0^{|a|}Φ + ∫_0^{|b|}Φ)/(|a| + |b|)` for a
/// non-increasing `Φ` on `(0, r]`, and equality when `a` is a negative multiple of `b`.
pub fn averaging_lemma_check(phi: &dyn RadialDensity, a: &[f64], b: &[f64], r: f64, quad_tol: f64) -> Result<VerificationReport> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidParameter("a and b must be non-empty vectors of equal length".into()));
    }
    let (na, nb) = (dot(a, a).sqrt(), dot(b, b).sqrt());
    if !(na > 0.0 && nb > 0.0 && na <= r && nb <= r) {
        return Err(Error::InvalidParameter(format!("need 0 < |a|, |b| ≤ r = {r}, got |a| = {na}, |b| = {nb}")));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("quadrature tolerance must be positive, got {quad_tol}")));
    }
    let inner_tol = 1e-2 * quad_tol;
    let lhs = segment_average(phi, a, b, inner_tol)?;
    let rhs = (density_integral(phi, na, inner_tol)? + density_integral(phi, nb, inner_tol)?) / (na + nb);
    let mut report = VerificationReport::new("averaging lemma");
    let slack = quad_tol * rhs.abs().max(f64::MIN_POSITIVE);
    report.push("averaging-inequality", lhs <= rhs + slack, Some(lhs / rhs), 1, quad_tol, format!("lhs = {lhs}, rhs = {rhs}"));
    let opposite = dot(a, b) / (na * nb) <= -1.0 + 1e-12;
    if opposite {
        let gap = (lhs - rhs).abs() / rhs.abs();
        report.push("averaging-equality", gap <= quad_tol, Some(gap), 1, quad_tol, "a is a negative multiple of b");
    }
    Ok(report)
}

/// The main-theorem suite for the glued map: normalisation, axis attainment of the
/// optimal moduli of `H` and `F` at the origin, global `φ`-moduli and the axis formulas.
pub fn verify_main_theorem(g: &GluedMap<f64>, radii: &[f64], count: usize, seed: u64) -> Result<VerificationReport> {
    check_radii(radii)?;
    let phi = g.phi();
    let n = g.dim();
    let f = InverseOf(g);
    let origin = ConePoint::origin(n);
    let mut report = VerificationReport::new(format!("main theorem, {}", phi.spec())).with_seed(seed);

    // (i) normalisation
    let at_origin = g.eval(&origin)?.cone_norm();
    report.push("H(0)=0", at_origin == 0.0, Some(at_origin), 1, 0.0, "");
    let mut outside = 0.0f64;
    for radius in [1.0, 1.25, 2.0, 8.0] {
        for p in sample_cone_sphere(n, radius, NormKind::Cone, Half::Both, count, seed, false)? {
            outside = outside.max(g.eval(&p)?.distance(&p, NormKind::Cone));
        }
    }
    // on the unit sphere the lower half goes through the inverse solver
    report.push("identity-outside-cone", outside <= 1e-12, Some(outside), 4 * count, 1e-12, "cone spheres of radius 1, 1.25, 2, 8");
    let mut base = 0.0f64;
    for p in sample_cone_sphere(n, 1.0, NormKind::Cone, Half::Both, count, seed, false)? {
        for scale in [1e-6, 0.1, 0.5, 1.0] {
            let q = ConePoint::new(p.x.iter().map(|c| c * scale).collect(), 0.0);
            base = base.max(g.eval(&q)?.distance(&q, NormKind::Cone));
        }
    }
    report.push("identity-on-base", base == 0.0, Some(base), 4 * count, 0.0, "");

    // (ii) optimal moduli at the origin, attained on the axis
    let mut axis_err = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for &r in radii {
        let target = phi.eval(r);
        let h_axis = g.eval(&ConePoint::axis(n, r))?.cone_norm();
        let f_axis = f.eval(&ConePoint::axis(n, -r))?.cone_norm();
        axis_err = axis_err.max((h_axis - target).abs()).max((f_axis - target).abs());
        let h_sup = optimal_modulus(g, &origin, r, NormKind::Cone, count, seed)?;
        let f_sup = optimal_modulus(&f, &origin, r, NormKind::Cone, count, seed)?;
        excess = excess.max(h_sup - h_axis).max(f_sup - f_axis);
    }
    report.push("axis-attains-phi", axis_err <= 1e-12, Some(axis_err), radii.len(), 1e-12, "|ω(0,r) - φ(r)| on the axis for H and F");
    report.push(
        "off-axis-below-axis",
        excess <= 1e-9,
        Some(excess),
        radii.len() * count,
        1e-9,
        "largest sampled sup minus axis value",
    );

    // (iii) global φ-moduli
    let pairs = count.max(1000);
    report.extend(verify_global_modulus_h(&g.cone_map, pairs, seed)?);
    report.extend(verify_global_modulus_f(&g.cone_map, pairs, seed)?);

    // (iv) axis formulas
    let tol = g.cone_map.tol;
    let mut formula = 0.0f64;
    for &y in &sample_grid::<f64>(64) {
        let up = f.eval(&ConePoint::axis(n, y))?.t;
        let psi = match phi.invert(y, tol) {
            Ok(v) => v,
            // ψ(y) below the smallest float: F collapses onto the origin
            Err(Error::OutOfDomain(_)) => 0.0,
            Err(e) => return Err(e),
        };
        let down = f.eval(&ConePoint::axis(n, -y))?.t;
        let h_up = g.eval(&ConePoint::axis(n, y))?.t;
        formula = formula
            .max((up - psi).abs())
            .max((down + phi.eval(y)).abs())
            .max((h_up - phi.eval(y)).abs());
    }
    report.push("axis-formulas", formula <= 1e-9, Some(formula), 2 * 64, 1e-9, "F(0,y) = (0,ψ(y)), F(0,-y) = (0,-φ(y)), H(0,t) = (0,φ(t))");
    Ok(report)
}
