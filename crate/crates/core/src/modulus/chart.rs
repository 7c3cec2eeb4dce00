//! Integration chart for energy-type integrals `∫_0^∞ F(L) dL` with `L = log(1/s)`.
//!
//! For the iterated-log family of depth `k ≥ 2` the integrand `φ(e^{-L})^n`
//! decays like `1/(L log L ⋯ ℓ_k^{nα})`, far too slowly for panels in `L`. The
//! chart integrates in `w = ℓ_k(L)` instead: with `u_k = w`, `u_m = exp(u_{m+1})`
//! we get `L = u_1 - e↑↑(k-2)` and `dL/dw = Π_{m<k} u_m`, so the weight becomes
//! `≈ (1 + a_k w)^{-nα}`. Once `u_1` overflows the terms are replaced by their
//! exact limits, which keeps the integrand finite for every `w ≥ 0`.

use super::{iterated_log, tower, Family, ModulusFunction};

/// Data of the chart at one value of the integration variable `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    /// `L = log(1/s)`; `+∞` beyond the overflow threshold.
    pub depth: f64,
    /// `log(dL/dw)`.
    pub log_jacobian: f64,
    /// `log φ`, possibly `-∞`.
    pub log_phi: f64,
    /// `d log φ / dL`.
    pub dlog: f64,
    /// `n log φ + log(dL/dw)`, evaluated without cancellation.
    pub log_weight: f64,
}

impl ChartPoint {
    /// `s/φ(s) = 1/λ`.
    pub fn inv_lambda(&self) -> f64 {
        if self.depth.is_infinite() {
            return 0.0;
        }
        (-(self.depth + self.log_phi)).exp()
    }

    /// `s^{n-1} φ(s) dL/dw`.
    pub fn distortion_weight(&self, n: usize) -> f64 {
        if self.depth.is_infinite() {
            return 0.0;
        }
        (-(n as f64 - 1.0) * self.depth + self.log_phi + self.log_jacobian).exp()
    }
}

/// Chart attached to a modulus function and an exponent `n`.
#[derive(Clone, Debug)]
pub struct EnergyChart<'a> {
    phi: &'a ModulusFunction<f64>,
    n: usize,
}

impl ModulusFunction<f64> {
    pub fn energy_chart(&self, n: usize) -> EnergyChart<'_> {
        EnergyChart { phi: self, n }
    }
}

impl EnergyChart<'_> {
    pub fn exponent(&self) -> usize {
        self.n
    }

    /// Depth of the nested substitution (1 means `w = L`).
    pub fn nesting(&self) -> usize {
        match self.phi.family() {
            Family::IterLog { depth, .. } => *depth,
            _ => 1,
        }
    }

    pub fn at(&self, w: f64) -> ChartPoint {
        let n = self.n as f64;
        let k = self.nesting();
        if k == 1 {
            let profile = self.phi.log_profile(w);
            return ChartPoint {
                depth: w,
                log_jacobian: 0.0,
                log_phi: profile.log_phi,
                dlog: profile.dlog,
                log_weight: n * profile.log_phi,
            };
        }
        let Family::IterLog { alpha, .. } = *self.phi.family() else { unreachable!() };
        let dim = self.phi.dimension() as f64;
        let a = self.phi.coefficients();

        // u[m] for m = 1..=k, stored at index m - 1
        let mut u = vec![0.0; k];
        u[k - 1] = w;
        for m in (0..k - 1).rev() {
            u[m] = u[m + 1].exp();
        }
        let depth = u[0] - tower::<f64>(k - 2);
        let log_jacobian: f64 = u[1..].iter().sum();

        let mut log_weight = -n * alpha * (a[k - 1] * w).ln_1p();
        let mut log_phi = -alpha * (a[k - 1] * w).ln_1p();
        let mut dlog = 0.0;
        let finite = depth.is_finite();
        for j in 1..k {
            let aj = a[j - 1];
            let share = n / dim;
            let ell = if finite { iterated_log(j, depth) } else { (u[j - 1], 0.0, 0.0) };
            if ell.0.is_finite() {
                let base = (aj * ell.0).ln_1p();
                log_weight += u[j] - share * base;
                log_phi -= base / dim;
                dlog -= aj * ell.1 / (1.0 + aj * ell.0) / dim;
            } else {
                // ℓ_j overflowed: log(1 + a_j ℓ_j) = log a_j + u_{j+1} to working precision
                log_weight += if share == 1.0 {
                    -aj.ln()
                } else if u[j].is_infinite() {
                    (1.0 - share) * u[j]
                } else {
                    (1.0 - share) * u[j] - share * aj.ln()
                };
                log_phi = f64::NEG_INFINITY;
            }
        }
        if finite {
            let (ell, d1, _) = iterated_log(k, depth);
            dlog -= alpha * a[k - 1] * d1 / (1.0 + a[k - 1] * ell);
        }
        ChartPoint { depth, log_jacobian, log_phi, dlog, log_weight }
    }
}
