//! Carleman weight φ(t,x) = −|x−x0|²/(8(t0−t+a)) − λ ln σ(t0−t+a), its level
//! sets D_{ρ̃,a} and the cutoff built on them.

use std::sync::Arc;

use serde::Serialize;

use super::mollifier::Mollifier;
use super::sigma::{SigmaTable, S_MAX};
use crate::error::{invalid, Error, Result};

fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[derive(Debug, Clone)]
pub struct CarlemanWeights {
    pub t0: f64,
    pub x0: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub sigma: Arc<SigmaTable>,
}

impl CarlemanWeights {
    pub fn new(t0: f64, x0: Vec<f64>, a: f64, b: f64, lambda: f64, sigma: Arc<SigmaTable>) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Precondition(format!("time shift a = {a} must be positive")));
        }
        if !(b > 0.0 && b <= t0) {
            return Err(Error::Precondition(format!("lookback b = {b} must satisfy 0 < b <= t0 = {t0}")));
        }
        if a + b > S_MAX * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!("a + b = {} exceeds 1/e", a + b)));
        }
        if !(lambda >= 1.0) {
            return Err(Error::Precondition(format!("lambda = {lambda} must be >= 1")));
        }
        if x0.is_empty() {
            return invalid("focal point has no coordinates");
        }
        Ok(CarlemanWeights { t0, x0, a, b, lambda, sigma })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// s = t0 − t + a for t in the window [t0 − b, t0].
    pub fn shift(&self, t: f64) -> Result<f64> {
        let eps = 1e-12 * (1.0 + self.t0.abs());
        if t < self.t0 - self.b - eps || t > self.t0 + eps {
            return Err(Error::Domain(format!(
                "t = {t} outside the weight window [{}, {}]",
                self.t0 - self.b,
                self.t0
            )));
        }
        Ok((self.t0 - t + self.a).clamp(self.a, self.a + self.b))
    }

    /// σ_a(t) = σ(t0 − t + a).
    pub fn sigma_a(&self, t: f64) -> Result<f64> {
        self.sigma.sigma(self.shift(t)?)
    }

    pub fn ln_sigma_a(&self, t: f64) -> Result<f64> {
        self.sigma.ln_sigma(self.shift(t)?)
    }

    pub fn phi(&self, t: f64, x: &[f64]) -> Result<f64> {
        let s = self.shift(t)?;
        Ok(-dist2(x, &self.x0) / (8.0 * s) - self.lambda * self.sigma.ln_sigma(s)?)
    }

    /// ∇φ = −(x − x0)/(4(t0 − t + a)).
    pub fn grad_phi(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let s = self.shift(t)?;
        Ok(x.iter().zip(&self.x0).map(|(xi, ci)| -(xi - ci) / (4.0 * s)).collect())
    }

    /// Δφ = −n/(4(t0 − t + a)).
    pub fn laplacian_phi(&self, t: f64) -> Result<f64> {
        Ok(-(self.dim() as f64) / (4.0 * self.shift(t)?))
    }

    /// Level function ℓ = |x−x0|²/(8λs) + ln s; D_{ρ̃,a} = {ℓ < ln(ρ̃²/(8λ))}.
    pub fn level(&self, t: f64, x: &[f64]) -> Result<f64> {
        let s = self.shift(t)?;
        Ok(dist2(x, &self.x0) / (8.0 * self.lambda * s) + s.ln())
    }

    pub fn level_threshold(&self, rho_tilde: f64) -> f64 {
        (rho_tilde * rho_tilde / (8.0 * self.lambda)).ln()
    }
}

pub fn phi(t: f64, x: &[f64], w: &CarlemanWeights) -> Result<f64> {
    w.phi(t, x)
}

/// Membership of (t, x) in D_{ρ̃,a}; times outside the window are non-members.
pub fn level_set_membership(t: f64, x: &[f64], rho_tilde: f64, w: &CarlemanWeights) -> bool {
    if !(rho_tilde > 0.0) {
        return false;
    }
    match w.level(t, x) {
        Ok(l) => l < w.level_threshold(rho_tilde),
        Err(_) => false,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightBoundsReport {
    pub k: u32,
    pub inner_samples: usize,
    pub annulus_samples: usize,
    /// min over D_{ρ̃,a} of φ − λ ln(8λ/ρ̃²); the lower bound holds iff ≥ 0.
    pub min_inner_log_ratio: f64,
    pub inner_bound_holds: bool,
    /// Smallest C with s^{−k}e^φ ≤ C^λ(λ/ρ̃²)^{λ+k} on D_{2ρ̃,a} \ D_{ρ̃,a}.
    pub fitted_c: f64,
}

/// Samples a tensor grid over the window and a box holding D_{2ρ̃,a}, then
/// checks the lower bound on D_{ρ̃,a} and fits the annulus constant.
pub fn weight_bounds_check(
    w: &CarlemanWeights,
    rho_tilde: f64,
    k: u32,
    resolution: usize,
) -> Result<WeightBoundsReport> {
    if k > 2 {
        return invalid(format!("k = {k} must be 0, 1 or 2"));
    }
    if !(rho_tilde > 0.0) || resolution < 2 {
        return invalid("rho_tilde must be positive and resolution >= 2");
    }
    let n = w.dim();
    // Members of D_{2ρ̃,a} satisfy |x − x0|² < e^{−1}(2ρ̃)².
    let half = 2.0 * rho_tilde / std::f64::consts::E.sqrt() * 1.001;
    let lam = w.lambda;
    let inner_thr = w.level_threshold(rho_tilde);
    let outer_thr = w.level_threshold(2.0 * rho_tilde);
    let log_inner_floor = lam * (8.0 * lam / (rho_tilde * rho_tilde)).ln();
    let log_scale = (lam / (rho_tilde * rho_tilde)).ln();
    let mut min_inner = f64::INFINITY;
    let mut max_annulus = f64::NEG_INFINITY;
    let (mut n_in, mut n_ann) = (0usize, 0usize);
    let total = resolution.pow(n as u32);
    let mut x = vec![0.0; n];
    for it in 0..resolution {
        let t = w.t0 - w.b + w.b * it as f64 / (resolution - 1) as f64;
        let s = w.shift(t)?;
        let ln_sig = w.sigma.ln_sigma(s)?;
        for flat in 0..total {
            let mut rem = flat;
            for (d, xd) in x.iter_mut().enumerate() {
                let j = rem % resolution;
                rem /= resolution;
                *xd = w.x0[d] - half + 2.0 * half * j as f64 / (resolution - 1) as f64;
            }
            let r2 = dist2(&x, &w.x0);
            let level = r2 / (8.0 * lam * s) + s.ln();
            let ph = -r2 / (8.0 * s) - lam * ln_sig;
            if level < inner_thr {
                n_in += 1;
                min_inner = min_inner.min(ph - log_inner_floor);
            } else if level < outer_thr {
                n_ann += 1;
                let lhs = ph - k as f64 * s.ln();
                max_annulus = max_annulus.max((lhs - (lam + k as f64) * log_scale) / lam);
            }
        }
    }
    if n_in == 0 || n_ann == 0 {
        return invalid(format!("empty sample set (inner {n_in}, annulus {n_ann}); refine resolution"));
    }
    Ok(WeightBoundsReport {
        k,
        inner_samples: n_in,
        annulus_samples: n_ann,
        min_inner_log_ratio: min_inner,
        inner_bound_holds: min_inner >= -1e-12,
        fitted_c: max_annulus.exp(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CutoffValue {
    pub value: f64,
    pub grad: Vec<f64>,
    pub time_derivative: f64,
}

/// ψ2(ℓ(t,x)) with levels d1 = ln((R1/2)²/(8λ)), d2 = ln(R1²/(8λ)).
/// Equals 1 on D_{R1/2,a} and 0 outside D_{R1,a}.
pub fn space_time_cutoff(t: f64, x: &[f64], w: &CarlemanWeights, r1: f64) -> Result<CutoffValue> {
    if !(r1 > 0.0) {
        return invalid(format!("R1 = {r1} must be positive"));
    }
    let m = Mollifier::new(w.level_threshold(0.5 * r1), w.level_threshold(r1))?;
    let s = w.shift(t)?;
    let lam = w.lambda;
    let r2 = dist2(x, &w.x0);
    let level = r2 / (8.0 * lam * s) + s.ln();
    let p = m.psi2(level);
    let grad = x.iter().zip(&w.x0).map(|(xi, ci)| p.first * (xi - ci) / (4.0 * lam * s)).collect();
    // ∂ₜs = −1.
    let dl_dt = r2 / (8.0 * lam * s * s) - 1.0 / s;
    Ok(CutoffValue { value: p.value, grad, time_derivative: p.first * dl_dt })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(lambda: f64) -> CarlemanWeights {
        let t = Arc::new(SigmaTable::new(512).unwrap());
        CarlemanWeights::new(0.5, vec![0.2, -0.1], 0.02, 0.3, lambda, t).unwrap()
    }

    #[test]
    fn hypotheses_enforced() {
        let t = Arc::new(SigmaTable::new(64).unwrap());
        assert!(CarlemanWeights::new(0.5, vec![0.0], 0.2, 0.3, 1.0, t.clone()).is_err());
        assert!(CarlemanWeights::new(0.1, vec![0.0], 0.01, 0.3, 1.0, t.clone()).is_err());
        assert!(CarlemanWeights::new(0.5, vec![0.0], 0.01, 0.3, 0.5, t).is_err());
    }

    #[test]
    fn window_enforced() {
        let w = weights(1.0);
        assert!(w.phi(0.6, &[0.0, 0.0]).is_err());
        assert!(w.phi(0.1, &[0.0, 0.0]).is_err());
        assert!(w.phi(0.2, &[0.0, 0.0]).is_ok());
    }

    #[test]
    fn cutoff_plateaus() {
        let w = weights(2.0);
        let r1 = 1.5;
        let c = space_time_cutoff(w.t0, &w.x0.clone(), &w, r1).unwrap();
        assert_eq!(c.value, 1.0);
        let far = space_time_cutoff(w.t0, &[w.x0[0] + 2.0, w.x0[1]], &w, r1).unwrap();
        assert_eq!(far.value, 0.0);
    }
}
