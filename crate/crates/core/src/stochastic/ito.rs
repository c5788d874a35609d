//! Itô isometry check and a Kolmogorov–Smirnov normality test.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::paths::Ensemble;

#[derive(Debug, Clone, Serialize)]
pub struct ItoReport {
    /// MC mean of (Σ c_k ΔW_k)².
    pub lhs: f64,
    /// MC mean of Σ c_k² Δt_k (exact when c is deterministic).
    pub rhs: f64,
    /// Standard error of the per-path difference.
    pub stderr: f64,
    pub relative_error: f64,
    pub within_3sigma: bool,
}

/// Compares E[(Σ c_k ΔW_k)²] with E[Σ c_k² Δt_k] for an adapted step
/// integrand `c(k, W(t_k))` evaluated at the left end of each step.
pub fn ito_isometry_check(ens: &Ensemble, c: &(dyn Fn(usize, f64) -> f64 + Sync)) -> ItoReport {
    let dts: Vec<f64> = ens.times.windows(2).map(|w| w[1] - w[0]).collect();
    let per_path: Vec<(f64, f64)> = ens
        .paths
        .iter()
        .map(|p| {
            let mut w = 0.0;
            let mut stoch = 0.0;
            let mut quad = 0.0;
            for (k, (&dw, &dt)) in p.increments.iter().zip(&dts).enumerate() {
                let ck = c(k, w);
                stoch += ck * dw;
                quad += ck * ck * dt;
                w += dw;
            }
            (stoch * stoch, quad)
        })
        .collect();
    let n = per_path.len() as f64;
    let lhs = per_path.iter().map(|v| v.0).sum::<f64>() / n;
    let rhs = per_path.iter().map(|v| v.1).sum::<f64>() / n;
    let dmean = lhs - rhs;
    let var = per_path.iter().map(|v| (v.0 - v.1 - dmean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let stderr = (var / n).sqrt();
    let relative_error = if rhs != 0.0 { dmean.abs() / rhs } else { dmean.abs() };
    ItoReport { lhs, rhs, stderr, relative_error, within_3sigma: dmean.abs() <= 3.0 * stderr }
}

#[derive(Debug, Clone, Serialize)]
pub struct KsReport {
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov distribution tail Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test of `samples` against N(0, 1), with the
/// Stephens small-sample correction of the asymptotic p-value.
pub fn ks_standard_normal(samples: &[f64]) -> KsReport {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let nf = n as f64;
    let dist = Normal::new(0.0, 1.0).expect("unit normal");
    let mut d: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        let f = dist.cdf(*v);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let sq = nf.sqrt();
    KsReport { n, statistic: d, p_value: kolmogorov_q((sq + 0.12 + 0.11 / sq) * d) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_tail_known_values() {
        // Q(1.3581) ≈ 0.05, Q(1.6276) ≈ 0.01.
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn ks_rejects_shifted_sample() {
        let x: Vec<f64> = (0..2000).map(|i| (i as f64 + 0.5) / 2000.0 * 6.0 - 3.0 + 2.0).collect();
        assert!(ks_standard_normal(&x).p_value < 1e-6);
    }
}
