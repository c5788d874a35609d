//! Two-sphere one-cylinder inequalities: measured triples, a fitted
//! constant pair, and hold-out validation.
//!
//! The inequality is (E∫_{B_ρ}u(t0)²)^{1/2} ≤ (C_mult R/ρ)|ln ρ|^{3/2} E^{1−θ} ε1^θ
//! with θ = 1/(C_exp(ln R − ln r)).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::functionals::{cylinder_energy, sphere_mass, Estimate, Region};
use crate::geometry::MovingDomain;
use crate::solver::EnsembleField;

/// Which energy and containment hypothesis applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSphereVariant {
    /// Cylinder (t0 − R², t0) × B_R(x0) inside G; energy E.
    Interior,
    /// B_R(x0) away from the fixed boundary, R ≤ R0; energy E1 on B_R ∩ G(t).
    Boundary,
    /// Cylinder clipped at t = 0; energy E2.
    ZeroInitial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSphereParams {
    pub variant: TwoSphereVariant,
    pub t0: f64,
    pub x0: Vec<f64>,
    pub r: f64,
    pub rho: f64,
    pub big_r: f64,
}

impl TwoSphereParams {
    /// Radius ordering 0 < r ≤ ρ ≤ η1 R, R ≤ 1/√(2e), plus the variant's
    /// time and containment hypotheses.
    pub fn validate(&self, domain: &MovingDomain, eta1: f64, r0: f64) -> Result<()> {
        let (r, rho, big_r) = (self.r, self.rho, self.big_r);
        if !(r > 0.0 && r <= rho && rho <= eta1 * big_r * (1.0 + 1e-12)) {
            return invalid(format!("radii violate 0 < r <= rho <= eta1 R: r = {r}, rho = {rho}, R = {big_r}, eta1 = {eta1}"));
        }
        if big_r > 1.0 / (2.0 * std::f64::consts::E).sqrt() {
            return invalid(format!("R = {big_r} exceeds 1/sqrt(2e)"));
        }
        if self.t0 > domain.horizon || self.t0 <= 0.0 {
            return invalid(format!("t0 = {} outside (0, T]", self.t0));
        }
        let outline = Region::ball(&self.x0, big_r).outline();
        let start = match self.variant {
            TwoSphereVariant::ZeroInitial => (self.t0 - big_r * big_r).max(0.0),
            _ => self.t0 - big_r * big_r,
        };
        if !domain.contains(self.t0, &self.x0) {
            return Err(Error::OutOfDomain(format!("x0 = {:?} not in G({})", self.x0, self.t0)));
        }
        match self.variant {
            TwoSphereVariant::Interior | TwoSphereVariant::ZeroInitial => {
                if start < -1e-12 {
                    return invalid(format!("R = {big_r} > sqrt(t0) = {}", self.t0.sqrt()));
                }
                for k in 0..=8 {
                    let t = start + (self.t0 - start) * k as f64 / 8.0;
                    if let Some(p) = outline.iter().find(|p| !domain.contains(t, p)) {
                        return Err(Error::OutOfDomain(format!("cylinder point {p:?} leaves G({t})")));
                    }
                }
            }
            TwoSphereVariant::Boundary => {
                if big_r > r0 || big_r > self.t0.sqrt() {
                    return invalid(format!("R = {big_r} exceeds min(sqrt(t0), R0 = {r0})"));
                }
                let h = big_r / 16.0;
                let d2 = |p: &Vec<f64>| p.iter().zip(&self.x0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                if domain.fixed_boundary_points(h).iter().any(|p| d2(p) < big_r * big_r) {
                    return Err(Error::OutOfDomain(format!("B_R({:?}) meets the fixed boundary", self.x0)));
                }
            }
        }
        Ok(())
    }

    pub fn theta(&self, c_exp: f64) -> f64 {
        1.0 / (c_exp * (self.big_r.ln() - self.r.ln()))
    }

    /// (R/ρ)|ln ρ|^{3/2}.
    pub fn prefactor(&self) -> f64 {
        self.big_r / self.rho * self.rho.ln().abs().powf(1.5)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoSphereReport {
    pub params: TwoSphereParams,
    /// (E∫_{B_ρ}u(t0)²)^{1/2}.
    pub lhs: Estimate,
    /// ε1 = (E∫_{B_r}u(t0)²)^{1/2}.
    pub eps1: Estimate,
    /// E, E1 or E2.
    pub energy: Estimate,
}

/// E^{1−θ}x^θ.
pub fn interpolation_bound(energy: f64, x: f64, theta: f64) -> f64 {
    energy.powf(1.0 - theta) * x.powf(theta)
}

pub fn two_sphere_report(u: &EnsembleField, params: &TwoSphereParams, eta1: f64, r0: f64) -> Result<TwoSphereReport> {
    params.validate(&u.domain, eta1, r0)?;
    let lhs = sphere_mass(u, params.t0, &params.x0, params.rho)?;
    let eps1 = sphere_mass(u, params.t0, &params.x0, params.r)?;
    let clipped = params.variant == TwoSphereVariant::ZeroInitial;
    let energy = cylinder_energy(u, params.t0, &params.x0, params.big_r, clipped)?;
    Ok(TwoSphereReport { params: params.clone(), lhs, eps1, energy })
}

impl TwoSphereReport {
    pub fn bound(&self, c_mult: f64, c_exp: f64) -> f64 {
        let th = self.params.theta(c_exp);
        c_mult * self.params.prefactor() * interpolation_bound(self.energy.value, self.eps1.value, th)
    }

    /// Delta-method standard error of the bound.
    pub fn bound_stderr(&self, c_mult: f64, c_exp: f64) -> f64 {
        let th = self.params.theta(c_exp);
        let b = self.bound(c_mult, c_exp);
        let rel = |e: &Estimate| if e.value > 0.0 { e.stderr / e.value } else { 0.0 };
        b * (((1.0 - th) * rel(&self.energy)).powi(2) + (th * rel(&self.eps1)).powi(2)).sqrt()
    }

    /// Smallest C_mult making this instance hold at exponent constant c_exp.
    pub fn required_multiplier(&self, c_exp: f64) -> f64 {
        let b = self.bound(1.0, c_exp);
        if b > 0.0 {
            self.lhs.value / b
        } else {
            f64::INFINITY
        }
    }

    fn trivial(&self) -> bool {
        !(self.lhs.value > 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoSphereFit {
    pub c_mult: f64,
    pub c_exp: f64,
    /// Reports used (nonzero left side).
    pub used: usize,
    pub excluded: usize,
    /// bound/lhs − 1 per used training report.
    pub slack: Vec<f64>,
}

const C_LO: f64 = 1e-6;
const C_HI: f64 = 1e12;

/// C_exp is the smallest C with C_mult(C) ≤ C, C_mult(C) the largest
/// required multiplier over the sweep.
pub fn two_sphere_fit(reports: &[TwoSphereReport]) -> Result<TwoSphereFit> {
    let used: Vec<&TwoSphereReport> = reports.iter().filter(|r| !r.trivial()).collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "two-sphere fit needs at least 3 nontrivial radius triples, got {}",
            used.len()
        )));
    }
    let req = |c: f64| used.iter().map(|r| r.required_multiplier(c)).fold(0.0, f64::max);
    let g = |c: f64| req(c) - c;
    let n = 480;
    let grid: Vec<f64> = (0..=n).map(|k| C_LO * (C_HI / C_LO).powf(k as f64 / n as f64)).collect();
    let first = grid.iter().position(|&c| g(c) <= 0.0).ok_or_else(|| {
        Error::Numerical(format!("no C <= {C_HI} with C_mult(C) <= C; the sweep is inconsistent with the inequality"))
    })?;
    let c = if first == 0 {
        grid[0]
    } else {
        let (mut lo, mut hi) = (grid[first - 1], grid[first]);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let c_mult = req(c);
    let slack = used.iter().map(|r| r.bound(c_mult, c) / r.lhs.value - 1.0).collect();
    Ok(TwoSphereFit { c_mult, c_exp: c, used: used.len(), excluded: reports.len() - used.len(), slack })
}

#[derive(Debug, Clone, Serialize)]
pub struct HoldoutViolation {
    pub index: usize,
    pub lhs: f64,
    pub bound: f64,
    /// (lhs − bound)/σ with σ² = σ_lhs² + σ_bound².
    pub sigmas: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HoldoutReport {
    pub checked: usize,
    pub violations: Vec<HoldoutViolation>,
    /// Largest (lhs − bound)/σ over the hold-out, −∞ if all bounds are slack.
    pub worst_sigmas: f64,
}

/// Flags hold-out reports whose left side exceeds the fitted bound by more
/// than k combined standard errors.
pub fn two_sphere_validate(fit: &TwoSphereFit, holdout: &[TwoSphereReport], k: f64) -> HoldoutReport {
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (i, r) in holdout.iter().enumerate() {
        let b = r.bound(fit.c_mult, fit.c_exp);
        let sd = (r.lhs.stderr.powi(2) + r.bound_stderr(fit.c_mult, fit.c_exp).powi(2)).sqrt();
        let excess = r.lhs.value - b;
        let z = if sd > 0.0 { excess / sd } else if excess > 1e-12 * b.abs().max(r.lhs.value) { f64::INFINITY } else { f64::NEG_INFINITY };
        worst = worst.max(z);
        if excess > k * sd + 1e-12 * b.abs().max(r.lhs.value) {
            violations.push(HoldoutViolation { index: i, lhs: r.lhs.value, bound: b, sigmas: z });
        }
    }
    HoldoutReport { checked: holdout.len(), violations, worst_sigmas: worst }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(r: f64, rho: f64, big_r: f64, lhs: f64, eps: f64, en: f64) -> TwoSphereReport {
        TwoSphereReport {
            params: TwoSphereParams { variant: TwoSphereVariant::Interior, t0: 0.5, x0: vec![0.5], r, rho, big_r },
            lhs: Estimate::exact(lhs),
            eps1: Estimate::exact(eps),
            energy: Estimate::exact(en),
        }
    }

    #[test]
    fn theta_unit_at_e() {
        let p = rep(0.1, 0.1, 0.1 * std::f64::consts::E, 1.0, 1.0, 1.0).params;
        assert!((p.theta(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fit_covers_training() {
        let reps = vec![
            rep(0.01, 0.05, 0.3, 0.3, 0.1, 1.0),
            rep(0.02, 0.05, 0.3, 0.3, 0.15, 1.0),
            rep(0.02, 0.1, 0.4, 0.45, 0.15, 1.1),
            rep(0.05, 0.1, 0.4, 0.45, 0.25, 1.1),
        ];
        let fit = two_sphere_fit(&reps).unwrap();
        assert!(fit.c_mult <= fit.c_exp * (1.0 + 1e-9));
        assert!(fit.slack.iter().all(|s| *s >= -1e-9));
        assert!(two_sphere_validate(&fit, &reps, 3.0).violations.is_empty());
    }

    #[test]
    fn trivial_reports_excluded() {
        let reps = vec![rep(0.01, 0.05, 0.3, 0.0, 0.0, 0.0); 5];
        assert!(matches!(two_sphere_fit(&reps), Err(Error::InsufficientData(_))));
    }
}
