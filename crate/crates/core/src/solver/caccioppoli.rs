//! Energy-versus-mass ratio on nested cylinders.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::functionals::{cylinder_integral, Estimate, Region};

use super::field::EnsembleField;

/// Outer cylinder (t0 − R², t0) × B_{ρ2}(x0); inner cylinder
/// (t0 − R²/2, t0) × B_{(ρ1 + 2ρ2)/3}(x0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaccioppoliCylinders {
    pub t0: f64,
    pub x0: Vec<f64>,
    pub r: f64,
    pub rho1: f64,
    pub rho2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaccioppoliReport {
    /// E∬ |∇u|² on the inner cylinder.
    pub gradient_energy: Estimate,
    /// E∬ u² on the outer cylinder.
    pub mass: Estimate,
    pub ratio: f64,
    /// 1/R² + 1/(ρ2 − ρ1)².
    pub scale: f64,
    /// ratio / scale, the smallest constant for this configuration.
    pub constant: f64,
}

pub fn caccioppoli_check(field: &EnsembleField, c: &CaccioppoliCylinders) -> Result<CaccioppoliReport> {
    if !(c.r > 0.0 && c.rho1 > 0.0 && c.rho2 > c.rho1) {
        return invalid(format!("cylinders not nested: need R > 0 and 0 < rho1 < rho2, got {c:?}"));
    }
    if c.t0 - c.r * c.r < -1e-12 {
        return invalid(format!("outer cylinder starts before t = 0 (t0 − R² = {})", c.t0 - c.r * c.r));
    }
    let inner = Region::ball(&c.x0, (c.rho1 + 2.0 * c.rho2) / 3.0);
    let outer = Region::ball(&c.x0, c.rho2);
    let grad = cylinder_integral(field, c.t0 - 0.5 * c.r * c.r, c.t0, &inner, &|_, g, _| g.iter().map(|v| v * v).sum())?;
    let mass = cylinder_integral(field, (c.t0 - c.r * c.r).max(0.0), c.t0, &outer, &|u, _, _| u * u)?;
    let (ge, me) = (Estimate::from_samples(&grad), Estimate::from_samples(&mass));
    let scale = 1.0 / (c.r * c.r) + 1.0 / (c.rho2 - c.rho1).powi(2);
    let ratio = if me.value > 0.0 { ge.value / me.value } else { 0.0 };
    Ok(CaccioppoliReport { gradient_energy: ge, mass: me, ratio, scale, constant: ratio / scale })
}
