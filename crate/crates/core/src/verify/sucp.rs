//! Vanishing order of E∫_{B_r(x0)}u(t0)² as r → 0.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::functionals::{ball_mass, Estimate, Region};
use crate::solver::EnsembleField;

/// Slopes above this count as infinite-order vanishing.
pub const ORDER_CAP: f64 = 64.0;

#[derive(Debug, Clone, Serialize)]
pub struct SucpReport {
    pub t0: f64,
    pub x0: Vec<f64>,
    pub radii: Vec<f64>,
    pub masses: Vec<Estimate>,
    /// Least-squares slope of ln mass against ln r over the resolved radii.
    pub slope: f64,
    /// Radii whose mass clears 3 standard errors and is positive.
    pub resolved: usize,
    pub inconclusive: bool,
    /// Finite slope below ORDER_CAP.
    pub bounded: bool,
}

pub fn sucp_probe(u: &EnsembleField, t0: f64, x0: &[f64], radii: &[f64]) -> Result<SucpReport> {
    if radii.len() < 2 {
        return invalid("need at least two radii");
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) || !(radii[radii.len() - 1] > 0.0) {
        return invalid("radii must be positive and strictly decreasing");
    }
    let outline = Region::ball(x0, radii[0]).outline();
    if let Some(p) = outline.iter().find(|p| !u.domain.contains(t0, p)) {
        return Err(Error::OutOfDomain(format!("B_{}({x0:?}) leaves G({t0}) at {p:?}", radii[0])));
    }
    let masses = radii.iter().map(|&r| ball_mass(u, t0, x0, r)).collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(&masses)
        .filter(|(_, m)| m.value > 0.0 && m.value > 3.0 * m.stderr && m.value.ln().is_finite())
        .map(|(r, m)| (r.ln(), m.value.ln()))
        .collect();
    let resolved = pts.len();
    let slope = if resolved >= 2 {
        let n = resolved as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    let inconclusive = resolved < 2;
    Ok(SucpReport {
        t0,
        x0: x0.to_vec(),
        radii: radii.to_vec(),
        masses,
        slope,
        resolved,
        inconclusive,
        bounded: !inconclusive && slope.is_finite() && slope < ORDER_CAP,
    })
}
