//! Observation gaps, sphere masses and cylinder energies.

use serde::{Deserialize, Serialize};

use super::estimate::Estimate;
use super::region::{physical_spacing, Region, SliceQuadrature};
use crate::error::{invalid, Result};
use crate::geometry::MovingDomain;
use crate::solver::EnsembleField;

/// Static interior window (t_lo, t_hi) × O0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationWindow {
    pub region: Region,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl ObservationWindow {
    /// O0 ⊂ G(t) for every domain and sample time.
    pub fn validate(&self, domains: &[&MovingDomain], times: &[f64]) -> Result<()> {
        if matches!(self.region, Region::Everywhere) {
            return invalid("observation region must be an explicit subdomain");
        }
        if !(self.t_hi > self.t_lo) {
            return invalid(format!("observation window ({}, {}) is empty", self.t_lo, self.t_hi));
        }
        let outline = self.region.outline();
        for (k, d) in domains.iter().enumerate() {
            for &t in times.iter().filter(|t| **t >= self.t_lo && **t <= self.t_hi) {
                if let Some(p) = outline.iter().find(|p| !d.contains(t, p)) {
                    return invalid(format!("O0 point {p:?} leaves domain {k} at t = {t}"));
                }
            }
        }
        Ok(())
    }
}

/// ε̃ = sup_t E∫_{O0}|u1 − u2|² with the maximizing slice.
#[derive(Debug, Clone, Serialize)]
pub struct GapEstimate {
    pub value: f64,
    pub stderr: f64,
    pub time: f64,
    pub per_slice: Vec<(f64, Estimate)>,
}

fn paths_of(fields: &[&EnsembleField]) -> usize {
    fields.iter().map(|f| f.stored_paths()).max().unwrap_or(1)
}

/// Coupled observation gap; both fields must be driven by the same noise.
pub fn observation_gap(u1: &EnsembleField, u2: &EnsembleField, w: &ObservationWindow) -> Result<GapEstimate> {
    if u1.key != u2.key {
        return invalid("observation gap needs fields driven by identical Brownian paths");
    }
    gap(u1, u2, w)
}

/// Same functional without the coupling requirement: paths are paired by
/// index, so independent noise contributes to the value.
pub fn observation_misfit(u: &EnsembleField, obs: &EnsembleField, w: &ObservationWindow) -> Result<GapEstimate> {
    gap(u, obs, w)
}

fn gap(u1: &EnsembleField, u2: &EnsembleField, w: &ObservationWindow) -> Result<GapEstimate> {
    let (t1, t2) = (u1.slice_times(), u2.slice_times());
    if t1 != t2 {
        return invalid("fields store different time slices");
    }
    w.validate(&[&u1.domain, &u2.domain], &t1)?;
    let n = paths_of(&[u1, u2]);
    let mut per_slice = Vec::new();
    for (s, &t) in t1.iter().enumerate() {
        if t < w.t_lo || t > w.t_hi {
            continue;
        }
        let h = physical_spacing(u1, t).min(physical_spacing(u2, t));
        let q1 = SliceQuadrature::with_spacing(u1, s, &w.region, h)?;
        let q2 = SliceQuadrature::with_spacing(u2, s, &w.region, h)?;
        if q1.nodes.len() != q2.nodes.len() {
            return invalid(format!("O0 quadrature differs between the domains at t = {t}"));
        }
        let samples: Vec<f64> = (0..n)
            .map(|p| {
                let (a, b) = (q1.values(u1, p), q2.values(u2, p));
                q1.nodes.iter().zip(a.iter().zip(&b)).map(|(nd, (x, y))| nd.weight * (x - y) * (x - y)).sum()
            })
            .collect();
        per_slice.push((t, Estimate::from_samples(&samples)));
    }
    let (time, best) = per_slice
        .iter()
        .copied()
        .fold((f64::NAN, Estimate::exact(f64::NEG_INFINITY)), |acc, (t, e)| if e.value > acc.1.value { (t, e) } else { acc });
    if per_slice.is_empty() {
        return invalid("no stored slice inside the observation window");
    }
    Ok(GapEstimate { value: best.value, stderr: best.stderr, time, per_slice })
}

/// √(E∫_{B_r(x0) ∩ G(t0)} u(t0)²).
pub fn sphere_mass(u: &EnsembleField, t0: f64, x0: &[f64], r: f64) -> Result<Estimate> {
    Ok(ball_mass(u, t0, x0, r)?.sqrt())
}

/// E∫_{B_r(x0) ∩ G(t0)} u(t0)² without the square root.
pub fn ball_mass(u: &EnsembleField, t0: f64, x0: &[f64], r: f64) -> Result<Estimate> {
    if !(r > 0.0) {
        return invalid(format!("radius r = {r} must be positive"));
    }
    let s = u.slice_at(t0)?;
    let q = SliceQuadrature::new(u, s, &Region::ball(x0, r))?;
    if q.is_empty() {
        return invalid(format!("B_{r}({x0:?}) misses G({t0})"));
    }
    let samples: Vec<f64> = (0..u.stored_paths()).map(|p| q.mass(u, p)).collect();
    Ok(Estimate::from_samples(&samples))
}

/// Per-path ∫_{t_lo}^{t_hi} ∫_{region ∩ G(t)} f dx dt, with the slice
/// integrals interpolated linearly in time between stored slices.
pub fn cylinder_integral(
    u: &EnsembleField,
    t_lo: f64,
    t_hi: f64,
    region: &Region,
    f: &dyn Fn(f64, &[f64], &[f64]) -> f64,
) -> Result<Vec<f64>> {
    let tol = 0.25 * u.dt();
    let inside = (0..u.slices.len()).filter(|&s| u.slices[s].time >= t_lo - tol && u.slices[s].time <= t_hi + tol).count();
    if inside < 2 {
        return invalid(format!("fewer than two stored slices in [{t_lo}, {t_hi}]; lower the stride"));
    }
    let times = u.slice_times();
    let mut weights = vec![0.0; times.len()];
    for k in 0..times.len().saturating_sub(1) {
        let (ta, tb) = (times[k], times[k + 1]);
        let (c, d) = (ta.max(t_lo), tb.min(t_hi));
        if d <= c {
            continue;
        }
        let h = tb - ta;
        weights[k] += ((tb - c).powi(2) - (tb - d).powi(2)) / (2.0 * h);
        weights[k + 1] += ((d - ta).powi(2) - (c - ta).powi(2)) / (2.0 * h);
    }
    let mut out = vec![0.0; u.stored_paths()];
    for (s, &wt) in weights.iter().enumerate() {
        if wt == 0.0 {
            continue;
        }
        let q = SliceQuadrature::new(u, s, region)?;
        for (p, o) in out.iter_mut().enumerate() {
            *o += wt * q.integrate(u, p, f);
        }
    }
    Ok(out)
}

/// E1 (clipped = false) over (t0 − R², t0) or E2 (clipped = true) over
/// (max{0, t0 − R²}, t0): √(R^{−2} E∬_{B_R(x0) ∩ G(t)} u²).
pub fn cylinder_energy(u: &EnsembleField, t0: f64, x0: &[f64], r: f64, clipped: bool) -> Result<Estimate> {
    if !(r > 0.0) {
        return invalid(format!("radius R = {r} must be positive"));
    }
    let mut start = t0 - r * r;
    if start < -1e-12 {
        if !clipped {
            return invalid(format!("t0 − R² = {start} < 0; use the clipped energy"));
        }
        start = 0.0;
    }
    let v = cylinder_integral(u, start, t0, &Region::ball(x0, r), &|w, _, _| w * w)?;
    Ok(Estimate::from_samples(&v).scale(1.0 / (r * r)).sqrt())
}

