//! Observation gap against domain distance for one candidate boundary.

use serde::Serialize;

use super::model::{check_same_initial_domain, domain_distances, ForwardModel};
use crate::error::Result;
use crate::functionals::{observation_gap, GapEstimate};
use crate::geometry::MovingDomain;

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub gap: GapEstimate,
    /// MC standard error of the coupled gap at its maximizing slice.
    pub noise_floor: f64,
    pub d: f64,
    pub d_m: f64,
    pub t0: f64,
    /// gap > 3·noise_floor.
    pub separated: bool,
}

pub fn uniqueness_probe(truth: &MovingDomain, candidate: &MovingDomain, model: &ForwardModel<'_>, t0: f64, h: f64) -> Result<UniquenessReport> {
    model.check_condition()?;
    check_same_initial_domain(truth, candidate, h)?;
    let u1 = model.solve(truth)?;
    let u2 = model.solve(candidate)?;
    let gap = observation_gap(&u1, &u2, model.window)?;
    let (d, d_m) = domain_distances(truth, candidate, t0, h)?;
    let noise_floor = gap.stderr;
    Ok(UniquenessReport { separated: gap.value > 3.0 * noise_floor, noise_floor, gap, d, d_m, t0 })
}
