//! Shared forward model: coefficients, noise, grid and the observation window.

use crate::error::{Error, Result};
use crate::functionals::ObservationWindow;
use crate::geometry::{hausdorff_distance, modified_distance, MovingDomain};
use crate::solver::{solve, EnsembleField, GridSpec, SPDECoefficients};
use crate::stochastic::Ensemble;

#[derive(Clone, Copy)]
pub struct ForwardModel<'a> {
    pub coeffs: &'a SPDECoefficients,
    pub ensemble: &'a Ensemble,
    pub spec: &'a GridSpec,
    pub window: &'a ObservationWindow,
}

impl<'a> ForwardModel<'a> {
    /// f(t)² ≥ F > 0 on the time grid.
    pub fn check_condition(&self) -> Result<()> {
        self.coeffs
            .check_nontrivial_boundary(&self.ensemble.times)
            .map_err(|e| Error::Precondition(format!("boundary datum: {e}")))
    }

    pub fn solve(&self, d: &MovingDomain) -> Result<EnsembleField> {
        solve(d, self.coeffs, self.ensemble, self.spec)
    }
}

/// (d, d_m) between G1(t) and G2(t) from snapshots at spacing h.
pub fn domain_distances(a: &MovingDomain, b: &MovingDomain, t: f64, h: f64) -> Result<(f64, f64)> {
    let (sa, sb) = (a.snapshot(t, h)?, b.snapshot(t, h)?);
    Ok((hausdorff_distance(&sa, &sb)?, modified_distance(&sa, &sb)?))
}

/// G1(0) = G2(0) up to the snapshot resolution.
pub fn check_same_initial_domain(a: &MovingDomain, b: &MovingDomain, h: f64) -> Result<()> {
    let (d, _) = domain_distances(a, b, 0.0, h)?;
    if d > 1e-9 * (1.0 + a.reference.scale()) {
        return Err(Error::Precondition(format!("initial domains differ (d(G1(0), G2(0)) = {d})")));
    }
    Ok(())
}
