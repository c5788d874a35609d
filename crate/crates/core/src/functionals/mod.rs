//! Monte Carlo estimators of the expectation integrals.

mod energies;
mod estimate;
mod region;

pub use energies::{
    ball_mass, cylinder_energy, cylinder_integral, observation_gap, observation_misfit, sphere_mass, GapEstimate, ObservationWindow,
};
pub use estimate::{Estimate, EstimateRecord};
pub use region::{domain_bbox, physical_spacing, quadrature_nodes, QuadratureNode, Region, SliceQuadrature};
