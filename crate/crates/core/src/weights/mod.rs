//! σ profile, Carleman weights, level sets and mollified cutoffs.

pub mod carleman;
pub mod mollifier;
pub mod sigma;

pub use carleman::{
    level_set_membership, phi, space_time_cutoff, weight_bounds_check, CarlemanWeights, CutoffValue,
    WeightBoundsReport,
};
pub use mollifier::{Mollifier, Psi2};
pub use sigma::{compute_c0, sigma, sigma_prime, uniform_grid, SigmaBoundsReport, SigmaTable, S_MAX};
