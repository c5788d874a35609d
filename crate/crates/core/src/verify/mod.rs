//! Numerical checks of the Carleman estimate, the two-sphere one-cylinder
//! inequalities, strong unique continuation, the iteration lemma and the
//! cone-chain propagation of smallness.

mod carleman;
mod cone;
mod iteration;
mod propagation;
mod sucp;
mod two_sphere;

pub use carleman::{carleman_residual, CarlemanGrid, CarlemanResidualReport, MParts, NParts};
pub use cone::{cone_chain_build, ConeChain};
pub use iteration::{geometric_iteration_bound, iteration_exponents, unrolled_recursion, IterationExponents, IterationState};
pub use propagation::{
    fit_propagation_law, propagation_law, propagation_law_constant, small_propagation_check, Propagated,
    PropagationReport,
};
pub use sucp::{sucp_probe, SucpReport, ORDER_CAP};
pub use two_sphere::{
    interpolation_bound, two_sphere_fit, two_sphere_report, two_sphere_validate, HoldoutReport, HoldoutViolation,
    TwoSphereFit, TwoSphereParams, TwoSphereReport, TwoSphereVariant,
};
