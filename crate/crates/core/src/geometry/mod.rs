//! Time-varying domains, sampled snapshots and set distances.

pub mod checks;
pub mod cloud;
pub mod moving;
pub mod snapshot;

pub use checks::{
    check_interior_ball, check_lipschitz_class, check_speed_bound, cone_contains, interior_ball_violations,
    lipschitz_cone, speed_bound_violation, GeometryParams, SpeedGrid,
};
pub use cloud::PointCloud;
pub use moving::{
    pullback_jacobians, BoundaryPart, DomainInvariants, FixedBoundary, Motion, MovingDomain, PullbackJacobians,
    RadialProfile, ReferenceDomain, TimeProfile,
};
pub use snapshot::{hausdorff_distance, interior_shrink, modified_distance, DomainSnapshot};
