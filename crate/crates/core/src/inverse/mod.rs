//! Unknown-boundary identification: uniqueness probes, reconstruction,
//! stability sweeps and domain-difference energies.

mod difference;
mod model;
mod parametrization;
mod reconstruct;
mod stability;
mod uniqueness;

pub use difference::{domain_difference_energy, fit_difference_laws, DifferenceLawFit, DomainDifferenceReport};
pub use model::{check_same_initial_domain, domain_distances, ForwardModel};
pub use parametrization::{AdmissibilityFailure, BoundaryBasis, BoundaryParametrization, MAX_PARAMETERS};
pub use reconstruct::{reconstruct_boundary, ReconstructionResult, SearchConfig};
pub use stability::{
    fit_stability, gamma, plot_pairs_csv, records_csv, stability_sweep, StabilityFit, StabilityRecord, StabilitySweep,
};
pub use uniqueness::{uniqueness_probe, UniquenessReport};
