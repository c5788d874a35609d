//! Seeded Brownian paths and Itô-calculus checks.

pub mod ito;
pub mod paths;
pub mod rng;

pub use ito::{ito_isometry_check, ks_standard_normal, ItoReport, KsReport};
pub use paths::{generate_paths, read_binary, uniform_times, BrownianPath, Ensemble, NoiseKey, PathDump};
pub use rng::{normal, PathStream};
