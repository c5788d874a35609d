//! Forward solver on moving domains through the fixed-cylinder pullback.

mod caccioppoli;
mod coefficients;
mod field;
mod grid;
mod kernel;
mod linalg;
mod manufactured;
mod operator;
mod stepper;

pub use caccioppoli::{caccioppoli_check, CaccioppoliCylinders, CaccioppoliReport};
pub use coefficients::{
    integrating_factors, BoundaryData, InitialDatum, SPDECoefficients, ScalarField, VectorField,
};
pub use field::{probe_at, EnsembleField, FieldSample, Probe, Slice};
pub use grid::{GridSpec, NodeKind, ReferenceGrid};
pub use kernel::{heat_kernel, heat_kernel_residual, weighted_mass_h, RadialCutoff};
pub use linalg::{bicgstab, Tridiagonal};
pub use manufactured::{ManufacturedKind, ManufacturedPoint, ManufacturedSolution};
pub use operator::{assemble_operator, assemble_pullback_operator, PullbackOperator};
pub use stepper::{solve, Stepper};
