//! Direct numerical solution of the collective master equation.
//!
//! The generator is assembled as a dense `d² × d²` matrix over the symmetric
//! basis, including the cross-damping couplings, and its steady state is
//! found by a null-space solve and, independently, by time evolution. This is
//! ground truth for the closed-form and basis-sum routes.

mod density;
pub mod dump;
mod evolve;
mod generator;
mod observables;
mod solve;

pub use density::{DensityOperator, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use evolve::{steady_state_evolve, steady_state_evolve_with, EvolveOptions};
pub use generator::{build_generator, build_generator_with, GeneratorMatrix, OracleOptions, Structure, DEFAULT_MAX_ATOMS};
pub use observables::{oracle_observables, total_field_traces};
pub use solve::{residual, steady_state_null, SolveMethod, SolveReport, NULLITY_REL_TOL, RESIDUAL_TOL};

use crate::error::Result;
use crate::observables::ObservableReport;
use crate::reservoir::{DipoleMode, EnsembleConfig};

/// Interfering dipoles with unequal reservoirs have no exact solution to
/// compare with.
pub fn is_exploratory(config: &EnsembleConfig) -> bool {
    config.mode == DipoleMode::Interfering && config.bath1 != config.bath2
}

/// Null-space steady state and its observables.
pub fn oracle_report(config: &EnsembleConfig) -> Result<ObservableReport> {
    let gen = build_generator(config)?;
    let (rho, _) = steady_state_null(&gen)?;
    oracle_observables(&rho, config)
}
