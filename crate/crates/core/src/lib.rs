//! Exact steady state of N three-level ladder atoms coupled to incoherent
//! reservoirs: collective basis, closed forms, basis sums and a
//! master-equation oracle.

pub mod basis;
pub mod closed_form;
pub mod config;
pub mod error;
pub mod figure;
pub mod observables;
pub mod oracle;
pub mod report;
pub mod reservoir;
pub mod steady;
pub mod sweep;
pub mod verify;

pub use basis::{enumerate_basis, BasisIndex, BasisMap, Level, OperatorAction, TransitionLabel};
pub use error::{Error, Result};
pub use observables::{basis_sum_report, closed_form_report, Channel, ObservableReport, Populations, Source};
pub use reservoir::{BathSpec, DipoleMode, EnsembleConfig, PumpParameter};
pub use steady::{steady_weights, SteadyWeights};
