//! Statevector simulation of Gowers-norm estimation circuits over `F_p^n`.

pub mod ap_counter;
pub mod error;
pub mod gowers_circuit;
pub mod group;
pub mod harmonic;
pub mod poly;
pub mod qsim;
pub mod rng;
pub mod testers;
mod sum;

pub use error::{Error, Result};
pub use group::{enumerate_group, GroupParams, GroupVector, UnitComplex, DEFAULT_AMPLITUDE_CAP};
pub use harmonic::{FunctionTable, SpectrumTable};
pub use poly::{Instance, PolynomialSpec};
pub use qsim::{RegisterLayout, StateVector};

/// Crate version, embedded in every CLI report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
