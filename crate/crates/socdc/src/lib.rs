pub mod applications;
pub mod conditions;
pub mod cutgen;
pub mod disjunction;
pub mod error;
pub mod hullcert;
pub mod io;
pub mod options;
pub mod socp;
pub mod socr;
pub mod spectral;

pub use error::{Error, GateFailure, Result};
pub use options::Options;
pub use spectral::SymMatrix;
