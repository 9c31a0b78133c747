//! Exact computation of the circuit imbalance measure and related condition
//! numbers, point-line incidences, linear-matroid minors, design-matrix rank
//! bounds and Graver-basis proximity quantities.

pub mod condition;
pub mod design;
pub mod error;
pub mod generators;
pub mod graver;
pub mod harness;
pub mod incidence;
pub mod matroid;
pub mod numerics;

pub use error::{Error, Result};
