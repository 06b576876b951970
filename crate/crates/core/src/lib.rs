//! Exact and precision-tracked experiments on twisted invariant patterns:
//! random walks on tori, Bohr sets, witness searches for invariant maps of
//! integer matrix groups, and multiple recurrence on Kronecker systems.

pub mod bohr;
pub mod error;
pub mod exact;
pub mod harness;
pub mod matgroup;
pub mod pattern;
pub mod recurrence;
pub mod walks;

pub use error::{Error, Result};
