//! Exact primitives for averages over finite abelian ell-groups: partition
//! group types and their embedding order, automorphism orders, subgroup
//! counts with an enumeration oracle, signed and unsigned chain sums,
//! surjection weights, and exact q-series arithmetic (Pochhammer products,
//! Gaussian binomials, symbolic identity checks), tied together by a
//! verification harness with deterministic text/JSON/CSV reports and a CLI.
//!
//! Everything is computed in exact integer and rational arithmetic; no value
//! in this crate is ever a float.

pub mod chains;
pub mod cli;
pub mod error;
pub mod group_types;
pub mod qseries;
pub mod rational;
pub mod report;
pub mod subgroup_count;
pub mod verifier;

pub use error::{Error, Result};
