//! Entity resolution under matching dependencies.
//!
//! The crate loads relational instances with stable tuple ids, parses matching
//! dependencies (MDs) over pluggable similarity relations, classifies MD sets by
//! tractability, computes minimally resolved instances (MRIs) and answers
//! conjunctive queries under resolved-answer semantics.

pub mod bundle;
pub mod cli;
pub mod closure;
pub mod cqa;
pub mod error;
pub mod md;
pub mod query;
pub mod relation;
pub mod report;
pub mod resolve;
pub mod similarity;
pub mod unionfind;

pub use error::{Error, Result};
