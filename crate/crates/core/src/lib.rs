//! Operator Sinkhorn scaling for Edmonds' problem, with exact and Monte-Carlo
//! routes to quantum permanents, mixed discriminants, G-norms, permanents and
//! hafnians.

pub mod cli;
pub mod cpmap;
pub mod estimators;
pub mod matroid;
pub mod error;
pub mod numkernel;
pub mod qperm;
pub mod scaling;

pub use error::{Error, Result};
pub use numkernel::{ComplexMatrix, Tolerance, C64};
