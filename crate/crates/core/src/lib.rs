//! Finite-scale verification toolkit for median graphs, cubulations, graph
//! products of finite groups and fixed-point criteria for group actions.
//!
//! Everything is exact: integer and rational arithmetic only, deterministic
//! iteration orders, and explicit caps that surface as resource errors.

pub mod corpus;
pub mod error;
pub mod exact;
pub mod graphs;
pub mod graphprod;
pub mod groups;
pub mod median;
pub mod quasiline;
pub mod quasimedian;
pub mod scenario;
pub mod topology;
pub mod wallspace;

pub use error::{Error, Result};

/// Arbitrary-precision integer used wherever overflow is possible.
pub type Int = num_bigint::BigInt;
/// Exact rational used by the cocycle solver.
pub type Rational = num_rational::BigRational;
