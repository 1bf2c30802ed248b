//! Exact-arithmetic engine for q-series identities.
//!
//! The crate expands both sides of finite q-binomial identities to exact
//! Laurent polynomials over parameter grids, expands infinite identities to
//! a chosen truncation order, and replays recurrence-plus-boundary induction
//! proofs. Everything is integer arithmetic; there is no floating point and
//! no modular shortcut anywhere.
//!
//! Module map:
//!
//! - [`qcore`]: series arithmetic, q-shifted factorials, Gaussian binomials;
//! - [`theta`]: Jacobi triple product, quintuple product, Euler's identity;
//! - [`catalog`]: the registry of finite identities and the grid verifier;
//! - [`prover`]: polynomial recurrences and induction certificates;
//! - [`families`]: infinite families, the tri-pentagonal theorem and
//!   Slater-list items.

pub mod qcore;

use thiserror::Error;

/// Errors shared across the engine.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QError {
    /// Inversion of a series whose lowest coefficient is not a unit.
    #[error("series is not invertible: lowest coefficient must be +-1")]
    NonUnit,
    /// A vanishing factor appears with negative net power, or an exact
    /// quantity is not representable with integer coefficients.
    #[error("undefined value: division by a vanishing factor")]
    Undefined,
    /// A summation index admits no finite support bound.
    #[error("summation index `{0}` cannot be bounded")]
    UnboundedIndex(String),
    /// An exponent polynomial takes a non-integer value on the lattice.
    #[error("polynomial is not integer-valued: {0}")]
    NotIntegerValued(String),
}

pub use qcore::{
    poch, qbin, EvalOutcome, ExponentPoly, FactoredQExpr, Mismatch, Monomial, PochFactor,
    PochLength, Precision, Series,
};
