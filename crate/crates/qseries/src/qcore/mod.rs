//! Exact arithmetic core: series, monomials, integer-valued exponent
//! polynomials, q-shifted factorials, Gaussian binomials and factored
//! closed-form evaluation.

pub mod exppoly;
pub mod factored;
pub mod monomial;
pub mod pochhammer;
pub mod qbinomial;
pub mod series;

pub use exppoly::{CompiledPoly, ExponentPoly};
pub use factored::{FactoredQExpr, PochFactor};
pub use monomial::Monomial;
pub use pochhammer::{poch, BinomialBag, EvalOutcome, PochLength};
pub use qbinomial::qbin;
pub use series::{Mismatch, Precision, Series};
