//! Closed forms as a signed monomial prefactor times a product of
//! q-Pochhammer-type factors with integer powers.
//!
//! The whole expression is scanned for vanishing binomials before any
//! division takes place, so `(stuff)/(q;q)_{n}` with `n < 0` is the exact
//! zero series rather than a division error: the reciprocal of an undefined
//! (infinite) factor is zero. Only a net inverted vanishing factor is
//! `Undefined`.

use num_bigint::BigInt;

use super::monomial::Monomial;
use super::pochhammer::{BinomialBag, EvalOutcome, PochLength};
use super::series::Series;
#[allow(unused_imports)]
use super::series as _series_used_in_tests;

/// One `(base; q^modulus)_length ^ power` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PochFactor {
    pub base: Monomial,
    pub modulus: i64,
    pub length: PochLength,
    pub power: i64,
}

impl PochFactor {
    pub fn new(base: Monomial, modulus: i64, length: PochLength, power: i64) -> PochFactor {
        PochFactor { base, modulus, length, power }
    }
}

/// Signed monomial prefactor times a product of Pochhammer factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredQExpr {
    pub coeff: BigInt,
    pub exponent: i64,
    pub factors: Vec<PochFactor>,
}

impl FactoredQExpr {
    /// The constant 1.
    pub fn one() -> FactoredQExpr {
        FactoredQExpr { coeff: BigInt::from(1), exponent: 0, factors: Vec::new() }
    }

    pub fn with_prefactor(coeff: BigInt, exponent: i64) -> FactoredQExpr {
        FactoredQExpr { coeff, exponent, factors: Vec::new() }
    }

    /// Append `(base; q^modulus)_length ^ power`.
    pub fn times_poch(
        mut self,
        base: Monomial,
        modulus: i64,
        length: PochLength,
        power: i64,
    ) -> FactoredQExpr {
        self.factors.push(PochFactor::new(base, modulus, length, power));
        self
    }

    /// Append the bracket product `[z; q^modulus]_inf ^ power`, stored as its
    /// two-factor expansion `(z;q^m)_inf (q^m/z;q^m)_inf`.
    pub fn times_bracket(self, z: Monomial, modulus: i64, power: i64) -> FactoredQExpr {
        self.times_poch(z, modulus, PochLength::Infinite, power)
            .times_poch(z.recip().mul(Monomial::q_power(modulus)), modulus, PochLength::Infinite, power)
    }

    /// Append a Gaussian binomial `[top, bottom]_{q^m} ^ power` as the ratio
    /// `(q^m;q^m)_top / ((q^m;q^m)_bottom (q^m;q^m)_{top-bottom})`.
    ///
    /// Out-of-range arguments vanish through the zero scan, matching the
    /// defining convention.
    pub fn times_qbin(self, top: i64, bottom: i64, modulus: i64, power: i64) -> FactoredQExpr {
        let base = Monomial::q_power(modulus);
        self.times_poch(base, modulus, PochLength::Finite(top), power)
            .times_poch(base, modulus, PochLength::Finite(bottom), -power)
            .times_poch(base, modulus, PochLength::Finite(top - bottom), -power)
    }

    /// Evaluate to a series, the distinguished zero, or undefined.
    ///
    /// The zero scan runs over the whole expression first, so a vanishing
    /// factor with positive net power short-circuits to `Zero` even when
    /// other factors would individually be undefined.
    pub fn eval(&self, order: i64) -> EvalOutcome {
        // First pass without tail cutoff concerns: collect finite factors to
        // bound the lowest exponent, then rebuild with the safe cutoff.
        let mut probe = BinomialBag::new();
        for f in &self.factors {
            if let PochLength::Finite(_) = f.length {
                probe.push_factor(f.base, f.modulus, f.length, f.power, 0);
            } else if f.base.exponent() <= 0 {
                // Non-increasing part of an infinite factor.
                probe.push_factor(f.base, f.modulus, PochLength::Infinite, f.power, 0);
            }
        }
        let cutoff = order - probe.lowest_bound(self.exponent).min(0);
        let mut bag = BinomialBag::new();
        for f in &self.factors {
            bag.push_factor(f.base, f.modulus, f.length, f.power, cutoff);
        }
        bag.evaluate(&self.coeff, self.exponent, order)
    }
}
