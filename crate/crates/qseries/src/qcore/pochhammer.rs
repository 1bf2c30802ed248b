//! q-shifted factorials `(a; q^m)_n` over monomial bases `a = +-q^e`.
//!
//! Lengths may be any integer or infinite:
//!
//! - `n = 0` is the empty product 1;
//! - `n > 0` multiplies `1 - a q^{m t}` for `t = 0..n-1`;
//! - `n < 0` divides by `1 - a q^{-m t}` for `t = 1..-n`;
//! - `n = inf` multiplies all factors whose exponent can reach the
//!   truncation order.
//!
//! Everything reduces to a multiset of binomials `1 - s q^E` with integer
//! net multiplicities (the "bag"), evaluated by exact multiplication and
//! exact synthetic division, falling back to truncated geometric expansion
//! only where the quotient is not a Laurent polynomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::series::Series;
use crate::QError;

/// Length of a q-shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PochLength {
    Finite(i64),
    Infinite,
}

/// Result of evaluating a factored expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Series),
    /// A vanishing factor with positive net power was found before any
    /// division; the value is exactly zero.
    Zero,
    /// A vanishing factor would have to be inverted.
    Undefined,
}

impl EvalOutcome {
    /// Collapse `Zero` to the zero series; `Undefined` becomes an error.
    pub fn into_series(self) -> Result<Series, QError> {
        match self {
            EvalOutcome::Value(s) => Ok(s),
            EvalOutcome::Zero => Ok(Series::zero()),
            EvalOutcome::Undefined => Err(QError::Undefined),
        }
    }
}

/// Multiset of binomials `1 - s q^E` with net integer multiplicities.
#[derive(Clone, Debug, Default)]
pub struct BinomialBag {
    // (exponent, sign) -> net multiplicity
    binomials: BTreeMap<(i64, i8), i64>,
    // Multiplicities of the vanishing binomial 1 - q^0.
    zero_pos: i64,
    zero_neg: i64,
    // Net multiplicity of 1 + q^0 = 2.
    two_power: i64,
    // Result is only valid up to a truncation order.
    truncated: bool,
}

impl BinomialBag {
    pub fn new() -> BinomialBag {
        BinomialBag::default()
    }

    fn push_binomial(&mut self, sign: i8, exponent: i64, mult: i64) {
        if mult == 0 {
            return;
        }
        if exponent == 0 {
            if sign == 1 {
                if mult > 0 {
                    self.zero_pos += mult;
                } else {
                    self.zero_neg -= mult;
                }
            } else {
                self.two_power += mult;
            }
            return;
        }
        let entry = self.binomials.entry((exponent, sign)).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.binomials.remove(&(exponent, sign));
        }
    }

    /// Lower bound for the lowest exponent of the evaluated product; used to
    /// size the tail cutoff of infinite factors.
    pub(crate) fn lowest_bound(&self, prefactor_exp: i64) -> i64 {
        let mut low = prefactor_exp;
        for (&(e, _), &mult) in &self.binomials {
            if e < 0 && mult > 0 {
                low += e * mult;
            }
        }
        low
    }

    /// Add the expansion of `(base; q^modulus)_length ^ power`.
    ///
    /// Infinite factors make the result truncated; their increasing tail is
    /// cut at `tail_cutoff` (chosen by the caller from the order and the
    /// lowest-exponent bound).
    pub fn push_factor(
        &mut self,
        base: Monomial,
        modulus: i64,
        length: PochLength,
        power: i64,
        tail_cutoff: i64,
    ) {
        assert!(modulus >= 1, "pochhammer modulus must be positive");
        let (s, e) = (base.sign(), base.exponent());
        match length {
            PochLength::Finite(n) if n >= 0 => {
                for t in 0..n {
                    self.push_binomial(s, e + modulus * t, power);
                }
            }
            PochLength::Finite(n) => {
                for t in 1..=(-n) {
                    self.push_binomial(s, e - modulus * t, -power);
                }
            }
            PochLength::Infinite => {
                self.truncated = true;
                let mut t = 0;
                loop {
                    let exp = e + modulus * t;
                    if exp > tail_cutoff {
                        break;
                    }
                    self.push_binomial(s, exp, power);
                    t += 1;
                }
            }
        }
    }

    /// Evaluate `coeff * q^exp * product(bag)` to `order`.
    pub fn evaluate(&self, coeff: &BigInt, exp: i64, order: i64) -> EvalOutcome {
        if self.zero_pos > self.zero_neg {
            return EvalOutcome::Zero;
        }
        if self.zero_neg > 0 {
            // Net nonpositive with a vanishing factor inverted somewhere:
            // either 1/0 or an indeterminate 0/0.
            return EvalOutcome::Undefined;
        }
        if coeff.is_zero() {
            return EvalOutcome::Value(Series::zero());
        }

        let mut value = Series::monomial(coeff.clone(), exp);
        if self.two_power > 0 {
            value = value.scalar_mul(&(BigInt::one() << self.two_power as u32));
        }
        let mut truncated = self.truncated;
        for (&(e, sign), &mult) in &self.binomials {
            if mult > 0 {
                for _ in 0..mult {
                    value = value.mul_binomial(sign, e);
                }
            }
        }
        for (&(e, sign), &mult) in &self.binomials {
            if mult < 0 {
                for _ in 0..(-mult) {
                    if truncated {
                        value = match value.mul_geometric(sign, e, order) {
                            Ok(v) => v,
                            Err(_) => return EvalOutcome::Undefined,
                        };
                    } else {
                        match value.div_binomial_exact(sign, e) {
                            Ok(v) => value = v,
                            Err(_) => {
                                truncated = true;
                                value = match value.mul_geometric(sign, e, order) {
                                    Ok(v) => v,
                                    Err(_) => return EvalOutcome::Undefined,
                                };
                            }
                        }
                    }
                }
            }
        }
        if self.two_power < 0 {
            let divisor = BigInt::one() << (-self.two_power) as u32;
            value = match value.scalar_div_exact(&divisor) {
                Some(v) => v,
                None => return EvalOutcome::Undefined,
            };
        }
        if truncated {
            value = value.truncate_to(order);
        }
        EvalOutcome::Value(value)
    }
}

/// The q-shifted factorial `(base; q^modulus)_length` expanded to a series.
///
/// Finite nonnegative lengths give exact Laurent polynomials; negative and
/// infinite lengths give series truncated at `order`. Division by a
/// vanishing binomial is an error.
pub fn poch(base: Monomial, modulus: i64, length: PochLength, order: i64) -> Result<Series, QError> {
    let mut bag = BinomialBag::new();
    // Single positive factor: the lowest-exponent bound only needs the
    // factor's own negative binomials, which push_factor collects for any
    // cutoff; seed with a first pass to find it.
    let mut probe = BinomialBag::new();
    probe.push_factor(base, modulus, length, 1, order);
    let cutoff = order - probe.lowest_bound(0).min(0);
    bag.push_factor(base, modulus, length, 1, cutoff);
    bag.evaluate(&BigInt::one(), 0, order).into_series()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::series::Precision;

    fn q() -> Monomial {
        Monomial::q_power(1)
    }

    #[test]
    fn empty_product_is_one() {
        assert_eq!(poch(Monomial::neg_q_power(1), 2, PochLength::Finite(0), 10).unwrap(), Series::one());
    }

    #[test]
    fn finite_product_direct() {
        // (q;q)_3 multiplied out by hand.
        let p = poch(q(), 1, PochLength::Finite(3), 0).unwrap();
        assert_eq!(p, Series::from_i64_coeffs(0, &[1, -1, -1, 0, 1, 1, -1]));
        assert_eq!(p.precision(), Precision::Exact);
    }

    #[test]
    fn negative_length_is_reciprocal() {
        // (q^2;q)_{-1} = 1/(1 - q^2 q^{-1}) = 1/(1-q).
        let p = poch(Monomial::q_power(2), 1, PochLength::Finite(-1), 5).unwrap();
        assert_eq!(p, Series::from_coeffs(0, vec![BigInt::one(); 6], Precision::Truncated(5)));
    }

    #[test]
    fn negative_length_zero_binomial_is_undefined() {
        // (q;q)_{-2} hits 1/(1-q^0).
        assert_eq!(poch(q(), 1, PochLength::Finite(-2), 5), Err(QError::Undefined));
    }

    #[test]
    fn infinite_product_truncates() {
        let p = poch(q(), 1, PochLength::Infinite, 7).unwrap();
        // Pentagonal expansion of (q;q)_inf.
        assert_eq!(p.coeff(0), BigInt::one());
        assert_eq!(p.coeff(1), BigInt::from(-1));
        assert_eq!(p.coeff(2), BigInt::from(-1));
        assert_eq!(p.coeff(5), BigInt::one());
        assert_eq!(p.coeff(7), BigInt::one());
        assert_eq!(p.coeff(3), BigInt::zero());
        assert_eq!(p.precision(), Precision::Truncated(7));
    }

    #[test]
    fn infinite_product_with_unit_root_is_zero() {
        // (q^0; q)_inf contains the factor 1 - q^0.
        let p = poch(Monomial::q_power(0), 1, PochLength::Infinite, 5).unwrap();
        assert!(p.is_zero_value());
    }

    #[test]
    fn minus_one_base_doubles() {
        // (-1;q)_2 = (1+1)(1+q) = 2 + 2q.
        let p = poch(Monomial::neg_q_power(0), 1, PochLength::Finite(2), 5).unwrap();
        assert_eq!(p, Series::from_i64_coeffs(0, &[2, 2]));
    }

    #[test]
    fn negative_base_exponent_gives_laurent() {
        // (-q^{-1}; q^2)_1 = 1 + q^{-1}.
        let p = poch(Monomial::neg_q_power(-1), 2, PochLength::Finite(1), 5).unwrap();
        assert_eq!(p, Series::from_i64_coeffs(-1, &[1, 1]));
    }

    #[test]
    fn cocycle_property() {
        // (a;q)_{m+n} = (a;q)_m * (a q^m;q)_n wherever both sides are defined.
        let order = 30;
        for sign in [1i8, -1] {
            for e in -2i64..=2 {
                let a = Monomial::new(sign, e);
                for m in -4i64..=4 {
                    for n in -4i64..=4 {
                        let full = poch(a, 1, PochLength::Finite(m + n), order);
                        let left = poch(a, 1, PochLength::Finite(m), order);
                        let shifted = Monomial::new(sign, e + m);
                        let right = poch(shifted, 1, PochLength::Finite(n), order);
                        match (full, left, right) {
                            (Ok(f), Ok(l), Ok(r)) => {
                                let prod = &l * &r;
                                assert!(
                                    f.agrees_with(&prod).is_ok(),
                                    "cocycle failed: a={a}, m={m}, n={n}"
                                );
                            }
                            // Any undefined side exempts the point.
                            _ => continue,
                        }
                    }
                }
            }
        }
    }
}
