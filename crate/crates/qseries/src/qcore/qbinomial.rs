//! Gaussian (q-binomial) coefficients.
//!
//! `qbin(top, bottom, m)` is the polynomial `[top, bottom]` in the base
//! `q^m`, zero unless `0 <= bottom <= top`. Values are computed in base q
//! and exponent-scaled afterwards, so the memo table is shared across
//! bases.
//!
//! Two computation paths sit behind the same memo:
//!
//! - small arguments use the Pascal-type recurrence
//!   `[n,k] = [n-1,k-1] + q^k [n-1,k]`, which stays in integer arithmetic
//!   and reuses the whole sub-triangle;
//! - large arguments use the multiplicative diagonal
//!   `[n,k] = [n-1,k-1] * (1-q^n)/(1-q^k)` with exact synthetic division
//!   over a flat limb buffer (see [`dense`]), since materializing a Pascal
//!   triangle of megabyte-sized rows is hopeless.

use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use once_cell::sync::Lazy;

use super::series::Series;

pub mod dense;

/// Above this `top`, the diagonal product path replaces the Pascal triangle.
const PASCAL_LIMIT: i64 = 64;

static MEMO: Lazy<DashMap<(i64, i64), Arc<Vec<BigInt>>>> = Lazy::new(DashMap::new);
static MEMO_I64: Lazy<DashMap<(i64, i64), Option<Arc<Vec<i64>>>>> = Lazy::new(DashMap::new);

/// The Gaussian binomial `[top, bottom]` in base `q^base_power`.
pub fn qbin(top: i64, bottom: i64, base_power: i64) -> Series {
    assert!(base_power >= 1, "base power must be positive");
    let coeffs = qbin_coeffs(top, bottom);
    let base = Series::from_coeffs(0, coeffs.as_ref().clone(), super::series::Precision::Exact);
    if base_power == 1 {
        return base;
    }
    base.scale_exponents(base_power)
}

/// Base-q coefficient vector of `[top, bottom]`; empty when out of range.
pub(crate) fn qbin_coeffs(top: i64, bottom: i64) -> Arc<Vec<BigInt>> {
    if bottom < 0 || bottom > top {
        return Arc::new(Vec::new());
    }
    let k = bottom.min(top - bottom);
    if let Some(hit) = MEMO.get(&(top, k)) {
        return hit.clone();
    }
    let value = if top <= PASCAL_LIMIT { pascal(top, k) } else { Arc::new(dense::qbin_dense(top, k)) };
    MEMO.insert((top, k), value.clone());
    value
}

/// Machine-word copy of the coefficients when they all fit in `i64`.
pub(crate) fn qbin_coeffs_i64(top: i64, bottom: i64) -> Option<Arc<Vec<i64>>> {
    if bottom < 0 || bottom > top {
        return Some(Arc::new(Vec::new()));
    }
    let k = bottom.min(top - bottom);
    if let Some(hit) = MEMO_I64.get(&(top, k)) {
        return hit.clone();
    }
    let big = qbin_coeffs(top, k);
    let small: Option<Arc<Vec<i64>>> =
        big.iter().map(i64::try_from).collect::<Result<Vec<i64>, _>>().ok().map(Arc::new);
    MEMO_I64.insert((top, k), small.clone());
    small
}

fn pascal(top: i64, k: i64) -> Arc<Vec<BigInt>> {
    if k == 0 {
        return Arc::new(vec![BigInt::from(1)]);
    }
    // [n,k] = [n-1,k-1] + q^k [n-1,k]
    let a = qbin_coeffs(top - 1, k - 1);
    let b = qbin_coeffs(top - 1, k.min(top - 1 - k));
    let len = (k * (top - k) + 1) as usize;
    let mut out = vec![BigInt::from(0); len];
    for (t, c) in a.iter().enumerate() {
        out[t] += c;
    }
    for (t, c) in b.iter().enumerate() {
        out[t + k as usize] += c;
    }
    Arc::new(out)
}

#[cfg(test)]
mod tests {
    use num_traits::{One, Signed, Zero};

    use super::*;
    use crate::qcore::monomial::Monomial;
    use crate::qcore::pochhammer::{poch, PochLength};
    use crate::qcore::series::Precision;

    /// Product-formula oracle: (q)_top / ((q)_k (q)_{top-k}) by exact
    /// binomial division, independent of both recurrences.
    fn qbin_oracle(top: i64, k: i64) -> Series {
        let mut value = poch(Monomial::q_power(1), 1, PochLength::Finite(top), 0).unwrap();
        for j in 1..=k {
            value = value.div_binomial_exact(1, j).unwrap();
        }
        for j in 1..=(top - k) {
            value = value.div_binomial_exact(1, j).unwrap();
        }
        value
    }

    /// The other Pascal-type recurrence, [n,k] = q^{n-k}[n-1,k-1] + [n-1,k],
    /// as a reference implementation.
    fn qbin_other_recurrence(top: i64, bottom: i64) -> Series {
        if bottom < 0 || bottom > top {
            return Series::zero();
        }
        if bottom == 0 {
            return Series::one();
        }
        let a = qbin_other_recurrence(top - 1, bottom - 1).shift(top - bottom);
        let b = qbin_other_recurrence(top - 1, bottom);
        &a + &b
    }

    #[test]
    fn small_values() {
        assert_eq!(qbin(2, 1, 1), Series::from_i64_coeffs(0, &[1, 1]));
        assert_eq!(qbin(4, 2, 1), Series::from_i64_coeffs(0, &[1, 1, 2, 1, 1]));
        assert_eq!(qbin(2, 3, 1), Series::zero());
        assert_eq!(qbin(5, -1, 1), Series::zero());
        assert_eq!(qbin(0, 0, 1), Series::one());
    }

    #[test]
    fn base_power_scales_exponents() {
        assert_eq!(qbin(2, 1, 3), Series::from_i64_coeffs(0, &[1, 0, 0, 1]));
        assert_eq!(qbin(4, 2, 2).coeff(4), BigInt::from(2));
    }

    #[test]
    fn recurrences_match_product_oracle() {
        for n in 0..=10 {
            for k in 0..=n {
                let memoized = qbin(n, k, 1);
                let oracle = qbin_oracle(n, k);
                assert_eq!(memoized, oracle, "product formula at ({n},{k})");
                assert_eq!(memoized, qbin_other_recurrence(n, k), "second recurrence at ({n},{k})");
            }
        }
    }

    #[test]
    fn symmetry_degree_positivity_and_value_at_one() {
        for m in [1i64, 2, 4] {
            for n in 0..=12 {
                for k in 0..=n {
                    let a = qbin(n, k, m);
                    assert_eq!(a, qbin(n, n - k, m));
                    assert_eq!(a.degree(), Some(m * k * (n - k)));
                    assert!(a.terms().all(|(_, c)| c.is_positive() || c.is_zero()));
                    // At q = 1 the ordinary binomial appears.
                    let mut binom = BigInt::one();
                    for t in 0..k {
                        binom = binom * BigInt::from(n - t) / BigInt::from(t + 1);
                    }
                    assert_eq!(a.eval_at_one(), binom);
                }
            }
        }
    }

    #[test]
    fn dense_path_matches_pascal() {
        // Straddle the path split: same values either way.
        for (n, k) in [(66, 3), (70, 35), (80, 13), (100, 50)] {
            let fast = dense::qbin_dense(n, k);
            let slow = qbin_oracle(n, k);
            let as_series = Series::from_coeffs(0, fast, Precision::Exact);
            assert_eq!(as_series, slow, "dense vs oracle at ({n},{k})");
        }
    }

    #[test]
    fn exact_polynomial_precision() {
        assert_eq!(qbin(9, 4, 2).precision(), Precision::Exact);
    }
}
