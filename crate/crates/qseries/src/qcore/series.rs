//! Laurent polynomials and truncated power series in q with exact integer
//! coefficients.
//!
//! A [`Series`] stores a contiguous run of coefficients starting at some
//! (possibly negative) exponent, together with a [`Precision`] marker:
//!
//! - `Exact`: the value has finite support and every coefficient outside the
//!   stored window is zero;
//! - `Truncated(n)`: coefficients are known for exponents `<= n` only.
//!
//! Arithmetic never claims a coefficient beyond what the operands justify.
//! For multiplication the validity bound of the product accounts for the
//! lowest exponents of the operands: an unknown tail of order `n` multiplied
//! by a series starting at `q^l` pollutes the product only from `q^{n+1+l}`
//! on. For operands with nonnegative lowest exponents this reduces to the
//! usual `min` rule.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::QError;

/// Validity marker for the coefficients of a [`Series`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// Finite support; all coefficients outside the stored window are zero.
    Exact,
    /// Coefficients are valid for exponents `<= n` only.
    Truncated(i64),
}

impl Precision {
    /// The validity bound as an option (`None` means unbounded/exact).
    pub fn bound(self) -> Option<i64> {
        match self {
            Precision::Exact => None,
            Precision::Truncated(n) => Some(n),
        }
    }

    fn meet(self, other: Precision) -> Precision {
        match (self.bound(), other.bound()) {
            (None, None) => Precision::Exact,
            (a, b) => Precision::Truncated(a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX))),
        }
    }
}

/// First disagreeing coefficient found by [`Series::agrees_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exponent: i64,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

/// Exact Laurent polynomial or truncated Laurent series in q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    lowest: i64,
    coeffs: Vec<BigInt>,
    precision: Precision,
}

impl Series {
    /// The exact zero series.
    pub fn zero() -> Series {
        Series { lowest: 0, coeffs: Vec::new(), precision: Precision::Exact }
    }

    /// A zero series whose coefficients are only known up to `q^order`.
    pub fn zero_truncated(order: i64) -> Series {
        Series { lowest: 0, coeffs: Vec::new(), precision: Precision::Truncated(order) }
    }

    /// The exact constant 1.
    pub fn one() -> Series {
        Series::monomial(BigInt::one(), 0)
    }

    /// The exact monomial `c * q^e`.
    pub fn monomial(c: BigInt, e: i64) -> Series {
        if c.is_zero() {
            return Series::zero();
        }
        Series { lowest: e, coeffs: vec![c], precision: Precision::Exact }
    }

    /// Convenience form of [`Series::monomial`] for machine integers.
    pub fn monomial_i64(c: i64, e: i64) -> Series {
        Series::monomial(BigInt::from(c), e)
    }

    /// Build a series from a coefficient run starting at `lowest`.
    pub fn from_coeffs(lowest: i64, coeffs: Vec<BigInt>, precision: Precision) -> Series {
        let mut s = Series { lowest, coeffs, precision };
        s.normalize();
        s
    }

    /// Coefficients `[c_0, c_1, ...]` of an exact polynomial `sum c_t q^t`.
    pub fn from_i64_coeffs(lowest: i64, coeffs: &[i64]) -> Series {
        Series::from_coeffs(lowest, coeffs.iter().map(|&c| BigInt::from(c)).collect(), Precision::Exact)
    }

    fn normalize(&mut self) {
        if let Precision::Truncated(n) = self.precision {
            // Coefficients beyond the bound are meaningless; drop them.
            if self.lowest > n {
                self.coeffs.clear();
            } else {
                let keep = (n - self.lowest + 1).min(self.coeffs.len() as i64) as usize;
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lowest += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lowest = 0;
        }
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Validity bound; `None` when the series is exact.
    pub fn bound(&self) -> Option<i64> {
        self.precision.bound()
    }

    /// True when no stored coefficient is nonzero.
    pub fn is_zero_value(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero stored coefficient.
    pub fn lowest_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() { None } else { Some(self.lowest) }
    }

    /// Highest exponent with a nonzero stored coefficient.
    pub fn highest_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() { None } else { Some(self.lowest + self.coeffs.len() as i64 - 1) }
    }

    /// Degree of an exact polynomial (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<i64> {
        debug_assert_eq!(self.precision, Precision::Exact);
        self.highest_exponent()
    }

    /// The coefficient of `q^e` (zero outside the stored window).
    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeff_ref(e).cloned().unwrap_or_else(BigInt::zero)
    }

    fn coeff_ref(&self, e: i64) -> Option<&BigInt> {
        if e < self.lowest {
            return None;
        }
        self.coeffs.get((e - self.lowest) as usize)
    }

    /// Iterate over `(exponent, coefficient)` pairs of stored nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        let lowest = self.lowest;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(t, c)| (lowest + t as i64, c))
    }

    /// Restrict the validity bound to `order` (no-op on already tighter series).
    pub fn truncate_to(&self, order: i64) -> Series {
        let bound = match self.precision {
            Precision::Exact => order,
            Precision::Truncated(n) => n.min(order),
        };
        let mut s = self.clone();
        s.precision = Precision::Truncated(bound);
        s.normalize();
        s
    }

    /// Compare coefficients on every exponent both sides consider valid.
    ///
    /// Returns the common validity bound on success and the first
    /// disagreement otherwise.
    pub fn agrees_with(&self, other: &Series) -> Result<Precision, Mismatch> {
        let common = self.precision.meet(other.precision);
        let lo = match (self.lowest_exponent(), other.lowest_exponent()) {
            (None, None) => return Ok(common),
            (a, b) => a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX)),
        };
        let hi_stored = self
            .highest_exponent()
            .unwrap_or(i64::MIN)
            .max(other.highest_exponent().unwrap_or(i64::MIN));
        let hi = match common.bound() {
            None => hi_stored,
            Some(n) => hi_stored.min(n),
        };
        for e in lo..=hi {
            let a = self.coeff(e);
            let b = other.coeff(e);
            if a != b {
                return Err(Mismatch { exponent: e, lhs: a, rhs: b });
            }
        }
        Ok(common)
    }

    /// Multiply by the scalar `c`.
    pub fn scalar_mul(&self, c: &BigInt) -> Series {
        if c.is_zero() {
            return match self.precision {
                Precision::Exact => Series::zero(),
                Precision::Truncated(n) => Series::zero_truncated(n),
            };
        }
        let mut s = self.clone();
        for x in &mut s.coeffs {
            *x *= c;
        }
        s
    }

    /// Divide every coefficient exactly by `c`; `None` if some coefficient
    /// is not divisible.
    pub fn scalar_div_exact(&self, c: &BigInt) -> Option<Series> {
        assert!(!c.is_zero());
        let mut out = self.clone();
        for x in &mut out.coeffs {
            let (quot, rem) = num_integer::Integer::div_rem(&*x, c);
            if !rem.is_zero() {
                return None;
            }
            *x = quot;
        }
        Some(out)
    }

    /// Shift exponents by `e` (multiply by `q^e`).
    pub fn shift(&self, e: i64) -> Series {
        let mut s = self.clone();
        s.lowest += e;
        if let Precision::Truncated(n) = s.precision {
            s.precision = Precision::Truncated(n + e);
        }
        s
    }

    /// The substitution `q -> q^m` for positive `m`.
    ///
    /// A `Truncated(n)` input yields `Truncated(m*n + m - 1)`: scaled
    /// coefficients are known through `m*n`, and the first unknown original
    /// coefficient lands at `m*(n+1)`.
    pub fn scale_exponents(&self, m: i64) -> Series {
        assert!(m >= 1, "exponent scale must be positive");
        if m == 1 {
            return self.clone();
        }
        let precision = match self.precision {
            Precision::Exact => Precision::Exact,
            Precision::Truncated(n) => Precision::Truncated(m * n + m - 1),
        };
        if self.coeffs.is_empty() {
            return Series { lowest: 0, coeffs: Vec::new(), precision };
        }
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * m as usize + 1];
        for (t, c) in self.coeffs.iter().enumerate() {
            coeffs[t * m as usize] = c.clone();
        }
        Series::from_coeffs(self.lowest * m, coeffs, precision)
    }

    /// The substitution `q -> -q` (negate coefficients at odd exponents).
    pub fn alternate_signs(&self) -> Series {
        let mut s = self.clone();
        for (t, c) in s.coeffs.iter_mut().enumerate() {
            if (s.lowest + t as i64).rem_euclid(2) == 1 {
                *c = -std::mem::take(c);
            }
        }
        s
    }

    /// Sum of all stored coefficients, i.e. the value at q = 1 for exact
    /// polynomials.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Multiply in place by the binomial `1 - sign*q^e` (`sign = +-1`, `e != 0`).
    pub fn mul_binomial(&self, sign: i8, e: i64) -> Series {
        debug_assert!(e != 0 && (sign == 1 || sign == -1));
        let shifted = self.shift(e).scalar_mul(&BigInt::from(-(sign as i64)));
        self + &shifted
    }

    /// Exact division by `1 - sign*q^e`; fails when the remainder is nonzero.
    pub fn div_binomial_exact(&self, sign: i8, e: i64) -> Result<Series, QError> {
        debug_assert!(sign == 1 || sign == -1);
        if e == 0 {
            return Err(QError::Undefined);
        }
        if e < 0 {
            // 1/(1 - s q^e) = -s q^{-e} / (1 - s q^{-e}).
            let flipped = self.shift(-e).scalar_mul(&BigInt::from(-(sign as i64)));
            return flipped.div_binomial_exact(sign, -e);
        }
        if self.coeffs.is_empty() {
            return Ok(self.clone());
        }
        // Ascending synthetic division: quot[t] = self[t] + s*quot[t-e].
        let e = e as usize;
        let n = self.coeffs.len();
        if n <= e {
            // Quotient would need terms below the remainder window.
            return if self.is_zero_value() { Ok(self.clone()) } else { Err(QError::Undefined) };
        }
        let mut quot: Vec<BigInt> = Vec::with_capacity(n - e);
        for t in 0..n {
            let mut v = self.coeffs[t].clone();
            if t >= e {
                if sign > 0 {
                    v += &quot[t - e];
                } else {
                    v -= &quot[t - e];
                }
            }
            if t < n - e {
                quot.push(v);
            } else if !v.is_zero() {
                return Err(QError::Undefined);
            }
        }
        Ok(Series::from_coeffs(self.lowest, quot, self.precision))
    }

    /// Multiply by the geometric expansion of `1/(1 - sign*q^e)` up to `order`.
    pub fn mul_geometric(&self, sign: i8, e: i64, order: i64) -> Result<Series, QError> {
        debug_assert!(sign == 1 || sign == -1);
        if e == 0 {
            return Err(QError::Undefined);
        }
        if e < 0 {
            let flipped = self.shift(-e).scalar_mul(&BigInt::from(-(sign as i64)));
            return flipped.mul_geometric(sign, -e, order);
        }
        let bound = match self.precision {
            Precision::Exact => order,
            Precision::Truncated(n) => n.min(order),
        };
        if self.coeffs.is_empty() {
            return Ok(Series { lowest: 0, coeffs: Vec::new(), precision: Precision::Truncated(bound) });
        }
        let len = bound - self.lowest + 1;
        if len <= 0 {
            return Ok(Series { lowest: 0, coeffs: Vec::new(), precision: Precision::Truncated(bound) });
        }
        let e = e as usize;
        let mut out: Vec<BigInt> = Vec::with_capacity(len as usize);
        for t in 0..len as usize {
            let mut v = self.coeffs.get(t).cloned().unwrap_or_else(BigInt::zero);
            if t >= e {
                if sign > 0 {
                    v += &out[t - e];
                } else {
                    v -= &out[t - e];
                }
            }
            out.push(v);
        }
        Ok(Series::from_coeffs(self.lowest, out, Precision::Truncated(bound)))
    }

    /// Multiplicative inverse up to `q^order`.
    ///
    /// The lowest coefficient must be a unit (`+-1`); the inverse starts at
    /// the negated lowest exponent.
    pub fn invert(&self, order: i64) -> Result<Series, QError> {
        let unit = match self.coeffs.first() {
            Some(c) if c.magnitude().is_one() => c.clone(),
            _ => return Err(QError::NonUnit),
        };
        let la = self.lowest;
        // Coefficients of the input are only usable while valid.
        let bound = match self.precision {
            Precision::Exact => order,
            Precision::Truncated(n) => order.min(n - 2 * la),
        };
        let len = bound + la + 1; // inverse exponents run from -la to bound
        if len <= 0 {
            return Ok(Series { lowest: 0, coeffs: Vec::new(), precision: Precision::Truncated(bound) });
        }
        let mut inv: Vec<BigInt> = Vec::with_capacity(len as usize);
        inv.push(unit.clone());
        for k in 1..len as usize {
            let mut acc = BigInt::zero();
            let top = k.min(self.coeffs.len() - 1);
            for i in 1..=top {
                acc += &self.coeffs[i] * &inv[k - i];
            }
            inv.push(-&unit * acc);
        }
        Ok(Series::from_coeffs(-la, inv, Precision::Truncated(bound)))
    }

    fn mul_precision(&self, other: &Series) -> Precision {
        let mut bound: Option<i64> = None;
        let mut push = |b: i64| bound = Some(bound.map_or(b, |x: i64| x.min(b)));
        if let Precision::Truncated(na) = self.precision {
            if let Some(lb) = other.lowest_exponent() {
                push(na + lb);
            }
            if let Precision::Truncated(nb) = other.precision {
                push(na + nb + 1);
            }
        }
        if let Precision::Truncated(nb) = other.precision {
            if let Some(la) = self.lowest_exponent() {
                push(nb + la);
            }
        }
        match bound {
            None => Precision::Exact,
            Some(b) => Precision::Truncated(b),
        }
    }

    fn mul_impl(&self, other: &Series) -> Series {
        let precision = self.mul_precision(other);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let mut s = Series { lowest: 0, coeffs: Vec::new(), precision };
            s.normalize();
            return s;
        }
        let lowest = self.lowest + other.lowest;
        let full_len = self.coeffs.len() + other.coeffs.len() - 1;
        let len = match precision.bound() {
            None => full_len as i64,
            Some(n) => (n - lowest + 1).min(full_len as i64),
        };
        if len <= 0 {
            let mut s = Series { lowest: 0, coeffs: Vec::new(), precision };
            s.normalize();
            return s;
        }
        let len = len as usize;
        let coeffs = match (small_coeffs(&self.coeffs), small_coeffs(&other.coeffs)) {
            (Some(a), Some(b)) if i128_conv_safe(&a, &b) => conv_i128(&a, &b, len),
            _ => conv_big(&self.coeffs, &other.coeffs, len),
        };
        Series::from_coeffs(lowest, coeffs, precision)
    }

    fn add_impl(&self, other: &Series, negate: bool) -> Series {
        let precision = self.precision.meet(other.precision);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            let mut s = Series { lowest: 0, coeffs: Vec::new(), precision };
            s.normalize();
            return s;
        }
        let lowest = match (self.lowest_exponent(), other.lowest_exponent()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let hi = self
            .highest_exponent()
            .unwrap_or(i64::MIN)
            .max(other.highest_exponent().unwrap_or(i64::MIN));
        let mut coeffs = vec![BigInt::zero(); (hi - lowest + 1) as usize];
        for (e, c) in self.terms() {
            coeffs[(e - lowest) as usize] += c;
        }
        for (e, c) in other.terms() {
            if negate {
                coeffs[(e - lowest) as usize] -= c;
            } else {
                coeffs[(e - lowest) as usize] += c;
            }
        }
        Series::from_coeffs(lowest, coeffs, precision)
    }
}

fn small_coeffs(coeffs: &[BigInt]) -> Option<Vec<i64>> {
    coeffs.iter().map(|c| i64::try_from(c).ok()).collect()
}

fn i128_conv_safe(a: &[i64], b: &[i64]) -> bool {
    let ma = a.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    let mb = b.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    let n = a.len().min(b.len()) as u128;
    match (ma as u128).checked_mul(mb as u128) {
        Some(p) => p.checked_mul(n).map_or(false, |t| t < (i128::MAX / 4) as u128),
        None => false,
    }
}

fn conv_i128(a: &[i64], b: &[i64], len: usize) -> Vec<BigInt> {
    let mut acc = vec![0i128; len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 || i >= len {
            continue;
        }
        let ai = ai as i128;
        let top = (len - i).min(b.len());
        for (j, &bj) in b[..top].iter().enumerate() {
            acc[i + j] += ai * bj as i128;
        }
    }
    acc.into_iter().map(BigInt::from).collect()
}

fn conv_big(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() || i >= len {
            continue;
        }
        let top = (len - i).min(b.len());
        for (j, bj) in b[..top].iter().enumerate() {
            if !bj.is_zero() {
                acc[i + j] += ai * bj;
            }
        }
    }
    acc
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.add_impl(rhs, false)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.add_impl(rhs, true)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        self.mul_impl(rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        let mut s = self.clone();
        for c in &mut s.coeffs {
            *c = -std::mem::take(c);
        }
        s
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.magnitude();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            if e == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !unit {
                    write!(f, "{}*", mag)?;
                }
                if e == 1 {
                    write!(f, "q")?;
                } else {
                    write!(f, "q^{}", e)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Precision::Truncated(n) = self.precision {
            write!(f, " + O(q^{})", n + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(cs: &[i64]) -> Series {
        Series::from_i64_coeffs(0, cs)
    }

    /// Independent oracle: number of partitions of n into parts <= maxpart.
    fn partition_count(n: usize, maxpart: usize) -> u64 {
        let mut dp = vec![0u64; n + 1];
        dp[0] = 1;
        for j in 1..=maxpart {
            for t in j..=n {
                dp[t] += dp[t - j];
            }
        }
        dp[n]
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = poly(&[1, -1]);
        let b = poly(&[1, 1]);
        assert_eq!(&a * &b, poly(&[1, 0, -1]));
        assert_eq!((&a * &b).precision(), Precision::Exact);
    }

    #[test]
    fn mul_keeps_truncation() {
        let a = Series::from_coeffs(
            0,
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)],
            Precision::Truncated(2),
        );
        let prod = &a * &Series::one();
        assert_eq!(prod, a);
        assert_eq!(prod.precision(), Precision::Truncated(2));
    }

    #[test]
    fn mul_three_binomials() {
        // (1-q)(1-q^2)(1-q^3), expanded term by term.
        let mut brute = vec![0i64; 7];
        for s1 in [0, 1] {
            for s2 in [0, 1] {
                for s3 in [0, 1] {
                    let e = s1 + 2 * s2 + 3 * s3;
                    let sign = if (s1 + s2 + s3) % 2 == 0 { 1 } else { -1 };
                    brute[e as usize] += sign;
                }
            }
        }
        let p = poly(&[1, -1]);
        let p = p.mul_binomial(1, 2).mul_binomial(1, 3);
        assert_eq!(p, Series::from_i64_coeffs(0, &brute));
        assert_eq!(p, poly(&[1, -1, -1, 0, 1, 1, -1]));
    }

    #[test]
    fn invert_geometric() {
        let inv = poly(&[1, -1]).invert(3).unwrap();
        assert_eq!(inv, Series::from_coeffs(0, vec![BigInt::one(); 4], Precision::Truncated(3)));
    }

    #[test]
    fn invert_finite_q_factorial_counts_partitions() {
        // 1/((1-q)...(1-q^5)) counts partitions into parts <= 5;
        // checked against the independent counting oracle.
        let mut f = Series::one();
        for j in 1..=5 {
            f = f.mul_binomial(1, j);
        }
        let inv = f.invert(12).unwrap();
        for n in 0..=12usize {
            assert_eq!(inv.coeff(n as i64), BigInt::from(partition_count(n, 5)));
        }
    }

    #[test]
    fn invert_non_unit() {
        let s = poly(&[2, -1]);
        assert_eq!(s.invert(4), Err(QError::NonUnit));
    }

    #[test]
    fn invert_laurent_lowest() {
        // a = q^2 - q^3: inverse starts at q^{-2}.
        let a = Series::from_i64_coeffs(2, &[1, -1]);
        let inv = a.invert(2).unwrap();
        assert_eq!(inv.lowest_exponent(), Some(-2));
        assert!((&a * &inv).agrees_with(&Series::one()).is_ok());
    }

    #[test]
    fn scale_exponents_examples() {
        assert_eq!(poly(&[1, 1]).scale_exponents(2), poly(&[1, 0, 1]));
        let t = Series::from_coeffs(0, vec![BigInt::one()], Precision::Truncated(7));
        assert_eq!(t.scale_exponents(2).precision(), Precision::Truncated(15));
        let any = poly(&[3, 0, -2]);
        assert_eq!(any.scale_exponents(1), any);
    }

    #[test]
    fn div_binomial_exact_roundtrip() {
        let f = poly(&[1, 2, -1, 3]);
        let g = f.mul_binomial(-1, 2);
        assert_eq!(g.div_binomial_exact(-1, 2).unwrap(), f);
        // Non-divisible case leaves a remainder.
        assert_eq!(poly(&[1, 1]).div_binomial_exact(1, 1), Err(QError::Undefined));
    }

    #[test]
    fn div_binomial_negative_exponent() {
        let f = poly(&[1, 0, 1]);
        let g = f.mul_binomial(1, -2);
        assert_eq!(g.div_binomial_exact(1, -2).unwrap(), f);
    }

    #[test]
    fn geometric_matches_division_when_exact() {
        let f = poly(&[1, -1, 2]);
        let g = f.mul_binomial(1, 3);
        let back = g.mul_geometric(1, 3, 20).unwrap();
        assert!(back.agrees_with(&f).is_ok());
    }

    #[test]
    fn agreement_reports_first_mismatch() {
        let a = poly(&[1, 2, 3]);
        let b = poly(&[1, 2, 4]);
        let err = a.agrees_with(&b).unwrap_err();
        assert_eq!(err.exponent, 2);
        assert_eq!(err.lhs, BigInt::from(3));
        assert_eq!(err.rhs, BigInt::from(4));
    }

    #[test]
    fn agreement_respects_common_bound() {
        let a = poly(&[1, 2, 3]);
        let b = Series::from_coeffs(0, vec![BigInt::from(1), BigInt::from(2)], Precision::Truncated(1));
        // They agree on exponents <= 1, which is all that both consider valid.
        assert_eq!(a.agrees_with(&b), Ok(Precision::Truncated(1)));
    }

    #[test]
    fn canonical_zero() {
        let z = &poly(&[1, 1]) - &poly(&[1, 1]);
        assert_eq!(z, Series::zero());
        assert!(z.is_zero_value());
        assert_eq!(Series::monomial(BigInt::zero(), 5), Series::zero());
    }

    #[test]
    fn display_forms() {
        assert_eq!(poly(&[1, -1]).to_string(), "1 - q");
        assert_eq!(Series::from_i64_coeffs(-2, &[3, 0, -1]).to_string(), "3*q^-2 - 1");
        assert_eq!(Series::zero().to_string(), "0");
        assert_eq!(poly(&[1]).truncate_to(4).to_string(), "1 + O(q^5)");
    }

    fn arb_series() -> impl Strategy<Value = Series> {
        (
            -4i64..4,
            prop::collection::vec(-6i64..6, 0..6),
            prop_oneof![Just(None), (2i64..12).prop_map(Some)],
        )
            .prop_map(|(lo, cs, bound)| {
                let precision = bound.map_or(Precision::Exact, Precision::Truncated);
                Series::from_coeffs(lo, cs.into_iter().map(BigInt::from).collect(), precision)
            })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let ab_c = &(&a * &b) * &c;
            let a_bc = &a * &(&b * &c);
            prop_assert!(ab_c.agrees_with(&a_bc).is_ok());
            prop_assert!((&a * &b).agrees_with(&(&b * &a)).is_ok());
            let dist = &a * &(&b + &c);
            let expand = &(&a * &b) + &(&a * &c);
            prop_assert!(dist.agrees_with(&expand).is_ok());
        }

        #[test]
        fn scale_is_ring_morphism(a in arb_series(), b in arb_series(), m in 1i64..4) {
            let lhs = (&a * &b).scale_exponents(m);
            let rhs = &a.scale_exponents(m) * &b.scale_exponents(m);
            prop_assert!(lhs.agrees_with(&rhs).is_ok());
        }

        #[test]
        fn no_overclaimed_coefficients(a in arb_series(), b in arb_series()) {
            // Every stored coefficient of a product must sit within the bound.
            let p = &a * &b;
            if let Some(n) = p.bound() {
                prop_assert!(p.highest_exponent().map_or(true, |h| h <= n));
            }
        }
    }
}
