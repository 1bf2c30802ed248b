//! Signed monomials `+-q^e`, the only admissible bases of the q-shifted
//! factorials in this crate.

use std::fmt;

use num_bigint::BigInt;

use super::series::Series;

/// The monomial `sign * q^exponent` with `sign = +-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    sign: i8,
    exponent: i64,
}

impl Monomial {
    pub fn new(sign: i8, exponent: i64) -> Monomial {
        assert!(sign == 1 || sign == -1, "monomial sign must be +-1");
        Monomial { sign, exponent }
    }

    /// `q^e`.
    pub fn q_power(e: i64) -> Monomial {
        Monomial::new(1, e)
    }

    /// `-q^e`.
    pub fn neg_q_power(e: i64) -> Monomial {
        Monomial::new(-1, e)
    }

    /// The constant 1.
    pub fn one() -> Monomial {
        Monomial::new(1, 0)
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    /// Product of two monomials.
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial::new(self.sign * other.sign, self.exponent + other.exponent)
    }

    /// The reciprocal `1/(s q^e) = s q^{-e}`.
    pub fn recip(self) -> Monomial {
        Monomial::new(self.sign, -self.exponent)
    }

    /// Integer power (`n` may be negative).
    pub fn pow(self, n: i64) -> Monomial {
        let sign = if self.sign == -1 && n.rem_euclid(2) == 1 { -1 } else { 1 };
        Monomial::new(sign, self.exponent * n)
    }

    pub fn to_series(self) -> Series {
        Series::monomial(BigInt::from(self.sign), self.exponent)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        match self.exponent {
            0 => write!(f, "1"),
            1 => write!(f, "q"),
            e => write!(f, "q^{}", e),
        }
    }
}
