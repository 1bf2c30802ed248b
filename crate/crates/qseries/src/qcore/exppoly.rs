//! Integer-valued polynomials over named summation indices and parameters.
//!
//! These polynomials carry the q-exponents and sign exponents of every
//! summand in the catalog, e.g. `binom2(i+j+k) + i^2` or a generic quadratic
//! weight `P(i+j)`. Coefficients are rationals (`binom2` contributes halves)
//! but every value on the integer lattice must be an integer; that property
//! is checked once, at construction, by computing the finite-difference
//! (Mahler) coefficients over a box of lattice points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::QError;

/// Rational-coefficient polynomial in named integer variables, validated to
/// take integer values on the integer lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentPoly {
    vars: Vec<String>,
    // exponent vector (aligned with vars) -> coefficient
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl ExponentPoly {
    pub fn zero() -> ExponentPoly {
        ExponentPoly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: i64) -> ExponentPoly {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Vec::new(), BigRational::from_integer(BigInt::from(c)));
        }
        ExponentPoly { vars: Vec::new(), terms }
    }

    pub fn var(name: &str) -> ExponentPoly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], BigRational::one());
        ExponentPoly { vars: vec![name.to_string()], terms }
    }

    /// `p(p-1)/2`, the triangular-number primitive; integer-valued whenever
    /// `p` is.
    pub fn binom2(p: &ExponentPoly) -> ExponentPoly {
        let p2 = p * p;
        (&p2 - p).scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Construct from raw rational terms, rejecting non-integer-valued input.
    pub fn from_rational_terms(
        terms: Vec<(BigRational, Vec<(String, u32)>)>,
    ) -> Result<ExponentPoly, QError> {
        let mut acc = ExponentPoly::zero();
        for (c, monomial) in terms {
            if c.is_zero() {
                continue;
            }
            let mut t = ExponentPoly::zero();
            t.terms.insert(Vec::new(), c);
            for (v, e) in monomial {
                for _ in 0..e {
                    t = &t * &ExponentPoly::var(&v);
                }
            }
            acc = &acc + &t;
        }
        acc.validate()?;
        Ok(acc)
    }

    fn scale(&self, c: &BigRational) -> ExponentPoly {
        if c.is_zero() {
            return ExponentPoly::zero();
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff *= c;
        }
        out
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        // Drop unused variables so structurally equal polynomials compare equal.
        let mut used = vec![false; self.vars.len()];
        for exps in self.terms.keys() {
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        if used.iter().all(|&u| u) {
            return;
        }
        let keep: Vec<usize> = (0..self.vars.len()).filter(|&i| used[i]).collect();
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(exps, c)| (keep.iter().map(|&i| exps[i]).collect(), c.clone()))
            .collect();
        self.vars = vars;
        self.terms = terms;
    }

    fn aligned(a: &ExponentPoly, b: &ExponentPoly) -> (Vec<String>, ExponentPoly, ExponentPoly) {
        let names: BTreeSet<&str> =
            a.vars.iter().map(|s| s.as_str()).chain(b.vars.iter().map(|s| s.as_str())).collect();
        let vars: Vec<String> = names.into_iter().map(|s| s.to_string()).collect();
        (vars.clone(), a.remap(&vars), b.remap(&vars))
    }

    fn remap(&self, vars: &[String]) -> ExponentPoly {
        let idx: Vec<usize> =
            self.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let mut out = vec![0u32; vars.len()];
                for (i, &e) in exps.iter().enumerate() {
                    out[idx[i]] = e;
                }
                (out, c.clone())
            })
            .collect();
        ExponentPoly { vars: vars.to_vec(), terms }
    }

    /// Variables occurring in the polynomial.
    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluate at an integer point; the result is integral by the type
    /// invariant.
    pub fn eval<F: Fn(&str) -> i64>(&self, env: F) -> BigInt {
        let vals: Vec<BigRational> = self
            .vars
            .iter()
            .map(|v| BigRational::from_integer(BigInt::from(env(v))))
            .collect();
        let mut acc = BigRational::zero();
        for (exps, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    t *= &vals[i];
                }
            }
            acc += t;
        }
        debug_assert!(acc.is_integer(), "non-integral exponent value");
        acc.to_integer()
    }

    /// Degree in the named variable.
    pub fn degree_in(&self, var: &str) -> u32 {
        match self.vars.iter().position(|v| v == var) {
            None => 0,
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
        }
    }

    /// Total degree.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficient of `var^k` with all other variables erased (set to
    /// themselves); returns the full sub-polynomial multiplying `var^k`.
    pub fn coefficient_of(&self, var: &str, k: u32) -> ExponentPoly {
        let Some(i) = self.vars.iter().position(|v| v == var) else {
            return if k == 0 { self.clone() } else { ExponentPoly::zero() };
        };
        let mut out = ExponentPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (exps, c) in &self.terms {
            if exps[i] == k {
                let mut e = exps.clone();
                e[i] = 0;
                *out.terms.entry(e).or_insert_with(BigRational::zero) += c;
            }
        }
        out.normalize();
        out
    }

    /// Substitute an integer value for one variable.
    pub fn substitute(&self, var: &str, value: i64) -> ExponentPoly {
        let Some(i) = self.vars.iter().position(|v| v == var) else {
            return self.clone();
        };
        let val = BigRational::from_integer(BigInt::from(value));
        let mut out = ExponentPoly { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (exps, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..exps[i] {
                t *= &val;
            }
            let mut e = exps.clone();
            e[i] = 0;
            if !t.is_zero() {
                *out.terms.entry(e).or_insert_with(BigRational::zero) += t;
            }
        }
        out.normalize();
        out
    }

    /// As a constant, if the polynomial has no variables left.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.terms.keys().all(|e| e.iter().all(|&x| x == 0)) {
            let acc: BigRational = self.terms.values().sum();
            if acc.is_integer() {
                return Some(acc.to_integer());
            }
        }
        None
    }

    /// Linear-form view: constant + sum of coefficient*variable, or `None`
    /// when not linear or with non-integer coefficients.
    pub fn as_linear(&self) -> Option<(i64, Vec<(String, i64)>)> {
        let mut cst = 0i64;
        let mut lin = Vec::new();
        for (exps, c) in &self.terms {
            if !c.is_integer() {
                return None;
            }
            let c = c.to_integer().to_i64()?;
            match exps.iter().enumerate().filter(|(_, &e)| e > 0).collect::<Vec<_>>().as_slice() {
                [] => cst = cst.checked_add(c)?,
                [(i, &1)] => lin.push((self.vars[*i].clone(), c)),
                _ => return None,
            }
        }
        Some((cst, lin))
    }

    /// Verify integrality of every finite-difference (Mahler) coefficient,
    /// which is equivalent to integer-valuedness on the whole lattice.
    pub fn validate(&self) -> Result<(), QError> {
        let degs: Vec<u32> = self.vars.iter().map(|v| self.degree_in(v)).collect();
        let dims: Vec<usize> = degs.iter().map(|&d| d as usize + 1).collect();
        let total: usize = dims.iter().product();
        let mut values = vec![BigRational::zero(); total];
        let mut point = vec![0i64; self.vars.len()];
        for (flat, slot) in values.iter_mut().enumerate() {
            let mut rest = flat;
            for (i, &d) in dims.iter().enumerate() {
                point[i] = (rest % d) as i64;
                rest /= d;
            }
            let mut acc = BigRational::zero();
            for (exps, c) in &self.terms {
                let mut t = c.clone();
                for (i, &e) in exps.iter().enumerate() {
                    let v = BigRational::from_integer(BigInt::from(point[i]));
                    for _ in 0..e {
                        t *= &v;
                    }
                }
                acc += t;
            }
            *slot = acc;
        }
        // Iterated forward differences along each axis turn the value tensor
        // into the Mahler coefficient tensor.
        let mut stride = 1usize;
        for (axis, &d) in dims.iter().enumerate() {
            for _round in 1..d {
                for flat in (0..total).rev() {
                    let coord = (flat / stride) % d;
                    if coord >= 1 {
                        let prev = values[flat - stride].clone();
                        values[flat] -= prev;
                    }
                }
            }
            let _ = axis;
            stride *= d;
        }
        for v in &values {
            if !v.is_integer() {
                return Err(QError::NotIntegerValued(self.to_string()));
            }
        }
        Ok(())
    }

    /// Compile to a fixed variable-slot order for fast repeated evaluation.
    pub fn compile(&self, slots: &[String]) -> CompiledPoly {
        let mut denom = BigInt::one();
        for c in self.terms.values() {
            denom = num_integer::lcm(denom, c.denom().clone());
        }
        let scale = denom.to_i64().expect("exponent denominators stay small");
        let terms = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let scaled = c * BigRational::from_integer(BigInt::from(scale));
                debug_assert!(scaled.is_integer());
                let coeff = scaled.to_integer().to_i64().expect("exponent coefficients fit i64");
                let mut vars = Vec::new();
                for (i, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        let slot = slots
                            .iter()
                            .position(|s| *s == self.vars[i])
                            .expect("variable missing from slot list");
                        vars.push((slot, e));
                    }
                }
                (coeff, vars)
            })
            .collect();
        CompiledPoly { scale, terms }
    }
}

impl Add for &ExponentPoly {
    type Output = ExponentPoly;
    fn add(self, rhs: &ExponentPoly) -> ExponentPoly {
        let (vars, a, b) = ExponentPoly::aligned(self, rhs);
        let mut terms = a.terms;
        for (e, c) in b.terms {
            *terms.entry(e).or_insert_with(BigRational::zero) += c;
        }
        let mut out = ExponentPoly { vars, terms };
        out.normalize();
        out
    }
}

impl Sub for &ExponentPoly {
    type Output = ExponentPoly;
    fn sub(self, rhs: &ExponentPoly) -> ExponentPoly {
        self + &(-rhs)
    }
}

impl Neg for &ExponentPoly {
    type Output = ExponentPoly;
    fn neg(self) -> ExponentPoly {
        self.scale(&BigRational::from_integer(BigInt::from(-1)))
    }
}

impl Mul for &ExponentPoly {
    type Output = ExponentPoly;
    fn mul(self, rhs: &ExponentPoly) -> ExponentPoly {
        let (vars, a, b) = ExponentPoly::aligned(self, rhs);
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        let mut out = ExponentPoly { vars, terms };
        out.normalize();
        out
    }
}

impl fmt::Display for ExponentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let mut printed = false;
            if !mag.is_one() || exps.iter().all(|&e| e == 0) {
                write!(f, "{}", mag)?;
                printed = true;
            }
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if printed {
                    write!(f, "*")?;
                }
                write!(f, "{}", self.vars[i])?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
                printed = true;
            }
        }
        Ok(())
    }
}

/// Slot-indexed integer form of an [`ExponentPoly`]: evaluates
/// `(1/scale) * sum coeff * prod slot^e` in machine arithmetic.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    scale: i64,
    terms: Vec<(i64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    /// Evaluate at slot values; panics on (never-expected) overflow.
    pub fn eval(&self, vals: &[i64]) -> i64 {
        let mut acc: i128 = 0;
        for (coeff, vars) in &self.terms {
            let mut t = *coeff as i128;
            for &(slot, e) in vars {
                for _ in 0..e {
                    t = t.checked_mul(vals[slot] as i128).expect("exponent overflow");
                }
            }
            acc = acc.checked_add(t).expect("exponent overflow");
        }
        let s = self.scale as i128;
        debug_assert_eq!(acc % s, 0, "non-integral compiled exponent");
        i64::try_from(acc / s).expect("exponent exceeds i64")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> ExponentPoly {
        ExponentPoly::var(name)
    }

    #[test]
    fn binom2_is_integer_valued() {
        let s = &(&v("i") + &v("j")) + &v("k");
        let p = &ExponentPoly::binom2(&s) + &(&v("i") * &v("i"));
        p.validate().unwrap();
        let val = p.eval(|n| match n {
            "i" => 2,
            "j" => -1,
            "k" => 3,
            _ => unreachable!(),
        });
        // binom2(4) + 4 = 6 + 4
        assert_eq!(val, BigInt::from(10));
    }

    #[test]
    fn half_x_is_rejected() {
        let half = ExponentPoly::from_rational_terms(vec![(
            BigRational::new(BigInt::one(), BigInt::from(2)),
            vec![("x".into(), 1)],
        )]);
        assert!(matches!(half, Err(QError::NotIntegerValued(_))));
        // (x^2 + x)/2 is fine.
        let tri = ExponentPoly::from_rational_terms(vec![
            (BigRational::new(BigInt::one(), BigInt::from(2)), vec![("x".into(), 2)]),
            (BigRational::new(BigInt::one(), BigInt::from(2)), vec![("x".into(), 1)]),
        ]);
        assert!(tri.is_ok());
    }

    #[test]
    fn linear_view() {
        let p = &(&v("L") - &v("i")) + &ExponentPoly::constant(3);
        let (cst, lin) = p.as_linear().unwrap();
        assert_eq!(cst, 3);
        assert_eq!(lin.len(), 2);
        assert!(ExponentPoly::binom2(&v("j")).as_linear().is_none());
    }

    #[test]
    fn compiled_matches_reference() {
        let p = &ExponentPoly::binom2(&(&v("a") + &v("b"))) - &(&v("b") * &ExponentPoly::constant(4));
        p.validate().unwrap();
        let slots = vec!["a".to_string(), "b".to_string()];
        let c = p.compile(&slots);
        for a in -5..5 {
            for b in -5..5 {
                let reference = p.eval(|n| if n == "a" { a } else { b });
                assert_eq!(BigInt::from(c.eval(&[a, b])), reference);
            }
        }
    }

    #[test]
    fn substitution_and_coefficients() {
        let p = &(&v("i") * &v("i")) + &(&v("i") * &(&v("j") + &v("j")));
        assert_eq!(p.coefficient_of("i", 2), ExponentPoly::constant(1));
        assert_eq!(p.coefficient_of("i", 1), &v("j") + &v("j"));
        let q = p.substitute("j", 3);
        assert_eq!(q.eval(|_| 2), BigInt::from(16));
        assert_eq!(p.substitute("i", 0), ExponentPoly::zero());
    }
}
