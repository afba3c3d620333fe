//! The coefficient field: exact rational functions of `v = q^{1/2}` over
//! arbitrary-precision rationals, plus q-combinatorics.
//!
//! Every power of `q` that appears anywhere in the kernel is a power of `v`
//! with an even exponent; half-integer powers of `q` are odd powers of `v`.
//! Storing `v`-exponents as integers keeps all arithmetic exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{QcvError, Result};

pub type BigRational = num_rational::BigRational;

/// Laurent polynomial in `v` with rational coefficients.
///
/// Invariant: no stored zero coefficients; the empty map is 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, BigRational::one())
    }

    pub fn monomial(exp: i64, coeff: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn v_pow(exp: i64) -> Self {
        Self::monomial(exp, BigRational::one())
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, BigRational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    /// True when the polynomial is a single term `c * v^k`.
    pub fn as_monomial(&self) -> Option<(i64, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn add_term(&mut self, exp: i64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, coeff);
            }
        }
    }

    /// Leading (highest-exponent) coefficient.
    fn leading(&self) -> Option<&BigRational> {
        self.terms.values().next_back()
    }

    pub fn shift(&self, by: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn evaluate(&self, v0: &BigRational) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            if *e < 0 && v0.is_zero() {
                return Err(QcvError::Pole);
            }
            acc += c * rational_pow(v0, *e);
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, v0: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| rational_to_f64(c) * v0.powi(*e as i32))
            .sum()
    }

    /// Substitute `v -> 1/v`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Euclidean remainder of `self / other` among ordinary (min-exp 0)
    /// polynomials. Both inputs must have min exponent >= 0.
    fn rem_poly(&self, other: &Self) -> Self {
        debug_assert!(other.min_exp().map(|m| m >= 0).unwrap_or(false));
        let mut r = self.clone();
        let d_deg = other.max_exp().unwrap();
        let d_lead = other.leading().unwrap().clone();
        while let Some(r_deg) = r.max_exp() {
            if r_deg < d_deg {
                break;
            }
            let factor = r.leading().unwrap() / &d_lead;
            let shift = r_deg - d_deg;
            for (e, c) in other.terms.iter() {
                r.add_term(e + shift, -(&factor * c));
            }
        }
        r
    }

    /// Monic gcd of two ordinary polynomials (min exponent 0).
    fn gcd_poly(a: &Self, b: &Self) -> Self {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem_poly(&b);
            a = b;
            b = r;
        }
        if let Some(lead) = a.leading().cloned() {
            a = a.scale(&(BigRational::one() / lead));
        }
        a
    }

    /// Exact division; panics if the division is not exact.
    fn div_exact(&self, other: &Self) -> Self {
        let mut q = Self::zero();
        let mut r = self.clone();
        let d_deg = other.max_exp().expect("division by zero");
        let d_lead = other.leading().unwrap().clone();
        while let Some(r_deg) = r.max_exp() {
            assert!(r_deg >= d_deg, "non-exact polynomial division");
            let factor = r.leading().unwrap() / &d_lead;
            let shift = r_deg - d_deg;
            q.add_term(shift, factor.clone());
            for (e, c) in other.terms.iter() {
                r.add_term(e + shift, -(&factor * c));
            }
        }
        q
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
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
            let show_coeff = !abs.is_one() || *e == 0;
            if show_coeff {
                write!(f, "{}", abs)?;
            }
            if *e != 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                if *e == 1 {
                    write!(f, "v")?;
                } else {
                    write!(f, "v^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

/// Element of the fraction field of [`LaurentPoly`], kept in canonical form:
/// gcd-cancelled, denominator with min exponent 0 and leading coefficient 1.
/// Equality is therefore structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QScalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        QScalar { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_poly(LaurentPoly::monomial(0, BigRational::from_integer(n.into())))
    }

    pub fn from_rational(r: BigRational) -> Self {
        QScalar::from_poly(LaurentPoly::monomial(0, r))
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        QScalar { num, den: LaurentPoly::one() }
    }

    /// `v^k`.
    pub fn v_pow(k: i64) -> Self {
        QScalar::from_poly(LaurentPoly::v_pow(k))
    }

    /// `q^k = v^{2k}`.
    pub fn q_pow(k: i64) -> Self {
        QScalar::v_pow(2 * k)
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut s = QScalar { num, den };
        s.canonicalize();
        s
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value is `c * v^k`; returns `(k, c)`.
    pub fn as_monomial(&self) -> Option<(i64, BigRational)> {
        if self.den.is_one() {
            self.num.as_monomial().map(|(e, c)| (e, c.clone()))
        } else {
            None
        }
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        // Pull v^k units out so both parts are ordinary polynomials.
        let num_shift = self.num.min_exp().unwrap();
        let den_shift = self.den.min_exp().unwrap();
        let mut num = self.num.shift(-num_shift);
        let mut den = self.den.shift(-den_shift);
        if !den.is_one() {
            let g = LaurentPoly::gcd_poly(&num, &den);
            if g.max_exp().unwrap_or(0) > 0 {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        // Monic denominator; net v-unit goes to the numerator.
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = BigRational::one() / lead;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        self.num = num.shift(num_shift - den_shift);
        self.den = den;
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        QScalar::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return QScalar::one();
        }
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = QScalar::one();
        for _ in 0..k.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, v0: &BigRational) -> Result<BigRational> {
        let den = self.den.evaluate(v0)?;
        if den.is_zero() {
            return Err(QcvError::Pole);
        }
        Ok(self.num.evaluate(v0)? / den)
    }

    pub fn evaluate_f64(&self, v0: f64) -> Result<f64> {
        let den = self.den.evaluate_f64(v0);
        if den == 0.0 {
            return Err(QcvError::Pole);
        }
        Ok(self.num.evaluate_f64(v0) / den)
    }

    /// Substitute `v -> 1/v` (equivalently `q -> 1/q`).
    pub fn invert_variable(&self) -> Self {
        QScalar::new(self.num.invert_variable(), self.den.invert_variable())
    }
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl Add for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return QScalar::new(&self.num + &rhs.num, self.den.clone());
        }
        QScalar::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self + &(-rhs)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        if self.is_zero() || rhs.is_zero() {
            return QScalar::zero();
        }
        // Monomial denominators are by far the common case; skip the gcd.
        if self.den.is_one() && rhs.den.is_one() {
            return QScalar {
                num: &self.num * &rhs.num,
                den: LaurentPoly::one(),
            };
        }
        QScalar::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &QScalar {
    type Output = QScalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QScalar) -> QScalar {
        self * &rhs.inv()
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for QScalar {
            type Output = QScalar;
            fn $method(self, rhs: QScalar) -> QScalar {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, rhs: &QScalar) {
        *self = &*self + rhs;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, rhs: &QScalar) {
        *self = &*self * rhs;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, rhs: &QScalar) {
        *self = &*self - rhs;
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mut acc = BigRational::one();
    let b = if exp < 0 {
        BigRational::one() / base
    } else {
        base.clone()
    };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    acc
}

fn rational_to_f64(r: &BigRational) -> f64 {
    bigint_to_f64(r.numer()) / bigint_to_f64(r.denom())
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Symmetric q-integer `[n] = (q^n - q^{-n}) / (q - q^{-1})`, expanded to the
/// Laurent polynomial `q^{n-1} + q^{n-3} + ... + q^{1-n}`. Odd in `n`.
pub fn q_int(n: i64) -> QScalar {
    if n == 0 {
        return QScalar::zero();
    }
    let sign = if n < 0 { -1 } else { 1 };
    let n_abs = n.unsigned_abs() as i64;
    let mut p = LaurentPoly::zero();
    for j in 0..n_abs {
        // q^{n-1-2j} = v^{2(n-1-2j)}
        p.add_term(
            2 * (n_abs - 1 - 2 * j),
            BigRational::from_integer(sign.into()),
        );
    }
    QScalar::from_poly(p)
}

/// `[n]! = [n][n-1]...[1]`, with `[0]! = 1`.
pub fn q_factorial(n: u32) -> QScalar {
    let mut out = QScalar::one();
    for k in 1..=n as i64 {
        out = &out * &q_int(k);
    }
    out
}

/// Quantum binomial `[n choose k] = [n]!/([k]![n-k]!)`; zero for `k` outside
/// `0..=n`. Always a Laurent polynomial, symmetric under `k <-> n-k`.
pub fn q_binomial(n: i64, k: i64) -> QScalar {
    if k < 0 || k > n || n < 0 {
        return QScalar::zero();
    }
    let k = k.min(n - k);
    // [n]!/([k]![n-k]!) = prod_{j=1..k} [n-k+j]/[j]
    let mut out = QScalar::one();
    for j in 1..=k {
        out = &out * &q_int(n - k + j);
        out = &out / &q_int(j);
    }
    out
}
