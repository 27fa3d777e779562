//! Exact arithmetic in the coefficient field `K = Q(q)`.
//!
//! Elements are quotients of Laurent polynomials in `q` with rational
//! coefficients, kept in a unique canonical form so that equality is a
//! structural comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero in Q(q)")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    EvalPole,
    #[error("cannot evaluate a Laurent polynomial at q = 0")]
    EvalAtZero,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// A Laurent polynomial in `q` over the rationals.
///
/// Stored as a finitely supported map from `q`-exponents to nonzero
/// rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::q_power(0)
    }

    /// The monomial `q^k`.
    pub fn q_power(k: i64) -> Self {
        Self::term(k, Rat::one())
    }

    /// The monomial `c * q^k`.
    pub fn term(k: i64, c: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        Self { coeffs }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::term(0, c)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.coeffs.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, k: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(k).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// Lowest exponent with nonzero coefficient.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent with nonzero coefficient.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.values().next_back()
    }

    /// Multiply by `q^k`.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scaled(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.coeffs.iter() {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.coeffs.iter() {
            out.add_term(*k, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scaled(&-Rat::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in self.coeffs.iter() {
            for (kb, cb) in other.coeffs.iter() {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }

    /// Evaluate at a nonzero rational point.
    pub fn eval(&self, r: &Rat) -> Result<Rat, FieldError> {
        if r.is_zero() && self.min_exp().map_or(false, |m| m < 0) {
            return Err(FieldError::EvalAtZero);
        }
        let mut acc = Rat::zero();
        for (k, c) in self.coeffs.iter() {
            let p = if *k >= 0 {
                num::pow::pow(r.clone(), *k as usize)
            } else {
                if r.is_zero() {
                    return Err(FieldError::EvalAtZero);
                }
                num::pow::pow(r.recip(), (-k) as usize)
            };
            acc += c * p;
        }
        Ok(acc)
    }

    /// Ordinary-polynomial division, requiring `min_exp >= 0` on both sides.
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero());
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let dlead = d.max_exp().unwrap();
        let dcoef = d.leading_coeff().unwrap().clone();
        while let Some(rlead) = rem.max_exp() {
            if rlead < dlead {
                break;
            }
            let c = rem.leading_coeff().unwrap() / &dcoef;
            let shift = rlead - dlead;
            quot.add_term(shift, c.clone());
            rem = rem.sub(&d.shifted(shift).scaled(&c));
        }
        (quot, rem)
    }

    /// Monic gcd of two ordinary polynomials (`min_exp >= 0`).
    fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if let Some(lc) = a.leading_coeff().cloned() {
            a = a.scaled(&lc.recip());
        }
        a
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest exponent first
        for (k, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
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
            let unit_coeff = abs.is_one();
            match (*k, unit_coeff) {
                (0, _) => write!(f, "{}", abs)?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{}*q", abs)?,
                (_, true) => write!(f, "q^{}", k)?,
                (_, false) => write!(f, "{}*q^{}", abs, k)?,
            }
        }
        Ok(())
    }
}

/// A canonical element of `K = Q(q)`.
///
/// The denominator has lowest exponent 0 and leading coefficient 1, and
/// shares no polynomial factor with the (shifted) numerator, so two equal
/// elements have identical stored forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QElem {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl QElem {
    pub fn zero() -> Self {
        QElem {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn q() -> Self {
        Self::q_power(1)
    }

    /// `q^k`.
    pub fn q_power(k: i64) -> Self {
        Self::from_poly(LaurentPoly::q_power(k))
    }

    /// `qhat = q - q^{-1}`.
    pub fn qhat() -> Self {
        Self::from_poly(LaurentPoly::from_terms([
            (1, Rat::one()),
            (-1, -Rat::one()),
        ]))
    }

    pub fn from_poly(num: LaurentPoly) -> Self {
        QElem {
            num,
            den: LaurentPoly::one(),
        }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(LaurentPoly::from_rat(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    /// The q-integer `[k] = (q^k - q^{-k})/(q - q^{-1})`.
    pub fn q_int(k: u32) -> Self {
        // [k] = q^{k-1} + q^{k-3} + ... + q^{1-k}
        let mut p = LaurentPoly::zero();
        let k = k as i64;
        let mut e = k - 1;
        while e >= 1 - k {
            p = p.add(&LaurentPoly::q_power(e));
            e -= 2;
        }
        Self::from_poly(p)
    }

    /// Build the canonical fraction `num/den`.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let sn = num.min_exp().unwrap();
        let sd = den.min_exp().unwrap();
        let ns = num.shifted(-sn);
        let ds = den.shifted(-sd);
        let g = ns.gcd(&ds);
        let (nq, r) = ns.div_rem(&g);
        debug_assert!(r.is_zero());
        let (dq, r) = ds.div_rem(&g);
        debug_assert!(r.is_zero());
        let lc = dq.leading_coeff().unwrap().clone();
        let den = dq.scaled(&lc.recip());
        let num = nq.scaled(&lc.recip()).shifted(sn - sd);
        Ok(QElem { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &Self::one()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("denominator product is nonzero")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QElem {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("denominator product is nonzero")
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self, FieldError> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Evaluate at `q = r`.
    pub fn eval(&self, r: &Rat) -> Result<Rat, FieldError> {
        if r.is_zero() {
            return Err(FieldError::EvalAtZero);
        }
        let d = self.den.eval(r)?;
        if d.is_zero() {
            return Err(FieldError::EvalPole);
        }
        Ok(self.num.eval(r)? / d)
    }

    /// `Some(m)` when the element is exactly `q^m`.
    pub fn as_q_power(&self) -> Option<i64> {
        if self.den == LaurentPoly::one() && self.num.num_terms() == 1 {
            let (k, c) = self.num.terms().next().unwrap();
            if c.is_one() {
                return Some(k);
            }
        }
        None
    }

    /// `Some(c)` when the element is a constant rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.den == LaurentPoly::one() && self.num.num_terms() <= 1 {
            if self.num.is_zero() {
                return Some(Rat::zero());
            }
            let (k, c) = self.num.terms().next().unwrap();
            if k == 0 {
                return Some(c.clone());
            }
        }
        None
    }
}

impl fmt::Display for QElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for &QElem {
    type Output = QElem;
    fn add(self, rhs: &QElem) -> QElem {
        QElem::add(self, rhs)
    }
}

impl Sub for &QElem {
    type Output = QElem;
    fn sub(self, rhs: &QElem) -> QElem {
        QElem::sub(self, rhs)
    }
}

impl Mul for &QElem {
    type Output = QElem;
    fn mul(self, rhs: &QElem) -> QElem {
        QElem::mul(self, rhs)
    }
}

impl Neg for &QElem {
    type Output = QElem;
    fn neg(self) -> QElem {
        QElem::neg(self)
    }
}

impl Div for &QElem {
    type Output = QElem;
    fn div(self, rhs: &QElem) -> QElem {
        QElem::div(self, rhs).expect("division by zero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_plus_q_inverse() {
        let s = QElem::q().add(&QElem::q_power(-1));
        let expected = QElem::from_poly(LaurentPoly::from_terms([
            (1, Rat::one()),
            (-1, Rat::one()),
        ]));
        assert_eq!(s, expected);
    }

    #[test]
    fn add_zero_is_identity() {
        let a = QElem::qhat();
        assert_eq!(a.add(&QElem::zero()), a);
    }

    #[test]
    fn qhat_plus_q_inverse_is_q() {
        assert_eq!(QElem::qhat().add(&QElem::q_power(-1)), QElem::q());
    }

    #[test]
    fn q_times_q_inverse() {
        assert_eq!(QElem::q().mul(&QElem::q_power(-1)), QElem::one());
    }

    #[test]
    fn qhat_times_its_inverse() {
        let qh = QElem::qhat();
        assert_eq!(qh.mul(&qh.inv().unwrap()), QElem::one());
    }

    #[test]
    fn difference_of_squares() {
        let a = QElem::q().sub(&QElem::q_power(-1));
        let b = QElem::q().add(&QElem::q_power(-1));
        let expected = QElem::q_power(2).sub(&QElem::q_power(-2));
        assert_eq!(a.mul(&b), expected);
    }

    #[test]
    fn inverses_of_monomials() {
        assert_eq!(QElem::q().inv().unwrap(), QElem::q_power(-1));
        assert_eq!(QElem::q_power(2).inv().unwrap(), QElem::q_power(-2));
    }

    #[test]
    fn inv_of_qhat_is_canonical() {
        // 1/(q - q^{-1}) normalizes to q/(q^2 - 1)
        let i = QElem::qhat().inv().unwrap();
        assert_eq!(i.numerator(), &LaurentPoly::q_power(1));
        assert_eq!(
            i.denominator(),
            &LaurentPoly::from_terms([(2, Rat::one()), (0, -Rat::one())])
        );
        assert!(QElem::zero().inv().is_err());
    }

    #[test]
    fn q_integers() {
        assert_eq!(QElem::q_int(0), QElem::zero());
        assert_eq!(QElem::q_int(1), QElem::one());
        assert_eq!(QElem::q_int(2), QElem::q().add(&QElem::q_power(-1)));
        // [k] * (q - q^{-1}) = q^k - q^{-k}
        for k in 0..8u32 {
            let lhs = QElem::q_int(k).mul(&QElem::qhat());
            let rhs = QElem::q_power(k as i64).sub(&QElem::q_power(-(k as i64)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluation() {
        let a = QElem::q().add(&QElem::q_power(-1));
        assert_eq!(a.eval(&rat_int(2)).unwrap(), rat(5, 2));
        assert_eq!(QElem::one().eval(&rat(7, 3)).unwrap(), rat_int(1));
        assert_eq!(QElem::qhat().eval(&rat_int(3)).unwrap(), rat(8, 3));
        assert!(QElem::qhat().eval(&rat_int(0)).is_err());
        assert!(QElem::qhat().inv().unwrap().eval(&rat_int(1)).is_err());
    }

    #[test]
    fn as_q_power() {
        assert_eq!(QElem::q_power(-3).as_q_power(), Some(-3));
        assert_eq!(QElem::one().as_q_power(), Some(0));
        assert_eq!(QElem::qhat().as_q_power(), None);
        assert_eq!(QElem::from_int(2).as_q_power(), None);
    }

    #[test]
    fn canonical_form_is_reduced() {
        // (q^2 - 1)/(q - 1) = q + 1
        let num = LaurentPoly::from_terms([(2, Rat::one()), (0, -Rat::one())]);
        let den = LaurentPoly::from_terms([(1, Rat::one()), (0, -Rat::one())]);
        let e = QElem::new(num, den).unwrap();
        let expected = QElem::q().add(&QElem::one());
        assert_eq!(e, expected);
    }
}
