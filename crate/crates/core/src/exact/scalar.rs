//! Exact scalars: big integers, rationals and elements of a real quadratic
//! field `Q(sqrt d)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ExactError;

/// The field an exact value (or matrix) lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// `Q(sqrt d)` with `d >= 2` squarefree.
    Quadratic(u64),
}

impl Field {
    /// Smallest field containing both, or `FieldMismatch` for two distinct
    /// quadratic fields.
    pub fn join(self, other: Field) -> Result<Field, ExactError> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Ok(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Ok(self),
            (Field::Quadratic(a), Field::Quadratic(b)) => Err(ExactError::FieldMismatch(a, b)),
        }
    }

    pub fn radicand(self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => Some(d),
        }
    }
}

/// `a + b sqrt(d)` with `b != 0`; `d` squarefree, `d >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticElem {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl QuadraticElem {
    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }
    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }
    pub fn radicand(&self) -> u64 {
        self.d
    }
}

/// An exact real number.
///
/// Values are kept normalized: a rational with denominator 1 is stored as
/// `Integer`, a quadratic element with zero irrational part as `Rational` or
/// `Integer`. Structural equality is therefore value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Integer(BigInt),
    Rational(BigRational),
    Quadratic(QuadraticElem),
}

pub fn is_squarefree(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Splits `n > 0` as `f^2 * core` with `core` squarefree.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree_decompose needs a positive input");
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut core = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            f *= &p;
        }
        if e % 2 == 1 {
            core *= &p;
        }
        p += 1u32;
    }
    core *= rest;
    (f, core)
}

fn rat_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Integer(BigInt::zero())
    }

    pub fn one() -> Self {
        ExactScalar::Integer(BigInt::one())
    }

    pub fn from_i64(v: i64) -> Self {
        ExactScalar::Integer(BigInt::from(v))
    }

    pub fn from_int(v: BigInt) -> Self {
        ExactScalar::Integer(v)
    }

    /// `p/q`; panics on `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        if r.is_integer() {
            ExactScalar::Integer(r.to_integer())
        } else {
            ExactScalar::Rational(r)
        }
    }

    /// `a + b sqrt(d)`. Rejects a `d` that is not squarefree or smaller than 2.
    pub fn quadratic(a: BigRational, b: BigRational, d: u64) -> Result<Self, ExactError> {
        if !is_squarefree(d) {
            return Err(ExactError::BadRadicand(d));
        }
        Ok(Self::from_parts_unchecked(a, b, d))
    }

    /// `sqrt(d)` for squarefree `d`.
    pub fn sqrt_of(d: u64) -> Result<Self, ExactError> {
        Self::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    fn from_parts_unchecked(a: BigRational, b: BigRational, d: u64) -> Self {
        if b.is_zero() {
            Self::from_rational(a)
        } else {
            ExactScalar::Quadratic(QuadraticElem { a, b, d })
        }
    }

    fn from_parts(a: BigRational, b: BigRational, field: Field) -> Self {
        match field {
            Field::Rational => {
                debug_assert!(b.is_zero());
                Self::from_rational(a)
            }
            Field::Quadratic(d) => Self::from_parts_unchecked(a, b, d),
        }
    }

    /// `(a, b)` with the value equal to `a + b sqrt(d)` for the value's own
    /// field (b is zero for rationals).
    pub fn parts(&self) -> (BigRational, BigRational) {
        match self {
            ExactScalar::Integer(i) => (BigRational::from_integer(i.clone()), BigRational::zero()),
            ExactScalar::Rational(r) => (r.clone(), BigRational::zero()),
            ExactScalar::Quadratic(q) => (q.a.clone(), q.b.clone()),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            ExactScalar::Quadratic(q) => Field::Quadratic(q.d),
            _ => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactScalar::Integer(i) if i.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ExactScalar::Integer(i) if i.is_one())
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, ExactScalar::Integer(_))
    }

    pub fn is_rational(&self) -> bool {
        !matches!(self, ExactScalar::Quadratic(_))
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            ExactScalar::Integer(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            ExactScalar::Integer(i) => Some(BigRational::from_integer(i.clone())),
            ExactScalar::Rational(r) => Some(r.clone()),
            ExactScalar::Quadratic(_) => None,
        }
    }

    /// Least common multiple of the denominators of both rational parts.
    pub fn denominator(&self) -> BigInt {
        let (a, b) = self.parts();
        a.denom().lcm(b.denom())
    }

    /// Exact sign of the real value.
    pub fn signum(&self) -> i32 {
        match self {
            ExactScalar::Integer(i) => match i.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
            ExactScalar::Rational(r) => rat_sign(r),
            ExactScalar::Quadratic(q) => {
                let sa = rat_sign(&q.a);
                let sb = rat_sign(&q.b);
                if sa == 0 || sa == sb {
                    return sb;
                }
                // opposite signs: compare a^2 with b^2 d
                let a2 = &q.a * &q.a;
                let b2d = &q.b * &q.b * BigRational::from_integer(BigInt::from(q.d));
                if a2 > b2d {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Integer(i) => i.to_f64().unwrap_or(f64::NAN),
            ExactScalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactScalar::Quadratic(q) => {
                let a = q.a.to_f64().unwrap_or(f64::NAN);
                let b = q.b.to_f64().unwrap_or(f64::NAN);
                let s = (q.d as f64).sqrt();
                // a and b s with opposite signs cancel; use the conjugate form
                // (a^2 - b^2 d) / (a - b s) when that loses less precision.
                if a * b < 0.0 {
                    let norm = (&q.a * &q.a
                        - &q.b * &q.b * BigRational::from_integer(BigInt::from(q.d)))
                        .to_f64()
                        .unwrap_or(f64::NAN);
                    norm / (a - b * s)
                } else {
                    a + b * s
                }
            }
        }
    }

    /// Galois conjugate `a - b sqrt(d)`; identity on rationals.
    pub fn conjugate(&self) -> Self {
        match self {
            ExactScalar::Quadratic(q) => ExactScalar::Quadratic(QuadraticElem {
                a: q.a.clone(),
                b: -q.b.clone(),
                d: q.d,
            }),
            other => other.clone(),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        if let (ExactScalar::Integer(a), ExactScalar::Integer(b)) = (self, rhs) {
            return Ok(ExactScalar::Integer(a + b));
        }
        let f = self.field().join(rhs.field())?;
        let (a1, b1) = self.parts();
        let (a2, b2) = rhs.parts();
        Ok(Self::from_parts(a1 + a2, b1 + b2, f))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_add(&-rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        if let (ExactScalar::Integer(a), ExactScalar::Integer(b)) = (self, rhs) {
            return Ok(ExactScalar::Integer(a * b));
        }
        let f = self.field().join(rhs.field())?;
        let (a1, b1) = self.parts();
        let (a2, b2) = rhs.parts();
        let d = BigRational::from_integer(BigInt::from(f.radicand().unwrap_or(0)));
        let a = &a1 * &a2 + &b1 * &b2 * d;
        let b = a1 * b2 + a2 * b1;
        Ok(Self::from_parts(a, b, f))
    }

    pub fn checked_inv(&self) -> Result<Self, ExactError> {
        match self {
            _ if self.is_zero() => Err(ExactError::DivisionByZero),
            ExactScalar::Integer(i) => Ok(Self::from_rational(BigRational::new(BigInt::one(), i.clone()))),
            ExactScalar::Rational(r) => Ok(Self::from_rational(r.recip())),
            ExactScalar::Quadratic(q) => {
                let norm = &q.a * &q.a - &q.b * &q.b * BigRational::from_integer(BigInt::from(q.d));
                Ok(Self::from_parts_unchecked(&q.a / &norm, -(&q.b / &norm), q.d))
            }
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_mul(&rhs.checked_inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i64) -> Result<Self, ExactError> {
        let base = if exp < 0 { self.checked_inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Exact comparison; `None` only for values in two different quadratic
    /// fields.
    pub fn checked_cmp(&self, rhs: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(rhs).ok()?;
        Some(diff.signum().cmp(&0))
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_cmp(other)
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        Self::from_i64(v)
    }
}

impl From<BigInt> for ExactScalar {
    fn from(v: BigInt) -> Self {
        Self::Integer(v)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(v: BigRational) -> Self {
        Self::from_rational(v)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match self {
            ExactScalar::Integer(i) => ExactScalar::Integer(-i),
            ExactScalar::Rational(r) => ExactScalar::Rational(-r),
            ExactScalar::Quadratic(q) => ExactScalar::Quadratic(QuadraticElem {
                a: -q.a.clone(),
                b: -q.b.clone(),
                d: q.d,
            }),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

// Operator forms panic on mixed quadratic fields; the checked_* methods
// report it instead.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                self.$checked(rhs).expect("exact arithmetic across incompatible fields")
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Integer(i) => write!(f, "{i}"),
            ExactScalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExactScalar::Quadratic(q) => {
                let a = ExactScalar::from_rational(q.a.clone());
                let b = ExactScalar::from_rational(q.b.clone());
                write!(f, "{a} + {b}*sqrt({})", q.d)
            }
        }
    }
}
