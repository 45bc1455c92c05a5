//! Coefficient rings: the two-element field, the integers and the rationals.
//!
//! All three are principal ideal domains with a Euclidean size function, which
//! is all the Smith normal form needs.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Tag for the coefficient ring a scenario is evaluated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientRing {
    IntMod2,
    Integer,
    Rational,
}

impl CoefficientRing {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientRing::IntMod2 => "z2",
            CoefficientRing::Integer => "z",
            CoefficientRing::Rational => "q",
        }
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientRing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z2" | "f2" | "intmod2" => Ok(CoefficientRing::IntMod2),
            "z" | "int" | "integer" => Ok(CoefficientRing::Integer),
            "q" | "rational" => Ok(CoefficientRing::Rational),
            other => Err(format!("unknown coefficient ring `{other}` (expected z2, z or q)")),
        }
    }
}

/// A principal ideal domain with exact arithmetic and a Euclidean size.
pub trait Pid:
    Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const RING: CoefficientRing;

    fn is_unit(&self) -> bool;

    /// Multiplicative inverse, `None` for non-units.
    fn inverse(&self) -> Option<Self>;

    /// Euclidean size; zero exactly for the zero element.
    fn size(&self) -> BigUint;

    /// Division with remainder: `self = q * d + r` with `size(r) < size(d)`.
    /// `d` must be nonzero.
    fn div_rem_euclid(&self, d: &Self) -> (Self, Self);

    /// A unit `u` with `u * self` the canonical associate of `self`.
    fn normalizing_unit(&self) -> Self;

    fn from_rational(q: &BigRational) -> Option<Self>;

    fn to_rational(&self) -> BigRational;

    fn canonical(&self) -> Self {
        self.normalizing_unit() * self.clone()
    }

    fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem_euclid(self).1.is_zero()
    }
}

/// The field with two elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z2(bool);

impl Z2 {
    pub const ZERO: Z2 = Z2(false);
    pub const ONE: Z2 = Z2(true);

    pub fn new(bit: bool) -> Self {
        Z2(bit)
    }

    pub fn bit(self) -> bool {
        self.0
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl Add for Z2 {
    type Output = Z2;
    fn add(self, rhs: Z2) -> Z2 {
        Z2(self.0 ^ rhs.0)
    }
}

impl Sub for Z2 {
    type Output = Z2;
    fn sub(self, rhs: Z2) -> Z2 {
        Z2(self.0 ^ rhs.0)
    }
}

impl Mul for Z2 {
    type Output = Z2;
    fn mul(self, rhs: Z2) -> Z2 {
        Z2(self.0 & rhs.0)
    }
}

impl Neg for Z2 {
    type Output = Z2;
    fn neg(self) -> Z2 {
        self
    }
}

impl Zero for Z2 {
    fn zero() -> Self {
        Z2(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl One for Z2 {
    fn one() -> Self {
        Z2(true)
    }
}

impl Pid for Z2 {
    const RING: CoefficientRing = CoefficientRing::IntMod2;

    fn is_unit(&self) -> bool {
        self.0
    }

    fn inverse(&self) -> Option<Self> {
        self.0.then_some(*self)
    }

    fn size(&self) -> BigUint {
        BigUint::from(self.0 as u8)
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        assert!(d.0, "division by zero in Z2");
        (*self, Z2(false))
    }

    fn normalizing_unit(&self) -> Self {
        Z2(true)
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        if !q.is_integer() {
            return None;
        }
        Some(Z2(q.numer().is_odd()))
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.0 as u8))
    }
}

impl Pid for BigInt {
    const RING: CoefficientRing = CoefficientRing::Integer;

    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }

    fn inverse(&self) -> Option<Self> {
        self.is_unit().then(|| self.clone())
    }

    fn size(&self) -> BigUint {
        self.magnitude().clone()
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        Integer::div_rem(self, d)
    }

    fn normalizing_unit(&self) -> Self {
        if self.sign() == Sign::Minus {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        q.is_integer().then(|| q.to_integer())
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }
}

impl Pid for BigRational {
    const RING: CoefficientRing = CoefficientRing::Rational;

    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn size(&self) -> BigUint {
        BigUint::from(!self.is_zero() as u8)
    }

    fn div_rem_euclid(&self, d: &Self) -> (Self, Self) {
        (self / d, BigRational::zero())
    }

    fn normalizing_unit(&self) -> Self {
        if self.is_zero() {
            BigRational::one()
        } else {
            self.recip()
        }
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

/// Parses an exact rational literal: `3`, `-3/7`, `0.25`, `1e-3`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().ok()?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
