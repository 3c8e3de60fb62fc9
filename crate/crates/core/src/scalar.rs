//! Coefficient field for algebra elements.
//!
//! Two backends are supported and never mixed: exact values in the real
//! quadratic field `Q(sqrt n)`, and complex doubles.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CuntzError, Result};

pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `n^e` for any integer `e`, exactly.
pub fn rat_pow(n: u32, e: i64) -> Rational {
    let base = rat_int(n as i64);
    let p = num_traits::pow(base, e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    // to_f64 on BigRational goes through the quotient and stays accurate for
    // huge numerators/denominators.
    q.to_f64().unwrap_or(f64::NAN)
}

fn perfect_square_root(n: u32) -> Option<u32> {
    let r = (n as f64).sqrt().round() as u32;
    (r.checked_mul(r) == Some(n)).then_some(r)
}

/// `a + b*sqrt(radicand)` with rational `a`, `b`.
///
/// Invariants: `radicand == 1` iff `b == 0`; a perfect-square radicand is
/// always folded into `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRational {
    a: Rational,
    b: Rational,
    radicand: u32,
}

impl QuadRational {
    pub fn new(a: Rational, b: Rational, n: u32) -> Self {
        if b.is_zero() {
            return Self::rational(a);
        }
        if let Some(r) = perfect_square_root(n) {
            return Self::rational(a + b * rat_int(r as i64));
        }
        Self { a, b, radicand: n }
    }

    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            radicand: 1,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(rat_int(v))
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    /// `sqrt(n)^m`, exactly.
    pub fn sqrt_pow(n: u32, m: i64) -> Self {
        if m.rem_euclid(2) == 0 {
            return Self::rational(rat_pow(n, m / 2));
        }
        // sqrt(n)^(2k+1) = n^k * sqrt(n)
        let k = (m - 1).div_euclid(2);
        Self::new(Rational::zero(), rat_pow(n, k), n)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u32 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    fn joint_radicand(&self, other: &Self) -> u32 {
        match (self.radicand, other.radicand) {
            (1, r) | (r, 1) => r,
            (r, s) => {
                assert_eq!(r, s, "quadratic fields with different radicands");
                r
            }
        }
    }

    /// The Galois conjugate `a - b*sqrt(n)`.
    pub fn galois_conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.radicand)
    }

    /// Field norm `a^2 - n b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat_int(self.radicand as i64)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = self.norm();
        let c = self.galois_conjugate();
        Some(Self::new(c.a / &norm, c.b / &norm, self.radicand))
    }

    /// Exact sign of the real number `a + b*sqrt(n)`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        // opposite signs: compare a^2 with n b^2
        let a2 = &self.a * &self.a;
        let nb2 = &self.b * &self.b * rat_int(self.radicand as i64);
        match a2.cmp(&nb2) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * (self.radicand as f64).sqrt()
    }

    /// `Some(k)` when the value equals `k/2` for an integer `k`.
    pub fn as_half_integer(&self) -> Option<i64> {
        let q = self.as_rational()?;
        let twice = q * rat_int(2);
        if twice.denom().is_one() {
            twice.numer().to_i64()
        } else {
            None
        }
    }
}

fn sign_of(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Display for QuadRational {
    /// `p/q` or `p/q+p'/q'r`, the `r` suffix standing for `sqrt(n)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&format_rational(&self.a));
        }
        if self.a.is_zero() {
            return write!(f, "{}r", format_rational(&self.b));
        }
        let sep = if self.b.is_negative() { "" } else { "+" };
        write!(
            f,
            "{}{}{}r",
            format_rational(&self.a),
            sep,
            format_rational(&self.b)
        )
    }
}

impl Add for &QuadRational {
    type Output = QuadRational;
    fn add(self, rhs: &QuadRational) -> QuadRational {
        if self.radicand == 1 && rhs.radicand == 1 {
            return QuadRational::rational(&self.a + &rhs.a);
        }
        let r = self.joint_radicand(rhs);
        QuadRational::new(&self.a + &rhs.a, &self.b + &rhs.b, r)
    }
}

impl Sub for &QuadRational {
    type Output = QuadRational;
    fn sub(self, rhs: &QuadRational) -> QuadRational {
        if self.radicand == 1 && rhs.radicand == 1 {
            return QuadRational::rational(&self.a - &rhs.a);
        }
        let r = self.joint_radicand(rhs);
        QuadRational::new(&self.a - &rhs.a, &self.b - &rhs.b, r)
    }
}

impl Mul for &QuadRational {
    type Output = QuadRational;
    fn mul(self, rhs: &QuadRational) -> QuadRational {
        if self.radicand == 1 && rhs.radicand == 1 {
            if self.a.is_one() {
                return rhs.clone();
            }
            if rhs.a.is_one() {
                return self.clone();
            }
            return QuadRational::rational(&self.a * &rhs.a);
        }
        let r = self.joint_radicand(rhs);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * rat_int(r as i64);
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadRational::new(a, b, r)
    }
}

impl Neg for &QuadRational {
    type Output = QuadRational;
    fn neg(self) -> QuadRational {
        QuadRational::new(-self.a.clone(), -self.b.clone(), self.radicand)
    }
}

/// Which coefficient backend an element uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Numeric => f.write_str("numeric"),
        }
    }
}

/// A coefficient: exact element of `Q(sqrt n)` or a complex double.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(QuadRational),
    Numeric(Complex64),
}

impl Scalar {
    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(QuadRational::zero()),
            Backend::Numeric => Scalar::Numeric(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(backend: Backend) -> Self {
        Self::from_int(1, backend)
    }

    pub fn from_int(v: i64, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(QuadRational::from_int(v)),
            Backend::Numeric => Scalar::Numeric(Complex64::new(v as f64, 0.0)),
        }
    }

    pub fn rational(q: Rational) -> Self {
        Scalar::Exact(QuadRational::rational(q))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(rat(num, den))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Numeric(Complex64::new(re, im))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Numeric(_) => Backend::Numeric,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Numeric(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(q) => q == &QuadRational::one(),
            Scalar::Numeric(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    /// Complex conjugation. The exact field is real, so this is the identity
    /// there.
    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.clone()),
            Scalar::Numeric(c) => Scalar::Numeric(c.conj()),
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        match self {
            Scalar::Exact(q) => q.inverse().map(Scalar::Exact),
            Scalar::Numeric(c) => (!self.is_zero()).then(|| Scalar::Numeric(c.inv())),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => Complex64::new(q.to_f64(), 0.0),
            Scalar::Numeric(c) => *c,
        }
    }

    pub fn to_numeric(&self) -> Self {
        Scalar::Numeric(self.to_complex())
    }

    pub fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn as_exact(&self) -> Option<&QuadRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Numeric(_) => None,
        }
    }

    /// The rational value, if this is an exact scalar with no `sqrt(n)` part.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.as_exact().and_then(QuadRational::as_rational)
    }

    pub fn expect_rational(&self) -> Result<Rational> {
        self.as_rational().cloned().ok_or_else(|| {
            CuntzError::Backend(format!("expected an exact rational, found {self}"))
        })
    }

    pub fn check_same_backend(&self, other: &Scalar) -> Result<()> {
        if self.backend() == other.backend() {
            Ok(())
        } else {
            Err(CuntzError::Usage(format!(
                "mixed scalar backends: {} and {}",
                self.backend(),
                other.backend()
            )))
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => q.fmt(f),
            Scalar::Numeric(c) => write!(f, "{}{:+}i", c.re, c.im),
        }
    }
}

impl From<QuadRational> for Scalar {
    fn from(q: QuadRational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<Complex64> for Scalar {
    fn from(c: Complex64) -> Self {
        Scalar::Numeric(c)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$method(b)),
                    (Scalar::Numeric(a), Scalar::Numeric(b)) => Scalar::Numeric(a.$method(b)),
                    _ => panic!("mixed scalar backends"),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Numeric(c) => Scalar::Numeric(-c),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Does the denominator of `q`, in lowest terms, divide a power of `n`?
pub fn is_n_adic(q: &Rational, n: u32) -> bool {
    let mut den = q.denom().clone();
    let n = BigInt::from(n);
    loop {
        if den.is_one() {
            return true;
        }
        let g = den.gcd(&n);
        if g.is_one() {
            return false;
        }
        while (&den % &g).is_zero() {
            den /= &g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_powers() {
        assert_eq!(QuadRational::sqrt_pow(2, 0), QuadRational::one());
        assert_eq!(QuadRational::sqrt_pow(2, 2), QuadRational::from_int(2));
        let r = QuadRational::sqrt_pow(2, 1);
        assert_eq!(r.sqrt_part(), &rat_int(1));
        let inv = QuadRational::sqrt_pow(2, -1);
        assert_eq!(&r * &inv, QuadRational::one());
        let r3 = QuadRational::sqrt_pow(3, 3);
        assert_eq!(r3.sqrt_part(), &rat_int(3));
        assert_eq!(&r3 * &QuadRational::sqrt_pow(3, -3), QuadRational::one());
    }

    #[test]
    fn perfect_square_radicand_folds() {
        let q = QuadRational::new(rat(1, 2), rat(3, 2), 4);
        assert!(q.is_rational());
        assert_eq!(q.rational_part(), &rat(7, 2));
        assert!(QuadRational::sqrt_pow(4, 1).is_rational());
    }

    #[test]
    fn inverse_and_sign() {
        let q = QuadRational::new(rat(1, 2), rat(1, 2), 3);
        let inv = q.inverse().unwrap();
        assert_eq!(&q * &inv, QuadRational::one());
        assert!(QuadRational::zero().inverse().is_none());
        // 1 - sqrt(2) < 0, 2 - sqrt(3) > 0, 3 - sqrt(9)... folded
        assert_eq!(QuadRational::new(rat_int(1), rat_int(-1), 2).signum(), -1);
        assert_eq!(QuadRational::new(rat_int(2), rat_int(-1), 3).signum(), 1);
        assert_eq!(QuadRational::new(rat_int(-2), rat_int(1), 3).signum(), -1);
        assert_eq!(QuadRational::new(rat_int(0), rat_int(1), 3).signum(), 1);
    }

    #[test]
    fn display_forms() {
        assert_eq!(QuadRational::rational(rat(1, 4)).to_string(), "1/4");
        assert_eq!(QuadRational::from_int(0).to_string(), "0");
        assert_eq!(
            QuadRational::new(rat(1, 2), rat(-3, 2), 2).to_string(),
            "1/2-3/2r"
        );
        assert_eq!(QuadRational::new(rat(1, 2), rat(3, 2), 2).to_string(), "1/2+3/2r");
    }

    #[test]
    fn half_integers() {
        assert_eq!(QuadRational::rational(rat(-1, 2)).as_half_integer(), Some(-1));
        assert_eq!(QuadRational::from_int(3).as_half_integer(), Some(6));
        assert_eq!(QuadRational::rational(rat(1, 3)).as_half_integer(), None);
    }

    #[test]
    fn n_adic_denominators() {
        assert!(is_n_adic(&rat(1, 4), 2));
        assert!(is_n_adic(&rat(1, 12), 6));
        assert!(!is_n_adic(&rat(1, 18), 3));
        assert!(is_n_adic(&rat_int(5), 7));
    }

    #[test]
    #[should_panic(expected = "mixed scalar backends")]
    fn mixed_backends_panic() {
        let _ = &Scalar::one(Backend::Exact) + &Scalar::one(Backend::Numeric);
    }
}
