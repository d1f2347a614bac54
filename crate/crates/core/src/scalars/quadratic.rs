//! Exact arithmetic in quadratic fields Q(sqrt(d)) for square-free d.
//!
//! An element is stored as a + b*sqrt(d) with rational a, b. For d < 0 the
//! element is complex and sqrt(d) means i*sqrt(|d|); the squared modulus
//! a^2 + |d| b^2 is exactly rational. For d > 0 the element is real and
//! signs/comparisons are decided exactly with integer arithmetic.

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    pub a: BigRational,
    pub b: BigRational,
    pub d: i64,
}

/// Trial-division square-free test; only sensible for the moderate d a CLI
/// user would write down.
pub fn is_square_free(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let mut n = d.unsigned_abs();
    if n > 1 << 40 {
        return false; // refuse to trial-divide huge discriminants
    }
    let mut p: u64 = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

impl QuadraticNumber {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Result<Self> {
        if !is_square_free(d) {
            return Err(Error::Unsupported(format!("d = {d} is not square-free (or is 0/1)")));
        }
        Ok(QuadraticNumber { a, b, d })
    }

    pub fn from_rational(a: BigRational, d: i64) -> Self {
        QuadraticNumber { a, b: BigRational::zero(), d }
    }

    pub fn zero(d: i64) -> Self {
        Self::from_rational(BigRational::zero(), d)
    }

    pub fn one(d: i64) -> Self {
        Self::from_rational(BigRational::one(), d)
    }

    pub fn sqrt_d(d: i64) -> Self {
        QuadraticNumber { a: BigRational::zero(), b: BigRational::one(), d }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadraticNumber { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm N(x) = x * conj(x) = a^2 - d b^2, always rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from(BigInt::from(self.d)) * &self.b * &self.b
    }

    /// Squared complex modulus a^2 + |d| b^2; requires d < 0.
    pub fn modulus_squared(&self) -> Result<BigRational> {
        if self.d >= 0 {
            return Err(Error::Unsupported("modulus_squared needs d < 0".into()));
        }
        Ok(&self.a * &self.a + BigRational::from(BigInt::from(-self.d)) * &self.b * &self.b)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_field(rhs)?;
        Ok(QuadraticNumber { a: &self.a + &rhs.a, b: &self.b + &rhs.b, d: self.d })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_field(rhs)?;
        Ok(QuadraticNumber { a: &self.a - &rhs.a, b: &self.b - &rhs.b, d: self.d })
    }

    pub fn neg(&self) -> Self {
        QuadraticNumber { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_field(rhs)?;
        let d = BigRational::from(BigInt::from(self.d));
        Ok(QuadraticNumber {
            a: &self.a * &rhs.a + &d * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            d: self.d,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        debug_assert!(!n.is_zero(), "nonzero element of a quadratic field has nonzero norm");
        let c = self.conj();
        Ok(QuadraticNumber { a: &c.a / &n, b: &c.b / &n, d: self.d })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.mul(&rhs.inv()?)
    }

    fn check_field(&self, rhs: &Self) -> Result<()> {
        if self.d != rhs.d {
            return Err(Error::FieldMismatch(format!("Q(sqrt({}))", self.d), format!("Q(sqrt({}))", rhs.d)));
        }
        Ok(())
    }

    /// Exact sign of a real quadratic number (d > 0): -1, 0, +1.
    /// Decided by comparing a^2 against d b^2 with integer arithmetic.
    pub fn sign(&self) -> Result<i32> {
        if self.d < 0 {
            return Err(Error::Unsupported("sign of a complex quadratic number".into()));
        }
        if self.b.is_zero() {
            return Ok(rat_sign(&self.a));
        }
        if self.a.is_zero() {
            return Ok(rat_sign(&self.b));
        }
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sa == sb {
            return Ok(sa);
        }
        // a and b*sqrt(d) have opposite signs: compare magnitudes via squares.
        let a2 = &self.a * &self.a;
        let db2 = BigRational::from(BigInt::from(self.d)) * &self.b * &self.b;
        Ok(match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0, // impossible for square-free d with b != 0
        })
    }

    /// Exact comparison of two real quadratic numbers.
    pub fn cmp_real(&self, rhs: &Self) -> Result<Ordering> {
        let diff = self.sub(rhs)?;
        Ok(match diff.sign()? {
            s if s > 0 => Ordering::Greater,
            s if s < 0 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }

    /// Exact floor of a real quadratic number (d > 0), via bounded binary
    /// search on exact sign tests.
    pub fn floor(&self) -> Result<BigInt> {
        if self.d < 0 {
            return Err(Error::Unsupported("floor of a complex number".into()));
        }
        if self.b.is_zero() {
            return Ok(self.a.floor().to_integer());
        }
        // crude exact bound: |x| <= |a| + |b| (isqrt(d)+1)
        let root_bound = BigInt::from((self.d as u64).sqrt() + 1);
        let bound = self.a.abs() + self.b.abs() * BigRational::from(root_bound);
        let m: BigInt = bound.ceil().to_integer() + 1;
        let mut lo = -m.clone();
        let mut hi = m;
        // invariant: lo <= x < hi
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) / 2;
            let probe = QuadraticNumber::from_rational(BigRational::from(mid.clone()), self.d);
            if self.sub(&probe)?.sign()? >= 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Square root inside the same field, if one exists.
    pub fn sqrt_in_field(&self) -> Option<Self> {
        let d = self.d;
        let dr = BigRational::from(BigInt::from(d));
        if self.b.is_zero() {
            // y = 0 branch: x^2 = a
            if let Some(x) = rational_sqrt(&self.a) {
                return Some(QuadraticNumber::from_rational(x, d));
            }
            // x = 0 branch: d y^2 = a
            let q = &self.a / &dr;
            if let Some(y) = rational_sqrt(&q) {
                return Some(QuadraticNumber { a: BigRational::zero(), b: y, d });
            }
            return None;
        }
        // (x + y sqrt d)^2 = a + b sqrt d with b != 0:
        // x^2 + d y^2 = a, 2xy = b. Then x^2 is a root of X^2 - aX + d b^2/4.
        let disc = &self.a * &self.a - &dr * &self.b * &self.b;
        let s = rational_sqrt(&disc)?;
        let two = BigRational::from(BigInt::from(2));
        for x2 in [(&self.a + &s) / &two, (&self.a - &s) / &two] {
            if let Some(x) = rational_sqrt(&x2) {
                if !x.is_zero() {
                    let y = &self.b / (&two * &x);
                    return Some(QuadraticNumber { a: x, b: y, d });
                }
            }
        }
        None
    }
}

pub fn rat_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact square root of a rational, when it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(BigRational::zero());
    }
    let num = r.numer().to_biguint()?;
    let den = r.denom().to_biguint()?;
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &sn * &sn == num && &sd * &sd == den {
        Some(BigRational::new(BigInt::from(sn), BigInt::from(sd)))
    } else {
        None
    }
}

/// Integer square root helper for BigUint callers.
pub fn biguint_isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            if self.b.is_one() {
                return write!(f, "sqrt({})", self.d);
            }
            return write!(f, "{}*sqrt({})", self.b, self.d);
        }
        if self.b.is_positive() {
            if self.b.is_one() {
                write!(f, "{}+sqrt({})", self.a, self.d)
            } else {
                write!(f, "{}+{}*sqrt({})", self.a, self.b, self.d)
            }
        } else {
            let nb = -self.b.clone();
            if nb.is_one() {
                write!(f, "{}-sqrt({})", self.a, self.d)
            } else {
                write!(f, "{}-{}*sqrt({})", self.a, nb, self.d)
            }
        }
    }
}
