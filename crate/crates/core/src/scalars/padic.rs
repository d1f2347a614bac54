//! Fixed-precision p-adic numbers with exact absolute value.
//!
//! An element is p^val * u with u a unit known modulo p^prec (prec =
//! effective number of base-p digits). Addition can cancel leading digits;
//! the effective precision is tracked per element and arithmetic refuses to
//! continue once it drops below a configurable floor. A result whose known
//! digits are all zero is *indistinguishable from zero* and is reported as
//! a precision error rather than silently treated as zero.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_PADIC_FLOOR: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    pub p: u64,
    /// Effective digits known in the unit part (nominal precision for zero).
    pub prec: u32,
    /// Minimal acceptable effective precision.
    pub floor: u32,
    /// None encodes the distinguished exact zero.
    repr: Option<(i64, BigUint)>,
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    // deterministic Miller-Rabin for u64
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_mul_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul_u64(acc, b, m);
        }
        b = mod_mul_u64(b, b, m);
        e >>= 1;
    }
    acc
}

fn p_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

fn mod_inverse(u: &BigUint, m: &BigUint) -> Result<BigUint> {
    let g = BigInt::from(u.clone()).extended_gcd(&BigInt::from(m.clone()));
    if !g.gcd.is_one() {
        return Err(Error::DivisionByZero);
    }
    let mut x = g.x % BigInt::from(m.clone());
    if x.is_negative() {
        x += BigInt::from(m.clone());
    }
    Ok(x.to_biguint().expect("reduced representative is nonnegative"))
}

impl PadicScalar {
    pub fn zero(p: u64, prec: u32) -> Self {
        PadicScalar { p, prec, floor: DEFAULT_PADIC_FLOOR, repr: None }
    }

    pub fn new(p: u64, val: i64, unit: BigUint, prec: u32) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::Unsupported(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::PrecisionExhausted("zero digits requested".into()));
        }
        let m = p_pow(p, prec);
        let u = unit % &m;
        if u.is_zero() || (&u % p).is_zero() {
            return Err(Error::Unsupported("unit part must not be divisible by p".into()));
        }
        Ok(PadicScalar { p, prec, floor: DEFAULT_PADIC_FLOOR, repr: Some((val, u)) })
    }

    /// Embed an exact rational with the full requested precision.
    pub fn from_rational(p: u64, r: &BigRational, prec: u32) -> Result<Self> {
        if r.is_zero() {
            return Ok(Self::zero(p, prec));
        }
        let (vn, nn) = strip_p(r.numer(), p);
        let (vd, nd) = strip_p(r.denom(), p);
        let m = p_pow(p, prec);
        let num_u = nn.mod_floor(&BigInt::from(m.clone())).to_biguint().expect("nonneg");
        let den_u = nd.mod_floor(&BigInt::from(m.clone())).to_biguint().expect("nonneg");
        let unit = (num_u * mod_inverse(&den_u, &m)?) % &m;
        Self::new(p, vn - vd, unit, prec)
    }

    pub fn from_integer(p: u64, n: i64, prec: u32) -> Result<Self> {
        Self::from_rational(p, &BigRational::from(BigInt::from(n)), prec)
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_none()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.repr.as_ref().map(|(v, _)| *v)
    }

    pub fn unit_digits(&self) -> Option<&BigUint> {
        self.repr.as_ref().map(|(_, u)| u)
    }

    /// Exact absolute value p^(-val) as a rational; 0 for the zero element.
    pub fn abs(&self) -> BigRational {
        match &self.repr {
            None => BigRational::zero(),
            Some((v, _)) => {
                let pw = BigInt::from(p_pow(self.p, v.unsigned_abs() as u32));
                if *v >= 0 {
                    BigRational::new(BigInt::one(), pw)
                } else {
                    BigRational::from(pw)
                }
            }
        }
    }

    fn check_field(&self, rhs: &Self) -> Result<()> {
        if self.p != rhs.p {
            return Err(Error::FieldMismatch(format!("Q_{}", self.p), format!("Q_{}", rhs.p)));
        }
        Ok(())
    }

    fn guard_floor(&self, prec: u32, what: &str) -> Result<u32> {
        if prec < self.floor {
            return Err(Error::PrecisionExhausted(format!(
                "{what}: effective precision {prec} below floor {}",
                self.floor
            )));
        }
        Ok(prec)
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            None => self.clone(),
            Some((v, u)) => {
                let m = p_pow(self.p, self.prec);
                PadicScalar { p: self.p, prec: self.prec, floor: self.floor, repr: Some((*v, &m - u)) }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_field(rhs)?;
        let (x, y) = match (&self.repr, &rhs.repr) {
            (None, _) => return Ok(rhs.clone()),
            (_, None) => return Ok(self.clone()),
            (Some(x), Some(y)) => (x, y),
        };
        let (lo, hi, lo_prec, hi_prec) = if x.0 <= y.0 {
            (x, y, self.prec, rhs.prec)
        } else {
            (y, x, rhs.prec, self.prec)
        };
        let shift = (hi.0 - lo.0) as u128;
        // digits of the sum (relative to p^lo.0) known below this count
        let known = std::cmp::min(lo_prec as u128, hi_prec as u128 + shift);
        let known = self.guard_floor(known.min(u32::MAX as u128) as u32, "p-adic add")?;
        let m = p_pow(self.p, known);
        let mut s = lo.1.clone() % &m;
        if shift < known as u128 {
            s = (s + (hi.1.clone() % p_pow(self.p, known - shift as u32)) * p_pow(self.p, shift as u32)) % &m;
        }
        if s.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "p-adic add: result indistinguishable from 0 at precision {known}"
            )));
        }
        // strip cancellation
        let mut t = 0u32;
        let pbig = BigUint::from(self.p);
        while (&s % &pbig).is_zero() {
            s /= &pbig;
            t += 1;
        }
        let prec = self.guard_floor(known - t, "p-adic add (cancellation)")?;
        Ok(PadicScalar {
            p: self.p,
            prec,
            floor: self.floor,
            repr: Some((lo.0 + t as i64, s % p_pow(self.p, prec))),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_field(rhs)?;
        let (x, y) = match (&self.repr, &rhs.repr) {
            (Some(x), Some(y)) => (x, y),
            _ => return Ok(Self::zero(self.p, self.prec.min(rhs.prec))),
        };
        let prec = self.guard_floor(self.prec.min(rhs.prec), "p-adic mul")?;
        let m = p_pow(self.p, prec);
        Ok(PadicScalar {
            p: self.p,
            prec,
            floor: self.floor,
            repr: Some((x.0 + y.0, (&x.1 * &y.1) % &m)),
        })
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            None => Err(Error::DivisionByZero),
            Some((v, u)) => {
                let m = p_pow(self.p, self.prec);
                Ok(PadicScalar {
                    p: self.p,
                    prec: self.prec,
                    floor: self.floor,
                    repr: Some((-v, mod_inverse(&(u % &m), &m)?)),
                })
            }
        }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.mul(&rhs.inv()?)
    }

    /// Representation-level equality at the common known precision.
    pub fn eq_at_common_precision(&self, rhs: &Self) -> bool {
        if self.p != rhs.p {
            return false;
        }
        match (&self.repr, &rhs.repr) {
            (None, None) => true,
            // a nonzero element has a provably nonzero unit digit
            (None, Some(_)) | (Some(_), None) => false,
            (Some((v1, u1)), Some((v2, u2))) => {
                if v1 != v2 {
                    return false;
                }
                let m = p_pow(self.p, self.prec.min(rhs.prec));
                u1 % &m == u2 % &m
            }
        }
    }
}

fn strip_p(n: &BigInt, p: u64) -> (i64, BigInt) {
    let mut v = 0i64;
    let mut n = n.clone();
    let pb = BigInt::from(p);
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    (v, n)
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            None => write!(f, "0 mod {}^{}", self.p, self.prec),
            Some((v, u)) => write!(f, "{}^{} * {} mod {}^{}", self.p, v, u, self.p, self.prec),
        }
    }
}
