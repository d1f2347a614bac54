//! Coefficient fields: exact rationals, quadratic extensions Q(sqrt(d)),
//! and fixed-precision p-adics, behind one runtime-tagged scalar type.

pub mod padic;
pub mod quadratic;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
pub use padic::{PadicScalar, DEFAULT_PADIC_FLOOR};
pub use quadratic::{is_square_free, rat_sign, rational_sqrt, QuadraticNumber};

/// Which field a scalar lives in. Mixed-field arithmetic is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rational,
    /// Q(sqrt(d)) for square-free d (d = -1 is Q(i)).
    Quadratic(i64),
    /// Q_p at nominal precision `prec` digits.
    Padic { p: u64, prec: u32 },
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
            FieldSpec::Padic { p, prec } => write!(f, "Q_{p} (prec {prec})"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Scalar {
    Rat(BigRational),
    Quad(QuadraticNumber),
    Padic(PadicScalar),
}

/// Exact absolute-value data. Real quadratic elements with b != 0 have an
/// irrational absolute value; for those the sign-normalized element itself is
/// returned, which still supports exact comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum AbsValue {
    /// Exact |x| (rational and p-adic absolute values).
    Rational(BigRational),
    /// Exact |x|^2 for complex quadratic fields (d < 0).
    ModulusSquared(BigRational),
    /// |x| as a sign-normalized real quadratic number (d > 0, b != 0).
    RealQuadratic(QuadraticNumber),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Scalar {
    pub fn field_spec(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rational,
            Scalar::Quad(x) => FieldSpec::Quadratic(x.d),
            Scalar::Padic(x) => FieldSpec::Padic { p: x.p, prec: x.prec },
        }
    }

    /// Same field? (p-adic elements match on p regardless of effective precision)
    pub fn same_field(&self, rhs: &Self) -> bool {
        match (self, rhs) {
            (Scalar::Rat(_), Scalar::Rat(_)) => true,
            (Scalar::Quad(x), Scalar::Quad(y)) => x.d == y.d,
            (Scalar::Padic(x), Scalar::Padic(y)) => x.p == y.p,
            _ => false,
        }
    }

    pub fn zero(spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Rational => Scalar::Rat(BigRational::zero()),
            FieldSpec::Quadratic(d) => Scalar::Quad(QuadraticNumber::zero(d)),
            FieldSpec::Padic { p, prec } => Scalar::Padic(PadicScalar::zero(p, prec)),
        }
    }

    pub fn one(spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Rational => Scalar::Rat(BigRational::one()),
            FieldSpec::Quadratic(d) => Scalar::Quad(QuadraticNumber::one(d)),
            FieldSpec::Padic { p, prec } => {
                Scalar::Padic(PadicScalar::from_integer(p, 1, prec).expect("1 is a valid unit"))
            }
        }
    }

    pub fn from_integer(spec: FieldSpec, n: i64) -> Self {
        Self::from_rational(spec, BigRational::from(BigInt::from(n)))
    }

    pub fn from_rational(spec: FieldSpec, r: BigRational) -> Self {
        match spec {
            FieldSpec::Rational => Scalar::Rat(r),
            FieldSpec::Quadratic(d) => Scalar::Quad(QuadraticNumber::from_rational(r, d)),
            FieldSpec::Padic { p, prec } => {
                Scalar::Padic(PadicScalar::from_rational(p, &r, prec).expect("rational embeds"))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Quad(x) => x.is_zero(),
            Scalar::Padic(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_one(),
            Scalar::Quad(x) => x.b.is_zero() && x.a.is_one(),
            Scalar::Padic(x) => {
                x.eq_at_common_precision(&PadicScalar::from_integer(x.p, 1, x.prec).expect("one"))
            }
        }
    }

    fn mismatch(&self, rhs: &Self) -> Error {
        Error::FieldMismatch(self.field_spec().to_string(), rhs.field_spec().to_string())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Ok(Scalar::Rat(x + y)),
            (Scalar::Quad(x), Scalar::Quad(y)) => Ok(Scalar::Quad(x.add(y)?)),
            (Scalar::Padic(x), Scalar::Padic(y)) => Ok(Scalar::Padic(x.add(y)?)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Ok(Scalar::Rat(x - y)),
            (Scalar::Quad(x), Scalar::Quad(y)) => Ok(Scalar::Quad(x.sub(y)?)),
            (Scalar::Padic(x), Scalar::Padic(y)) => Ok(Scalar::Padic(x.sub(y)?)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Ok(Scalar::Rat(x * y)),
            (Scalar::Quad(x), Scalar::Quad(y)) => Ok(Scalar::Quad(x.mul(y)?)),
            (Scalar::Padic(x), Scalar::Padic(y)) => Ok(Scalar::Padic(x.mul(y)?)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, rhs) {
            (Scalar::Rat(x), Scalar::Rat(y)) => Ok(Scalar::Rat(x / y)),
            (Scalar::Quad(x), Scalar::Quad(y)) => Ok(Scalar::Quad(x.div(y)?)),
            (Scalar::Padic(x), Scalar::Padic(y)) => Ok(Scalar::Padic(x.div(y)?)),
            _ => Err(self.mismatch(rhs)),
        }
    }

    pub fn arith(&self, rhs: &Self, op: ArithOp) -> Result<Self> {
        match op {
            ArithOp::Add => self.add(rhs),
            ArithOp::Sub => self.sub(rhs),
            ArithOp::Mul => self.mul(rhs),
            ArithOp::Div => self.div(rhs),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Rat(x) => Scalar::Rat(-x.clone()),
            Scalar::Quad(x) => Scalar::Quad(x.neg()),
            Scalar::Padic(x) => Scalar::Padic(x.neg()),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Rat(x) => Ok(Scalar::Rat(x.recip())),
            Scalar::Quad(x) => Ok(Scalar::Quad(x.inv()?)),
            Scalar::Padic(x) => Ok(Scalar::Padic(x.inv()?)),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Scalar::one(self.field_spec()));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one(self.field_spec());
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b)?;
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(acc)
    }

    /// Exact absolute-value data; see [`AbsValue`].
    pub fn abs_value(&self) -> Result<AbsValue> {
        match self {
            Scalar::Rat(x) => Ok(AbsValue::Rational(x.abs())),
            Scalar::Padic(x) => Ok(AbsValue::Rational(x.abs())),
            Scalar::Quad(x) => {
                if x.d < 0 {
                    Ok(AbsValue::ModulusSquared(x.modulus_squared()?))
                } else if x.b.is_zero() {
                    Ok(AbsValue::Rational(x.a.abs()))
                } else {
                    let s = x.sign()?;
                    Ok(AbsValue::RealQuadratic(if s >= 0 { x.clone() } else { x.neg() }))
                }
            }
        }
    }

    /// Check q^m = 1 exactly for 1 <= m <= bound; Some(order) or None.
    pub fn root_of_unity_order(&self, bound: u32) -> Result<Option<u32>> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let one = Scalar::one(self.field_spec());
        let mut pw = self.clone();
        for m in 1..=bound {
            if pw == one {
                return Ok(Some(m));
            }
            if m < bound {
                pw = pw.mul(self)?;
            }
        }
        Ok(None)
    }

    /// Total order on representations; used only for deterministic output
    /// ordering, not for field semantics.
    pub fn repr_cmp(&self, rhs: &Self) -> Ordering {
        fn key(s: &Scalar) -> (u8, Vec<BigInt>) {
            match s {
                Scalar::Rat(x) => (0, vec![x.numer().clone(), x.denom().clone()]),
                Scalar::Quad(x) => (
                    1,
                    vec![
                        BigInt::from(x.d),
                        x.a.numer().clone(),
                        x.a.denom().clone(),
                        x.b.numer().clone(),
                        x.b.denom().clone(),
                    ],
                ),
                Scalar::Padic(x) => {
                    let (v, u) = match (x.valuation(), x.unit_digits()) {
                        (Some(v), Some(u)) => (v, BigInt::from(u.clone())),
                        _ => (0, BigInt::zero()),
                    };
                    (2, vec![BigInt::from(x.p), BigInt::from(v), u])
                }
            }
        }
        key(self).cmp(&key(rhs))
    }

    /// Representation height: total bit size of the stored integers. Used
    /// to pick small orbit representatives; 0 for p-adic values.
    pub fn height_bits(&self) -> u64 {
        fn rat_bits(r: &BigRational) -> u64 {
            r.numer().bits() + r.denom().bits()
        }
        match self {
            Scalar::Rat(x) => rat_bits(x),
            Scalar::Quad(x) => rat_bits(&x.a) + rat_bits(&x.b),
            Scalar::Padic(_) => 0,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<&QuadraticNumber> {
        match self {
            Scalar::Quad(x) => Some(x),
            _ => None,
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rat(x), Scalar::Rat(y)) => x == y,
            (Scalar::Quad(x), Scalar::Quad(y)) => x == y,
            (Scalar::Padic(x), Scalar::Padic(y)) => x.eq_at_common_precision(y),
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(x) => write!(f, "{x}"),
            Scalar::Quad(x) => write!(f, "{x}"),
            Scalar::Padic(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub(crate) fn gaussian(an: i64, ad: i64, bn: i64, bd: i64) -> Scalar {
        Scalar::Quad(
            QuadraticNumber::new(
                BigRational::new(BigInt::from(an), BigInt::from(ad)),
                BigRational::new(BigInt::from(bn), BigInt::from(bd)),
                -1,
            )
            .unwrap(),
        )
    }

    #[test]
    fn rational_add_example() {
        let s = rat(1, 2).add(&rat(1, 3)).unwrap();
        assert_eq!(s, rat(5, 6));
    }

    #[test]
    fn unit_circle_q_times_conjugate() {
        let q = gaussian(3, 5, 4, 5);
        let qc = gaussian(3, 5, -4, 5);
        assert!(q.mul(&qc).unwrap().is_one());
        assert_eq!(q.abs_value().unwrap(), AbsValue::ModulusSquared(BigRational::one()));
    }

    #[test]
    fn padic_abs_examples() {
        let five = Scalar::Padic(PadicScalar::from_integer(5, 5, 12).unwrap());
        assert_eq!(
            five.abs_value().unwrap(),
            AbsValue::Rational(BigRational::new(BigInt::one(), BigInt::from(5)))
        );
        let z = Scalar::Padic(PadicScalar::zero(5, 12));
        assert_eq!(z.abs_value().unwrap(), AbsValue::Rational(BigRational::zero()));
    }

    #[test]
    fn root_of_unity_detection() {
        let i = gaussian(0, 1, 1, 1);
        assert_eq!(i.root_of_unity_order(8).unwrap(), Some(4));
        let q = gaussian(3, 5, 4, 5);
        assert_eq!(q.root_of_unity_order(64).unwrap(), None);
        let two = rat(2, 1);
        assert_eq!(two.root_of_unity_order(10).unwrap(), None);
    }

    #[test]
    fn real_quadratic_abs_is_sign_normalized() {
        let x = Scalar::Quad(
            QuadraticNumber::new(
                BigRational::from(BigInt::from(1)),
                BigRational::from(BigInt::from(-1)),
                2,
            )
            .unwrap(),
        );
        // 1 - sqrt(2) < 0, so |x| = sqrt(2) - 1
        match x.abs_value().unwrap() {
            AbsValue::RealQuadratic(y) => {
                assert_eq!(y.sign().unwrap(), 1);
                assert_eq!(y.a, BigRational::from(BigInt::from(-1)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn random_scalar(rng: &mut ChaCha8Rng, spec: FieldSpec) -> Scalar {
        let n = rng.gen_range(-12i64..=12);
        let d = rng.gen_range(1i64..=9);
        match spec {
            FieldSpec::Rational => rat(n, d),
            FieldSpec::Quadratic(dd) => {
                let n2 = rng.gen_range(-12i64..=12);
                let d2 = rng.gen_range(1i64..=9);
                Scalar::Quad(
                    QuadraticNumber::new(
                        BigRational::new(BigInt::from(n), BigInt::from(d)),
                        BigRational::new(BigInt::from(n2), BigInt::from(d2)),
                        dd,
                    )
                    .unwrap(),
                )
            }
            FieldSpec::Padic { p, prec } => {
                let r = BigRational::new(BigInt::from(n), BigInt::from(d));
                Scalar::Padic(PadicScalar::from_rational(p, &r, prec).unwrap())
            }
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for spec in [FieldSpec::Rational, FieldSpec::Quadratic(-1), FieldSpec::Quadratic(5), FieldSpec::Padic { p: 5, prec: 16 }] {
            for _ in 0..1000 {
                let x = random_scalar(&mut rng, spec);
                let y = random_scalar(&mut rng, spec);
                let z = random_scalar(&mut rng, spec);
                // associativity and distributivity; p-adic adds can legitimately
                // exhaust precision on full cancellation, skip those draws
                let lhs = match x.add(&y).and_then(|s| s.add(&z)) {
                    Ok(v) => v,
                    Err(Error::PrecisionExhausted(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                let rhs = match y.add(&z).and_then(|s| x.add(&s)) {
                    Ok(v) => v,
                    Err(Error::PrecisionExhausted(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                assert_eq!(lhs, rhs);
                assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
                let dl = match y.add(&z).and_then(|s| x.mul(&s)) {
                    Ok(v) => v,
                    Err(Error::PrecisionExhausted(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                let dr = match x.mul(&y).unwrap().add(&x.mul(&z).unwrap()) {
                    Ok(v) => v,
                    Err(Error::PrecisionExhausted(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                assert_eq!(dl, dr);
                // multiplicative inverse
                if !x.is_zero() {
                    assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn padic_abs_multiplicative_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let spec = FieldSpec::Padic { p: 5, prec: 14 };
        for _ in 0..500 {
            let x = random_scalar(&mut rng, spec);
            let y = random_scalar(&mut rng, spec);
            let (AbsValue::Rational(ax), AbsValue::Rational(ay)) =
                (x.abs_value().unwrap(), y.abs_value().unwrap())
            else {
                unreachable!()
            };
            let AbsValue::Rational(axy) = x.mul(&y).unwrap().abs_value().unwrap() else {
                unreachable!()
            };
            assert_eq!(axy, ax * ay);
        }
    }

    #[test]
    fn complex_quadratic_abs_squared_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let x = random_scalar(&mut rng, FieldSpec::Quadratic(-7));
            let y = random_scalar(&mut rng, FieldSpec::Quadratic(-7));
            let (AbsValue::ModulusSquared(ax), AbsValue::ModulusSquared(ay)) =
                (x.abs_value().unwrap(), y.abs_value().unwrap())
            else {
                unreachable!()
            };
            let AbsValue::ModulusSquared(axy) = x.mul(&y).unwrap().abs_value().unwrap() else {
                unreachable!()
            };
            assert_eq!(axy, ax * ay);
        }
    }

    #[test]
    fn mixed_fields_refused() {
        let e = rat(1, 2).add(&gaussian(1, 1, 0, 1)).unwrap_err();
        assert!(matches!(e, Error::FieldMismatch(_, _)));
    }
}
