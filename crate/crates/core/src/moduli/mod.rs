//! Moduli of (quasi-)lattices in the plane: fundamental-domain reduction of
//! upper-half points, continued-fraction equivalence on the real locus,
//! similarity of rank-2 subgroups, and stabilizer groups via unit
//! computations in quadratic orders.

pub mod cf;
pub mod equiv;
pub mod reduce;
pub mod stab;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::QuadraticNumber;

pub use cf::{cf_expand, CFExpansion};
pub use equiv::{brute_force_equivalent, lattice_similar, sl2_ball, sl2_equivalent, EquivOutcome, Similarity};
pub use reduce::reduce_upper;
pub use stab::{isom_group_description, stabilizer, IsomGroupDescription, StabilizerDescription};

/// Integer 2x2 matrix acting by fractional transformations; determinant
/// is tracked exactly (+-1 for the group elements used here).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }

    /// Translation tau -> tau + n.
    pub fn t_power(n: &BigInt) -> Self {
        Mat2 { a: BigInt::one(), b: n.clone(), c: BigInt::zero(), d: BigInt::one() }
    }

    /// Inversion tau -> -1/tau.
    pub fn s() -> Self {
        Mat2 { a: BigInt::zero(), b: -BigInt::one(), c: BigInt::one(), d: BigInt::zero() }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    /// Inverse for det = +-1.
    pub fn inv_unimodular(&self) -> Result<Self> {
        let det = self.det();
        if det.abs() != BigInt::one() {
            return Err(Error::Unsupported("inverse needs det +-1".into()));
        }
        let m = Mat2 {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        };
        if det == BigInt::one() {
            Ok(m)
        } else {
            Ok(Mat2 { a: -m.a, b: -m.b, c: -m.c, d: -m.d })
        }
    }

    /// Fractional action (a tau + b) / (c tau + d).
    pub fn apply(&self, tau: &QuadraticNumber) -> Result<QuadraticNumber> {
        let d = tau.d;
        let lift = |n: &BigInt| QuadraticNumber::from_rational(BigRational::from(n.clone()), d);
        let num = lift(&self.a).mul(tau)?.add(&lift(&self.b))?;
        let den = lift(&self.c).mul(tau)?.add(&lift(&self.d))?;
        num.div(&den)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Which part of the moduli picture a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    UpperHalf,
    LowerHalf,
    RealQuadratic,
}

/// An exact moduli point: a quadratic irrationality (d = -1 covers the
/// Gaussian-rational complex values).
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPoint {
    pub tau: QuadraticNumber,
}

impl ModuliPoint {
    pub fn new(tau: QuadraticNumber) -> Result<Self> {
        if tau.is_rational() {
            return Err(Error::Unsupported("moduli points must be irrational".into()));
        }
        Ok(ModuliPoint { tau })
    }

    pub fn regime(&self) -> Regime {
        if self.tau.d > 0 {
            Regime::RealQuadratic
        } else if self.tau.b.is_positive() {
            Regime::UpperHalf
        } else {
            Regime::LowerHalf
        }
    }

    /// Complex conjugate (flips upper/lower half).
    pub fn conj(&self) -> Self {
        ModuliPoint { tau: self.tau.conj() }
    }

    /// |tau|^2 for complex points, exactly rational.
    pub fn abs_squared(&self) -> Result<BigRational> {
        self.tau.modulus_squared()
    }
}

impl fmt::Display for ModuliPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tau)
    }
}

/// A rank-2 free abelian subgroup of the plane given by two exact
/// generators in one quadratic field.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiLattice {
    pub omega1: QuadraticNumber,
    pub omega2: QuadraticNumber,
}

impl QuasiLattice {
    pub fn new(omega1: QuadraticNumber, omega2: QuadraticNumber) -> Result<Self> {
        if omega1.is_zero() || omega2.is_zero() {
            return Err(Error::ZeroInput);
        }
        if omega1.d != omega2.d {
            return Err(Error::FieldMismatch(
                format!("Q(sqrt({}))", omega1.d),
                format!("Q(sqrt({}))", omega2.d),
            ));
        }
        let ratio = omega2.div(&omega1)?;
        if ratio.is_rational() {
            return Err(Error::Unsupported(
                "generators are dependent: omega2/omega1 is rational".into(),
            ));
        }
        Ok(QuasiLattice { omega1, omega2 })
    }

    /// The ratio omega2/omega1 as a moduli point.
    pub fn ratio(&self) -> Result<ModuliPoint> {
        ModuliPoint::new(self.omega2.div(&self.omega1)?)
    }

    /// Does alpha satisfy alpha L = L? Checked by expressing alpha omega_i in
    /// the Z-basis with integer coordinates and determinant +-1.
    pub fn is_multiplier(&self, alpha: &QuadraticNumber) -> Result<bool> {
        let Some(m) = self.multiplier_matrix(alpha)? else {
            return Ok(false);
        };
        Ok(m.det().abs() == BigInt::one())
    }

    /// Integer coordinates of (alpha omega1, alpha omega2) in the basis, if
    /// they are integral.
    pub fn multiplier_matrix(&self, alpha: &QuadraticNumber) -> Result<Option<Mat2>> {
        let mut cols = Vec::new();
        for w in [&self.omega1, &self.omega2] {
            let aw = alpha.mul(w)?;
            // solve aw = x omega1 + y omega2 over Q: 2x2 system on (1, sqrt d)
            let det = &self.omega1.a * &self.omega2.b - &self.omega2.a * &self.omega1.b;
            if det.is_zero() {
                return Err(Error::Unsupported("degenerate basis".into()));
            }
            let x = (&aw.a * &self.omega2.b - &self.omega2.a * &aw.b) / &det;
            let y = (&self.omega1.a * &aw.b - &aw.a * &self.omega1.b) / &det;
            if !x.denom().is_one() || !y.denom().is_one() {
                return Ok(None);
            }
            cols.push((x.to_integer(), y.to_integer()));
        }
        Ok(Some(Mat2 {
            a: cols[0].0.clone(),
            b: cols[1].0.clone(),
            c: cols[0].1.clone(),
            d: cols[1].1.clone(),
        }))
    }
}

impl fmt::Display for QuasiLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.omega1, self.omega2)
    }
}

#[cfg(test)]
pub mod test_support {
    use super::*;

    pub fn q(n: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(den))
    }

    pub fn quad(an: i64, ad: i64, bn: i64, bd: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::new(q(an, ad), q(bn, bd), d).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn mat2_group_ops() {
        let s = Mat2::s();
        let t = Mat2::t_power(&BigInt::from(3));
        let st = s.mul(&t);
        assert_eq!(st.det(), BigInt::one());
        let inv = st.inv_unimodular().unwrap();
        assert_eq!(st.mul(&inv), Mat2::identity());
        // action: S(2i) = -1/(2i) = i/2
        let two_i = quad(0, 1, 2, 1, -1);
        let img = s.apply(&two_i).unwrap();
        assert_eq!(img, quad(0, 1, 1, 2, -1));
    }

    #[test]
    fn regimes() {
        let upper = ModuliPoint::new(quad(1, 2, 1, 1, -1)).unwrap();
        assert_eq!(upper.regime(), Regime::UpperHalf);
        let lower = upper.conj();
        assert_eq!(lower.regime(), Regime::LowerHalf);
        let real = ModuliPoint::new(quad(0, 1, 1, 1, 2)).unwrap();
        assert_eq!(real.regime(), Regime::RealQuadratic);
        assert!(ModuliPoint::new(quad(3, 1, 0, 1, 2)).is_err());
    }

    #[test]
    fn multiplier_check() {
        // L = <1, i>: i is a multiplier, 2i is not (index 4), 1/2 is not
        let l = QuasiLattice::new(quad(1, 1, 0, 1, -1), quad(0, 1, 1, 1, -1)).unwrap();
        assert!(l.is_multiplier(&quad(0, 1, 1, 1, -1)).unwrap());
        assert!(!l.is_multiplier(&quad(0, 1, 2, 1, -1)).unwrap());
        assert!(!l.is_multiplier(&quad(1, 2, 0, 1, -1)).unwrap());
    }
}
