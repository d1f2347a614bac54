//! Exact reduction of upper-half quadratic points into the fundamental
//! domain |Re| <= 1/2, |tau| >= 1, with the classical boundary convention
//! (left edge and left arc kept).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{Mat2, ModuliPoint, Regime};

/// Reduce an upper-half point; returns (tau*, g) with tau* = g(tau) in the
/// fundamental domain, all comparisons exact.
pub fn reduce_upper(tau: &ModuliPoint) -> Result<(ModuliPoint, Mat2)> {
    if tau.regime() != Regime::UpperHalf {
        return Err(Error::RegimeMismatch(
            "reduce_upper needs an upper-half point (use the continued-fraction path for real ones)"
                .into(),
        ));
    }
    let mut t = tau.tau.clone();
    let mut g = Mat2::identity();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for _ in 0..100_000 {
        // shift the real part into [-1/2, 1/2): n = floor(Re + 1/2)
        let n = (&t.a + &half).floor().to_integer();
        if !n.is_zero() {
            let shift = Mat2::t_power(&(-n.clone()));
            t = shift.apply(&t)?;
            g = shift.mul(&g);
        }
        let norm = t.modulus_squared()?;
        if norm < BigRational::one() {
            let s = Mat2::s();
            t = s.apply(&t)?;
            g = s.mul(&g);
            continue;
        }
        if norm == BigRational::one() && t.a.is_positive() {
            // right half of the unit arc: keep its inversion image instead
            let s = Mat2::s();
            t = s.apply(&t)?;
            g = s.mul(&g);
            // the image has Re in [-1/2, 0], already shifted
        }
        let point = ModuliPoint::new(t.clone())?;
        debug_assert_eq!(g.apply(&tau.tau)?, t);
        return Ok((point, g));
    }
    Err(Error::Internal("fundamental-domain reduction did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;
    use num_traits::Zero;

    #[test]
    fn already_reduced() {
        let p = ModuliPoint::new(quad(0, 1, 2, 1, -1)).unwrap(); // 2i
        let (r, g) = reduce_upper(&p).unwrap();
        assert_eq!(r, p);
        assert_eq!(g, Mat2::identity());
    }

    #[test]
    fn translation_only() {
        let p = ModuliPoint::new(quad(5, 1, 2, 1, -1)).unwrap(); // 5 + 2i
        let (r, g) = reduce_upper(&p).unwrap();
        assert_eq!(r.tau, quad(0, 1, 2, 1, -1));
        assert_eq!(g, Mat2::t_power(&BigInt::from(-5)));
    }

    #[test]
    fn interior_point_with_inversion() {
        let p = ModuliPoint::new(quad(1, 2, 1, 2, -1)).unwrap(); // (1+i)/2
        let (r, g) = reduce_upper(&p).unwrap();
        // witness identity holds exactly and the image is in the domain
        assert_eq!(g.apply(&p.tau).unwrap(), r.tau);
        assert!(r.abs_squared().unwrap() >= BigRational::one());
        let re = r.tau.a.clone();
        assert!(re.abs() <= BigRational::new(BigInt::one(), BigInt::from(2)));
        assert_eq!(g.det(), BigInt::one());
    }

    #[test]
    fn boundary_conventions() {
        // Re = +1/2 normalizes to -1/2
        let p = ModuliPoint::new(quad(1, 2, 3, 1, -1)).unwrap();
        let (r, _) = reduce_upper(&p).unwrap();
        assert_eq!(r.tau.a, q(-1, 2));
        // |tau| = 1 with Re > 0 maps to the left arc: try (3+4i)/5... |.| = 1
        let p2 = ModuliPoint::new(quad(3, 5, 4, 5, -1)).unwrap();
        let (r2, g2) = reduce_upper(&p2).unwrap();
        assert_eq!(g2.apply(&p2.tau).unwrap(), r2.tau);
        assert!(r2.abs_squared().unwrap() >= BigRational::one());
        assert!(!r2.tau.a.is_positive() || r2.abs_squared().unwrap() > BigRational::one());
    }

    #[test]
    fn real_point_rejected() {
        let p = ModuliPoint::new(quad(0, 1, 1, 1, 2)).unwrap();
        assert!(matches!(reduce_upper(&p), Err(Error::RegimeMismatch(_))));
        let lower = ModuliPoint::new(quad(0, 1, -1, 1, -1)).unwrap();
        assert!(reduce_upper(&lower).is_err());
    }

    #[test]
    fn random_points_land_in_domain() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let d = [-1i64, -2, -3, -7][rng.gen_range(0..4)];
            let a = q(rng.gen_range(-30i64..=30), rng.gen_range(1i64..=7));
            let b = q(rng.gen_range(1i64..=30), rng.gen_range(1i64..=7));
            let tau = crate::scalars::QuadraticNumber::new(a, b, d).unwrap();
            let p = ModuliPoint::new(tau).unwrap();
            let (r, g) = reduce_upper(&p).unwrap();
            assert_eq!(g.apply(&p.tau).unwrap(), r.tau);
            assert_eq!(g.det(), BigInt::one());
            assert!(r.abs_squared().unwrap() >= BigRational::one());
            let re = r.tau.a.clone();
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            assert!(re >= -half.clone() && re < half || (re == -half.clone() && true));
            assert!(!re.abs().gt(&half));
        }
    }
}
