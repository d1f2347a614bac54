//! Continued fractions of real quadratic irrationals (Lagrange): exact
//! expansion, minimal periods, and convergent matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::QuadraticNumber;

use super::{Mat2, ModuliPoint, Regime};

/// Eventually periodic continued fraction: preperiod then a minimal period.
#[derive(Debug, Clone, PartialEq)]
pub struct CFExpansion {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
    /// The complete quotients entering the period, in order; used for exact
    /// tail matching.
    pub cycle_states: Vec<QuadraticNumber>,
}

impl CFExpansion {
    pub fn partial_quotient(&self, i: usize) -> &BigInt {
        if i < self.preperiod.len() {
            &self.preperiod[i]
        } else {
            &self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Convergent matrix M_m with tau = M_m(tau_m): the product
    /// A_0 A_1 ... A_{m-1} with A_i = [[a_i, 1], [1, 0]]; det = (-1)^m.
    pub fn convergent_matrix(&self, m: usize) -> Mat2 {
        let mut acc = Mat2::identity();
        for i in 0..m {
            let a = self.partial_quotient(i);
            let step = Mat2 {
                a: a.clone(),
                b: BigInt::from(1),
                c: BigInt::from(1),
                d: BigInt::from(0),
            };
            acc = acc.mul(&step);
        }
        acc
    }
}

impl fmt::Display for CFExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pre: Vec<String> = self.preperiod.iter().map(|x| x.to_string()).collect();
        let per: Vec<String> = self.period.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}; ({})]", pre.join(", "), per.join(", "))
    }
}

/// Exact Lagrange expansion of a real quadratic irrational. The first
/// repetition of a complete quotient closes the (automatically minimal)
/// period.
pub fn cf_expand(tau: &ModuliPoint) -> Result<CFExpansion> {
    if tau.regime() != Regime::RealQuadratic {
        return Err(Error::RegimeMismatch("continued fractions need a real quadratic point".into()));
    }
    let mut states: Vec<QuadraticNumber> = Vec::new();
    let mut quotients: Vec<BigInt> = Vec::new();
    let mut x = tau.tau.clone();
    for _ in 0..100_000 {
        if let Some(pos) = states.iter().position(|s| *s == x) {
            let preperiod = quotients[..pos].to_vec();
            let period = quotients[pos..].to_vec();
            let cycle_states = states[pos..].to_vec();
            return Ok(CFExpansion { preperiod, period, cycle_states });
        }
        let a = x.floor()?;
        states.push(x.clone());
        quotients.push(a.clone());
        let frac = x.sub(&QuadraticNumber::from_rational(BigRational::from(a), x.d))?;
        if frac.is_zero() {
            return Err(Error::Unsupported("rational input to cf_expand".into()));
        }
        x = frac.inv()?;
    }
    Err(Error::Internal("continued fraction failed to become periodic".into()))
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn sqrt_two() {
        let p = ModuliPoint::new(quad(0, 1, 1, 1, 2)).unwrap();
        let cf = cf_expand(&p).unwrap();
        assert_eq!(cf.preperiod, vec![big(1)]);
        assert_eq!(cf.period, vec![big(2)]);
    }

    #[test]
    fn golden_ratio_purely_periodic() {
        let p = ModuliPoint::new(quad(1, 2, 1, 2, 5)).unwrap();
        let cf = cf_expand(&p).unwrap();
        assert!(cf.preperiod.is_empty());
        assert_eq!(cf.period, vec![big(1)]);
    }

    #[test]
    fn shifted_sqrt_two() {
        // 1 + sqrt(2) = [2; (2)] purely periodic
        let p = ModuliPoint::new(quad(1, 1, 1, 1, 2)).unwrap();
        let cf = cf_expand(&p).unwrap();
        assert!(cf.preperiod.is_empty());
        assert_eq!(cf.period, vec![big(2)]);
    }

    #[test]
    fn sqrt_seven_longer_period() {
        let p = ModuliPoint::new(quad(0, 1, 1, 1, 7)).unwrap();
        let cf = cf_expand(&p).unwrap();
        assert_eq!(cf.preperiod, vec![big(2)]);
        assert_eq!(cf.period, vec![big(1), big(1), big(1), big(4)]);
    }

    #[test]
    fn partial_quotients_positive_after_first() {
        let p = ModuliPoint::new(quad(-7, 3, 5, 4, 3)).unwrap();
        let cf = cf_expand(&p).unwrap();
        for i in 1..cf.preperiod.len() + 2 * cf.period.len() {
            assert!(cf.partial_quotient(i) >= &big(1));
        }
    }

    #[test]
    fn convergent_matrix_identity() {
        let p = ModuliPoint::new(quad(0, 1, 1, 1, 2)).unwrap();
        let cf = cf_expand(&p).unwrap();
        // tau = M_m(tau_m) for several m
        let mut x = p.tau.clone();
        for m in 0..6usize {
            let mm = cf.convergent_matrix(m);
            assert_eq!(mm.apply(&x_state(&p, m)).unwrap(), p.tau);
            let _ = &mut x;
        }
    }

    fn x_state(p: &ModuliPoint, m: usize) -> QuadraticNumber {
        let mut x = p.tau.clone();
        for _ in 0..m {
            let a = x.floor().unwrap();
            let frac = x
                .sub(&QuadraticNumber::from_rational(BigRational::from(a), x.d))
                .unwrap();
            x = frac.inv().unwrap();
        }
        x
    }
}
