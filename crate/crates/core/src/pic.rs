//! The cohomological layer: the termwise solver for a(qz) - a(z) = g(z),
//! unit cocycles in factored form c z^k exp(g), their Picard classes
//! (degree, point of C*/q^Z), and exact small-divisor diagnostics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::scalars::{AbsValue, Scalar};
use crate::skew::AlgebraContext;

pub const DEFAULT_HEIGHT_CAP_BITS: u64 = 1 << 20;

/// A unit of the truncated algebra in factored form c * z^k * exp(g) with
/// g of zero constant term. The decomposition is unique for such units.
#[derive(Debug, Clone)]
pub struct UnitCocycle {
    pub c: Scalar,
    pub k: i64,
    pub g: LaurentSeries,
}

impl UnitCocycle {
    pub fn new(c: Scalar, k: i64, g: LaurentSeries) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroInput);
        }
        if g.ram() != 1 {
            return Err(Error::Unsupported("unit cocycles use integer exponents".into()));
        }
        match g.coeff_at(0) {
            Some(c0) if c0.is_zero() => Ok(UnitCocycle { c, k, g }),
            Some(_) => Err(Error::Unsupported("exp-part must have zero constant term".into())),
            None => Err(Error::EmptyWindow { lo: g.lo(), prec: g.prec() }),
        }
    }

    pub fn constant(c: Scalar, prec: i64) -> Result<Self> {
        let field = c.field_spec();
        Self::new(c, 0, LaurentSeries::zero_at(field, 1, prec))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Self::new(self.c.mul(&rhs.c)?, self.k + rhs.k, self.g.add(&rhs.g)?)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.c.inv()?, -self.k, self.g.neg())
    }

    /// Expand to an honest series unit c z^k exp(g) at the window.
    pub fn expand(&self) -> Result<LaurentSeries> {
        let e = self.g.exp()?;
        e.scalar_mul(&self.c).map(|s| s.shift(self.k))
    }
}

impl fmt::Display for UnitCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) * z^{} * exp({})", self.c, self.k, self.g)
    }
}

fn scalar_height_bits(s: &Scalar) -> u64 {
    fn rat_bits(r: &BigRational) -> u64 {
        r.numer().bits() + r.denom().bits()
    }
    match s {
        Scalar::Rat(r) => rat_bits(r),
        Scalar::Quad(q) => rat_bits(&q.a) + rat_bits(&q.b),
        Scalar::Padic(_) => 0,
    }
}

/// Solve a(qz) - a(z) = g(z) - g_0 termwise: a_n = g_n / (q^n - 1) for
/// n != 0, a_0 = 0. Returns (a, obstruction g_0). Coefficient heights are
/// capped so that small-divisor growth fails loudly instead of stalling.
pub fn solve_additive(
    ctx: &Arc<AlgebraContext>,
    g: &LaurentSeries,
    height_cap_bits: u64,
) -> Result<(LaurentSeries, Scalar)> {
    if g.ram() != 1 {
        return Err(Error::Unsupported("cocycle solver uses integer exponents".into()));
    }
    let field = ctx.field;
    let obstruction = g
        .coeff_at(0)
        .ok_or(Error::EmptyWindow { lo: g.lo(), prec: g.prec() })?;
    let one = Scalar::one(field);
    let mut terms: Vec<(i64, Scalar)> = Vec::new();
    for (n, c) in g.iter_terms() {
        if n == 0 {
            continue;
        }
        let qn = ctx.q_pow(n)?;
        let div = qn.sub(&one)?;
        if div.is_zero() {
            return Err(Error::RootOfUnity(n.unsigned_abs() as u32));
        }
        let a_n = c.div(&div)?;
        if scalar_height_bits(&a_n) > height_cap_bits {
            return Err(Error::HeightCap(height_cap_bits));
        }
        terms.push((n, a_n));
    }
    let a = LaurentSeries::from_terms(field, 1, &terms, g.prec())?;
    Ok((a, obstruction))
}

/// a(qz) - a(z), the coboundary of a series.
pub fn additive_coboundary(ctx: &Arc<AlgebraContext>, a: &LaurentSeries) -> Result<LaurentSeries> {
    ctx.sigma_pow(a, 1)?.sub(a)
}

/// Winding-number degree of a unit cocycle.
pub fn degree(u: &UnitCocycle) -> i64 {
    u.k
}

/// The multiplicative coboundary h(qz)/h(z) of the unit h = c z^m exp(b),
/// expressed as a unit cocycle (q^m, 0, b(qz) - b(z)).
pub fn unit_coboundary(
    ctx: &Arc<AlgebraContext>,
    m: i64,
    b: &LaurentSeries,
) -> Result<UnitCocycle> {
    let qm = ctx.q_pow(m)?;
    UnitCocycle::new(qm, 0, additive_coboundary(ctx, b)?)
}

/// Picard class of a rank-one object presented by a unit cocycle: the
/// degree and the C*/q^Z point; the exp-part is a coboundary and dies.
#[derive(Debug, Clone)]
pub struct PicardClass {
    pub deg: i64,
    pub point: Scalar,
    pub orbit_bound: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassEq {
    Equal,
    Unequal,
    UndecidedAtBound,
}

pub fn picard_class(ctx: &Arc<AlgebraContext>, u: &UnitCocycle) -> Result<PicardClass> {
    // the exp-part has zero constant term, so it is solvable: check, then drop
    let (_, obstruction) = solve_additive(ctx, &u.g, DEFAULT_HEIGHT_CAP_BITS)?;
    debug_assert!(obstruction.is_zero());
    Ok(PicardClass { deg: u.k, point: u.c.clone(), orbit_bound: ctx.orbit_bound })
}

impl PicardClass {
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        Ok(PicardClass {
            deg: self.deg + rhs.deg,
            point: self.point.mul(&rhs.point)?,
            orbit_bound: self.orbit_bound.max(rhs.orbit_bound),
        })
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(PicardClass {
            deg: -self.deg,
            point: self.point.inv()?,
            orbit_bound: self.orbit_bound,
        })
    }

    pub fn eq_class(&self, rhs: &Self, ctx: &Arc<AlgebraContext>) -> Result<ClassEq> {
        if self.deg != rhs.deg {
            return Ok(ClassEq::Unequal);
        }
        let bound = self.orbit_bound.max(rhs.orbit_bound);
        if ctx.orbit_exponent(&self.point, &rhs.point, bound)?.is_some() {
            Ok(ClassEq::Equal)
        } else {
            Ok(ClassEq::UndecidedAtBound)
        }
    }
}

impl fmt::Display for PicardClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, orbit({})) [orbit M={}]", self.deg, self.point, self.orbit_bound)
    }
}

/// Exact table of |q^n - 1| (or its square for complex quadratic fields)
/// plus a floating-point Liouville exponent fit. The fit is the single
/// inexact step in the crate and feeds no algorithmic decision.
#[derive(Debug, Clone)]
pub struct DivisorDiagnostics {
    pub values: Vec<BigRational>,
    pub squared: bool,
    pub fitted_exponent: f64,
}

pub fn divisor_diagnostics(q: &Scalar, n_max: u32) -> Result<DivisorDiagnostics> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    let one = Scalar::one(q.field_spec());
    let mut values = Vec::with_capacity(n_max as usize);
    let mut squared = false;
    let mut pw = one.clone();
    for n in 1..=n_max {
        pw = pw.mul(q)?;
        let d = pw.sub(&one)?;
        if d.is_zero() {
            return Err(Error::RootOfUnity(n));
        }
        match d.abs_value()? {
            AbsValue::Rational(r) => values.push(r),
            AbsValue::ModulusSquared(r) => {
                squared = true;
                values.push(r);
            }
            AbsValue::RealQuadratic(_) => {
                return Err(Error::Unsupported(
                    "diagnostics need an exactly rational absolute value".into(),
                ));
            }
        }
        if values.last().map(|v| v.is_zero()).unwrap_or(false) {
            return Err(Error::RootOfUnity(n));
        }
    }
    // least squares of log|q^n - 1| = log C - L log n
    let mut sx = 0.0f64;
    let mut sy = 0.0f64;
    let mut sxx = 0.0f64;
    let mut sxy = 0.0f64;
    let m = values.len() as f64;
    for (i, v) in values.iter().enumerate() {
        let x = ((i + 1) as f64).ln();
        let mut y = rational_log(v);
        if squared {
            y /= 2.0;
        }
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = if m as usize > 1 { (m * sxy - sx * sy) / (m * sxx - sx * sx) } else { 0.0 };
    Ok(DivisorDiagnostics { values, squared, fitted_exponent: -slope })
}

pub fn rational_log(r: &BigRational) -> f64 {
    // ln of a positive rational through bit-length scaling, safe for huge values
    fn ln_big(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits <= 52 {
            return n.to_f64().unwrap_or(1.0).ln();
        }
        let shift = bits - 52;
        let top: BigInt = n >> shift;
        top.to_f64().unwrap_or(1.0).ln() + (shift as f64) * std::f64::consts::LN_2
    }
    ln_big(&r.numer().abs()) - ln_big(&r.denom().abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::test_support::random_series;
    use crate::scalars::{FieldSpec, QuadraticNumber};
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx_q2(prec: i64) -> Arc<AlgebraContext> {
        AlgebraContext::new(Scalar::from_integer(FieldSpec::Rational, 2), prec).unwrap()
    }

    fn unit_circle_ctx(prec: i64) -> Arc<AlgebraContext> {
        let q = Scalar::Quad(
            QuadraticNumber::new(
                BigRational::new(BigInt::from(3), BigInt::from(5)),
                BigRational::new(BigInt::from(4), BigInt::from(5)),
                -1,
            )
            .unwrap(),
        );
        AlgebraContext::new(q, prec).unwrap()
    }

    #[test]
    fn solver_on_two_terms() {
        let ctx = ctx_q2(16);
        let f = ctx.field;
        let g = LaurentSeries::from_terms(
            f,
            1,
            &[(1, Scalar::one(f)), (-1, Scalar::one(f))],
            16,
        )
        .unwrap();
        let (a, obs) = solve_additive(&ctx, &g, DEFAULT_HEIGHT_CAP_BITS).unwrap();
        assert!(obs.is_zero());
        // a_1 = 1/(q-1) = 1, a_{-1} = 1/(q^{-1}-1) = -2
        assert_eq!(a.coeff_at(1).unwrap(), Scalar::one(f));
        assert_eq!(a.coeff_at(-1).unwrap(), Scalar::from_integer(f, -2));
        let back = additive_coboundary(&ctx, &a).unwrap();
        assert!(back.is_equal_at_prec(&g));
    }

    #[test]
    fn constants_are_the_obstruction() {
        let ctx = ctx_q2(16);
        let g = LaurentSeries::one(ctx.field, 16);
        let (a, obs) = solve_additive(&ctx, &g, DEFAULT_HEIGHT_CAP_BITS).unwrap();
        assert!(a.is_zero_at_prec());
        assert!(obs.is_one());
    }

    #[test]
    fn roundtrip_on_random_cocycles() {
        let ctx = ctx_q2(32);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let g = random_series(&mut rng, ctx.field, -6, 32);
            let (a, obs) = solve_additive(&ctx, &g, DEFAULT_HEIGHT_CAP_BITS).unwrap();
            let g0 = LaurentSeries::constant(ctx.field, obs.clone(), g.prec());
            let want = g.sub(&g0).unwrap();
            let got = additive_coboundary(&ctx, &a).unwrap();
            assert!(got.is_equal_at_prec(&want));
            if let Some(c0) = g.coeff_at(0) {
                assert_eq!(obs, c0);
            }
        }
    }

    #[test]
    fn obstruction_is_linear() {
        let ctx = ctx_q2(24);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let g1 = random_series(&mut rng, ctx.field, -4, 24);
            let g2 = random_series(&mut rng, ctx.field, -4, 24);
            let (_, o1) = solve_additive(&ctx, &g1, DEFAULT_HEIGHT_CAP_BITS).unwrap();
            let (_, o2) = solve_additive(&ctx, &g2, DEFAULT_HEIGHT_CAP_BITS).unwrap();
            let (_, osum) = solve_additive(&ctx, &g1.add(&g2).unwrap(), DEFAULT_HEIGHT_CAP_BITS).unwrap();
            assert_eq!(osum, o1.add(&o2).unwrap());
        }
    }

    #[test]
    fn degree_reads_the_winding() {
        let ctx = ctx_q2(16);
        let f = ctx.field;
        let g = LaurentSeries::from_terms(f, 1, &[(1, Scalar::from_integer(f, 2))], 16).unwrap();
        let u = UnitCocycle::new(Scalar::from_integer(f, 7), 3, g).unwrap();
        assert_eq!(degree(&u), 3);
        let c = UnitCocycle::constant(Scalar::from_integer(f, 5), 16).unwrap();
        assert_eq!(degree(&c), 0);
        let prod = u.mul(&c).unwrap();
        assert_eq!(degree(&prod), 3);
    }

    #[test]
    fn picard_class_examples() {
        let ctx = ctx_q2(16);
        let f = ctx.field;
        // u = z: class (1, orbit(1))
        let z = UnitCocycle::new(
            Scalar::one(f),
            1,
            LaurentSeries::zero_at(f, 1, 16),
        )
        .unwrap();
        let cz = picard_class(&ctx, &z).unwrap();
        assert_eq!(cz.deg, 1);
        assert!(cz.point.is_one());
        // u = q: the coboundary of h = z, so its class is the identity
        let uq = UnitCocycle::constant(ctx.q.clone(), 16).unwrap();
        let cq = picard_class(&ctx, &uq).unwrap();
        assert_eq!(cq.deg, 0);
        let ident = PicardClass { deg: 0, point: Scalar::one(f), orbit_bound: ctx.orbit_bound };
        assert_eq!(cq.eq_class(&ident, &ctx).unwrap(), ClassEq::Equal);
        // and it literally is a unit coboundary
        let b = LaurentSeries::zero_at(f, 1, 16);
        let cob = unit_coboundary(&ctx, 1, &b).unwrap();
        assert_eq!(cob.c, ctx.q);
        assert_eq!(cob.k, 0);
    }

    #[test]
    fn class_group_operations() {
        let ctx = ctx_q2(16);
        let f = ctx.field;
        let a = PicardClass { deg: 1, point: Scalar::one(f), orbit_bound: 24 };
        let b = PicardClass { deg: -1, point: Scalar::from_integer(f, 3), orbit_bound: 24 };
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.deg, 0);
        assert_eq!(ab.point, Scalar::from_integer(f, 3));
        // inverse of (0, q^2) is the identity class within M >= 2
        let c = PicardClass { deg: 0, point: ctx.q_pow(2).unwrap(), orbit_bound: 24 };
        let ci = c.inv().unwrap();
        let ident = PicardClass { deg: 0, point: Scalar::one(f), orbit_bound: 24 };
        assert_eq!(ci.eq_class(&ident, &ctx).unwrap(), ClassEq::Equal);
        // beyond the bound: honestly undecided
        let far = PicardClass { deg: 0, point: ctx.q_pow(30).unwrap(), orbit_bound: 24 };
        assert_eq!(far.eq_class(&ident, &ctx).unwrap(), ClassEq::UndecidedAtBound);
    }

    #[test]
    fn picard_is_multiplicative_on_random_pairs() {
        let ctx = ctx_q2(16);
        let f = ctx.field;
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let g1 = random_series(&mut rng, f, 1, 8).assume_exact_to(16);
            let g2 = random_series(&mut rng, f, 1, 8).assume_exact_to(16);
            let u1 = UnitCocycle::new(Scalar::from_integer(f, 3), 2, g1).unwrap();
            let u2 = UnitCocycle::new(Scalar::from_integer(f, -5), -1, g2).unwrap();
            let lhs = picard_class(&ctx, &u1.mul(&u2).unwrap()).unwrap();
            let rhs = picard_class(&ctx, &u1)
                .unwrap()
                .mul(&picard_class(&ctx, &u2).unwrap())
                .unwrap();
            assert_eq!(lhs.eq_class(&rhs, &ctx).unwrap(), ClassEq::Equal);
        }
    }

    #[test]
    fn degree_surjective_on_small_range() {
        let ctx = ctx_q2(16);
        let f = ctx.field;
        for k in -5..=5i64 {
            let u = UnitCocycle::new(Scalar::one(f), k, LaurentSeries::zero_at(f, 1, 16)).unwrap();
            assert_eq!(picard_class(&ctx, &u).unwrap().deg, k);
        }
    }

    #[test]
    fn diagnostics_growing_divisors() {
        let q = Scalar::from_integer(FieldSpec::Rational, 2);
        let d = divisor_diagnostics(&q, 12).unwrap();
        assert!(!d.squared);
        for (i, v) in d.values.iter().enumerate() {
            let expect = BigRational::from(BigInt::from((1i64 << (i + 1)) - 1));
            assert_eq!(*v, expect);
        }
        assert!(d.fitted_exponent < 0.0); // growing, not small
    }

    #[test]
    fn diagnostics_unit_circle_small_divisors() {
        let q = Scalar::Quad(
            QuadraticNumber::new(
                BigRational::new(BigInt::from(3), BigInt::from(5)),
                BigRational::new(BigInt::from(4), BigInt::from(5)),
                -1,
            )
            .unwrap(),
        );
        let d = divisor_diagnostics(&q, 60).unwrap();
        assert!(d.squared);
        assert!(d.values.iter().all(|v| !v.is_zero()));
        // |q - 1|^2 = (3/5-1)^2 + (4/5)^2 = 4/25 + 16/25 = 4/5
        assert_eq!(d.values[0], BigRational::new(BigInt::from(4), BigInt::from(5)));
    }

    #[test]
    fn diagnostics_root_of_unity_fails() {
        let i = Scalar::Quad(
            QuadraticNumber::new(BigRational::zero(), BigRational::one(), -1).unwrap(),
        );
        let e = divisor_diagnostics(&i, 10).unwrap_err();
        assert_eq!(e, Error::RootOfUnity(4));
    }

    #[test]
    fn small_divisor_height_growth_is_observable() {
        // with q on the unit circle the solution coefficients grow; a tiny
        // cap triggers the loud failure
        let ctx = unit_circle_ctx(64);
        let f = ctx.field;
        let terms: Vec<(i64, Scalar)> = (1..40).map(|n| (n, Scalar::one(f))).collect();
        let g = LaurentSeries::from_terms(f, 1, &terms, 64).unwrap();
        let e = solve_additive(&ctx, &g, 64).unwrap_err();
        assert!(matches!(e, Error::HeightCap(_)));
        // the default cap is far away
        assert!(solve_additive(&ctx, &g, DEFAULT_HEIGHT_CAP_BITS).is_ok());
    }
}
