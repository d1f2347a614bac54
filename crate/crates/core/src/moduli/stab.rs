//! Stabilizer groups of quasi-lattices: the unit group of the multiplier
//! order. Imaginary quadratic ratios have finite (torsion) stabilizers;
//! real quadratic ones are {+-1} times the fundamental-unit powers, found
//! through the continued-fraction automorph.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::QuadraticNumber;

use super::cf::cf_expand;
use super::{Mat2, QuasiLattice, Regime};

#[derive(Debug, Clone)]
pub struct StabilizerDescription {
    /// Discriminant of the multiplier order.
    pub discriminant: BigInt,
    /// Conductor relative to the maximal order.
    pub conductor: BigInt,
    pub torsion_order: u32,
    /// Generators of the unit group (torsion generator; plus the fundamental
    /// unit in the real case).
    pub generators: Vec<QuadraticNumber>,
    /// Exact norm of the fundamental unit (+1 or -1), real case only.
    pub fundamental_unit_norm: Option<i32>,
}

impl fmt::Display for StabilizerDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "order disc {} (conductor {}), torsion {}",
            self.discriminant, self.conductor, self.torsion_order
        )?;
        if !self.generators.is_empty() {
            let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
            write!(f, ", generators {{{}}}", gens.join(", "))?;
        }
        if let Some(n) = self.fundamental_unit_norm {
            write!(f, ", N(fundamental unit) = {n}")?;
        }
        Ok(())
    }
}

/// Primitive integer minimal polynomial A t^2 + B t + C of a quadratic
/// irrational, A > 0.
fn minimal_poly(tau: &QuadraticNumber) -> (BigInt, BigInt, BigInt) {
    // t^2 - 2x t + (x^2 - d y^2)
    let two_x = BigRational::from(BigInt::from(2)) * &tau.a;
    let norm = tau.norm();
    let den = two_x.denom().lcm(norm.denom());
    let a = den.clone();
    let b = (-two_x * BigRational::from(den.clone())).to_integer();
    let c = (norm * BigRational::from(den)).to_integer();
    let g = a.gcd(&b).gcd(&c);
    (a / &g, b / &g, c / &g)
}

/// The multiplier order of <1, tau> is Z + Z(n0 tau) where n0 is minimal
/// with A | n0 B and A | n0 C.
fn order_generator(tau: &QuadraticNumber) -> (QuadraticNumber, BigInt, BigInt, BigInt) {
    let (a, b, c) = minimal_poly(tau);
    let g2 = a.gcd(&b.gcd(&c).max(BigInt::one()));
    let gbc = b.gcd(&c);
    let g = a.gcd(&gbc);
    let n0 = &a / &g;
    let omega = tau
        .mul(&QuadraticNumber::from_rational(BigRational::from(n0.clone()), tau.d))
        .expect("same field");
    let _ = g2;
    // disc of Z[omega]: Tr(omega)^2 - 4 N(omega) = n0^2 (B^2 - 4AC) / A^2
    let disc = (&n0 * &n0) * (&b * &b - BigInt::from(4) * &a * &c) / (&a * &a);
    (omega, n0, disc, a)
}

fn fundamental_discriminant(d: i64) -> BigInt {
    if (d % 4 + 4) % 4 == 1 {
        BigInt::from(d)
    } else {
        BigInt::from(4 * d)
    }
}

/// Stabilizer of a quasi-lattice: all alpha with alpha L = L.
pub fn stabilizer(l: &QuasiLattice) -> Result<StabilizerDescription> {
    let ratio = l.ratio()?;
    let tau = &ratio.tau;
    let (omega, _n0, disc, _a) = order_generator(tau);
    let dk = fundamental_discriminant(tau.d);
    let f2 = &disc / &dk;
    let conductor = integer_sqrt_exact(&f2)
        .ok_or_else(|| Error::Internal("discriminant is not conductor^2 * d_K".into()))?;
    let field_one = QuadraticNumber::one(tau.d);
    let tr = omega.add(&omega.conj())?.a.to_integer();
    let nm = omega.norm().to_integer();

    if ratio.regime() == Regime::RealQuadratic {
        // fundamental unit from the continued-fraction automorph of the
        // purely periodic tail state
        let cf = cf_expand(&ratio)?;
        let w = cf.cycle_states[0].clone();
        let mut m = Mat2::identity();
        for a_i in &cf.period {
            m = m.mul(&Mat2 {
                a: a_i.clone(),
                b: BigInt::one(),
                c: BigInt::one(),
                d: BigInt::zero(),
            });
        }
        // epsilon = c w + d from the bottom row of the automorph
        let lift = |n: &BigInt| QuadraticNumber::from_rational(BigRational::from(n.clone()), tau.d);
        let mut eps = lift(&m.c).mul(&w)?.add(&lift(&m.d))?;
        // canonical representative > 1
        for cand in [eps.clone(), eps.neg(), eps.inv()?, eps.inv()?.neg()] {
            if cand.sub(&field_one)?.sign()? > 0 {
                eps = cand;
                break;
            }
        }
        if !l.is_multiplier(&eps)? {
            return Err(Error::Internal("fundamental unit fails the lattice test".into()));
        }
        let n_eps = eps.norm();
        let norm_sign = if n_eps == BigRational::one() { 1 } else { -1 };
        return Ok(StabilizerDescription {
            discriminant: disc,
            conductor,
            torsion_order: 2,
            generators: vec![field_one.neg(), eps],
            fundamental_unit_norm: Some(norm_sign),
        });
    }

    // imaginary case: enumerate the finitely many units of Z + Z omega
    let mut units: Vec<QuadraticNumber> = Vec::new();
    for m in -2i64..=2 {
        for n in -2i64..=2 {
            if m == 0 && n == 0 {
                continue;
            }
            // N(m + n omega) = m^2 + m n Tr + n^2 N
            let val = BigInt::from(m * m) + BigInt::from(m * n) * &tr + BigInt::from(n * n) * &nm;
            if val.is_one() {
                let alpha = QuadraticNumber::from_rational(BigRational::from(BigInt::from(m)), tau.d)
                    .add(&omega.mul(&QuadraticNumber::from_rational(
                        BigRational::from(BigInt::from(n)),
                        tau.d,
                    ))?)?;
                units.push(alpha);
            }
        }
    }
    let torsion = units.len() as u32;
    // pick a generator of maximal multiplicative order
    let mut best = field_one.neg();
    let mut best_order = 2u32;
    for u in &units {
        let mut pw = u.clone();
        let mut ord = 1u32;
        while pw != field_one {
            pw = pw.mul(u)?;
            ord += 1;
            if ord > 12 {
                break;
            }
        }
        if ord > best_order {
            best_order = ord;
            best = u.clone();
        }
    }
    if !l.is_multiplier(&best)? {
        return Err(Error::Internal("torsion unit fails the lattice test".into()));
    }
    Ok(StabilizerDescription {
        discriminant: disc,
        conductor,
        torsion_order: torsion,
        generators: vec![best],
        fundamental_unit_norm: None,
    })
}

fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let u = n.to_biguint()?;
    let r = crate::scalars::quadratic::biguint_isqrt(&u);
    if &r * &r == u {
        Some(BigInt::from(r))
    } else {
        None
    }
}

/// The symbolic description of the isometry group: the computed stabilizer,
/// the (infinite) translation factor, and the Picard factor, assembled as a
/// semi-direct product record with no cross-factor arithmetic.
#[derive(Debug, Clone)]
pub struct IsomGroupDescription {
    pub stabilizer: StabilizerDescription,
    pub translation_factor: String,
    pub picard_factor: String,
}

pub fn isom_group_description(l: &QuasiLattice) -> Result<IsomGroupDescription> {
    let stab = stabilizer(l)?;
    Ok(IsomGroupDescription {
        stabilizer: stab,
        translation_factor: "C/L (translations modulo the lattice; divisible, infinite)".into(),
        picard_factor: "Pic: an extension of Z by C*/q^Z (degree and point data)".into(),
    })
}

impl fmt::Display for IsomGroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(G_L |x C/L) |x Pic:")?;
        writeln!(f, "  G_L: {}", self.stabilizer)?;
        writeln!(f, "  C/L: {}", self.translation_factor)?;
        write!(f, "  Pic: {}", self.picard_factor)
    }
}
