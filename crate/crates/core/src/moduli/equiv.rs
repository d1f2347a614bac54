//! Equivalence of moduli points under the modular group, and similarity of
//! quasi-lattices.
//!
//! Upper-half points reduce to the fundamental domain and compare exactly.
//! Real quadratic points compare through continued-fraction tails: matching
//! period cycles decide the GL2(Z) orbit, and the determinant parity of the
//! alignment decides the SL2(Z) refinement. The short word-enumeration
//! search is kept as the independent acceptance authority.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalars::QuadraticNumber;

use super::cf::cf_expand;
use super::reduce::reduce_upper;
use super::{Mat2, ModuliPoint, QuasiLattice, Regime};

#[derive(Debug, Clone, PartialEq)]
pub enum EquivOutcome {
    Equivalent(Mat2),
    Inequivalent,
}

/// Decide tau = g(mu) for some g in SL2(Z).
pub fn sl2_equivalent(tau: &ModuliPoint, mu: &ModuliPoint) -> Result<EquivOutcome> {
    match (tau.regime(), mu.regime()) {
        (Regime::UpperHalf, Regime::UpperHalf) => upper_equivalent(tau, mu),
        (Regime::LowerHalf, Regime::LowerHalf) => {
            // conjugation commutes with the integral fractional action
            match upper_equivalent(&tau.conj(), &mu.conj())? {
                EquivOutcome::Equivalent(g) => {
                    debug_assert_eq!(g.apply(&mu.tau)?, tau.tau);
                    Ok(EquivOutcome::Equivalent(g))
                }
                EquivOutcome::Inequivalent => Ok(EquivOutcome::Inequivalent),
            }
        }
        (Regime::UpperHalf, Regime::LowerHalf) | (Regime::LowerHalf, Regime::UpperHalf) => {
            Ok(EquivOutcome::Inequivalent)
        }
        (Regime::RealQuadratic, Regime::RealQuadratic) => real_equivalent(tau, mu),
        _ => Err(Error::RegimeMismatch(format!(
            "cannot compare {:?} with {:?}",
            tau.regime(),
            mu.regime()
        ))),
    }
}

fn upper_equivalent(tau: &ModuliPoint, mu: &ModuliPoint) -> Result<EquivOutcome> {
    let (rt, gt) = reduce_upper(tau)?;
    let (rm, gm) = reduce_upper(mu)?;
    if rt.tau != rm.tau {
        return Ok(EquivOutcome::Inequivalent);
    }
    let g = gt.inv_unimodular()?.mul(&gm);
    debug_assert_eq!(g.apply(&mu.tau)?, tau.tau);
    Ok(EquivOutcome::Equivalent(g))
}

fn real_equivalent(tau: &ModuliPoint, mu: &ModuliPoint) -> Result<EquivOutcome> {
    let cft = cf_expand(tau)?;
    let cfm = cf_expand(mu)?;
    let ell = cft.period.len();
    if ell != cfm.period.len() {
        return Ok(EquivOutcome::Inequivalent);
    }
    // find the unique rotation aligning the cycles of complete quotients
    let mut offset: Option<usize> = None;
    for r in 0..ell {
        if cfm.cycle_states[r] == cft.cycle_states[0] {
            offset = Some(r);
            break;
        }
    }
    let Some(r0) = offset else {
        return Ok(EquivOutcome::Inequivalent);
    };
    // tau_{m} = mu_{m'} with m = pre_tau, m' = pre_mu + r0 + t*ell;
    // the witness has determinant (-1)^(m + m'): fix the parity with t when
    // the period length is odd, otherwise the parity is forced
    let m = cft.preperiod.len();
    let base = cfm.preperiod.len() + r0;
    let mut m_prime: Option<usize> = None;
    for t in 0..2usize {
        let cand = base + t * ell;
        if (m + cand) % 2 == 0 {
            m_prime = Some(cand);
            break;
        }
    }
    let Some(mp) = m_prime else {
        return Ok(EquivOutcome::Inequivalent);
    };
    let g = cft
        .convergent_matrix(m)
        .mul(&cfm.convergent_matrix(mp).inv_unimodular()?);
    if g.det() != BigInt::one() {
        return Err(Error::Internal("parity bookkeeping failed".into()));
    }
    if g.apply(&mu.tau)? != tau.tau {
        return Err(Error::Internal("tail-matching witness failed verification".into()));
    }
    Ok(EquivOutcome::Equivalent(g))
}

/// Independent oracle: breadth-first enumeration of SL2(Z) words in S and
/// T^(+-1) up to the given length, deduplicated up to sign.
pub fn brute_force_equivalent(
    tau: &ModuliPoint,
    mu: &ModuliPoint,
    max_len: usize,
) -> Result<Option<Mat2>> {
    let ball = sl2_ball(max_len);
    for g in &ball {
        if g.apply(&mu.tau)? == tau.tau {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

fn normalize_sign(m: &Mat2) -> Mat2 {
    let flip = if m.a.is_zero() {
        m.c.is_negative() || (m.c.is_zero() && (m.b.is_negative() || m.d.is_negative()))
    } else {
        m.a.is_negative()
    };
    if flip {
        Mat2 { a: -m.a.clone(), b: -m.b.clone(), c: -m.c.clone(), d: -m.d.clone() }
    } else {
        m.clone()
    }
}

/// All elements of SL2(Z) representable by S/T-words of the given length,
/// up to sign.
pub fn sl2_ball(max_len: usize) -> Vec<Mat2> {
    let gens = [
        Mat2::s(),
        Mat2::t_power(&BigInt::one()),
        Mat2::t_power(&(-BigInt::one())),
    ];
    let mut seen: HashSet<(String, String, String, String)> = HashSet::new();
    let key = |m: &Mat2| (m.a.to_string(), m.b.to_string(), m.c.to_string(), m.d.to_string());
    let mut frontier = vec![Mat2::identity()];
    seen.insert(key(&normalize_sign(&frontier[0])));
    let mut out = vec![Mat2::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for g in &frontier {
            for h in &gens {
                let gh = g.mul(h);
                let nk = key(&normalize_sign(&gh));
                if seen.insert(nk) {
                    out.push(gh.clone());
                    next.push(gh);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    out
}

/// Outcome of a lattice similarity test: a scaling alpha and the integral
/// basis change with alpha * (new basis of L') = (basis of L) scaled.
#[derive(Debug, Clone)]
pub enum Similarity {
    Similar { alpha: QuadraticNumber, basis_change: Mat2 },
    NotSimilar,
}

/// Similarity of quasi-lattices: L = alpha L'. Reduces to modular
/// equivalence of the generator ratios with orientation handling.
pub fn lattice_similar(l: &QuasiLattice, lp: &QuasiLattice) -> Result<Similarity> {
    let (r1, sw1) = oriented_ratio(l)?;
    let (r2, sw2) = oriented_ratio(lp)?;
    if r1.regime() != r2.regime() {
        return Ok(Similarity::NotSimilar);
    }
    // GL2-orbit = SL2-orbit union SL2-orbit of the mirror tau -> -tau
    let attempts: Vec<(ModuliPoint, bool)> = match r2.regime() {
        Regime::RealQuadratic => vec![(r2.clone(), false), (mirror(&r2)?, true)],
        _ => vec![(r2.clone(), false)],
    };
    for (cand, mirrored) in attempts {
        if let EquivOutcome::Equivalent(g) = sl2_equivalent(&r1, &cand)? {
            let alpha = similarity_witness(l, lp, &g, sw1, sw2, mirrored)?;
            return Ok(Similarity::Similar { alpha, basis_change: g });
        }
    }
    Ok(Similarity::NotSimilar)
}

fn mirror(p: &ModuliPoint) -> Result<ModuliPoint> {
    ModuliPoint::new(p.tau.neg())
}

/// Ratio normalized into the upper half plane (complex case); reports
/// whether the generators were swapped.
fn oriented_ratio(l: &QuasiLattice) -> Result<(ModuliPoint, bool)> {
    let r = l.ratio()?;
    if r.regime() == Regime::LowerHalf {
        Ok((ModuliPoint::new(l.omega1.div(&l.omega2)?)?, true))
    } else {
        Ok((r, false))
    }
}

fn ordered_basis(l: &QuasiLattice, swapped: bool) -> (QuadraticNumber, QuadraticNumber) {
    if swapped {
        (l.omega2.clone(), l.omega1.clone())
    } else {
        (l.omega1.clone(), l.omega2.clone())
    }
}

fn similarity_witness(
    l: &QuasiLattice,
    lp: &QuasiLattice,
    g: &Mat2,
    sw1: bool,
    sw2: bool,
    mirrored: bool,
) -> Result<QuadraticNumber> {
    let (w1, _w2) = ordered_basis(l, sw1);
    let (v1, v2) = ordered_basis(lp, sw2);
    let v2 = if mirrored { v2.neg() } else { v2 };
    // with tau = g(tau'), the pair (c tau' + d, a tau' + b) scaled by v1 is a
    // basis of L', and alpha = w1 / (c v2 + d v1)
    let d = w1.d;
    let lift = |n: &BigInt| {
        QuadraticNumber::from_rational(num_rational::BigRational::from(n.clone()), d)
    };
    let new_v1 = lift(&g.c).mul(&v2)?.add(&lift(&g.d).mul(&v1)?)?;
    let alpha = w1.div(&new_v1)?;
    // exact verification: alpha L' = L
    let scaled = QuasiLattice::new(alpha.mul(&lp.omega1)?, alpha.mul(&lp.omega2)?)?;
    if !same_lattice(&scaled, l)? {
        return Err(Error::Internal("similarity witness failed verification".into()));
    }
    Ok(alpha)
}

fn same_lattice(a: &QuasiLattice, b: &QuasiLattice) -> Result<bool> {
    // each basis vector of a must be integral in b's basis and vice versa
    for (src, dst) in [(a, b), (b, a)] {
        for w in [&src.omega1, &src.omega2] {
            let det = &dst.omega1.a * &dst.omega2.b - &dst.omega2.a * &dst.omega1.b;
            if det.is_zero() {
                return Err(Error::Unsupported("degenerate basis".into()));
            }
            let x = (&w.a * &dst.omega2.b - &dst.omega2.a * &w.b) / &det;
            let y = (&dst.omega1.a * &w.b - &w.a * &dst.omega1.b) / &det;
            if !x.denom().is_one() || !y.denom().is_one() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
