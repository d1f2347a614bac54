//! The full normal-form classification.
//!
//! Pipeline per cyclic factor: split the Newton polygon at breaks (distinct
//! slope sectors of an extension always split), then handle each pure slope
//! k/n by restricting along xi -> z^-k xi^n. The restriction is integral
//! (slope zero) over the q^n twist and is classified through the lattice
//! residue; its parameter orbits regroup in packets of n into the sector
//! labels (n, k, l, a). Everything stays inside the coefficient field.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalars::Scalar;
use crate::skew::{AlgebraContext, SkewPoly};

use super::cyclic::cyclic_decompose;
use super::hensel::split_at_break;
use super::lattice::{residue_eigenvalues, resonance_free_frame, LatticeFrame};
use super::{IndecompLabel, QDiffModule};

/// Classify with an automatic one-shot restart at doubled precision when a
/// precision-type failure occurs.
pub fn classify(m: &QDiffModule, seed: u64) -> Result<Vec<IndecompLabel>> {
    match classify_with_prec(m, seed) {
        Ok(labels) => Ok(labels),
        Err(e) if is_precision_failure(&e) => {
            let doubled = m.assume_exact_to(m.ctx().prec * 2)?;
            classify_with_prec(&doubled, seed)
        }
        Err(e) => Err(e),
    }
}

fn is_precision_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::PrecisionExhausted(_)
            | Error::EmptyWindow { .. }
            | Error::ZeroAtPrecision
            | Error::UndecidableValuation
            | Error::UndecidableRank
    )
}

/// Classification at the module's own working precision.
pub fn classify_with_prec(m: &QDiffModule, seed: u64) -> Result<Vec<IndecompLabel>> {
    let ctx = m.ctx().clone();
    if ctx.tolerant {
        return Err(Error::RootOfUnityTolerant);
    }
    let factors = cyclic_decompose(m, seed)?;
    let mut labels = Vec::new();
    for x in factors {
        labels.extend(classify_cyclic(&x, seed)?);
    }
    super::sort_labels(&mut labels, &ctx)?;
    Ok(labels)
}

fn classify_cyclic(x: &SkewPoly, seed: u64) -> Result<Vec<IndecompLabel>> {
    let ctx = x.ctx().clone();
    let (_, anchored) = x.anchored_at_zero()?.monic_normalize()?;
    if let Some((y, z)) = split_at_break(&anchored)? {
        let mut out = classify_cyclic(&y, seed)?;
        out.extend(classify_cyclic(&z, seed)?);
        return Ok(out);
    }
    // pure slope k/n in lowest terms
    let polygon = anchored.newton_polygon()?;
    let (n, k) = match polygon.first() {
        None => (1u32, 0i64),
        Some((slope, _)) => {
            if slope.is_zero() {
                (1, 0)
            } else {
                let n = slope
                    .denom()
                    .to_u32()
                    .ok_or_else(|| Error::Unsupported("slope denominator too large".into()))?;
                let k = slope
                    .numer()
                    .to_i64()
                    .ok_or_else(|| Error::Unsupported("slope numerator too large".into()))?;
                (n, k)
            }
        }
    };
    let v = QDiffModule::from_cyclic(&anchored)?;
    let sector = restrict_to_sector(&v, n, k)?;
    let wl = classify_integral_parts(&sector, seed)?;
    if n == 1 {
        let mut out = Vec::with_capacity(wl.len());
        for (l, b) in wl {
            let rep = ctx.orbit_min_height_rep(&b)?;
            out.push(IndecompLabel::new(1, k, l, rep, ctx.orbit_bound)?);
        }
        return Ok(out);
    }
    group_orbit_labels(&ctx, n, k, wl)
}

/// Restriction along xi' = z^-k xi^n: an integral module over the q^n twist.
pub fn restrict_to_sector(v: &QDiffModule, n: u32, k: i64) -> Result<QDiffModule> {
    let ctx = v.ctx().clone();
    let ctx_n = ctx.derived_power(n)?;
    let phi = v.phi.semilinear_iterate(&ctx, n)?.shift_z(-k);
    QDiffModule::new(ctx_n, phi)
}

/// The (block size, residue eigenvalue) multiset of an integral module.
fn classify_integral_parts(w: &QDiffModule, seed: u64) -> Result<Vec<(u32, Scalar)>> {
    let factors = cyclic_decompose(w, seed)?;
    let mut out = Vec::new();
    for f in factors {
        let (_, anchored) = f.anchored_at_zero()?.monic_normalize()?;
        let polygon = anchored.newton_polygon()?;
        if polygon.len() != 1 || !polygon[0].0.is_zero() {
            return Err(Error::Internal(format!(
                "sector restriction produced a non-flat polygon: {polygon:?}"
            )));
        }
        let vm = QDiffModule::from_cyclic(&anchored)?;
        let frame = resonance_free_frame(&LatticeFrame::standard(&vm))?;
        let res = frame.gauged_phi()?.residue()?;
        for (alpha, _) in residue_eigenvalues(&res)? {
            for size in res.jordan_sizes_at(&alpha)? {
                out.push((size as u32, alpha.clone()));
            }
        }
    }
    Ok(out)
}

/// Regroup the restriction labels into sector labels: each module
/// A/(xi^n - a z^k)^l restricts to the n translates (l, q^j a), j = 0..n-1,
/// which form a single q-orbit split into n residue classes mod n.
fn group_orbit_labels(
    ctx: &Arc<AlgebraContext>,
    n: u32,
    k: i64,
    items: Vec<(u32, Scalar)>,
) -> Result<Vec<IndecompLabel>> {
    let search_bound = ctx
        .orbit_bound
        .saturating_mul(n as i64)
        .saturating_add(n as i64);
    let mut items = items;
    let mut out = Vec::new();
    while let Some((l0, b0)) = items.first().cloned() {
        let mut class: Vec<(usize, i64)> = Vec::new();
        for (idx, (l, b)) in items.iter().enumerate() {
            if *l == l0 {
                if let Some(j) = ctx.orbit_exponent(&b0, b, search_bound)? {
                    class.push((idx, j));
                }
            }
        }
        let mut per_residue: BTreeMap<i64, usize> = BTreeMap::new();
        for (_, j) in &class {
            *per_residue.entry(j.rem_euclid(n as i64)).or_insert(0) += 1;
        }
        if per_residue.len() != n as usize {
            return Err(Error::OrbitUndecidable(search_bound));
        }
        let mu = *per_residue.values().next().expect("nonempty");
        if per_residue.values().any(|&c| c != mu) {
            return Err(Error::OrbitUndecidable(search_bound));
        }
        let rep = ctx.orbit_min_height_rep(&b0)?;
        for _ in 0..mu {
            out.push(IndecompLabel::new(n, k, l0, rep.clone(), ctx.orbit_bound)?);
        }
        // drop the whole class
        let drop: std::collections::BTreeSet<usize> = class.iter().map(|(i, _)| *i).collect();
        items = items
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, x)| x)
            .collect();
    }
    Ok(out)
}

/// The grading-and-nilpotent invariant of an integral module: orbit
/// representatives with Jordan block sizes, aggregated over the summands.
#[derive(Debug, Clone)]
pub struct IntegralInvariant {
    pub classes: Vec<(Scalar, Vec<usize>)>,
    pub orbit_bound: i64,
}

pub fn integral_invariant(m: &QDiffModule, seed: u64) -> Result<IntegralInvariant> {
    let ctx = m.ctx().clone();
    let factors = cyclic_decompose(m, seed)?;
    for f in &factors {
        let polygon = f.newton_polygon()?;
        if polygon.iter().any(|(s, _)| !s.is_zero()) {
            return Err(Error::Unsupported(
                "module is not integral: nonzero Newton slopes present".into(),
            ));
        }
    }
    let mut raw: Vec<(u32, Scalar)> = Vec::new();
    for f in factors {
        let (_, anchored) = f.anchored_at_zero()?.monic_normalize()?;
        let vm = QDiffModule::from_cyclic(&anchored)?;
        let frame = resonance_free_frame(&LatticeFrame::standard(&vm))?;
        let res = frame.gauged_phi()?.residue()?;
        for (alpha, _) in residue_eigenvalues(&res)? {
            for size in res.jordan_sizes_at(&alpha)? {
                raw.push((size as u32, alpha.clone()));
            }
        }
    }
    // aggregate by orbit
    let mut classes: Vec<(Scalar, Vec<usize>)> = Vec::new();
    'next: for (l, a) in raw {
        for (rep, sizes) in classes.iter_mut() {
            if ctx.orbit_exponent(rep, &a, ctx.orbit_bound)?.is_some() {
                sizes.push(l as usize);
                sizes.sort_unstable_by(|x, y| y.cmp(x));
                continue 'next;
            }
        }
        classes.push((ctx.orbit_min_height_rep(&a)?, vec![l as usize]));
    }
    classes.sort_by(|x, y| x.0.repr_cmp(&y.0));
    Ok(IntegralInvariant { classes, orbit_bound: ctx.orbit_bound })
}
