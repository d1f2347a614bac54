//! Cyclic vectors, minimal annihilators, and the decomposition of a module
//! into cyclic summands.
//!
//! A vector of maximal annihilator span generates a direct summand, so
//! splitting off the best vector found (random search with a deterministic
//! fallback) and recursing on the quotient produces annihilators X_i with
//! direct sum A/(X_i) isomorphic to the module.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::scalars::Scalar;
use crate::skew::SkewPoly;
use crate::smat::{solve_columns, SMat};

use super::QDiffModule;

/// Monic annihilator of least span for v, found by semilinear Krylov
/// iteration: v, xi v, xi^2 v, ... until F-linear dependence at precision.
pub fn minimal_skew_poly(m: &QDiffModule, v: &[LaurentSeries]) -> Result<SkewPoly> {
    Ok(krylov_minpoly(m, v)?.0)
}

pub(crate) fn krylov_minpoly(
    m: &QDiffModule,
    v: &[LaurentSeries],
) -> Result<(SkewPoly, Vec<Vec<LaurentSeries>>)> {
    if v.iter().all(|f| f.is_zero_at_prec()) {
        return Err(Error::ZeroInput);
    }
    let ctx = m.ctx().clone();
    let mut ws: Vec<Vec<LaurentSeries>> = vec![v.to_vec()];
    for r in 1..=m.dim {
        let next = m.apply_xi(ws.last().expect("nonempty"))?;
        if let Some(c) = solve_columns(&ws, &next)? {
            // xi^r v = sum c_i xi^i v, so X = xi^r - sum c_i xi^i kills v
            let mut terms = vec![(r as i64, LaurentSeries::one(ctx.field, m.phi.min_prec()))];
            for (i, ci) in c.into_iter().enumerate() {
                if !ci.is_zero_at_prec() {
                    terms.push((i as i64, ci.neg()));
                }
            }
            return Ok((SkewPoly::from_terms(ctx, terms), ws));
        }
        ws.push(next);
    }
    Err(Error::UndecidableRank)
}

/// Deterministic list of fallback vectors: the standard basis, then sums and
/// differences of pairs.
fn fallback_vectors(m: &QDiffModule) -> Vec<Vec<LaurentSeries>> {
    let field = m.ctx().field;
    let prec = m.phi.min_prec();
    let dim = m.dim;
    let e = |i: usize| -> Vec<LaurentSeries> {
        (0..dim)
            .map(|j| {
                if i == j {
                    LaurentSeries::one(field, prec)
                } else {
                    LaurentSeries::zero_at(field, 1, prec)
                }
            })
            .collect()
    };
    let mut out: Vec<Vec<LaurentSeries>> = (0..dim).map(e).collect();
    for i in 0..dim {
        for j in i + 1..dim {
            let mut plus = e(i);
            let mut minus = e(i);
            plus[j] = LaurentSeries::one(field, prec);
            minus[j] = LaurentSeries::one(field, prec).neg();
            out.push(plus);
            out.push(minus);
        }
    }
    out
}

pub(crate) const CYCLIC_RETRIES: usize = 32;
const RANDOM_BOX: i64 = 3;

fn random_vector(m: &QDiffModule, rng: &mut ChaCha8Rng) -> Vec<LaurentSeries> {
    let field = m.ctx().field;
    let prec = m.phi.min_prec();
    loop {
        let v: Vec<LaurentSeries> = (0..m.dim)
            .map(|_| {
                let c = rng.gen_range(-RANDOM_BOX..=RANDOM_BOX);
                LaurentSeries::constant(field, Scalar::from_integer(field, c), prec)
            })
            .collect();
        if v.iter().any(|f| !f.is_zero_at_prec()) {
            return v;
        }
    }
}

/// Find a vector of maximal annihilator span: random candidates from a small
/// integer box, then the deterministic fallback list.
fn best_vector(
    m: &QDiffModule,
    rng: &mut ChaCha8Rng,
) -> Result<(SkewPoly, Vec<Vec<LaurentSeries>>)> {
    let mut best: Option<(i64, SkewPoly, Vec<Vec<LaurentSeries>>)> = None;
    let consider = |cand: Vec<LaurentSeries>,
                        best: &mut Option<(i64, SkewPoly, Vec<Vec<LaurentSeries>>)>|
     -> Result<bool> {
        match krylov_minpoly(m, &cand) {
            Ok((x, ws)) => {
                let s = x.span()?;
                if best.as_ref().map(|(bs, _, _)| s > *bs).unwrap_or(true) {
                    *best = Some((s, x, ws));
                }
                Ok(s == m.dim as i64)
            }
            Err(Error::UndecidableRank) => Ok(false),
            Err(e) => Err(e),
        }
    };
    for _ in 0..CYCLIC_RETRIES {
        if consider(random_vector(m, rng), &mut best)? {
            let (_, x, ws) = best.expect("set above");
            return Ok((x, ws));
        }
    }
    for cand in fallback_vectors(m) {
        if consider(cand, &mut best)? {
            break;
        }
    }
    match best {
        Some((_, x, ws)) => Ok((x, ws)),
        None => Err(Error::UndecidableRank),
    }
}

/// Decompose into cyclic factors: a list of annihilators X_i with
/// direct_sum(A/(X_i)) isomorphic to the module. Deterministic given seed.
pub fn cyclic_decompose(m: &QDiffModule, seed: u64) -> Result<Vec<SkewPoly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut current = m.clone();
    loop {
        let (x, ws) = best_vector(&current, &mut rng)?;
        let span = x.span()?;
        out.push(x);
        if span == current.dim as i64 {
            return Ok(out);
        }
        current = quotient_by_krylov(&current, &ws)?;
    }
}

/// Quotient module by the submodule spanned by the Krylov vectors.
fn quotient_by_krylov(m: &QDiffModule, ws: &[Vec<LaurentSeries>]) -> Result<QDiffModule> {
    let field = m.ctx().field;
    let prec = m.phi.min_prec();
    let r = ws.len();
    let dim = m.dim;
    // complete the Krylov columns to a basis with standard vectors
    let mut cols: Vec<Vec<LaurentSeries>> = ws.to_vec();
    for j in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut e = vec![LaurentSeries::zero_at(field, 1, prec); dim];
        e[j] = LaurentSeries::one(field, prec);
        cols.push(e);
        if column_rank(&cols)? < cols.len() {
            cols.pop();
        }
    }
    if cols.len() < dim {
        return Err(Error::UndecidableRank);
    }
    let mut b = SMat::zeros(field, dim, dim, prec);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            b.set(i, j, v.clone());
        }
    }
    let gauged = m.phi.gauge(m.ctx(), &b)?;
    // the first r coordinates span a submodule: the lower-left block must
    // vanish at precision
    for i in r..dim {
        for j in 0..r {
            if !gauged.at(i, j).is_zero_at_prec() {
                return Err(Error::Internal(
                    "Krylov span is not xi-stable at the working precision".into(),
                ));
            }
        }
    }
    let mut quot = SMat::zeros(field, dim - r, dim - r, gauged.min_prec());
    for i in r..dim {
        for j in r..dim {
            quot.set(i - r, j - r, gauged.at(i, j).clone());
        }
    }
    QDiffModule::new(m.ctx().clone(), quot)
}

fn column_rank(cols: &[Vec<LaurentSeries>]) -> Result<usize> {
    crate::smat::column_rank(cols)
}
