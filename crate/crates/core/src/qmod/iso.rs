//! Brute-force isomorphism oracle: solve T(z) Phi_V(z) = Phi_W(z) T(qz) for
//! T with Laurent-polynomial entries supported in [-D, D], as one exact
//! linear system over the scalar field, then search the solution space for
//! an invertible element.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::linalg::Mat;
use crate::scalars::Scalar;
use crate::smat::SMat;

use super::QDiffModule;

#[derive(Debug, Clone)]
pub enum IsoOutcome {
    /// A witness T with T(z) Phi_V(z) = Phi_W(z) T(qz) and det(T) a unit.
    Isomorphic(SMat),
    /// No invertible solution found with entries in [-D, D]. `certified` is
    /// true when the absence is proven at this window (trivial hom space, or
    /// the determinant vanishes identically on it).
    NotIsomorphicInWindow { certified: bool },
}

/// Basis of the solution space of the intertwining system at the window.
fn hom_space(v: &QDiffModule, w: &QDiffModule, window: i64) -> Result<Vec<Vec<Scalar>>> {
    if v.ctx().as_ref() != w.ctx().as_ref() {
        return Err(Error::ContextMismatch);
    }
    let ctx = v.ctx().clone();
    let field = ctx.field;
    let dv = v.dim;
    let dw = w.dim;
    let width = (2 * window + 1) as usize;
    let ncols = dw * dv * width;
    let t_index = |i: usize, j: usize, m: i64| -> usize {
        (i * dv + j) * width + (m + window) as usize
    };
    // exponent range where some product coefficient is nonzero
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let mut prec_min = i64::MAX;
    for mat in [&v.phi, &w.phi] {
        for i in 0..mat.rows {
            for j in 0..mat.cols {
                let s = mat.at(i, j);
                prec_min = prec_min.min(s.prec());
                if let Some(val) = s.val_index() {
                    lo = lo.min(val);
                    hi = hi.max(s.prec() - 1);
                }
            }
        }
    }
    if lo > hi {
        return Err(Error::ZeroAtPrecision);
    }
    let e_lo = lo - window;
    let e_hi = (hi + window).min(prec_min - window - 1);
    let n_exp = (e_hi - e_lo + 1).max(0) as usize;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..dw {
        for j in 0..dv {
            for eix in 0..n_exp {
                let e = e_lo + eix as i64;
                let mut row = vec![Scalar::zero(field); ncols];
                let mut nonzero = false;
                // sum_k T[i][k]_m (Phi_V)[k][j]_{e-m}
                for k in 0..dv {
                    let pv = v.phi.at(k, j);
                    for m in -window..=window {
                        if let Some(c) = pv.coeff_at(e - m) {
                            if !c.is_zero() {
                                let col = t_index(i, k, m);
                                row[col] = row[col].add(&c)?;
                                nonzero = true;
                            }
                        }
                    }
                }
                // - sum_k (Phi_W)[i][k]_{e-m} q^m T[k][j]_m
                for k in 0..dw {
                    let pw = w.phi.at(i, k);
                    for m in -window..=window {
                        if let Some(c) = pw.coeff_at(e - m) {
                            if !c.is_zero() {
                                let col = t_index(k, j, m);
                                let qc = c.mul(&ctx.q_pow(m)?)?;
                                row[col] = row[col].sub(&qc)?;
                                nonzero = true;
                            }
                        }
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        rows.push(vec![Scalar::zero(field); ncols]);
    }
    let mat = Mat::from_rows(field, rows);
    mat.kernel_basis()
}

fn vector_to_matrix(
    v: &QDiffModule,
    w: &QDiffModule,
    window: i64,
    coords: &[Scalar],
) -> Result<SMat> {
    let field = v.ctx().field;
    let width = (2 * window + 1) as usize;
    let prec = v.phi.min_prec().min(w.phi.min_prec());
    let mut t = SMat::zeros(field, w.dim, v.dim, prec);
    for i in 0..w.dim {
        for j in 0..v.dim {
            let mut terms = Vec::new();
            for m in -window..=window {
                let c = &coords[(i * v.dim + j) * width + (m + window) as usize];
                if !c.is_zero() {
                    terms.push((m, c.clone()));
                }
            }
            t.set(i, j, LaurentSeries::from_terms(field, 1, &terms, prec)?);
        }
    }
    Ok(t)
}

fn is_witness(v: &QDiffModule, w: &QDiffModule, t: &SMat) -> Result<bool> {
    if t.det()?.is_zero_at_prec() {
        return Ok(false);
    }
    let ctx = v.ctx();
    let lhs = t.mul(&v.phi)?;
    let rhs = w.phi.mul(&t.twist(ctx, 1)?)?;
    Ok(lhs.eq_at_prec(&rhs))
}

/// Decide isomorphism with witness entries supported in [-window, window].
pub fn iso_oracle(
    v: &QDiffModule,
    w: &QDiffModule,
    window: i64,
    seed: u64,
) -> Result<IsoOutcome> {
    if v.dim != w.dim {
        return Ok(IsoOutcome::NotIsomorphicInWindow { certified: true });
    }
    let kernel = hom_space(v, w, window)?;
    if kernel.is_empty() {
        return Ok(IsoOutcome::NotIsomorphicInWindow { certified: true });
    }
    let field = v.ctx().field;
    // single basis vectors first
    for kv in &kernel {
        let t = vector_to_matrix(v, w, window, kv)?;
        if is_witness(v, w, &t)? {
            return Ok(IsoOutcome::Isomorphic(t));
        }
    }
    // sum of all basis vectors, then seeded random small combinations
    let mut combos: Vec<Vec<Scalar>> = Vec::new();
    let sum: Result<Vec<Scalar>> = (0..kernel[0].len())
        .map(|i| {
            let mut acc = Scalar::zero(field);
            for kv in &kernel {
                acc = acc.add(&kv[i])?;
            }
            Ok(acc)
        })
        .collect();
    combos.push(sum?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let coeffs: Vec<Scalar> = (0..kernel.len())
            .map(|_| Scalar::from_integer(field, rng.gen_range(-3i64..=3)))
            .collect();
        let mut combo = vec![Scalar::zero(field); kernel[0].len()];
        for (c, kv) in coeffs.iter().zip(&kernel) {
            if c.is_zero() {
                continue;
            }
            for (slot, x) in combo.iter_mut().zip(kv) {
                *slot = slot.add(&c.mul(x)?)?;
            }
        }
        combos.push(combo);
    }
    for combo in &combos {
        let t = vector_to_matrix(v, w, window, combo)?;
        if is_witness(v, w, &t)? {
            return Ok(IsoOutcome::Isomorphic(t));
        }
    }
    // certification: the determinant is a polynomial of degree dim in the
    // kernel coordinates; vanishing on a full (dim+1)-grid proves it vanishes
    // identically on the window's hom space
    if kernel.len() <= 5 {
        let grid: Vec<i64> = (0..=v.dim as i64).collect();
        let mut idx = vec![0usize; kernel.len()];
        loop {
            let mut combo = vec![Scalar::zero(field); kernel[0].len()];
            for (pos, kv) in kernel.iter().enumerate() {
                let c = Scalar::from_integer(field, grid[idx[pos]]);
                if c.is_zero() {
                    continue;
                }
                for (slot, x) in combo.iter_mut().zip(kv) {
                    *slot = slot.add(&c.mul(x)?)?;
                }
            }
            let t = vector_to_matrix(v, w, window, &combo)?;
            if !t.det()?.is_zero_at_prec() {
                // an invertible element exists after all: it must be a witness
                if is_witness(v, w, &t)? {
                    return Ok(IsoOutcome::Isomorphic(t));
                }
                return Ok(IsoOutcome::NotIsomorphicInWindow { certified: false });
            }
            // advance odometer
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return Ok(IsoOutcome::NotIsomorphicInWindow { certified: true });
                }
                idx[pos] += 1;
                if idx[pos] < grid.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
    Ok(IsoOutcome::NotIsomorphicInWindow { certified: false })
}

/// Dimension of the intertwiner space at the window and at window + 2;
/// `stabilized` reports agreement.
pub fn hom_dim(v: &QDiffModule, w: &QDiffModule, window: i64) -> Result<(usize, bool)> {
    let d1 = hom_space(v, w, window)?.len();
    let d2 = hom_space(v, w, window + 2)?.len();
    Ok((d1, d1 == d2))
}
