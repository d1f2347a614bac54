//! Lattices, residues, and the integral (slope-zero) classification: a
//! xi-stable R-lattice is carried to one whose residue eigenvalues contain
//! no pair (alpha, q^n alpha), after which the grading orbit and the Jordan
//! data of the residue read off the normal form.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalars::Scalar;
use crate::skew::AlgebraContext;
use crate::smat::SMat;

use super::QDiffModule;

/// A basis change T over F presenting the lattice L = T R^dim inside the
/// coordinate module of `module`.
#[derive(Debug, Clone)]
pub struct LatticeFrame {
    pub module: QDiffModule,
    pub t: SMat,
}

impl LatticeFrame {
    pub fn standard(module: &QDiffModule) -> Self {
        let t = SMat::identity(module.ctx().field, module.dim, module.phi.min_prec());
        LatticeFrame { module: module.clone(), t }
    }

    /// The action matrix on the lattice basis: T(z)^-1 Phi(z) T(qz).
    pub fn gauged_phi(&self) -> Result<SMat> {
        self.module.phi.gauge(self.module.ctx(), &self.t)
    }

    /// xi-invariance: the gauged action has entries in R.
    pub fn is_xi_invariant(&self) -> Result<bool> {
        Ok(self.gauged_phi()?.is_integral())
    }

    /// Refine by a further basis change of the lattice.
    pub fn compose(&self, t2: &SMat) -> Result<Self> {
        Ok(LatticeFrame { module: self.module.clone(), t: self.t.mul(t2)? })
    }
}

/// Eigenvalues (with multiplicity) of the residue of an integral action;
/// fails loudly when the characteristic polynomial does not split.
pub fn residue_eigenvalues(res: &Mat) -> Result<Vec<(Scalar, usize)>> {
    let cp = res.char_poly()?;
    let search = crate::polyroots::scalar_poly_roots(&cp)?;
    if !search.fully_split {
        let poly: Vec<String> = cp.iter().map(|c| c.to_string()).collect();
        return Err(Error::FieldExtensionRequired(poly.join(", ")));
    }
    let mut roots = search.roots;
    roots.sort_by(|a, b| a.0.repr_cmp(&b.0));
    Ok(roots)
}

/// First resonant pair on the residue: (alpha, beta = q^gap alpha, gap >= 1),
/// searched within the orbit bound.
pub fn find_resonance(
    ctx: &Arc<AlgebraContext>,
    eigs: &[(Scalar, usize)],
) -> Result<Option<(Scalar, Scalar, i64)>> {
    for (a, _) in eigs {
        for (b, _) in eigs {
            if a == b {
                continue;
            }
            if let Some(j) = ctx.orbit_exponent(a, b, ctx.orbit_bound)? {
                if j >= 1 {
                    return Ok(Some((a.clone(), b.clone(), j)));
                }
            }
        }
    }
    Ok(None)
}

/// One lattice-improvement step: rescale the generalized eigenspace of the
/// higher member beta = q^gap alpha of a resonant pair by z^-1 (or by z^-gap
/// at once when the coupling blocks already vanish to that order). Returns
/// the unchanged frame when the residue is resonance-free.
pub fn improve_lattice(frame: &LatticeFrame) -> Result<LatticeFrame> {
    let ctx = frame.module.ctx().clone();
    let phi = frame.gauged_phi()?;
    if !phi.is_integral() {
        return Err(Error::Unsupported("improve_lattice needs a xi-invariant lattice".into()));
    }
    let res = phi.residue()?;
    let eigs = residue_eigenvalues(&res)?;
    let Some((_, beta, gap)) = find_resonance(&ctx, &eigs)? else {
        return Ok(frame.clone());
    };
    let (t0, split) = eigen_split_basis(&res, &beta)?;
    // after the constant base change, the residue is block diagonal with the
    // beta block last; coupling entries into/out of it vanish mod z
    let phi1 = phi.gauge(&ctx, &SMat::from_scalar_mat(&t0, phi.min_prec()))?;
    let n = res.rows;
    let b_start = split;
    // jump distance: z^-m is legal when the (other, beta) block vanishes mod z^m
    let mut jump = 1i64;
    if gap > 1 {
        let mut ok = gap;
        'outer: for i in 0..b_start {
            for j in b_start..n {
                if let Some(v) = phi1.at(i, j).val_index() {
                    if v < ok {
                        ok = v.max(1);
                        if ok == 1 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        jump = ok;
    }
    let field = ctx.field;
    let mut d = SMat::identity(field, n, phi1.min_prec());
    for i in b_start..n {
        d.set(
            i,
            i,
            crate::laurent::LaurentSeries::monomial(
                field,
                Scalar::one(field),
                -jump,
                1,
                phi1.min_prec(),
            )?,
        );
    }
    let t_new = SMat::from_scalar_mat(&t0, phi.min_prec()).mul(&d)?;
    let refined = frame.compose(&t_new)?;
    if !refined.is_xi_invariant()? {
        return Err(Error::Internal("lattice improvement left R".into()));
    }
    Ok(refined)
}

/// Base change whose columns are generalized eigenspace bases with the
/// beta-space last; returns (matrix, index where the beta block starts).
fn eigen_split_basis(res: &Mat, beta: &Scalar) -> Result<(Mat, usize)> {
    let eigs = residue_eigenvalues(res)?;
    let field = res.field();
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for (a, _) in eigs.iter().filter(|(a, _)| a != beta) {
        cols.extend(res.generalized_eigenspace(a)?);
    }
    let split = cols.len();
    cols.extend(res.generalized_eigenspace(beta)?);
    if cols.len() != res.rows {
        return Err(Error::Internal("generalized eigenspaces do not fill the space".into()));
    }
    let mut t0 = Mat::zeros(field, res.rows, res.rows);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            t0.set(i, j, v.clone());
        }
    }
    Ok((t0, split))
}

/// Iterate improvement steps until the residue is resonance-free; hard cap
/// proportional to dim * orbit_bound.
pub fn resonance_free_frame(frame: &LatticeFrame) -> Result<LatticeFrame> {
    let ctx = frame.module.ctx().clone();
    let cap = (frame.module.dim as i64 * ctx.orbit_bound * 2).max(8) as usize;
    let mut cur = frame.clone();
    for _ in 0..cap {
        let phi = cur.gauged_phi()?;
        let eigs = residue_eigenvalues(&phi.residue()?)?;
        if find_resonance(&ctx, &eigs)?.is_none() {
            return Ok(cur);
        }
        cur = improve_lattice(&cur)?;
    }
    Err(Error::IterationCap(cap))
}

/// Equivariant lifting of a residue subspace (Lemma-6-style): the subspace
/// must be a sum of full generalized eigenspaces, and no eigenvalue of the
/// subspace may resonate with any eigenvalue of the whole residue. Returns
/// the refined frame in which the first `dim P` lattice coordinates span a
/// xi-invariant summand lifting the subspace, together with that dimension.
pub fn lift_splitting(
    frame: &LatticeFrame,
    p_eigenvalues: &[Scalar],
) -> Result<(LatticeFrame, usize)> {
    let ctx = frame.module.ctx().clone();
    let phi = frame.gauged_phi()?;
    if !phi.is_integral() {
        return Err(Error::Unsupported("lift_splitting needs a xi-invariant lattice".into()));
    }
    let res = phi.residue()?;
    let eigs = residue_eigenvalues(&res)?;
    let p_set: Vec<Scalar> = p_eigenvalues.to_vec();
    for a in &p_set {
        if !eigs.iter().any(|(e, _)| e == a) {
            return Err(Error::Unsupported("subspace eigenvalue not on the residue".into()));
        }
    }
    // Lemma hypothesis: q^n alpha is never an eigenvalue of the full residue
    for a in &p_set {
        for (b, _) in &eigs {
            if let Some(j) = ctx.orbit_exponent(a, b, ctx.orbit_bound)? {
                if j != 0 {
                    return Err(Error::ResonanceDetected(j));
                }
            }
        }
    }
    // constant base change: P-eigenspaces first
    let field = ctx.field;
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for a in &p_set {
        cols.extend(res.generalized_eigenspace(a)?);
    }
    let p_dim = cols.len();
    for (a, _) in eigs.iter().filter(|(a, _)| !p_set.contains(a)) {
        cols.extend(res.generalized_eigenspace(a)?);
    }
    if cols.len() != res.rows {
        return Err(Error::Internal("generalized eigenspaces do not fill the space".into()));
    }
    if p_dim == res.rows {
        // whole space: identity refinement
        return Ok((frame.clone(), p_dim));
    }
    let mut t0m = Mat::zeros(field, res.rows, res.rows);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            t0m.set(i, j, v.clone());
        }
    }
    let t0 = SMat::from_scalar_mat(&t0m, phi.min_prec());
    let mut psi = phi.gauge(&ctx, &t0)?;
    let res0 = psi.residue()?;
    let (a_blk, b_blk) = split_blocks(&res0, p_dim);
    let prec = psi.min_prec();
    let mut u_total = SMat::identity(field, res.rows, prec);
    // clear coupling blocks order by order with twisted Sylvester solves
    for t in 1..prec.max(1) {
        let mut c = Mat::zeros(field, res.rows, res.rows);
        let qt = ctx.q_pow(t)?;
        // block (1,2): q^t A X - X B = -E12_t
        let e12 = z_coeff_block(&psi, t, 0, p_dim, p_dim, res.rows)?;
        let x12 = solve_twisted_sylvester(&a_blk, &b_blk, &qt, &e12)
            .map_err(|e| resonance_or(e, t))?;
        for i in 0..p_dim {
            for j in 0..(res.rows - p_dim) {
                c.set(i, p_dim + j, x12.at(i, j).clone());
            }
        }
        // block (2,1): q^t B X - X A = -E21_t
        let e21 = z_coeff_block(&psi, t, p_dim, res.rows, 0, p_dim)?;
        let x21 = solve_twisted_sylvester(&b_blk, &a_blk, &qt, &e21)
            .map_err(|e| resonance_or(e, t))?;
        for i in 0..(res.rows - p_dim) {
            for j in 0..p_dim {
                c.set(p_dim + i, j, x21.at(i, j).clone());
            }
        }
        let mut u = SMat::identity(field, res.rows, prec);
        for i in 0..res.rows {
            for j in 0..res.rows {
                if !c.at(i, j).is_zero() {
                    let mono = crate::laurent::LaurentSeries::monomial(
                        field,
                        c.at(i, j).clone(),
                        t,
                        1,
                        prec,
                    )?;
                    let cur = u.at(i, j).add(&mono)?;
                    u.set(i, j, cur);
                }
            }
        }
        psi = psi.gauge(&ctx, &u)?;
        u_total = u_total.mul(&u)?;
    }
    let refined = frame.compose(&t0.mul(&u_total)?)?;
    Ok((refined, p_dim))
}

fn resonance_or(e: Error, t: i64) -> Error {
    match e {
        Error::DivisionByZero | Error::UndecidableRank => Error::ResonanceDetected(t),
        other => other,
    }
}

fn split_blocks(res: &Mat, p: usize) -> (Mat, Mat) {
    let field = res.field();
    let n = res.rows;
    let mut a = Mat::zeros(field, p, p);
    let mut b = Mat::zeros(field, n - p, n - p);
    for i in 0..p {
        for j in 0..p {
            a.set(i, j, res.at(i, j).clone());
        }
    }
    for i in p..n {
        for j in p..n {
            b.set(i - p, j - p, res.at(i, j).clone());
        }
    }
    (a, b)
}

fn z_coeff_block(
    psi: &SMat,
    t: i64,
    r0: usize,
    r1: usize,
    c0: usize,
    c1: usize,
) -> Result<Mat> {
    let field = psi.field();
    let mut out = Mat::zeros(field, r1 - r0, c1 - c0);
    for i in r0..r1 {
        for j in c0..c1 {
            let s = psi.at(i, j);
            let v = s.coeff_at(t).unwrap_or_else(|| Scalar::zero(field));
            out.set(i - r0, j - c0, v);
        }
    }
    Ok(out)
}

/// Solve q A X - X B = -E exactly; errors when the twisted Sylvester
/// operator is singular.
fn solve_twisted_sylvester(a: &Mat, b: &Mat, qt: &Scalar, e: &Mat) -> Result<Mat> {
    let field = a.field();
    let p = a.rows;
    let r = b.rows;
    if p == 0 || r == 0 {
        return Ok(Mat::zeros(field, p, r));
    }
    let nvar = p * r;
    let mut m = Mat::zeros(field, nvar, nvar);
    let mut rhs = vec![Scalar::zero(field); nvar];
    let idx = |i: usize, j: usize| i * r + j;
    for i in 0..p {
        for j in 0..r {
            let row = idx(i, j);
            // sum_a q A[i][a] X[a][j]
            for aidx in 0..p {
                let coef = qt.mul(a.at(i, aidx))?;
                if !coef.is_zero() {
                    let v = m.at(row, idx(aidx, j)).add(&coef)?;
                    m.set(row, idx(aidx, j), v);
                }
            }
            // - sum_b X[i][b] B[b][j]
            for bidx in 0..r {
                let coef = b.at(bidx, j).neg();
                if !coef.is_zero() {
                    let v = m.at(row, idx(i, bidx)).add(&coef)?;
                    m.set(row, idx(i, bidx), v);
                }
            }
            rhs[row] = e.at(i, j).neg();
        }
    }
    if m.rank()? < nvar {
        return Err(Error::UndecidableRank);
    }
    let sol = m.solve(&rhs)?.ok_or(Error::UndecidableRank)?;
    let mut out = Mat::zeros(field, p, r);
    for i in 0..p {
        for j in 0..r {
            out.set(i, j, sol[idx(i, j)].clone());
        }
    }
    Ok(out)
}
