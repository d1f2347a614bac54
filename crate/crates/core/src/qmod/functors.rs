//! The covering functor calculus between the twists s and q = s^n: the pair
//! attached to z -> z^n (dimension-multiplying pushforward, substitution
//! pullback) and the pair attached to xi -> xi^n (semilinear-iterate
//! pullback, block-companion pushforward).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::scalars::Scalar;
use crate::skew::AlgebraContext;
use crate::smat::SMat;

use super::QDiffModule;

fn check_root_relation(ctx_s: &Arc<AlgebraContext>, n: u32, ctx_q: &Arc<AlgebraContext>) -> Result<()> {
    if ctx_s.q.pow(n as i64)? != ctx_q.q || ctx_s.field != ctx_q.field {
        return Err(Error::RootRelation(n));
    }
    Ok(())
}

/// Split a ram-1 series g(w) into the n series g_r(z) with
/// g(w) = sum_r w^r g_r(w^n).
fn split_by_residue(g: &LaurentSeries, n: u32) -> Result<Vec<LaurentSeries>> {
    if g.ram() != 1 {
        return Err(Error::Unsupported("residue split needs integer exponents".into()));
    }
    let field = g.field();
    let n64 = n as i64;
    let mut parts: Vec<Vec<(i64, Scalar)>> = vec![Vec::new(); n as usize];
    for (e, c) in g.iter_terms() {
        let r = e.rem_euclid(n64);
        let m = (e - r) / n64;
        parts[r as usize].push((m, c.clone()));
    }
    let mut out = Vec::with_capacity(n as usize);
    for (r, terms) in parts.into_iter().enumerate() {
        // exponent e known iff e < prec; slot r sees m with nm + r < prec
        let prec_r = crate::laurent::div_ceil_i64(g.prec() - r as i64, n64);
        out.push(LaurentSeries::from_terms(field, 1, &terms, prec_r)?);
    }
    Ok(out)
}

/// Push forward along the n-fold covering z -> z^n: the module over the
/// coarse twist q = s^n on the basis {w^i e_j}, with dim multiplied by n.
pub fn pushforward_f(
    v: &QDiffModule,
    n: u32,
    ctx_q: &Arc<AlgebraContext>,
) -> Result<QDiffModule> {
    let ctx_s = v.ctx().clone();
    check_root_relation(&ctx_s, n, ctx_q)?;
    if n == 1 {
        return QDiffModule::new(ctx_q.clone(), v.phi.clone());
    }
    let d = v.dim;
    let field = ctx_s.field;
    let nn = n as usize;
    let prec = crate::laurent::div_ceil_i64(v.phi.min_prec(), n as i64);
    let mut phi = SMat::zeros(field, nn * d, nn * d, prec);
    let s = &ctx_s.q;
    for i in 0..nn {
        for j in 0..d {
            // xi(w^i e_j) = s^i w^i sum_j' Phi[j'][j](w) e_j'
            let si = s.pow(i as i64)?;
            for jp in 0..d {
                let g = v.phi.at(jp, j).scalar_mul(&si)?.shift(i as i64);
                for (ip, part) in split_by_residue(&g, n)?.into_iter().enumerate() {
                    if !part.is_zero_at_prec() {
                        let cur = phi.at(ip * d + jp, i * d + j).add(&part)?;
                        phi.set(ip * d + jp, i * d + j, cur);
                    }
                }
            }
        }
    }
    QDiffModule::new(ctx_q.clone(), phi)
}

/// Pull back along z -> z^n: substitute z -> w^n in Phi; the twist refines
/// from q to s, dimension unchanged.
pub fn pullback_f(
    v: &QDiffModule,
    n: u32,
    ctx_s: &Arc<AlgebraContext>,
) -> Result<QDiffModule> {
    check_root_relation(ctx_s, n, v.ctx())?;
    QDiffModule::new(ctx_s.clone(), v.phi.substitute_power(n))
}

/// Pull back along xi -> xi^n: the action becomes the n-step semilinear
/// iterate Phi(z) Phi(sz) ... Phi(s^(n-1) z) over the coarse twist q = s^n;
/// dimension unchanged.
pub fn pullback_g(
    v: &QDiffModule,
    n: u32,
    ctx_q: &Arc<AlgebraContext>,
) -> Result<QDiffModule> {
    let ctx_s = v.ctx().clone();
    check_root_relation(&ctx_s, n, ctx_q)?;
    QDiffModule::new(ctx_q.clone(), v.phi.semilinear_iterate(&ctx_s, n)?)
}

/// Push forward along xi -> xi^n (induction): the block companion with Phi
/// in the corner, over the fine twist s; dimension multiplies by n.
pub fn pushforward_g(
    v: &QDiffModule,
    n: u32,
    ctx_s: &Arc<AlgebraContext>,
) -> Result<QDiffModule> {
    check_root_relation(ctx_s, n, v.ctx())?;
    if n == 1 {
        return QDiffModule::new(ctx_s.clone(), v.phi.clone());
    }
    let d = v.dim;
    let nn = n as usize;
    let field = ctx_s.field;
    let prec = v.phi.min_prec();
    let mut phi = SMat::zeros(field, nn * d, nn * d, prec);
    for b in 1..nn {
        for j in 0..d {
            phi.set(b * d + j, (b - 1) * d + j, LaurentSeries::one(field, prec));
        }
    }
    for i in 0..d {
        for j in 0..d {
            phi.set(i, (nn - 1) * d + j, v.phi.at(i, j).clone());
        }
    }
    QDiffModule::new(ctx_s.clone(), phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmod::{classify, minimal_skew_poly, IndecompLabel};
    use crate::scalars::FieldSpec;
    use crate::skew::test_support::sp;

    fn ctx_pair(n: u32) -> (Arc<AlgebraContext>, Arc<AlgebraContext>) {
        let f = FieldSpec::Rational;
        let s = Scalar::from_integer(f, 2);
        let ctx_s = AlgebraContext::new(s.clone(), 36).unwrap();
        let ctx_q = AlgebraContext::new(s.pow(n as i64).unwrap(), 36).unwrap();
        (ctx_s, ctx_q)
    }

    /// P_{k,1} over the fine twist: A_s/(xi - z^k).
    fn p_k1(ctx_s: &Arc<AlgebraContext>, k: i64) -> QDiffModule {
        let x = sp(ctx_s, &[(1, &[(0, 1)]), (0, &[(k, -1)])]);
        QDiffModule::from_cyclic(&x).unwrap()
    }

    #[test]
    fn pushforward_of_line_is_the_sector_simple() {
        let (ctx_s, ctx_q) = ctx_pair(2);
        let v = p_k1(&ctx_s, 1);
        let w = pushforward_f(&v, 2, &ctx_q).unwrap();
        assert_eq!(w.dim, 2);
        // minimal polynomial of e_0 is xi^2 - s z
        let mut e0 = vec![LaurentSeries::zero_at(ctx_q.field, 1, 36); 2];
        e0[0] = LaurentSeries::one(ctx_q.field, 36);
        let mp = minimal_skew_poly(&w, &e0).unwrap();
        assert_eq!(mp.span().unwrap(), 2);
        let labels = classify(&w, 3).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!((labels[0].n, labels[0].k, labels[0].l), (2, 1, 1));
        // parameter is s = 2 up to orbit
        let expect = IndecompLabel::new(2, 1, 1, Scalar::from_integer(ctx_q.field, 2), 24).unwrap();
        assert!(labels[0].orbit_eq(&expect, &ctx_q).unwrap());
    }

    #[test]
    fn pushforward_dims_multiply() {
        let (ctx_s, ctx_q) = ctx_pair(2);
        let v = p_k1(&ctx_s, 3);
        assert_eq!(pushforward_f(&v, 2, &ctx_q).unwrap().dim, 2 * v.dim);
        // induction along xi -> xi^n starts from the coarse twist
        let vq = p_k1(&ctx_q, 3);
        assert_eq!(pushforward_g(&vq, 2, &ctx_s).unwrap().dim, 2 * vq.dim);
    }

    #[test]
    fn pullback_g_of_line_is_the_iterate() {
        let (ctx_s, ctx_q) = ctx_pair(3);
        // (xi - 5): iterate = 5^3
        let x = sp(&ctx_s, &[(1, &[(0, 1)]), (0, &[(0, -5)])]);
        let v = QDiffModule::from_cyclic(&x).unwrap();
        let w = pullback_g(&v, 3, &ctx_q).unwrap();
        assert_eq!(w.dim, 1);
        assert_eq!(
            w.phi.at(0, 0).leading_coeff().unwrap().clone(),
            Scalar::from_integer(ctx_q.field, 125)
        );
        // (xi - 5z): iterate = 5z * 5(sz) * 5(s^2 z) = 125 s^3 z^3
        let y = sp(&ctx_s, &[(1, &[(0, 1)]), (0, &[(1, -5)])]);
        let vy = QDiffModule::from_cyclic(&y).unwrap();
        let wy = pullback_g(&vy, 3, &ctx_q).unwrap();
        assert_eq!(wy.phi.at(0, 0).val_index(), Some(3));
        assert_eq!(
            wy.phi.at(0, 0).leading_coeff().unwrap().clone(),
            Scalar::from_integer(ctx_q.field, 125 * 8)
        );
    }

    #[test]
    fn identity_functors_at_n_one() {
        let f = FieldSpec::Rational;
        let s = Scalar::from_integer(f, 2);
        let ctx = AlgebraContext::new(s, 24).unwrap();
        let v = p_k1(&ctx, 2);
        for w in [
            pushforward_f(&v, 1, &ctx).unwrap(),
            pullback_f(&v, 1, &ctx).unwrap(),
            pullback_g(&v, 1, &ctx).unwrap(),
            pushforward_g(&v, 1, &ctx).unwrap(),
        ] {
            assert_eq!(w.dim, v.dim);
            assert!(w.phi.eq_at_prec(&v.phi));
        }
    }

    #[test]
    fn pushforward_g_of_line_restricts_to_constant() {
        let (ctx_s, _ctx_q) = ctx_pair(2);
        let x = sp(&ctx_s, &[(1, &[(0, 1)]), (0, &[(0, -3)])]);
        // here the roles are swapped: the module lives over q = s^2 and is
        // induced down to s
        let f = FieldSpec::Rational;
        let ctx_q2 = AlgebraContext::new(Scalar::from_integer(f, 4), 24).unwrap();
        let x_q = sp(&ctx_q2, &[(1, &[(0, 1)]), (0, &[(0, -3)])]);
        let v = QDiffModule::from_cyclic(&x_q).unwrap();
        let ctx_s2 = AlgebraContext::new(Scalar::from_integer(f, 2), 24).unwrap();
        let w = pushforward_g(&v, 2, &ctx_s2).unwrap();
        assert_eq!(w.dim, 2);
        // xi^2 acts as multiplication by 3: the minimal polynomial of e_0
        // over the fine twist is xi^2 - 3
        let mut e0 = vec![LaurentSeries::zero_at(f, 1, 24); 2];
        e0[0] = LaurentSeries::one(f, 24);
        let mp = minimal_skew_poly(&w, &e0).unwrap();
        assert_eq!(mp.span().unwrap(), 2);
        assert!(mp.coeff(1).is_none());
        assert_eq!(
            mp.coeff(0).unwrap().leading_coeff().unwrap().clone(),
            Scalar::from_integer(f, -3)
        );
        let _ = x;
    }
}
