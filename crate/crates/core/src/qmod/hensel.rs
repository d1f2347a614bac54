//! Slope factorization: splitting a monic skew polynomial at a break vertex
//! of its Newton polygon by graded correction (Hensel lifting with respect
//! to the z-adic grading induced by the polygon).
//!
//! The initial factorization is read off the residue data on the hull
//! segments; each correction step solves an exact linear system for the
//! height-eta graded parts of both factors, where the height of a monomial
//! c z^t xi^i is t - h(i) against the hull function h.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::linalg::Mat;
use crate::scalars::Scalar;
use crate::skew::SkewPoly;

type TermMap = BTreeMap<i64, BTreeMap<i64, Scalar>>; // degree -> exponent -> coeff

/// Split a monic skew polynomial (anchored at degree 0, ram-1 coefficients,
/// nonzero constant term) at the first Newton-polygon break. Returns None
/// when the polygon has a single segment. The factorization X = Y * Z puts
/// the left polygon part (largest reported slope) on Z, deg Z = break index.
pub fn split_at_break(x: &SkewPoly) -> Result<Option<(SkewPoly, SkewPoly)>> {
    let vertices = x.polygon_vertices()?;
    if vertices.len() <= 2 {
        return Ok(None);
    }
    let d = x.span()?;
    if x.min_deg() != Some(0) {
        return Err(Error::Internal("split_at_break expects an anchored polynomial".into()));
    }
    let (m, w) = (vertices[1].0, vertices[1].1.clone());
    // hull function h(i) by linear interpolation between vertices
    let mut h: Vec<BigRational> = Vec::with_capacity(d as usize + 1);
    {
        let mut vi = 0usize;
        for i in 0..=d {
            while vi + 1 < vertices.len() && vertices[vi + 1].0 < i {
                vi += 1;
            }
            let (x0, y0) = (&vertices[vi].0, &vertices[vi].1);
            let (x1, y1) = (&vertices[vi + 1].0, &vertices[vi + 1].1);
            let t = BigRational::new(BigInt::from(i - x0), BigInt::from(x1 - x0));
            h.push(y0 + (y1 - y0) * t);
        }
    }
    let h_z = |j: i64| -> BigRational { &h[j as usize] - &w };
    let h_y = |j: i64| -> BigRational { h[(m + j) as usize].clone() };

    let ctx = x.ctx().clone();
    let field = ctx.field;

    // eta_cap: we can only verify residual terms where X itself is known
    let mut eta_cap: Option<BigRational> = None;
    for i in 0..=d {
        let prec_i = x
            .coeff(i)
            .map(|c| c.prec())
            .unwrap_or(ctx.prec);
        let cap = BigRational::from(BigInt::from(prec_i)) - &h[i as usize];
        eta_cap = Some(match eta_cap {
            None => cap,
            Some(e) => e.min(cap),
        });
    }
    let eta_cap = eta_cap.expect("nonempty");

    // initial factors from the hull residue data
    let lt_m = {
        let c = x.coeff(m).ok_or_else(|| {
            Error::Internal("polygon vertex without a stored coefficient".into())
        })?;
        if c.val_rational() != Some(w.clone()) {
            return Err(Error::Internal("vertex valuation mismatch".into()));
        }
        c.leading_coeff().expect("nonzero").clone()
    };
    let mut z_terms: TermMap = BTreeMap::new();
    let mut y_terms: TermMap = BTreeMap::new();
    z_terms.entry(m).or_default().insert(0, Scalar::one(field));
    y_terms.entry(d - m).or_default().insert(0, Scalar::one(field));
    for i in 0..=d {
        let Some(c) = x.coeff(i) else { continue };
        let Some(v) = c.val_rational() else { continue };
        if v != h[i as usize] {
            continue; // off-hull coefficient
        }
        let lead = c.leading_coeff().expect("nonzero").clone();
        if i < m {
            let expo = rational_to_int(&(&h[i as usize] - &w))
                .ok_or_else(|| Error::Internal("hull exponent not integral".into()))?;
            z_terms.entry(i).or_default().insert(expo, lead.div(&lt_m)?);
        } else if i > m && i < d {
            let expo = rational_to_int(&h[i as usize])
                .ok_or_else(|| Error::Internal("hull exponent not integral".into()))?;
            y_terms.entry(i - m).or_default().insert(expo, lead);
        } else if i == m {
            let expo = rational_to_int(&w)
                .ok_or_else(|| Error::Internal("hull exponent not integral".into()))?;
            y_terms.entry(0).or_default().insert(expo, lead);
        }
    }
    // height-0 graded parts stay fixed during correction
    let z0 = z_terms.clone();
    let y0 = y_terms.clone();

    let assemble = |terms: &TermMap, hfun: &dyn Fn(i64) -> BigRational| -> Result<SkewPoly> {
        let mut list = Vec::new();
        for (deg, exps) in terms {
            let prec_r = hfun(*deg) + &eta_cap;
            let prec = prec_r.ceil().to_integer().to_i64().ok_or_else(|| {
                Error::Unsupported("factor precision out of range".into())
            })?;
            let ts: Vec<(i64, Scalar)> = exps.iter().map(|(e, c)| (*e, c.clone())).collect();
            list.push((*deg, LaurentSeries::from_terms(field, 1, &ts, prec)?));
        }
        Ok(SkewPoly::from_terms(ctx.clone(), list))
    };

    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::Internal("slope factorization failed to converge".into()));
        }
        let y_poly = assemble(&y_terms, &h_y)?;
        let z_poly = assemble(&z_terms, &h_z)?;
        let r = x.sub(&y_poly.mul(&z_poly)?)?;
        // minimal residual height
        let mut eta: Option<BigRational> = None;
        for (i, c) in r.coeffs() {
            for (t, _) in c.iter_terms() {
                let ht = BigRational::from(BigInt::from(t)) - &h[*i as usize];
                eta = Some(match eta {
                    None => ht,
                    Some(e) => e.min(ht),
                });
            }
        }
        let Some(eta) = eta else { break };
        if eta >= eta_cap {
            break;
        }
        if eta <= BigRational::zero() {
            return Err(Error::Internal("residual at nonpositive height".into()));
        }
        // unknown slots at this height
        #[derive(Clone, Copy, PartialEq)]
        enum Side {
            Y,
            Z,
        }
        let mut slots: Vec<(Side, i64, i64)> = Vec::new();
        for j in 0..m {
            if let Some(t) = rational_to_int(&(h_z(j) + &eta)) {
                slots.push((Side::Z, j, t));
            }
        }
        for j in 0..(d - m) {
            if let Some(t) = rational_to_int(&(h_y(j) + &eta)) {
                slots.push((Side::Y, j, t));
            }
        }
        // equations at this height
        let mut eq_keys: Vec<(i64, i64)> = Vec::new();
        for i in 0..=d {
            if let Some(t) = rational_to_int(&(&h[i as usize] + &eta)) {
                eq_keys.push((i, t));
            }
        }
        if slots.is_empty() || eq_keys.is_empty() {
            return Err(Error::Internal("graded step with no unknowns".into()));
        }
        let mut mat = Mat::zeros(field, eq_keys.len(), slots.len());
        let key_index: BTreeMap<(i64, i64), usize> =
            eq_keys.iter().enumerate().map(|(r, k)| (*k, r)).collect();
        for (col, (side, j, t)) in slots.iter().enumerate() {
            match side {
                Side::Z => {
                    // Y0 term (jy, u, c): contributes c * q^(jy*t) at (jy+j, u+t)
                    for (jy, exps) in &y0 {
                        for (u, c) in exps {
                            let key = (jy + j, u + t);
                            if let Some(&row) = key_index.get(&key) {
                                let coef = c.mul(&ctx.q_pow(jy * t)?)?;
                                let v = mat.at(row, col).add(&coef)?;
                                mat.set(row, col, v);
                            }
                        }
                    }
                }
                Side::Y => {
                    // Z0 term (jz, u, c): contributes c * q^(j*u) at (j+jz, t+u)
                    for (jz, exps) in &z0 {
                        for (u, c) in exps {
                            let key = (j + jz, t + u);
                            if let Some(&row) = key_index.get(&key) {
                                let coef = c.mul(&ctx.q_pow(j * u)?)?;
                                let v = mat.at(row, col).add(&coef)?;
                                mat.set(row, col, v);
                            }
                        }
                    }
                }
            }
        }
        let mut rhs = vec![Scalar::zero(field); eq_keys.len()];
        for (row, (i, t)) in eq_keys.iter().enumerate() {
            if let Some(c) = r.coeff(*i) {
                if let Some(v) = c.coeff_at(*t) {
                    rhs[row] = v;
                }
            }
        }
        let sol = mat
            .solve(&rhs)?
            .ok_or_else(|| Error::Internal("graded correction system inconsistent".into()))?;
        if !mat.kernel_basis()?.is_empty() {
            return Err(Error::Internal("graded correction system underdetermined".into()));
        }
        for (col, (side, j, t)) in slots.iter().enumerate() {
            if sol[col].is_zero() {
                continue;
            }
            let target = match side {
                Side::Z => z_terms.entry(*j).or_default(),
                Side::Y => y_terms.entry(*j).or_default(),
            };
            let entry = target.entry(*t).or_insert_with(|| Scalar::zero(field));
            *entry = entry.add(&sol[col])?;
        }
    }
    let y_poly = assemble(&y_terms, &h_y)?;
    let z_poly = assemble(&z_terms, &h_z)?;
    Ok(Some((y_poly, z_poly)))
}

fn rational_to_int(r: &BigRational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}
