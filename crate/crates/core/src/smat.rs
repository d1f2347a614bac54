//! Matrices of truncated Laurent series: the coordinate form of semilinear
//! operators, gauge transformations, and lattice bases.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::scalars::{FieldSpec, Scalar};
use crate::skew::AlgebraContext;

#[derive(Debug, Clone)]
pub struct SMat {
    pub rows: usize,
    pub cols: usize,
    field: FieldSpec,
    data: Vec<LaurentSeries>,
}

impl SMat {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize, prec: i64) -> Self {
        SMat {
            rows,
            cols,
            field,
            data: vec![LaurentSeries::zero_at(field, 1, prec); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize, prec: i64) -> Self {
        let mut m = Self::zeros(field, n, n, prec);
        for i in 0..n {
            m.set(i, i, LaurentSeries::one(field, prec));
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<LaurentSeries>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        SMat { rows: r, cols: c, field, data }
    }

    /// Constant matrix from scalars.
    pub fn from_scalar_mat(m: &crate::linalg::Mat, prec: i64) -> Self {
        let field = m.field();
        let mut out = Self::zeros(field, m.rows, m.cols, prec);
        for i in 0..m.rows {
            for j in 0..m.cols {
                out.set(i, j, LaurentSeries::constant(field, m.at(i, j).clone(), prec));
            }
        }
        out
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn at(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<F: FnMut(&LaurentSeries) -> Result<LaurentSeries>>(&self, mut f: F) -> Result<SMat> {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = f(v)?;
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &SMat) -> Result<SMat> {
        assert_eq!(self.cols, rhs.rows);
        let prec = i64::MAX;
        let mut out = Self::zeros(self.field, self.rows, rhs.cols, prec);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: Option<LaurentSeries> = None;
                for k in 0..self.cols {
                    let t = self.at(i, k).mul(rhs.at(k, j))?;
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a.add(&t)?,
                    });
                }
                out.set(i, j, acc.expect("nonempty inner dimension"));
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
        assert_eq!(self.cols, v.len());
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc: Option<LaurentSeries> = None;
            for k in 0..self.cols {
                let t = self.at(i, k).mul(&v[k])?;
                acc = Some(match acc {
                    None => t,
                    Some(a) => a.add(&t)?,
                });
            }
            out.push(acc.expect("nonempty inner dimension"));
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &SMat) -> Result<SMat> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (i, v) in out.data.iter_mut().enumerate() {
            *v = v.add(&rhs.data[i])?;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &SMat) -> Result<SMat> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (i, v) in out.data.iter_mut().enumerate() {
            *v = v.sub(&rhs.data[i])?;
        }
        Ok(out)
    }

    /// Entrywise twist f(z) -> f(q^j z).
    pub fn twist(&self, ctx: &Arc<AlgebraContext>, j: i64) -> Result<SMat> {
        self.map(|f| ctx.sigma_pow(f, j))
    }

    /// Entrywise substitution z -> z^n.
    pub fn substitute_power(&self, n: u32) -> SMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.substitute_power(n);
        }
        out
    }

    /// Entrywise multiplication by z^(k/ram-of-entry); entries must share ram 1.
    pub fn shift_z(&self, k: i64) -> SMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.shift(k);
        }
        out
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Result<SMat> {
        self.map(|f| f.scalar_mul(c))
    }

    pub fn series_mul(&self, u: &LaurentSeries) -> Result<SMat> {
        self.map(|f| f.mul(u))
    }

    /// The n-step semilinear iterate Phi(z) Phi(qz) ... Phi(q^(n-1) z).
    pub fn semilinear_iterate(&self, ctx: &Arc<AlgebraContext>, n: u32) -> Result<SMat> {
        assert_eq!(self.rows, self.cols);
        let mut acc = self.clone();
        for j in 1..n as i64 {
            acc = acc.mul(&self.twist(ctx, j)?)?;
        }
        Ok(acc)
    }

    /// Gauge transformation T(z)^-1 Phi(z) T(qz).
    pub fn gauge(&self, ctx: &Arc<AlgebraContext>, t: &SMat) -> Result<SMat> {
        let ti = t.inverse()?;
        ti.mul(self)?.mul(&t.twist(ctx, 1)?)
    }

    /// Gauss-Jordan inverse with minimal-valuation pivoting. Fails with
    /// `UndecidableRank` when no provably nonzero pivot is available.
    pub fn inverse(&self) -> Result<SMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let prec = self.data.iter().map(|s| s.prec()).min().unwrap_or(0);
        if prec < 1 {
            return Err(Error::PrecisionExhausted(format!(
                "matrix window shrank to {prec} exponents"
            )));
        }
        let mut a = self.clone();
        // match the working precision of self to avoid inflated claims
        let mut inv = SMat::identity(self.field, n, prec);
        for col in 0..n {
            // choose the remaining row whose entry has minimal valuation
            // (compare v/ram exactly via cross-multiplication)
            let mut best: Option<(usize, i64, i64)> = None;
            for r in col..n {
                let e = a.at(r, col);
                if let Some(v) = e.val_index() {
                    let ram = e.ram() as i64;
                    let better = match best {
                        None => true,
                        Some((_, bv, bram)) => v * bram < bv * ram,
                    };
                    if better {
                        best = Some((r, v, ram));
                    }
                }
            }
            let Some((piv, _, _)) = best else {
                return Err(Error::UndecidableRank);
            };
            if piv != col {
                for j in 0..n {
                    let tmp = a.at(piv, j).clone();
                    a.set(piv, j, a.at(col, j).clone());
                    a.set(col, j, tmp);
                    let tmp = inv.at(piv, j).clone();
                    inv.set(piv, j, inv.at(col, j).clone());
                    inv.set(col, j, tmp);
                }
            }
            let p = a.at(col, col).invert()?;
            for j in 0..n {
                a.set(col, j, a.at(col, j).mul(&p)?);
                inv.set(col, j, inv.at(col, j).mul(&p)?);
            }
            for r in 0..n {
                if r != col {
                    let f = a.at(r, col).clone();
                    if f.is_zero_at_prec() {
                        continue;
                    }
                    for j in 0..n {
                        a.set(r, j, a.at(r, j).sub(&f.mul(a.at(col, j))?)?);
                        inv.set(r, j, inv.at(r, j).sub(&f.mul(inv.at(col, j))?)?);
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination over the series field; a result that is
    /// zero-at-precision is returned as such.
    pub fn det(&self) -> Result<LaurentSeries> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let prec = self.data.iter().map(|s| s.prec()).min().unwrap_or(0);
        if prec < 1 {
            return Err(Error::PrecisionExhausted(format!(
                "matrix window shrank to {prec} exponents"
            )));
        }
        let mut a = self.clone();
        let mut det = LaurentSeries::one(self.field, prec);
        for col in 0..n {
            let mut best: Option<(usize, i64)> = None;
            for r in col..n {
                if let Some(v) = a.at(r, col).val_index() {
                    if best.map(|(_, bv)| v < bv).unwrap_or(true) {
                        best = Some((r, v));
                    }
                }
            }
            let Some((piv, _)) = best else {
                // a column with no provably nonzero entry: det is zero at the
                // precision of whatever remains
                let prec = a.at(col, col).prec();
                return Ok(LaurentSeries::zero_at(self.field, 1, prec));
            };
            if piv != col {
                det = det.neg();
                for j in 0..n {
                    let tmp = a.at(piv, j).clone();
                    a.set(piv, j, a.at(col, j).clone());
                    a.set(col, j, tmp);
                }
            }
            let p = a.at(col, col).clone();
            det = det.mul(&p)?;
            let pinv = p.invert()?;
            for r in col + 1..n {
                let f = a.at(r, col).mul(&pinv)?;
                if f.is_zero_at_prec() {
                    continue;
                }
                for j in col..n {
                    a.set(r, j, a.at(r, j).sub(&f.mul(a.at(col, j))?)?);
                }
            }
        }
        Ok(det)
    }

    /// Is every entry an element of R (valuation >= 0 where nonzero)?
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|s| s.val_index().map(|v| v >= 0).unwrap_or(true))
    }

    /// Reduce every entry mod z: the constant-term matrix.
    pub fn residue(&self) -> Result<crate::linalg::Mat> {
        let mut out = crate::linalg::Mat::zeros(self.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let s = self.at(i, j);
                if let Some(v) = s.val_index() {
                    if v < 0 {
                        return Err(Error::Internal("residue of a non-integral matrix".into()));
                    }
                }
                let c = s.coeff_at(0).ok_or(Error::EmptyWindow { lo: s.lo(), prec: s.prec() })?;
                out.set(i, j, c);
            }
        }
        Ok(out)
    }

    pub fn eq_at_prec(&self, rhs: &SMat) -> bool {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return false;
        }
        self.data.iter().zip(rhs.data.iter()).all(|(a, b)| a.is_equal_at_prec(b))
    }

    pub fn truncate_to(&self, prec: i64) -> SMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.truncate_to(prec);
        }
        out
    }

    pub fn assume_exact_to(&self, prec: i64) -> SMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.assume_exact_to(prec);
        }
        out
    }

    pub fn min_prec(&self) -> i64 {
        self.data.iter().map(|s| s.prec()).min().unwrap_or(0)
    }
}

/// Solve sum_i x_i * cols[i] = rhs over the series field, honestly at
/// precision: Some(solution) when the eliminated system is consistent within
/// every known window, None when a residual row is provably nonzero.
pub fn solve_columns(
    cols: &[Vec<LaurentSeries>],
    rhs: &[LaurentSeries],
) -> Result<Option<Vec<LaurentSeries>>> {
    let rows = rhs.len();
    let ncols = cols.len();
    let field = rhs
        .first()
        .map(|s| s.field())
        .ok_or_else(|| Error::Unsupported("empty system".into()))?;
    // augmented row-major working copy
    let mut a: Vec<Vec<LaurentSeries>> = (0..rows)
        .map(|i| {
            let mut row: Vec<LaurentSeries> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut used_rows = vec![false; rows];
    for c in 0..ncols {
        // minimal-valuation provably nonzero pivot among unused rows
        let mut best: Option<(usize, i64, i64)> = None;
        for (r, row) in a.iter().enumerate() {
            if used_rows[r] {
                continue;
            }
            if let Some(v) = row[c].val_index() {
                let ram = row[c].ram() as i64;
                let better = match best {
                    None => true,
                    Some((_, bv, bram)) => v * bram < bv * ram,
                };
                if better {
                    best = Some((r, v, ram));
                }
            }
        }
        let Some((pr, _, _)) = best else {
            continue;
        };
        used_rows[pr] = true;
        pivots.push((pr, c));
        let inv = a[pr][c].invert()?;
        for j in 0..=ncols {
            a[pr][j] = a[pr][j].mul(&inv)?;
        }
        for r in 0..rows {
            if r != pr && !a[r][c].is_zero_at_prec() {
                let f = a[r][c].clone();
                for j in 0..=ncols {
                    let t = f.mul(&a[pr][j])?;
                    a[r][j] = a[r][j].sub(&t)?;
                }
            }
        }
    }
    // consistency of pivot-free rows
    for (r, row) in a.iter().enumerate() {
        if !used_rows[r] && !row[ncols].is_zero_at_prec() {
            return Ok(None);
        }
    }
    let mut x = vec![LaurentSeries::zero_at(field, 1, i64::MAX / 2); ncols];
    for &(r, c) in &pivots {
        x[c] = a[r][ncols].clone();
    }
    Ok(Some(x))
}

/// Column rank at the working precision (provably nonzero pivots only).
pub fn column_rank(cols: &[Vec<LaurentSeries>]) -> Result<usize> {
    if cols.is_empty() {
        return Ok(0);
    }
    let rows = cols[0].len();
    let mut a: Vec<Vec<LaurentSeries>> = (0..rows)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut used_rows = vec![false; rows];
    let mut rank = 0usize;
    for c in 0..cols.len() {
        let mut best: Option<(usize, i64, i64)> = None;
        for (r, row) in a.iter().enumerate() {
            if used_rows[r] {
                continue;
            }
            if let Some(v) = row[c].val_index() {
                let ram = row[c].ram() as i64;
                let better = match best {
                    None => true,
                    Some((_, bv, bram)) => v * bram < bv * ram,
                };
                if better {
                    best = Some((r, v, ram));
                }
            }
        }
        let Some((pr, _, _)) = best else {
            continue;
        };
        used_rows[pr] = true;
        rank += 1;
        let inv = a[pr][c].invert()?;
        let piv_row: Vec<LaurentSeries> = a[pr].iter().map(|s| s.mul(&inv)).collect::<Result<_>>()?;
        a[pr] = piv_row;
        for r in 0..rows {
            if r != pr && !a[r][c].is_zero_at_prec() {
                let f = a[r][c].clone();
                for j in 0..cols.len() {
                    let t = f.mul(&a[pr][j])?;
                    a[r][j] = a[r][j].sub(&t)?;
                }
            }
        }
    }
    Ok(rank)
}
