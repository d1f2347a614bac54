//! Dense exact linear algebra over [`Scalar`] fields: elimination, kernels,
//! characteristic polynomials, and the Jordan data the lattice machinery
//! reads off residue maps.

use crate::error::{Error, Result};
use crate::scalars::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    field: FieldSpec,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, field, data: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Mat { rows: r, cols: c, field, data }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn mul(&self, rhs: &Mat) -> Result<Mat> {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j).add(&a.mul(b)?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Scalar::zero(self.field); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.at(i, j);
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                out[i] = out[i].add(&a.mul(&v[j])?)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Mat) -> Result<Mat> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.data[i] = out.data[i].add(&rhs.data[i])?;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Mat) -> Result<Mat> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for i in 0..self.rows * self.cols {
            out.data[i] = out.data[i].sub(&rhs.data[i])?;
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Result<Mat> {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.mul(c)?;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Scalar> {
        let mut t = Scalar::zero(self.field);
        for i in 0..self.rows.min(self.cols) {
            t = t.add(self.at(i, i))?;
        }
        Ok(t)
    }

    pub fn pow(&self, e: u32) -> Result<Mat> {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Append columns of `rhs` to the right.
    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Mat::zeros(self.field, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).clone());
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.at(i, j).clone());
            }
        }
        out
    }

    /// Row-reduce in place; returns pivot columns.
    pub fn rref(&mut self) -> Result<Vec<usize>> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    let tmp = self.at(pr, j).clone();
                    self.set(pr, j, self.at(r, j).clone());
                    self.set(r, j, tmp);
                }
            }
            let inv = self.at(r, c).inv()?;
            for j in c..self.cols {
                let v = self.at(r, j).mul(&inv)?;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let v = self.at(i, j).sub(&f.mul(self.at(r, j))?)?;
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok(pivots)
    }

    pub fn rank(&self) -> Result<usize> {
        let mut m = self.clone();
        Ok(m.rref()?.len())
    }

    /// Kernel basis (column vectors).
    pub fn kernel_basis(&self) -> Result<Vec<Vec<Scalar>>> {
        let mut m = self.clone();
        let pivots = m.rref()?;
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(self.field); self.cols];
            v[free] = Scalar::one(self.field);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = m.at(row, free).neg();
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Solve A x = b; Ok(None) when inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        assert_eq!(self.rows, b.len());
        let bm = Mat::from_rows(self.field, b.iter().map(|x| vec![x.clone()]).collect());
        let mut aug = self.hstack(&bm);
        let pivots = aug.rref()?;
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Scalar::zero(self.field); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(row, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols);
        let mut aug = self.hstack(&Mat::identity(self.field, self.rows));
        let pivots = aug.rref()?;
        if pivots.len() < self.rows {
            return Err(Error::DivisionByZero);
        }
        let mut out = Mat::zeros(self.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, aug.at(i, self.cols + j).clone());
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<Scalar> {
        assert_eq!(self.rows, self.cols);
        let cp = self.char_poly()?;
        // det = (-1)^n * c_0
        let c0 = cp[0].clone();
        Ok(if self.rows % 2 == 1 { c0.neg() } else { c0 })
    }

    /// Characteristic polynomial, monic, ascending coefficients
    /// (Faddeev-LeVerrier; valid over fields containing Q).
    pub fn char_poly(&self) -> Result<Vec<Scalar>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let f = self.field;
        let mut coeffs = vec![Scalar::zero(f); n + 1];
        coeffs[n] = Scalar::one(f);
        let mut m = Mat::identity(f, n);
        for k in 1..=n {
            m = self.mul(&m)?;
            let c = m.trace()?.div(&Scalar::from_integer(f, k as i64))?.neg();
            coeffs[n - k] = c.clone();
            for i in 0..n {
                let v = m.at(i, i).add(&c)?;
                m.set(i, i, v);
            }
        }
        Ok(coeffs)
    }

    /// Basis of ker((M - alpha I)^rows), as column vectors.
    pub fn generalized_eigenspace(&self, alpha: &Scalar) -> Result<Vec<Vec<Scalar>>> {
        assert_eq!(self.rows, self.cols);
        let shifted = self.sub(&Mat::identity(self.field, self.rows).scalar_mul(alpha)?)?;
        shifted.pow(self.rows as u32)?.kernel_basis()
    }

    /// Jordan block sizes of M at eigenvalue alpha, largest first.
    pub fn jordan_sizes_at(&self, alpha: &Scalar) -> Result<Vec<usize>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let shifted = self.sub(&Mat::identity(self.field, n).scalar_mul(alpha)?)?;
        let mut ranks = Vec::with_capacity(n + 2);
        let mut pw = Mat::identity(self.field, n);
        ranks.push(n);
        for _ in 1..=n + 1 {
            pw = pw.mul(&shifted)?;
            ranks.push(pw.rank()?);
        }
        // blocks of size >= j: rank((M-a)^{j-1}) - rank((M-a)^j)
        let mut sizes = Vec::new();
        for j in 1..=n {
            let at_least_j = ranks[j - 1] - ranks[j];
            let at_least_j1 = ranks[j] - ranks[j + 1];
            let exactly_j = at_least_j - at_least_j1;
            for _ in 0..exactly_j {
                sizes.push(j);
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(sizes)
    }

    /// P^{-1} M P.
    pub fn conjugate_by(&self, p: &Mat) -> Result<Mat> {
        p.inverse()?.mul(self)?.mul(p)
    }
}

/// Evaluate a polynomial with Scalar coefficients (ascending) at x.
pub fn poly_eval(coeffs: &[Scalar], x: &Scalar) -> Result<Scalar> {
    let field = x.field_spec();
    let mut acc = Scalar::zero(field);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x)?.add(c)?;
    }
    Ok(acc)
}

/// Synthetic division of p (ascending coeffs) by (X - r); returns quotient
/// and remainder value. For p-adic scalars a sum whose known digits cancel
/// entirely is taken to be zero at the working precision (this helper tests
/// divisibility at precision rather than exactly).
pub fn poly_divide_linear(coeffs: &[Scalar], r: &Scalar) -> Result<(Vec<Scalar>, Scalar)> {
    let n = coeffs.len();
    if n == 0 {
        return Ok((vec![], Scalar::zero(r.field_spec())));
    }
    let field = r.field_spec();
    let lenient_add = |a: &Scalar, b: &Scalar| -> Result<Scalar> {
        match a.add(b) {
            Ok(v) => Ok(v),
            Err(Error::PrecisionExhausted(_)) => Ok(Scalar::zero(field)),
            Err(e) => Err(e),
        }
    };
    let mut q = vec![Scalar::zero(field); n - 1];
    let mut carry = Scalar::zero(field);
    for k in (0..n).rev() {
        let v = lenient_add(&coeffs[k], &carry)?;
        if k == 0 {
            return Ok((q, v));
        }
        q[k - 1] = v.clone();
        carry = v.mul(r)?;
    }
    unreachable!()
}
