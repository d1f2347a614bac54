//! The non-archimedean quantum torus: the twisted group algebra on Z^d over
//! a p-adic field, with commutation data given by a matrix of unit-norm
//! scalars, the Banach norm max |a(lambda)| r^lambda, and certified
//! truncation.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::{AbsValue, PadicScalar, Scalar};

/// Commutation data: chi[i][j] of p-adic norm 1 with chi[i][j] chi[j][i] = 1
/// and chi[i][i] = 1. The bicharacter chi(lambda, mu) =
/// prod_{i<j} chi[i][j]^(lambda_i mu_j - lambda_j mu_i) is bimultiplicative
/// and skew (chi(l, m) chi(m, l) = 1) by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusForm {
    pub d: usize,
    chi: Vec<Vec<Scalar>>,
}

impl TorusForm {
    pub fn new(chi: Vec<Vec<Scalar>>) -> Result<Arc<Self>> {
        let d = chi.len();
        if d == 0 || chi.iter().any(|row| row.len() != d) {
            return Err(Error::Unsupported("chi must be a nonempty square matrix".into()));
        }
        for (i, row) in chi.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let unit_norm = match x.abs_value()? {
                    AbsValue::Rational(r) => r.is_one(),
                    AbsValue::ModulusSquared(r) => r.is_one(),
                    AbsValue::RealQuadratic(_) => false,
                };
                if !unit_norm {
                    return Err(Error::Unsupported(format!(
                        "chi[{i}][{j}] must have absolute value exactly 1"
                    )));
                }
                if i == j && !x.is_one() {
                    return Err(Error::Unsupported("chi must have unit diagonal".into()));
                }
                if !chi[j][i].mul(x)?.is_one() {
                    return Err(Error::Unsupported(format!(
                        "chi[{i}][{j}] * chi[{j}][{i}] must be 1"
                    )));
                }
            }
        }
        Ok(Arc::new(TorusForm { d, chi }))
    }

    /// Rank-d form with a single commutation scalar between e_0 and e_1 and
    /// trivial commutation elsewhere.
    pub fn with_single_twist(d: usize, c: Scalar) -> Result<Arc<Self>> {
        if d < 2 {
            return Err(Error::Unsupported("need rank >= 2 for a twist".into()));
        }
        let field = c.field_spec();
        let mut chi = vec![vec![Scalar::one(field); d]; d];
        chi[0][1] = c.clone();
        chi[1][0] = c.inv()?;
        Self::new(chi)
    }

    /// chi(lambda, mu) = prod_{i<j} chi[i][j]^(l_i m_j - l_j m_i).
    pub fn bicharacter(&self, l: &[i64], m: &[i64]) -> Result<Scalar> {
        assert_eq!(l.len(), self.d);
        assert_eq!(m.len(), self.d);
        let field = self.chi[0][0].field_spec();
        let mut acc = Scalar::one(field);
        for i in 0..self.d {
            for j in i + 1..self.d {
                let e = l[i] * m[j] - l[j] * m[i];
                if e != 0 {
                    acc = acc.mul(&self.chi[i][j].pow(e)?)?;
                }
            }
        }
        Ok(acc)
    }
}

/// Finitely supported element sum a(lambda) e(lambda) of the quantum torus.
#[derive(Debug, Clone)]
pub struct TorusElement {
    form: Arc<TorusForm>,
    coeffs: BTreeMap<Vec<i64>, PadicScalar>,
}

impl TorusElement {
    /// Aggregate terms into the sparse support map. A coefficient sum whose
    /// known digits cancel entirely is indistinguishable from zero at the
    /// working precision and leaves the support.
    pub fn new(form: Arc<TorusForm>, terms: Vec<(Vec<i64>, PadicScalar)>) -> Result<Self> {
        let mut coeffs: BTreeMap<Vec<i64>, PadicScalar> = BTreeMap::new();
        for (l, c) in terms {
            if l.len() != form.d {
                return Err(Error::Unsupported("index rank mismatch".into()));
            }
            if c.is_zero() {
                continue;
            }
            match coeffs.remove(&l) {
                None => {
                    coeffs.insert(l, c);
                }
                Some(prev) => match prev.add(&c) {
                    Ok(s) => {
                        if !s.is_zero() {
                            coeffs.insert(l, s);
                        }
                    }
                    Err(Error::PrecisionExhausted(_)) => {}
                    Err(e) => return Err(e),
                },
            }
        }
        Ok(TorusElement { form, coeffs })
    }

    pub fn zero(form: Arc<TorusForm>) -> Self {
        TorusElement { form, coeffs: BTreeMap::new() }
    }

    /// The generator e(lambda) with unit coefficient.
    pub fn generator(form: Arc<TorusForm>, l: Vec<i64>, p: u64, prec: u32) -> Result<Self> {
        let c = PadicScalar::from_integer(p, 1, prec)?;
        Self::new(form, vec![(l, c)])
    }

    pub fn form(&self) -> &Arc<TorusForm> {
        &self.form
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &PadicScalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, l: &[i64]) -> Option<&PadicScalar> {
        self.coeffs.get(l)
    }

    fn check_form(&self, rhs: &Self) -> Result<()> {
        if self.form.as_ref() != rhs.form.as_ref() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_form(rhs)?;
        let mut terms: Vec<(Vec<i64>, PadicScalar)> =
            self.coeffs.iter().map(|(l, c)| (l.clone(), c.clone())).collect();
        terms.extend(rhs.coeffs.iter().map(|(l, c)| (l.clone(), c.clone())));
        Self::new(self.form.clone(), terms)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(l, c)| (l.clone(), c.neg())).collect();
        TorusElement { form: self.form.clone(), coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    /// Twisted convolution: e(l) e(m) = chi(l, m) e(l + m).
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_form(rhs)?;
        let mut terms: Vec<(Vec<i64>, PadicScalar)> = Vec::new();
        for (l, a) in &self.coeffs {
            for (m, b) in &rhs.coeffs {
                let nu: Vec<i64> = l.iter().zip(m).map(|(x, y)| x + y).collect();
                let chi = self.form.bicharacter(l, m)?;
                let Scalar::Padic(chi_p) = chi else {
                    return Err(Error::Unsupported("torus coefficients must be p-adic".into()));
                };
                let c = a.mul(b)?.mul(&chi_p)?;
                terms.push((nu, c));
            }
        }
        Self::new(self.form.clone(), terms)
    }

    /// Exact Banach norm max |a(lambda)| r^lambda for a radius vector r.
    pub fn norm(&self, r: &RadiusVector) -> Result<BigRational> {
        if r.r.len() != self.form.d {
            return Err(Error::Unsupported("radius rank mismatch".into()));
        }
        let mut best = BigRational::zero();
        for (l, c) in &self.coeffs {
            let t = term_weight(c, l, r)?;
            if t > best {
                best = t;
            }
        }
        Ok(best)
    }

    /// Drop terms with |a(lambda)| r^lambda < eps; the returned tail bound is
    /// the exact maximum of the dropped weights and equals ||f - f'||.
    pub fn truncate(&self, r: &RadiusVector, eps: &BigRational) -> Result<(Self, BigRational)> {
        let mut kept = Vec::new();
        let mut tail = BigRational::zero();
        for (l, c) in &self.coeffs {
            let t = term_weight(c, l, r)?;
            if &t < eps {
                if t > tail {
                    tail = t;
                }
            } else {
                kept.push((l.clone(), c.clone()));
            }
        }
        Ok((Self::new(self.form.clone(), kept)?, tail))
    }

    /// Decreasing rearrangement of term weights: the finite-support witness
    /// of the decay condition.
    pub fn membership_report(&self, r: &RadiusVector) -> Result<Vec<BigRational>> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (l, c) in &self.coeffs {
            out.push(term_weight(c, l, r)?);
        }
        out.sort_by(|a, b| b.cmp(a));
        Ok(out)
    }

    pub fn eq_at_common_precision(&self, rhs: &Self) -> bool {
        if self.form.as_ref() != rhs.form.as_ref() || self.coeffs.len() != rhs.coeffs.len() {
            return false;
        }
        self.coeffs.iter().zip(rhs.coeffs.iter()).all(|((l1, c1), (l2, c2))| {
            l1 == l2 && c1.eq_at_common_precision(c2)
        })
    }
}

fn term_weight(c: &PadicScalar, l: &[i64], r: &RadiusVector) -> Result<BigRational> {
    let mut t = c.abs();
    for (li, ri) in l.iter().zip(&r.r) {
        t *= rat_pow(ri, *li);
    }
    Ok(t)
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return writeln!(f, "(zero)");
        }
        for (l, c) in &self.coeffs {
            let idx: Vec<String> = l.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{} : {}", idx.join(" "), c)?;
        }
        Ok(())
    }
}

/// Positive radius vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusVector {
    pub r: Vec<BigRational>,
}

impl RadiusVector {
    pub fn new(r: Vec<BigRational>) -> Result<Self> {
        if r.iter().any(|x| !x.is_positive()) {
            return Err(Error::Unsupported("radius entries must be positive".into()));
        }
        Ok(RadiusVector { r })
    }

    pub fn ones(d: usize) -> Self {
        RadiusVector { r: vec![BigRational::one(); d] }
    }
}

fn rat_pow(r: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let base = if e > 0 { r.clone() } else { r.recip() };
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: u64 = 5;
    const PREC: u32 = 12;

    fn form2() -> Arc<TorusForm> {
        // chi[0][1] = 2: a p-adic unit
        let f = crate::scalars::FieldSpec::Padic { p: P, prec: PREC };
        TorusForm::with_single_twist(2, Scalar::from_integer(f, 2)).unwrap()
    }

    fn pad(n: i64) -> PadicScalar {
        PadicScalar::from_integer(P, n, PREC).unwrap()
    }

    #[test]
    fn generator_relation() {
        let form = form2();
        let e1 = TorusElement::generator(form.clone(), vec![1, 0], P, PREC).unwrap();
        let e2 = TorusElement::generator(form.clone(), vec![0, 1], P, PREC).unwrap();
        let prod = e1.mul(&e2).unwrap();
        assert_eq!(prod.support_len(), 1);
        let c = prod.coeff(&[1, 1]).unwrap();
        // chi((1,0),(0,1)) = chi[0][1] = 2
        assert!(c.eq_at_common_precision(&pad(2)));
        // commutation factor: e2 e1 picks up the inverse
        let prod2 = e2.mul(&e1).unwrap();
        let c2 = prod2.coeff(&[1, 1]).unwrap();
        let ratio = c.div(c2).unwrap();
        assert!(ratio.eq_at_common_precision(&pad(4)));
    }

    #[test]
    fn unit_is_neutral() {
        let form = form2();
        let one = TorusElement::generator(form.clone(), vec![0, 0], P, PREC).unwrap();
        let f = TorusElement::new(
            form.clone(),
            vec![(vec![1, 0], pad(3)), (vec![0, 2], pad(7)), (vec![-1, 1], pad(10))],
        )
        .unwrap();
        assert!(f.mul(&one).unwrap().eq_at_common_precision(&f));
        assert!(one.mul(&f).unwrap().eq_at_common_precision(&f));
    }

    #[test]
    fn skew_symmetry_of_bicharacter() {
        let form = form2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let l = vec![rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4)];
            let m = vec![rng.gen_range(-4i64..=4), rng.gen_range(-4i64..=4)];
            let a = form.bicharacter(&l, &m).unwrap();
            let b = form.bicharacter(&m, &l).unwrap();
            assert!(a.mul(&b).unwrap().is_one());
        }
    }

    fn random_element(rng: &mut ChaCha8Rng, form: &Arc<TorusForm>) -> TorusElement {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let l = vec![rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3)];
            let c = rng.gen_range(1i64..=40);
            terms.push((l, pad(c)));
        }
        TorusElement::new(form.clone(), terms).unwrap()
    }

    #[test]
    fn associativity_on_random_triples() {
        let form = form2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let f = random_element(&mut rng, &form);
            let g = random_element(&mut rng, &form);
            let h = random_element(&mut rng, &form);
            let l = f.mul(&g).unwrap().mul(&h).unwrap();
            let r = f.mul(&g.mul(&h).unwrap()).unwrap();
            assert!(l.eq_at_common_precision(&r));
        }
    }

    #[test]
    fn norm_examples() {
        let form = form2();
        let r = RadiusVector::ones(2);
        let e = TorusElement::generator(form.clone(), vec![2, -1], P, PREC).unwrap();
        assert_eq!(e.norm(&r).unwrap(), BigRational::one());
        // 5 e(0,0) + e(1,0) at r = (1,1): max(1/5, 1) = 1
        let f = TorusElement::new(
            form.clone(),
            vec![(vec![0, 0], pad(5)), (vec![1, 0], pad(1))],
        )
        .unwrap();
        assert_eq!(f.norm(&r).unwrap(), BigRational::one());
        // with r = (5, 1) the second term weighs 5
        let r2 = RadiusVector::new(vec![
            BigRational::from(BigInt::from(5)),
            BigRational::one(),
        ])
        .unwrap();
        assert_eq!(f.norm(&r2).unwrap(), BigRational::from(BigInt::from(5)));
        assert_eq!(TorusElement::zero(form).norm(&r).unwrap(), BigRational::zero());
    }

    #[test]
    fn submultiplicative_and_ultrametric() {
        let form = form2();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let radii = [
            RadiusVector::ones(2),
            RadiusVector::new(vec![BigRational::from(BigInt::from(5)), BigRational::one()]).unwrap(),
            RadiusVector::new(vec![
                BigRational::new(BigInt::from(1), BigInt::from(5)),
                BigRational::from(BigInt::from(3)),
            ])
            .unwrap(),
        ];
        for _ in 0..200 {
            let f = random_element(&mut rng, &form);
            let g = random_element(&mut rng, &form);
            for r in &radii {
                let nf = f.norm(r).unwrap();
                let ng = g.norm(r).unwrap();
                assert!(f.mul(&g).unwrap().norm(r).unwrap() <= &nf * &ng);
                let nsum = f.add(&g).unwrap().norm(r).unwrap();
                assert!(nsum <= nf.max(ng));
            }
        }
    }

    #[test]
    fn truncation_is_certified() {
        let form = form2();
        let r = RadiusVector::ones(2);
        let f = TorusElement::new(
            form.clone(),
            vec![
                (vec![0, 0], pad(1)),
                (vec![1, 0], pad(5)),
                (vec![0, 1], pad(25)),
            ],
        )
        .unwrap();
        // eps = 1/10 drops weights 1/25 (and keeps 1, 1/5)
        let eps = BigRational::new(BigInt::from(1), BigInt::from(10));
        let (ft, tail) = f.truncate(&r, &eps).unwrap();
        assert_eq!(ft.support_len(), 2);
        assert_eq!(tail, BigRational::new(BigInt::from(1), BigInt::from(25)));
        let diff_norm = f.sub(&ft).unwrap().norm(&r).unwrap();
        assert_eq!(diff_norm, tail);
        // eps larger than the norm drops everything
        let big = BigRational::from(BigInt::from(10));
        let (f0, t0) = f.truncate(&r, &big).unwrap();
        assert_eq!(f0.support_len(), 0);
        assert_eq!(t0, f.norm(&r).unwrap());
        // eps below every weight keeps everything
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(1000));
        let (fall, tall) = f.truncate(&r, &tiny).unwrap();
        assert!(fall.eq_at_common_precision(&f));
        assert!(tall.is_zero());
    }

    #[test]
    fn membership_report_sorted() {
        let form = form2();
        let r = RadiusVector::ones(2);
        let f = TorusElement::new(
            form.clone(),
            vec![
                (vec![0, 0], pad(25)),
                (vec![1, 0], pad(1)),
                (vec![0, 1], pad(5)),
            ],
        )
        .unwrap();
        let rep = f.membership_report(&r).unwrap();
        assert_eq!(
            rep,
            vec![
                BigRational::one(),
                BigRational::new(BigInt::from(1), BigInt::from(5)),
                BigRational::new(BigInt::from(1), BigInt::from(25)),
            ]
        );
        let single = TorusElement::generator(form, vec![1, 1], P, PREC).unwrap();
        assert_eq!(single.membership_report(&r).unwrap().len(), 1);
    }

    #[test]
    fn report_after_product_respects_submultiplicativity() {
        let form = form2();
        let r = RadiusVector::ones(2);
        let f = TorusElement::new(form.clone(), vec![(vec![1, 0], pad(1))]).unwrap();
        let g = TorusElement::new(
            form.clone(),
            vec![(vec![0, 1], pad(5)), (vec![1, 1], pad(25))],
        )
        .unwrap();
        let bound = f.norm(&r).unwrap() * g.norm(&r).unwrap();
        for w in f.mul(&g).unwrap().membership_report(&r).unwrap() {
            assert!(w <= bound);
        }
    }
}
