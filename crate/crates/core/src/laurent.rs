//! Truncated formal Laurent series over an exact scalar field.
//!
//! Exponents live on the grid (1/ram)*Z; the stored index k represents the
//! exponent k/ram. A series knows its coefficients for every index < prec
//! (indices below `lo` are known zero), and nothing at or above prec.
//! Precision propagation is pessimistic by construction: an operation never
//! claims a coefficient it cannot actually determine from its operands.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
#[cfg(test)]
use num_traits::One;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{FieldSpec, Scalar};

pub const DEFAULT_PREC: i64 = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    field: FieldSpec,
    ram: u32,
    lo: i64,
    /// Dense window [lo, prec); empty means known-zero below prec.
    coeffs: Vec<Scalar>,
    prec: i64,
}

/// Three-valued equality for truncated series.
#[derive(Debug, Clone, PartialEq)]
pub enum SeriesEq {
    /// Agree at every jointly known exponent (equality *at this precision*).
    Equal { prec: i64, ram: u32 },
    /// A provably nonzero difference coefficient exists.
    Unequal,
    /// The comparison could not be carried out (e.g. coefficient precision
    /// exhausted while subtracting).
    Undecidable,
}

impl LaurentSeries {
    pub fn new(field: FieldSpec, ram: u32, lo: i64, coeffs: Vec<Scalar>, prec: i64) -> Result<Self> {
        if ram == 0 {
            return Err(Error::Unsupported("ram must be positive".into()));
        }
        if prec - lo != coeffs.len() as i64 {
            return Err(Error::Internal(format!(
                "window [{lo}, {prec}) does not match {} stored coefficients",
                coeffs.len()
            )));
        }
        let mut s = LaurentSeries { field, ram, lo, coeffs, prec };
        s.normalize();
        Ok(s)
    }

    pub fn zero_at(field: FieldSpec, ram: u32, prec: i64) -> Self {
        LaurentSeries { field, ram, lo: prec, coeffs: Vec::new(), prec }
    }

    pub fn from_terms(field: FieldSpec, ram: u32, terms: &[(i64, Scalar)], prec: i64) -> Result<Self> {
        let mut lo = prec;
        for (k, c) in terms {
            if !c.is_zero() && *k < lo {
                lo = *k;
            }
        }
        let mut coeffs = vec![Scalar::zero(field); (prec - lo).max(0) as usize];
        for (k, c) in terms {
            if *k >= prec {
                return Err(Error::Unsupported(format!(
                    "term at index {k} is at or above the precision cap {prec}"
                )));
            }
            if !c.is_zero() {
                let slot = (*k - lo) as usize;
                coeffs[slot] = coeffs[slot].add(c)?;
            }
        }
        Self::new(field, ram, lo, coeffs, prec)
    }

    pub fn constant(field: FieldSpec, c: Scalar, prec: i64) -> Self {
        Self::from_terms(field, 1, &[(0, c)], prec).expect("constant term below prec")
    }

    pub fn one(field: FieldSpec, prec: i64) -> Self {
        Self::constant(field, Scalar::one(field), prec)
    }

    /// c * z^(k/ram)
    pub fn monomial(field: FieldSpec, c: Scalar, k: i64, ram: u32, prec: i64) -> Result<Self> {
        Self::from_terms(field, ram, &[(k, c)], prec)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(n) => {
                self.coeffs.drain(..n);
                self.lo += n as i64;
            }
            None => {
                self.coeffs.clear();
                self.lo = self.prec;
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True when every known coefficient is zero ("zero at this precision").
    pub fn is_zero_at_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation index (units of 1/ram); None when zero at precision.
    pub fn val_index(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lo)
        }
    }

    pub fn val_rational(&self) -> Option<BigRational> {
        self.val_index()
            .map(|v| BigRational::new(BigInt::from(v), BigInt::from(self.ram as i64)))
    }

    pub fn leading_coeff(&self) -> Option<&Scalar> {
        self.coeffs.first()
    }

    /// Coefficient at a stored index; None when the index is not determined.
    pub fn coeff_at(&self, k: i64) -> Option<Scalar> {
        if k >= self.prec {
            return None;
        }
        if k < self.lo {
            return Some(Scalar::zero(self.field));
        }
        Some(self.coeffs[(k - self.lo) as usize].clone())
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        let lo = self.lo;
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (lo + i as i64, c))
    }

    /// Reinterpret on the grid refined by factor n (values unchanged).
    pub fn ramify(&self, n: u32) -> Self {
        if n == 1 {
            return self.clone();
        }
        let n64 = n as i64;
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * n as usize);
        for c in &self.coeffs {
            coeffs.push(c.clone());
            for _ in 1..n {
                coeffs.push(Scalar::zero(self.field));
            }
        }
        // window [n*lo, n*(prec-1)+1) is exactly what the old window determines;
        // we keep the full n*prec since off-grid exponents are structurally zero
        let mut s = LaurentSeries {
            field: self.field,
            ram: self.ram * n,
            lo: self.lo * n64,
            coeffs,
            prec: self.lo * n64 + (self.coeffs.len() as i64) * n64,
        };
        let pad = self.prec * n64 - s.prec;
        for _ in 0..pad {
            s.coeffs.push(Scalar::zero(self.field));
        }
        s.prec = self.prec * n64;
        s.normalize();
        s
    }

    /// Divide ram by any common factor of the grid actually used.
    pub fn reduce_ram(&self) -> Self {
        let mut g = self.ram as i64;
        for (k, _) in self.iter_terms() {
            g = g.gcd(&k);
            if g == 1 {
                return self.clone();
            }
        }
        if g <= 1 {
            return self.clone();
        }
        let mut terms = Vec::new();
        for (k, c) in self.iter_terms() {
            terms.push((k / g, c.clone()));
        }
        let new_prec = div_ceil_i64(self.prec, g);
        LaurentSeries::from_terms(self.field, self.ram / g as u32, &terms, new_prec)
            .expect("indices stay below the rescaled precision")
    }

    fn unified(&self, rhs: &Self) -> Result<(Self, Self)> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch(self.field.to_string(), rhs.field.to_string()));
        }
        let l = (self.ram as i64).lcm(&(rhs.ram as i64)) as u32;
        Ok((self.ramify(l / self.ram), rhs.ramify(l / rhs.ram)))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let (a, b) = self.unified(rhs)?;
        let prec = a.prec.min(b.prec);
        let lo = a.lo.min(b.lo).min(prec);
        let mut coeffs = vec![Scalar::zero(a.field); (prec - lo) as usize];
        for (src, _other) in [(&a, &b), (&b, &a)] {
            for (i, c) in src.coeffs.iter().enumerate() {
                let k = src.lo + i as i64;
                if k < prec && !c.is_zero() {
                    let slot = (k - lo) as usize;
                    coeffs[slot] = coeffs[slot].add(c)?;
                }
            }
        }
        LaurentSeries::new(a.field, a.ram, lo, coeffs, prec)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in &mut s.coeffs {
            *c = c.neg();
        }
        s
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Result<Self> {
        if c.is_zero() {
            return Ok(Self::zero_at(self.field, self.ram, self.prec));
        }
        let mut s = self.clone();
        for x in &mut s.coeffs {
            *x = x.mul(c)?;
        }
        s.normalize();
        Ok(s)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let (a, b) = self.unified(rhs)?;
        // product determined strictly below min(lo_a + prec_b, lo_b + prec_a)
        let prec = (a.lo + b.prec).min(b.lo + a.prec);
        let lo = a.lo + b.lo;
        let mut coeffs = vec![Scalar::zero(a.field); (prec - lo).max(0) as usize];
        for (i, ca) in a.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.coeffs.iter().enumerate() {
                let k = a.lo + i as i64 + b.lo + j as i64;
                if k >= prec {
                    break;
                }
                if cb.is_zero() {
                    continue;
                }
                let slot = (k - lo) as usize;
                coeffs[slot] = coeffs[slot].add(&ca.mul(cb)?)?;
            }
        }
        LaurentSeries::new(a.field, a.ram, lo.min(prec), pad_to(coeffs, (prec - lo.min(prec)) as usize, a.field), prec)
    }

    /// Multiply by z^(k/ram): shift every exponent.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.lo += k;
        s.prec += k;
        s
    }

    /// Multiply the coefficient at index m by base^m (the twist that
    /// substitutes z -> base * z when base^ram-th powers are consistent).
    pub fn scale_exponents(&self, base: &Scalar) -> Result<Self> {
        let mut s = self.clone();
        for (i, c) in s.coeffs.iter_mut().enumerate() {
            if !c.is_zero() {
                let k = s.lo + i as i64;
                *c = c.mul(&base.pow(k)?)?;
            }
        }
        Ok(s)
    }

    /// Multiplicative inverse: requires a provably nonzero leading coefficient.
    pub fn invert(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::ZeroAtPrecision);
        }
        let v = self.lo;
        let n = self.coeffs.len();
        let u0 = &self.coeffs[0];
        let u0_inv = u0.inv()?;
        let mut out = vec![Scalar::zero(self.field); n];
        out[0] = u0_inv.clone();
        for m in 1..n {
            let mut acc = Scalar::zero(self.field);
            for k in 1..=m {
                let uk = &self.coeffs[k];
                if uk.is_zero() || out[m - k].is_zero() {
                    continue;
                }
                acc = acc.add(&uk.mul(&out[m - k])?)?;
            }
            out[m] = acc.mul(&u0_inv)?.neg();
        }
        LaurentSeries::new(self.field, self.ram, -v, out, -v + n as i64)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.mul(&rhs.invert()?)
    }

    /// Substitute z -> z^n: every exponent is multiplied by n.
    pub fn substitute_power(&self, n: u32) -> Self {
        if n == 1 {
            return self.clone();
        }
        let n64 = n as i64;
        let terms: Vec<(i64, Scalar)> = self.iter_terms().map(|(k, c)| (k * n64, c.clone())).collect();
        let prec = if self.coeffs.is_empty() { self.prec * n64 } else { n64 * (self.prec - 1) + 1 };
        LaurentSeries::from_terms(self.field, self.ram, &terms, prec)
            .expect("scaled indices stay below scaled precision")
            .reduce_ram()
    }

    /// Formal exponential; requires strictly positive valuation.
    pub fn exp(&self) -> Result<Self> {
        if let Some(v) = self.val_index() {
            if v <= 0 {
                return Err(Error::Unsupported("exp needs a strictly positive valuation".into()));
            }
        }
        let mut acc = LaurentSeries::one(self.field, self.prec);
        let mut term = LaurentSeries::one(self.field, self.prec);
        let mut k: i64 = 1;
        loop {
            term = term.mul(self)?;
            if term.is_zero_at_prec() {
                break;
            }
            let kinv = Scalar::from_integer(self.field, k).inv()?;
            term = term.scalar_mul(&kinv)?;
            acc = acc.add(&term)?;
            if term.val_index().map(|v| v >= acc.prec()).unwrap_or(true) {
                break;
            }
            k += 1;
        }
        Ok(acc)
    }

    /// Formal logarithm of 1 + g with val(g) > 0; input is the full series.
    pub fn log(&self) -> Result<Self> {
        let one = LaurentSeries::one(self.field, self.prec);
        let g = self.sub(&one)?;
        if let Some(v) = g.val_index() {
            if v <= 0 {
                return Err(Error::Unsupported("log needs f = 1 + g with positive valuation".into()));
            }
        }
        let mut acc = LaurentSeries::zero_at(self.field, g.ram(), g.prec());
        let mut pw = LaurentSeries::one(self.field, g.prec());
        let mut k: i64 = 1;
        loop {
            pw = pw.mul(&g)?;
            if pw.is_zero_at_prec() {
                break;
            }
            let c = Scalar::from_integer(self.field, if k % 2 == 1 { 1 } else { -1 })
                .div(&Scalar::from_integer(self.field, k))?;
            acc = acc.add(&pw.scalar_mul(&c)?)?;
            if pw.val_index().map(|v| v >= acc.prec()).unwrap_or(true) {
                break;
            }
            k += 1;
        }
        Ok(acc)
    }

    /// Three-valued equality on the common known window.
    pub fn eq_series(&self, rhs: &Self) -> SeriesEq {
        match self.sub(rhs) {
            Ok(d) => {
                if d.is_zero_at_prec() {
                    SeriesEq::Equal { prec: d.prec, ram: d.ram }
                } else {
                    SeriesEq::Unequal
                }
            }
            Err(Error::PrecisionExhausted(_)) => SeriesEq::Undecidable,
            Err(_) => SeriesEq::Undecidable,
        }
    }

    pub fn is_equal_at_prec(&self, rhs: &Self) -> bool {
        matches!(self.eq_series(rhs), SeriesEq::Equal { .. })
    }

    /// Reduce the cap; discards knowledge above new_prec.
    pub fn truncate_to(&self, new_prec: i64) -> Self {
        if new_prec >= self.prec {
            return self.clone();
        }
        let lo = self.lo.min(new_prec);
        let keep = (new_prec - lo).max(0) as usize;
        let mut s = LaurentSeries {
            field: self.field,
            ram: self.ram,
            lo,
            coeffs: self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
            prec: new_prec,
        };
        while s.coeffs.len() < keep {
            s.coeffs.push(Scalar::zero(self.field));
        }
        s.normalize();
        s
    }

    /// Declare the data exact and extend the window with zeros. Only valid
    /// for series that were constructed from exact (polynomial) input.
    pub fn assume_exact_to(&self, new_prec: i64) -> Self {
        if new_prec <= self.prec {
            return self.truncate_to(new_prec);
        }
        let mut s = self.clone();
        for _ in 0..(new_prec - self.prec) {
            s.coeffs.push(Scalar::zero(self.field));
        }
        s.prec = new_prec;
        if s.coeffs.is_empty() {
            s.lo = new_prec;
        }
        s.normalize();
        s
    }
}

fn pad_to(mut v: Vec<Scalar>, n: usize, field: FieldSpec) -> Vec<Scalar> {
    while v.len() < n {
        v.push(Scalar::zero(field));
    }
    v.truncate(n);
    v
}

pub fn div_ceil_i64(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    if a >= 0 {
        (a + b - 1) / b
    } else {
        -((-a) / b)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ram={}; prec={}; terms:", self.ram, self.prec)?;
        let mut first = true;
        for (k, c) in self.iter_terms() {
            if first {
                write!(f, " {k}:{c}")?;
                first = false;
            } else {
                write!(f, ", {k}:{c}")?;
            }
        }
        if first {
            write!(f, " (zero)")?;
        }
        write!(f, "}}")
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use test_support::*;

    fn fs() -> FieldSpec {
        FieldSpec::Rational
    }

    fn poly(terms: &[(i64, i64)], prec: i64) -> LaurentSeries {
        let ts: Vec<(i64, Scalar)> =
            terms.iter().map(|&(k, c)| (k, Scalar::from_integer(fs(), c))).collect();
        LaurentSeries::from_terms(fs(), 1, &ts, prec).unwrap()
    }

    #[test]
    fn one_plus_z_times_one_minus_z() {
        let f = poly(&[(0, 1), (1, 1)], 32);
        let g = poly(&[(0, 1), (1, -1)], 32);
        let prod = f.mul(&g).unwrap();
        let expect = poly(&[(0, 1), (2, -1)], 32);
        assert!(prod.is_equal_at_prec(&expect));
        assert_eq!(prod.prec(), 32); // min(0+32, 0+32)
    }

    #[test]
    fn ramified_square_root_multiplies() {
        // z^(1/2) * z^(1/2) = z
        let h = LaurentSeries::monomial(fs(), Scalar::one(fs()), 1, 2, 64).unwrap();
        let z = h.mul(&h).unwrap();
        assert_eq!(z.val_rational(), Some(BigRational::one()));
        let z1 = z.reduce_ram();
        assert_eq!(z1.ram(), 1);
        assert_eq!(z1.val_index(), Some(1));
    }

    #[test]
    fn add_roundtrip_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let f = random_series(&mut rng, fs(), -3, 32);
            let g = random_series(&mut rng, fs(), -3, 32);
            let back = f.add(&g).unwrap().sub(&g).unwrap();
            assert!(back.is_equal_at_prec(&f));
        }
    }

    #[test]
    fn geometric_inverse() {
        let f = poly(&[(0, 1), (1, -1)], 8);
        let inv = f.invert().unwrap();
        // 1 + z + z^2 + ...
        for k in 0..8 {
            assert_eq!(inv.coeff_at(k).unwrap(), Scalar::one(fs()));
        }
        let z2 = poly(&[(2, 1)], 8);
        let iz2 = z2.invert().unwrap();
        assert_eq!(iz2.val_index(), Some(-2));
    }

    #[test]
    fn invert_multiply_back_on_random_units() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let u = random_unit(&mut rng, fs(), 24);
            let prod = u.mul(&u.invert().unwrap()).unwrap();
            assert!(prod.is_equal_at_prec(&LaurentSeries::one(fs(), prod.prec())));
        }
    }

    #[test]
    fn substitute_power_examples() {
        let f = poly(&[(1, 1), (3, 1)], 16);
        let g = f.substitute_power(2);
        assert_eq!(g.coeff_at(2).unwrap(), Scalar::one(fs()));
        assert_eq!(g.coeff_at(6).unwrap(), Scalar::one(fs()));
        assert_eq!(g.coeff_at(4).unwrap(), Scalar::zero(fs()));
        assert!(f.substitute_power(1).is_equal_at_prec(&f));
    }

    #[test]
    fn substitute_after_ramify_is_exponent_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let f = random_series(&mut rng, fs(), -2, 20);
            let n = 3u32;
            // ramify leaves exponents alone; substitution multiplies each
            // exponent by n, landing back on the integer grid
            let g = f.ramify(n).substitute_power(n);
            assert_eq!(g.ram(), 1);
            for (k, c) in f.iter_terms() {
                assert_eq!(g.coeff_at(n as i64 * k).unwrap(), c.clone());
            }
        }
    }

    #[test]
    fn ramify_valuation_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_unit(&mut rng, fs(), 20);
        let g = f.ramify(2);
        let half = LaurentSeries::monomial(fs(), Scalar::one(fs()), 1, 2, 40).unwrap();
        let shifted = g.mul(&half).unwrap();
        assert_eq!(
            shifted.val_rational().unwrap(),
            f.val_rational().unwrap() + BigRational::new(BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn exp_log_roundtrip() {
        let f = poly(&[(1, 1), (2, 3)], 8);
        let e = f.exp().unwrap();
        let back = e.log().unwrap();
        assert!(back.is_equal_at_prec(&f));
        let zero = LaurentSeries::zero_at(fs(), 1, 8);
        assert!(zero.exp().unwrap().is_equal_at_prec(&LaurentSeries::one(fs(), 8)));
    }

    #[test]
    fn exp_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let f = random_series(&mut rng, fs(), 1, 12);
            let g = random_series(&mut rng, fs(), 1, 12);
            let lhs = f.add(&g).unwrap().exp().unwrap();
            let rhs = f.exp().unwrap().mul(&g.exp().unwrap()).unwrap();
            assert!(lhs.is_equal_at_prec(&rhs));
        }
    }

    #[test]
    fn exp_rejects_nonpositive_valuation() {
        let f = poly(&[(0, 1)], 8);
        assert!(f.exp().is_err());
        let g = poly(&[(-1, 1)], 8);
        assert!(g.exp().is_err());
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..60 {
            let f = random_series(&mut rng, fs(), -2, 32);
            let g = random_series(&mut rng, fs(), -2, 32);
            let h = random_series(&mut rng, fs(), -2, 32);
            let l = f.mul(&g).unwrap().mul(&h).unwrap();
            let r = f.mul(&g.mul(&h).unwrap()).unwrap();
            assert!(l.is_equal_at_prec(&r));
            let dl = f.mul(&g.add(&h).unwrap()).unwrap();
            let dr = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
            assert!(dl.is_equal_at_prec(&dr));
        }
    }

    #[test]
    fn valuation_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let f = random_series(&mut rng, fs(), -3, 24);
            let g = random_series(&mut rng, fs(), -3, 24);
            if let (Some(vf), Some(vg)) = (f.val_index(), g.val_index()) {
                let p = f.mul(&g).unwrap();
                assert_eq!(p.val_index(), Some(vf + vg));
            }
        }
    }

    #[test]
    fn precision_never_optimistic() {
        // recomputing at larger precision never contradicts reported coefficients
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let f = random_series(&mut rng, fs(), -2, 16);
            let g = random_series(&mut rng, fs(), -2, 16);
            let fe = f.assume_exact_to(32);
            let ge = g.assume_exact_to(32);
            let small = f.mul(&g).unwrap();
            let large = fe.mul(&ge).unwrap();
            for k in small.lo()..small.prec() {
                assert_eq!(small.coeff_at(k), large.coeff_at(k));
            }
        }
    }

    #[test]
    fn display_format() {
        let f = LaurentSeries::from_terms(
            fs(),
            2,
            &[
                (-1, Scalar::from_rational(fs(), BigRational::new(BigInt::from(2), BigInt::from(3)))),
                (0, Scalar::one(fs())),
            ],
            32,
        )
        .unwrap();
        assert_eq!(format!("{f}"), "{ram=2; prec=32; terms: -1:2/3, 0:1}");
    }
}
