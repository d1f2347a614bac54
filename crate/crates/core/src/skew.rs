//! The skew Laurent polynomial algebra F[xi, xi^-1] with xi f(z) = f(qz) xi:
//! twisted multiplication, the span function, one-sided Euclidean division,
//! Newton polygons and single-slope normalization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::scalars::{FieldSpec, Scalar};

pub const DEFAULT_ROOT_CHECK_BOUND: u32 = 64;
pub const DEFAULT_ORBIT_BOUND: i64 = 24;

/// Shared data of the algebra: the field, the twist q, working precision,
/// orbit bound, and any declared ramification roots s with s^r = q (needed
/// before the twist can act on series with fractional exponents).
#[derive(Debug, Clone)]
pub struct AlgebraContext {
    pub field: FieldSpec,
    pub q: Scalar,
    pub prec: i64,
    pub root_check_bound: u32,
    pub orbit_bound: i64,
    pub tolerant: bool,
    ram_roots: BTreeMap<u32, Scalar>,
}

impl PartialEq for AlgebraContext {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.q == other.q
    }
}

impl AlgebraContext {
    pub fn new(q: Scalar, prec: i64) -> Result<Arc<Self>> {
        Self::with_options(q, prec, DEFAULT_ROOT_CHECK_BOUND, DEFAULT_ORBIT_BOUND, false)
    }

    pub fn with_options(
        q: Scalar,
        prec: i64,
        root_check_bound: u32,
        orbit_bound: i64,
        tolerant: bool,
    ) -> Result<Arc<Self>> {
        if q.is_zero() {
            return Err(Error::ZeroInput);
        }
        if !tolerant {
            if let Some(order) = q.root_of_unity_order(root_check_bound)? {
                return Err(Error::RootOfUnity(order));
            }
        }
        Ok(Arc::new(AlgebraContext {
            field: q.field_spec(),
            q,
            prec,
            root_check_bound,
            orbit_bound,
            tolerant,
        ram_roots: BTreeMap::new(),
        }))
    }

    /// Attach an r-th root of q so the twist can act on ram-r series.
    pub fn with_ram_root(self: &Arc<Self>, r: u32, s: Scalar) -> Result<Arc<Self>> {
        if s.pow(r as i64)? != self.q {
            return Err(Error::RootRelation(r));
        }
        let mut ctx = (**self).clone();
        ctx.ram_roots.insert(r, s);
        Ok(Arc::new(ctx))
    }

    /// Base scalar s with sigma(z^(1/ram)) = s * z^(1/ram).
    pub fn sigma_base(&self, ram: u32) -> Result<Scalar> {
        if ram == 1 {
            return Ok(self.q.clone());
        }
        self.ram_roots
            .get(&ram)
            .cloned()
            .ok_or(Error::MissingRamRoot(ram))
    }

    pub fn q_pow(&self, m: i64) -> Result<Scalar> {
        self.q.pow(m)
    }

    /// Context for the twist q^n (used by the xi^n restriction).
    pub fn derived_power(self: &Arc<Self>, n: u32) -> Result<Arc<Self>> {
        // q not a root of unity implies q^n is not either; skip the re-check
        Ok(Arc::new(AlgebraContext {
            field: self.field,
            q: self.q.pow(n as i64)?,
            prec: self.prec,
            root_check_bound: self.root_check_bound,
            orbit_bound: self.orbit_bound.saturating_mul(n as i64),
            tolerant: self.tolerant,
            ram_roots: BTreeMap::new(),
        }))
    }

    /// Apply sigma^i to a series: the coefficient at exponent index m (in
    /// 1/ram units) is multiplied by s^(i*m) where s^ram = q.
    pub fn sigma_pow(&self, f: &LaurentSeries, i: i64) -> Result<LaurentSeries> {
        if i == 0 {
            return Ok(f.clone());
        }
        let s = self.sigma_base(f.ram())?;
        f.scale_exponents(&s.pow(i)?)
    }

    /// Smallest-height representative of the q^Z orbit of a, found by exact
    /// greedy descent (each step must strictly shrink the representation).
    pub fn orbit_min_height_rep(&self, a: &Scalar) -> Result<Scalar> {
        let mut cur = a.clone();
        let mut h = cur.height_bits();
        for _ in 0..10_000 {
            let up = cur.mul(&self.q)?;
            let down = cur.div(&self.q)?;
            let hu = up.height_bits();
            let hd = down.height_bits();
            if hu < h && hu <= hd {
                cur = up;
                h = hu;
            } else if hd < h {
                cur = down;
                h = hd;
            } else {
                break;
            }
        }
        Ok(cur)
    }

    /// Are a and b in the same q^Z orbit within |m| <= bound? Returns the
    /// exponent when found.
    pub fn orbit_exponent(&self, a: &Scalar, b: &Scalar, bound: i64) -> Result<Option<i64>> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut up = a.clone();
        let mut down = a.clone();
        if &up == b {
            return Ok(Some(0));
        }
        for m in 1..=bound {
            up = up.mul(&self.q)?;
            if &up == b {
                return Ok(Some(m));
            }
            down = down.div(&self.q)?;
            if &down == b {
                return Ok(Some(-m));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Clone)]
pub struct SkewPoly {
    ctx: Arc<AlgebraContext>,
    coeffs: BTreeMap<i64, LaurentSeries>,
}

impl SkewPoly {
    pub fn new(ctx: Arc<AlgebraContext>, coeffs: BTreeMap<i64, LaurentSeries>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero_at_prec()).collect();
        SkewPoly { ctx, coeffs }
    }

    pub fn zero(ctx: Arc<AlgebraContext>) -> Self {
        SkewPoly { ctx, coeffs: BTreeMap::new() }
    }

    pub fn one(ctx: Arc<AlgebraContext>) -> Self {
        let prec = ctx.prec;
        let field = ctx.field;
        Self::from_terms(ctx, vec![(0, LaurentSeries::one(field, prec))])
    }

    pub fn xi_pow(ctx: Arc<AlgebraContext>, k: i64) -> Self {
        let prec = ctx.prec;
        let field = ctx.field;
        Self::from_terms(ctx, vec![(k, LaurentSeries::one(field, prec))])
    }

    pub fn from_terms(ctx: Arc<AlgebraContext>, terms: Vec<(i64, LaurentSeries)>) -> Self {
        let mut map: BTreeMap<i64, LaurentSeries> = BTreeMap::new();
        for (d, c) in terms {
            match map.remove(&d) {
                Some(prev) => {
                    let sum = prev.add(&c).expect("same field");
                    map.insert(d, sum);
                }
                None => {
                    map.insert(d, c);
                }
            }
        }
        Self::new(ctx, map)
    }

    pub fn ctx(&self) -> &Arc<AlgebraContext> {
        &self.ctx
    }

    pub fn coeff(&self, deg: i64) -> Option<&LaurentSeries> {
        self.coeffs.get(&deg)
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, LaurentSeries> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_deg(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_deg(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// The Euclidean size s(X) = max degree - min degree.
    pub fn span(&self) -> Result<i64> {
        match (self.min_deg(), self.max_deg()) {
            (Some(l), Some(m)) => Ok(m - l),
            _ => Err(Error::ZeroInput),
        }
    }

    fn check_ctx(&self, rhs: &Self) -> Result<()> {
        if self.ctx.as_ref() != rhs.ctx.as_ref() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_ctx(rhs)?;
        let mut map = self.coeffs.clone();
        for (d, c) in &rhs.coeffs {
            match map.remove(d) {
                Some(prev) => {
                    map.insert(*d, prev.add(c)?);
                }
                None => {
                    map.insert(*d, c.clone());
                }
            }
        }
        Ok(Self::new(self.ctx.clone(), map))
    }

    pub fn neg(&self) -> Self {
        let map = self.coeffs.iter().map(|(d, c)| (*d, c.neg())).collect();
        SkewPoly { ctx: self.ctx.clone(), coeffs: map }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    /// Twisted product: (f xi^i)(g xi^j) = f sigma^i(g) xi^(i+j).
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_ctx(rhs)?;
        let mut map: BTreeMap<i64, LaurentSeries> = BTreeMap::new();
        for (i, f) in &self.coeffs {
            for (j, g) in &rhs.coeffs {
                let term = f.mul(&self.ctx.sigma_pow(g, *i)?)?;
                let d = i + j;
                match map.remove(&d) {
                    Some(prev) => {
                        map.insert(d, prev.add(&term)?);
                    }
                    None => {
                        map.insert(d, term);
                    }
                }
            }
        }
        Ok(Self::new(self.ctx.clone(), map))
    }

    /// Multiply on the left by a plain series (degree-0 element).
    pub fn series_mul(&self, u: &LaurentSeries) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (d, c) in &self.coeffs {
            map.insert(*d, u.mul(c)?);
        }
        Ok(Self::new(self.ctx.clone(), map))
    }

    /// Multiply on the right by xi^j: degrees shift, coefficients untouched.
    pub fn shift_deg(&self, j: i64) -> Self {
        let map = self.coeffs.iter().map(|(d, c)| (d + j, c.clone())).collect();
        SkewPoly { ctx: self.ctx.clone(), coeffs: map }
    }

    /// One-sided Euclidean division. Right: X = Q*Y + R; left: X = Y*Q + R.
    /// The remainder is canonical: its xi-degrees lie in
    /// [min_deg(Y), max_deg(Y)), so R = 0 or span(R) < span(Y).
    pub fn divide(&self, y: &Self, side: DivisionSide) -> Result<(Self, Self)> {
        self.check_ctx(y)?;
        if y.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let top_y_deg = y.max_deg().expect("nonzero");
        let bot_y_deg = y.min_deg().expect("nonzero");
        let top_y = y.coeff(top_y_deg).expect("stored");
        let bot_y = y.coeff(bot_y_deg).expect("stored");
        let mut r = self.clone();
        let mut q = Self::zero(self.ctx.clone());
        // phase 1: push the top degree below max_deg(Y)
        while let Some(dr) = r.max_deg() {
            if dr < top_y_deg {
                break;
            }
            let delta = dr - top_y_deg;
            let lead_r = r.coeff(dr).expect("stored").clone();
            let term = self.elimination_term(y, top_y, delta, top_y_deg, lead_r, side)?;
            let prod = match side {
                DivisionSide::Right => term.mul(y)?,
                DivisionSide::Left => y.mul(&term)?,
            };
            r = r.sub(&prod)?;
            q = q.add(&term)?;
            if r.max_deg().map(|d| d >= dr).unwrap_or(false) {
                return Err(Error::Internal("division failed to reduce the top degree".into()));
            }
        }
        // phase 2: raise the bottom degree to at least min_deg(Y)
        while let Some(dr) = r.min_deg() {
            if dr >= bot_y_deg {
                break;
            }
            let delta = dr - bot_y_deg;
            let low_r = r.coeff(dr).expect("stored").clone();
            let term = self.elimination_term(y, bot_y, delta, bot_y_deg, low_r, side)?;
            let prod = match side {
                DivisionSide::Right => term.mul(y)?,
                DivisionSide::Left => y.mul(&term)?,
            };
            r = r.sub(&prod)?;
            q = q.add(&term)?;
            if r.min_deg().map(|d| d <= dr).unwrap_or(false) {
                return Err(Error::Internal("division failed to raise the bottom degree".into()));
            }
        }
        Ok((q, r))
    }

    /// The monomial t xi^delta eliminating a coefficient against the anchor
    /// coefficient `anchor` of Y at degree `anchor_deg`.
    fn elimination_term(
        &self,
        _y: &Self,
        anchor: &LaurentSeries,
        delta: i64,
        anchor_deg: i64,
        coeff: LaurentSeries,
        side: DivisionSide,
    ) -> Result<Self> {
        let t = match side {
            DivisionSide::Right => {
                // (t xi^delta)(a xi^j) = t sigma^delta(a) xi^(delta+j)
                coeff.div(&self.ctx.sigma_pow(anchor, delta)?)?
            }
            DivisionSide::Left => {
                // (a xi^j)(t xi^delta) = a sigma^j(t) xi^(j+delta)
                self.ctx.sigma_pow(&coeff.div(anchor)?, -anchor_deg)?
            }
        };
        Ok(Self::from_terms(self.ctx.clone(), vec![(delta, t)]))
    }

    /// Lower Newton polygon of (degree, valuation) points: list of
    /// (slope, xi-length) with slope = -(hull slope), ascending.
    pub fn newton_polygon(&self) -> Result<Vec<(BigRational, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut pts: Vec<(i64, BigRational)> = Vec::new();
        for (d, c) in &self.coeffs {
            let v = c.val_rational().ok_or(Error::UndecidableValuation)?;
            pts.push((*d, v));
        }
        let hull = lower_hull(&pts);
        let mut out = Vec::new();
        for w in hull.windows(2) {
            let (d0, v0) = &w[0];
            let (d1, v1) = &w[1];
            let len = (d1 - d0) as usize;
            let slope = -(v1 - v0) / BigRational::from(BigInt::from(d1 - d0));
            out.push((slope, len));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Hull vertices (degree, valuation) of the polygon, left to right.
    pub fn polygon_vertices(&self) -> Result<Vec<(i64, BigRational)>> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut pts: Vec<(i64, BigRational)> = Vec::new();
        for (d, c) in &self.coeffs {
            let v = c.val_rational().ok_or(Error::UndecidableValuation)?;
            pts.push((*d, v));
        }
        Ok(lower_hull(&pts))
    }

    /// Single-slope normalization: rewrite X with the generator z^(k/n) xi.
    /// Returns (n, k, X') with X' slope-zero over ram-n coefficients; requires
    /// an n-th root of q attached to the context.
    pub fn slope_normalize(&self) -> Result<(u32, i64, SkewPoly)> {
        let polygon = self.newton_polygon()?;
        if polygon.len() > 1 {
            return Err(Error::MultipleSlopes(polygon.len()));
        }
        if polygon.is_empty() {
            // a single xi-degree: flat by convention
            return Ok((1, 0, self.clone()));
        }
        let slope = polygon[0].0.clone();
        if slope.is_zero() {
            return Ok((1, 0, self.clone()));
        }
        let n = slope.denom().to_string().parse::<u32>().map_err(|_| {
            Error::Unsupported("slope denominator does not fit in u32".into())
        })?;
        let k = slope.numer().to_string().parse::<i64>().map_err(|_| {
            Error::Unsupported("slope numerator does not fit in i64".into())
        })?;
        // collect the common coefficient ram and the needed root
        let mut ram0 = 1u32;
        for c in self.coeffs.values() {
            ram0 = (ram0 as i64).lcm(&(c.ram() as i64)) as u32;
        }
        let ram = ram0 * n;
        let s = self.ctx.sigma_base(ram)?; // s^(ram) = q
        // X = sum a_i xi^i; with xi = z^(k/n) xi' this becomes
        // sum a_i z^(ik/n) s_n^(k i(i-1)/2) xi'^i, s_n = s^(ram0)
        let s_n = s.pow(ram0 as i64)?;
        let mut map: BTreeMap<i64, LaurentSeries> = BTreeMap::new();
        let mut min_val: Option<BigRational> = None;
        for (i, a) in &self.coeffs {
            let factor = s_n.pow(k * i * (i - 1) / 2)?;
            let shifted = a
                .ramify(ram / a.ram())
                .shift(i * k * (ram0 as i64))
                .scalar_mul(&factor)?;
            if let Some(v) = shifted.val_rational() {
                min_val = Some(match min_val {
                    None => v,
                    Some(m) => m.min(v),
                });
            }
            map.insert(*i, shifted);
        }
        // normalize the common z-power away so some coefficient has valuation 0
        let m = min_val.ok_or(Error::ZeroAtPrecision)?;
        let shift_idx = (m * BigRational::from(BigInt::from(ram as i64)))
            .to_integer()
            .to_string()
            .parse::<i64>()
            .map_err(|_| Error::Unsupported("valuation too large".into()))?;
        let map = map
            .into_iter()
            .map(|(i, c)| (i, c.shift(-shift_idx)))
            .collect();
        Ok((n, k, SkewPoly::new(self.ctx.clone(), map)))
    }

    /// Left-multiply so the top coefficient becomes 1; returns the unit used.
    pub fn monic_normalize(&self) -> Result<(LaurentSeries, SkewPoly)> {
        let top_deg = self.max_deg().ok_or(Error::ZeroInput)?;
        let top = self.coeff(top_deg).expect("stored");
        let unit = top.invert()?;
        Ok((unit.clone(), self.series_mul(&unit)?))
    }

    /// Shift degrees so the lowest is 0 (multiplying by xi^-min on the right).
    pub fn anchored_at_zero(&self) -> Result<SkewPoly> {
        let min = self.min_deg().ok_or(Error::ZeroInput)?;
        Ok(self.shift_deg(-min))
    }

    pub fn eq_at_prec(&self, rhs: &Self) -> bool {
        match self.sub(rhs) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisionSide {
    Left,
    Right,
}

fn lower_hull(pts: &[(i64, BigRational)]) -> Vec<(i64, BigRational)> {
    let mut pts = pts.to_vec();
    pts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut hull: Vec<(i64, BigRational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // keep b only if it is strictly below segment a-p
            let lhs = (&b.1 - &a.1) * BigRational::from(BigInt::from(p.0 - a.0));
            let rhs = (&p.1 - &a.1) * BigRational::from(BigInt::from(b.0 - a.0));
            if lhs < rhs {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

impl fmt::Display for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c}*xi^{d}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
pub mod test_support {
    use super::*;
    use crate::laurent::test_support::random_series;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    pub fn ctx_q2(prec: i64) -> Arc<AlgebraContext> {
        AlgebraContext::new(Scalar::from_integer(FieldSpec::Rational, 2), prec).unwrap()
    }

    pub fn series(ctx: &Arc<AlgebraContext>, terms: &[(i64, i64)]) -> LaurentSeries {
        let ts: Vec<(i64, Scalar)> = terms
            .iter()
            .map(|&(k, c)| (k, Scalar::from_integer(ctx.field, c)))
            .collect();
        LaurentSeries::from_terms(ctx.field, 1, &ts, ctx.prec).unwrap()
    }

    pub fn sp(ctx: &Arc<AlgebraContext>, terms: &[(i64, &[(i64, i64)])]) -> SkewPoly {
        let ts = terms
            .iter()
            .map(|&(d, t)| (d, series(ctx, t)))
            .collect();
        SkewPoly::from_terms(ctx.clone(), ts)
    }

    pub fn random_skew(rng: &mut ChaCha8Rng, ctx: &Arc<AlgebraContext>, max_span: i64) -> SkewPoly {
        loop {
            let lo_deg = rng.gen_range(-1i64..=1);
            let span = rng.gen_range(0..=max_span);
            let mut terms = Vec::new();
            for d in lo_deg..=lo_deg + span {
                if d == lo_deg || d == lo_deg + span || rng.gen_bool(0.7) {
                    let s = random_series(rng, ctx.field, -2, 10);
                    if !s.is_zero_at_prec() {
                        terms.push((d, s.assume_exact_to(ctx.prec)));
                    }
                }
            }
            let x = SkewPoly::from_terms(ctx.clone(), terms);
            if !x.is_zero() {
                return x;
            }
        }
    }
}
