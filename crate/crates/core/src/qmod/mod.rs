//! Finite-dimensional q-difference modules: a dimension d and an invertible
//! series matrix Phi acting semilinearly by xi v(z) = Phi(z) v(qz).
//!
//! The submodules hold the cyclic decomposition machinery, the Newton-slope
//! factorization, the lattice/residue analysis behind the integral
//! classification, the covering functor calculus, and the brute-force
//! isomorphism oracle.

pub mod cyclic;
pub mod hensel;
pub mod lattice;
pub mod classify;
pub mod functors;
pub mod iso;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::scalars::Scalar;
use crate::skew::{AlgebraContext, SkewPoly};
use crate::smat::SMat;

pub use classify::{classify, classify_with_prec, integral_invariant, IntegralInvariant};
pub use cyclic::{cyclic_decompose, minimal_skew_poly};
pub use iso::{hom_dim, iso_oracle, IsoOutcome};
pub use lattice::{improve_lattice, lift_splitting, LatticeFrame};

#[derive(Debug, Clone)]
pub struct QDiffModule {
    ctx: Arc<AlgebraContext>,
    pub dim: usize,
    pub phi: SMat,
}

impl QDiffModule {
    /// Build a module, checking that Phi is invertible in the window.
    pub fn new(ctx: Arc<AlgebraContext>, phi: SMat) -> Result<Self> {
        if phi.rows != phi.cols || phi.rows == 0 {
            return Err(Error::Unsupported("Phi must be square and nonempty".into()));
        }
        if phi.min_prec() < 2 {
            return Err(Error::PrecisionExhausted(format!(
                "module window shrank to {} exponents",
                phi.min_prec()
            )));
        }
        let det = phi.det()?;
        if det.is_zero_at_prec() {
            return Err(Error::ZeroAtPrecision);
        }
        Ok(QDiffModule { dim: phi.rows, ctx, phi })
    }

    pub fn ctx(&self) -> &Arc<AlgebraContext> {
        &self.ctx
    }

    /// xi acting on a coordinate vector: v(z) -> Phi(z) v(qz).
    pub fn apply_xi(&self, v: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
        let twisted: Vec<LaurentSeries> =
            v.iter().map(|f| self.ctx.sigma_pow(f, 1)).collect::<Result<_>>()?;
        self.phi.mul_vec(&twisted)
    }

    /// Companion module of A/(X) on the basis 1, xi, ..., xi^(span-1).
    pub fn from_cyclic(x: &SkewPoly) -> Result<Self> {
        let ctx = x.ctx().clone();
        let span = x.span()?;
        if span < 1 {
            return Err(Error::Unsupported("cyclic module needs span >= 1".into()));
        }
        let (_, anchored) = x.anchored_at_zero()?.monic_normalize()?;
        let m = span as usize;
        let field = ctx.field;
        let prec = anchored
            .coeffs()
            .values()
            .map(|c| c.prec())
            .min()
            .unwrap_or(ctx.prec);
        if prec < 2 {
            return Err(Error::PrecisionExhausted(format!(
                "cyclic factor window shrank to {prec} exponents"
            )));
        }
        let mut phi = SMat::zeros(field, m, m, prec);
        for j in 0..m - 1 {
            phi.set(j + 1, j, LaurentSeries::one(field, prec));
        }
        for i in 0..m {
            let c = anchored
                .coeff(i as i64)
                .cloned()
                .unwrap_or_else(|| LaurentSeries::zero_at(field, 1, prec));
            phi.set(i, m - 1, c.neg());
        }
        Self::new(ctx, phi)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ctx.as_ref() != other.ctx.as_ref() {
            return Err(Error::ContextMismatch);
        }
        let n = self.dim + other.dim;
        let prec = self.phi.min_prec().min(other.phi.min_prec());
        let mut phi = SMat::zeros(self.ctx.field, n, n, prec);
        for i in 0..self.dim {
            for j in 0..self.dim {
                phi.set(i, j, self.phi.at(i, j).clone());
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                phi.set(self.dim + i, self.dim + j, other.phi.at(i, j).clone());
            }
        }
        Self::new(self.ctx.clone(), phi)
    }

    /// Gauge the action by a basis change T: Phi -> T(z)^-1 Phi T(qz).
    pub fn gauge(&self, t: &SMat) -> Result<Self> {
        Self::new(self.ctx.clone(), self.phi.gauge(&self.ctx, t)?)
    }

    /// Reinterpret the (polynomial) data with a larger precision cap.
    pub fn assume_exact_to(&self, prec: i64) -> Result<Self> {
        let mut ctx = (*self.ctx.as_ref()).clone();
        ctx.prec = prec;
        Self::new(Arc::new(ctx), self.phi.assume_exact_to(prec))
    }
}

/// Normal-form tag for A/(xi^n - a z^k)^l, with the q^Z-orbit identification
/// of the parameter a searched only within |m| <= orbit_bound.
#[derive(Debug, Clone)]
pub struct IndecompLabel {
    pub n: u32,
    pub k: i64,
    pub l: u32,
    pub a: Scalar,
    pub orbit_bound: i64,
}

impl IndecompLabel {
    pub fn new(n: u32, k: i64, l: u32, a: Scalar, orbit_bound: i64) -> Result<Self> {
        if n == 0 || l == 0 {
            return Err(Error::Unsupported("label needs n >= 1 and l >= 1".into()));
        }
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        if n > 1 {
            let g = gcd_i64(n as i64, k.abs());
            if k == 0 || g != 1 {
                return Err(Error::Unsupported(format!(
                    "label (n, k) = ({n}, {k}) must be coprime with k nonzero"
                )));
            }
        }
        Ok(IndecompLabel { n, k, l, a, orbit_bound })
    }

    pub fn dim(&self) -> usize {
        (self.n * self.l) as usize
    }

    /// Equality up to the q^Z orbit of the parameter.
    pub fn orbit_eq(&self, other: &Self, ctx: &Arc<AlgebraContext>) -> Result<bool> {
        if (self.n, self.k, self.l) != (other.n, other.k, other.l) {
            return Ok(false);
        }
        let bound = self.orbit_bound.max(other.orbit_bound);
        Ok(ctx.orbit_exponent(&self.a, &other.a, bound)?.is_some())
    }

    /// Bounded-window canonical representative of the parameter orbit, used
    /// only to stabilize printed output.
    pub fn canonical_point(&self, ctx: &Arc<AlgebraContext>) -> Result<Scalar> {
        let mut best = self.a.clone();
        let mut up = self.a.clone();
        let mut down = self.a.clone();
        for _ in 0..self.orbit_bound {
            up = up.mul(&ctx.q)?;
            down = down.div(&ctx.q)?;
            for cand in [&up, &down] {
                if cand.repr_cmp(&best) == std::cmp::Ordering::Less {
                    best = cand.clone();
                }
            }
        }
        Ok(best)
    }

    /// The defining skew polynomial of the block, the twisted power
    /// prod_{j = l-1..0} (xi^n - a q^(j n k) z^k).
    ///
    /// For k = 0 this is the plain power (xi - a)^l. For k != 0 the plain
    /// power would NOT present the indecomposable block: writing
    /// eta = z^-k xi^n, the factors of (xi^n - a z^k)^l normalize to
    /// eta-constants a q^(-j n k), which are pairwise distinct, so the
    /// module splits into l rank-n pieces. The q^(j n k)-twisted factors
    /// normalize to the single constant a, and equal constants are exactly
    /// the non-split chain (the extension obstruction sits at z^0).
    pub fn skew_poly(&self, ctx: &Arc<AlgebraContext>) -> Result<SkewPoly> {
        let field = ctx.field;
        let prec = ctx.prec;
        let mut acc: Option<SkewPoly> = None;
        for j in (0..self.l as i64).rev() {
            let c = self.a.mul(&ctx.q_pow(j * self.n as i64 * self.k)?)?;
            let cz = LaurentSeries::monomial(field, c, self.k, 1, prec)?;
            let factor = SkewPoly::from_terms(
                ctx.clone(),
                vec![
                    (self.n as i64, LaurentSeries::one(field, prec)),
                    (0, cz.neg()),
                ],
            );
            acc = Some(match acc {
                None => factor,
                Some(p) => p.mul(&factor)?,
            });
        }
        Ok(acc.expect("l >= 1"))
    }
}

impl fmt::Display for IndecompLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {} [{}]", self.n, self.k, self.l, self.a, self.orbit_bound)
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i64(b, a % b)
    }
}

/// Direct sum of the companion modules of a label multiset.
pub fn build(ctx: &Arc<AlgebraContext>, labels: &[IndecompLabel]) -> Result<QDiffModule> {
    if labels.is_empty() {
        return Err(Error::ZeroInput);
    }
    let mut acc: Option<QDiffModule> = None;
    for lab in labels {
        let x = lab.skew_poly(ctx)?;
        let m = QDiffModule::from_cyclic(&x)?;
        acc = Some(match acc {
            None => m,
            Some(s) => s.direct_sum(&m)?,
        });
    }
    Ok(acc.expect("nonempty"))
}

/// Multiset equality of labels under orbit-normalized comparison, decided by
/// exact backtracking matching.
pub fn labels_equal(
    a: &[IndecompLabel],
    b: &[IndecompLabel],
    ctx: &Arc<AlgebraContext>,
) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let n = a.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            adj[i][j] = a[i].orbit_eq(&b[j], ctx)?;
        }
    }
    fn matching(adj: &[Vec<bool>], used: &mut [bool], i: usize) -> bool {
        if i == adj.len() {
            return true;
        }
        for j in 0..adj.len() {
            if adj[i][j] && !used[j] {
                used[j] = true;
                if matching(adj, used, i + 1) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    Ok(matching(&adj, &mut used, 0))
}

/// Sort labels deterministically for printing (by type, then canonical
/// orbit representative).
pub fn sort_labels(labels: &mut [IndecompLabel], ctx: &Arc<AlgebraContext>) -> Result<()> {
    let mut keyed: Vec<(u32, i64, u32, Scalar, IndecompLabel)> = Vec::with_capacity(labels.len());
    for l in labels.iter() {
        keyed.push((l.n, l.k, l.l, l.canonical_point(ctx)?, l.clone()));
    }
    keyed.sort_by(|x, y| {
        (x.0, x.1, x.2)
            .cmp(&(y.0, y.1, y.2))
            .then_with(|| x.3.repr_cmp(&y.3))
    });
    for (slot, (_, _, _, _, l)) in labels.iter_mut().zip(keyed) {
        *slot = l;
    }
    Ok(())
}
