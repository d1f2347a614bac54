//! Exact-arithmetic toolkit for q-twisted Laurent polynomial algebras.
//!
//! The crate provides, over exact coefficient fields (rationals, quadratic
//! extensions, fixed-precision p-adics):
//!
//! - truncated Laurent series with ramified exponents ([`laurent`]);
//! - the skew algebra F[xi, xi^-1] with xi f(z) = f(qz) xi: multiplication,
//!   Euclidean division by span, Newton polygons ([`skew`]);
//! - finite-dimensional q-difference modules, their normal-form
//!   classification, an independent isomorphism oracle, and the covering
//!   functor calculus ([`qmod`]);
//! - the additive cocycle solver a(qz) - a(z) = g(z), Picard classes of
//!   rank-one objects, and small-divisor diagnostics ([`pic`]);
//! - the non-archimedean quantum torus with its Banach norm ([`torus`]);
//! - SL2(Z) moduli of (quasi-)lattices: fundamental-domain reduction,
//!   continued-fraction equivalence, stabilizer groups ([`moduli`]).
//!
//! The `qell` binary exposes all of it on the command line; `format`
//! documents the textual grammars.

pub mod error;
pub mod scalars;
pub mod laurent;
pub mod linalg;
pub mod polyroots;
pub mod skew;
pub mod smat;
pub mod qmod;
pub mod pic;
pub mod torus;
pub mod moduli;
pub mod format;
pub mod config;
pub mod cli;

pub use error::{Error, Result};
pub use laurent::LaurentSeries;
pub use scalars::{FieldSpec, Scalar};
