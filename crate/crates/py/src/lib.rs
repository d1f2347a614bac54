//! Python bindings: a context object carrying (field, q, precision) plus
//! functions mirroring the command surface. Values cross the boundary in
//! the same textual grammars the CLI uses.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qell::cli::{self, FunctorKind, TorusArgs};
use qell::config::Config;
use qell::error::Error;
use qell::format;
use qell::moduli;
use qell::pic;
use qell::qmod;
use qell::skew::DivisionSide;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Algebra context: field spec ("rational" | "quadratic:d" | "padic:p:N"),
/// the twist q, working precision, and the orbit bound.
#[pyclass]
struct Context {
    cfg: Config,
}

#[pymethods]
impl Context {
    #[new]
    #[pyo3(signature = (field, q, prec = 32, orbit_bound = 24))]
    fn new(field: &str, q: &str, prec: i64, orbit_bound: i64) -> PyResult<Self> {
        let spec = format::parse_field_spec(field).map_err(err)?;
        let mut cfg = Config::new(spec, q).map_err(err)?;
        cfg.prec = prec;
        cfg.orbit_bound = orbit_bound;
        cfg.validate().map_err(err)?;
        Ok(Context { cfg })
    }

    /// Classify a module (module-file text) into normal-form label lines.
    #[pyo3(signature = (module_text, seed = 1))]
    fn classify(&self, module_text: &str, seed: u64) -> PyResult<String> {
        let ctx = self.cfg.context().map_err(err)?;
        let m = format::parse_module(module_text, &ctx).map_err(err)?;
        let labels = qmod::classify(&m, seed).map_err(err)?;
        format::labels_to_string(&labels, &ctx).map_err(err)
    }

    /// Build the direct-sum module of label lines; returns module-file text.
    fn build(&self, labels_text: &str) -> PyResult<String> {
        let ctx = self.cfg.context().map_err(err)?;
        let labels =
            format::parse_labels(labels_text, self.cfg.field, self.cfg.orbit_bound).map_err(err)?;
        let m = qmod::build(&ctx, &labels).map_err(err)?;
        Ok(format::module_to_string(&m))
    }

    /// Isomorphism oracle: (isomorphic, witness_text or None).
    #[pyo3(signature = (a_text, b_text, window = 8, seed = 1))]
    fn iso_check(
        &self,
        a_text: &str,
        b_text: &str,
        window: i64,
        seed: u64,
    ) -> PyResult<(bool, Option<String>)> {
        let r = cli::cmd_isocheck(a_text, b_text, window, &self.cfg_with_seed(seed)).map_err(err)?;
        if let Some(rest) = r.output.strip_prefix("isomorphic\n") {
            Ok((true, Some(rest.to_string())))
        } else {
            Ok((false, None))
        }
    }

    /// Dimension of the intertwiner space and its stabilization flag.
    #[pyo3(signature = (a_text, b_text, window = 6))]
    fn hom_dim(&self, a_text: &str, b_text: &str, window: i64) -> PyResult<(usize, bool)> {
        let ctx = self.cfg.context().map_err(err)?;
        let a = format::parse_module(a_text, &ctx).map_err(err)?;
        let b = format::parse_module(b_text, &ctx).map_err(err)?;
        qmod::hom_dim(&a, &b, window).map_err(err)
    }

    /// Solve a(qz) - a(z) = g - g_0: returns (solution series, obstruction).
    fn solve_cocycle(&self, g_text: &str) -> PyResult<(String, String)> {
        let ctx = self.cfg.context().map_err(err)?;
        let g = format::parse_series(g_text, self.cfg.field).map_err(err)?;
        let (a, obs) = pic::solve_additive(&ctx, &g, self.cfg.height_cap_bits).map_err(err)?;
        Ok((a.to_string(), obs.to_string()))
    }

    /// Picard class string of the unit cocycle c z^k exp(g).
    #[pyo3(signature = (c, k = 0, g = None))]
    fn picard(&self, c: &str, k: i64, g: Option<&str>) -> PyResult<String> {
        let r = cli::cmd_picard(c, k, g, &self.cfg).map_err(err)?;
        Ok(r.output.trim_end().to_string())
    }

    /// Exact small-divisor table as (n, exact value string, log10 float).
    fn diag_q(&self, n: u32) -> PyResult<Vec<(u32, String, f64)>> {
        let d = pic::divisor_diagnostics(&self.cfg.q, n).map_err(err)?;
        Ok(d.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (
                    i as u32 + 1,
                    v.to_string(),
                    pic::rational_log(v) / std::f64::consts::LN_10,
                )
            })
            .collect())
    }

    /// Twisted product of two skew polynomials given in the CLI grammar.
    fn skew_mul(&self, a: &str, b: &str) -> PyResult<String> {
        let ctx = self.cfg.context().map_err(err)?;
        let x = format::parse_skew(a, &ctx).map_err(err)?;
        let y = format::parse_skew(b, &ctx).map_err(err)?;
        Ok(x.mul(&y).map_err(err)?.to_string())
    }

    /// One-sided Euclidean division: (quotient, remainder).
    #[pyo3(signature = (a, b, side = "right"))]
    fn skew_divide(&self, a: &str, b: &str, side: &str) -> PyResult<(String, String)> {
        let ctx = self.cfg.context().map_err(err)?;
        let x = format::parse_skew(a, &ctx).map_err(err)?;
        let y = format::parse_skew(b, &ctx).map_err(err)?;
        let s = match side {
            "right" => DivisionSide::Right,
            "left" => DivisionSide::Left,
            _ => return Err(PyValueError::new_err("side must be 'left' or 'right'")),
        };
        let (q, r) = x.divide(&y, s).map_err(err)?;
        Ok((q.to_string(), r.to_string()))
    }

    /// Newton polygon of a skew polynomial: list of (slope, length).
    fn newton_polygon(&self, a: &str) -> PyResult<Vec<(String, usize)>> {
        let ctx = self.cfg.context().map_err(err)?;
        let x = format::parse_skew(a, &ctx).map_err(err)?;
        Ok(x.newton_polygon()
            .map_err(err)?
            .into_iter()
            .map(|(s, l)| (s.to_string(), l))
            .collect())
    }

    /// Covering functors on module text; functor is "f" or "g".
    #[pyo3(signature = (module_text, n, functor = "f", root = None))]
    fn pushforward(
        &self,
        module_text: &str,
        n: u32,
        functor: &str,
        root: Option<&str>,
    ) -> PyResult<String> {
        let kind = functor_kind(functor)?;
        let r = cli::cmd_pushforward(module_text, n, kind, root, &self.cfg).map_err(err)?;
        Ok(r.output)
    }

    #[pyo3(signature = (module_text, n, functor = "f", root = None))]
    fn pullback(
        &self,
        module_text: &str,
        n: u32,
        functor: &str,
        root: Option<&str>,
    ) -> PyResult<String> {
        let kind = functor_kind(functor)?;
        let r = cli::cmd_pullback(module_text, n, kind, root, &self.cfg).map_err(err)?;
        Ok(r.output)
    }
}

impl Context {
    fn cfg_with_seed(&self, seed: u64) -> Config {
        let mut c = self.cfg.clone();
        c.seed = seed;
        c
    }
}

fn functor_kind(s: &str) -> PyResult<FunctorKind> {
    match s {
        "f" => Ok(FunctorKind::F),
        "g" => Ok(FunctorKind::G),
        _ => Err(PyValueError::new_err("functor must be 'f' or 'g'")),
    }
}

/// Reduce an upper-half quadratic point: (reduced point, witness matrix).
#[pyfunction]
fn moduli_reduce(tau: &str) -> PyResult<(String, String)> {
    let p = moduli::ModuliPoint::new(format::parse_quadratic_auto(tau).map_err(err)?).map_err(err)?;
    let (r, g) = moduli::reduce_upper(&p).map_err(err)?;
    Ok((r.to_string(), g.to_string()))
}

/// SL2(Z) equivalence of two exact points: (equivalent, witness or None).
#[pyfunction]
fn moduli_equiv(tau: &str, mu: &str) -> PyResult<(bool, Option<String>)> {
    let a = moduli::ModuliPoint::new(format::parse_quadratic_auto(tau).map_err(err)?).map_err(err)?;
    let b = moduli::ModuliPoint::new(format::parse_quadratic_auto(mu).map_err(err)?).map_err(err)?;
    match moduli::sl2_equivalent(&a, &b).map_err(err)? {
        moduli::EquivOutcome::Equivalent(g) => Ok((true, Some(g.to_string()))),
        moduli::EquivOutcome::Inequivalent => Ok((false, None)),
    }
}

/// Continued fraction of a real quadratic point: (preperiod, period).
#[pyfunction]
fn moduli_cf(tau: &str) -> PyResult<(Vec<String>, Vec<String>)> {
    let p = moduli::ModuliPoint::new(format::parse_quadratic_auto(tau).map_err(err)?).map_err(err)?;
    let cf = moduli::cf_expand(&p).map_err(err)?;
    Ok((
        cf.preperiod.iter().map(|x| x.to_string()).collect(),
        cf.period.iter().map(|x| x.to_string()).collect(),
    ))
}

/// Stabilizer description of a quasi-lattice "w1, w2".
#[pyfunction]
fn moduli_stab(lattice: &str) -> PyResult<String> {
    let cfg = Config::new(qell::scalars::FieldSpec::Rational, "2").map_err(err)?;
    let r = cli::cmd_moduli_stab(lattice, &cfg).map_err(err)?;
    Ok(r.output)
}

/// Similarity of two quasi-lattices: (similar, alpha or None).
#[pyfunction]
fn moduli_similar(a: &str, b: &str) -> PyResult<(bool, Option<String>)> {
    let cfg = Config::new(qell::scalars::FieldSpec::Rational, "2").map_err(err)?;
    let r = cli::cmd_moduli_similar(a, b, &cfg).map_err(err)?;
    if r.output.starts_with("similar") {
        let alpha = r
            .output
            .lines()
            .find_map(|l| l.strip_prefix("alpha "))
            .map(|s| s.to_string());
        Ok((true, alpha))
    } else {
        Ok((false, None))
    }
}

/// Twisted torus product of two element texts.
#[pyfunction]
#[pyo3(signature = (a, b, d = 2, p = 5, prec = 12, chi = "2"))]
fn torus_mul(a: &str, b: &str, d: usize, p: u64, prec: u32, chi: &str) -> PyResult<String> {
    let cfg = Config::new(qell::scalars::FieldSpec::Rational, "2").map_err(err)?;
    let args = TorusArgs { d, p, prec, chi_literal: chi.to_string() };
    let r = cli::cmd_torus_mul(a, b, &args, &cfg).map_err(err)?;
    Ok(r.output)
}

/// Banach norm of a torus element for a radius vector "r1,...,rd".
#[pyfunction]
#[pyo3(signature = (a, r, d = 2, p = 5, prec = 12, chi = "2"))]
fn torus_norm(a: &str, r: &str, d: usize, p: u64, prec: u32, chi: &str) -> PyResult<String> {
    let cfg = Config::new(qell::scalars::FieldSpec::Rational, "2").map_err(err)?;
    let args = TorusArgs { d, p, prec, chi_literal: chi.to_string() };
    let out = cli::cmd_torus_norm(a, r, &args, &cfg).map_err(err)?;
    let norm = out
        .output
        .lines()
        .find_map(|l| l.strip_prefix("norm "))
        .unwrap_or_default()
        .to_string();
    Ok(norm)
}

#[pymodule]
fn qell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Context>()?;
    m.add_function(wrap_pyfunction!(moduli_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_equiv, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_cf, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_stab, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_similar, m)?)?;
    m.add_function(wrap_pyfunction!(torus_mul, m)?)?;
    m.add_function(wrap_pyfunction!(torus_norm, m)?)?;
    Ok(())
}
