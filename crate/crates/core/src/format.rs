//! Textual grammars for every value the command line reads or writes:
//! scalars, series, skew polynomials, module files, label files, torus
//! elements, and moduli inputs. Parse errors carry line and column.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::qmod::{IndecompLabel, QDiffModule};
use crate::scalars::{FieldSpec, PadicScalar, QuadraticNumber, Scalar};
use crate::skew::{AlgebraContext, SkewPoly};
use crate::smat::SMat;
use crate::torus::{TorusElement, TorusForm};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { src: s.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.line, self.col, msg))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let bytes = w.as_bytes();
        if self.src[self.pos..].starts_with(bytes) {
            for _ in 0..bytes.len() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn parse_integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let mut digits = String::new();
        if self.eat(b'-') {
            digits.push('-');
        } else if self.eat(b'+') {
        }
        let start = digits.len();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c as char);
                self.bump();
            } else {
                break;
            }
        }
        if digits.len() == start {
            return self.err("expected an integer");
        }
        digits.parse::<BigInt>().map_err(|e| Error::parse(self.line, self.col, e.to_string()))
    }

    fn parse_rational(&mut self) -> Result<BigRational> {
        let n = self.parse_integer()?;
        if self.eat(b'/') {
            let d = self.parse_integer()?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from(n))
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }
}

// ---------------------------------------------------------------------------
// field specs

/// Field spec literals: "rational", "quadratic:d", "padic:p:N".
pub fn parse_field_spec(s: &str) -> Result<FieldSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["rational"] | ["q"] => Ok(FieldSpec::Rational),
        ["quadratic", d] | ["quad", d] => {
            let d: i64 = d.parse().map_err(|_| Error::parse(1, 1, "bad d in quadratic:d"))?;
            if !crate::scalars::is_square_free(d) {
                return Err(Error::parse(1, 1, format!("{d} is not square-free")));
            }
            Ok(FieldSpec::Quadratic(d))
        }
        ["padic", p, n] => {
            let p: u64 = p.parse().map_err(|_| Error::parse(1, 1, "bad p in padic:p:N"))?;
            let prec: u32 = n.parse().map_err(|_| Error::parse(1, 1, "bad N in padic:p:N"))?;
            Ok(FieldSpec::Padic { p, prec })
        }
        _ => Err(Error::parse(1, 1, format!("unknown field spec '{s}'"))),
    }
}

pub fn field_spec_to_string(f: FieldSpec) -> String {
    match f {
        FieldSpec::Rational => "rational".into(),
        FieldSpec::Quadratic(d) => format!("quadratic:{d}"),
        FieldSpec::Padic { p, prec } => format!("padic:{p}:{prec}"),
    }
}

// ---------------------------------------------------------------------------
// scalars

/// Parse a scalar literal in the given field. Rational: "-3/7"; quadratic:
/// "3/5+4/5*sqrt(-1)"; p-adic: "5^2 * 3 mod 5^12" (plain rationals embed).
pub fn parse_scalar(s: &str, field: FieldSpec) -> Result<Scalar> {
    let mut c = Cursor::new(s);
    let v = parse_scalar_at(&mut c, field)?;
    if !c.at_end() {
        return c.err("trailing input after scalar");
    }
    Ok(v)
}

fn parse_scalar_at(c: &mut Cursor, field: FieldSpec) -> Result<Scalar> {
    match field {
        FieldSpec::Rational => Ok(Scalar::Rat(c.parse_rational()?)),
        FieldSpec::Quadratic(d) => Ok(Scalar::Quad(parse_quadratic_at(c, Some(d))?)),
        FieldSpec::Padic { p, prec } => parse_padic_at(c, p, prec),
    }
}

fn parse_quadratic_at(c: &mut Cursor, d_expected: Option<i64>) -> Result<QuadraticNumber> {
    // sum of terms: [rational] [* sqrt(d)] with +- separators
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    let mut d_seen: Option<i64> = None;
    let mut first = true;
    loop {
        c.skip_ws();
        let mut sign = BigRational::one();
        if c.eat(b'-') {
            sign = -sign;
        } else if c.eat(b'+') {
        } else if !first {
            break;
        }
        c.skip_ws();
        let mut coeff = BigRational::one();
        let mut has_coeff = false;
        if matches!(c.peek(), Some(ch) if ch.is_ascii_digit()) {
            coeff = c.parse_rational()?;
            has_coeff = true;
        }
        c.skip_ws();
        let star = c.eat(b'*');
        c.skip_ws();
        if c.eat_word("sqrt") {
            c.skip_ws();
            c.expect(b'(')?;
            let d_lit = c.parse_integer()?;
            c.skip_ws();
            c.expect(b')')?;
            let d_val: i64 = d_lit
                .to_string()
                .parse()
                .map_err(|_| Error::parse(c.line, c.col, "d out of range"))?;
            if let Some(d0) = d_seen {
                if d0 != d_val {
                    return c.err(format!("mixed radicands sqrt({d0}) and sqrt({d_val})"));
                }
            }
            if let Some(d0) = d_expected {
                if d0 != d_val {
                    return c.err(format!("radicand sqrt({d_val}) does not match the field sqrt({d0})"));
                }
            }
            d_seen = Some(d_val);
            b += &sign * &coeff;
        } else if has_coeff {
            if star {
                return c.err("dangling '*'");
            }
            a += &sign * &coeff;
        } else {
            if first {
                return c.err("expected a quadratic term");
            }
            return c.err("dangling sign");
        }
        first = false;
    }
    let d = match d_seen.or(d_expected) {
        Some(d) => d,
        None => return c.err("no radicand found and no field radicand given"),
    };
    QuadraticNumber::new(a, b, d)
}

/// Parse a quadratic literal inferring d from the text (used by the moduli
/// commands, whose inputs must be irrational and thus mention a radical).
pub fn parse_quadratic_auto(s: &str) -> Result<QuadraticNumber> {
    let mut c = Cursor::new(s);
    let q = parse_quadratic_at(&mut c, None)?;
    if !c.at_end() {
        return Err(Error::parse(c.line, c.col, "trailing input after value"));
    }
    Ok(q)
}

fn parse_padic_at(c: &mut Cursor, p: u64, prec: u32) -> Result<Scalar> {
    // forms: "p^v * u mod p^N" | "0 mod p^N" | plain rational
    c.skip_ws();
    let save = (c.pos, c.line, c.col);
    let first = c.parse_integer()?;
    c.skip_ws();
    if c.eat(b'^') {
        let v = c.parse_integer()?;
        let v: i64 = v
            .to_string()
            .parse()
            .map_err(|_| Error::parse(c.line, c.col, "valuation out of range"))?;
        let pf: u64 = first
            .to_string()
            .parse()
            .map_err(|_| Error::parse(c.line, c.col, "prime out of range"))?;
        if pf != p {
            return c.err(format!("prime {pf} does not match the field prime {p}"));
        }
        c.skip_ws();
        c.expect(b'*')?;
        let u = c.parse_integer()?;
        if u.is_negative() || u.is_zero() {
            return c.err("unit digits must be a positive integer");
        }
        c.skip_ws();
        if !c.eat_word("mod") {
            return c.err("expected 'mod'");
        }
        c.skip_ws();
        let p2 = c.parse_integer()?;
        c.expect(b'^')?;
        let n = c.parse_integer()?;
        let n: u32 = n
            .to_string()
            .parse()
            .map_err(|_| Error::parse(c.line, c.col, "precision out of range"))?;
        if p2 != BigInt::from(p) {
            return c.err("modulus prime mismatch");
        }
        let unit = u.to_biguint().unwrap_or_else(BigUint::zero);
        return Ok(Scalar::Padic(PadicScalar::new(p, v, unit, n.min(prec))?));
    }
    if first.is_zero() {
        c.skip_ws();
        if c.eat_word("mod") {
            c.skip_ws();
            let _ = c.parse_integer()?;
            c.expect(b'^')?;
            let _ = c.parse_integer()?;
            return Ok(Scalar::Padic(PadicScalar::zero(p, prec)));
        }
    }
    // plain rational embed: rewind and reparse to catch "a/b"
    c.pos = save.0;
    c.line = save.1;
    c.col = save.2;
    let r = c.parse_rational()?;
    Ok(Scalar::Padic(PadicScalar::from_rational(p, &r, prec)?))
}

// ---------------------------------------------------------------------------
// series

/// "{ram=2; prec=32; terms: -1:2/3, 0:1, 5:-7/2}"; zero series print the
/// marker "(zero)" in place of the list.
pub fn parse_series(s: &str, field: FieldSpec) -> Result<LaurentSeries> {
    let mut c = Cursor::new(s);
    let out = parse_series_at(&mut c, field)?;
    if !c.at_end() {
        return Err(Error::parse(c.line, c.col, "trailing input after series"));
    }
    Ok(out)
}

fn parse_series_at(c: &mut Cursor, field: FieldSpec) -> Result<LaurentSeries> {
    c.skip_ws();
    c.expect(b'{')?;
    c.skip_ws();
    if !c.eat_word("ram") {
        return c.err("expected 'ram='");
    }
    c.skip_ws();
    c.expect(b'=')?;
    let ram = c.parse_integer()?;
    let ram: u32 = ram
        .to_string()
        .parse()
        .map_err(|_| Error::parse(c.line, c.col, "ram out of range"))?;
    c.skip_ws();
    c.expect(b';')?;
    c.skip_ws();
    if !c.eat_word("prec") {
        return c.err("expected 'prec='");
    }
    c.skip_ws();
    c.expect(b'=')?;
    let prec = c.parse_integer()?;
    let prec: i64 = prec
        .to_string()
        .parse()
        .map_err(|_| Error::parse(c.line, c.col, "prec out of range"))?;
    c.skip_ws();
    c.expect(b';')?;
    c.skip_ws();
    if !c.eat_word("terms") {
        return c.err("expected 'terms:'");
    }
    c.skip_ws();
    c.expect(b':')?;
    c.skip_ws();
    let mut terms: Vec<(i64, Scalar)> = Vec::new();
    if c.eat_word("(zero)") {
        c.skip_ws();
        c.expect(b'}')?;
        return LaurentSeries::from_terms(field, ram, &terms, prec);
    }
    loop {
        c.skip_ws();
        if c.eat(b'}') {
            break;
        }
        let idx = c.parse_integer()?;
        let idx: i64 = idx
            .to_string()
            .parse()
            .map_err(|_| Error::parse(c.line, c.col, "index out of range"))?;
        c.skip_ws();
        c.expect(b':')?;
        c.skip_ws();
        let coeff = parse_scalar_at(c, field)?;
        terms.push((idx, coeff));
        c.skip_ws();
        if c.eat(b',') {
            continue;
        }
    }
    LaurentSeries::from_terms(field, ram, &terms, prec)
}

// ---------------------------------------------------------------------------
// skew polynomials

/// Linear combinations of products of factors: "(scalar)", "{series}", "z",
/// "z^k", "xi", "xi^j", or a bare rational; factors multiply left to right
/// with the twisted product. Example: "xi^2 - (3)*z*xi^0".
pub fn parse_skew(s: &str, ctx: &Arc<AlgebraContext>) -> Result<SkewPoly> {
    let mut c = Cursor::new(s);
    let mut acc = SkewPoly::zero(ctx.clone());
    let mut first = true;
    loop {
        c.skip_ws();
        if c.pos >= c.src.len() {
            if first {
                return c.err("empty skew polynomial");
            }
            break;
        }
        let mut sign = 1i64;
        if c.eat(b'-') {
            sign = -1;
        } else if c.eat(b'+') {
        } else if !first {
            return c.err("expected '+' or '-' between terms");
        }
        let term = parse_skew_term(&mut c, ctx)?;
        let term = if sign < 0 { term.neg() } else { term };
        acc = acc.add(&term)?;
        first = false;
    }
    Ok(acc)
}

fn parse_skew_term(c: &mut Cursor, ctx: &Arc<AlgebraContext>) -> Result<SkewPoly> {
    let mut acc: Option<SkewPoly> = None;
    loop {
        c.skip_ws();
        let factor = if c.peek() == Some(b'(') {
            c.bump();
            let v = parse_scalar_at(c, ctx.field)?;
            c.skip_ws();
            c.expect(b')')?;
            SkewPoly::from_terms(ctx.clone(), vec![(0, LaurentSeries::constant(ctx.field, v, ctx.prec))])
        } else if c.peek() == Some(b'{') {
            let s = parse_series_at(c, ctx.field)?;
            SkewPoly::from_terms(ctx.clone(), vec![(0, s)])
        } else if c.eat_word("xi") {
            let e = if c.eat(b'^') { int_from(c)? } else { 1 };
            SkewPoly::xi_pow(ctx.clone(), e)
        } else if c.eat_word("z") {
            let e = if c.eat(b'^') { int_from(c)? } else { 1 };
            SkewPoly::from_terms(
                ctx.clone(),
                vec![(0, LaurentSeries::monomial(ctx.field, Scalar::one(ctx.field), e, 1, ctx.prec)?)],
            )
        } else if matches!(c.peek(), Some(ch) if ch.is_ascii_digit()) {
            let r = c.parse_rational()?;
            SkewPoly::from_terms(
                ctx.clone(),
                vec![(0, LaurentSeries::constant(ctx.field, Scalar::from_rational(ctx.field, r), ctx.prec))],
            )
        } else {
            return c.err("expected a factor: (scalar), {series}, z, xi, or a rational");
        };
        acc = Some(match acc {
            None => factor,
            Some(a) => a.mul(&factor)?,
        });
        c.skip_ws();
        if !c.eat(b'*') {
            break;
        }
    }
    Ok(acc.expect("at least one factor"))
}

fn int_from(c: &mut Cursor) -> Result<i64> {
    let v = c.parse_integer()?;
    v.to_string().parse().map_err(|_| Error::parse(c.line, c.col, "integer out of range"))
}

// ---------------------------------------------------------------------------
// module files

/// Module files: a "dim n" header then n rows of n series separated by '|'.
/// Lines starting with '#' are comments.
pub fn parse_module(s: &str, ctx: &Arc<AlgebraContext>) -> Result<QDiffModule> {
    let mut rows: Vec<Vec<LaurentSeries>> = Vec::new();
    let mut dim: Option<usize> = None;
    for (lineno, raw) in s.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if dim.is_none() {
            let Some(rest) = line.strip_prefix("dim") else {
                return Err(Error::parse(lineno + 1, 1, "expected 'dim <n>' header"));
            };
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno + 1, 5, "bad dimension"))?;
            if n == 0 {
                return Err(Error::parse(lineno + 1, 5, "dimension must be positive"));
            }
            dim = Some(n);
            continue;
        }
        let mut row = Vec::new();
        for chunk in line.split('|') {
            let mut c = Cursor::new(chunk);
            c.line = lineno + 1;
            let entry = parse_series_at(&mut c, ctx.field)?;
            if !c.at_end() {
                return Err(Error::parse(lineno + 1, c.col, "trailing input in matrix entry"));
            }
            row.push(entry);
        }
        if row.len() != dim.unwrap() {
            return Err(Error::parse(
                lineno + 1,
                1,
                format!("expected {} entries, found {}", dim.unwrap(), row.len()),
            ));
        }
        rows.push(row);
    }
    let Some(n) = dim else {
        return Err(Error::parse(1, 1, "missing 'dim' header"));
    };
    if rows.len() != n {
        return Err(Error::parse(1, 1, format!("expected {n} rows, found {}", rows.len())));
    }
    QDiffModule::new(ctx.clone(), SMat::from_rows(ctx.field, rows))
}

pub fn module_to_string(m: &QDiffModule) -> String {
    let mut out = format!("dim {}\n", m.dim);
    for i in 0..m.dim {
        let row: Vec<String> = (0..m.dim).map(|j| m.phi.at(i, j).to_string()).collect();
        out.push_str(&row.join(" | "));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// label files

/// Label lines "n k l a [M]"; the parameter literal may contain spaces.
pub fn parse_labels(s: &str, field: FieldSpec, default_bound: i64) -> Result<Vec<IndecompLabel>> {
    let mut out = Vec::new();
    for (lineno, raw) in s.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut c = Cursor::new(line);
        c.line = lineno + 1;
        let n = int_from(&mut c)?;
        let k = int_from(&mut c)?;
        let l = int_from(&mut c)?;
        c.skip_ws();
        let rest = std::str::from_utf8(&c.src[c.pos..]).expect("utf8 input");
        let (a_text, bound) = match rest.rfind('[') {
            Some(at) if rest.trim_end().ends_with(']') => {
                let close = rest.rfind(']').expect("checked");
                let inner = rest[at + 1..close].trim();
                let b: i64 = inner
                    .parse()
                    .map_err(|_| Error::parse(lineno + 1, at + 1, "bad orbit bound"))?;
                (rest[..at].trim(), b)
            }
            _ => (rest.trim(), default_bound),
        };
        let a = parse_scalar(a_text, field).map_err(|e| match e {
            Error::Parse { col, msg, .. } => Error::parse(lineno + 1, col, msg),
            other => other,
        })?;
        let n: u32 = n
            .try_into()
            .map_err(|_| Error::parse(lineno + 1, 1, "n must be positive"))?;
        let l: u32 = l
            .try_into()
            .map_err(|_| Error::parse(lineno + 1, 1, "l must be positive"))?;
        out.push(IndecompLabel::new(n, k, l, a, bound)?);
    }
    if out.is_empty() {
        return Err(Error::parse(1, 1, "no labels found"));
    }
    Ok(out)
}

pub fn labels_to_string(labels: &[IndecompLabel], ctx: &Arc<AlgebraContext>) -> Result<String> {
    let mut sorted = labels.to_vec();
    crate::qmod::sort_labels(&mut sorted, ctx)?;
    let mut out = String::new();
    for l in &sorted {
        let point = l.canonical_point(ctx)?;
        out.push_str(&format!("{} {} {} {} [{}]\n", l.n, l.k, l.l, point, l.orbit_bound));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// torus elements

/// Lines "l_1 ... l_d : coefficient" with p-adic coefficient literals.
pub fn parse_torus_element(
    s: &str,
    form: &Arc<TorusForm>,
    p: u64,
    prec: u32,
) -> Result<TorusElement> {
    let mut terms = Vec::new();
    for (lineno, raw) in s.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "(zero)" {
            continue;
        }
        let Some((idx_part, coeff_part)) = line.split_once(':') else {
            return Err(Error::parse(lineno + 1, 1, "expected 'indices : coefficient'"));
        };
        let mut lambda = Vec::new();
        for tok in idx_part.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno + 1, 1, format!("bad index '{tok}'")))?;
            lambda.push(v);
        }
        if lambda.len() != form.d {
            return Err(Error::parse(
                lineno + 1,
                1,
                format!("expected {} indices, found {}", form.d, lambda.len()),
            ));
        }
        let c = parse_scalar(coeff_part.trim(), FieldSpec::Padic { p, prec })?;
        let Scalar::Padic(cp) = c else {
            return Err(Error::parse(lineno + 1, 1, "coefficient must be p-adic"));
        };
        terms.push((lambda, cp));
    }
    TorusElement::new(form.clone(), terms)
}
