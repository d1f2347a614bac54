//! Exact root extraction for characteristic polynomials over the supported
//! coefficient fields.
//!
//! Rational roots are found by reducing to integer roots of a monic integer
//! polynomial, computing roots modulo a small good prime, and Newton-lifting
//! to a modulus beyond the root bound; no integer factorization is involved.
//! Full factorization over Q (used to locate quadratic-field roots through
//! the norm polynomial) is a small Zassenhaus: Cantor-Zassenhaus modulo p,
//! quadratic Hensel lifting, subset recombination. Everything is exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::poly_divide_linear;
use crate::scalars::{PadicScalar, QuadraticNumber, Scalar};

// ---------------------------------------------------------------------------
// rational polynomials (ascending coefficients)

pub type QPoly = Vec<BigRational>;

pub fn qp_trim(p: &mut QPoly) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

pub fn qp_deg(p: &QPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn qp_mul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    qp_trim(&mut out);
    out
}

pub fn qp_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    qp_trim(&mut out);
    out
}

pub fn qp_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let db = qp_deg(b).expect("division by zero polynomial");
    let mut r = a.clone();
    qp_trim(&mut r);
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    let lead = b[db].clone();
    while let Some(dr) = qp_deg(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        let shift = dr - db;
        q[shift] = c.clone();
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        qp_trim(&mut r);
    }
    qp_trim(&mut q);
    (q, r)
}

pub fn qp_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    qp_trim(&mut x);
    qp_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = qp_divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = qp_deg(&x) {
        let lead = x[d].clone();
        for c in &mut x {
            *c /= &lead;
        }
    }
    x
}

pub fn qp_derivative(a: &QPoly) -> QPoly {
    let mut out = Vec::new();
    for (i, c) in a.iter().enumerate().skip(1) {
        out.push(c * BigRational::from(BigInt::from(i)));
    }
    qp_trim(&mut out);
    out
}

pub fn qp_squarefree_part(a: &QPoly) -> QPoly {
    let d = qp_derivative(a);
    if d.is_empty() {
        return a.clone();
    }
    let g = qp_gcd(a, &d);
    if qp_deg(&g) == Some(0) {
        return a.clone();
    }
    let (q, _) = qp_divrem(a, &g);
    q
}

/// Clear denominators and content: primitive integer polynomial with the
/// same roots, positive leading coefficient.
pub fn qp_to_primitive(a: &QPoly) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in a {
        den = den.lcm(c.denom());
    }
    let mut out: Vec<BigInt> = a.iter().map(|c| (c * BigRational::from(den.clone())).to_integer()).collect();
    let mut content = BigInt::zero();
    for c in &out {
        content = content.gcd(c);
    }
    if !content.is_zero() && !content.is_one() {
        for c in &mut out {
            *c /= &content;
        }
    }
    if out.last().map(|c| c.is_negative()).unwrap_or(false) {
        for c in &mut out {
            *c = -c.clone();
        }
    }
    out
}

// ---------------------------------------------------------------------------
// GF(p) polynomials for small p (Cantor-Zassenhaus)

#[derive(Clone, Debug, PartialEq)]
struct Fp {
    p: u64,
}

impl Fp {
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }
    fn pow(&self, mut b: u64, mut e: u128) -> u64 {
        let mut acc = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }
    fn inv(&self, a: u64) -> u64 {
        self.pow(a, (self.p - 2) as u128)
    }

    fn trim(&self, v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn pmulmod(&self, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        self.trim(&mut out);
        self.prem(&out, m)
    }

    fn prem(&self, a: &[u64], m: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        self.trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = self.inv(m[dm]);
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = self.mul(r[dr], lead_inv);
            let shift = dr - dm;
            for (i, &y) in m.iter().enumerate() {
                r[shift + i] = self.sub(r[shift + i], self.mul(c, y));
            }
            self.trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    fn pgcd(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        self.trim(&mut x);
        self.trim(&mut y);
        while !y.is_empty() {
            let r = self.prem(&x, &y);
            x = y;
            y = r;
        }
        if let Some(&l) = x.last() {
            let li = self.inv(l);
            for c in &mut x {
                *c = self.mul(*c, li);
            }
        }
        x
    }

    fn ppowmod(&self, a: &[u64], mut e: u128, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = self.prem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.pmulmod(&acc, &b, m);
            }
            b = self.pmulmod(&b, &b, m);
            e >>= 1;
        }
        acc
    }
}

/// Factor a squarefree monic polynomial over GF(p) into monic irreducibles.
fn factor_mod_p(f: &[u64], p: u64, seed: &mut u64) -> Vec<Vec<u64>> {
    let fp = Fp { p };
    let mut out = Vec::new();
    // distinct-degree
    let mut rest = f.to_vec();
    let mut h = vec![0u64, 1]; // x
    let mut d = 0usize;
    let mut by_degree: Vec<(usize, Vec<u64>)> = Vec::new();
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            by_degree.push((rest.len() - 1, rest.clone()));
            break;
        }
        h = fp.ppowmod(&h, p as u128, &rest);
        let mut hx = h.clone();
        // h - x
        if hx.len() < 2 {
            hx.resize(2, 0);
        }
        hx[1] = fp.sub(hx[1], 1);
        fp.trim(&mut hx);
        let g = if hx.is_empty() { rest.clone() } else { fp.pgcd(&hx, &rest) };
        if g.len() > 1 {
            by_degree.push((d, g.clone()));
            // rest /= g
            rest = exact_div_mod_p(&fp, &rest, &g);
            h = fp.prem(&h, &rest);
        }
    }
    // equal-degree splitting
    for (d, prod) in by_degree {
        let mut stack = vec![prod];
        while let Some(g) = stack.pop() {
            let dg = g.len() - 1;
            if dg == d {
                out.push(g);
                continue;
            }
            // random split
            loop {
                *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let mut a: Vec<u64> = (0..dg).map(|i| {
                    let mut s = *seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15);
                    s ^= s >> 33;
                    s = s.wrapping_mul(0xff51afd7ed558ccd);
                    s ^= s >> 33;
                    s % p
                }).collect();
                fp.trim(&mut a);
                if a.is_empty() {
                    continue;
                }
                let e = (p as u128).pow(d as u32) / 2;
                let mut b = fp.ppowmod(&a, e, &g);
                // b - 1
                if b.is_empty() {
                    b = vec![0];
                }
                b[0] = fp.sub(b[0], 1);
                fp.trim(&mut b);
                if b.is_empty() {
                    continue;
                }
                let h = fp.pgcd(&b, &g);
                if h.len() > 1 && h.len() < g.len() {
                    let other = exact_div_mod_p(&fp, &g, &h);
                    stack.push(h);
                    stack.push(other);
                    break;
                }
            }
        }
    }
    out
}

fn exact_div_mod_p(fp: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    fp.trim(&mut r);
    let db = b.len() - 1;
    let mut q = vec![0u64; r.len() - db];
    let li = fp.inv(b[db]);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = fp.mul(r[dr], li);
        q[dr - db] = c;
        for (i, &y) in b.iter().enumerate() {
            r[dr - db + i] = fp.sub(r[dr - db + i], fp.mul(c, y));
        }
        fp.trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    q
}

// ---------------------------------------------------------------------------
// Z/m polynomials (Hensel lifting)

fn zm_reduce(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    while out.last().map(|c| c.is_zero()).unwrap_or(false) {
        out.pop();
    }
    out
}

fn zm_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zm_reduce(&out, m)
}

fn zm_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    zm_reduce(&out, m)
}

fn zm_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    zm_reduce(&out, m)
}

/// Division by a monic polynomial over Z/m.
fn zm_divrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = a.to_vec();
    r = zm_reduce(&r, m);
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr].clone();
        q[dr - db] = c.clone();
        for (i, y) in b.iter().enumerate() {
            r[dr - db + i] -= &c * y;
        }
        r = zm_reduce(&r, m);
        if r.is_empty() {
            break;
        }
    }
    (zm_reduce(&q, m), r)
}

/// One quadratic Hensel step: f = g h (mod m), s g + t h = 1 (mod m), all
/// monic except s, t; returns the data modulo m^2.
#[allow(clippy::type_complexity)]
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let m2 = m * m;
    let e = zm_sub(f, &zm_mul(g, h, &m2), &m2);
    let (q, r) = zm_divrem_monic(&zm_mul(s, &e, &m2), h, &m2);
    let g1 = zm_add(&zm_add(g, &zm_mul(t, &e, &m2), &m2), &zm_mul(&q, g, &m2), &m2);
    let h1 = zm_add(h, &r, &m2);
    let b = zm_sub(&zm_add(&zm_mul(s, &g1, &m2), &zm_mul(t, &h1, &m2), &m2), &[BigInt::one()], &m2);
    let (c, d) = zm_divrem_monic(&zm_mul(s, &b, &m2), &h1, &m2);
    let s1 = zm_sub(s, &d, &m2);
    let t1 = zm_sub(&zm_sub(t, &zm_mul(t, &b, &m2), &m2), &zm_mul(&c, &g1, &m2), &m2);
    (g1, h1, s1, t1)
}

/// Extended Euclid over GF(p) returning (s, t) with s a + t b = 1.
fn bezout_mod_p(a: &[u64], b: &[u64], p: u64) -> (Vec<BigInt>, Vec<BigInt>) {
    let fp = Fp { p };
    // classic extended euclid on polynomials
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0: Vec<u64> = vec![1];
    let mut s1: Vec<u64> = vec![];
    let mut t0: Vec<u64> = vec![];
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // q, r of r0 / r1
        let mut r = r0.clone();
        fp.trim(&mut r);
        let d1 = r1.len() - 1;
        let li = fp.inv(r1[d1]);
        let mut q = vec![0u64; r.len().saturating_sub(d1)];
        while r.len() > d1 || (r.len() == d1 + 1 && !r.is_empty()) {
            if r.len() < d1 + 1 {
                break;
            }
            let dr = r.len() - 1;
            let c = fp.mul(r[dr], li);
            if q.len() <= dr - d1 {
                q.resize(dr - d1 + 1, 0);
            }
            q[dr - d1] = c;
            for (i, &y) in r1.iter().enumerate() {
                r[dr - d1 + i] = fp.sub(r[dr - d1 + i], fp.mul(c, y));
            }
            fp.trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        let mul_q = |v: &[u64]| -> Vec<u64> {
            if v.is_empty() || q.is_empty() {
                return vec![];
            }
            let mut out = vec![0u64; v.len() + q.len() - 1];
            for (i, &x) in v.iter().enumerate() {
                for (j, &y) in q.iter().enumerate() {
                    out[i + j] = fp.add(out[i + j], fp.mul(x, y));
                }
            }
            let mut o = out;
            fp.trim(&mut o);
            o
        };
        let sub = |x: &[u64], y: &[u64]| -> Vec<u64> {
            let mut out = x.to_vec();
            if out.len() < y.len() {
                out.resize(y.len(), 0);
            }
            for (i, &c) in y.iter().enumerate() {
                out[i] = fp.sub(out[i], c);
            }
            let mut o = out;
            fp.trim(&mut o);
            o
        };
        let s2 = sub(&s0, &mul_q(&s1));
        let t2 = sub(&t0, &mul_q(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    // r0 = gcd (constant for coprime inputs); normalize to 1
    let c = fp.inv(r0[0]);
    let to_big = |v: &[u64]| -> Vec<BigInt> { v.iter().map(|&x| BigInt::from(fp.mul(x, c))).collect() };
    (to_big(&s0), to_big(&t0))
}

/// Centered representative in (-m/2, m/2].
fn centered(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

// ---------------------------------------------------------------------------
// public entry points

/// All rational roots (with multiplicities) of a rational polynomial.
pub fn rational_roots(f: &QPoly) -> Vec<(BigRational, usize)> {
    let mut f = f.clone();
    qp_trim(&mut f);
    let Some(deg) = qp_deg(&f) else {
        return vec![];
    };
    if deg == 0 {
        return vec![];
    }
    // strip zero roots
    let mut zero_mult = 0usize;
    while f[0].is_zero() {
        f.remove(0);
        zero_mult += 1;
    }
    let mut out = Vec::new();
    if zero_mult > 0 {
        out.push((BigRational::zero(), zero_mult));
    }
    if qp_deg(&f) == Some(0) || f.is_empty() {
        return out;
    }
    let sf = qp_squarefree_part(&f);
    let zi = qp_to_primitive(&sf);
    let n = zi.len() - 1;
    if n == 0 {
        return out;
    }
    // monic transform y = lc * x
    let lc = zi[n].clone();
    let mut g: Vec<BigInt> = Vec::with_capacity(n + 1);
    for (i, c) in zi.iter().enumerate() {
        // coefficient of y^i is c_i * lc^(n-1-i)
        g.push(c * lc.pow((n - 1 - i.min(n - 1)) as u32));
    }
    g[n] = BigInt::one();
    let candidates = monic_integer_roots(&g);
    for y in candidates {
        let r = BigRational::new(y, lc.clone());
        // multiplicity on the original polynomial
        let mut mult = 0usize;
        let mut cur = f.clone();
        loop {
            let (q, rem) = qp_divrem(&cur, &vec![-r.clone(), BigRational::one()]);
            if rem.is_empty() {
                mult += 1;
                cur = q;
                if cur.len() <= 1 {
                    break;
                }
            } else {
                break;
            }
        }
        if mult > 0 {
            out.push((r, mult));
        }
    }
    out
}

/// Integer roots of a monic squarefree integer polynomial, by lifting
/// roots modulo a good small prime.
fn monic_integer_roots(g: &[BigInt]) -> Vec<BigInt> {
    let n = g.len() - 1;
    if n == 0 {
        return vec![];
    }
    // Cauchy bound for monic polynomials
    let mut bound = BigInt::one();
    for c in &g[..n] {
        let a = c.abs();
        if a > bound {
            bound = a;
        }
    }
    bound += 1;
    let primes: [u64; 12] = [101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157];
    'prime: for &p in &primes {
        let fp = Fp { p };
        let gp: Vec<u64> = g.iter().map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap()).collect();
        let mut gp_t = gp.clone();
        fp.trim(&mut gp_t);
        if gp_t.len() != g.len() {
            continue; // lost the leading coefficient (cannot happen: monic)
        }
        // check squarefree mod p
        let mut dgp: Vec<u64> = gp.iter().enumerate().skip(1).map(|(i, &c)| fp.mul(c, (i as u64) % p)).collect();
        fp.trim(&mut dgp);
        if dgp.is_empty() || fp.pgcd(&gp_t, &dgp).len() > 1 {
            continue 'prime;
        }
        // roots mod p by brute force
        let mut roots_p = Vec::new();
        for x in 0..p {
            let mut acc = 0u64;
            for c in gp.iter().rev() {
                acc = fp.add(fp.mul(acc, x), *c);
            }
            if acc == 0 {
                roots_p.push(x);
            }
        }
        // Newton lift each root past 2*bound
        let mut out = Vec::new();
        let target = &bound * 2 + 1;
        for r0 in roots_p {
            let mut m = BigInt::from(p);
            let mut r = BigInt::from(r0);
            while m < target {
                let m2 = &m * &m;
                let fr = eval_int(g, &r).mod_floor(&m2);
                let dr = eval_int(&int_derivative(g), &r);
                let dr_inv = mod_inverse_bigint(&dr, &m2);
                let Some(dr_inv) = dr_inv else {
                    break;
                };
                r = (&r - fr * dr_inv).mod_floor(&m2);
                m = m2;
            }
            let cand = centered(&r, &m);
            if eval_int(g, &cand).is_zero() {
                out.push(cand);
            }
        }
        out.sort();
        out.dedup();
        return out;
    }
    Vec::new()
}

fn eval_int(g: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in g.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn int_derivative(g: &[BigInt]) -> Vec<BigInt> {
    g.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn mod_inverse_bigint(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Factor a rational polynomial into monic irreducible factors with
/// multiplicities (small-degree Zassenhaus).
pub fn factor_rational(f: &QPoly) -> Vec<(QPoly, usize)> {
    let mut f = f.clone();
    qp_trim(&mut f);
    let Some(deg) = qp_deg(&f) else {
        return vec![];
    };
    if deg == 0 {
        return vec![];
    }
    let mut out: Vec<(QPoly, usize)> = Vec::new();
    let mut zero_mult = 0usize;
    while f[0].is_zero() {
        f.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        out.push((vec![BigRational::zero(), BigRational::one()], zero_mult));
    }
    // squarefree decomposition by repeated gcd
    let rest = f;
    let mut mult = 1usize;
    while qp_deg(&rest).map(|d| d >= 1).unwrap_or(false) {
        let sf = qp_squarefree_part(&rest);
        for irr in factor_squarefree(&sf) {
            // multiplicity of irr in rest
            let mut m = 0usize;
            let mut cur = rest.clone();
            loop {
                let (q, r) = qp_divrem(&cur, &irr);
                if r.is_empty() {
                    m += 1;
                    cur = q;
                } else {
                    break;
                }
            }
            if m > 0 {
                out.push((irr, m * mult / mult)); // m counts within rest
            }
        }
        break;
    }
    // The loop above fully handles multiplicities via division counting.
    let _ = &mut mult;
    out
}

fn factor_squarefree(f: &QPoly) -> Vec<QPoly> {
    let Some(deg) = qp_deg(f) else {
        return vec![];
    };
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        let mut m = f.clone();
        let lead = m[1].clone();
        for c in &mut m {
            *c /= &lead;
        }
        return vec![m];
    }
    let zi = qp_to_primitive(f);
    let n = zi.len() - 1;
    let lc = zi[n].clone();
    // monic transform g(y) = lc^(n-1) f(y/lc)
    let mut g: Vec<BigInt> = Vec::with_capacity(n + 1);
    for (i, c) in zi.iter().enumerate() {
        g.push(c * lc.pow((n - 1 - i.min(n - 1)) as u32));
    }
    g[n] = BigInt::one();

    let primes: [u64; 10] = [101, 103, 107, 109, 113, 127, 131, 137, 139, 149];
    for &p in &primes {
        let fp = Fp { p };
        let gp: Vec<u64> = g.iter().map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap()).collect();
        let mut gpt = gp.clone();
        fp.trim(&mut gpt);
        if gpt.len() != g.len() {
            continue;
        }
        let mut dgp: Vec<u64> = gp.iter().enumerate().skip(1).map(|(i, &c)| fp.mul(c, (i as u64) % p)).collect();
        fp.trim(&mut dgp);
        if dgp.is_empty() || fp.pgcd(&gpt, &dgp).len() > 1 {
            continue;
        }
        let mut seed = 0x5eed5eedu64 ^ p;
        let factors_p = factor_mod_p(&gpt, p, &mut seed);
        if factors_p.len() == 1 {
            // irreducible over Q as well
            return vec![monicize(f)];
        }
        // Landau-Mignotte style bound on factor coefficients of monic g
        let mut norm = BigInt::zero();
        for c in &g {
            norm += c.abs();
        }
        let bound: BigInt = norm * BigInt::from(2).pow(n as u32 + 1);
        // lift the factorization tree
        let lifted = lift_tree(&g, &factors_p, p, &bound);
        let modulus = lifted.1;
        let factors = lifted.0;
        // recombination
        let mut result = Vec::new();
        let mut rem_poly = g.clone();
        let mut used = vec![false; factors.len()];
        let mut k = 1usize;
        while k <= factors.iter().zip(&used).filter(|(_, &u)| !u).count() {
            let avail: Vec<usize> = (0..factors.len()).filter(|&i| !used[i]).collect();
            let mut found = false;
            for subset in subsets_of_size(&avail, k) {
                let mut cand = vec![BigInt::one()];
                for &i in &subset {
                    cand = zm_mul(&cand, &factors[i], &modulus);
                }
                let cand_centered: Vec<BigInt> = cand.iter().map(|c| centered(c, &modulus)).collect();
                let (q, ok) = try_exact_div_int(&rem_poly, &cand_centered);
                if ok {
                    result.push(cand_centered.clone());
                    for &i in &subset {
                        used[i] = true;
                    }
                    rem_poly = q;
                    found = true;
                    break;
                }
            }
            if !found {
                k += 1;
            } else {
                k = 1;
            }
        }
        if rem_poly.len() > 1 {
            result.push(rem_poly);
        }
        // back substitute y = lc * x: a factor h(y) of g gives h(lc x) as a
        // factor of f up to a constant; normalize monic over Q
        let mut out = Vec::new();
        for fac in result {
            let dn = fac.len() - 1;
            let mut q: QPoly = fac
                .iter()
                .enumerate()
                .map(|(i, c)| BigRational::from(c.clone()) * BigRational::from(lc.pow(i as u32)))
                .collect();
            let lead = q[dn].clone();
            for c in &mut q {
                *c /= &lead;
            }
            out.push(q);
        }
        return out;
    }
    // no good prime found (should not happen for squarefree input)
    vec![monicize(f)]
}

fn monicize(f: &QPoly) -> QPoly {
    let mut m = f.clone();
    let d = qp_deg(&m).expect("nonzero");
    let lead = m[d].clone();
    for c in &mut m {
        *c /= &lead;
    }
    m
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn try_exact_div_int(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, bool) {
    if b.is_empty() || b.last().map(|c| c.is_zero()).unwrap_or(true) {
        return (vec![], false);
    }
    let ra: QPoly = a.iter().map(|c| BigRational::from(c.clone())).collect();
    let rb: QPoly = b.iter().map(|c| BigRational::from(c.clone())).collect();
    let (q, r) = qp_divrem(&ra, &rb);
    if !r.is_empty() {
        return (vec![], false);
    }
    let mut qi = Vec::with_capacity(q.len());
    for c in q {
        if !c.denom().is_one() {
            return (vec![], false);
        }
        qi.push(c.to_integer());
    }
    (qi, true)
}

/// Lift the factor list of the monic g from mod p to a modulus > bound.
fn lift_tree(g: &[BigInt], factors_p: &[Vec<u64>], p: u64, bound: &BigInt) -> (Vec<Vec<BigInt>>, BigInt) {
    fn rec(
        f: &[BigInt],
        factors: &[Vec<u64>],
        p: u64,
        target: &BigInt,
    ) -> (Vec<Vec<BigInt>>, BigInt) {
        if factors.len() == 1 {
            // f itself is the lift of the single factor
            return (vec![f.to_vec()], target.clone());
        }
        let mid = factors.len() / 2;
        let (left, right) = factors.split_at(mid);
        let fp = Fp { p };
        let mut gprod = vec![1u64];
        for fac in left {
            let mut tmp = vec![0u64; gprod.len() + fac.len() - 1];
            for (i, &x) in gprod.iter().enumerate() {
                for (j, &y) in fac.iter().enumerate() {
                    tmp[i + j] = fp.add(tmp[i + j], fp.mul(x, y));
                }
            }
            gprod = tmp;
        }
        let mut hprod = vec![1u64];
        for fac in right {
            let mut tmp = vec![0u64; hprod.len() + fac.len() - 1];
            for (i, &x) in hprod.iter().enumerate() {
                for (j, &y) in fac.iter().enumerate() {
                    tmp[i + j] = fp.add(tmp[i + j], fp.mul(x, y));
                }
            }
            hprod = tmp;
        }
        let (s, t) = bezout_mod_p(&gprod, &hprod, p);
        let mut gl: Vec<BigInt> = gprod.iter().map(|&x| BigInt::from(x)).collect();
        let mut hl: Vec<BigInt> = hprod.iter().map(|&x| BigInt::from(x)).collect();
        let mut sl = s;
        let mut tl = t;
        let mut m = BigInt::from(p);
        while &m <= target {
            let (g1, h1, s1, t1) = hensel_step(f, &gl, &hl, &sl, &tl, &m);
            gl = g1;
            hl = h1;
            sl = s1;
            tl = t1;
            m = &m * &m;
        }
        let (mut lv, _) = rec(&gl, left, p, &m);
        let (rv, _) = rec(&hl, right, p, &m);
        lv.extend(rv);
        (lv, m)
    }
    rec(g, factors_p, p, &(bound * 2 + 1))
}

// ---------------------------------------------------------------------------
// roots over the scalar fields

pub struct RootSearch {
    pub roots: Vec<(Scalar, usize)>,
    pub fully_split: bool,
}

/// Roots (in the coefficient field) of a polynomial with Scalar coefficients
/// (ascending). `fully_split` reports whether the multiplicities exhaust the
/// degree.
pub fn scalar_poly_roots(coeffs: &[Scalar]) -> Result<RootSearch> {
    let mut c = coeffs.to_vec();
    while c.last().map(|x| x.is_zero()).unwrap_or(false) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(RootSearch { roots: vec![], fully_split: true });
    }
    let field = c[0].field_spec();
    let deg = c.len() - 1;
    let candidates: Vec<Scalar> = match &c[0] {
        Scalar::Rat(_) => {
            let q: QPoly = c
                .iter()
                .map(|x| x.as_rational().expect("uniform field").clone())
                .collect();
            rational_roots(&q).into_iter().map(|(r, _)| Scalar::Rat(r)).collect()
        }
        Scalar::Quad(q0) => quadratic_candidates(&c, q0.d)?,
        Scalar::Padic(_) => padic_candidates(&c)?,
    };
    // multiplicities by repeated exact division in the field
    let mut roots = Vec::new();
    let mut total = 0usize;
    for cand in candidates {
        let mut mult = 0usize;
        let mut cur = c.clone();
        loop {
            if cur.len() <= 1 {
                break;
            }
            let (q, r) = poly_divide_linear(&cur, &cand)?;
            if r.is_zero() {
                mult += 1;
                cur = q;
            } else {
                break;
            }
        }
        if mult > 0 {
            total += mult;
            roots.push((cand, mult));
        }
    }
    let _ = field;
    Ok(RootSearch { roots, fully_split: total == deg })
}

fn quadratic_candidates(c: &[Scalar], d: i64) -> Result<Vec<Scalar>> {
    // norm polynomial N = p * conj(p) has rational coefficients
    let conj: Vec<Scalar> = c
        .iter()
        .map(|x| match x {
            Scalar::Quad(q) => Scalar::Quad(q.conj()),
            other => other.clone(),
        })
        .collect();
    let mut norm = vec![Scalar::zero(c[0].field_spec()); 2 * c.len() - 1];
    for (i, x) in c.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in conj.iter().enumerate() {
            if !y.is_zero() {
                norm[i + j] = norm[i + j].add(&x.mul(y)?)?;
            }
        }
    }
    let nq: QPoly = norm
        .iter()
        .map(|x| {
            let q = x.as_quadratic().expect("quadratic field");
            debug_assert!(q.b.is_zero(), "norm polynomial is rational");
            q.a.clone()
        })
        .collect();
    let mut cands: Vec<Scalar> = Vec::new();
    for (fac, _) in factor_rational(&nq) {
        match qp_deg(&fac) {
            Some(1) => {
                // monic x + c0: root -c0
                cands.push(Scalar::Quad(QuadraticNumber::from_rational(-fac[0].clone(), d)));
            }
            Some(2) => {
                // monic x^2 + u x + v: roots (-u +- sqrt(u^2-4v))/2
                let u = fac[1].clone();
                let v = fac[0].clone();
                let disc = &u * &u - BigRational::from(BigInt::from(4)) * &v;
                let dd = BigRational::from(BigInt::from(d));
                let ratio = &disc / &dd;
                if let Some(y) = crate::scalars::rational_sqrt(&ratio) {
                    let two = BigRational::from(BigInt::from(2));
                    let x = -&u / &two;
                    let yy = &y / &two;
                    cands.push(Scalar::Quad(QuadraticNumber { a: x.clone(), b: yy.clone(), d }));
                    cands.push(Scalar::Quad(QuadraticNumber { a: x, b: -yy, d }));
                }
            }
            _ => {}
        }
    }
    Ok(cands)
}

fn padic_candidates(c: &[Scalar]) -> Result<Vec<Scalar>> {
    let (p, prec) = match &c[0] {
        Scalar::Padic(x) => (x.p, x.prec),
        _ => unreachable!(),
    };
    // normalize to valuation >= 0 with a unit somewhere
    let mut minv = i64::MAX;
    for x in c {
        if let Scalar::Padic(px) = x {
            if let Some(v) = px.valuation() {
                minv = minv.min(v);
            }
        }
    }
    if minv == i64::MAX {
        return Ok(vec![]);
    }
    // residues mod p
    let mut resid: Vec<u64> = Vec::with_capacity(c.len());
    for x in c {
        let Scalar::Padic(px) = x else { unreachable!() };
        match (px.valuation(), px.unit_digits()) {
            (Some(v), Some(u)) if v == minv => {
                resid.push((u % BigUint::from(p)).to_u64().unwrap_or(0));
            }
            _ => resid.push(0),
        }
    }
    let fp = Fp { p };
    let mut cands = Vec::new();
    // leading residue must survive for Newton lifting of unit roots
    for r0 in 0..p {
        let mut acc = 0u64;
        for cc in resid.iter().rev() {
            acc = fp.add(fp.mul(acc, r0), *cc);
        }
        if acc != 0 {
            continue;
        }
        // derivative residue
        let mut dacc = 0u64;
        for (i, cc) in resid.iter().enumerate().skip(1).rev() {
            dacc = fp.add(fp.mul(dacc, r0), fp.mul(*cc, (i as u64) % p));
        }
        if dacc == 0 {
            // repeated root mod p: out of scope for exact lifting here
            continue;
        }
        // Newton-lift inside the scalar field itself; a full-cancellation
        // evaluation means the root is exact at the working precision
        let mut x = Scalar::Padic(PadicScalar::from_integer(p, r0 as i64, prec)?);
        for _ in 0..(64 - (prec as u32).leading_zeros() + 2) {
            let fx = match crate::linalg::poly_eval(c, &x) {
                Ok(v) => v,
                Err(Error::PrecisionExhausted(_)) => break,
                Err(e) => return Err(e),
            };
            if fx.is_zero() {
                break;
            }
            let dfx = crate::linalg::poly_eval(&derivative_scalars(c), &x)?;
            if dfx.is_zero() {
                break;
            }
            x = match x.sub(&fx.div(&dfx)?) {
                Ok(v) => v,
                Err(Error::PrecisionExhausted(_)) => break,
                Err(e) => return Err(e),
            };
        }
        cands.push(x);
    }
    Ok(cands)
}

fn derivative_scalars(c: &[Scalar]) -> Vec<Scalar> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, x)| {
            x.mul(&Scalar::from_integer(x.field_spec(), i as i64)).expect("same field")
        })
        .collect()
}
