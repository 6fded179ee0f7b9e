//! Multivariate polynomial gcd over the rationals, primitive PRS style.
//!
//! Inputs must have nonnegative exponents (callers strip Laurent content
//! first). Results are normalized so the lexicographically largest term has
//! coefficient one.

use std::collections::BTreeMap;

use num_traits::One;

use super::poly::{LaurentPoly, Rat};

/// Univariate view of `p` in its `idx`-th variable: degree -> coefficient
/// polynomial over the remaining variables.
fn as_univariate(p: &LaurentPoly, idx: usize) -> BTreeMap<i64, LaurentPoly> {
    let rest: Vec<String> = p
        .vars
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, v)| v.clone())
        .collect();
    let mut out: BTreeMap<i64, BTreeMap<Vec<i64>, Rat>> = BTreeMap::new();
    for (e, c) in &p.terms {
        let d = e[idx];
        let ne: Vec<i64> = e
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, &x)| x)
            .collect();
        out.entry(d).or_default().insert(ne, c.clone());
    }
    out.into_iter()
        .map(|(d, terms)| (d, LaurentPoly { vars: rest.clone(), terms }.prune_vars()))
        .collect()
}

fn from_univariate(coeffs: &BTreeMap<i64, LaurentPoly>, var: &str) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for (d, c) in coeffs {
        let m = LaurentPoly::monomial(&[(var, *d)], Rat::one());
        acc = acc.add(&c.mul(&m));
    }
    acc
}

fn degree_in(p: &LaurentPoly, idx: usize) -> i64 {
    p.terms.keys().map(|e| e[idx]).max().unwrap_or(-1)
}

/// Picks the used variable of smallest positive degree spread, if any.
fn main_variable(a: &LaurentPoly, b: &LaurentPoly) -> Option<String> {
    let mut best: Option<(i64, String)> = None;
    for p in [a, b] {
        for (i, v) in p.vars.iter().enumerate() {
            let d = degree_in(p, i);
            if d > 0 {
                let score = d;
                if best.as_ref().map_or(true, |(s, _)| score < *s) {
                    best = Some((score, v.clone()));
                }
            }
        }
    }
    best.map(|(_, v)| v)
}

/// Exact polynomial division; returns `None` if `b` does not divide `a`.
pub fn div_exact(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(LaurentPoly::zero());
    }
    // Constant divisor.
    if b.terms.len() == 1 && b.terms.keys().next().unwrap().iter().all(|&x| x == 0) {
        let c = b.terms.values().next().unwrap();
        return Some(a.scale(&(Rat::one() / c)));
    }
    let var = main_variable(b, b)?;
    let (a, b) = a.align(b);
    let idx = a.vars.iter().position(|v| *v == var).unwrap();
    let ua = as_univariate(&a, idx);
    let ub = as_univariate(&b, idx);
    let db = *ub.keys().max().unwrap();
    let lb = ub[&db].clone();
    let mut rem = ua;
    let mut quo: BTreeMap<i64, LaurentPoly> = BTreeMap::new();
    loop {
        let Some((&dr, _)) = rem.iter().next_back() else {
            break;
        };
        if dr < db {
            return None;
        }
        let lr = rem[&dr].clone();
        let q = div_exact(&lr, &lb)?;
        quo.insert(dr - db, q.clone());
        // rem -= q * x^(dr-db) * b
        for (dbb, cb) in &ub {
            let d = dr - db + dbb;
            let prod = q.mul(cb);
            let cur = rem.remove(&d).unwrap_or_else(LaurentPoly::zero);
            let next = cur.sub(&prod);
            if !next.is_zero() {
                rem.insert(d, next);
            }
        }
        if rem.is_empty() {
            break;
        }
    }
    if rem.is_empty() {
        Some(from_univariate(&quo, &var))
    } else {
        None
    }
}

/// Content of `p` viewed univariately in `var`: gcd of its coefficients.
fn content(p: &LaurentPoly, idx: usize) -> LaurentPoly {
    let u = as_univariate(p, idx);
    let mut g = LaurentPoly::zero();
    for c in u.values() {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn normalize_unit(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return p.clone();
    }
    let (_, lc) = p.terms.iter().next_back().unwrap();
    p.scale(&(Rat::one() / lc))
}

/// Pseudo-remainder of `a` by `b` in variable index `idx` (same var lists).
/// Intermediate products can prune variables, so results are re-expressed on
/// the fixed list after every step.
fn prem(a: &LaurentPoly, b: &LaurentPoly, idx: usize, var: &str) -> LaurentPoly {
    let vars = a.vars.clone();
    let ub = as_univariate(b, idx);
    let db = *ub.keys().max().unwrap();
    let lb = ub[&db].clone();
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        r = r.on_vars(&vars);
        let da = degree_in(&r, idx);
        if da < db {
            return r;
        }
        let ur = as_univariate(&r, idx);
        let lr = ur[&da].clone();
        // r := lb * r - lr * x^(da-db) * b
        let shift = LaurentPoly::monomial(&[(var, da - db)], Rat::one());
        r = lb.mul(&r).sub(&lr.mul(&shift).mul(b));
    }
}

/// Gcd of two polynomials with nonnegative exponents, via primitive PRS.
pub fn gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_unit(b);
    }
    if b.is_zero() {
        return normalize_unit(a);
    }
    let Some(var) = main_variable(a, b) else {
        return LaurentPoly::one();
    };
    let (a, b) = a.align(b);
    let idx = a.vars.iter().position(|v| *v == var).unwrap();
    if degree_in(&a, idx) <= 0 || degree_in(&b, idx) <= 0 {
        // The main variable is missing from one side: gcd divides that
        // side's content in this variable.
        let (full, flat) = if degree_in(&a, idx) <= 0 { (&b, &a) } else { (&a, &b) };
        let c = content(full, idx);
        return gcd(&c, flat);
    }
    let ca = content(&a, idx);
    let cb = content(&b, idx);
    let pa = div_exact(&a, &ca).expect("content divides");
    let pb = div_exact(&b, &cb).expect("content divides");
    let cg = gcd(&ca, &cb);

    let vars = a.vars.clone();
    let pa = pa.on_vars(&vars);
    let pb = pb.on_vars(&vars);
    let (mut r0, mut r1) = if degree_in(&pa, idx) >= degree_in(&pb, idx) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r2 = prem(&r0, &r1, idx, &var).on_vars(&vars);
        if r2.is_zero() {
            break;
        }
        let c2 = content(&r2, idx);
        let p2 = div_exact(&r2, &c2).expect("content divides").on_vars(&vars);
        r0 = r1;
        r1 = p2;
        if degree_in(&r1, idx) == 0 {
            r1 = LaurentPoly::one().on_vars(&vars);
            break;
        }
    }
    let c1 = content(&r1, idx);
    let p1 = div_exact(&r1, &c1).expect("content divides");
    normalize_unit(&cg.mul(&p1))
}
