//! Textual form: `coeff * x1^a1 * ... * xn^an` term lists, with a
//! parenthesized ` / ` between numerator and denominator. Round-trips are
//! lossless.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::{LaurentPoly, Rat};
use super::SFRat;

pub fn poly_to_string(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (e, c) in &p.terms {
        let neg = c.is_negative();
        let mag = if neg { -c.clone() } else { c.clone() };
        if first {
            if neg {
                out.push_str("- ");
            }
            first = false;
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut factors = Vec::new();
        let coeff_str = if mag.denom().is_one() {
            mag.numer().to_string()
        } else {
            format!("{}/{}", mag.numer(), mag.denom())
        };
        let has_vars = e.iter().any(|&x| x != 0);
        if !has_vars || coeff_str != "1" {
            factors.push(coeff_str);
        }
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if k == 1 {
                factors.push(p.vars[i].clone());
            } else {
                factors.push(format!("{}^{}", p.vars[i], k));
            }
        }
        out.push_str(&factors.join(" * "));
    }
    out
}

pub fn sfrat_to_string(f: &SFRat) -> String {
    if f.den.is_one() {
        poly_to_string(&f.num)
    } else {
        format!("( {} ) / ( {} )", poly_to_string(&f.num), poly_to_string(&f.den))
    }
}

pub fn parse_sfrat(s: &str) -> Result<SFRat, String> {
    let s = s.trim();
    // Split numerator/denominator at a top-level ` / ` (outside parentheses).
    if let Some((n, d)) = split_fraction(s)? {
        let num = parse_poly(strip_parens(n))?;
        let den = parse_poly(strip_parens(d))?;
        return SFRat::from_parts(num, den);
    }
    Ok(SFRat::from_poly(parse_poly(s)?))
}

fn split_fraction(s: &str) -> Result<Option<(&str, &str)>, String> {
    let bytes = s.as_bytes();
    let mut depth = 0usize;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                if depth == 0 {
                    return Err("unbalanced parentheses".into());
                }
                depth -= 1;
            }
            b'/' if depth == 0 => {
                // A fraction bar must be surrounded by whitespace; `3/2`
                // inside a term is a rational coefficient.
                let before_ws = i > 0 && bytes[i - 1].is_ascii_whitespace();
                let after_ws = i + 1 < bytes.len() && bytes[i + 1].is_ascii_whitespace();
                if before_ws && after_ws {
                    return Ok(Some((&s[..i], &s[i + 1..])));
                }
            }
            _ => {}
        }
    }
    Ok(None)
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        let inner = &t[1..t.len() - 1];
        // only strip if these parens match each other
        let mut depth = 0i64;
        for (i, b) in inner.bytes().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth < 0 && i < inner.len() - 1 {
                        return t;
                    }
                }
                _ => {}
            }
        }
        if depth == 0 {
            return inner.trim();
        }
    }
    t
}

pub fn parse_poly(s: &str) -> Result<LaurentPoly, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty polynomial".into());
    }
    if s == "0" {
        return Ok(LaurentPoly::zero());
    }
    let mut acc = LaurentPoly::zero();
    for (sign, term) in split_terms(s) {
        let t = parse_term(term)?;
        acc = if sign { acc.sub(&t) } else { acc.add(&t) };
    }
    Ok(acc)
}

/// Splits on top-level `+`/`-` separators; returns (is_negative, term_text).
fn split_terms(s: &str) -> Vec<(bool, &str)> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut neg = false;
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        if (b == b'+' || b == b'-') && i > 0 {
            // A sign splits terms unless it is part of an exponent like `^-1`
            // or a leading sign tight against the start.
            let prev_non_ws = s[..i].trim_end().bytes().last();
            if prev_non_ws == Some(b'^') {
                i += 1;
                continue;
            }
            let piece = s[start..i].trim();
            if !piece.is_empty() {
                out.push((neg, piece));
            }
            neg = b == b'-';
            start = i + 1;
        } else if (b == b'+' || b == b'-') && i == 0 {
            neg = b == b'-';
            start = 1;
        }
        i += 1;
    }
    let piece = s[start..].trim();
    if !piece.is_empty() {
        out.push((neg, piece));
    }
    out
}

fn parse_term(s: &str) -> Result<LaurentPoly, String> {
    let mut coeff = Rat::one();
    let mut vars: Vec<(String, i64)> = Vec::new();
    for raw in s.split('*') {
        let f = raw.trim();
        if f.is_empty() {
            return Err(format!("empty factor in term `{s}`"));
        }
        let first = f.bytes().next().unwrap();
        if first.is_ascii_digit() || first == b'-' || first == b'+' {
            // rational coefficient, possibly `a/b`
            let r = parse_rat(f)?;
            coeff *= r;
        } else {
            let (name, exp) = match f.split_once('^') {
                Some((n, e)) => {
                    let k = i64::from_str(e.trim())
                        .map_err(|_| format!("bad exponent `{e}` in `{s}`"))?;
                    (n.trim(), k)
                }
                None => (f, 1),
            };
            if !name
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b == b'_')
                || name.bytes().next().map_or(true, |b| b.is_ascii_digit())
            {
                return Err(format!("bad variable name `{name}`"));
            }
            vars.push((name.to_string(), exp));
        }
    }
    let refs: Vec<(&str, i64)> = vars.iter().map(|(n, e)| (n.as_str(), *e)).collect();
    Ok(LaurentPoly::monomial(&refs, coeff))
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let (n, d) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| format!("bad integer `{n}`"))?;
    let d = BigInt::from_str(d).map_err(|_| format!("bad integer `{d}`"))?;
    if d == BigInt::from(0) {
        return Err("zero denominator in coefficient".into());
    }
    Ok(Rat::new(n, d))
}
