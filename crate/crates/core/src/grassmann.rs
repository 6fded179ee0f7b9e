//! Exterior algebra on named odd generators with exact coefficients, Berezin
//! deltas, and top-degree extraction.

use std::collections::BTreeMap;
use std::fmt;

use crate::sfrat::SFRat;

/// Element of the exterior algebra: sorted generator subsets (by index into
/// the universe) with SFRat coefficients, no zero coefficients stored.
#[derive(Clone)]
pub struct ExtElem {
    /// Names of the odd generators; all operands must share this universe.
    pub gens: Vec<String>,
    pub terms: BTreeMap<Vec<usize>, SFRat>,
}

impl ExtElem {
    pub fn zero(gens: &[String]) -> Self {
        ExtElem { gens: gens.to_vec(), terms: BTreeMap::new() }
    }

    pub fn scalar(gens: &[String], c: SFRat) -> Self {
        let mut e = Self::zero(gens);
        if !c.is_zero() {
            e.terms.insert(Vec::new(), c);
        }
        e
    }

    pub fn generator(gens: &[String], idx: usize) -> Self {
        assert!(idx < gens.len());
        let mut e = Self::zero(gens);
        e.terms.insert(vec![idx], SFRat::one());
        e
    }

    /// A linear form sum_j coeffs[j] * gens[j].
    pub fn linear_form(gens: &[String], coeffs: &[SFRat]) -> Self {
        assert_eq!(coeffs.len(), gens.len());
        let mut e = Self::zero(gens);
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                e.terms.insert(vec![j], c.clone());
            }
        }
        e
    }

    fn insert(&mut self, key: Vec<usize>, c: SFRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &ExtElem) -> ExtElem {
        assert_eq!(self.gens, other.gens, "same generator universe required");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ExtElem) -> ExtElem {
        assert_eq!(self.gens, other.gens);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &SFRat) -> ExtElem {
        let mut out = ExtElem::zero(&self.gens);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn equals(&self, other: &ExtElem) -> bool {
        self.sub(other).is_zero()
    }

    /// Applies the linear substitution gens[j] -> sum_l m[j][l] gens[l].
    pub fn substitute_linear(&self, m: &[Vec<SFRat>]) -> ExtElem {
        assert_eq!(m.len(), self.gens.len());
        let forms: Vec<ExtElem> = (0..self.gens.len())
            .map(|j| ExtElem::linear_form(&self.gens, &m[j]))
            .collect();
        let mut out = ExtElem::zero(&self.gens);
        for (k, c) in &self.terms {
            let mut acc = ExtElem::scalar(&self.gens, c.clone());
            for &j in k {
                acc = wedge(&acc, &forms[j]);
            }
            out = out.add(&acc);
        }
        out
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let names: Vec<&str> = k.iter().map(|&i| self.gens[i].as_str()).collect();
                if names.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}) {}", names.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Koszul sign merge of strictly increasing index lists.
fn merge(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1i32;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// Graded-commutative product with Koszul signs.
pub fn wedge(a: &ExtElem, b: &ExtElem) -> ExtElem {
    assert_eq!(a.gens, b.gens, "same generator universe required");
    let mut out = ExtElem::zero(&a.gens);
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            if let Some((k, sign)) = merge(ka, kb) {
                let c = ca.mul(cb);
                out.insert(k, if sign < 0 { c.neg() } else { c });
            }
        }
    }
    out
}

/// Berezin delta of an r x f coefficient matrix: the ordered product over
/// rows of the linear forms (M eta)_alpha. Its top-degree expansion is
/// sum_{|T| = r} det(M|_T) eta^T (Cauchy-Binet).
pub fn berezin_delta(m: &[Vec<SFRat>], gens: &[String]) -> ExtElem {
    let mut acc = ExtElem::scalar(gens, SFRat::one());
    for row in m {
        assert_eq!(row.len(), gens.len());
        let form = ExtElem::linear_form(gens, row);
        acc = wedge(&acc, &form);
    }
    acc
}

/// Coefficient of the full top wedge in the orientation given by
/// `ordered_gens` (a permutation of the universe); the sign flips with odd
/// permutations.
pub fn top_coefficient(e: &ExtElem, ordered_gens: &[String]) -> SFRat {
    let n = e.gens.len();
    assert_eq!(ordered_gens.len(), n, "orientation must list every generator");
    let all: Vec<usize> = (0..n).collect();
    let Some(c) = e.terms.get(&all) else {
        return SFRat::zero();
    };
    let perm: Vec<usize> = ordered_gens
        .iter()
        .map(|g| e.gens.iter().position(|h| h == g).expect("unknown generator"))
        .collect();
    let sign = permutation_sign(&perm);
    if sign < 0 {
        c.neg()
    } else {
        c.clone()
    }
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1i32;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0usize;
        let mut t = s;
        while !seen[t] {
            seen[t] = true;
            t = p[t];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

pub fn gen_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}
