use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational coefficient.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Multivariate Laurent polynomial over exact rationals.
///
/// Variables are kept sorted by name; every exponent vector has the same
/// length as the variable list and zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub vars: Vec<String>,
    pub terms: BTreeMap<Vec<i64>, Rat>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        LaurentPoly { vars: Vec::new(), terms }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rat::one());
        LaurentPoly { vars: vec![name.to_string()], terms }
    }

    /// A single `c * prod vars[i]^exps[i]` monomial; `vars` need not be sorted.
    pub fn monomial(vars: &[(&str, i64)], c: Rat) -> Self {
        let mut p = Self::constant(c);
        for &(v, e) in vars {
            if e != 0 {
                let mut m = BTreeMap::new();
                m.insert(vec![e], Rat::one());
                let f = LaurentPoly { vars: vec![v.to_string()], terms: m };
                p = p.mul(&f);
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| e.iter().all(|&x| x == 0) && c.is_one())
    }

    /// True if the polynomial is a single monomial.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn insert_term(terms: &mut BTreeMap<Vec<i64>, Rat>, e: Vec<i64>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&e) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    terms.remove(&e);
                }
            }
            None => {
                terms.insert(e, c);
            }
        }
    }

    /// Rewrites `self` on the union variable list of `self` and `other`.
    pub fn align(&self, other: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let mut vars: Vec<String> = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        (self.on_vars(&vars), other.on_vars(&vars))
    }

    pub fn on_vars(&self, vars: &[String]) -> LaurentPoly {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("var superset required"))
            .collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = vec![0i64; vars.len()];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] = x;
            }
            Self::insert_term(&mut terms, ne, c.clone());
        }
        LaurentPoly { vars: vars.to_vec(), terms }
    }

    /// Drops variables that appear with exponent zero in every term.
    pub fn prune_vars(&self) -> LaurentPoly {
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|e| e[i] != 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self.clone();
        }
        let vars: Vec<String> = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| v.clone())
            .collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let ne: Vec<i64> = e.iter().zip(&used).filter(|(_, &u)| u).map(|(&x, _)| x).collect();
            Self::insert_term(&mut terms, ne, c.clone());
        }
        LaurentPoly { vars, terms }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let (a, b) = self.align(other);
        let mut terms = a.terms;
        for (e, c) in b.terms {
            Self::insert_term(&mut terms, e, c);
        }
        LaurentPoly { vars: a.vars, terms }.prune_vars()
    }

    pub fn neg(&self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let (a, b) = self.align(other);
        let mut terms = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                Self::insert_term(&mut terms, e, ca * cb);
            }
        }
        LaurentPoly { vars: a.vars, terms }.prune_vars()
    }

    pub fn scale(&self, c: &Rat) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        let terms = self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Componentwise minimum of the exponent vectors (the monomial content).
    pub fn exponent_min(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| acc.iter().zip(e).map(|(a, b)| *a.min(b)).collect()))
    }

    /// Divides by the monomial `x^shift` (always exact for Laurent polynomials).
    pub fn shift_exponents(&self, shift: &[i64]) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(shift).map(|(x, s)| x - s).collect(), c.clone()))
            .collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }

    /// Total degree spread, used to gate gcd computation.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|x| x.abs()).sum::<i64>())
            .max()
            .unwrap_or(0)
    }

    pub fn partial(&self, var: &str) -> LaurentPoly {
        let Some(idx) = self.vars.iter().position(|v| v == var) else {
            return LaurentPoly::zero();
        };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            Self::insert_term(&mut terms, ne, c * rat_int(e[idx]));
        }
        LaurentPoly { vars: self.vars.clone(), terms }.prune_vars()
    }

    pub fn eval_rat(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, String> {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let v = point
                    .get(&self.vars[i])
                    .ok_or_else(|| format!("missing assignment for {}", self.vars[i]))?;
                if v.is_zero() && k < 0 {
                    return Err(format!("negative power of zero for {}", self.vars[i]));
                }
                let mut p = Rat::one();
                for _ in 0..k.unsigned_abs() {
                    p *= v;
                }
                if k < 0 {
                    p = p.recip();
                }
                t *= p;
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &BTreeMap<String, f64>) -> Result<f64, String> {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let v = point
                    .get(&self.vars[i])
                    .ok_or_else(|| format!("missing assignment for {}", self.vars[i]))?;
                t *= v.powi(k as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes `value` for `var` (requires nonnegative exponents of `var`
    /// when `value` is zero).
    pub fn substitute_zero(&self, var: &str) -> Result<LaurentPoly, String> {
        let Some(idx) = self.vars.iter().position(|v| v == var) else {
            return Ok(self.clone());
        };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[idx] < 0 {
                return Err(format!("pole: negative power of {var} at zero"));
            }
            if e[idx] > 0 {
                continue;
            }
            Self::insert_term(&mut terms, e.clone(), c.clone());
        }
        Ok(LaurentPoly { vars: self.vars.clone(), terms }.prune_vars())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = bigint_to_f64(r.numer());
    let d = bigint_to_f64(r.denom());
    n / d
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    // Good enough for the numeric layers; exact kernels never round-trip
    // through f64.
    let s = x.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN)
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::sfrat::text::poly_to_string(self))
    }
}
