//! Bosonic cluster seeds: exchange-matrix mutation, X- and A-variable
//! mutation, the monomial duality map, and numeric Jacobian checks.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg;
use crate::sfrat::{Rat, SFRat};

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("index {0} is frozen or out of range")]
    BadIndex(usize),
    #[error("symmetrizer identity d_i e_ij = -d_j e_ji fails at ({0},{1})")]
    Symmetrizer(usize, usize),
    #[error("{0}")]
    Arith(String),
}

/// Exchange matrix with symmetrizers over mutable + frozen indices.
/// Mutable indices come first: `0..n_mut`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeData {
    pub n_mut: usize,
    pub n_frozen: usize,
    pub epsilon: Vec<Vec<i64>>,
    pub d: Vec<i64>,
}

impl ExchangeData {
    pub fn new(n_mut: usize, n_frozen: usize, epsilon: Vec<Vec<i64>>, d: Vec<i64>) -> Result<Self, SeedError> {
        let e = ExchangeData { n_mut, n_frozen, epsilon, d };
        e.validate()?;
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.n_mut + self.n_frozen
    }

    pub fn validate(&self) -> Result<(), SeedError> {
        let n = self.n();
        assert_eq!(self.epsilon.len(), n, "epsilon must be square over all indices");
        for (i, row) in self.epsilon.iter().enumerate() {
            assert_eq!(row.len(), n);
            if row[i] != 0 {
                return Err(SeedError::Symmetrizer(i, i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.d[i] * self.epsilon[i][j] != -self.d[j] * self.epsilon[j][i] {
                    return Err(SeedError::Symmetrizer(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn is_mutable(&self, k: usize) -> bool {
        k < self.n_mut
    }

    /// Skew form `eps_hat[i][j] = eps[i][j] / d[j]` as exact rationals.
    pub fn eps_hat(&self) -> linalg::QMat {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        crate::sfrat::rat(self.epsilon[i][j], self.d[j])
                    })
                    .collect()
            })
            .collect()
    }

    /// Skew form restricted to the mutable block.
    pub fn eps_hat_mut(&self) -> linalg::QMat {
        let m = self.eps_hat();
        (0..self.n_mut).map(|i| m[i][..self.n_mut].to_vec()).collect()
    }
}

/// Standard matrix mutation at a mutable index `k`.
pub fn mutate_epsilon(e: &ExchangeData, k: usize) -> Result<ExchangeData, SeedError> {
    if !e.is_mutable(k) {
        return Err(SeedError::BadIndex(k));
    }
    let n = e.n();
    let mut eps = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            eps[i][j] = if i == k || j == k {
                -e.epsilon[i][j]
            } else {
                let sk = e.epsilon[i][k].signum();
                e.epsilon[i][j] + sk * (e.epsilon[i][k] * e.epsilon[k][j]).max(0)
            };
        }
    }
    let out = ExchangeData { n_mut: e.n_mut, n_frozen: e.n_frozen, epsilon: eps, d: e.d.clone() };
    out.validate()?;
    Ok(out)
}

/// X-seed: expressions of the current X-coordinates in the initial seed's
/// variables, all subtraction-free.
#[derive(Debug, Clone)]
pub struct XSeed {
    pub exchange: ExchangeData,
    pub x: Vec<SFRat>,
}

impl XSeed {
    /// Initial seed on fresh variables `x1..xn` (mutable indices only).
    pub fn initial(exchange: ExchangeData) -> Self {
        let x = (0..exchange.n_mut).map(|i| SFRat::var(&format!("x{}", i + 1))).collect();
        XSeed { exchange, x }
    }
}

pub fn mutate_x(s: &XSeed, k: usize) -> Result<XSeed, SeedError> {
    if !s.exchange.is_mutable(k) {
        return Err(SeedError::BadIndex(k));
    }
    let xk = &s.x[k];
    let mut x = Vec::with_capacity(s.x.len());
    for (i, xi) in s.x.iter().enumerate() {
        if i == k {
            x.push(xk.recip().map_err(SeedError::Arith)?);
            continue;
        }
        let e_ik = s.exchange.epsilon[i][k];
        if e_ik == 0 {
            x.push(xi.clone());
            continue;
        }
        let s_ik = e_ik.signum();
        let base = SFRat::one()
            .add(&xk.pow(-s_ik).map_err(SeedError::Arith)?);
        let factor = base.pow(-e_ik).map_err(SeedError::Arith)?;
        x.push(xi.mul(&factor));
    }
    Ok(XSeed { exchange: mutate_epsilon(&s.exchange, k)?, x })
}

/// A-seed over all indices; frozen entries are fixed coefficients.
#[derive(Debug, Clone)]
pub struct ASeed {
    pub exchange: ExchangeData,
    pub a: Vec<SFRat>,
}

impl ASeed {
    pub fn initial(exchange: ExchangeData) -> Self {
        let a = (0..exchange.n()).map(|i| SFRat::var(&format!("a{}", i + 1))).collect();
        ASeed { exchange, a }
    }
}

pub fn mutate_a(s: &ASeed, k: usize) -> Result<ASeed, SeedError> {
    if !s.exchange.is_mutable(k) {
        return Err(SeedError::BadIndex(k));
    }
    let mut plus = SFRat::one();
    let mut minus = SFRat::one();
    for (i, ai) in s.a.iter().enumerate() {
        let e = s.exchange.epsilon[i][k];
        if e > 0 {
            plus = plus.mul(&ai.pow(e).map_err(SeedError::Arith)?);
        } else if e < 0 {
            minus = minus.mul(&ai.pow(-e).map_err(SeedError::Arith)?);
        }
    }
    let mut a = s.a.clone();
    a[k] = plus.add(&minus).div(&s.a[k]).map_err(SeedError::Arith)?;
    Ok(ASeed { exchange: mutate_epsilon(&s.exchange, k)?, a })
}

/// Monomial duality map: one X-expression per mutable index,
/// `X_i = prod_j A_j^{eps_ij}`.
pub fn p_map(s: &ASeed) -> Result<Vec<SFRat>, SeedError> {
    (0..s.exchange.n_mut)
        .map(|i| {
            let mut m = SFRat::one();
            for (j, aj) in s.a.iter().enumerate() {
                let e = s.exchange.epsilon[i][j];
                if e != 0 {
                    m = m.mul(&aj.pow(e).map_err(SeedError::Arith)?);
                }
            }
            Ok(m)
        })
        .collect()
}

/// Signed determinant of `d log X'_i / d log X_j` for a single mutation at
/// `k`, by central finite differences at a positive point.
pub fn mutation_log_jacobian(
    s: &XSeed,
    k: usize,
    point: &[f64],
    h: f64,
) -> Result<f64, SeedError> {
    if !s.exchange.is_mutable(k) {
        return Err(SeedError::BadIndex(k));
    }
    let n = s.exchange.n_mut;
    assert_eq!(point.len(), n);
    if point.iter().any(|&x| x <= 0.0) {
        return Err(SeedError::Arith("point must be strictly positive".into()));
    }
    // The single-step map in the current chart.
    let map = |x: &[f64]| -> Result<Vec<f64>, String> {
        let mut out = vec![0.0; n];
        for i in 0..n {
            if i == k {
                out[i] = 1.0 / x[k];
            } else {
                let e = s.exchange.epsilon[i][k];
                let sg = e.signum() as f64;
                let b = 1.0 + x[k].powf(-sg);
                out[i] = x[i] * b.powi(-e as i32);
            }
            if !out[i].is_finite() || out[i] <= 0.0 {
                return Err("degenerate point (pole of the mutation map)".into());
            }
        }
        Ok(out)
    };
    let mut jac = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut up = point.to_vec();
        let mut dn = point.to_vec();
        up[j] *= (h).exp();
        dn[j] *= (-h).exp();
        let fu = map(&up).map_err(SeedError::Arith)?;
        let fd = map(&dn).map_err(SeedError::Arith)?;
        for i in 0..n {
            jac[i][j] = (fu[i].ln() - fd[i].ln()) / (2.0 * h);
        }
    }
    Ok(linalg::fdet(&jac))
}

/// Numeric evaluation of a seed's expression vector at a positive point of
/// the initial variables `x1..xn` (or `a1..` for A-seeds).
pub fn eval_exprs(exprs: &[SFRat], prefix: &str, point: &[Rat]) -> Result<Vec<Rat>, String> {
    let map: BTreeMap<String, Rat> = point
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("{prefix}{}", i + 1), v.clone()))
        .collect();
    exprs.iter().map(|f| f.eval_rat(&map)).collect()
}

/// Exact equality of two seeds up to a permutation of mutable indices;
/// returns the witnessing permutation if one exists.
pub fn equal_up_to_permutation(a: &XSeed, b: &XSeed) -> Option<Vec<usize>> {
    let n = a.exchange.n_mut;
    if n != b.exchange.n_mut || n > 6 {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok_eps = (0..n).all(|i| {
            (0..n).all(|j| a.exchange.epsilon[i][j] == b.exchange.epsilon[perm[i]][perm[j]])
        });
        if ok_eps && (0..n).all(|i| a.x[i].equals(&b.x[perm[i]])) {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn a2_exchange() -> ExchangeData {
    ExchangeData::new(2, 0, vec![vec![0, 1], vec![-1, 0]], vec![1, 1]).unwrap()
}

pub fn b2_exchange() -> ExchangeData {
    ExchangeData::new(2, 0, vec![vec![0, 2], vec![-1, 0]], vec![1, 2]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfrat::rat_int;

    #[test]
    fn epsilon_mutation_rank2() {
        let e = a2_exchange();
        let m = mutate_epsilon(&e, 0).unwrap();
        assert_eq!(m.epsilon, vec![vec![0, -1], vec![1, 0]]);

        let b = b2_exchange();
        let mb = mutate_epsilon(&b, 0).unwrap();
        assert_eq!(mb.epsilon, vec![vec![0, -2], vec![1, 0]]);
    }

    #[test]
    fn epsilon_mutation_a3_middle() {
        let e = ExchangeData::new(
            3,
            0,
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]],
            vec![1, 1, 1],
        )
        .unwrap();
        let m = mutate_epsilon(&e, 1).unwrap();
        assert_eq!(m.epsilon, vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]]);
    }

    #[test]
    fn epsilon_mutation_involution() {
        let e = ExchangeData::new(
            3,
            0,
            vec![vec![0, 2, -1], vec![-2, 0, 3], vec![1, -3, 0]],
            vec![1, 1, 1],
        )
        .unwrap();
        for k in 0..3 {
            let back = mutate_epsilon(&mutate_epsilon(&e, k).unwrap(), k).unwrap();
            assert_eq!(back.epsilon, e.epsilon);
        }
    }

    #[test]
    fn x_mutation_numeric_and_symbolic() {
        let s = XSeed::initial(a2_exchange());
        let m = mutate_x(&s, 1).unwrap();
        let vals = eval_exprs(&m.x, "x", &[rat_int(2), rat_int(3)]).unwrap();
        assert_eq!(vals[0], crate::sfrat::rat(3, 2));
        assert_eq!(vals[1], crate::sfrat::rat(1, 3));

        let m1 = mutate_x(&s, 0).unwrap();
        let expect: SFRat = "x2 + x1 * x2".parse().unwrap();
        assert!(m1.x[1].equals(&expect), "X'_2 = X_2 (1 + X_1)");
    }

    #[test]
    fn x_mutation_involution() {
        let s = XSeed::initial(a2_exchange());
        for k in 0..2 {
            let back = mutate_x(&mutate_x(&s, k).unwrap(), k).unwrap();
            for i in 0..2 {
                assert!(back.x[i].equals(&s.x[i]));
            }
            assert_eq!(back.exchange.epsilon, s.exchange.epsilon);
        }
    }

    #[test]
    fn a_mutation_recurrence() {
        let e = a2_exchange();
        let s = ASeed {
            exchange: e,
            a: vec![SFRat::int(2), SFRat::int(3)],
        };
        let m = mutate_a(&s, 0).unwrap();
        assert!(m.a[0].equals(&SFRat::int(2)));
        assert!(m.a[1].equals(&SFRat::int(3)));
    }

    #[test]
    fn a2_orbit_values_period5() {
        // a_{n+1} = (1 + a_n) / a_{n-1} starting from 2, 3.
        let mut vals = vec![rat_int(2), rat_int(3)];
        for n in 1..6 {
            let next = (rat_int(1) + &vals[n]) / &vals[n - 1];
            vals.push(next);
        }
        let expect: Vec<_> = [2, 3, 2, 1, 1, 2, 3].iter().map(|&v| rat_int(v)).collect();
        assert_eq!(vals, expect);
    }

    #[test]
    fn frozen_stays_fixed() {
        // one mutable, one frozen coefficient
        let e = ExchangeData::new(1, 1, vec![vec![0, 1], vec![-1, 0]], vec![1, 1]).unwrap();
        let s = ASeed { exchange: e, a: vec![SFRat::int(5), SFRat::int(7)] };
        let m = mutate_a(&s, 0).unwrap();
        assert!(m.a[1].equals(&SFRat::int(7)));
        // A'_0 = (7 + 1)/5
        assert!(m.a[0].equals(&SFRat::constant(crate::sfrat::rat(8, 5))));
    }

    #[test]
    fn p_map_examples() {
        let s = ASeed { exchange: a2_exchange(), a: vec![SFRat::int(2), SFRat::int(3)] };
        let x = p_map(&s).unwrap();
        assert!(x[0].equals(&SFRat::int(3)));
        assert!(x[1].equals(&SFRat::constant(crate::sfrat::rat(1, 2))));

        let z = ExchangeData::new(2, 0, vec![vec![0, 0], vec![0, 0]], vec![1, 1]).unwrap();
        let sz = ASeed { exchange: z, a: vec![SFRat::int(2), SFRat::int(3)] };
        for xi in p_map(&sz).unwrap() {
            assert!(xi.is_one());
        }
    }

    #[test]
    fn p_map_commutes_with_mutation_numerically() {
        let s = ASeed { exchange: a2_exchange(), a: vec![SFRat::int(2), SFRat::int(3)] };
        let k = 0;
        let lhs = p_map(&mutate_a(&s, k).unwrap()).unwrap();
        // mutate_x applied to the numeric X-point p(s)
        let x0 = p_map(&s).unwrap();
        let xs = XSeed { exchange: s.exchange.clone(), x: x0 };
        let rhs = mutate_x(&xs, k).unwrap();
        for i in 0..2 {
            assert!(lhs[i].equals(&rhs.x[i]), "p . mu_a = mu_x . p at index {i}");
        }
    }

    #[test]
    fn log_jacobian_is_unit() {
        let s = XSeed::initial(a2_exchange());
        let d = mutation_log_jacobian(&s, 0, &[2.0, 3.0], 1e-5).unwrap();
        assert!((d + 1.0).abs() < 1e-6, "det = {d}");

        let a3 = ExchangeData::new(
            3,
            0,
            vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]],
            vec![1, 1, 1],
        )
        .unwrap();
        let s3 = XSeed::initial(a3);
        for k in 0..3 {
            let d = mutation_log_jacobian(&s3, k, &[2.0, 3.0, 0.5], 1e-5).unwrap();
            assert!((d.abs() - 1.0).abs() < 1e-6, "k={k} det={d}");
        }
    }

    #[test]
    fn log_jacobian_involution_product() {
        let s = XSeed::initial(a2_exchange());
        let d1 = mutation_log_jacobian(&s, 0, &[2.0, 3.0], 1e-5).unwrap();
        let m = mutate_x(&s, 0).unwrap();
        // evaluate the mutated chart's point
        let vals = eval_exprs(&m.x, "x", &[rat_int(2), rat_int(3)]).unwrap();
        let pt: Vec<f64> = vals.iter().map(crate::sfrat::rat_to_f64).collect();
        let d2 = mutation_log_jacobian(&m, 0, &pt, 1e-5).unwrap();
        assert!((d1 * d2 - 1.0).abs() < 1e-5, "product = {}", d1 * d2);
    }

    #[test]
    fn frozen_mutation_rejected() {
        let e = ExchangeData::new(1, 1, vec![vec![0, 1], vec![-1, 0]], vec![1, 1]).unwrap();
        let s = ASeed { exchange: e, a: vec![SFRat::int(1), SFRat::int(1)] };
        assert!(mutate_a(&s, 1).is_err());
    }
}
