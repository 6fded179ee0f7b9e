//! Exact linear algebra over the rationals: solving, inversion, kernels,
//! determinants. Matrices are dense `Vec<Vec<Rat>>`, small by construction.

use num_traits::{One, Zero};

use crate::sfrat::Rat;

pub type QMat = Vec<Vec<Rat>>;

pub fn qmat_from_i64(m: &[Vec<i64>]) -> QMat {
    m.iter()
        .map(|row| row.iter().map(|&x| Rat::from(num_bigint::BigInt::from(x))).collect())
        .collect()
}

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn matmul(a: &QMat, b: &QMat) -> QMat {
    let (r, k) = (a.len(), b.len());
    let c = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            let mut s = Rat::zero();
            for t in 0..k {
                s += &a[i][t] * &b[t][j];
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn transpose(a: &QMat) -> QMat {
    if a.is_empty() {
        return Vec::new();
    }
    let (r, c) = (a.len(), a[0].len());
    let mut out = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j].clone();
        }
    }
    out
}

pub fn is_zero_mat(a: &QMat) -> bool {
    a.iter().all(|row| row.iter().all(|x| x.is_zero()))
}

/// Reduced row echelon form; returns (rref, pivot columns).
pub fn rref(a: &QMat) -> (QMat, Vec<usize>) {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &m[r][j] * &f;
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Basis of the right kernel of `a`.
pub fn kernel(a: &QMat) -> Vec<Vec<Rat>> {
    if a.is_empty() {
        return Vec::new();
    }
    let cols = a[0].len();
    let (r, pivots) = rref(a);
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[k][free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn det(a: &QMat) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut sign = Rat::one();
    let mut acc = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(c, p);
            sign = -sign;
        }
        acc *= &m[c][c];
        let inv = Rat::one() / m[c][c].clone();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let sub = &m[c][j] * &f;
                m[i][j] -= sub;
            }
        }
    }
    acc * sign
}

pub fn inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let aug: QMat = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(r.iter().map(|row| row[n..].to_vec()).collect())
}

/// Particular solution `Y` of `Y * a = w` (one row per row of `w`), if any.
/// When `a` is singular this is a choice of right-inverse image; the caller
/// is responsible for quotienting by `ker(a^T)` ambiguity.
pub fn solve_left(a: &QMat, w: &QMat) -> Option<QMat> {
    // Y a = w  <=>  a^T Y^T = w^T. Columns of w^T are rows of w; each gives
    // one row of Y.
    let at = transpose(a);
    // Unknown rows of Y^T = rows of a.
    let n = a.len();
    let mut cols = Vec::new();
    for rhs in w {
        let aug: QMat = at
            .iter()
            .zip(rhs)
            .map(|(row, b)| row.iter().cloned().chain([b.clone()]).collect())
            .collect();
        let (red, pivots) = rref(&aug);
        // Consistency: no pivot in the augmented column.
        if pivots.contains(&n) {
            return None;
        }
        let mut x = vec![Rat::zero(); n];
        for (k, &pc) in pivots.iter().enumerate() {
            x[pc] = red[k][n].clone();
        }
        cols.push(x);
    }
    // Column j of Y^T is row j of Y.
    Some(cols)
}

/// A second particular solution of `Y * a = w` that differs from
/// `solve_left`'s choice whenever the system is underdetermined: adds a
/// kernel row of `a^T` to each row.
pub fn solve_left_alt(a: &QMat, w: &QMat) -> Option<QMat> {
    let base = solve_left(a, w)?;
    let kt = kernel(&transpose(a));
    if kt.is_empty() {
        return Some(base);
    }
    Some(
        base.iter()
            .map(|row| row.iter().zip(&kt[0]).map(|(x, k)| x + k).collect())
            .collect(),
    )
}

pub fn mat_vec(a: &QMat, v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).fold(Rat::zero(), |s, t| s + t))
        .collect()
}

// f64 counterparts for the numeric verification layers.

pub type FMat = Vec<Vec<f64>>;

pub fn fdet(a: &FMat) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut acc = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(c, p);
            acc = -acc;
        }
        acc *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    acc
}

pub fn finverse(a: &FMat) -> Option<FMat> {
    let n = a.len();
    let mut m: FMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter().cloned().chain((0..n).map(|j| if i == j { 1.0 } else { 0.0 })).collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[p][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, p);
        let d = m[c][c];
        for x in m[c].iter_mut() {
            *x /= d;
        }
        for i in 0..n {
            if i != c && m[i][c] != 0.0 {
                let f = m[i][c];
                for j in 0..2 * n {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
    }
    Some(m.iter().map(|row| row[n..].to_vec()).collect())
}

pub fn fmatmul(a: &FMat, b: &FMat) -> FMat {
    let (r, k) = (a.len(), b.len());
    let c = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0.0; c]; r];
    for i in 0..r {
        for j in 0..c {
            out[i][j] = (0..k).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    out
}

pub fn ftranspose(a: &FMat) -> FMat {
    if a.is_empty() {
        return Vec::new();
    }
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfrat::rat_int;

    #[test]
    fn inverse_of_skew() {
        let e = qmat_from_i64(&[vec![0, 1], vec![-1, 0]]);
        let inv = inverse(&e).unwrap();
        assert_eq!(inv, qmat_from_i64(&[vec![0, -1], vec![1, 0]]));
    }

    #[test]
    fn kernel_of_rank2_skew() {
        let e = qmat_from_i64(&[vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]);
        let k = kernel(&e);
        assert_eq!(k.len(), 1);
        // kernel spanned by (1, 0, 1)
        let v = &k[0];
        assert_eq!(v[0], v[2]);
        assert!(v[1].is_zero());
    }

    #[test]
    fn solve_left_recovers_product() {
        let a = qmat_from_i64(&[vec![0, 1], vec![-1, 0]]);
        let w = qmat_from_i64(&[vec![1, 0]]);
        let y = solve_left(&a, &w).unwrap();
        assert_eq!(matmul(&y, &a), w);
        assert_eq!(y[0], vec![rat_int(0), rat_int(-1)]);
    }

    #[test]
    fn determinant() {
        let a = qmat_from_i64(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(det(&a), rat_int(-8));
    }
}
