//! Boundary-measurement matrices over SFRat, their minors, the
//! boundary-normalized projector, and the BCFW odd-sector identity with odd
//! supports and cofactors.

use thiserror::Error;

use crate::grassmann::{berezin_delta, ExtElem};
use crate::sfrat::SFRat;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("column label {0} out of range")]
    BadLabel(usize),
    #[error("anchor minor vanishes identically")]
    SingularAnchor,
    #[error("{0}")]
    Arith(String),
}

/// r x f matrix of subtraction-free entries built from a normalized block by
/// elementary unipotent column operations.
#[derive(Debug, Clone)]
pub struct BoundaryMatrix {
    pub r: usize,
    pub f: usize,
    pub entries: Vec<Vec<SFRat>>,
    /// Applied elementary right factors (a, b, gamma): column b += gamma *
    /// column a.
    pub gauge_log: Vec<(usize, usize, SFRat)>,
}

impl BoundaryMatrix {
    /// The normalized base point (1_r | 0).
    pub fn star(r: usize, f: usize) -> Self {
        assert!(r <= f);
        let entries = (0..r)
            .map(|i| (0..f).map(|j| if i == j { SFRat::one() } else { SFRat::zero() }).collect())
            .collect();
        BoundaryMatrix { r, f, entries, gauge_log: Vec::new() }
    }

    pub fn from_entries(entries: Vec<Vec<SFRat>>) -> Self {
        let r = entries.len();
        let f = if r == 0 { 0 } else { entries[0].len() };
        BoundaryMatrix { r, f, entries, gauge_log: Vec::new() }
    }
}

/// Right-multiplies by the elementary unipotent factors in order: each move
/// (a, b, gamma) sets column b += gamma * column a (the (a, b) entry of the
/// factor is gamma, its determinant 1).
pub fn transport(
    c0: &BoundaryMatrix,
    moves: &[(usize, usize, SFRat)],
) -> Result<BoundaryMatrix, BoundaryError> {
    let mut out = c0.clone();
    for (a, b, gamma) in moves {
        if *a >= out.f || *b >= out.f || a == b {
            return Err(BoundaryError::BadLabel(*a.max(b)));
        }
        for i in 0..out.r {
            let add = out.entries[i][*a].mul(gamma);
            out.entries[i][*b] = out.entries[i][*b].add(&add);
        }
        out.gauge_log.push((*a, *b, gamma.clone()));
    }
    Ok(out)
}

/// Exact determinant of the r x r column submatrix on the sorted subset `o`.
pub fn minor(c: &BoundaryMatrix, o: &[usize]) -> Result<SFRat, BoundaryError> {
    if o.len() != c.r {
        return Err(BoundaryError::Arith(format!(
            "minor needs exactly r = {} columns, got {}",
            c.r,
            o.len()
        )));
    }
    for &j in o {
        if j >= c.f {
            return Err(BoundaryError::BadLabel(j));
        }
    }
    let m: Vec<Vec<SFRat>> = (0..c.r)
        .map(|i| o.iter().map(|&j| c.entries[i][j].clone()).collect())
        .collect();
    Ok(det_sfrat(&m))
}

/// Gaussian-elimination determinant over the SFRat field.
pub fn det_sfrat(m: &[Vec<SFRat>]) -> SFRat {
    let n = m.len();
    let mut a: Vec<Vec<SFRat>> = m.to_vec();
    let mut acc = SFRat::one();
    let mut neg = false;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return SFRat::zero();
        };
        if p != c {
            a.swap(c, p);
            neg = !neg;
        }
        acc = acc.mul(&a[c][c]);
        let pivot = a[c][c].clone();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].div(&pivot).expect("pivot nonzero");
            for j in c..n {
                let sub = a[c][j].mul(&factor);
                a[i][j] = a[i][j].sub(&sub);
            }
        }
    }
    if neg {
        acc.neg()
    } else {
        acc
    }
}

/// Boundary-normalized projector M_O = (C|_O)^{-1} C; M_O restricted to the
/// columns O is the identity and det(M_O|_U) = Delta_U / Delta_O for every
/// r-subset U.
pub fn projector(c: &BoundaryMatrix, o: &[usize]) -> Result<Vec<Vec<SFRat>>, BoundaryError> {
    let anchor = minor(c, o)?;
    if anchor.is_zero() {
        return Err(BoundaryError::SingularAnchor);
    }
    // Solve (C|_O) M = C by Gauss-Jordan on the augmented system.
    let r = c.r;
    let mut aug: Vec<Vec<SFRat>> = (0..r)
        .map(|i| {
            o.iter()
                .map(|&j| c.entries[i][j].clone())
                .chain(c.entries[i].iter().cloned())
                .collect()
        })
        .collect();
    let cols = r + c.f;
    for col in 0..r {
        let p = (col..r)
            .find(|&i| !aug[i][col].is_zero())
            .ok_or(BoundaryError::SingularAnchor)?;
        aug.swap(col, p);
        let pivot = aug[col][col].clone();
        for j in 0..cols {
            aug[col][j] = aug[col][j].div(&pivot).expect("pivot nonzero");
        }
        for i in 0..r {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in 0..cols {
                    let sub = aug[col][j].mul(&f);
                    aug[i][j] = aug[i][j].sub(&sub);
                }
            }
        }
    }
    Ok(aug.into_iter().map(|row| row[r..].to_vec()).collect())
}

/// The odd support of a window: the ordered column labels together with the
/// cofactor vector spanning the right null line of the r x (r+1) block.
#[derive(Debug, Clone)]
pub struct OddSupport {
    pub window: Vec<usize>,
    pub cofactors: Vec<SFRat>,
}

#[derive(Debug)]
pub struct BcfwReport {
    pub lhs: ExtElem,
    pub rhs: ExtElem,
    pub equal: bool,
    pub support: OddSupport,
}

/// Verifies the BCFW odd-sector identity on the window `b`: the Berezin
/// delta of M_O restricted to B equals the minor-weighted wedge expansion
/// sum_a det(M_O|_{B \ b_a}) eta^{B \ b_a} with each determinant replaced by
/// the Plucker ratio Delta_{B \ b_a} / Delta_O.
pub fn bcfw_check(
    c: &BoundaryMatrix,
    o: &[usize],
    b: &[usize],
) -> Result<BcfwReport, BoundaryError> {
    let r = c.r;
    if b.len() != r + 1 {
        return Err(BoundaryError::Arith(format!("window must have r + 1 = {} labels", r + 1)));
    }
    for &j in b {
        if j >= c.f {
            return Err(BoundaryError::BadLabel(j));
        }
    }
    let m = projector(c, o)?;
    let anchor = minor(c, o)?;
    let gens: Vec<String> = b.iter().map(|&j| format!("eta{}", j + 1)).collect();

    // lhs: Berezin delta of the restricted block in the window's eta's.
    let block: Vec<Vec<SFRat>> = (0..r)
        .map(|i| b.iter().map(|&j| m[i][j].clone()).collect())
        .collect();
    let lhs = berezin_delta(&block, &gens);

    // rhs: sum over dropped labels of the minor ratio times the wedge of the
    // remaining eta's (ascending order inside the window).
    let mut rhs = ExtElem::zero(&gens);
    let mut cofactors = Vec::with_capacity(r + 1);
    for (a, _) in b.iter().enumerate() {
        let sub: Vec<usize> = b
            .iter()
            .enumerate()
            .filter(|(t, _)| *t != a)
            .map(|(_, &j)| j)
            .collect();
        let delta = minor(c, &sub)?;
        let ratio = delta.div(&anchor).map_err(BoundaryError::Arith)?;
        let key: Vec<usize> = (0..=r).filter(|&t| t != a).collect();
        let mut term = ExtElem::zero(&gens);
        if !ratio.is_zero() {
            term.terms.insert(key, ratio.clone());
        }
        rhs = rhs.add(&term);
        cofactors.push(if a % 2 == 0 { ratio } else { ratio.neg() });
    }
    let equal = lhs.equals(&rhs);

    // Cofactor null property: M_O|_B . c = 0.
    let support = OddSupport { window: b.to_vec(), cofactors };
    Ok(BcfwReport { lhs, rhs, equal, support })
}

/// Exact check that the cofactor vector annihilates the window block.
pub fn cofactor_null_residual(
    c: &BoundaryMatrix,
    o: &[usize],
    support: &OddSupport,
) -> Result<bool, BoundaryError> {
    let m = projector(c, o)?;
    for i in 0..c.r {
        let mut acc = SFRat::zero();
        for (t, &j) in support.window.iter().enumerate() {
            acc = acc.add(&m[i][j].mul(&support.cofactors[t]));
        }
        if !acc.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All r-subsets of 0..f in lexicographic order.
pub fn subsets(f: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    if r > f {
        return out;
    }
    loop {
        out.push(cur.clone());
        // next combination
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + f - r {
                break;
            }
        }
        if cur[i] == i + f - r {
            return out;
        }
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
