//! Loop-fiber machinery: transfer weights and loop letters, binomial and
//! Laurent vertical relations, Smith normal form over the integers,
//! elimination to the primitive fiber polynomial, Newton-polygon genus, and
//! dlog-wedge residues.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::sfrat::{LaurentPoly, Rat, SFRat};

#[derive(Debug, Error)]
pub enum FiberError {
    #[error("unsupported elimination shape: {0}")]
    UnsupportedShape(String),
    #[error("inconsistent binomial system: {0}")]
    InconsistentBinomials(String),
    #[error("{0}")]
    Arith(String),
}

/// Subtraction-free transfer weight prod_i X_i^{B_i} prod_k (1+X_k^{s_k})^{A_k}.
#[derive(Debug, Clone, Default)]
pub struct TransferWeight {
    pub b_exponents: BTreeMap<String, i64>,
    pub a_exponents: BTreeMap<String, i64>,
    pub signs: BTreeMap<String, i8>,
}

impl TransferWeight {
    pub fn to_sfrat(&self) -> Result<SFRat, FiberError> {
        let mut f = SFRat::one();
        for (v, &e) in &self.b_exponents {
            if e != 0 {
                f = f.mul(&SFRat::var(v).pow(e).map_err(FiberError::Arith)?);
            }
        }
        for (v, &a) in &self.a_exponents {
            if a == 0 {
                continue;
            }
            let s = *self.signs.get(v).unwrap_or(&1) as i64;
            let base = SFRat::one().add(&SFRat::var(v).pow(s).map_err(FiberError::Arith)?);
            f = f.mul(&base.pow(a).map_err(FiberError::Arith)?);
        }
        Ok(f)
    }

    /// Evaluation at a strictly positive point; always positive.
    pub fn eval(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, FiberError> {
        let f = self.to_sfrat()?;
        f.eval_positive(point).map_err(FiberError::Arith)
    }

    /// Inverse-traversal weight (all exponents negated).
    pub fn inverse(&self) -> TransferWeight {
        TransferWeight {
            b_exponents: self.b_exponents.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            a_exponents: self.a_exponents.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            signs: self.signs.clone(),
        }
    }
}

/// Flip update at a pivot: exponents shift additively, preserving
/// subtraction-freeness.
pub fn flip_update(
    gamma: &TransferWeight,
    pivot: &str,
    b_shift: i64,
    a_shift: i64,
    sign: i8,
) -> TransferWeight {
    let mut out = gamma.clone();
    *out.b_exponents.entry(pivot.to_string()).or_insert(0) += b_shift;
    if a_shift != 0 {
        *out.a_exponents.entry(pivot.to_string()).or_insert(0) += a_shift;
        out.signs.insert(pivot.to_string(), sign);
    }
    out
}

/// Smith normal form over the integers: U M S = D (padded with zeros),
/// U, S unimodular, diagonal entries with d_1 | d_2 | ... .
pub struct Snf {
    pub u: Vec<Vec<i128>>,
    pub d: Vec<Vec<i128>>,
    pub s: Vec<Vec<i128>>,
    pub rank: usize,
}

pub fn smith_normal_form(m: &[Vec<i64>]) -> Snf {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<i128>> =
        m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u = ident(rows);
    let mut s = ident(cols);
    let mut t = 0usize;
    while t < rows.min(cols) {
        // find a pivot of minimal absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else {
            break;
        };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut s, t, pj);
        // clear row and column t
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = div_round(a[i][t], a[t][t]);
                    row_sub(&mut a, i, t, q);
                    row_sub(&mut u, i, t, q);
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        u.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = div_round(a[t][j], a[t][t]);
                    col_sub(&mut a, j, t, q);
                    col_sub(&mut s, j, t, q);
                    if a[t][j] != 0 {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut s, t, j);
                        dirty = true;
                    }
                }
            }
        }
        // divisibility: fold in any entry not divisible by the pivot
        let mut fixed = false;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if a[i][j] % a[t][t] != 0 {
                    // add row i to row t and restart this pivot
                    for c in 0..cols {
                        a[t][c] += a[i][c];
                    }
                    for c in 0..rows {
                        u[t][c] += u[i][c];
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        if a[t][t] < 0 {
            for c in 0..cols {
                a[t][c] = -a[t][c];
            }
            for c in 0..rows {
                u[t][c] = -u[t][c];
            }
        }
        t += 1;
    }
    Snf { u, d: a, s, rank: t }
}

fn ident(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn row_sub(m: &mut [Vec<i128>], i: usize, t: usize, q: i128) {
    if q == 0 {
        return;
    }
    let trow = m[t].clone();
    for (x, y) in m[i].iter_mut().zip(trow) {
        *x -= q * y;
    }
}

fn col_sub(m: &mut [Vec<i128>], j: usize, t: usize, q: i128) {
    if q == 0 {
        return;
    }
    for row in m.iter_mut() {
        let v = row[t];
        row[j] -= q * v;
    }
}

fn div_round(a: i128, b: i128) -> i128 {
    // round-to-nearest keeps the remainders small
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + r.signum() * b.signum()
    } else {
        q
    }
}

pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from(num_bigint::BigInt::from(x))).collect())
        .collect();
    let mut acc = Rat::from(num_bigint::BigInt::from(1));
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return 0;
        };
        if p != c {
            a.swap(c, p);
            acc = -acc;
        }
        acc *= &a[c][c];
        let pivot = a[c][c].clone();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &pivot;
            for j in c..n {
                let sub = &a[c][j] * &f;
                a[i][j] -= sub;
            }
        }
    }
    let s = acc.to_integer().to_string();
    s.parse().unwrap_or(0)
}

/// Vertical system: named letters, binomial relations (exponent rows with
/// subtraction-free unit right-hand sides), and Laurent relations with
/// subtraction-free coefficients in boundary symbols.
#[derive(Debug, Clone)]
pub struct VerticalSystem {
    pub letters: Vec<String>,
    pub binomials: Vec<(Vec<i64>, SFRat)>,
    /// Each relation: support exponent vector over the letters -> coefficient.
    pub laurents: Vec<BTreeMap<Vec<i64>, SFRat>>,
}

/// Bivariate Laurent polynomial with SFRat coefficients, plus its Newton
/// data.
#[derive(Debug, Clone)]
pub struct FiberCurve {
    pub x_name: String,
    pub y_name: String,
    pub terms: BTreeMap<(i64, i64), SFRat>,
    pub newton: NewtonReport,
    /// The unimodular letter change used (letters expressed in the new ones).
    pub letter_change: Vec<Vec<i64>>,
}

/// Eliminates the binomial relations by a Smith-normal-form change of
/// letters, substitutes into the Laurent relations, reduces to a single
/// primitive two-variable polynomial (directly or through one bivariate
/// resultant in a shared auxiliary letter), and saturates monomials.
pub fn eliminate(sys: &VerticalSystem) -> Result<FiberCurve, FiberError> {
    let m_l = sys.letters.len();
    let r_tor = sys.binomials.len();
    if sys.laurents.is_empty() {
        return Err(FiberError::UnsupportedShape("no Laurent relations".into()));
    }
    // Solve the binomial block via SNF: U M S = D. New letters l~_i =
    // prod_j l_j^{S^{-T}}-style; we only need the exponent substitution
    // old -> new given by S.
    let (snf, rank) = if r_tor > 0 {
        let m: Vec<Vec<i64>> = sys.binomials.iter().map(|(row, _)| row.clone()).collect();
        let snf = smith_normal_form(&m);
        let rank = snf.rank;
        (Some(snf), rank)
    } else {
        (None, 0)
    };
    let free = m_l - rank;
    if free < 2 {
        return Err(FiberError::UnsupportedShape(format!(
            "{free} free letters after the binomial solve; need 2 (or 3 with a resultant)"
        )));
    }
    if free > 3 {
        return Err(FiberError::UnsupportedShape(format!("{free} free letters")));
    }

    // Units for the determined letters: l~_i^{d_i} = prod_b c_b^{U_ib}.
    let mut fixed_units: Vec<SFRat> = Vec::new();
    if let Some(snf) = &snf {
        for i in 0..rank {
            let d = snf.d[i][i];
            let mut c = SFRat::one();
            for (b, (_, unit)) in sys.binomials.iter().enumerate() {
                let e = snf.u[i][b];
                if e != 0 {
                    let p = i64::try_from(e)
                        .map_err(|_| FiberError::Arith("exponent overflow".into()))?;
                    c = c.mul(&unit.pow(p).map_err(FiberError::Arith)?);
                }
            }
            if d != 1 {
                // require an exact |d|-th root of the unit
                let root = sfrat_nth_root(&c, d.unsigned_abs() as u32).ok_or_else(|| {
                    FiberError::InconsistentBinomials(format!(
                        "letter fixed to a {d}-th root of a non-power unit"
                    ))
                })?;
                c = root;
            }
            fixed_units.push(c);
        }
    }

    // Old letter exponents in terms of new: log l = S log l~.
    let s_mat: Vec<Vec<i128>> = match &snf {
        Some(snf) => snf.s.clone(),
        None => ident(m_l),
    };

    // Substitute into each Laurent relation: term l^p becomes
    // l~^{S^T p}; determined components multiply the coefficient.
    let mut reduced: Vec<BTreeMap<Vec<i64>, SFRat>> = Vec::new();
    for rel in &sys.laurents {
        let mut out: BTreeMap<Vec<i64>, SFRat> = BTreeMap::new();
        for (p, coeff) in rel {
            // new exponent vector: (S^T p)_i = sum_j S_ji p_j
            let mut np = vec![0i64; m_l];
            for i in 0..m_l {
                let mut acc: i128 = 0;
                for j in 0..m_l {
                    acc += s_mat[j][i] * p[j] as i128;
                }
                np[i] = i64::try_from(acc)
                    .map_err(|_| FiberError::Arith("exponent overflow".into()))?;
            }
            let mut c = coeff.clone();
            for (i, unit) in fixed_units.iter().enumerate() {
                if np[i] != 0 {
                    c = c.mul(&unit.pow(np[i]).map_err(FiberError::Arith)?);
                }
            }
            let key: Vec<i64> = np[rank..].to_vec();
            let entry = out.entry(key).or_insert_with(SFRat::zero);
            *entry = entry.add(&c);
        }
        out.retain(|_, c| !c.is_zero());
        reduced.push(out);
    }

    let letter_change: Vec<Vec<i64>> = s_mat
        .iter()
        .map(|row| row.iter().map(|&x| x as i64).collect())
        .collect();

    let (x_name, y_name) = ("x".to_string(), "y".to_string());
    let final_terms: BTreeMap<(i64, i64), SFRat> = match (free, reduced.len()) {
        (2, 1) => reduced[0]
            .iter()
            .map(|(k, c)| ((k[0], k[1]), c.clone()))
            .collect(),
        (3, 2) => resultant_eliminate(&reduced[0], &reduced[1])?,
        (f, r) => {
            return Err(FiberError::UnsupportedShape(format!(
                "{f} free letters with {r} residual relations"
            )))
        }
    };
    let terms = saturate(final_terms)?;
    if terms.is_empty() {
        return Err(FiberError::InconsistentBinomials("relations reduce to zero".into()));
    }
    let newton = newton_genus_from_support(&terms.keys().cloned().collect::<Vec<_>>());
    Ok(FiberCurve { x_name, y_name, terms, newton, letter_change })
}

/// Exact n-th root of an SFRat when num and den are perfect monomial powers
/// or simple perfect powers.
fn sfrat_nth_root(f: &SFRat, n: u32) -> Option<SFRat> {
    fn poly_root(p: &LaurentPoly, n: u32) -> Option<LaurentPoly> {
        if p.terms.len() == 1 {
            let (e, c) = p.terms.iter().next().unwrap();
            if e.iter().any(|&x| x % n as i64 != 0) {
                return None;
            }
            let root_c = rat_nth_root(c, n)?;
            let ne: Vec<i64> = e.iter().map(|&x| x / n as i64).collect();
            let mut terms = BTreeMap::new();
            terms.insert(ne, root_c);
            return Some(LaurentPoly { vars: p.vars.clone(), terms });
        }
        // try a direct power probe for small polynomials
        None
    }
    let num = poly_root(&f.num, n)?;
    let den = poly_root(&f.den, n)?;
    SFRat::from_parts(num, den).ok()
}

fn rat_nth_root(c: &Rat, n: u32) -> Option<Rat> {
    let num = c.numer().nth_root(n);
    let den = c.denom().nth_root(n);
    let cand = Rat::new(num.clone(), den.clone());
    let mut p = Rat::from(num_bigint::BigInt::from(1));
    for _ in 0..n {
        p *= &cand;
    }
    if &p == c {
        Some(cand)
    } else {
        None
    }
}

/// Sylvester resultant in the shared third letter of two trivariate
/// relations, leaving a bivariate polynomial in the first two letters.
fn resultant_eliminate(
    rel_a: &BTreeMap<Vec<i64>, SFRat>,
    rel_b: &BTreeMap<Vec<i64>, SFRat>,
) -> Result<BTreeMap<(i64, i64), SFRat>, FiberError> {
    // both relations must involve the third letter
    let uses_t = |rel: &BTreeMap<Vec<i64>, SFRat>| rel.keys().any(|k| k[2] != 0);
    if !uses_t(rel_a) || !uses_t(rel_b) {
        return Err(FiberError::UnsupportedShape(
            "resultant path needs the auxiliary letter in both relations".into(),
        ));
    }
    // convert to polynomials in t with coefficients = SFRat in x, y symbols
    let as_poly_t = |rel: &BTreeMap<Vec<i64>, SFRat>| -> Result<Vec<SFRat>, FiberError> {
        let tmin = rel.keys().map(|k| k[2]).min().unwrap();
        let tmax = rel.keys().map(|k| k[2]).max().unwrap();
        let deg = (tmax - tmin) as usize;
        let mut coeffs = vec![SFRat::zero(); deg + 1];
        for (k, c) in rel {
            let mono = SFRat::var("x")
                .pow(k[0])
                .and_then(|mx| SFRat::var("y").pow(k[1]).map(|my| mx.mul(&my)))
                .map_err(FiberError::Arith)?;
            let idx = (k[2] - tmin) as usize;
            coeffs[idx] = coeffs[idx].add(&c.mul(&mono));
        }
        Ok(coeffs)
    };
    let pa = as_poly_t(rel_a)?;
    let pb = as_poly_t(rel_b)?;
    let (da, db) = (pa.len() - 1, pb.len() - 1);
    if da == 0 || db == 0 {
        return Err(FiberError::UnsupportedShape("degenerate resultant degrees".into()));
    }
    let n = da + db;
    let mut syl = vec![vec![SFRat::zero(); n]; n];
    for i in 0..db {
        for (j, c) in pa.iter().enumerate() {
            syl[i][i + j] = c.clone();
        }
    }
    for i in 0..da {
        for (j, c) in pb.iter().enumerate() {
            syl[db + i][i + j] = c.clone();
        }
    }
    let det = crate::boundary::det_sfrat(&syl);
    sfrat_to_bivariate(&det)
}

/// Splits an SFRat in the symbols {x, y, ...} into a bivariate Laurent
/// polynomial in (x, y) whose coefficients are SFRats in the remaining
/// symbols; the denominator must be free of x and y.
pub fn sfrat_to_bivariate(
    f: &SFRat,
) -> Result<BTreeMap<(i64, i64), SFRat>, FiberError> {
    let den_vars = &f.den.vars;
    if den_vars.iter().any(|v| v == "x" || v == "y") {
        return Err(FiberError::UnsupportedShape(
            "denominator depends on the free letters".into(),
        ));
    }
    let mut out: BTreeMap<(i64, i64), LaurentPoly> = BTreeMap::new();
    let vars = f.num.vars.clone();
    let xi = vars.iter().position(|v| v == "x");
    let yi = vars.iter().position(|v| v == "y");
    for (e, c) in &f.num.terms {
        let ex = xi.map(|i| e[i]).unwrap_or(0);
        let ey = yi.map(|i| e[i]).unwrap_or(0);
        let rest_vars: Vec<String> = vars
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != xi && Some(*i) != yi)
            .map(|(_, v)| v.clone())
            .collect();
        let rest_exp: Vec<i64> = e
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != xi && Some(*i) != yi)
            .map(|(_, &x)| x)
            .collect();
        let mono = LaurentPoly {
            vars: rest_vars,
            terms: [(rest_exp, c.clone())].into_iter().collect(),
        };
        match out.get_mut(&(ex, ey)) {
            Some(p) => *p = p.add(&mono),
            None => {
                out.insert((ex, ey), mono);
            }
        }
    }
    let mut terms = BTreeMap::new();
    for (k, p) in out {
        let c = SFRat::from_parts(p.prune_vars(), f.den.clone()).map_err(FiberError::Arith)?;
        if !c.is_zero() {
            terms.insert(k, c);
        }
    }
    Ok(terms)
}

/// Monomial saturation plus coefficient normalization: shift the support so
/// the minimum exponents are zero and scale so the coefficient at the
/// lexicographically smallest support point is one.
fn saturate(
    terms: BTreeMap<(i64, i64), SFRat>,
) -> Result<BTreeMap<(i64, i64), SFRat>, FiberError> {
    if terms.is_empty() {
        return Ok(terms);
    }
    let minx = terms.keys().map(|k| k.0).min().unwrap();
    let miny = terms.keys().map(|k| k.1).min().unwrap();
    let shifted: BTreeMap<(i64, i64), SFRat> =
        terms.into_iter().map(|((a, b), c)| ((a - minx, b - miny), c)).collect();
    let lead = shifted.values().next().unwrap().clone();
    let out = shifted
        .into_iter()
        .map(|(k, c)| Ok((k, c.div(&lead).map_err(FiberError::Arith)?)))
        .collect::<Result<BTreeMap<_, _>, FiberError>>()?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonReport {
    /// Convex hull vertices in counterclockwise order.
    pub polygon: Vec<(i64, i64)>,
    pub interior_count: usize,
    pub boundary_count: usize,
    /// Interior count from Pick's theorem (area - boundary/2 + 1).
    pub pick_interior: i64,
    pub pick_check: bool,
    pub genus: usize,
}

/// Convex hull, interior lattice count, and the Pick's-theorem cross-check.
pub fn newton_genus_from_support(support: &[(i64, i64)]) -> NewtonReport {
    let mut pts: Vec<(i64, i64)> = support.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return NewtonReport {
            polygon: pts,
            interior_count: 0,
            boundary_count: 0,
            pick_interior: 0,
            pick_check: true,
            genus: 0,
        };
    }
    let hull = convex_hull(&pts);
    if hull.len() <= 2 {
        // degenerate (collinear) support
        return NewtonReport {
            polygon: hull,
            interior_count: 0,
            boundary_count: 0,
            pick_interior: 0,
            pick_check: true,
            genus: 0,
        };
    }
    // twice the area by the shoelace formula
    let mut area2: i128 = 0;
    for i in 0..hull.len() {
        let (x1, y1) = hull[i];
        let (x2, y2) = hull[(i + 1) % hull.len()];
        area2 += x1 as i128 * y2 as i128 - x2 as i128 * y1 as i128;
    }
    area2 = area2.abs();
    // boundary lattice points: sum of gcds along edges
    let mut boundary: i64 = 0;
    for i in 0..hull.len() {
        let (x1, y1) = hull[i];
        let (x2, y2) = hull[(i + 1) % hull.len()];
        boundary += num_integer::gcd((x2 - x1).abs(), (y2 - y1).abs());
    }
    // interior points by bounding-box scan with exact half-plane tests
    let minx = hull.iter().map(|p| p.0).min().unwrap();
    let maxx = hull.iter().map(|p| p.0).max().unwrap();
    let miny = hull.iter().map(|p| p.1).min().unwrap();
    let maxy = hull.iter().map(|p| p.1).max().unwrap();
    let mut interior = 0usize;
    for x in minx..=maxx {
        for y in miny..=maxy {
            if strictly_inside(&hull, (x, y)) {
                interior += 1;
            }
        }
    }
    // Pick: I = A - B/2 + 1, kept exact as 2I = 2A - B + 2.
    let two_i = area2 - boundary as i128 + 2;
    let pick = (two_i / 2) as i64;
    NewtonReport {
        polygon: hull,
        interior_count: interior,
        boundary_count: boundary as usize,
        pick_interior: pick,
        pick_check: two_i % 2 == 0 && pick == interior as i64,
        genus: interior,
    }
}

/// Andrew's monotone chain; returns the hull counterclockwise.
fn convex_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn strictly_inside(hull: &[(i64, i64)], p: (i64, i64)) -> bool {
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let cross =
            (b.0 - a.0) as i128 * (p.1 - a.1) as i128 - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
        if cross <= 0 {
            return false;
        }
    }
    true
}

/// Residue of the dlog wedge of coordinate letters along letter `a` = 0:
/// the sign (-1)^a for moving it to the front, and the surviving letters
/// restricted to that locus. Poles of the restriction are reported as
/// errors.
pub fn residue_dlog(
    letters: &[SFRat],
    a: usize,
) -> Result<(i32, Vec<SFRat>), FiberError> {
    if a >= letters.len() {
        return Err(FiberError::Arith(format!("index {a} out of range")));
    }
    // the pivot must be a pure coordinate letter in the current chart
    let pivot = &letters[a];
    let var = {
        let vs = pivot.variables();
        let ok = vs.len() == 1
            && pivot.den.is_one()
            && pivot.num.terms.len() == 1
            && pivot.num.terms.iter().next().map(|(e, c)| {
                e.iter().sum::<i64>() == 1 && c == &Rat::from(num_bigint::BigInt::from(1))
            }) == Some(true);
        if !ok {
            return Err(FiberError::UnsupportedShape(
                "residue along a non-coordinate letter".into(),
            ));
        }
        vs[0].clone()
    };
    let sign = if a % 2 == 0 { 1 } else { -1 };
    let mut rest = Vec::new();
    for (i, l) in letters.iter().enumerate() {
        if i == a {
            continue;
        }
        let restricted = l.substitute_zero(&var).map_err(FiberError::Arith)?;
        if restricted.is_zero() {
            return Err(FiberError::Arith(format!(
                "letter {i} vanishes identically on the residue locus"
            )));
        }
        rest.push(restricted);
    }
    Ok((sign, rest))
}
