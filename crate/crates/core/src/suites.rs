//! Randomized verification suites shared by the CLI and the acceptance
//! tests: seeded generators for admissible super seeds, bracket-preservation
//! sweeps, horizontal invariance, and Grassmann/BCFW batteries.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary::{bcfw_check, cofactor_null_residual, minor, projector, subsets, BoundaryMatrix};
use crate::grassmann::{berezin_delta, ExtElem};
use crate::linalg;
use crate::seed::ExchangeData;
use crate::sfrat::{rat, rat_to_f64, Rat, SFRat};
use crate::superseed::{
    bracket_preservation_failure, horizontal_data, mutate_super, OddMode, SuperSeed,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random skew-symmetric exchange data with entries bounded by `max_abs`.
pub fn random_skew_exchange(rng: &mut ChaCha8Rng, n: usize, max_abs: i64) -> ExchangeData {
    loop {
        let mut eps = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-max_abs..=max_abs);
                eps[i][j] = v;
                eps[j][i] = -v;
            }
        }
        if eps.iter().any(|row| row.iter().any(|&x| x != 0)) {
            return ExchangeData::new(n, 0, eps, vec![1; n]).unwrap();
        }
    }
}

/// Random admissible super seed: W = Z eps_hat lands in the row space, so
/// W ker(eps_hat) = 0 automatically.
pub fn random_admissible_seed(
    rng: &mut ChaCha8Rng,
    n_max: usize,
    r_max: usize,
    eps_abs: i64,
) -> SuperSeed {
    let n = rng.gen_range(2..=n_max.max(2));
    let r = rng.gen_range(1..=r_max.max(1));
    loop {
        let exchange = random_skew_exchange(rng, n, eps_abs);
        let w: Vec<Vec<i64>> = (0..r)
            .map(|_| {
                let z: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2i64)).collect();
                (0..n)
                    .map(|j| (0..n).map(|i| z[i] * exchange.epsilon[i][j]).sum())
                    .collect()
            })
            .collect();
        let seed = SuperSeed::initial(exchange, w);
        if seed.is_admissible() {
            return seed;
        }
    }
}

/// Like `random_admissible_seed` with an invertible skew block (even n).
pub fn random_invertible_seed(
    rng: &mut ChaCha8Rng,
    r_max: usize,
    eps_abs: i64,
) -> SuperSeed {
    loop {
        let n = 2 * rng.gen_range(1..=2usize);
        let seed = random_admissible_seed(rng, n.max(2), r_max, eps_abs);
        if seed.exchange.n_mut % 2 == 0
            && linalg::inverse(&seed.exchange.eps_hat_mut()).is_some()
        {
            return seed;
        }
    }
}

/// Bracket preservation over `count` random admissible seeds. Returns the
/// number checked; panics never, reports the first failure.
pub fn bracket_preservation_sweep(
    seed: u64,
    count: usize,
    mode: OddMode,
) -> Result<usize, String> {
    let mut rng = rng(seed);
    for t in 0..count {
        let s = random_admissible_seed(&mut rng, 4, 2, 3);
        let k = rng.gen_range(0..s.exchange.n_mut);
        let m = mutate_super(&s, k, mode).map_err(|e| format!("trial {t}: {e}"))?;
        if let Some(fail) = bracket_preservation_failure(&s, &m) {
            return Err(format!(
                "trial {t}: {fail} (n = {}, k = {k}, eps = {:?}, W = {:?})",
                s.exchange.n_mut, s.exchange.epsilon, s.w
            ));
        }
    }
    Ok(count)
}

/// Horizontal invariance e^{-phi'} * prefactor = e^{-phi} checked at
/// `points` random positive points per seed; returns the max residual.
pub fn horizontal_invariance_sweep(
    seed: u64,
    seeds: usize,
    points: usize,
) -> Result<f64, String> {
    let mut rng = rng(seed);
    let mut max_resid: f64 = 0.0;
    for _ in 0..seeds {
        let s = random_invertible_seed(&mut rng, 2, 3);
        let k = rng.gen_range(0..s.exchange.n_mut);
        let m = mutate_super(&s, k, OddMode::Consistent).map_err(|e| e.to_string())?;
        let h0 = horizontal_data(&s).map_err(|e| e.to_string())?;
        let h1 = horizontal_data(&m).map_err(|e| e.to_string())?;
        let n = s.exchange.n_mut;
        for _ in 0..points {
            let pt: Vec<f64> = (0..n).map(|_| (rng.gen_range(-1.0..1.0f64)).exp()).collect();
            let point: BTreeMap<String, f64> = pt
                .iter()
                .enumerate()
                .map(|(i, &v)| (format!("x{}", i + 1), v))
                .collect();
            for alpha in 0..s.r() {
                // e^{-phi} at the base point from the exponent matrix
                let lhs = {
                    let mut acc = 0.0;
                    for (j, e) in h0.exponents[alpha].iter().enumerate() {
                        acc += -rat_to_f64(e) * pt[j].ln();
                    }
                    acc.exp()
                };
                // e^{-phi'} at the mutated point times the prefactor
                let rhs = {
                    let mut acc = 0.0;
                    for (j, e) in h1.exponents[alpha].iter().enumerate() {
                        let xj = m.x[j].eval_f64(&point).map_err(|e| e)?;
                        acc += -rat_to_f64(e) * xj.ln();
                    }
                    let pref = m.theta_prefactor[alpha].eval_f64(&point)?;
                    acc.exp() * pref
                };
                max_resid = max_resid.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
        }
    }
    Ok(max_resid)
}

/// Random rational boundary matrix with a guaranteed nonsingular anchor.
pub fn random_boundary(
    rng: &mut ChaCha8Rng,
    r: usize,
    f: usize,
) -> (BoundaryMatrix, Vec<usize>) {
    loop {
        let entries: Vec<Vec<SFRat>> = (0..r)
            .map(|_| {
                (0..f)
                    .map(|_| SFRat::constant(rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))))
                    .collect()
            })
            .collect();
        let c = BoundaryMatrix::from_entries(entries);
        if let Some(anchor) =
            subsets(f, r).into_iter().find(|o| !minor(&c, o).map(|d| d.is_zero()).unwrap_or(true))
        {
            return (c, anchor);
        }
    }
}

pub struct BcfwSweepReport {
    pub trials: usize,
    pub all_equal: bool,
    pub plucker_exact: bool,
    pub cauchy_binet_exact: bool,
    pub cofactors_null: bool,
}

/// The Grassmann/BCFW battery: Cauchy-Binet expansion, the window identity,
/// Plucker ratios over all subsets, and the cofactor null property.
pub fn bcfw_sweep(seed: u64, trials: usize) -> Result<BcfwSweepReport, String> {
    let mut rng = rng(seed);
    let mut report = BcfwSweepReport {
        trials,
        all_equal: true,
        plucker_exact: true,
        cauchy_binet_exact: true,
        cofactors_null: true,
    };
    for t in 0..trials {
        let r = rng.gen_range(2..=3usize);
        let f = rng.gen_range(r + 2..=7usize);
        let (c, anchor) = random_boundary(&mut rng, r, f);
        // window: r + 1 distinct labels
        let mut window: Vec<usize> = (0..f).collect();
        for i in (1..window.len()).rev() {
            let j = rng.gen_range(0..=i);
            window.swap(i, j);
        }
        window.truncate(r + 1);
        window.sort_unstable();
        let rep = bcfw_check(&c, &anchor, &window).map_err(|e| format!("trial {t}: {e}"))?;
        if !rep.equal {
            report.all_equal = false;
            return Err(format!("trial {t}: BCFW identity failed"));
        }
        if !cofactor_null_residual(&c, &anchor, &rep.support).map_err(|e| e.to_string())? {
            report.cofactors_null = false;
        }
        // Plucker ratios over every r-subset
        let m = projector(&c, &anchor).map_err(|e| e.to_string())?;
        let delta_o = minor(&c, &anchor).map_err(|e| e.to_string())?;
        for u in subsets(f, r) {
            let sub: Vec<Vec<SFRat>> =
                (0..r).map(|i| u.iter().map(|&j| m[i][j].clone()).collect()).collect();
            let lhs = crate::boundary::det_sfrat(&sub).mul(&delta_o);
            let rhs = minor(&c, &u).map_err(|e| e.to_string())?;
            if !lhs.equals(&rhs) {
                report.plucker_exact = false;
            }
        }
        // Cauchy-Binet on the full matrix against brute-force minors
        let gens = crate::grassmann::gen_names("eta", f);
        let delta = berezin_delta(&c.entries, &gens);
        let mut expect = ExtElem::zero(&gens);
        for u in subsets(f, r) {
            let d = minor(&c, &u).map_err(|e| e.to_string())?;
            if !d.is_zero() {
                expect.terms.insert(u.clone(), d);
            }
        }
        if !delta.equals(&expect) {
            report.cauchy_binet_exact = false;
        }
    }
    Ok(report)
}

/// Random positive rational point for exact evaluation.
pub fn random_positive_point(rng: &mut ChaCha8Rng, names: &[String]) -> BTreeMap<String, Rat> {
    names
        .iter()
        .map(|v| (v.clone(), rat(rng.gen_range(1..=9), rng.gen_range(1..=5))))
        .collect()
}
