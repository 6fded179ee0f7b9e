//! Classical polylogarithms Li_n for n = 1..4 on the principal branch,
//! complex arguments. Series for small |z|, inversion for large |z|, and the
//! zeta/log expansion around the unit circle in between.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

pub const ZETA2: f64 = PI * PI / 6.0;
pub const ZETA3: f64 = 1.2020569031595942854;
pub const ZETA4: f64 = PI * PI * PI * PI / 90.0;

/// zeta at nonpositive integers: zeta(0) = -1/2, zeta(-2k) = 0,
/// zeta(1-2k) = -B_{2k}/(2k).
fn zeta_nonpos(m: i64) -> f64 {
    debug_assert!(m <= 0);
    if m == 0 {
        return -0.5;
    }
    let k = (-m) as usize;
    if k % 2 == 0 {
        return 0.0;
    }
    let b = bernoulli_table();
    let idx = k + 1; // B_{k+1}, k+1 even
    -b[idx] / (idx as f64)
}

fn zeta_int(m: i64) -> f64 {
    match m {
        4 => ZETA4,
        3 => ZETA3,
        2 => ZETA2,
        m if m <= 0 => zeta_nonpos(m),
        _ => unreachable!("zeta_int only needed for m <= 4, m != 1"),
    }
}

/// Bernoulli numbers B_0..B_60 (B_1 = -1/2), computed once by the standard
/// recurrence in exact arithmetic and rounded.
fn bernoulli_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        use num_rational::BigRational;
        use num_bigint::BigInt;
        use num_traits::{One, Zero};
        let n = 61usize;
        let mut b: Vec<BigRational> = Vec::with_capacity(n);
        for m in 0..n {
            // B_m = -1/(m+1) sum_{j<m} C(m+1, j) B_j
            let mut acc = BigRational::zero();
            for (j, bj) in b.iter().enumerate() {
                acc += BigRational::from(binom(m as u64 + 1, j as u64)) * bj;
            }
            let bm = if m == 0 {
                BigRational::one()
            } else {
                -acc / BigRational::from(BigInt::from(m as u64 + 1))
            };
            b.push(bm);
        }
        b.iter().map(crate::sfrat::rat_to_f64).collect()
    })
}

fn binom(n: u64, k: u64) -> num_bigint::BigInt {
    let mut acc = num_bigint::BigInt::from(1);
    for i in 0..k {
        acc = acc * num_bigint::BigInt::from(n - i) / num_bigint::BigInt::from(i + 1);
    }
    acc
}

/// Li_n(z) on the principal branch (branch cut on (1, inf), continuous from
/// below on the cut, matching the usual principal-value conventions).
pub fn li(n: u32, z: Complex64) -> Complex64 {
    assert!((1..=4).contains(&n), "li supports n = 1..4");
    if n == 1 {
        return -(Complex64::new(1.0, 0.0) - z).ln();
    }
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if r <= 0.6 {
        return li_series(n, z);
    }
    if r >= 1.7 {
        return li_inversion(n, z);
    }
    li_unity(n, z)
}

fn li_series(n: u32, z: Complex64) -> Complex64 {
    let mut term = z;
    let mut acc = z;
    for k in 2..500u32 {
        term *= z;
        let t = term / Complex64::new((k as f64).powi(n as i32), 0.0);
        acc += t;
        if t.norm() < 1e-18 * acc.norm().max(1e-12) {
            break;
        }
    }
    acc
}

/// Inversion to 1/z (Lewin), valid off [0,1] with principal logs.
fn li_inversion(n: u32, z: Complex64) -> Complex64 {
    let lw = (-z).ln();
    let inv = li_series_or_unity(n, 1.0 / z);
    match n {
        2 => -inv - Complex64::new(ZETA2, 0.0) - 0.5 * lw * lw,
        3 => inv - Complex64::new(ZETA2, 0.0) * lw - lw * lw * lw / 6.0,
        4 => {
            -inv - Complex64::new(7.0 * PI.powi(4) / 360.0, 0.0)
                - Complex64::new(ZETA2 / 2.0, 0.0) * lw * lw
                - lw.powu(4) / 24.0
        }
        _ => unreachable!(),
    }
}

fn li_series_or_unity(n: u32, z: Complex64) -> Complex64 {
    if z.norm() <= 0.6 {
        li_series(n, z)
    } else {
        li_unity(n, z)
    }
}

/// Expansion in w = log z around the unit circle:
/// Li_n(z) = sum_{j >= 0, j != n-1} zeta(n-j) w^j / j!
///           + w^{n-1}/(n-1)! (H_{n-1} - log(-w)).
fn li_unity(n: u32, z: Complex64) -> Complex64 {
    let w = z.ln();
    if w.norm() < 1e-300 {
        return Complex64::new(zeta_int(n as i64), 0.0);
    }
    let h = [0.0, 0.0, 1.0, 1.5, 11.0 / 6.0][n as usize];
    let special = w.powu(n - 1) / factorial(n - 1) * (Complex64::new(h, 0.0) - (-w).ln());
    let mut acc = special;
    let mut wj = Complex64::new(1.0, 0.0); // w^j / j!
    let mut small = 0;
    for j in 0..72i64 {
        if j > 0 {
            wj *= w / Complex64::new(j as f64, 0.0);
        }
        if j == n as i64 - 1 {
            continue;
        }
        let t = Complex64::new(zeta_int(n as i64 - j), 0.0) * wj;
        acc += t;
        // zeta vanishes at negative even integers, so require two consecutive
        // small terms before stopping.
        if j > 8 && t.norm() < 1e-18 * acc.norm().max(1e-12) {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    acc
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Real polylogarithm: for x > 1 (n >= 2) this is the principal real part;
/// n = 1 requires x < 1.
pub fn polylog(n: u32, x: f64) -> Result<f64, String> {
    assert!((1..=4).contains(&n));
    if n == 1 {
        if x >= 1.0 {
            return Err("Li_1 diverges logarithmically at x >= 1".into());
        }
        return Ok(-(1.0 - x).ln());
    }
    Ok(li(n, Complex64::new(x, 0.0)).re)
}

/// ell_n(x) = (Li_n(x) - (-1)^n Li_n(1/x)) / 2 on the principal branch.
pub fn ell_c(n: u32, x: Complex64) -> Complex64 {
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    0.5 * (li(n, x) + sign * li(n, 1.0 / x))
}

/// Real ell_n for x > 0 via principal real parts.
pub fn ell(n: u32, x: f64) -> Result<f64, String> {
    if x <= 0.0 {
        return Err("ell_n requires x > 0".into());
    }
    if n == 1 {
        if x == 1.0 {
            return Err("ell_1 diverges at x = 1".into());
        }
        // ell_1(x) = -(log(1-x) + log(1-1/x))/2 with principal real parts
        let a = (1.0 - x).abs().ln();
        let b = (1.0 - 1.0 / x).abs().ln();
        return Ok(-0.5 * (a + b));
    }
    Ok(ell_c(n, Complex64::new(x, 0.0)).re)
}

/// The difference ell_1(x_plus) - ell_1(x_minus) with the divergent parts
/// cancelled analytically:
/// (log((1-b)/(1-a)) + log((1-1/b)/(1-1/a))) / 2, with the coincident limit
/// defined as 0. Requires both arguments on the same side of the x = 1 wall.
pub fn ell1_diff(a: Complex64, b: Complex64) -> Result<Complex64, String> {
    if (a - b).norm() < 1e-15 * (a.norm() + b.norm() + 1.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let one = Complex64::new(1.0, 0.0);
    let p1 = (one - b) / (one - a);
    let p2 = (one - 1.0 / b) / (one - 1.0 / a);
    if !p1.norm().is_finite() || !p2.norm().is_finite() || p1.norm() < 1e-300 || p2.norm() < 1e-300
    {
        return Err("ell_1 pair straddles or touches the x = 1 wall".into());
    }
    if a.im == 0.0 && b.im == 0.0 && (1.0 - a.re).signum() != (1.0 - b.re).signum() {
        return Err("ell_1 pair straddles the x = 1 wall".into());
    }
    Ok(0.5 * (p1.ln() + p2.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_zeta_values() {
        assert!((polylog(2, 1.0).unwrap() - ZETA2).abs() < 1e-13);
        assert!((polylog(4, 1.0).unwrap() - ZETA4).abs() < 1e-13);
        assert!((polylog(3, 1.0).unwrap() - ZETA3).abs() < 1e-13);
    }

    #[test]
    fn dilog_half() {
        let expect = ZETA2 / 2.0 - 0.5 * (2.0f64.ln()).powi(2);
        assert!((polylog(2, 0.5).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn li_regions_agree() {
        // cross-check the three evaluation regions against each other on
        // overlapping radii
        for n in 2..=4u32 {
            for &r in &[0.55, 0.65, 1.65, 1.75] {
                for &th in &[0.3, 2.2, 3.0, -1.2] {
                    let z = Complex64::from_polar(r, th);
                    let a = li_series_or_unity(n, z);
                    let b = if r < 1.0 { li_series(n, z) } else { li_inversion(n, z) };
                    // only compare where both are in their convergence zone
                    if r <= 0.6 || r >= 1.7 {
                        assert!(
                            (a - b).norm() < 1e-12,
                            "n={n} z={z} {a} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn li_unity_vs_series_midzone() {
        for n in 2..=4u32 {
            let z = c(0.58, 0.1);
            let a = li_series(n, z);
            let b = li_unity(n, z);
            assert!((a - b).norm() < 1e-12, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn li2_on_cut_matches_reference() {
        // Li_2(2) = pi^2/4 - i pi ln 2 on the principal branch
        let v = li(2, c(2.0, 0.0));
        assert!((v.re - PI * PI / 4.0).abs() < 1e-13);
        assert!((v.im.abs() - PI * 2.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn li_negative_real() {
        // Li_2(-1) = -pi^2/12, Li_4(-1) = -7 pi^4/720
        assert!((li(2, c(-1.0, 0.0)).re + ZETA2 / 2.0).abs() < 1e-13);
        assert!((li(4, c(-1.0, 0.0)).re + 7.0 * PI.powi(4) / 720.0).abs() < 1e-13);
    }

    #[test]
    fn ell_parity() {
        // even n: ell_n(x) + ell_n(1/x) = 0; odd n: ell_n(x) - ell_n(1/x) = 0
        for &x in &[2.0, 0.3, 5.5] {
            let e2 = ell(2, x).unwrap() + ell(2, 1.0 / x).unwrap();
            assert!(e2.abs() < 1e-13, "x={x}: {e2}");
            let e3 = ell(3, x).unwrap() - ell(3, 1.0 / x).unwrap();
            assert!(e3.abs() < 1e-13);
        }
        assert!(ell(4, 1.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn ell1_diff_examples() {
        assert_eq!(ell1_diff(c(3.0, 0.0), c(3.0, 0.0)).unwrap().norm(), 0.0);
        // same-side pair: matches direct evaluation
        let d = ell1_diff(c(4.0, 0.0), c(16.0, 0.0)).unwrap();
        let direct = ell(1, 4.0).unwrap() - ell(1, 16.0).unwrap();
        assert!((d.re - direct).abs() < 1e-12);
        // straddling pair errors out
        assert!(ell1_diff(c(0.5, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn li1_error_path() {
        assert!(polylog(1, 1.0).is_err());
        assert!(polylog(1, 0.5).is_ok());
    }
}
