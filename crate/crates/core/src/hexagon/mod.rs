//! Hexagon kinematics and the two-loop period assembly: cross-ratios,
//! discriminant roots, the V / V-tilde split, and Goncharov G-functions.

pub mod gfun;
pub mod polylog;

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

pub use gfun::g_function;
pub use polylog::{ell, ell1_diff, ell_c, li, polylog};

#[derive(Debug, Error)]
pub enum HexError {
    #[error("{0}")]
    Domain(String),
}

/// Kinematic record for a hexagon point (u, v, w).
#[derive(Debug, Clone)]
pub struct HexKinematics {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub delta_kin: f64,
    pub x_plus: Complex64,
    pub x_minus: Complex64,
    /// x_i^+- = u_i / x^+- for i = 0, 1, 2, paired (plus, minus).
    pub x_i_pm: [(Complex64, Complex64); 3],
    /// y_{u_i} = x_i^- / x_i^+.
    pub y: [Complex64; 3],
}

/// Discriminant, roots, and letters of a hexagon point.
/// Delta < 0 yields a conjugate root pair with unit-circle y-values.
pub fn kinematics(u: f64, v: f64, w: f64) -> Result<HexKinematics, HexError> {
    if u <= 0.0 || v <= 0.0 || w <= 0.0 {
        return Err(HexError::Domain("u, v, w must be positive".into()));
    }
    let s = u + v + w - 1.0;
    let delta_kin = s * s - 4.0 * u * v * w;
    let sqrt = if delta_kin >= 0.0 {
        Complex64::new(delta_kin.sqrt(), 0.0)
    } else {
        // principal square root with positive imaginary part
        Complex64::new(0.0, (-delta_kin).sqrt())
    };
    let denom = 2.0 * u * v * w;
    let x_plus = (Complex64::new(s, 0.0) + sqrt) / denom;
    let x_minus = (Complex64::new(s, 0.0) - sqrt) / denom;
    let us = [u, v, w];
    let mut x_i_pm = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
    let mut y = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        let xp = us[i] / x_plus;
        let xm = us[i] / x_minus;
        x_i_pm[i] = (xp, xm);
        y[i] = xm / xp;
    }
    Ok(HexKinematics { u, v, w, delta_kin, x_plus, x_minus, x_i_pm, y })
}

/// Consecutive-window chart: six positive minor ratios, three odd-type
/// (y-letters) and three even-type (u-letters via u = f_e / (1 + f_e)).
#[derive(Debug, Clone)]
pub struct FlagChart {
    /// Anchor index of the consecutive 4-window, 1-based, cyclic.
    pub anchor: usize,
    pub f_o: [f64; 3],
    pub f_e: [f64; 3],
}

impl FlagChart {
    pub fn validate(&self) -> Result<(), HexError> {
        for &f in self.f_o.iter().chain(self.f_e.iter()) {
            if f <= 0.0 {
                return Err(HexError::Domain("minor ratios must be positive".into()));
            }
        }
        Ok(())
    }

    /// (u, v, w) with the cyclic shift of the anchor applied, plus y-letters.
    pub fn to_uvw_y(&self) -> Result<([f64; 3], [f64; 3]), HexError> {
        self.validate()?;
        let mut u = [0.0; 3];
        let mut y = [0.0; 3];
        for j in 0..3 {
            let idx = (j + self.anchor - 1) % 3;
            u[j] = self.f_e[idx] / (1.0 + self.f_e[idx]);
            y[j] = self.f_o[idx];
        }
        Ok((u, y))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HexPeriod {
    pub v: f64,
    pub v_tilde: f64,
    pub total: f64,
    /// Magnitude of the imaginary remainder discarded when reporting the
    /// real parts (zero on the symmetric locus and for real root pairs).
    pub imag_norm: f64,
}

/// Evaluation input: cross-ratios with roots from the discriminant, or
/// cross-ratios with the y-letters supplied directly.
pub enum HexInput {
    Uvw(f64, f64, f64),
    UvwY([f64; 3], [f64; 3]),
    Chart(FlagChart),
}

pub fn hexagon_period(input: &HexInput) -> Result<HexPeriod, HexError> {
    match input {
        HexInput::Uvw(u, v, w) => {
            let kin = kinematics(*u, *v, *w)?;
            period_from_roots(&[kin.u, kin.v, kin.w], &kin.x_i_pm, kin.delta_kin == 0.0)
        }
        HexInput::UvwY(u, y) => {
            let pairs = roots_from_y(u, y)?;
            let on_locus = y.iter().all(|&yi| yi == 1.0);
            period_from_roots(u, &pairs, on_locus)
        }
        HexInput::Chart(chart) => {
            let (u, y) = chart.to_uvw_y()?;
            let pairs = roots_from_y(&u, &y)?;
            let on_locus = y.iter().all(|&yi| yi == 1.0);
            period_from_roots(&u, &pairs, on_locus)
        }
    }
}

/// Reconstructs x_i^+- from (u, y): x_i^- = u_i sqrt(uvw y_i),
/// x_i^+ = u_i sqrt(uvw / y_i), consistent with x_i^+- = u_i / x^-+ when the
/// y's come from the discriminant.
fn roots_from_y(u: &[f64; 3], y: &[f64; 3]) -> Result<[(Complex64, Complex64); 3], HexError> {
    if u.iter().any(|&x| x <= 0.0) || y.iter().any(|&x| x <= 0.0) {
        return Err(HexError::Domain("u and y letters must be positive".into()));
    }
    let prod = u[0] * u[1] * u[2];
    let mut out = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 3];
    for i in 0..3 {
        let xp = u[i] * (prod / y[i]).sqrt();
        let xm = u[i] * (prod * y[i]).sqrt();
        out[i] = (Complex64::new(xp, 0.0), Complex64::new(xm, 0.0));
    }
    Ok(out)
}

fn period_from_roots(
    u: &[f64; 3],
    pairs: &[(Complex64, Complex64); 3],
    on_degenerate_locus: bool,
) -> Result<HexPeriod, HexError> {
    // u-only part
    let mut li4_sum = 0.0;
    let mut li2_sum = 0.0;
    for &ui in u {
        let arg = 1.0 - 1.0 / ui;
        li4_sum += polylog(4, arg).map_err(HexError::Domain)?;
        li2_sum += polylog(2, arg).map_err(HexError::Domain)?;
    }
    let v_part = -0.5 * li4_sum - 0.125 * li2_sum * li2_sum;

    // y-dependent part
    let mut l4_sum = Complex64::new(0.0, 0.0);
    let mut j = Complex64::new(0.0, 0.0);
    for &(xp, xm) in pairs {
        l4_sum += l4(xp, xm, on_degenerate_locus)?;
        if !on_degenerate_locus {
            j += ell1_diff(xp, xm).map_err(HexError::Domain)?;
        }
    }
    let j2 = j * j;
    let j4 = j2 * j2;
    let v_tilde_c = l4_sum + j4 / 24.0 + Complex64::new(PI * PI / 12.0, 0.0) * j2
        + Complex64::new(PI.powi(4) / 72.0, 0.0);
    let total_c = Complex64::new(v_part, 0.0) + v_tilde_c;
    Ok(HexPeriod {
        v: v_part,
        v_tilde: v_tilde_c.re,
        total: total_c.re,
        imag_norm: v_tilde_c.im.abs(),
    })
}

/// L_4(x^+, x^-) = log^4(x^+/x^-)/8
///   + sum_{m=0}^{3} (-1)^m/(2m)!! log^m(x^+/x^-) (ell_{4-m}(x^+) + ell_{4-m}(x^-)).
/// On the degenerate locus log(x^+/x^-) = 0 only the m = 0 term survives;
/// that limit is the evaluation rule there.
fn l4(xp: Complex64, xm: Complex64, on_degenerate_locus: bool) -> Result<Complex64, HexError> {
    let double_factorial = [1.0, 2.0, 8.0, 48.0];
    if on_degenerate_locus || (xp - xm).norm() < 1e-15 * (xp.norm() + xm.norm()) {
        return Ok(ell_c(4, xp) + ell_c(4, xm));
    }
    let lr = (xp / xm).ln();
    let mut acc = lr.powu(4) / 8.0;
    for m in 0..4u32 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let n = 4 - m;
        let pair = if n == 1 {
            // the ell_1 sum must stay off the x = 1 wall
            let one = Complex64::new(1.0, 0.0);
            if (xp - one).norm() < 1e-12 || (xm - one).norm() < 1e-12 {
                return Err(HexError::Domain(
                    "root on the x = 1 wall: ell_1 diverges".into(),
                ));
            }
            ell1_c(xp) + ell1_c(xm)
        } else {
            ell_c(n, xp) + ell_c(n, xm)
        };
        acc += sign / double_factorial[m as usize] * lr.powu(m) * pair;
    }
    Ok(acc)
}

/// ell_1(x) = -(log(1-x) + log(1-1/x))/2 on principal branches.
fn ell1_c(x: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    -0.5 * ((one - x).ln() + (one - 1.0 / x).ln())
}

/// Momentum-twistor cross-ratios under the convention
/// u_1 = <6123><3456> / (<6134><2356>) and its cyclic images; a cyclic
/// relabeling of the twistors cyclically permutes (u_1, u_2, u_3).
pub fn cross_ratios_from_twistors(z: &[[f64; 4]; 6]) -> Result<[f64; 3], HexError> {
    let bracket = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        let m = [z[a - 1], z[b - 1], z[c - 1], z[d - 1]];
        det4(&m)
    };
    let u = |i: usize| -> Result<f64, HexError> {
        // u_i with all indices shifted by i-1 (cyclic, 1-based)
        let s = |k: usize| (k + i - 2) % 6 + 1;
        let num = bracket(s(6), s(1), s(2), s(3)) * bracket(s(3), s(4), s(5), s(6));
        let den = bracket(s(6), s(1), s(3), s(4)) * bracket(s(2), s(3), s(5), s(6));
        if den == 0.0 {
            return Err(HexError::Domain("degenerate twistor configuration".into()));
        }
        Ok(num / den)
    };
    Ok([u(1)?, u(2)?, u(3)?])
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut acc = 1.0;
    for c in 0..4 {
        let p = (c..4).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(c, p);
            acc = -acc;
        }
        acc *= a[c][c];
        for i in c + 1..4 {
            let f = a[i][c] / a[c][c];
            for j in c..4 {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI4_72: f64 = 97.409091034002437236440332688705 / 72.0;

    #[test]
    fn kinematics_symmetric_point() {
        let k = kinematics(1.0, 1.0, 1.0).unwrap();
        assert_eq!(k.delta_kin, 0.0);
        assert!((k.x_plus - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for i in 0..3 {
            assert!((k.y[i] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn kinematics_rational_point() {
        let k = kinematics(1.0, 1.0, 4.0).unwrap();
        assert!((k.delta_kin - 9.0).abs() < 1e-13);
        assert!((k.x_plus.re - 1.0).abs() < 1e-14);
        assert!((k.x_minus.re - 0.25).abs() < 1e-14);
        assert!((k.y[0].re - 4.0).abs() < 1e-13);
    }

    #[test]
    fn kinematics_complex_branch() {
        let k = kinematics(0.5, 0.5, 0.5).unwrap();
        assert!((k.delta_kin + 0.25).abs() < 1e-14);
        for i in 0..3 {
            assert!((k.y[i].norm() - 1.0).abs() < 1e-13, "|y| = 1 on the complex branch");
        }
        // x+ x- u v w = 1
        let p = k.x_plus * k.x_minus * 0.125;
        assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn kinematics_invariants_reproduced() {
        for &(u, v, w) in &[(0.2, 0.1, 0.05), (0.9, 0.9, 0.05), (1.0, 1.0, 4.0)] {
            let k = kinematics(u, v, w).unwrap();
            let s = 1.0 - u - v - w;
            assert!((k.delta_kin - (s * s - 4.0 * u * v * w)).abs() < 1e-14);
            let p = k.x_plus * k.x_minus * u * v * w;
            assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetric_point_value() {
        let p = hexagon_period(&HexInput::Uvw(1.0, 1.0, 1.0)).unwrap();
        assert!(p.v.abs() < 1e-14);
        assert!((p.v_tilde - PI4_72).abs() < 1e-12);
        assert!((p.total - PI4_72).abs() < 1e-12);
        assert_eq!(p.imag_norm, 0.0);
    }

    #[test]
    fn dihedral_invariance_real_branch() {
        // all roots negative: u + v + w < 1
        let base = hexagon_period(&HexInput::Uvw(0.3, 0.25, 0.2)).unwrap();
        for (u, v, w) in [
            (0.25, 0.2, 0.3),
            (0.2, 0.3, 0.25),
            (0.3, 0.2, 0.25),
            (0.25, 0.3, 0.2),
            (0.2, 0.25, 0.3),
        ] {
            let p = hexagon_period(&HexInput::Uvw(u, v, w)).unwrap();
            assert!((p.total - base.total).abs() < 1e-12, "{} vs {}", p.total, base.total);
        }
    }

    #[test]
    fn dihedral_invariance_complex_branch() {
        let base = hexagon_period(&HexInput::Uvw(0.5, 0.6, 0.7)).unwrap();
        for (u, v, w) in [(0.6, 0.7, 0.5), (0.7, 0.5, 0.6), (0.5, 0.7, 0.6)] {
            let p = hexagon_period(&HexInput::Uvw(u, v, w)).unwrap();
            assert!((p.total - base.total).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_axis_jump_is_the_j_term() {
        // Along u = v = w -> 1 the discriminant is negative and the ell_1
        // pair arguments approach the wall with a fixed direction, so J tends
        // to -6i arctan(sqrt(3)/5) rather than 0. The J = 0 rule on the
        // degenerate locus therefore puts an isolated jump at (1,1,1): the
        // off-locus limit differs from pi^4/72 by J^4/24 + pi^2 J^2 / 12.
        let j_lim = 6.0 * (3.0f64.sqrt() / 5.0).atan();
        let jump = j_lim.powi(4) / 24.0 - PI * PI / 12.0 * j_lim * j_lim;
        for eps in [1e-4, 1e-5] {
            let t = 1.0 - eps;
            let p = hexagon_period(&HexInput::Uvw(t, t, t)).unwrap();
            assert!(
                (p.total - (PI4_72 + jump)).abs() < 1e-2,
                "t={t}: {} vs {}",
                p.total,
                PI4_72 + jump
            );
        }
        // The u-only part is continuous to 0.
        let p = hexagon_period(&HexInput::Uvw(1.0 - 1e-6, 1.0 - 1e-6, 1.0 - 1e-6)).unwrap();
        assert!(p.v.abs() < 1e-4);
    }

    #[test]
    fn y_set_to_one_matches_direct_reimplementation() {
        // with y = 1 the pair collapses: V-tilde = sum 2 ell_4(x_i) + pi^4/72
        let u = [0.3, 0.4, 0.2];
        let prod: f64 = u.iter().product();
        let p = hexagon_period(&HexInput::UvwY(u, [1.0; 3])).unwrap();
        let mut direct = PI.powi(4) / 72.0;
        for &ui in &u {
            let x = ui * prod.sqrt();
            direct += 2.0 * ell(4, x).unwrap();
        }
        let mut li4 = 0.0;
        let mut li2 = 0.0;
        for &ui in &u {
            li4 += polylog(4, 1.0 - 1.0 / ui).unwrap();
            li2 += polylog(2, 1.0 - 1.0 / ui).unwrap();
        }
        direct += -0.5 * li4 - 0.125 * li2 * li2;
        assert!((p.total - direct).abs() < 1e-12, "{} vs {direct}", p.total);
    }

    #[test]
    fn chart_map_consistency() {
        // u = f_e / (1 + f_e) inverts f_e = u / (1 - u)
        for &u in &[0.1f64, 0.5, 0.9] {
            let fe = u / (1.0 - u);
            assert!((fe / (1.0 + fe) - u).abs() < 1e-15);
        }
        let chart = FlagChart { anchor: 1, f_o: [1.0; 3], f_e: [1.0, 2.0, 3.0] };
        let (u, y) = chart.to_uvw_y().unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);
        assert!((u[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(y, [1.0; 3]);
        // cyclic anchor shift permutes the cross-ratios
        let chart2 = FlagChart { anchor: 2, ..chart.clone() };
        let (u2, _) = chart2.to_uvw_y().unwrap();
        assert!((u2[0] - u[1]).abs() < 1e-15);
    }

    #[test]
    fn wall_point_is_signaled() {
        // (1,1,4): x^+ = 1 puts two ell_1 pairs on the wall
        assert!(hexagon_period(&HexInput::Uvw(1.0, 1.0, 4.0)).is_err());
    }

    #[test]
    fn twistor_cross_ratios_cyclic() {
        let z: [[f64; 4]; 6] = [
            [1.0, 0.1, 0.2, 0.3],
            [0.2, 1.3, 0.1, 0.4],
            [0.3, 0.2, 1.1, 0.2],
            [0.1, 0.4, 0.3, 1.2],
            [0.5, 0.3, 0.9, 0.1],
            [0.2, 0.8, 0.4, 0.7],
        ];
        let u = cross_ratios_from_twistors(&z).unwrap();
        let mut zs = z;
        zs.rotate_left(1);
        let us = cross_ratios_from_twistors(&zs).unwrap();
        // relabeling Z_i -> Z_{i+1} shifts u_i -> u_{i-1}
        for i in 0..3 {
            assert!(
                (us[i] - u[(i + 1) % 3]).abs() < 1e-10 * u[(i + 1) % 3].abs().max(1.0),
                "{us:?} vs {u:?}"
            );
        }
    }
}
