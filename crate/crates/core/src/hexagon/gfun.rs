//! Goncharov hyperlogarithms G(a_1, ..., a_m; 1) by integrating the
//! triangular suffix system G_j'(x) = G_{j+1}(x) / (x - a_j) from 0 to 1
//! with an adaptive embedded Runge-Kutta pair.

use num_complex::Complex64;

pub const MAX_DEPTH: usize = 6;

/// Distance from a complex point to the segment [0, 1] on the real axis.
fn dist_to_path(a: Complex64) -> f64 {
    let t = a.re.clamp(0.0, 1.0);
    (a - Complex64::new(t, 0.0)).norm()
}

/// G(a_1, ..., a_m; 1) for nonzero letters avoiding the closed path (0, 1].
pub fn g_function(letters: &[Complex64]) -> Result<Complex64, String> {
    let m = letters.len();
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if m > MAX_DEPTH {
        return Err(format!("depth {m} exceeds the supported maximum {MAX_DEPTH}"));
    }
    for a in letters {
        if a.norm() < 1e-12 {
            return Err("zero letter (divergent trailing kernel)".into());
        }
        if dist_to_path(*a) < 1e-9 {
            return Err(format!("letter {a} lies on the integration path"));
        }
    }
    let deriv = |x: f64, g: &[Complex64]| -> Vec<Complex64> {
        let xc = Complex64::new(x, 0.0);
        (0..m)
            .map(|j| {
                let upper = if j + 1 < m { g[j + 1] } else { Complex64::new(1.0, 0.0) };
                upper / (xc - letters[j])
            })
            .collect()
    };
    let y = integrate(deriv, vec![Complex64::new(0.0, 0.0); m], 0.0, 1.0, 1e-13)?;
    Ok(y[0])
}

/// Adaptive Cash-Karp 4(5) integration of a complex system.
fn integrate<F>(
    f: F,
    mut y: Vec<Complex64>,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<Vec<Complex64>, String>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    const A: [f64; 6] = [0.0, 0.2, 0.3, 0.6, 1.0, 0.875];
    const B: [[f64; 5]; 6] = [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [0.2, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [0.3, -0.9, 1.2, 0.0, 0.0],
        [-11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ];
    const C5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
    const C4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        0.25,
    ];
    let mut t = t0;
    let mut h = (t1 - t0) / 64.0;
    let mut steps = 0usize;
    while t < t1 {
        if steps > 2_000_000 {
            return Err("quadrature did not converge (too many steps)".into());
        }
        steps += 1;
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(6);
        for s in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let b = B[s][j];
                if b != 0.0 {
                    for (yi, ki) in ys.iter_mut().zip(kj) {
                        *yi += h * b * ki;
                    }
                }
            }
            k.push(f(t + A[s] * h, &ys));
        }
        let mut y5 = y.clone();
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let mut d5 = Complex64::new(0.0, 0.0);
            let mut d4 = Complex64::new(0.0, 0.0);
            for s in 0..6 {
                d5 += C5[s] * k[s][i];
                d4 += C4[s] * k[s][i];
            }
            y5[i] += h * d5;
            err = err.max((h * (d5 - d4)).norm());
        }
        let scale = 1.0 + y5.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if err <= tol * scale || h.abs() < 1e-14 {
            t += h;
            y = y5;
            if err > 0.0 {
                h *= (tol * scale / err).powf(0.2).clamp(0.5, 4.0);
            } else {
                h *= 2.0;
            }
        } else {
            h *= (tol * scale / err).powf(0.25).max(0.1);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn weight_one_closed_forms() {
        // G(a; 1) = log(1 - 1/a)
        let g2 = g_function(&[c(2.0, 0.0)]).unwrap();
        assert!((g2.re + 2.0f64.ln()).abs() < 1e-11, "{g2}");
        assert!(g2.im.abs() < 1e-11);
        let gm1 = g_function(&[c(-1.0, 0.0)]).unwrap();
        assert!((gm1.re - 2.0f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn shuffle_depth_two() {
        let a = c(2.0, 0.0);
        let b = c(3.0, 0.0);
        let lhs = g_function(&[a]).unwrap() * g_function(&[b]).unwrap();
        let rhs = g_function(&[a, b]).unwrap() + g_function(&[b, a]).unwrap();
        assert!((lhs - rhs).norm() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn complex_letters() {
        let a = c(0.5, 1.2);
        let b = c(-0.7, -0.4);
        let lhs = g_function(&[a]).unwrap() * g_function(&[b]).unwrap();
        let rhs = g_function(&[a, b]).unwrap() + g_function(&[b, a]).unwrap();
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn letter_on_path_rejected() {
        assert!(g_function(&[c(0.5, 0.0)]).is_err());
        assert!(g_function(&[c(0.0, 0.0)]).is_err());
        assert!(g_function(&[c(2.0, 0.0); 7]).is_err());
    }

    #[test]
    fn depth_matches_closed_form_weight_two() {
        // G(a, a; 1) = log^2(1 - 1/a) / 2
        let a = c(3.0, 0.0);
        let g = g_function(&[a, a]).unwrap();
        let l = (1.0f64 - 1.0 / 3.0).ln();
        assert!((g.re - l * l / 2.0).abs() < 1e-10, "{g}");
    }
}
