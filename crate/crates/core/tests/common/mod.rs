//! Independent numerical oracles. None of these call into the code under test
//! beyond reading polynomial coefficients.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

/// Horner evaluation of ascending real coefficients at a complex point.
pub fn horner(c: &[f64], s: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * s + k)
}

/// All complex roots by Durand–Kerner (Weierstrass) iteration.
pub fn durand_kerner(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lc = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lc).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..5000 {
        let mut delta = 0.0_f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = horner(&monic, z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    // a few Newton polishing steps
    let d: Vec<f64> = (1..=n).map(|k| k as f64 * monic[k]).collect();
    for r in z.iter_mut() {
        for _ in 0..3 {
            let dv = horner(&d, *r);
            if dv.norm() > 0.0 {
                *r -= horner(&monic, *r) / dv;
            }
        }
    }
    z
}

/// Random polynomial of degree 1..=8: either built from random left- or
/// right-half-plane roots (real and conjugate pairs) or with random coefficients.
pub fn random_poly<R: Rng>(rng: &mut R) -> Vec<f64> {
    let deg = rng.random_range(1..=8usize);
    if rng.random_bool(0.5) {
        let mut c = vec![1.0];
        let mut left = deg;
        let stable_bias = rng.random_bool(0.6);
        while left > 0 {
            let re = {
                let m = rng.random_range(0.05..3.0);
                if stable_bias || rng.random_bool(0.7) {
                    -m
                } else {
                    m
                }
            };
            if left >= 2 && rng.random_bool(0.5) {
                let im: f64 = rng.random_range(0.1..3.0);
                // s² - 2 re s + re² + im²
                c = mul(&c, &[re * re + im * im, -2.0 * re, 1.0]);
                left -= 2;
            } else {
                c = mul(&c, &[-re, 1.0]);
                left -= 1;
            }
        }
        let k = rng.random_range(0.2..5.0);
        c.iter().map(|x| x * k).collect()
    } else {
        let mut c: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        if c[deg].abs() < 0.1 {
            c[deg] = 0.5;
        }
        c
    }
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut total = Complex64::new(0.0, 0.0);
    for col in 0..n {
        if m[0][col] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let minor: Vec<Vec<Complex64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, v)| *v)
                    .collect()
            })
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += m[0][col] * det(&minor) * sign;
    }
    total
}

/// `det(sI - M)` for a real matrix.
pub fn char_value(m: &[Vec<f64>], s: Complex64) -> Complex64 {
    let n = m.len();
    let a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = if i == j { s } else { Complex64::new(0.0, 0.0) };
                    d - m[i][j]
                })
                .collect()
        })
        .collect();
    det(&a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleGain {
    Finite(f64),
    Unbounded,
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Supremum of `f` over a log grid on `[lo, hi]` of `n` points plus `ω = 0`,
/// refined by golden section around the best grid point.
fn grid_sup(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let (a, b) = (lo.ln(), hi.ln());
    let w = |i: usize| (a + (b - a) * i as f64 / (n - 1) as f64).exp();
    let mut best = (0.0, f(0.0));
    let mut best_i = None;
    for i in 0..n {
        let v = f(w(i));
        if v > best.1 {
            best = (w(i), v);
            best_i = Some(i);
        }
    }
    if let Some(i) = best_i {
        let l = w(i.saturating_sub(1));
        let r = w((i + 1).min(n - 1));
        let (x, v) = golden_max(f, l, r);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

pub const GRID_POINTS: usize = 1_000_000;

/// Frequency band reaching well past every pole magnitude.
fn band(num: &[f64], den: &[f64]) -> (f64, f64) {
    let scale = |c: &[f64]| {
        let lc = c[c.len() - 1];
        1.0 + c.iter().fold(0.0_f64, |m, x| m.max((x / lc).abs()))
    };
    let hi = scale(den).max(if num.len() > 1 { scale(num) } else { 1.0 });
    (1e-4 / hi, 1e5 * hi)
}

/// `sup |G(iω)|²/Re G(iω)` by brute force: unbounded if `Re G ≤ 0` where
/// `G ≠ 0`, or if the ratio is still climbing steeply at the top of the band.
pub fn secant_oracle(num: &[f64], den: &[f64]) -> OracleGain {
    let g = |w: f64| horner(num, Complex64::new(0.0, w)) / horner(den, Complex64::new(0.0, w));
    let (lo, hi) = band(num, den);
    let n = GRID_POINTS;
    let (a, b) = (lo.ln(), hi.ln());
    for i in 0..n {
        let w = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
        let z = g(w);
        if z.re <= 0.0 && z.norm() > 1e-12 * (1.0 + z.norm()) {
            return OracleGain::Unbounded;
        }
    }
    let ratio = |w: f64| {
        let z = g(w);
        if z.re > 0.0 {
            z.norm_sqr() / z.re
        } else {
            0.0
        }
    };
    let top = ratio(hi);
    let below = ratio(hi / 10.0);
    if top > 5.0 * below && below > 0.0 {
        return OracleGain::Unbounded;
    }
    let (_, sup) = grid_sup(&ratio, lo, hi, n);
    OracleGain::Finite(sup.max(top))
}

/// `sup |G(iω)|` and its argument.
pub fn hinf_oracle(num: &[f64], den: &[f64]) -> (f64, f64) {
    let g = |w: f64| (horner(num, Complex64::new(0.0, w)) / horner(den, Complex64::new(0.0, w))).norm();
    let (lo, hi) = band(num, den);
    let (w, v) = grid_sup(&g, lo, hi, GRID_POINTS);
    (v, w)
}

/// Transfer functions used to cross-check gain computations (ascending
/// coefficients, numerator then denominator).
pub fn regression_set() -> Vec<(&'static str, Vec<f64>, Vec<f64>)> {
    vec![
        ("(2s+1)/(s^2+s+1)", vec![1.0, 2.0], vec![1.0, 1.0, 1.0]),
        ("3/(s+2)", vec![3.0], vec![2.0, 1.0]),
        ("s/(s^2+s+1)", vec![0.0, 1.0], vec![1.0, 1.0, 1.0]),
        ("(s+3)/((s+1)(s+2))", vec![3.0, 1.0], vec![2.0, 3.0, 1.0]),
        (
            "(s^2+2s+5)/((s+1)(s+2)(s+3))",
            vec![5.0, 2.0, 1.0],
            vec![6.0, 11.0, 6.0, 1.0],
        ),
        ("(s+1)/(s^2+s+1)", vec![1.0, 1.0], vec![1.0, 1.0, 1.0]),
        ("1/(s^2+s+1)", vec![1.0], vec![1.0, 1.0, 1.0]),
        ("(s+0.5)/(s^2+0.2s+4)", vec![0.5, 1.0], vec![4.0, 0.2, 1.0]),
        ("(4s+1)/(s^2+2s+2)", vec![1.0, 4.0], vec![2.0, 2.0, 1.0]),
        ("10/(s+0.1)", vec![10.0], vec![0.1, 1.0]),
        ("(s^2+s+1)/((s+2)^3)", vec![1.0, 1.0, 1.0], vec![8.0, 12.0, 6.0, 1.0]),
        ("(0.3s+2)/(s^2+3s+1)", vec![2.0, 0.3], vec![1.0, 3.0, 1.0]),
    ]
}
