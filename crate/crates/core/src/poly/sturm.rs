//! Sturm sequences, approximate GCDs and isolation of nonnegative real roots.

use super::{PolyError, Polynomial};

/// Remainders whose max-norm falls below this fraction of the division's
/// term scale end a Sturm chain.
const STURM_REM_TOL: f64 = 1e-11;

/// Upper bound on bisection steps; f64 intervals collapse well before this.
const MAX_BISECT: usize = 2000;

#[derive(Debug, Clone)]
pub struct SturmSequence {
    polys: Vec<Polynomial>,
}

/// Remainder of `a` by `b`, or `None` when it is numerically zero relative to
/// the magnitude of the terms that produced it.
fn significant_remainder(a: &Polynomial, b: &Polynomial, tol: f64) -> Option<Polynomial> {
    let (q, r) = a.div_rem(b).ok()?;
    let scale = a.max_abs() + q.max_abs() * b.max_abs();
    if r.is_zero() || r.max_abs() <= tol * scale {
        None
    } else {
        Some(r)
    }
}

impl SturmSequence {
    /// Chain `p, p', -rem(p, p'), ...` with every member scaled to unit max-norm.
    pub fn new(p: &Polynomial) -> Result<Self, PolyError> {
        match p.degree() {
            None => return Err(PolyError::Degenerate("Sturm sequence of the zero polynomial")),
            Some(0) => {
                return Ok(SturmSequence {
                    polys: vec![p.normalized()],
                })
            }
            Some(_) => {}
        }
        let mut polys = vec![p.normalized(), p.derivative().normalized()];
        loop {
            let n = polys.len();
            let next = match significant_remainder(&polys[n - 2], &polys[n - 1], STURM_REM_TOL) {
                Some(r) => (-&r).normalized(),
                None => break,
            };
            let done = next.degree() == Some(0);
            polys.push(next);
            if done {
                break;
            }
        }
        Ok(SturmSequence { polys })
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Sign variations of the chain evaluated at `x`, zeros skipped.
    pub fn variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0_f64;
        for p in &self.polys {
            let v = p.eval(x);
            if v == 0.0 || v.is_nan() {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: f64, b: f64) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Cauchy bound: every root has modulus below `1 + max |c_k / c_n|`.
fn cauchy_bound(p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let lc = c[c.len() - 1].abs();
    1.0 + c[..c.len() - 1].iter().fold(0.0_f64, |m, x| m.max(x.abs() / lc))
}

/// Approximate monic GCD by the Euclidean algorithm on unit-normalized
/// remainders; a remainder below `tol` (relative) counts as zero.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial, tol: f64) -> Polynomial {
    let (mut a, mut b) = if a.degree() >= b.degree() {
        (a.normalized(), b.normalized())
    } else {
        (b.normalized(), a.normalized())
    };
    if a.is_zero() {
        return b.monic();
    }
    while !b.is_zero() {
        match significant_remainder(&a, &b, tol) {
            None => return b.monic(),
            Some(r) => {
                a = b;
                b = r.normalized();
            }
        }
    }
    a.monic()
}

/// Shrinks `(lo, hi]`, known to hold exactly one distinct root, by Sturm
/// counts so that refinement and isolation agree on every evaluation.
fn refine(seq: &SturmSequence, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..MAX_BISECT {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if seq.count(lo, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Distinct roots of `p` in `(lo, hi]`, each refined to an interval of width `tol`.
fn isolate(seq: &SturmSequence, lo: f64, hi: f64, tol: f64, out: &mut Vec<f64>) {
    let mut stack = vec![(lo, hi, seq.count(lo, hi))];
    while let Some((a, b, n)) = stack.pop() {
        match n {
            0 => {}
            1 => out.push(refine(seq, a, b, tol)),
            _ => {
                let mid = 0.5 * (a + b);
                if b - a <= tol || mid <= a || mid >= b {
                    out.push(mid);
                    continue;
                }
                let left = seq.count(a, mid);
                stack.push((a, mid, left));
                stack.push((mid, b, n.saturating_sub(left)));
            }
        }
    }
}

/// Real roots of `p` in `[0, ∞)`, sorted ascending, without repetition.
pub fn real_roots_nonneg(p: &Polynomial, tol: f64) -> Result<Vec<f64>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::Degenerate("roots of the zero polynomial"));
    }
    let mut roots = Vec::new();
    let tz = p.trailing_zeros();
    if tz > 0 {
        roots.push(0.0);
    }
    let reduced = p.shift_down(tz);
    if reduced.degree().unwrap_or(0) == 0 {
        return Ok(roots);
    }
    let seq = SturmSequence::new(&reduced)?;
    let bound = cauchy_bound(&reduced);
    isolate(&seq, 0.0, bound, tol, &mut roots);
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Like [`real_roots_nonneg`] but pairs each root with its multiplicity,
/// read off the chain of repeated GCDs `gcd(g, g')` used for square-free
/// factorization.
pub fn real_roots_nonneg_with_multiplicity(p: &Polynomial, tol: f64) -> Result<Vec<(f64, usize)>, PolyError> {
    let roots = real_roots_nonneg(p, tol)?;
    let tz = p.trailing_zeros();
    let reduced = p.shift_down(tz);

    let mut chain = Vec::new();
    let mut g = reduced.clone();
    while g.degree().unwrap_or(0) >= 1 {
        let next = poly_gcd(&g, &g.derivative(), STURM_REM_TOL * 10.0);
        if next.degree().unwrap_or(0) == 0 {
            break;
        }
        chain.push(SturmSequence::new(&next)?);
        g = next;
    }

    Ok(roots
        .into_iter()
        .map(|r| {
            if r == 0.0 && tz > 0 {
                return (r, tz);
            }
            let w = (1e-6 * (1.0 + r.abs())).max(1e3 * tol);
            let extra = chain.iter().take_while(|s| s.count(r - w, r + w) > 0).count();
            (r, 1 + extra)
        })
        .collect())
}
