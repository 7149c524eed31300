//! Routh–Hurwitz test with symbolic tracking of the epsilon substitution.
//!
//! Table entries are truncated power series in a positive infinitesimal `ε`.
//! A vanishing first-column entry is replaced by `ε`, an all-zero row by the
//! derivative of the auxiliary polynomial above it, and signs are read from
//! the lowest-order nonzero term. Rows are built fraction-free and rescaled
//! by positive factors only, which leaves every sign intact.

use serde::{Deserialize, Serialize};

use super::{PolyError, Polynomial};

/// An entry is zero when below this fraction of the magnitudes that formed it.
const ROUTH_ZERO_TOL: f64 = 1e-9;

/// Orders of `ε` kept per entry.
const EPS_TERMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// Every root strictly in the open left half-plane.
    pub stable: bool,
    /// A first-column entry vanished and no sign change occurred: roots on
    /// the imaginary axis, none to the right of it.
    pub marginal: bool,
    /// First-column sign changes; the number of open right half-plane roots.
    pub sign_changes: usize,
    /// Rows of the table evaluated at `ε = 0`, each scaled to unit max-norm.
    pub routh_table: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
struct Eps(Vec<f64>);

impl Eps {
    fn real(x: f64) -> Self {
        Eps(vec![x])
    }

    fn epsilon() -> Self {
        Eps(vec![0.0, 1.0])
    }

    fn coeff(&self, k: usize) -> f64 {
        self.0.get(k).copied().unwrap_or(0.0)
    }

    fn signum(&self) -> f64 {
        self.0.iter().find(|&&c| c != 0.0).map_or(0.0, |c| c.signum())
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    fn mul(&self, other: &Eps) -> Eps {
        if self.0.is_empty() || other.0.is_empty() {
            return Eps::default();
        }
        let len = (self.0.len() + other.0.len() - 1).min(EPS_TERMS);
        let mut out = vec![0.0; len];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                if i + j < len {
                    out[i + j] += a * b;
                }
            }
        }
        Eps(out)
    }

    fn sub(&self, other: &Eps) -> Eps {
        let len = self.0.len().max(other.0.len());
        Eps((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    fn scale(&self, k: f64) -> Eps {
        Eps(self.0.iter().map(|c| c * k).collect())
    }

    fn chop(&mut self, cut: f64) {
        for c in &mut self.0 {
            if c.abs() < cut {
                *c = 0.0;
            }
        }
    }
}

fn row_max(row: &[Eps]) -> f64 {
    row.iter().fold(0.0_f64, |m, e| m.max(e.max_abs()))
}

fn row_is_zero(row: &[Eps]) -> bool {
    row.iter().all(Eps::is_zero)
}

/// Positive rescaling: unit max-norm, then divide out any common power of `ε`.
fn tidy(row: &mut [Eps]) {
    let m = row_max(row);
    if m == 0.0 {
        return;
    }
    for e in row.iter_mut() {
        *e = e.scale(1.0 / m);
    }
    while row.iter().all(|e| e.coeff(0) == 0.0) {
        for e in row.iter_mut() {
            if !e.0.is_empty() {
                e.0.remove(0);
            }
        }
    }
}

/// Hurwitz test of `p`; the sign of `p` is normalized first.
pub fn routh_hurwitz(p: &Polynomial) -> Result<StabilityVerdict, PolyError> {
    let n = match p.degree() {
        None | Some(0) => return Err(PolyError::Degenerate("Routh–Hurwitz needs degree at least one")),
        Some(n) => n,
    };
    let p = if p.leading().unwrap_or(1.0) < 0.0 {
        -p
    } else {
        p.clone()
    };
    let width = n / 2 + 1;
    let desc: Vec<f64> = (0..=n).map(|i| p.coeff(n - i)).collect();
    let initial = |offset: usize| -> Vec<Eps> {
        (0..width)
            .map(|j| Eps::real(desc.get(offset + 2 * j).copied().unwrap_or(0.0)))
            .collect()
    };

    let input_cut = ROUTH_ZERO_TOL * p.max_abs();
    let mut rows: Vec<Vec<Eps>> = vec![initial(0), initial(1)];
    for row in rows.iter_mut() {
        for e in row.iter_mut() {
            e.chop(input_cut);
        }
        tidy(row);
    }

    let mut zero_seen = false;
    for k in 1..=n {
        if row_is_zero(&rows[k]) {
            // Auxiliary polynomial of the row above has degree n-k+1 in steps of two.
            zero_seen = true;
            let d = n - (k - 1);
            let above = rows[k - 1].clone();
            let mut repl = vec![Eps::default(); width];
            for (j, e) in above.iter().enumerate() {
                let power = d as i64 - 2 * j as i64;
                if power >= 1 {
                    repl[j] = e.scale(power as f64);
                }
            }
            tidy(&mut repl);
            rows[k] = repl;
        }
        if rows[k][0].is_zero() {
            zero_seen = true;
            rows[k][0] = Eps::epsilon();
        }
        if k == n {
            break;
        }

        let (r0, r1) = (&rows[k - 1], &rows[k]);
        let lead = &r1[0];
        let sgn = lead.signum();
        let mut next = Vec::with_capacity(width);
        let mut scale = 0.0_f64;
        for j in 0..width {
            let a = r0.get(j + 1).cloned().unwrap_or_default();
            let b = r1.get(j + 1).cloned().unwrap_or_default();
            let t1 = lead.mul(&a);
            let t2 = r0[0].mul(&b);
            scale = scale.max(t1.max_abs()).max(t2.max_abs());
            next.push(t1.sub(&t2).scale(sgn));
        }
        let cut = ROUTH_ZERO_TOL * scale;
        for e in next.iter_mut() {
            e.chop(cut);
        }
        tidy(&mut next);
        rows.push(next);
    }

    let signs: Vec<f64> = rows.iter().map(|r| r[0].signum()).collect();
    let sign_changes = signs
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && w[0] != w[1])
        .count();
    let routh_table = rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let len = (n - k) / 2 + 1;
            r.iter().take(len).map(|e| e.coeff(0)).collect()
        })
        .collect();

    Ok(StabilityVerdict {
        stable: sign_changes == 0 && !zero_seen,
        marginal: sign_changes == 0 && zero_seen,
        sign_changes,
        routh_table,
    })
}
