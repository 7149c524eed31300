//! Frequency-domain passivity analysis of strictly proper transfer functions.
//!
//! For `G = p/q` every quantity here is a ratio of even polynomials in
//! `x = ω²`: `|p(iω)|² = N(x)`, `Re[p(iω) q̄(iω)] = D(x)` and
//! `|q(iω)|² = Q(x)`. The secant gain is `sup N/D` over `x ≥ 0`, the H∞ gain
//! is `sqrt(sup N/Q)`. Suprema are taken over an exact candidate set: `x = 0`,
//! the nonnegative roots of the critical-point polynomial `N'D - ND'`, and the
//! `x → ∞` limit.

mod static_nl;

pub use static_nl::{static_gain, StaticNonlinearity};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{
    mag_squared_even, re_cross_even, real_roots_nonneg, real_roots_nonneg_with_multiplicity, PolyError, Polynomial,
    RationalTransfer,
};

/// Absolute refinement width (in `x`) for critical points.
const CRITICAL_TOL: f64 = 1e-12;
/// Relative tolerance for comparing gain candidates.
const GAIN_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PassivityError {
    #[error("transfer function is not stable (denominator is not Hurwitz)")]
    NotStable,
    #[error("parameter {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Why a secant gain is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnboundedReason {
    /// `Re G(iω) ≤ 0` somewhere while `G(iω) ≠ 0`.
    NotPassive,
    /// Relative degree two or more.
    RelativeDegree,
    /// `Re G(iω)` decays faster than `|G(iω)|²` as `ω → ∞`.
    HighFrequencyRolloff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainCertificate {
    /// Gain value, `+∞` when unbounded.
    pub gamma: f64,
    /// Frequency (rad/s) at which a finite supremum is attained.
    pub witness_omega: Option<f64>,
    /// The supremum is the `ω → ∞` limit of the ratio.
    pub attained_at_infinity: bool,
    /// Every `(ω, value)` inspected; the limit candidate has `ω = +∞`.
    pub candidates: Vec<(f64, f64)>,
    /// Zero numerator: gain zero, flagged.
    pub degenerate: bool,
    pub unbounded: Option<UnboundedReason>,
}

impl GainCertificate {
    fn zero_system() -> Self {
        GainCertificate {
            gamma: 0.0,
            witness_omega: None,
            attained_at_infinity: false,
            candidates: Vec::new(),
            degenerate: true,
            unbounded: None,
        }
    }

    fn unbounded(reason: UnboundedReason) -> Self {
        GainCertificate {
            gamma: f64::INFINITY,
            witness_omega: None,
            attained_at_infinity: false,
            candidates: Vec::new(),
            degenerate: false,
            unbounded: Some(reason),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.gamma.is_finite()
    }
}

struct RatioSup {
    value: f64,
    witness_x: Option<f64>,
    at_infinity: bool,
    candidates: Vec<(f64, f64)>,
}

/// Supremum of `num/den` over `x ≥ 0` for `den > 0` there and
/// `deg num ≤ deg den`. On a tie between a finite point and the limit the
/// finite point wins unless `prefer_limit` is set.
fn sup_ratio(num: &Polynomial, den: &Polynomial, prefer_limit: bool) -> Result<RatioSup, PolyError> {
    let ratio = |x: f64| num.eval(x) / den.eval(x);
    let mut candidates = vec![(0.0, ratio(0.0))];
    let critical = &(&num.derivative() * den) - &(num * &den.derivative());
    if !critical.is_zero() {
        for x in real_roots_nonneg(&critical, CRITICAL_TOL)? {
            if x > 0.0 {
                candidates.push((x, ratio(x)));
            }
        }
    }

    let (best_x, best) = candidates
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });

    let limit = if num.degree() == den.degree() {
        Some(num.leading().unwrap_or(0.0) / den.leading().unwrap_or(1.0))
    } else {
        None
    };
    if let Some(l) = limit {
        candidates.push((f64::INFINITY, l));
        let tie = (l - best).abs() <= GAIN_REL_TOL * l.abs().max(best.abs());
        if l > best && !tie || tie && prefer_limit {
            return Ok(RatioSup {
                value: l,
                witness_x: None,
                at_infinity: true,
                candidates,
            });
        }
    }
    Ok(RatioSup {
        value: best,
        witness_x: Some(best_x),
        at_infinity: false,
        candidates,
    })
}

fn require_stable(g: &RationalTransfer) -> Result<(), PassivityError> {
    if g.is_stable() {
        Ok(())
    } else {
        Err(PassivityError::NotStable)
    }
}

fn multiplicity_near(p: &Polynomial, r: f64) -> Result<usize, PolyError> {
    let w = 1e-6 * (1.0 + r.abs());
    Ok(real_roots_nonneg_with_multiplicity(p, CRITICAL_TOL)?
        .into_iter()
        .find(|(x, _)| (x - r).abs() <= w)
        .map_or(0, |(_, m)| m))
}

/// Removes factors shared by `N` and `D` on `x ≥ 0` and checks that `D` keeps
/// one sign there. Returns the reduced pair and whether anything was removed,
/// or the reason the ratio is unbounded.
fn reduce_secant_pair(
    n: Polynomial,
    d: Polynomial,
) -> Result<Result<(Polynomial, Polynomial, bool), UnboundedReason>, PolyError> {
    let (tn, td) = (n.trailing_zeros(), d.trailing_zeros());
    if td > tn {
        return Ok(Err(UnboundedReason::NotPassive));
    }
    let mut cancelled = td > 0;
    let mut n = n.shift_down(td);
    let mut d = d.shift_down(td);

    for (r, md) in real_roots_nonneg_with_multiplicity(&d, CRITICAL_TOL)? {
        let common = n.eval(r).abs() <= 1e-9 * n.eval_abs(r);
        if !common || md % 2 == 1 || multiplicity_near(&n, r)? < md {
            return Ok(Err(UnboundedReason::NotPassive));
        }
        for _ in 0..md {
            n = n.deflate(r);
            d = d.deflate(r);
        }
        cancelled = true;
    }
    if d.eval(0.0) <= 0.0 {
        return Ok(Err(UnboundedReason::NotPassive));
    }
    Ok(Ok((n, d, cancelled)))
}

/// Secant gain `γ_s = sup_ω |G(iω)|² / Re G(iω)` of a stable transfer function.
pub fn secant_gain(g: &RationalTransfer) -> Result<GainCertificate, PassivityError> {
    require_stable(g)?;
    let (p, q) = (g.num(), g.den());
    if p.is_zero() {
        return Ok(GainCertificate::zero_system());
    }
    if g.relative_degree().unwrap_or(0) >= 2 {
        return Ok(GainCertificate::unbounded(UnboundedReason::RelativeDegree));
    }
    let n = mag_squared_even(p)?;
    let d = re_cross_even(p, q)?;
    let (n, d, cancelled) = match reduce_secant_pair(n, d)? {
        Ok(t) => t,
        Err(reason) => return Ok(GainCertificate::unbounded(reason)),
    };
    if n.degree() > d.degree() {
        return Ok(GainCertificate::unbounded(UnboundedReason::HighFrequencyRolloff));
    }
    let sup = sup_ratio(&n, &d, cancelled)?;
    Ok(GainCertificate {
        gamma: sup.value,
        witness_omega: sup.witness_x.map(f64::sqrt),
        attained_at_infinity: sup.at_infinity,
        candidates: sup.candidates.into_iter().map(|(x, v)| (x.sqrt(), v)).collect(),
        degenerate: false,
        unbounded: None,
    })
}

/// H∞ gain `sup_ω |G(iω)|` of a stable transfer function.
pub fn hinf_gain(g: &RationalTransfer) -> Result<GainCertificate, PassivityError> {
    require_stable(g)?;
    let (p, q) = (g.num(), g.den());
    if p.is_zero() {
        return Ok(GainCertificate::zero_system());
    }
    let sup = sup_ratio(&mag_squared_even(p)?, &mag_squared_even(q)?, false)?;
    Ok(GainCertificate {
        gamma: sup.value.sqrt(),
        witness_omega: sup.witness_x.map(f64::sqrt),
        attained_at_infinity: sup.at_infinity,
        candidates: sup.candidates.into_iter().map(|(x, v)| (x.sqrt(), v.sqrt())).collect(),
        degenerate: false,
        unbounded: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OspReason {
    StableFiniteGain,
    Unstable,
    NonpositiveRealPart,
    RelativeDegreeTooHigh,
    /// Real part positive but too small at high frequency for a finite gain.
    HighFrequencyRolloff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OspStatus {
    pub is_osp: bool,
    pub reason: OspReason,
}

/// Output strict passivity of a linear block.
pub fn is_osp(g: &RationalTransfer) -> OspStatus {
    let reason = if !g.is_stable() {
        OspReason::Unstable
    } else {
        match secant_gain(g) {
            Ok(c) => match c.unbounded {
                None => OspReason::StableFiniteGain,
                Some(UnboundedReason::NotPassive) => OspReason::NonpositiveRealPart,
                Some(UnboundedReason::RelativeDegree) => OspReason::RelativeDegreeTooHigh,
                Some(UnboundedReason::HighFrequencyRolloff) => OspReason::HighFrequencyRolloff,
            },
            Err(PassivityError::NotStable) => OspReason::Unstable,
            Err(_) => OspReason::NonpositiveRealPart,
        }
    };
    OspStatus {
        is_osp: reason == OspReason::StableFiniteGain,
        reason,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SprFailure {
    NotStable,
    RealPartNotPositive,
    HighFrequencyLimitNonpositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SprStatus {
    pub is_spr: bool,
    pub failed_condition: Option<SprFailure>,
}

/// Strict positive realness: stable, `Re G(iω) > 0` for all `ω`, and
/// `lim ω² Re G(iω) > 0`.
pub fn is_spr(g: &RationalTransfer) -> SprStatus {
    let fail = |c| SprStatus {
        is_spr: false,
        failed_condition: Some(c),
    };
    if !g.is_stable() {
        return fail(SprFailure::NotStable);
    }
    let (p, q) = (g.num(), g.den());
    let Ok(d) = re_cross_even(p, q) else {
        return fail(SprFailure::RealPartNotPositive);
    };
    if d.eval(0.0) <= 0.0 {
        return fail(SprFailure::RealPartNotPositive);
    }
    match real_roots_nonneg(&d, CRITICAL_TOL) {
        Ok(r) if r.is_empty() => {}
        _ => return fail(SprFailure::RealPartNotPositive),
    }
    let qq = mag_squared_even(q).expect("denominator is nonzero");
    let expected = qq.degree().unwrap_or(0).checked_sub(1);
    if d.degree() != expected || d.leading().unwrap_or(0.0) <= 0.0 {
        return fail(SprFailure::HighFrequencyLimitNonpositive);
    }
    SprStatus {
        is_spr: true,
        failed_condition: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleCheck {
    pub passes: bool,
    /// `max_ω |G(iω) - γ/2| - γ/2`; nonpositive when the plot lies in the disc.
    pub max_violation: f64,
    pub worst_omega: f64,
    pub samples: usize,
}

/// Frequency window `[lo, hi]` covering the pole magnitudes of `q` by four
/// decades on each side.
pub fn frequency_window(g: &RationalTransfer) -> (f64, f64) {
    let q = g.den();
    let n = q.degree().unwrap_or(1);
    let c = q.coeffs();
    let upper = 1.0 + c[..n].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let c0 = c[0].abs();
    let lower = if c0 > 0.0 {
        c0 / (c0 + c[1..].iter().fold(0.0_f64, |m, x| m.max(x.abs())))
    } else {
        1e-3
    };
    (1e-4 * lower.min(1.0), 1e4 * upper.max(1.0))
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Verifies that the Nyquist plot of `G` lies in the disc `|z - γ/2| ≤ γ/2`
/// on a log grid plus the secant-gain critical frequencies.
pub fn circle_certificate(g: &RationalTransfer, gamma: f64, n_samples: usize) -> Result<CircleCheck, PassivityError> {
    require_stable(g)?;
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(PassivityError::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    let (lo, hi) = frequency_window(g);
    let mut omegas = log_grid(lo, hi, n_samples.max(2));
    omegas.push(0.0);
    if let Ok(cert) = secant_gain(g) {
        omegas.extend(cert.candidates.iter().map(|c| c.0).filter(|w| w.is_finite()));
    }
    let centre = gamma / 2.0;
    let (mut worst, mut worst_omega) = (f64::NEG_INFINITY, 0.0);
    for &w in &omegas {
        let v = (g.freq_response(w) - centre).norm() - centre;
        if v > worst {
            worst = v;
            worst_omega = w;
        }
    }
    Ok(CircleCheck {
        passes: worst <= GAIN_REL_TOL * gamma.max(1.0),
        max_violation: worst,
        worst_omega,
        samples: omegas.len(),
    })
}

/// IQC multiplier `[[0, γ/2], [γ/2, -1]]`; `wᵀMw = γuy - y²` for `w = (u, y)`.
pub fn iqc_matrix(gamma: f64) -> Result<[[f64; 2]; 2], PassivityError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(PassivityError::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    Ok([[0.0, gamma / 2.0], [gamma / 2.0, -1.0]])
}

pub fn quadratic_form(m: &[[f64; 2]; 2], u: f64, y: f64) -> f64 {
    let w = [u, y];
    (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| w[i] * m[i][j] * w[j])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(num: &[f64], den: &[f64]) -> RationalTransfer {
        RationalTransfer::from_coeffs(num, den).unwrap()
    }

    fn reference_example() -> RationalTransfer {
        tf(&[1.0, 2.0], &[1.0, 1.0, 1.0])
    }

    #[test]
    fn secant_gain_attained_in_limit() {
        let c = secant_gain(&reference_example()).unwrap();
        assert!((c.gamma - 4.0).abs() <= 1e-9 * 4.0);
        assert!(c.attained_at_infinity);
        assert_eq!(c.witness_omega, None);
    }

    #[test]
    fn first_order_secant_gain() {
        let c = secant_gain(&RationalTransfer::first_order(2.0, 3.0).unwrap()).unwrap();
        assert!((c.gamma - 1.5).abs() < 1e-12);
    }

    #[test]
    fn constant_ratio_witness() {
        let c = secant_gain(&tf(&[0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
        assert!((c.gamma - 1.0).abs() < 1e-9, "{c:?}");
        // x = 0 was a cancelled point, so the limit carries the value
        assert!(c.attained_at_infinity);
    }

    #[test]
    fn unbounded_cases() {
        let c = secant_gain(&tf(&[1.0], &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(c.unbounded, Some(UnboundedReason::RelativeDegree));
        let c = secant_gain(&tf(&[1.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(c.unbounded, Some(UnboundedReason::HighFrequencyRolloff));
        assert!(c.gamma.is_infinite());
        let c = secant_gain(&tf(&[2.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(c.unbounded, Some(UnboundedReason::NotPassive));
        // Re G < 0 at DC
        let c = secant_gain(&tf(&[-1.0, 1.0], &[1.0, 2.0, 1.0])).unwrap();
        assert_eq!(c.unbounded, Some(UnboundedReason::NotPassive));
    }

    #[test]
    fn unstable_is_an_error() {
        let g = tf(&[1.0], &[-1.0, 1.0]);
        assert_eq!(secant_gain(&g).unwrap_err(), PassivityError::NotStable);
        assert_eq!(hinf_gain(&g).unwrap_err(), PassivityError::NotStable);
    }

    #[test]
    fn zero_system_is_degenerate() {
        let c = secant_gain(&tf(&[0.0], &[1.0, 1.0])).unwrap();
        assert!(c.degenerate && c.gamma == 0.0);
    }

    #[test]
    fn hinf_examples() {
        let c = hinf_gain(&reference_example()).unwrap();
        let expect = (2.0 + (2.0 / 3.0) * 21f64.sqrt()).sqrt();
        assert!((c.gamma - expect).abs() <= 1e-9 * expect, "{c:?}");
        let w = 0.5 * (21f64.sqrt() - 1.0).sqrt();
        assert!((c.witness_omega.unwrap() - w).abs() < 1e-6);
        let c = hinf_gain(&RationalTransfer::first_order(2.0, 3.0).unwrap()).unwrap();
        assert!((c.gamma - 1.5).abs() < 1e-12);
        assert_eq!(c.witness_omega, Some(0.0));
        // s/(s^2+s+1) peaks at ω = 1 with |G| = 1
        let c = hinf_gain(&tf(&[0.0, 1.0], &[1.0, 1.0, 1.0])).unwrap();
        assert!((c.gamma - 1.0).abs() < 1e-12 && (c.witness_omega.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn osp_examples() {
        assert!(is_osp(&reference_example()).is_osp);
        assert_eq!(
            is_osp(&tf(&[1.0], &[1.0, 1.0, 1.0])).reason,
            OspReason::RelativeDegreeTooHigh
        );
        assert_eq!(is_osp(&tf(&[1.0], &[-1.0, 1.0])).reason, OspReason::Unstable);
        assert!(is_osp(&tf(&[0.0, 1.0], &[1.0, 1.0, 1.0])).is_osp);
    }

    #[test]
    fn spr_examples() {
        assert!(is_spr(&tf(&[0.5, 1.0], &[1.0, 1.0, 1.0])).is_spr);
        let s = is_spr(&tf(&[0.0, 1.0], &[1.0, 1.0, 1.0]));
        assert_eq!(s.failed_condition, Some(SprFailure::RealPartNotPositive));
        assert!(!is_spr(&tf(&[2.0, 1.0], &[1.0, 1.0, 1.0])).is_spr);
        assert_eq!(
            is_spr(&tf(&[1.0, 1.0], &[1.0, 1.0, 1.0])).failed_condition,
            Some(SprFailure::HighFrequencyLimitNonpositive)
        );
        assert_eq!(
            is_spr(&tf(&[1.0], &[-1.0, 1.0])).failed_condition,
            Some(SprFailure::NotStable)
        );
    }

    #[test]
    fn circle_examples() {
        let g = reference_example();
        assert!(circle_certificate(&g, 4.0, 2000).unwrap().passes);
        let c = circle_certificate(&g, 3.9, 2000).unwrap();
        assert!(!c.passes && c.worst_omega > 5.3, "{c:?}");
        let g = RationalTransfer::first_order(2.0, 3.0).unwrap();
        let c = circle_certificate(&g, 1.5, 2000).unwrap();
        assert!(c.passes && c.max_violation.abs() < 1e-12, "{c:?}");
        assert!(circle_certificate(&g, 0.0, 10).is_err());
    }

    #[test]
    fn iqc_examples() {
        assert_eq!(iqc_matrix(4.0).unwrap(), [[0.0, 2.0], [2.0, -1.0]]);
        assert_eq!(iqc_matrix(2.0).unwrap(), [[0.0, 1.0], [1.0, -1.0]]);
        assert_eq!(quadratic_form(&iqc_matrix(4.0).unwrap(), 1.0, 1.0), 3.0);
        assert!(iqc_matrix(-1.0).is_err());
    }
}
