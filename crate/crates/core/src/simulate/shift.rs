//! Moving a nonzero steady state of an inhibitory feedback loop to the origin.
//!
//! The loop `ẋ = Ax + Bu`, `u = M/(K + Cx)` is rewritten in `z = x - x*` as the
//! same linear system in cascade with the Michaelis–Menten block
//! `ℓ(r) = V r/(K + r* + r)`, `V = M/(K + r*)`, `r* = Cx*`, closed by unity
//! negative feedback.

use super::block::{BlockInstance, BlockKind, LinearBlockSS};
use super::SimError;
use crate::passivity::StaticNonlinearity;

/// Residual of `f(x*, -h(x*))` accepted as an equilibrium.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSystem {
    ss: LinearBlockSS,
    m: f64,
    k: f64,
    x_star: Vec<f64>,
    r_star: f64,
    nonlinearity: StaticNonlinearity,
    residual: f64,
}

fn check_mk(m: f64, k: f64) -> Result<(), SimError> {
    for (name, v) in [("M", m), ("K", k)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(SimError::InvalidParameter { name, value: v });
        }
    }
    Ok(())
}

/// Steady state of `ẋ = Ax + B·M/(K + Cx)` for Hurwitz `A`. Writing
/// `g₀ = -CA⁻¹B`, the output `r* = Cx*` solves `r² + Kr - g₀M = 0`, so
/// `r* = (-K + √(K² + 4g₀M))/2` and `x* = -A⁻¹B·M/(K + r*)`.
pub fn equilibrium(ss: &LinearBlockSS, m: f64, k: f64) -> Result<Vec<f64>, SimError> {
    check_mk(m, k)?;
    if !ss.is_hurwitz() {
        return Err(SimError::NotHurwitz);
    }
    let a_inv_b = ss.a().clone().lu().solve(ss.b()).ok_or(SimError::NotHurwitz)?;
    let g0 = -ss.c().dot(&a_inv_b);
    let disc = k * k + 4.0 * g0 * m;
    if disc < 0.0 {
        return Err(SimError::NoEquilibrium);
    }
    let r = 0.5 * (disc.sqrt() - k);
    let u = m / (k + r);
    Ok(a_inv_b.iter().map(|v| -v * u).collect())
}

impl ShiftedSystem {
    pub fn ss(&self) -> &LinearBlockSS {
        &self.ss
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    /// `Cx*`, the offset `a` of the shifted nonlinearity.
    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `ℓ(r) = V r/(K + r* + r)` on `r ≥ -r*`.
    pub fn nonlinearity(&self) -> StaticNonlinearity {
        self.nonlinearity
    }

    /// `V = M/(K + r*)`
    pub fn v(&self) -> f64 {
        self.m / (self.k + self.r_star)
    }

    /// Secant gain of the shifted static block, `V/K`.
    pub fn secant_gain(&self) -> f64 {
        self.nonlinearity.static_gain()
    }

    /// Slope of the shifted static block at the origin, `V/(K + r*) = M/(K + r*)²`.
    pub fn incremental_gain(&self) -> f64 {
        self.nonlinearity.incremental_gain()
    }

    /// `h(x) = -M/(K + Cx)`
    pub fn h(&self, x: &[f64]) -> f64 {
        -self.m / (self.k + self.ss.output(x))
    }

    /// `ℓ(z) = h(z + x*) - h(x*)`
    pub fn ell(&self, z: &[f64]) -> f64 {
        let x: Vec<f64> = z.iter().zip(&self.x_star).map(|(z, s)| z + s).collect();
        self.h(&x) - self.h(&self.x_star)
    }

    /// `g(z, v) = f(z + x*, v - h(x*))`
    pub fn g(&self, z: &[f64], v: f64) -> Vec<f64> {
        let x: Vec<f64> = z.iter().zip(&self.x_star).map(|(z, s)| z + s).collect();
        self.ss.rhs(&x, v - self.h(&self.x_star))
    }

    /// The original loop as a single block started at `x0`.
    pub fn original_loop(&self, x0: Vec<f64>) -> Result<Vec<BlockInstance>, SimError> {
        let kind = BlockKind::InhibitoryOutput {
            ss: self.ss.clone(),
            m: self.m,
            k: self.k,
        };
        Ok(vec![BlockInstance::with_state(kind, x0)?])
    }

    /// The shifted loop, linear block then `ℓ`, started at `z0`.
    pub fn shifted_loop(&self, z0: Vec<f64>) -> Result<Vec<BlockInstance>, SimError> {
        Ok(vec![
            BlockInstance::with_state(BlockKind::Linear(self.ss.clone()), z0)?,
            BlockInstance::static_map(self.nonlinearity),
        ])
    }
}

/// Verifies `x*` is a steady state with `Cx* ≥ 0` and builds the shifted system.
pub fn shift_equilibrium(ss: &LinearBlockSS, x_star: &[f64], m: f64, k: f64) -> Result<ShiftedSystem, SimError> {
    check_mk(m, k)?;
    if x_star.len() != ss.order() {
        return Err(SimError::StateDimension {
            expected: ss.order(),
            got: x_star.len(),
        });
    }
    let r_star = ss.output(x_star);
    if r_star.is_nan() || r_star < 0.0 {
        return Err(SimError::InvalidParameter {
            name: "C x*",
            value: r_star,
        });
    }
    let u = m / (k + r_star);
    let f = ss.rhs(x_star, u);
    let scale = 1.0 + u.abs() + x_star.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    let residual = f.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    if residual > EQUILIBRIUM_TOL * scale {
        return Err(SimError::NotEquilibrium { residual });
    }
    let v = m / (k + r_star);
    Ok(ShiftedSystem {
        ss: ss.clone(),
        m,
        k,
        x_star: x_star.to_vec(),
        r_star,
        nonlinearity: StaticNonlinearity::MichaelisMenten { v, k, a: r_star },
        residual,
    })
}
