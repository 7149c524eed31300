use serde::{Deserialize, Serialize};

use super::block::BlockInstance;
use super::run::{simulate_closed_loop, simulate_open_loop};
use super::signal::{angle_t, inner_product_t, l2_norm_sq_t, l2_norm_t};
use super::{Signal, SimError};

/// Relative discretization slack on empirical OSP checks: `ε = 1e-6·(1 + ‖u‖²_T)`.
pub const OSP_SLACK: f64 = 1e-6;

/// Truncations with `‖u‖_T` below this are skipped in gain ratios.
pub const NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OspReport {
    pub gamma: f64,
    pub checks: usize,
    pub violations: usize,
    pub passes: bool,
    /// Smallest `γ⟨u,y⟩_T + ε - ‖y‖²_T` seen; negative means a violation.
    pub worst_margin: f64,
    pub worst_input: usize,
    pub worst_t: f64,
    /// The angle form `‖y‖_T ≤ γ‖u‖_T cos θ_T(u,y)` gave the same verdict on
    /// every `(input, T)` pair.
    pub angle_form_agrees: bool,
    pub angle_form_disagreements: usize,
}

/// Drives the block from rest with each input and checks
/// `‖y‖²_T ≤ γ⟨u,y⟩_T + ε` at every `T` in the grid.
pub fn verify_osp_empirically(
    block: &BlockInstance,
    gamma: f64,
    inputs: &[Signal],
    t_grid: &[f64],
) -> Result<OspReport, SimError> {
    let rest = block.zeroed();
    let mut report = OspReport {
        gamma,
        checks: 0,
        violations: 0,
        passes: true,
        worst_margin: f64::INFINITY,
        worst_input: 0,
        worst_t: 0.0,
        angle_form_agrees: true,
        angle_form_disagreements: 0,
    };
    for (idx, u) in inputs.iter().enumerate() {
        let y = simulate_open_loop(&rest, u)?;
        for &t in t_grid {
            let uu = l2_norm_sq_t(u, t)?;
            let yy = l2_norm_sq_t(&y, t)?;
            let uy = inner_product_t(u, &y, t)?;
            let eps = OSP_SLACK * (1.0 + uu);
            let margin = gamma * uy + eps - yy;
            let holds = margin >= 0.0;

            let ny = yy.sqrt();
            let angle_holds = ny == 0.0 || ny <= gamma * uu.sqrt() * angle_t(u, &y, t)?.cos() + eps / ny;
            if angle_holds != holds {
                report.angle_form_disagreements += 1;
            }

            report.checks += 1;
            if !holds {
                report.violations += 1;
            }
            if margin < report.worst_margin {
                report.worst_margin = margin;
                report.worst_input = idx;
                report.worst_t = t;
            }
        }
    }
    report.passes = report.violations == 0;
    report.angle_form_agrees = report.angle_form_disagreements == 0;
    Ok(report)
}

/// `max_T ‖yₙ‖_T/‖u‖_T` for the closed loop from rest; `None` when every
/// truncation of `u` is negligible.
pub fn empirical_gain_ratio(blocks: &[BlockInstance], u: &Signal, t_grid: &[f64]) -> Result<Option<f64>, SimError> {
    let ys = simulate_closed_loop(blocks, u, true)?;
    gain_ratio_of(ys.last().expect("at least one block"), u, t_grid)
}

/// `max_T ‖y‖_T/‖u‖_T` for an existing response.
pub fn gain_ratio_of(y: &Signal, u: &Signal, t_grid: &[f64]) -> Result<Option<f64>, SimError> {
    let mut best: Option<f64> = None;
    for &t in t_grid {
        let nu = l2_norm_t(u, t)?;
        if nu < NORM_FLOOR {
            continue;
        }
        let r = l2_norm_t(y, t)? / nu;
        best = Some(best.map_or(r, |b| b.max(r)));
    }
    Ok(best)
}

/// Realized angle quantities of one closed-loop run at horizon `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopDiagnostics {
    pub t: f64,
    /// `θ_T(yᵢ₋₁, yᵢ)` for `i = 1…n` with `y₀ = -yₙ`.
    pub angles: Vec<f64>,
    /// `γ₁⋯γₙ cos θ₂ ⋯ cos θₙ`
    pub alpha: f64,
    /// `α cos θ₁`
    pub kappa: f64,
    /// `α/(1-κ)` when `κ < 1`.
    pub bound: Option<f64>,
}

pub fn loop_diagnostics(gains: &[f64], outputs: &[Signal], t: f64) -> Result<LoopDiagnostics, SimError> {
    if outputs.is_empty() || gains.len() != outputs.len() {
        return Err(SimError::NoBlocks);
    }
    let y0 = outputs[outputs.len() - 1].map(|v| -v)?;
    let mut angles = Vec::with_capacity(outputs.len());
    let mut prev = &y0;
    for y in outputs {
        angles.push(angle_t(prev, y, t)?);
        prev = y;
    }
    let alpha = gains.iter().product::<f64>() * angles[1..].iter().map(|a| a.cos()).product::<f64>();
    let kappa = alpha * angles[0].cos();
    Ok(LoopDiagnostics {
        t,
        angles,
        alpha,
        kappa,
        bound: (kappa < 1.0).then(|| alpha / (1.0 - kappa)),
    })
}
