//! Fixed-step simulation of block cascades and truncated L² functionals.

mod analysis;
mod block;
pub mod inputs;
mod run;
mod scenario;
mod shift;
mod signal;

use thiserror::Error;

use crate::cascade::CascadeError;

pub use analysis::{
    empirical_gain_ratio, gain_ratio_of, loop_diagnostics, verify_osp_empirically, LoopDiagnostics, OspReport,
    NORM_FLOOR, OSP_SLACK,
};
pub use block::{BlockInstance, BlockKind, LinearBlockSS};
pub use run::{
    simulate_closed_loop, simulate_closed_loop_states, simulate_open_cascade, simulate_open_loop, ClosedLoopRun,
    BLOWUP_LIMIT, DEFAULT_DT,
};
pub use scenario::{InputSpec, Scenario, MAX_STEPS};
pub use shift::{equilibrium, shift_equilibrium, ShiftedSystem, EQUILIBRIUM_TOL};
pub use signal::{angle_t, inner_product_t, l2_norm_sq_t, l2_norm_t, Signal};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("a signal needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("T = {t} exceeds the signal duration {duration}")]
    HorizonExceeded { t: f64, duration: f64 },
    #[error("sample steps differ: {0} vs {1}")]
    StepMismatch(f64, f64),
    #[error("signal CSV: {0}")]
    Csv(String),
    #[error("no blocks to simulate")]
    NoBlocks,
    #[error("a loop of static blocks alone has no dynamics")]
    AlgebraicLoop,
    #[error("state has dimension {got}, expected {expected}")]
    StateDimension { expected: usize, got: usize },
    #[error("invalid realization: {0}")]
    InvalidRealization(String),
    #[error("{name} = {value} is out of range")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("state exceeded {BLOWUP_LIMIT:e} in magnitude at t = {time} (max |x| = {max_abs:e})")]
    BlowUp { time: f64, max_abs: f64 },
    #[error("static map evaluated outside its domain at input {value}")]
    Domain { value: f64 },
    #[error("A is not Hurwitz")]
    NotHurwitz,
    #[error("no nonnegative steady state exists")]
    NoEquilibrium,
    #[error("not an equilibrium: residual {residual:e}")]
    NotEquilibrium { residual: f64 },
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Cascade(#[from] CascadeError),
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Csv(e.to_string())
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Csv(e.to_string())
    }
}
