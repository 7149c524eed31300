use super::block::{BlockInstance, Network};
use super::{Signal, SimError};

/// Default integration step in seconds.
pub const DEFAULT_DT: f64 = 1e-3;

/// Any state component beyond this magnitude aborts the run.
pub const BLOWUP_LIMIT: f64 = 1e12;

/// Block outputs `y₁ … yₙ` and, when requested, the stacked state at every sample.
#[derive(Debug, Clone)]
pub struct ClosedLoopRun {
    pub outputs: Vec<Signal>,
    pub states: Vec<Vec<f64>>,
}

/// Classical RK4 at the input's sample step. The input is linearly
/// interpolated at the midpoint stages; static maps are evaluated inside
/// every stage.
fn integrate(net: &Network, u: &Signal, x0: Vec<f64>, record: bool) -> Result<ClosedLoopRun, SimError> {
    let h = u.dt();
    let us = u.samples();
    let m = us.len();
    let d = net.dim();
    let nb = net.len();
    let mut ys = vec![Vec::with_capacity(m); nb];
    let mut states = Vec::new();
    let mut x = x0;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    let mut outs = vec![0.0; nb];
    let mut scratch = vec![0.0; nb];
    for i in 0..m {
        net.eval(&x, us[i], &mut k1, &mut outs)?;
        for (y, &o) in ys.iter_mut().zip(&outs) {
            y.push(o);
        }
        if record {
            states.push(x.clone());
        }
        if i + 1 == m {
            break;
        }
        let (u1, um) = (us[i + 1], 0.5 * (us[i] + us[i + 1]));
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * h * k1[j];
        }
        net.eval(&tmp, um, &mut k2, &mut scratch)?;
        for j in 0..d {
            tmp[j] = x[j] + 0.5 * h * k2[j];
        }
        net.eval(&tmp, um, &mut k3, &mut scratch)?;
        for j in 0..d {
            tmp[j] = x[j] + h * k3[j];
        }
        net.eval(&tmp, u1, &mut k4, &mut scratch)?;
        let mut worst = 0.0_f64;
        for j in 0..d {
            x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            worst = worst.max(x[j].abs());
            if !x[j].is_finite() {
                worst = f64::INFINITY;
            }
        }
        if worst > BLOWUP_LIMIT {
            return Err(SimError::BlowUp {
                time: u.time(i + 1),
                max_abs: worst,
            });
        }
    }
    let outputs = ys
        .into_iter()
        .map(|y| Signal::new(y, h))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClosedLoopRun { outputs, states })
}

/// Unity negative feedback `e = u - yₙ` around the cascade. With `zero_init`
/// every block starts at rest; otherwise each block's stored state is used.
pub fn simulate_closed_loop(blocks: &[BlockInstance], u: &Signal, zero_init: bool) -> Result<Vec<Signal>, SimError> {
    let net = Network::new(blocks, true)?;
    Ok(integrate(&net, u, net.initial_state(zero_init), false)?.outputs)
}

/// As [`simulate_closed_loop`], also recording the stacked block states.
pub fn simulate_closed_loop_states(
    blocks: &[BlockInstance],
    u: &Signal,
    zero_init: bool,
) -> Result<ClosedLoopRun, SimError> {
    let net = Network::new(blocks, true)?;
    integrate(&net, u, net.initial_state(zero_init), true)
}

/// Response of a single block to `u` from its stored state.
pub fn simulate_open_loop(block: &BlockInstance, u: &Signal) -> Result<Signal, SimError> {
    let blocks = std::slice::from_ref(block);
    let net = Network::new(blocks, false)?;
    let mut run = integrate(&net, u, net.initial_state(false), false)?;
    Ok(run.outputs.pop().expect("one block"))
}

/// Outputs of every block in an open cascade driven by `u`.
pub fn simulate_open_cascade(blocks: &[BlockInstance], u: &Signal) -> Result<Vec<Signal>, SimError> {
    let net = Network::new(blocks, false)?;
    Ok(integrate(&net, u, net.initial_state(false), false)?.outputs)
}
