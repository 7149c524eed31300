//! Test inputs.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::{Signal, SimError};

/// Sinusoid count in [`random_multisine`].
pub const MULTISINE_TERMS: usize = 8;

pub fn step(dt: f64, t_end: f64, amplitude: f64) -> Result<Signal, SimError> {
    Signal::from_fn(dt, t_end, |_| amplitude)
}

/// `amplitude` on `[0, width)`, zero afterwards.
pub fn pulse(dt: f64, t_end: f64, amplitude: f64, width: f64) -> Result<Signal, SimError> {
    Signal::from_fn(dt, t_end, |t| if t < width - 1e-9 * dt { amplitude } else { 0.0 })
}

/// Sum of sinusoids with log-uniform frequencies in `[1e-2, 1e2]` rad/s,
/// standard normal amplitudes and uniform phases.
pub fn random_multisine<R: Rng + ?Sized>(rng: &mut R, dt: f64, t_end: f64) -> Result<Signal, SimError> {
    let logw = Uniform::new(-2.0_f64, 2.0).expect("valid range");
    let phase = Uniform::new(0.0, 2.0 * PI).expect("valid range");
    let terms: Vec<(f64, f64, f64)> = (0..MULTISINE_TERMS)
        .map(|_| {
            let w = 10f64.powf(logw.sample(rng));
            let a: f64 = rng.sample(StandardNormal);
            (w, a, phase.sample(rng))
        })
        .collect();
    Signal::from_fn(dt, t_end, |t| terms.iter().map(|(w, a, p)| a * (w * t + p).sin()).sum())
}

/// Linear sweep from `w0` to `w1` rad/s over the horizon. `taper` is the
/// fraction of the horizon at each end shaped by a raised cosine.
pub fn chirp(dt: f64, t_end: f64, w0: f64, w1: f64, amplitude: f64, taper: f64) -> Result<Signal, SimError> {
    if !(0.0..=0.5).contains(&taper) {
        return Err(SimError::InvalidParameter {
            name: "taper",
            value: taper,
        });
    }
    let edge = taper * t_end;
    Signal::from_fn(dt, t_end, |t| {
        let phase = w0 * t + 0.5 * (w1 - w0) * t * t / t_end;
        let d = t.min(t_end - t);
        let win = if edge > 0.0 && d < edge {
            0.5 * (1.0 - (PI * d / edge).cos())
        } else {
            1.0
        };
        amplitude * win * phase.sin()
    })
}
