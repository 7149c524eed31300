//! Simulation scenarios: a cascade in the block JSON schema plus an input
//! description, step and horizon.
//!
//! ```json
//! {"blocks": [{"type": "rational", "num": [1.9], "den": [1, 1]}],
//!  "input": {"type": "pulse", "amplitude": 1, "width": 1},
//!  "dt": 0.001, "T": 20}
//! ```

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::block::BlockInstance;
use super::inputs::{chirp, pulse, random_multisine, step};
use super::run::DEFAULT_DT;
use super::{Signal, SimError};
use crate::cascade::{CascadeBlock, CascadeSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSpec {
    Zero,
    Step {
        amplitude: f64,
    },
    Pulse {
        amplitude: f64,
        width: f64,
    },
    Chirp {
        w0: f64,
        w1: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        taper: f64,
    },
    Multisine {
        seed: u64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: CascadeSpec,
    pub input: InputSpec,
    pub dt: f64,
    pub t_end: f64,
}

/// Simulations longer than this many steps are refused.
pub const MAX_STEPS: f64 = 5e7;

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let mut v: Value = serde_json::from_str(text).map_err(|e| SimError::Scenario(e.to_string()))?;
        let obj = v
            .as_object_mut()
            .ok_or_else(|| SimError::Scenario("expected a JSON object".into()))?;
        let input = obj
            .remove("input")
            .ok_or_else(|| SimError::Scenario("missing \"input\"".into()))?;
        let input: InputSpec = serde_json::from_value(input).map_err(|e| SimError::Scenario(e.to_string()))?;
        let number = |obj: &mut serde_json::Map<String, Value>, key: &str| -> Result<Option<f64>, SimError> {
            match obj.remove(key) {
                None => Ok(None),
                Some(x) => x
                    .as_f64()
                    .map(Some)
                    .ok_or_else(|| SimError::Scenario(format!("\"{key}\" must be a number"))),
            }
        };
        let dt = number(obj, "dt")?.unwrap_or(DEFAULT_DT);
        let t_end = number(obj, "T")?.ok_or_else(|| SimError::Scenario("missing \"T\"".into()))?;
        let spec = CascadeSpec::from_json(&v.to_string())?;
        let s = Scenario { spec, input, dt, t_end };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::InvalidStep(self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(SimError::InvalidHorizon(self.t_end));
        }
        if self.t_end / self.dt > MAX_STEPS {
            return Err(SimError::Scenario(format!(
                "T/dt = {} exceeds {MAX_STEPS} steps",
                self.t_end / self.dt
            )));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match &self.input {
            InputSpec::Zero | InputSpec::Multisine { .. } => true,
            InputSpec::Step { amplitude } => finite(&[*amplitude]),
            InputSpec::Pulse { amplitude, width } => finite(&[*amplitude, *width]),
            InputSpec::Chirp {
                w0,
                w1,
                amplitude,
                taper,
            } => finite(&[*w0, *w1, *amplitude, *taper]),
        };
        if !ok {
            return Err(SimError::Scenario("non-finite input parameter".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut v: Value = serde_json::from_str(&self.spec.to_json()).expect("spec JSON");
        let obj = v.as_object_mut().expect("object");
        obj.insert("input".into(), serde_json::to_value(&self.input).expect("input JSON"));
        obj.insert("dt".into(), self.dt.into());
        obj.insert("T".into(), self.t_end.into());
        serde_json::to_string_pretty(&v).expect("scenario JSON")
    }

    pub fn input_signal(&self) -> Result<Signal, SimError> {
        let (dt, t) = (self.dt, self.t_end);
        match self.input {
            InputSpec::Zero => Signal::zeros(dt, t),
            InputSpec::Step { amplitude } => step(dt, t, amplitude),
            InputSpec::Pulse { amplitude, width } => pulse(dt, t, amplitude, width),
            InputSpec::Chirp {
                w0,
                w1,
                amplitude,
                taper,
            } => chirp(dt, t, w0, w1, amplitude, taper),
            InputSpec::Multisine { seed } => random_multisine(&mut StdRng::seed_from_u64(seed), dt, t),
        }
    }

    pub fn blocks(&self) -> Vec<BlockInstance> {
        self.spec
            .blocks()
            .iter()
            .map(|b| match b {
                CascadeBlock::Rational { tf, .. } => BlockInstance::transfer(tf),
                CascadeBlock::Static(nl) => BlockInstance::static_map(*nl),
            })
            .collect()
    }
}
