use std::io::{Read, Write};

use super::SimError;

/// Uniformly sampled signal on `[0, (len-1)·dt]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    dt: f64,
}

/// CSV sample times may deviate from the uniform grid by this fraction of `dt`.
const CSV_DT_TOL: f64 = 1e-3;

impl Signal {
    pub fn new(samples: Vec<f64>, dt: f64) -> Result<Self, SimError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidStep(dt));
        }
        if samples.len() < 2 {
            return Err(SimError::TooShort(samples.len()));
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(SimError::NonFiniteSample { index });
        }
        Ok(Signal { samples, dt })
    }

    /// Samples `f` at `0, dt, …` up to the last grid point not beyond `t_end`.
    pub fn from_fn(dt: f64, t_end: f64, f: impl Fn(f64) -> f64) -> Result<Self, SimError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidStep(dt));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(SimError::InvalidHorizon(t_end));
        }
        let n = (t_end / dt + 1e-9).floor() as usize + 1;
        Self::new((0..n).map(|i| f(i as f64 * dt)).collect(), dt)
    }

    pub fn zeros(dt: f64, t_end: f64) -> Result<Self, SimError> {
        Self::from_fn(dt, t_end, |_| 0.0)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn last(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Linear interpolation, held constant outside the sampled range.
    pub fn at(&self, t: f64) -> f64 {
        let x = t / self.dt;
        if x <= 0.0 {
            return self.samples[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= self.samples.len() {
            return self.last();
        }
        let f = x - i as f64;
        self.samples[i] * (1.0 - f) + self.samples[i + 1] * f
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Signal, SimError> {
        Signal::new(self.samples.iter().map(|&x| f(x)).collect(), self.dt)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "value"])?;
        for (i, v) in self.samples.iter().enumerate() {
            out.write_record([format!("{}", self.time(i)), format!("{v}")])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads `t,value` rows. Times must start at 0 and be uniformly spaced.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
            return Err(SimError::Csv("header must be \"t,value\"".into()));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(SimError::Csv(format!("row {}: expected 2 fields", row + 1)));
            }
            let parse = |s: &str| -> Result<f64, SimError> {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| SimError::Csv(format!("row {}: bad number {s:?}", row + 1)))
            };
            times.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        if times.len() < 2 {
            return Err(SimError::TooShort(times.len()));
        }
        let n = times.len();
        let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
        if dt.is_nan() || dt <= 0.0 || times[0].abs() > CSV_DT_TOL * dt {
            return Err(SimError::Csv("times must start at 0 and increase".into()));
        }
        for (i, &t) in times.iter().enumerate() {
            if (t - i as f64 * dt).abs() > CSV_DT_TOL * dt {
                return Err(SimError::Csv(format!("row {}: nonuniform spacing", i + 1)));
            }
        }
        Signal::new(values, dt)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, SimError> {
        Self::read_csv(text.as_bytes())
    }
}

fn check_horizon(y: &Signal, t: f64) -> Result<(), SimError> {
    if !(t.is_finite() && t >= 0.0) || t > y.duration() * (1.0 + 1e-12) + 1e-12 {
        return Err(SimError::HorizonExceeded {
            t,
            duration: y.duration(),
        });
    }
    Ok(())
}

/// Trapezoidal `∫₀ᵀ f g` over sample products, with the last partial
/// interval integrated against the interpolated endpoint.
fn trapezoid_t(f: &[f64], g: &[f64], dt: f64, t: f64) -> f64 {
    let x = (t / dt).max(0.0);
    let full = (x.floor() as usize).min(f.len() - 1);
    let mut s = 0.0;
    for i in 0..full {
        s += 0.5 * (f[i] * g[i] + f[i + 1] * g[i + 1]);
    }
    s *= dt;
    let frac = x - full as f64;
    if frac > 1e-12 && full + 1 < f.len() {
        let fe = f[full] * (1.0 - frac) + f[full + 1] * frac;
        let ge = g[full] * (1.0 - frac) + g[full + 1] * frac;
        s += 0.5 * (f[full] * g[full] + fe * ge) * frac * dt;
    }
    s
}

pub fn l2_norm_sq_t(y: &Signal, t: f64) -> Result<f64, SimError> {
    check_horizon(y, t)?;
    Ok(trapezoid_t(&y.samples, &y.samples, y.dt, t))
}

/// `‖y‖_T`
pub fn l2_norm_t(y: &Signal, t: f64) -> Result<f64, SimError> {
    Ok(l2_norm_sq_t(y, t)?.sqrt())
}

fn check_pair(u: &Signal, y: &Signal) -> Result<(), SimError> {
    if (u.dt - y.dt).abs() > 1e-12 * u.dt.max(y.dt) {
        return Err(SimError::StepMismatch(u.dt, y.dt));
    }
    Ok(())
}

/// `⟨u, y⟩_T`
pub fn inner_product_t(u: &Signal, y: &Signal, t: f64) -> Result<f64, SimError> {
    check_pair(u, y)?;
    check_horizon(u, t)?;
    check_horizon(y, t)?;
    Ok(trapezoid_t(&u.samples, &y.samples, u.dt, t))
}

/// `θ_T(u, y)`, zero when either truncated norm vanishes.
pub fn angle_t(u: &Signal, y: &Signal, t: f64) -> Result<f64, SimError> {
    let ip = inner_product_t(u, y, t)?;
    let n = l2_norm_t(u, t)? * l2_norm_t(y, t)?;
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok((ip / n).clamp(-1.0, 1.0).acos())
}
