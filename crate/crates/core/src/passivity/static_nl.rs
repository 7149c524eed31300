use serde::{Deserialize, Serialize};

use super::PassivityError;

/// Memoryless blocks `y(t) = ℓ(u(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StaticNonlinearity {
    /// `ℓ(r) = V r / (K + a + r)` on `r ∈ [-a, ∞)`.
    MichaelisMenten { v: f64, k: f64, a: f64 },
    /// `ℓ(r) = k r`
    LinearGain { k: f64 },
}

fn positive(name: &'static str, x: f64) -> Result<(), PassivityError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(PassivityError::InvalidParameter { name, value: x })
    }
}

impl StaticNonlinearity {
    pub fn michaelis_menten(v: f64, k: f64, a: f64) -> Result<Self, PassivityError> {
        positive("V", v)?;
        positive("K", k)?;
        positive("a", a)?;
        Ok(StaticNonlinearity::MichaelisMenten { v, k, a })
    }

    pub fn linear_gain(k: f64) -> Result<Self, PassivityError> {
        positive("k", k)?;
        Ok(StaticNonlinearity::LinearGain { k })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            StaticNonlinearity::MichaelisMenten { v, k, a } => v * r / (k + a + r),
            StaticNonlinearity::LinearGain { k } => k * r,
        }
    }

    /// Slope at the origin.
    pub fn incremental_gain(&self) -> f64 {
        match *self {
            StaticNonlinearity::MichaelisMenten { v, k, a } => v / (k + a),
            StaticNonlinearity::LinearGain { k } => k,
        }
    }

    /// Smallest admissible input value.
    pub fn domain_min(&self) -> f64 {
        match *self {
            StaticNonlinearity::MichaelisMenten { a, .. } => -a,
            StaticNonlinearity::LinearGain { .. } => f64::NEG_INFINITY,
        }
    }

    pub fn static_gain(&self) -> f64 {
        static_gain(self)
    }
}

/// Secant gain of a static sector block: `V/K` for Michaelis–Menten, since
/// `K + a + r ≥ K` on the domain gives `ℓ(r)² ≤ (V/K) r ℓ(r)`; `k` for a
/// linear gain. The Michaelis–Menten value is a supremum approached as the
/// input concentrates near `-a`.
pub fn static_gain(nl: &StaticNonlinearity) -> f64 {
    match *nl {
        StaticNonlinearity::MichaelisMenten { v, k, .. } => v / k,
        StaticNonlinearity::LinearGain { k } => k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gains() {
        assert_eq!(
            static_gain(&StaticNonlinearity::michaelis_menten(2.0, 1.0, 0.5).unwrap()),
            2.0
        );
        assert_eq!(static_gain(&StaticNonlinearity::linear_gain(3.0).unwrap()), 3.0);
        assert_eq!(
            static_gain(&StaticNonlinearity::michaelis_menten(1.0, 4.0, 1.0).unwrap()),
            0.25
        );
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(StaticNonlinearity::michaelis_menten(0.0, 1.0, 1.0).is_err());
        assert!(StaticNonlinearity::michaelis_menten(1.0, -1.0, 1.0).is_err());
        assert!(StaticNonlinearity::linear_gain(f64::NAN).is_err());
    }

    #[test]
    fn sector_inequality_on_dense_grid() {
        for &(v, k, a) in &[(2.0, 1.0, 0.5), (1.0, 4.0, 1.0), (3.0, 0.2, 5.0)] {
            let nl = StaticNonlinearity::michaelis_menten(v, k, a).unwrap();
            let g = static_gain(&nl);
            let n = 200_000;
            for i in 0..=n {
                // log-spaced offsets from -a up to 1e6
                let t = i as f64 / n as f64;
                let r = -a + (1e6_f64 + a).powf(t) - 1.0;
                let l = nl.eval(r);
                assert!(l * l <= g * r * l + 1e-12, "r={r} l={l}");
            }
        }
    }
}
