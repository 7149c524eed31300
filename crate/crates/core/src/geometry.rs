//! Angles between chained vectors.
//!
//! A chain `v₀, …, vₙ` with `⟨vᵢ₋₁, vᵢ⟩ ≥ 0` and `vₙ = -v₀` must turn through
//! a total angle of at least π, so by convexity of `-ln cos` on `[0, π/2)`
//! the cosines satisfy `∏ cos θᵢ ≤ cos(π/n)ⁿ`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("a chain needs at least one vector before the closing one")]
    TooShort,
    #[error("vectors must have dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("vector {index} is zero")]
    ZeroVector { index: usize },
    #[error("vector {index} has a non-finite entry")]
    NonFinite { index: usize },
    #[error("inner product of vectors {} and {index} is negative ({value})", .index - 1)]
    NegativeInnerProduct { index: usize, value: f64 },
    #[error("angle {index} = {value} lies outside [0, π/2)")]
    AngleOutOfDomain { index: usize, value: f64 },
}

pub fn dot(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Cosine of the angle between `v` and `w`, clamped to `[-1, 1]`; zero when
/// either vector vanishes.
pub fn cos_angle(v: &[f64], w: &[f64]) -> f64 {
    let n = norm(v) * norm(w);
    if n == 0.0 {
        0.0
    } else {
        (dot(v, w) / n).clamp(-1.0, 1.0)
    }
}

/// Angle in `[0, π]`; zero when either vector vanishes.
pub fn angle(v: &[f64], w: &[f64]) -> f64 {
    if norm(v) == 0.0 || norm(w) == 0.0 {
        0.0
    } else {
        cos_angle(v, w).acos()
    }
}

/// Relative slack on `⟨vᵢ₋₁, vᵢ⟩ ≥ 0` so that orthogonal pairs survive rounding.
pub const ORTHOGONAL_TOL: f64 = 1e-12;

/// Vectors `v₀, …, vₙ` with `vₙ = -v₀` and nonnegative consecutive inner
/// products.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorChain {
    vectors: Vec<Vec<f64>>,
}

impl VectorChain {
    /// Builds the chain from `v₀, …, vₙ₋₁`, appending `vₙ = -v₀`.
    pub fn from_prefix(prefix: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let first = prefix.first().ok_or(GeometryError::TooShort)?;
        let closing = first.iter().map(|x| -x).collect();
        let mut vectors = prefix;
        vectors.push(closing);
        Self::validate(&vectors)?;
        Ok(VectorChain { vectors })
    }

    fn validate(vectors: &[Vec<f64>]) -> Result<(), GeometryError> {
        let d = vectors[0].len();
        if d < 2 {
            return Err(GeometryError::DimensionTooSmall(d));
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(GeometryError::DimensionMismatch {
                    index,
                    expected: d,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GeometryError::NonFinite { index });
            }
            if v.iter().all(|&x| x == 0.0) {
                return Err(GeometryError::ZeroVector { index });
            }
            if index > 0 {
                let value = dot(&vectors[index - 1], v);
                if value < -ORTHOGONAL_TOL * norm(&vectors[index - 1]) * norm(v) {
                    return Err(GeometryError::NegativeInnerProduct { index, value });
                }
            }
        }
        Ok(())
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// `θᵢ = θ(vᵢ₋₁, vᵢ)` for `i = 1…n`, each in `[0, π/2]`.
    pub fn angles(&self) -> Vec<f64> {
        self.vectors.windows(2).map(|w| angle(&w[0], &w[1])).collect()
    }

    /// Each vector multiplied by its own positive factor.
    pub fn rescaled(&self, factors: &[f64]) -> Result<Self, GeometryError> {
        let vectors: Vec<Vec<f64>> = self
            .vectors
            .iter()
            .zip(factors.iter().chain(std::iter::repeat(&1.0)))
            .map(|(v, &s)| v.iter().map(|x| x * s.abs()).collect())
            .collect();
        Self::validate(&vectors)?;
        Ok(VectorChain { vectors })
    }
}

/// `∏ cos θᵢ` over consecutive pairs of arbitrary vectors, without the chain
/// invariants; negative cosines are kept.
pub fn cosine_product(vectors: &[Vec<f64>]) -> f64 {
    vectors.windows(2).map(|w| cos_angle(&w[0], &w[1])).product()
}

/// `∏ cos θᵢ`, bounded above by `cos(π/n)ⁿ`.
pub fn chain_cosine_product(chain: &VectorChain) -> f64 {
    cosine_product(&chain.vectors)
}

/// `cos(π/n)ⁿ`
pub fn cosine_bound(n: usize) -> f64 {
    (PI / n as f64).cos().powi(n as i32)
}

/// `∑ θᵢ`, at least `θ(v₀, vₙ) = π`.
pub fn angle_sum_lower_bound(chain: &VectorChain) -> f64 {
    chain.angles().iter().sum()
}

/// `(∏ cos θᵢ, cos(mean θ)ⁿ)`; the first never exceeds the second.
pub fn jensen_cos_bound(thetas: &[f64]) -> Result<(f64, f64), GeometryError> {
    if thetas.is_empty() {
        return Err(GeometryError::TooShort);
    }
    if let Some((index, &value)) = thetas.iter().enumerate().find(|(_, &t)| !(0.0..FRAC_PI_2).contains(&t)) {
        return Err(GeometryError::AngleOutOfDomain { index, value });
    }
    let n = thetas.len();
    let lhs = thetas.iter().map(|t| t.cos()).product();
    let mean = thetas.iter().sum::<f64>() / n as f64;
    Ok((lhs, mean.cos().powi(n as i32)))
}

fn unit_gaussian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random chain of `n` steps in dimension `d`.
///
/// `v₀` is uniform on the sphere and each later prefix vector is uniform on
/// the hemisphere around its predecessor (a uniform draw reflected through
/// the origin when it lands on the wrong side, which has the same law as
/// resampling). Chains whose closing step has negative inner product are
/// discarded. For `n = 2` the closing condition forces `⟨v₀, v₁⟩ = 0`, so
/// `v₁` is drawn uniformly on the great sphere orthogonal to `v₀`.
pub fn sample_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Result<VectorChain, GeometryError> {
    if n < 1 {
        return Err(GeometryError::TooShort);
    }
    if d < 2 {
        return Err(GeometryError::DimensionTooSmall(d));
    }
    if n == 1 {
        // v₁ = -v₀ has negative inner product with v₀: no chain of one step exists.
        return Err(GeometryError::TooShort);
    }
    loop {
        let v0 = unit_gaussian(rng, d);
        let mut prefix = vec![v0.clone()];
        if n == 2 {
            let mut w = unit_gaussian(rng, d);
            let c = dot(&w, &v0);
            w.iter_mut().zip(&v0).for_each(|(x, y)| *x -= c * y);
            if norm(&w) < 1e-6 {
                continue;
            }
            prefix.push(w);
        } else {
            for _ in 1..n {
                let mut w = unit_gaussian(rng, d);
                if dot(prefix.last().expect("nonempty"), &w) < 0.0 {
                    w.iter_mut().for_each(|x| *x = -*x);
                }
                prefix.push(w);
            }
        }
        if let Ok(chain) = VectorChain::from_prefix(prefix) {
            return Ok(chain);
        }
    }
}
