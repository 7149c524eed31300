//! Secant-condition certificates for unity negative feedback around a cascade.
//!
//! The product test compares `γ₁⋯γₙ` with `sec(π/n)ⁿ`. For linear blocks two
//! independent routes are available: the cyclic matrix / closed-loop
//! characteristic polynomial `∏qᵢ + ∏pᵢ`, checked with Routh–Hurwitz.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::passivity::{secant_gain, PassivityError, StaticNonlinearity, UnboundedReason};
use crate::poly::{routh_hurwitz, PolyError, Polynomial, RationalTransfer, StabilityVerdict};

/// Products within this relative distance of the threshold are boundary cases.
pub const BOUNDARY_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CascadeError {
    #[error("secant threshold is undefined for n = 0")]
    ZeroLength,
    #[error("cascade has no blocks")]
    Empty,
    #[error("alphas and betas differ in length ({alphas} vs {betas})")]
    LengthMismatch { alphas: usize, betas: usize },
    #[error("{name}[{index}] must be positive and finite, got {value}")]
    NonPositive {
        name: &'static str,
        index: usize,
        value: f64,
    },
    #[error("block {index} is not stable")]
    BlockNotStable { index: usize },
    #[error("block {index} has infinite secant gain ({reason:?})")]
    InfiniteGain { index: usize, reason: UnboundedReason },
    #[error("block {index}: {source}")]
    Block {
        index: usize,
        #[source]
        source: PassivityError,
    },
    #[error("block {index}: {source}")]
    BlockPoly {
        index: usize,
        #[source]
        source: PolyError,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("malformed cascade JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CascadeBlock {
    Rational {
        tf: RationalTransfer,
        /// Used in place of the computed secant gain only when the cascade
        /// has `override_gains` set.
        gain_override: Option<f64>,
    },
    Static(StaticNonlinearity),
}

impl CascadeBlock {
    pub fn rational(tf: RationalTransfer) -> Self {
        CascadeBlock::Rational {
            tf,
            gain_override: None,
        }
    }
}

/// Ordered blocks under unity negative feedback: `e = u - yₙ`, `y₁ = G₁(e)`,
/// `yᵢ = Gᵢ(yᵢ₋₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    blocks: Vec<CascadeBlock>,
    override_gains: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
enum BlockJson {
    #[serde(rename = "rational")]
    Rational {
        num: Vec<f64>,
        den: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    #[serde(rename = "mm")]
    MichaelisMenten {
        #[serde(rename = "V")]
        v: f64,
        #[serde(rename = "K")]
        k: f64,
        a: f64,
    },
    #[serde(rename = "gain")]
    Gain { k: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    blocks: Vec<BlockJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    override_gains: bool,
}

impl CascadeSpec {
    pub fn new(blocks: Vec<CascadeBlock>) -> Result<Self, CascadeError> {
        Self::with_overrides(blocks, false)
    }

    pub fn with_overrides(blocks: Vec<CascadeBlock>, override_gains: bool) -> Result<Self, CascadeError> {
        if blocks.is_empty() {
            return Err(CascadeError::Empty);
        }
        for (index, b) in blocks.iter().enumerate() {
            if let CascadeBlock::Rational { tf, gain_override } = b {
                if !tf.is_stable() {
                    return Err(CascadeError::BlockNotStable { index });
                }
                if let Some(g) = gain_override {
                    if !(g.is_finite() && *g >= 0.0) {
                        return Err(CascadeError::NonPositive {
                            name: "gamma",
                            index,
                            value: *g,
                        });
                    }
                }
            }
        }
        Ok(CascadeSpec { blocks, override_gains })
    }

    /// Cascade of identical first-order lags `β/(s+α)`.
    pub fn first_order_chain(alphas: &[f64], betas: &[f64]) -> Result<Self, CascadeError> {
        check_params(alphas, betas)?;
        let blocks = alphas
            .iter()
            .zip(betas)
            .map(|(&a, &b)| RationalTransfer::first_order(a, b).map(CascadeBlock::rational))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[CascadeBlock] {
        &self.blocks
    }

    pub fn override_gains(&self) -> bool {
        self.override_gains
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The transfer functions when every block is linear.
    pub fn linear_blocks(&self) -> Option<Vec<RationalTransfer>> {
        self.blocks
            .iter()
            .map(|b| match b {
                CascadeBlock::Rational { tf, .. } => Some(tf.clone()),
                CascadeBlock::Static(_) => None,
            })
            .collect()
    }

    /// Per-block secant gains: recomputed for rational blocks unless
    /// overrides are enabled, sector gains for static blocks.
    pub fn gains(&self) -> Result<Vec<f64>, CascadeError> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(index, b)| match b {
                CascadeBlock::Rational {
                    gain_override: Some(g), ..
                } if self.override_gains => Ok(*g),
                CascadeBlock::Rational { tf, .. } => {
                    let c = secant_gain(tf).map_err(|source| CascadeError::Block { index, source })?;
                    match c.unbounded {
                        Some(reason) => Err(CascadeError::InfiniteGain { index, reason }),
                        None => Ok(c.gamma),
                    }
                }
                CascadeBlock::Static(nl) => Ok(nl.static_gain()),
            })
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self, CascadeError> {
        let raw: SpecJson = serde_json::from_str(text)?;
        let blocks = raw
            .blocks
            .into_iter()
            .enumerate()
            .map(|(index, b)| block_from_json(index, b))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_overrides(blocks, raw.override_gains)
    }

    pub fn to_json(&self) -> String {
        let raw = SpecJson {
            blocks: self
                .blocks
                .iter()
                .map(|b| match b {
                    CascadeBlock::Rational { tf, gain_override } => BlockJson::Rational {
                        num: tf.num().coeffs().to_vec(),
                        den: tf.den().coeffs().to_vec(),
                        gamma: *gain_override,
                    },
                    CascadeBlock::Static(StaticNonlinearity::MichaelisMenten { v, k, a }) => {
                        BlockJson::MichaelisMenten { v: *v, k: *k, a: *a }
                    }
                    CascadeBlock::Static(StaticNonlinearity::LinearGain { k }) => BlockJson::Gain { k: *k },
                })
                .collect(),
            override_gains: self.override_gains,
        };
        serde_json::to_string_pretty(&raw).expect("cascade spec serializes")
    }
}

fn block_from_json(index: usize, b: BlockJson) -> Result<CascadeBlock, CascadeError> {
    let bad = |source| CascadeError::Block { index, source };
    Ok(match b {
        BlockJson::Rational { num, den, gamma } => CascadeBlock::Rational {
            tf: RationalTransfer::from_coeffs(&num, &den)
                .map_err(|source| CascadeError::BlockPoly { index, source })?,
            gain_override: gamma,
        },
        BlockJson::MichaelisMenten { v, k, a } => {
            CascadeBlock::Static(StaticNonlinearity::michaelis_menten(v, k, a).map_err(bad)?)
        }
        BlockJson::Gain { k } => CascadeBlock::Static(StaticNonlinearity::linear_gain(k).map_err(bad)?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecantVerdict {
    pub gains: Vec<f64>,
    pub product_gain: f64,
    /// `+∞` for one or two blocks.
    pub threshold: f64,
    /// `product_gain < threshold`.
    pub passes: bool,
    /// Product within [`BOUNDARY_REL_TOL`] of the threshold; the verdict
    /// there is numerically marginal either way.
    pub boundary: bool,
    /// `threshold - product_gain`.
    pub margin: f64,
}

/// `sec(π/n)ⁿ`, infinite for `n ≤ 2`.
pub fn secant_threshold(n: usize) -> Result<f64, CascadeError> {
    match n {
        0 => Err(CascadeError::ZeroLength),
        1 | 2 => Ok(f64::INFINITY),
        _ => Ok((PI / n as f64).cos().recip().powi(n as i32)),
    }
}

pub fn check_secant_condition(spec: &CascadeSpec) -> Result<SecantVerdict, CascadeError> {
    let gains = spec.gains()?;
    let product_gain: f64 = gains.iter().product();
    let threshold = secant_threshold(gains.len())?;
    let boundary = threshold.is_finite() && (product_gain - threshold).abs() <= BOUNDARY_REL_TOL * threshold;
    Ok(SecantVerdict {
        gains,
        product_gain,
        threshold,
        passes: product_gain < threshold,
        boundary,
        margin: threshold - product_gain,
    })
}

fn check_params(alphas: &[f64], betas: &[f64]) -> Result<(), CascadeError> {
    if alphas.len() != betas.len() {
        return Err(CascadeError::LengthMismatch {
            alphas: alphas.len(),
            betas: betas.len(),
        });
    }
    if alphas.is_empty() {
        return Err(CascadeError::Empty);
    }
    for (name, xs) in [("alpha", alphas), ("beta", betas)] {
        if let Some((index, &value)) = xs.iter().enumerate().find(|(_, &x)| !(x.is_finite() && x > 0.0)) {
            return Err(CascadeError::NonPositive { name, index, value });
        }
    }
    Ok(())
}

/// The cyclic matrix with `-αᵢ` on the diagonal, `βᵢ` below it and `-β₁` in
/// the top-right corner (for `n = 1` the corner is the diagonal itself).
pub fn cyclic_matrix(alphas: &[f64], betas: &[f64]) -> Result<Vec<Vec<f64>>, CascadeError> {
    check_params(alphas, betas)?;
    let n = alphas.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = -alphas[i];
        if i > 0 {
            m[i][i - 1] = betas[i];
        }
    }
    m[0][n - 1] -= betas[0];
    Ok(m)
}

/// `∏(s + αᵢ) + ∏βᵢ`
pub fn cyclic_char_poly(alphas: &[f64], betas: &[f64]) -> Result<Polynomial, CascadeError> {
    check_params(alphas, betas)?;
    let lags = alphas.iter().fold(Polynomial::constant(1.0), |acc, &a| {
        &acc * &Polynomial::linear_factor(a)
    });
    Ok(&lags + &Polynomial::constant(betas.iter().product()))
}

pub fn cyclic_matrix_hurwitz(alphas: &[f64], betas: &[f64]) -> Result<StabilityVerdict, CascadeError> {
    Ok(routh_hurwitz(&cyclic_char_poly(alphas, betas)?)?)
}

/// `∏qᵢ + ∏pᵢ`, whose roots are the closed-loop poles.
pub fn closed_loop_char_poly(blocks: &[RationalTransfer]) -> Result<Polynomial, CascadeError> {
    if blocks.is_empty() {
        return Err(CascadeError::Empty);
    }
    let one = Polynomial::constant(1.0);
    let dens = blocks.iter().fold(one.clone(), |acc, g| &acc * g.den());
    let nums = blocks.iter().fold(one, |acc, g| &acc * g.num());
    Ok(&dens + &nums)
}

pub fn closed_loop_stable(blocks: &[RationalTransfer]) -> Result<StabilityVerdict, CascadeError> {
    Ok(routh_hurwitz(&closed_loop_char_poly(blocks)?)?)
}
