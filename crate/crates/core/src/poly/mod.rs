//! Real-coefficient univariate polynomials.
//!
//! Coefficients are stored in ascending degree order, so `coeffs[k]`
//! multiplies `s^k`. Every constructor and every arithmetic operation returns
//! a canonical value: trailing coefficients smaller than `1e-12` times the
//! largest coefficient magnitude are stripped, and the zero polynomial is the
//! empty coefficient vector.

mod rational;
mod routh;
mod sturm;

pub use rational::RationalTransfer;
pub use routh::{routh_hurwitz, StabilityVerdict};
pub use sturm::{poly_gcd, real_roots_nonneg, real_roots_nonneg_with_multiplicity, SturmSequence};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Relative magnitude below which a trailing coefficient is treated as zero.
pub const CANONICAL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("cannot parse polynomial coefficient {token:?} at position {index}")]
    Parse { index: usize, token: String },
    #[error("polynomial text is empty")]
    Empty,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("transfer function is not strictly proper (deg num = {num}, deg den = {den})")]
    NotStrictlyProper { num: usize, den: usize },
    #[error("denominator is identically zero or constant")]
    BadDenominator,
    #[error("numerator and denominator share a common root (gcd degree {gcd_degree})")]
    CommonRoot { gcd_degree: usize },
}

#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients and canonicalizes it.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        p.canonicalize();
        p
    }

    /// Like [`Polynomial::new`] but rejects NaN and infinite coefficients.
    pub fn try_new(coeffs: Vec<f64>) -> Result<Self, PolyError> {
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite { index });
        }
        Ok(Self::new(coeffs))
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c * s^k`
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `s + a`
    pub fn linear_factor(a: f64) -> Self {
        Self::new(vec![a, 1.0])
    }

    /// Product of `(s - r)` over the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Polynomial::constant(1.0), |acc, &r| {
            &acc * &Polynomial::new(vec![-r, 1.0])
        })
    }

    fn canonicalize(&mut self) {
        let max = self.max_abs();
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        let cut = CANONICAL_REL_TOL * max;
        while let Some(&last) = self.coeffs.last() {
            if last.abs() < cut || last == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<f64> {
        self.coeffs.last().copied()
    }

    /// Coefficient of `s^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Number of exactly-zero low-order coefficients (the multiplicity of the
    /// root at the origin when it is represented exactly).
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0.0).count()
    }

    /// Divides by `s^k`, dropping the `k` lowest coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// Sum of `|c_k| |x|^k`, the natural scale for judging `eval(x)` against zero.
    pub fn eval_abs(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Rescaled so the largest coefficient magnitude is one.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return Self::zero();
        }
        self.scale(1.0 / m)
    }

    /// Rescaled so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(1.0 / lc),
            None => Self::zero(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Substitutes `-s` for `s`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Polynomial::constant(1.0), |acc, _| &acc * self)
    }

    /// Euclidean division. The remainder has degree strictly below the divisor;
    /// its top coefficients are zeroed by construction rather than by rounding.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        let db = divisor
            .degree()
            .ok_or(PolyError::Degenerate("division by the zero polynomial"))?;
        let lc = divisor.coeffs[db];
        let Some(da) = self.degree() else {
            return Ok((Polynomial::zero(), Polynomial::zero()));
        };
        if da < db {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; da - db + 1];
        for i in (db..=da).rev() {
            let c = rem[i] / lc;
            quot[i - db] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[i - db + j] -= c * b;
            }
            rem[i] = 0.0;
        }
        rem.truncate(db);
        Ok((Polynomial::new(quot), Polynomial { coeffs: rem }.stripped()))
    }

    /// Drops exactly-zero trailing coefficients without the relative cut.
    fn stripped(mut self) -> Self {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
        self
    }

    /// Synthetic division by `(s - r)`; the remainder is discarded.
    pub fn deflate(&self, r: f64) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut out = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (1..n).rev() {
            carry = self.coeffs[k] + carry * r;
            out[k - 1] = carry;
        }
        Self::new(out)
    }

    /// Even part of `p(iω)` written as a polynomial in `x = ω²`:
    /// `Re p(iω) = E(ω²)`.
    pub fn even_part_in_x(&self) -> Polynomial {
        Self::new(
            self.coeffs
                .iter()
                .step_by(2)
                .enumerate()
                .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
                .collect(),
        )
    }

    /// Odd part of `p(iω)` in `x = ω²`: `Im p(iω) = ω·O(ω²)`.
    pub fn odd_part_in_x(&self) -> Polynomial {
        Self::new(
            self.coeffs
                .iter()
                .skip(1)
                .step_by(2)
                .enumerate()
                .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
                .collect(),
        )
    }
}

/// `N(x)` with `N(ω²) = |p(iω)|²`.
pub fn mag_squared_even(p: &Polynomial) -> Result<Polynomial, PolyError> {
    if p.is_zero() {
        return Err(PolyError::Degenerate("|p(iω)|² of the zero polynomial"));
    }
    let e = p.even_part_in_x();
    let o = p.odd_part_in_x();
    let x = Polynomial::monomial(1.0, 1);
    Ok(&(&e * &e) + &(&x * &(&o * &o)))
}

/// `D(x)` with `D(ω²) = Re[p(iω)·conj(q(iω))]`.
pub fn re_cross_even(p: &Polynomial, q: &Polynomial) -> Result<Polynomial, PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::Degenerate("Re[p q̄] with a zero polynomial"));
    }
    let x = Polynomial::monomial(1.0, 1);
    let ee = &p.even_part_in_x() * &q.even_part_in_x();
    let oo = &p.odd_part_in_x() * &q.odd_part_in_x();
    Ok(&ee + &(&x * &oo))
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{self}]")
    }
}

/// Text form: comma-separated ascending coefficients, `"1,1,1"` is `1+s+s²`.
/// The zero polynomial prints as `"0"`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PolyError::Empty);
        }
        let mut coeffs = Vec::new();
        for (index, token) in s.split(',').enumerate() {
            let t = token.trim();
            let c: f64 = t.parse().map_err(|_| PolyError::Parse {
                index,
                token: t.to_string(),
            })?;
            if !c.is_finite() {
                return Err(PolyError::NonFinite { index });
            }
            coeffs.push(c);
        }
        Ok(Polynomial::new(coeffs))
    }
}
