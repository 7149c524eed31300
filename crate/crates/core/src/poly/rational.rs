use num_complex::Complex64;

use super::{poly_gcd, routh_hurwitz, PolyError, Polynomial, StabilityVerdict};

/// Common roots closer than this (as a relative Euclidean remainder) reject
/// the transfer function.
const COPRIME_TOL: f64 = 1e-8;

/// Strictly proper transfer function `p(s)/q(s)` with monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTransfer {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTransfer {
    /// Validates strict properness and coprimality, then scales so the
    /// denominator is monic. Pole-zero cancellations are rejected, never
    /// silently removed.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        let dq = match den.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(PolyError::BadDenominator),
        };
        if let Some(dp) = num.degree() {
            if dp >= dq {
                return Err(PolyError::NotStrictlyProper { num: dp, den: dq });
            }
            if dp >= 1 {
                let g = poly_gcd(&num, &den, COPRIME_TOL);
                let gd = g.degree().unwrap_or(0);
                if gd >= 1 {
                    return Err(PolyError::CommonRoot { gcd_degree: gd });
                }
            }
        }
        let lc = den.leading().expect("nonzero denominator");
        Ok(RationalTransfer {
            num: num.scale(1.0 / lc),
            den: den.scale(1.0 / lc),
        })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self, PolyError> {
        Self::new(Polynomial::try_new(num.to_vec())?, Polynomial::try_new(den.to_vec())?)
    }

    /// `β/(s+α)`
    pub fn first_order(alpha: f64, beta: f64) -> Result<Self, PolyError> {
        Self::from_coeffs(&[beta], &[alpha, 1.0])
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// `deg q - deg p`; `None` for the zero system.
    pub fn relative_degree(&self) -> Option<usize> {
        Some(self.den.degree()? - self.num.degree()?)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval_complex(s) / self.den.eval_complex(s)
    }

    /// `G(iω)`
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }

    pub fn pole_test(&self) -> StabilityVerdict {
        routh_hurwitz(&self.den).expect("denominator degree is at least one")
    }

    pub fn is_stable(&self) -> bool {
        self.pole_test().stable
    }
}
