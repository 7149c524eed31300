//! Passivity ("secant") gains, cyclic-feedback stability certificates and
//! their numerical cross-checks.
//!
//! * [`poly`]: polynomials, strictly proper transfer functions, Sturm root
//!   isolation and the Routh–Hurwitz test.
//! * [`passivity`]: secant and H∞ gains, OSP/SPR tests, circle certificates
//!   and static sector nonlinearities.
//! * [`cascade`]: the secant-condition product test, cyclic matrices and
//!   closed-loop pole tests for unity negative feedback.
//! * [`geometry`]: angles between chained vectors and the cosine-product bound
//!   that underlies the secant threshold.
//! * [`simulate`]: fixed-step time-domain simulation, truncated L² functionals,
//!   empirical passivity checks and equilibrium shifting.

pub mod cascade;
pub mod geometry;
pub mod passivity;
pub mod poly;
pub mod simulate;
