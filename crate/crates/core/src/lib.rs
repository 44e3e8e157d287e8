//! Numerical laboratory for SPDEs driven by linear multiplicative fractional
//! Brownian motion with Hurst index H > 1/2.
//!
//! The library is organized around the pathwise (Young) solution theory:
//!
//! - [`noise`] — exact-in-law two-sided fractional Brownian motion sample
//!   paths, the Wiener shift, and Hölder/growth diagnostics.
//! - [`young`] — grid-level Young integrals, the exponential transform
//!   `z_t = exp(-beta * omega_t)` and residual checks for the transform and
//!   product-rule identities.
//! - [`models`] — discretized Gelfand-triple models (scalar linear, porous
//!   medium, 2-D Navier-Stokes) with runtime checkers for the locally
//!   monotone operator conditions.
//! - [`solver`] — pathwise time integration by the direct Young-Euler route
//!   and the exponential-transform route, with equivalence and Gronwall
//!   diagnostics.
//! - [`attractor`] — cocycle wrapper, absorbing-radius quadrature,
//!   temperedness statistics, pullback ensembles and attractor estimates.
//!
//! Everything is deterministic: generators and solvers are pure functions of
//! their parameters and an explicit 64-bit seed.

pub mod attractor;
pub mod error;
pub mod grid;
pub mod models;
pub mod noise;
pub mod report;
pub mod solver;
pub mod stats;
pub mod young;

pub use error::CoreError;
