//! Non-asymptotic tail bounds for the empirical covariance of multivariate
//! Gaussians (Wishart scatter matrices): closed-form bound evaluation and
//! inversion, Monte Carlo exceedance audits, and an exact symbolic Gaussian
//! matrix-moment oracle that certifies the moment condition the bounds rest
//! on.

pub mod bounds;
pub mod error;
pub mod io;
pub mod isserlis;
pub mod matrix;
pub mod montecarlo;
pub mod spectra;

pub use error::{Error, Result};
