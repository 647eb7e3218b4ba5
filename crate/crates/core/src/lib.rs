//! Conic intrinsic volumes, the Grassmannian tube-volume bounds, twisted
//! characteristic polynomials, and tail bounds for the Grassmann condition
//! number of random subspaces.
//!
//! Every closed form in this crate is paired with an independent numerical
//! route (quadrature, Monte Carlo, exact rational arithmetic or brute-force
//! enumeration) that checks it. The Monte Carlo samplers are deterministic
//! for a fixed `(samples, seed)` regardless of the number of worker threads;
//! see [`parallel`].

pub mod coeffs;
pub mod condmc;
mod error;
pub mod intrinsic;
pub mod mc;
pub mod parallel;
pub mod quad;
pub mod specfn;
pub mod tube;
pub mod twisted;

pub use error::{Error, Result};
pub use mc::MCEstimate;
pub use parallel::{Execution, Sampling};
