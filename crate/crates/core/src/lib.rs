//! Sinusoidal neural networks with discrete weights, their gradient-descent
//! training experiments, and a quantum training algorithm (Grover search
//! driven by phase estimation) executed on an exact simulator.
//!
//! Module map:
//! - [`nets`]: continuous and discrete sine networks, MSE, STE gradients.
//! - [`harness`]: datasets, gradient descent, sweeps, loss landscapes, CSV.
//! - [`sim`]: dense and sparse statevector simulators, density matrices.
//! - [`quantum`]: encodings, reversible blocks, the network unitary, phase
//!   estimation, oracle, diffusion and the Grover training loop.
//! - [`bruteforce`]: exhaustive search over discrete weight assignments.

pub mod bruteforce;
pub mod error;
pub mod harness;
pub mod nets;
pub mod par;
pub mod quantum;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use par::Parallelism;

/// Float formatting used by every CSV writer: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
