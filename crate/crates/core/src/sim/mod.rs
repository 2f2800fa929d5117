//! Exact statevector simulation.
//!
//! Bit ordering: qubit 0 is the most significant bit of the basis index, so
//! the bitstring "q0 q1 … q(n−1)" read as binary is the index.
//!
//! Two backends implement [`QuantumState`]: the dense [`StateVector`]
//! (up to 24 qubits) and [`SparseState`], which stores only non-zero
//! amplitudes and handles circuits with many ancillas that stay in a few
//! basis states.

mod circuit;
mod dense;
mod density;
mod gate;
mod sparse;

pub use circuit::{Circuit, Instruction};
pub use dense::{StateVector, MAX_DENSE_QUBITS};
pub use density::{DensityMatrix, MatrixDump};
pub use gate::{BitLayout, GateKind, GateOp, Matrix};
pub use sparse::{SparseState, MAX_SPARSE_QUBITS};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait QuantumState {
    fn num_qubits(&self) -> usize;

    fn apply_gate(&mut self, op: &GateOp) -> Result<()>;

    /// Apply `body^power` conditioned on `controls`.
    fn apply_repeat(&mut self, body: &Circuit, power: u64, controls: &[usize]) -> Result<()> {
        for _ in 0..power {
            body.run_controlled(self, controls)?;
        }
        Ok(())
    }

    fn amplitude(&self, index: u64) -> Complex64;

    fn norm_sqr(&self) -> f64;

    /// Partial trace onto `qubits` (in the given order).
    fn reduced_density(&self, qubits: &[usize]) -> Result<DensityMatrix>;

    /// Diagonal of [`QuantumState::reduced_density`].
    fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>>;

    /// Probability that every qubit in `qubits` reads 0.
    fn zero_probability(&self, qubits: &[usize]) -> Result<f64>;
}

/// Parse a bitstring of '0'/'1' characters, qubit 0 first.
pub fn parse_bitstring(num_qubits: usize, bits: &str) -> Result<u64> {
    let bad = || Error::BadBitstring {
        bits: bits.to_string(),
        num_qubits,
    };
    if bits.len() != num_qubits || num_qubits > 64 {
        return Err(bad());
    }
    bits.chars().try_fold(0u64, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(bad()),
    })
}

/// Check that `qubits` is non-empty, in range and duplicate-free.
pub(crate) fn check_subset(num_qubits: usize, qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::InvalidCircuit("qubit subset is empty".into()));
    }
    let mut seen = vec![false; num_qubits];
    for &q in qubits {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if seen[q] {
            return Err(Error::OverlappingQubits(q));
        }
        seen[q] = true;
    }
    Ok(())
}
