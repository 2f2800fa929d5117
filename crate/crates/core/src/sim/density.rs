use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Reduced density matrix over an ordered qubit subset; row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub qubits: Vec<usize>,
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(qubits: Vec<usize>, data: Vec<Complex64>) -> Self {
        let dim = 1 << qubits.len();
        debug_assert_eq!(data.len(), dim * dim);
        DensityMatrix { qubits, dim, data }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c));
        // Symmetrize away rounding noise before the Hermitian solver.
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian, unit trace, positive semidefinite.
    pub fn validate(&self) -> Result<()> {
        if !self.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidCircuit("density matrix is not Hermitian".into()));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidCircuit(format!("density matrix trace is {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidCircuit(format!("density matrix eigenvalue {min} < 0")));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Elementwise comparison against a real row-major matrix.
    pub fn approx_eq_real(&self, expected: &[f64], tol: f64) -> bool {
        expected.len() == self.data.len()
            && self
                .data
                .iter()
                .zip(expected)
                .all(|(a, &e)| (a - Complex64::new(e, 0.0)).norm() <= tol)
    }

    pub fn dump(&self) -> MatrixDump {
        MatrixDump {
            kind: "density".into(),
            qubits: self.qubits.clone(),
            dimension: self.dim,
            data: self
                .data
                .chunks(self.dim)
                .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        }
    }
}

/// Text dump of a matrix as rows of `[real, imag]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub kind: String,
    pub qubits: Vec<usize>,
    pub dimension: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixDump {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump serializes")
    }
}
