use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

const UNITARITY_TOL: f64 = 1e-12;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidGate(format!(
                "matrix data has {} entries, expected {}",
                data.len(),
                dim * dim
            )));
        }
        Ok(Matrix { dim, data })
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn adjoint(&self) -> Matrix {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        Matrix { dim: d, data }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim;
        for r in 0..d {
            for c in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    s += self.data[k * d + r].conj() * self.data[k * d + c];
                }
                let want = if r == c { 1.0 } else { 0.0 };
                if (s - want).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `(row, value)` of the single non-zero entry per column, if every
    /// column has exactly one.
    fn monomial_columns(&self) -> Option<Vec<(usize, Complex64)>> {
        let d = self.dim;
        (0..d)
            .map(|c| {
                let mut hit = None;
                for r in 0..d {
                    let v = self.data[r * d + c];
                    if v.norm() > 0.0 {
                        if hit.is_some() {
                            return None;
                        }
                        hit = Some((r, v));
                    }
                }
                hit
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    /// `diag(1, e^{iθ})`.
    Phase(f64),
    /// Basis permutation of the target sub-register: `|s⟩ → |table[s]⟩`.
    Permutation(Arc<Vec<u32>>),
    /// Unit-modulus diagonal over the target sub-register.
    Diagonal(Arc<Vec<Complex64>>),
    Unitary {
        matrix: Arc<Matrix>,
        monomial: Option<Arc<Vec<(usize, Complex64)>>>,
    },
}

/// A (multi-)controlled gate. `targets[0]` is the most significant bit of
/// the target sub-register index. Controls fire on |1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl GateOp {
    fn single(kind: GateKind, target: usize) -> Self {
        GateOp {
            kind,
            targets: vec![target],
            controls: Vec::new(),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::Hadamard, q)
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::PauliX, q)
    }

    pub fn phase(q: usize, theta: f64) -> Self {
        Self::single(GateKind::Phase(theta), q)
    }

    pub fn cx(control: usize, target: usize) -> Result<Self> {
        Self::x(target).controlled_by(&[control])
    }

    pub fn mcx(controls: &[usize], target: usize) -> Result<Self> {
        Self::x(target).controlled_by(controls)
    }

    pub fn permutation(targets: Vec<usize>, table: Vec<u32>) -> Result<Self> {
        let dim = 1usize
            .checked_shl(targets.len() as u32)
            .filter(|_| targets.len() <= 24)
            .ok_or_else(|| Error::InvalidGate("permutation register too wide".into()))?;
        if table.len() != dim {
            return Err(Error::InvalidGate(format!(
                "permutation table has {} entries for {} targets",
                table.len(),
                targets.len()
            )));
        }
        let mut seen = vec![false; dim];
        for &t in &table {
            let t = t as usize;
            if t >= dim || seen[t] {
                return Err(Error::InvalidGate("permutation table is not a bijection".into()));
            }
            seen[t] = true;
        }
        let op = GateOp {
            kind: GateKind::Permutation(Arc::new(table)),
            targets,
            controls: Vec::new(),
        };
        op.check_disjoint()?;
        Ok(op)
    }

    /// Permutation built from a classical bijection on the target register.
    pub fn permutation_from_fn(targets: Vec<usize>, f: impl Fn(u32) -> u32) -> Result<Self> {
        let dim = 1u32 << targets.len();
        Self::permutation(targets, (0..dim).map(f).collect())
    }

    pub fn diagonal(targets: Vec<usize>, diag: Vec<Complex64>) -> Result<Self> {
        if diag.len() != 1 << targets.len() {
            return Err(Error::InvalidGate("diagonal length does not match targets".into()));
        }
        if diag.iter().any(|d| (d.norm() - 1.0).abs() > UNITARITY_TOL) {
            return Err(Error::InvalidGate("diagonal entries must have unit modulus".into()));
        }
        let op = GateOp {
            kind: GateKind::Diagonal(Arc::new(diag)),
            targets,
            controls: Vec::new(),
        };
        op.check_disjoint()?;
        Ok(op)
    }

    pub fn unitary(targets: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if matrix.dim != 1 << targets.len() {
            return Err(Error::InvalidGate("matrix dimension does not match targets".into()));
        }
        if !matrix.is_unitary(UNITARITY_TOL) {
            return Err(Error::InvalidGate("matrix is not unitary".into()));
        }
        let monomial = matrix.monomial_columns().map(Arc::new);
        let op = GateOp {
            kind: GateKind::Unitary {
                matrix: Arc::new(matrix),
                monomial,
            },
            targets,
            controls: Vec::new(),
        };
        op.check_disjoint()?;
        Ok(op)
    }

    /// Add control qubits.
    pub fn controlled_by(mut self, controls: &[usize]) -> Result<Self> {
        self.controls.extend_from_slice(controls);
        self.check_disjoint()?;
        Ok(self)
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut all: Vec<usize> = self.targets.iter().chain(&self.controls).copied().collect();
        all.sort_unstable();
        for w in all.windows(2) {
            if w[0] == w[1] {
                return Err(Error::OverlappingQubits(w[0]));
            }
        }
        if self.targets.is_empty() {
            return Err(Error::InvalidGate("gate has no targets".into()));
        }
        let single = matches!(
            self.kind,
            GateKind::Hadamard | GateKind::PauliX | GateKind::Phase(_)
        );
        if single && self.targets.len() != 1 {
            return Err(Error::InvalidGate("single-qubit gate with several targets".into()));
        }
        Ok(())
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        self.check_disjoint()?;
        for &q in self.targets.iter().chain(&self.controls) {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> GateOp {
        let kind = match &self.kind {
            GateKind::Hadamard => GateKind::Hadamard,
            GateKind::PauliX => GateKind::PauliX,
            GateKind::Phase(t) => GateKind::Phase(-t),
            GateKind::Permutation(table) => {
                let mut inv = vec![0u32; table.len()];
                for (s, &t) in table.iter().enumerate() {
                    inv[t as usize] = s as u32;
                }
                GateKind::Permutation(Arc::new(inv))
            }
            GateKind::Diagonal(d) => GateKind::Diagonal(Arc::new(d.iter().map(|v| v.conj()).collect())),
            GateKind::Unitary { matrix, .. } => {
                let adj = matrix.adjoint();
                let monomial = adj.monomial_columns().map(Arc::new);
                GateKind::Unitary {
                    matrix: Arc::new(adj),
                    monomial,
                }
            }
        };
        GateOp {
            kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        }
    }

    /// Whether the gate maps basis states to (phased) basis states.
    pub fn is_monomial(&self) -> bool {
        match &self.kind {
            GateKind::Hadamard => false,
            GateKind::Unitary { monomial, .. } => monomial.is_some(),
            _ => true,
        }
    }

    /// Target-register matrix as a dense row-major array.
    pub fn target_matrix(&self) -> Matrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        match &self.kind {
            GateKind::Hadamard => Matrix {
                dim: 2,
                data: vec![
                    c(FRAC_1_SQRT_2, 0.0),
                    c(FRAC_1_SQRT_2, 0.0),
                    c(FRAC_1_SQRT_2, 0.0),
                    c(-FRAC_1_SQRT_2, 0.0),
                ],
            },
            GateKind::PauliX => Matrix {
                dim: 2,
                data: vec![z, c(1.0, 0.0), c(1.0, 0.0), z],
            },
            GateKind::Phase(t) => Matrix {
                dim: 2,
                data: vec![c(1.0, 0.0), z, z, Complex64::from_polar(1.0, *t)],
            },
            GateKind::Permutation(table) => {
                let d = table.len();
                let mut data = vec![z; d * d];
                for (s, &t) in table.iter().enumerate() {
                    data[t as usize * d + s] = c(1.0, 0.0);
                }
                Matrix { dim: d, data }
            }
            GateKind::Diagonal(diag) => {
                let d = diag.len();
                let mut data = vec![z; d * d];
                for (i, v) in diag.iter().enumerate() {
                    data[i * d + i] = *v;
                }
                Matrix { dim: d, data }
            }
            GateKind::Unitary { matrix, .. } => (**matrix).clone(),
        }
    }

    /// Image of one basis state for monomial gates; `None` otherwise.
    pub fn map_basis(&self, num_qubits: usize, index: u64) -> Option<(u64, Complex64)> {
        let one = Complex64::new(1.0, 0.0);
        let layout = BitLayout::new(num_qubits, &self.targets, &self.controls);
        if !layout.controls_on(index) {
            return if self.is_monomial() { Some((index, one)) } else { None };
        }
        let sub = layout.sub_index(index);
        match &self.kind {
            GateKind::Hadamard => None,
            GateKind::PauliX => Some((index ^ layout.target_mask, one)),
            GateKind::Phase(t) => Some((
                index,
                if sub == 1 { Complex64::from_polar(1.0, *t) } else { one },
            )),
            GateKind::Permutation(table) => {
                Some((layout.with_sub_index(index, table[sub] as usize), one))
            }
            GateKind::Diagonal(d) => Some((index, d[sub])),
            GateKind::Unitary { monomial, .. } => {
                let (row, v) = monomial.as_ref()?[sub];
                Some((layout.with_sub_index(index, row), v))
            }
        }
    }
}

/// Bit positions of a gate's targets and controls inside a basis index.
/// Qubit 0 is the most significant bit of the index.
#[derive(Debug, Clone)]
pub struct BitLayout {
    /// Bit positions of the targets, most significant target first.
    pub target_bits: Vec<u32>,
    pub target_mask: u64,
    pub control_mask: u64,
}

impl BitLayout {
    pub fn new(num_qubits: usize, targets: &[usize], controls: &[usize]) -> Self {
        let pos = |q: usize| (num_qubits - 1 - q) as u32;
        let target_bits: Vec<u32> = targets.iter().map(|&q| pos(q)).collect();
        let target_mask = target_bits.iter().fold(0u64, |m, &b| m | 1 << b);
        let control_mask = controls.iter().fold(0u64, |m, &q| m | 1 << pos(q));
        BitLayout {
            target_bits,
            target_mask,
            control_mask,
        }
    }

    #[inline]
    pub fn controls_on(&self, index: u64) -> bool {
        index & self.control_mask == self.control_mask
    }

    #[inline]
    pub fn sub_index(&self, index: u64) -> usize {
        let k = self.target_bits.len();
        let mut s = 0usize;
        for (j, &b) in self.target_bits.iter().enumerate() {
            s |= (((index >> b) & 1) as usize) << (k - 1 - j);
        }
        s
    }

    #[inline]
    pub fn with_sub_index(&self, index: u64, sub: usize) -> u64 {
        let k = self.target_bits.len();
        let mut out = index & !self.target_mask;
        for (j, &b) in self.target_bits.iter().enumerate() {
            out |= (((sub >> (k - 1 - j)) & 1) as u64) << b;
        }
        out
    }
}
