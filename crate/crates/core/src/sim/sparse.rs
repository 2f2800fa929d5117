use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use super::gate::{BitLayout, GateOp};
use super::{check_subset, parse_bitstring, Circuit, DensityMatrix, QuantumState};
use crate::error::{Error, Result};

pub const MAX_SPARSE_QUBITS: usize = 63;

/// Amplitudes with squared magnitude below this are dropped.
const PRUNE: f64 = 1e-30;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Map from basis index to non-zero amplitude.
///
/// Monomial gates (X, phases, permutations) rewrite keys in place; branching
/// gates (H, general unitaries) expand, merge and prune. Suited to circuits
/// whose support stays small, e.g. many ancillas over a few weight qubits.
#[derive(Debug, Clone)]
pub struct SparseState {
    num_qubits: usize,
    entries: Vec<(u64, Complex64)>,
}

impl SparseState {
    pub fn basis(num_qubits: usize, index: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_SPARSE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: num_qubits,
                limit: MAX_SPARSE_QUBITS,
            });
        }
        if index >> num_qubits != 0 {
            return Err(Error::InvalidCircuit(format!("basis index {index} out of range")));
        }
        Ok(SparseState {
            num_qubits,
            entries: vec![(index, Complex64::new(1.0, 0.0))],
        })
    }

    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn init_basis(num_qubits: usize, bits: &str) -> Result<Self> {
        Self::basis(num_qubits, parse_bitstring(num_qubits, bits)?)
    }

    /// Non-zero amplitudes, in no particular order.
    pub fn entries(&self) -> &[(u64, Complex64)] {
        &self.entries
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    fn merge(&mut self, mut raw: Vec<(u64, Complex64)>) {
        raw.sort_by_key(|e| e.0);
        let mut out: Vec<(u64, Complex64)> = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += v,
                _ => out.push((k, v)),
            }
        }
        out.retain(|e| e.1.norm_sqr() > PRUNE);
        self.entries = out;
    }
}

impl QuantumState for SparseState {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        if op.is_monomial() {
            let n = self.num_qubits;
            for e in &mut self.entries {
                let (k, p) = op.map_basis(n, e.0).expect("monomial gate");
                e.0 = k;
                e.1 *= p;
            }
            return Ok(());
        }
        let layout = BitLayout::new(self.num_qubits, &op.targets, &op.controls);
        let m = op.target_matrix();
        let d = m.dim;
        let mut raw = Vec::with_capacity(self.entries.len() * d);
        for &(k, v) in &self.entries {
            if !layout.controls_on(k) {
                raw.push((k, v));
                continue;
            }
            let col = layout.sub_index(k);
            for row in 0..d {
                let u = m.data[row * d + col];
                if u != ZERO {
                    raw.push((layout.with_sub_index(k, row), u * v));
                }
            }
        }
        self.merge(raw);
        Ok(())
    }

    /// Monomial bodies are applied through a memoized basis map, so each
    /// distinct basis state is pushed through the body once per call.
    fn apply_repeat(&mut self, body: &Circuit, power: u64, controls: &[usize]) -> Result<()> {
        if !body.is_monomial() {
            for _ in 0..power {
                body.run_controlled(self, controls)?;
            }
            return Ok(());
        }
        let n = self.num_qubits;
        let cm = BitLayout::new(n, &[], controls).control_mask;
        for &c in controls {
            if c >= n {
                return Err(Error::QubitOutOfRange {
                    index: c,
                    num_qubits: n,
                });
            }
            if body.touches(c) {
                return Err(Error::OverlappingQubits(c));
            }
        }
        let mut memo: HashMap<u64, (u64, Complex64)> = HashMap::new();
        for e in &mut self.entries {
            if e.0 & cm != cm {
                continue;
            }
            for _ in 0..power {
                let (k, p) = match memo.get(&e.0) {
                    Some(&hit) => hit,
                    None => {
                        let hit = body.map_basis(e.0).expect("monomial body");
                        memo.insert(e.0, hit);
                        hit
                    }
                };
                e.0 = k;
                e.1 *= p;
            }
        }
        Ok(())
    }

    fn amplitude(&self, index: u64) -> Complex64 {
        self.entries
            .iter()
            .filter(|e| e.0 == index)
            .map(|e| e.1)
            .sum()
    }

    fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    fn reduced_density(&self, qubits: &[usize]) -> Result<DensityMatrix> {
        check_subset(self.num_qubits, qubits)?;
        let layout = BitLayout::new(self.num_qubits, qubits, &[]);
        let dim = 1usize << qubits.len();
        let mut groups: BTreeMap<u64, Vec<(usize, Complex64)>> = BTreeMap::new();
        for &(k, v) in &self.entries {
            groups
                .entry(k & !layout.target_mask)
                .or_default()
                .push((layout.sub_index(k), v));
        }
        let mut data = vec![ZERO; dim * dim];
        for group in groups.values() {
            for &(a, va) in group {
                for &(b, vb) in group {
                    data[a * dim + b] += va * vb.conj();
                }
            }
        }
        Ok(DensityMatrix::new(qubits.to_vec(), data))
    }

    fn zero_probability(&self, qubits: &[usize]) -> Result<f64> {
        check_subset(self.num_qubits, qubits)?;
        let mask = BitLayout::new(self.num_qubits, qubits, &[]).target_mask;
        Ok(self
            .entries
            .iter()
            .filter(|e| e.0 & mask == 0)
            .map(|e| e.1.norm_sqr())
            .sum())
    }

    fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        check_subset(self.num_qubits, qubits)?;
        let layout = BitLayout::new(self.num_qubits, qubits, &[]);
        let mut probs = vec![0.0; 1 << qubits.len()];
        for &(k, v) in &self.entries {
            probs[layout.sub_index(k)] += v.norm_sqr();
        }
        Ok(probs)
    }
}
