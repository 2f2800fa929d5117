use num_complex::Complex64;

use super::gate::{BitLayout, GateKind, GateOp};
use super::{check_subset, parse_bitstring, DensityMatrix, MatrixDump, QuantumState};
use crate::error::{Error, Result};
use crate::par::{self, Parallelism};

pub const MAX_DENSE_QUBITS: usize = 24;

/// Amplitudes per parallel work item.
const BLOCK: usize = 1 << 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense amplitude vector of length 2^n.
#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    scratch: Vec<Complex64>,
    parallelism: Parallelism,
}

impl StateVector {
    /// |0…0⟩.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: num_qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if index as usize >= dim {
            return Err(Error::InvalidCircuit(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits,
            amps,
            scratch: Vec::new(),
            parallelism: Parallelism::default(),
        })
    }

    /// Basis state named by a bitstring, qubit 0 first.
    pub fn init_basis(num_qubits: usize, bits: &str) -> Result<Self> {
        let index = parse_bitstring(num_qubits, bits)?;
        Self::basis(num_qubits, index)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() || n == 0 || n > MAX_DENSE_QUBITS {
            return Err(Error::InvalidCircuit("amplitude count must be 2^n with 1 <= n <= 24".into()));
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
            scratch: Vec::new(),
            parallelism: Parallelism::default(),
        })
    }

    pub fn with_parallelism(mut self, parallelism: Parallelism) -> Self {
        self.parallelism = parallelism;
        self
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn dump(&self) -> MatrixDump {
        MatrixDump {
            kind: "statevector".into(),
            qubits: (0..self.num_qubits).collect(),
            dimension: self.amps.len(),
            data: vec![self.amps.iter().map(|v| [v.re, v.im]).collect()],
        }
    }

    fn apply_2x2(&mut self, layout: &BitLayout, m: [Complex64; 4]) {
        let half = 1usize << layout.target_bits[0];
        let pair = 2 * half;
        let chunk = pair.max(BLOCK).min(self.amps.len());
        let cm = layout.control_mask;
        par::for_each_chunk(&mut self.amps, chunk, self.parallelism, |ci, c| {
            let base = ci * chunk;
            for (pi, p) in c.chunks_mut(pair).enumerate() {
                let (lo, hi) = p.split_at_mut(half);
                let start = (base + pi * pair) as u64;
                for off in 0..half {
                    if (start + off as u64) & cm != cm {
                        continue;
                    }
                    let (a, b) = (lo[off], hi[off]);
                    lo[off] = m[0] * a + m[1] * b;
                    hi[off] = m[2] * a + m[3] * b;
                }
            }
        });
    }

    fn apply_pauli_x(&mut self, layout: &BitLayout) {
        let half = 1usize << layout.target_bits[0];
        let pair = 2 * half;
        let chunk = pair.max(BLOCK).min(self.amps.len());
        let cm = layout.control_mask;
        par::for_each_chunk(&mut self.amps, chunk, self.parallelism, |ci, c| {
            let base = ci * chunk;
            for (pi, p) in c.chunks_mut(pair).enumerate() {
                let (lo, hi) = p.split_at_mut(half);
                let start = (base + pi * pair) as u64;
                for off in 0..half {
                    if (start + off as u64) & cm == cm {
                        std::mem::swap(&mut lo[off], &mut hi[off]);
                    }
                }
            }
        });
    }

    fn apply_diagonal(&mut self, layout: &BitLayout, diag: &[Complex64]) {
        let chunk = BLOCK.min(self.amps.len());
        par::for_each_chunk(&mut self.amps, chunk, self.parallelism, |ci, c| {
            let base = (ci * chunk) as u64;
            for (off, a) in c.iter_mut().enumerate() {
                let i = base + off as u64;
                if layout.controls_on(i) {
                    *a *= diag[layout.sub_index(i)];
                }
            }
        });
    }

    /// Out-of-place update: `new[i] = f(old, i)`.
    fn gather(&mut self, f: impl Fn(&[Complex64], u64) -> Complex64 + Sync + Send) {
        let mut out = std::mem::take(&mut self.scratch);
        out.resize(self.amps.len(), ZERO);
        let old = &self.amps;
        par::fill_indexed(&mut out, self.parallelism, |i| f(old, i as u64));
        self.scratch = std::mem::replace(&mut self.amps, out);
    }

    fn debug_check_norm(&self) {
        #[cfg(debug_assertions)]
        {
            let n = self.norm_sqr();
            debug_assert!((n - 1.0).abs() < 1e-10, "norm drifted to {n}");
        }
    }

    /// Bit offsets of every value of the sub-register `qubits`.
    fn offsets(&self, qubits: &[usize]) -> (Vec<u64>, Vec<u32>) {
        let n = self.num_qubits;
        let layout = BitLayout::new(n, qubits, &[]);
        let offs = (0..1usize << qubits.len())
            .map(|a| layout.with_sub_index(0, a))
            .collect();
        let rest: Vec<u32> = (0..n as u32)
            .filter(|b| layout.target_mask >> b & 1 == 0)
            .collect();
        (offs, rest)
    }
}

pub(crate) fn deposit(value: u64, bits: &[u32]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (j, &b)| acc | ((value >> j) & 1) << b)
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        let layout = BitLayout::new(self.num_qubits, &op.targets, &op.controls);
        match &op.kind {
            GateKind::PauliX => self.apply_pauli_x(&layout),
            GateKind::Diagonal(d) => self.apply_diagonal(&layout, d),
            GateKind::Phase(t) => {
                let one = Complex64::new(1.0, 0.0);
                self.apply_diagonal(&layout, &[one, Complex64::from_polar(1.0, *t)]);
            }
            GateKind::Hadamard => {
                let m = op.target_matrix();
                self.apply_2x2(&layout, [m.data[0], m.data[1], m.data[2], m.data[3]]);
            }
            GateKind::Unitary { matrix, .. } if matrix.dim == 2 => {
                let d = &matrix.data;
                self.apply_2x2(&layout, [d[0], d[1], d[2], d[3]]);
            }
            GateKind::Permutation(table) => {
                let mut inv = vec![0u32; table.len()];
                for (s, &t) in table.iter().enumerate() {
                    inv[t as usize] = s as u32;
                }
                self.gather(|old, i| {
                    if layout.controls_on(i) {
                        let src = layout.with_sub_index(i, inv[layout.sub_index(i)] as usize);
                        old[src as usize]
                    } else {
                        old[i as usize]
                    }
                });
            }
            GateKind::Unitary { matrix, .. } => {
                let d = matrix.dim;
                self.gather(|old, i| {
                    if !layout.controls_on(i) {
                        return old[i as usize];
                    }
                    let r = layout.sub_index(i);
                    (0..d)
                        .map(|c| matrix.data[r * d + c] * old[layout.with_sub_index(i, c) as usize])
                        .sum()
                });
            }
        }
        self.debug_check_norm();
        Ok(())
    }

    fn amplitude(&self, index: u64) -> Complex64 {
        self.amps.get(index as usize).copied().unwrap_or(ZERO)
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn reduced_density(&self, qubits: &[usize]) -> Result<DensityMatrix> {
        check_subset(self.num_qubits, qubits)?;
        let (offs, rest) = self.offsets(qubits);
        let dim = offs.len();
        let rest_count = 1usize << rest.len();
        let tasks = rest_count.min(64);
        let per = rest_count.div_ceil(tasks);
        let partials = par::map_range(tasks, self.parallelism, |t| {
            let mut acc = vec![ZERO; dim * dim];
            let mut row = vec![ZERO; dim];
            for r in t * per..((t + 1) * per).min(rest_count) {
                let base = deposit(r as u64, &rest);
                for (a, o) in offs.iter().enumerate() {
                    row[a] = self.amps[(base | o) as usize];
                }
                for a in 0..dim {
                    if row[a] == ZERO {
                        continue;
                    }
                    for b in 0..dim {
                        acc[a * dim + b] += row[a] * row[b].conj();
                    }
                }
            }
            acc
        });
        let mut data = vec![ZERO; dim * dim];
        for p in partials {
            for (d, v) in data.iter_mut().zip(p) {
                *d += v;
            }
        }
        Ok(DensityMatrix::new(qubits.to_vec(), data))
    }

    fn zero_probability(&self, qubits: &[usize]) -> Result<f64> {
        check_subset(self.num_qubits, qubits)?;
        let mask = BitLayout::new(self.num_qubits, qubits, &[]).target_mask;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as u64 & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        check_subset(self.num_qubits, qubits)?;
        let (offs, rest) = self.offsets(qubits);
        let rest_count = 1u64 << rest.len();
        Ok(offs
            .iter()
            .map(|o| {
                (0..rest_count)
                    .map(|r| self.amps[(deposit(r, &rest) | o) as usize].norm_sqr())
                    .sum()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Circuit, Matrix};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};
    use std::sync::Arc;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn init_basis_ordering() {
        let s = StateVector::init_basis(2, "00").unwrap();
        assert_eq!(s.amplitude(0), c(1.0));
        let s = StateVector::init_basis(3, "101").unwrap();
        assert_eq!(s.amplitude(0b101), c(1.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(StateVector::init_basis(3, "10").is_err());
    }

    #[test]
    fn hadamard_and_controls() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        assert!((s.amplitude(0) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitude(1) - c(FRAC_1_SQRT_2)).norm() < 1e-15);

        let mut s = StateVector::init_basis(2, "01").unwrap();
        s.apply_gate(&GateOp::cx(0, 1).unwrap()).unwrap();
        assert_eq!(s.amplitude(0b01), c(1.0));
        s.apply_gate(&GateOp::x(0)).unwrap();
        s.apply_gate(&GateOp::cx(0, 1).unwrap()).unwrap();
        assert_eq!(s.amplitude(0b10), c(1.0));
        assert!(s.apply_gate(&GateOp::cx(0, 0).unwrap_or(GateOp::x(5))).is_err());
    }

    #[test]
    fn reduced_density_examples() {
        // |0>|+>
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&GateOp::h(1)).unwrap();
        let rho = s.reduced_density(&[0]).unwrap();
        assert!(rho.approx_eq_real(&[1.0, 0.0, 0.0, 0.0], 1e-12));
        // Bell
        let mut s = StateVector::new(2).unwrap();
        s.apply_gate(&GateOp::h(0)).unwrap();
        s.apply_gate(&GateOp::cx(0, 1).unwrap()).unwrap();
        let rho = s.reduced_density(&[1]).unwrap();
        assert!(rho.approx_eq_real(&[0.5, 0.0, 0.0, 0.5], 1e-12));
        rho.validate().unwrap();
        assert!(s.reduced_density(&[2]).is_err());
        let probs = s.marginal_probabilities(&[0]).unwrap();
        assert!(probs.iter().all(|p| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn controlled_power_examples() {
        let mut u = Circuit::new(2);
        u.push(GateOp::phase(1, PI / 4.0)).unwrap();
        let u = Arc::new(u);

        // control |0>: identity
        let mut s = StateVector::init_basis(2, "01").unwrap();
        s.apply_repeat(&u, 1, &[0]).unwrap();
        assert_eq!(s.amplitude(0b01), c(1.0));

        // power 4 on the marked branch: phase pi
        let mut s = StateVector::init_basis(2, "11").unwrap();
        s.apply_repeat(&u, 4, &[0]).unwrap();
        assert!((s.amplitude(0b11) - c(-1.0)).norm() < 1e-12);

        // power 2 == power 1 twice
        let mut a = StateVector::new(2).unwrap();
        a.apply_gate(&GateOp::h(0)).unwrap();
        a.apply_gate(&GateOp::h(1)).unwrap();
        let mut b = a.clone();
        a.apply_repeat(&u, 2, &[0]).unwrap();
        b.apply_repeat(&u, 1, &[0]).unwrap();
        b.apply_repeat(&u, 1, &[0]).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let build = |p: Parallelism| {
            let mut s = StateVector::new(14).unwrap().with_parallelism(p);
            for q in 0..14 {
                s.apply_gate(&GateOp::h(q)).unwrap();
            }
            s.apply_gate(&GateOp::phase(3, 0.3).controlled_by(&[7]).unwrap()).unwrap();
            s.apply_gate(&GateOp::permutation(vec![13, 0, 5], vec![1, 2, 3, 4, 5, 6, 7, 0]).unwrap())
                .unwrap();
            s.reduced_density(&[3, 7]).unwrap()
        };
        assert_eq!(build(Parallelism::Sequential), build(Parallelism::Auto));
    }

    fn random_gate(kind: u8, a: usize, b: usize, theta: f64) -> GateOp {
        let c2 = |re: f64, im: f64| Complex64::new(re, im);
        let (t, u) = if a == b { (a, (a + 1) % 4) } else { (a, b) };
        match kind % 6 {
            0 => GateOp::h(t),
            1 => GateOp::x(t).controlled_by(&[u]).unwrap(),
            2 => GateOp::phase(t, theta),
            3 => GateOp::permutation(vec![t, u], vec![2, 0, 3, 1]).unwrap(),
            4 => GateOp::diagonal(vec![t], vec![c2(1.0, 0.0), Complex64::from_polar(1.0, theta)]).unwrap(),
            _ => {
                let (s, co) = theta.sin_cos();
                let m = Matrix::new(
                    4,
                    vec![
                        c2(co, 0.0), c2(0.0, s), c2(0.0, 0.0), c2(0.0, 0.0),
                        c2(0.0, s), c2(co, 0.0), c2(0.0, 0.0), c2(0.0, 0.0),
                        c2(0.0, 0.0), c2(0.0, 0.0), c2(co, 0.0), c2(-s, 0.0),
                        c2(0.0, 0.0), c2(0.0, 0.0), c2(s, 0.0), c2(co, 0.0),
                    ],
                )
                .unwrap();
                GateOp::unitary(vec![t, u], m).unwrap()
            }
        }
    }

    proptest! {
        #[test]
        fn gates_preserve_norm_and_invert(
            gates in prop::collection::vec((0u8..6, 0usize..4, 0usize..4, -3.0f64..3.0), 1..12)
        ) {
            let mut s = StateVector::new(4).unwrap();
            for q in 0..4 {
                s.apply_gate(&GateOp::phase(q, 0.1 * q as f64)).unwrap();
                s.apply_gate(&GateOp::h(q)).unwrap();
            }
            let start = s.amplitudes().to_vec();
            let ops: Vec<GateOp> = gates.iter().map(|&(k, a, b, t)| random_gate(k, a, b, t)).collect();
            for op in &ops {
                s.apply_gate(op).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
            for op in ops.iter().rev() {
                s.apply_gate(&op.inverse()).unwrap();
            }
            for (x, y) in s.amplitudes().iter().zip(&start) {
                prop_assert!((x - y).norm() < 1e-10);
            }
        }

        #[test]
        fn permutation_commutes_with_reduction(table_seed in 0usize..24, theta in -3.0f64..3.0) {
            // random permutation on qubits 2,3 leaves the reduction onto 0,1 alone
            let mut perms: Vec<Vec<u32>> = Vec::new();
            let mut items = vec![0u32, 1, 2, 3];
            permute(&mut items, 0, &mut perms);
            let mut s = StateVector::new(4).unwrap();
            for q in 0..4 {
                s.apply_gate(&GateOp::h(q)).unwrap();
            }
            s.apply_gate(&GateOp::cx(0, 2).unwrap()).unwrap();
            s.apply_gate(&GateOp::phase(1, theta)).unwrap();
            s.apply_gate(&GateOp::cx(1, 3).unwrap()).unwrap();
            let before = s.reduced_density(&[0, 1]).unwrap();
            s.apply_gate(&GateOp::permutation(vec![2, 3], perms[table_seed].clone()).unwrap()).unwrap();
            let after = s.reduced_density(&[0, 1]).unwrap();
            prop_assert!(before.max_abs_diff(&after) < 1e-12);
            prop_assert!(after.validate().is_ok());
        }
    }

    fn permute(items: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, out);
            items.swap(k, i);
        }
    }
}
