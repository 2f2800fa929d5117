//! Register layout and the per-pair unitaries `U_i = FC_i⁻¹ · φ · FC_i`,
//! where `FC_i` encodes pair `i`, runs the forward pass and computes the
//! equality flags of the checker.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::blocks::{plus_fused, plus_width, sine_in_place, sine_needs_ancilla};
use super::encoding::{bit_length, sign_magnitude_bits, InputCodec, QDataset, QRow};
use crate::error::{Error, Result};
use crate::nets::NetworkConfig;
use crate::sim::{Circuit, GateOp, Matrix, SparseState, MAX_SPARSE_QUBITS};

/// Scale exponent `n'` of a deeper layer with the given fan-in:
/// `λ = π/2^{n'}`, `n' = max(1, floor(log2 fan_in) − 1)`.
pub fn deep_scale_exponent(fan_in: usize) -> u32 {
    let m = bit_length(fan_in as u64) as i64 - 1;
    (m - 1).max(1) as u32
}

/// Qubit indices of every register, in allocation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub num_qubits: usize,
    pub phase: Vec<usize>,
    pub weights: Vec<usize>,
    /// Per first-layer neuron: `[sign, b_{m−1} … b_0]`.
    pub inputs: Vec<Vec<usize>>,
    /// Per deeper layer, per neuron: sign-magnitude sum register.
    pub sums: Vec<Vec<Vec<usize>>>,
    pub value_ancillas: Vec<usize>,
    pub output: Vec<usize>,
    pub target: Vec<usize>,
    pub eq: Vec<usize>,
    pub and: usize,
    /// Weight qubit that carries the checker phase.
    pub phase_carrier: usize,
}

impl Layout {
    /// Every qubit other than phase and weight qubits.
    pub fn work_qubits(&self) -> Vec<usize> {
        let first = self.phase.len() + self.weights.len();
        (first..self.num_qubits).collect()
    }
}

struct Alloc(usize);

impl Alloc {
    fn take(&mut self, k: usize) -> Vec<usize> {
        let r = (self.0..self.0 + k).collect();
        self.0 += k;
        r
    }
}

/// The network unitary `U = U_N ⋯ U_1` for a discrete network on an exactly
/// encodable dataset.
#[derive(Debug, Clone)]
pub struct QsinnCircuit {
    pub hidden: Vec<usize>,
    pub dataset: QDataset,
    pub codec: InputCodec,
    pub output_width: u32,
    pub deep_scales: Vec<u32>,
    pub layout: Layout,
    forward: Vec<GateOp>,
    compare: Vec<GateOp>,
}

impl QsinnCircuit {
    /// `hidden`: hidden widths of a scalar-input network. `phase_bits`: N′.
    /// `phase_carrier`: index of the weight qubit the checker phase targets.
    pub fn new(hidden: &[usize], dataset: QDataset, phase_bits: usize, phase_carrier: usize) -> Result<Self> {
        if hidden.is_empty() || hidden.contains(&0) {
            return Err(Error::InvalidNetwork("hidden widths must be non-empty and positive".into()));
        }
        let codec = dataset.codec();
        if codec.n > super::blocks::MAX_SINE_SCALE {
            return Err(Error::InvalidCircuit(format!(
                "input scale n = {} exceeds {}",
                codec.n,
                super::blocks::MAX_SINE_SCALE
            )));
        }
        let cfg = NetworkConfig::dsinnn(hidden, 0.0);
        let num_weights = cfg.num_weights();
        if phase_carrier >= num_weights {
            return Err(Error::InvalidCircuit(format!(
                "phase carrier {phase_carrier} is not one of {num_weights} weight qubits"
            )));
        }
        let deep_scales: Vec<u32> = hidden[..hidden.len() - 1].iter().map(|&f| deep_scale_exponent(f)).collect();
        if let Some(&s) = deep_scales.iter().find(|&&s| s > super::blocks::MAX_SINE_SCALE) {
            return Err(Error::InvalidCircuit(format!("deep layer scale n' = {s} too fine")));
        }
        let last = *hidden.last().unwrap();
        let output_width = 1 + bit_length((last as u64).max(dataset.max_abs_target()));

        let mut alloc = Alloc(0);
        let phase = alloc.take(phase_bits);
        let weights = alloc.take(num_weights);
        let inputs: Vec<Vec<usize>> = (0..hidden[0]).map(|_| alloc.take(codec.register_width())).collect();
        let mut value_ancillas = Vec::new();
        let mut forward = Vec::new();

        // First layer: weight-controlled sign flip, then in-place sine.
        let mut pairs = Vec::with_capacity(hidden[0]);
        for (j, reg) in inputs.iter().enumerate() {
            forward.push(GateOp::cx(weights[j], reg[0])?);
            let anc = if sine_needs_ancilla(codec.m as usize, codec.n) {
                let a = alloc.take(1)[0];
                value_ancillas.push(a);
                Some(a)
            } else {
                None
            };
            let (ops, pair) = sine_in_place(reg[0], &reg[1..], codec.n, anc)?;
            forward.extend(ops);
            pairs.push(pair);
        }

        // Deeper layers: signed sum of the previous outputs, then sine.
        let mut sums = Vec::new();
        let mut w_offset = hidden[0];
        for (l, win) in hidden.windows(2).enumerate() {
            let (fan_in, fan_out) = (win[0], win[1]);
            let width = plus_width(fan_in) as usize;
            let mut regs = Vec::with_capacity(fan_out);
            let mut next = Vec::with_capacity(fan_out);
            for j in 0..fan_out {
                let reg = alloc.take(width);
                let flips: Vec<GateOp> = (0..fan_in)
                    .map(|i| GateOp::cx(weights[w_offset + j * fan_in + i], pairs[i].sign))
                    .collect::<Result<_>>()?;
                forward.extend(flips.iter().cloned());
                forward.push(plus_fused(&pairs, &reg)?);
                forward.extend(flips);
                let anc = if sine_needs_ancilla(width - 1, deep_scales[l]) {
                    let a = alloc.take(1)[0];
                    value_ancillas.push(a);
                    Some(a)
                } else {
                    None
                };
                let (ops, pair) = sine_in_place(reg[0], &reg[1..], deep_scales[l], anc)?;
                forward.extend(ops);
                next.push(pair);
                regs.push(reg);
            }
            w_offset += fan_in * fan_out;
            sums.push(regs);
            pairs = next;
        }

        let output = alloc.take(output_width as usize);
        forward.push(plus_fused(&pairs, &output)?);
        let target = alloc.take(output_width as usize);
        let eq = alloc.take(output_width as usize);
        let and = alloc.take(1)[0];

        let mut compare = Vec::new();
        for b in 0..output.len() {
            compare.push(GateOp::cx(output[b], eq[b])?);
            compare.push(GateOp::cx(target[b], eq[b])?);
            compare.push(GateOp::x(eq[b]));
        }
        compare.push(GateOp::mcx(&eq, and)?);

        if alloc.0 > MAX_SPARSE_QUBITS {
            return Err(Error::TooManyQubits {
                requested: alloc.0,
                limit: MAX_SPARSE_QUBITS,
            });
        }
        let layout = Layout {
            num_qubits: alloc.0,
            phase,
            phase_carrier: weights[phase_carrier],
            weights,
            inputs,
            sums,
            value_ancillas,
            output,
            target,
            eq,
            and,
        };
        Ok(QsinnCircuit {
            hidden: hidden.to_vec(),
            dataset,
            codec,
            output_width,
            deep_scales,
            layout,
            forward,
            compare,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits
    }

    pub fn num_weights(&self) -> usize {
        self.layout.weights.len()
    }

    /// Classical network computing the same function.
    pub fn classical_config(&self) -> NetworkConfig {
        NetworkConfig::dsinnn(&self.hidden, 0.0)
    }

    /// Phase per correct prediction, `π/N`.
    pub fn phase_unit(&self) -> f64 {
        PI / self.dataset.len().max(1) as f64
    }

    /// X gates preparing input copies and target for one pair.
    pub fn encoding_ops(&self, row: &QRow) -> Result<Vec<GateOp>> {
        let enc = self.codec.encode(row)?;
        let mut ops = Vec::new();
        for reg in &self.layout.inputs {
            for (q, bit) in reg.iter().zip(enc.bits()) {
                if bit {
                    ops.push(GateOp::x(*q));
                }
            }
        }
        let y = sign_magnitude_bits(row.y, self.output_width)?;
        let w = self.output_width as usize;
        for (b, &q) in self.layout.target.iter().enumerate() {
            if (y >> (w - 1 - b)) & 1 == 1 {
                ops.push(GateOp::x(q));
            }
        }
        Ok(ops)
    }

    /// Encode, forward pass: leaves ŷ in the output register.
    pub fn feed_forward(&self, row: &QRow) -> Result<Circuit> {
        let mut c = Circuit::new(self.num_qubits());
        c.extend(self.encoding_ops(row)?)?;
        c.extend(self.forward.iter().cloned())?;
        Ok(c)
    }

    /// Feed-forward followed by the equality flags of the checker.
    pub fn forward_compare(&self, row: &QRow) -> Result<Circuit> {
        let mut c = self.feed_forward(row)?;
        c.extend(self.compare.iter().cloned())?;
        Ok(c)
    }

    /// `e^{iπ/N}` on the carrier weight qubit, controlled on the match flag.
    /// The gate is `e^{iπ/N}·I` on the carrier, so the phase does not depend
    /// on the carrier's value.
    pub fn checker_phase(&self) -> Result<GateOp> {
        let p = Complex64::from_polar(1.0, self.phase_unit());
        let z = Complex64::new(0.0, 0.0);
        let m = Matrix::new(2, vec![p, z, z, p])?;
        GateOp::unitary(vec![self.layout.phase_carrier], m)?.controlled_by(&[self.layout.and])
    }

    pub fn pair_unitary(&self, row: &QRow) -> Result<Circuit> {
        let fc = self.forward_compare(row)?;
        let mut u = fc.clone();
        u.push(self.checker_phase()?)?;
        u.append(&fc.inverse())?;
        Ok(u)
    }

    /// `U = U_N ⋯ U_1` (`U_1` acts first).
    pub fn unitary(&self) -> Result<Arc<Circuit>> {
        let mut u = Circuit::new(self.num_qubits());
        for row in &self.dataset.rows {
            u.append(&self.pair_unitary(row)?)?;
        }
        Ok(Arc::new(u))
    }

    /// Basis index with the given weight bits and all other qubits zero.
    pub fn weight_basis_index(&self, bits: u64) -> u64 {
        let n = self.num_qubits();
        let m = self.num_weights();
        self.layout
            .weights
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &q)| acc | ((bits >> (m - 1 - i)) & 1) << (n - 1 - q))
    }

    /// Prediction register value after the forward pass on one weight branch.
    pub fn simulate_prediction(&self, bits: u64, row: &QRow) -> Result<i64> {
        let mut s = SparseState::basis(self.num_qubits(), self.weight_basis_index(bits))?;
        self.feed_forward(row)?.run(&mut s)?;
        let [(k, _)] = s.entries() else {
            return Err(Error::InvalidCircuit("forward pass left a superposition".into()));
        };
        let n = self.num_qubits();
        let w = self.output_width;
        let out = self
            .layout
            .output
            .iter()
            .fold(0u64, |acc, &q| acc << 1 | (k >> (n - 1 - q)) & 1);
        Ok(super::encoding::decode_sign_magnitude(out, w))
    }
}
