//! Reversible building blocks: the sine circuit, the plus circuit and the
//! classical truth functions they are checked against.

use std::f64::consts::PI;

use serde::Serialize;

use super::encoding::{bit_length, decode_sign_magnitude, sign_magnitude_bits};
use crate::error::{Error, Result};
use crate::nets::ternary_discretize;
use crate::sim::{Circuit, GateOp, QuantumState, SparseState, StateVector};

/// Largest scale for which the circuit reproduces `D′(sin z)` exactly:
/// `sin(π/2ⁿ)` must exceed the 0.1 dead zone.
pub const MAX_SINE_SCALE: u32 = 4;

/// `(α_sign, α_value)` for a sign bit and magnitude `|k|` at scale `n`.
pub fn sine_bits(sign: bool, magnitude: u64, n: u32) -> (bool, bool) {
    let b_n = (magnitude >> n) & 1 == 1;
    let low = magnitude & ((1u64 << n) - 1) != 0;
    (sign ^ b_n, low)
}

/// Ternary value of a `(sign, value)` qubit pair: `00, 10 → 0`, `01 → +1`,
/// `11 → −1`.
pub fn ternary_value(sign: bool, value: bool) -> i64 {
    match (sign, value) {
        (_, false) => 0,
        (false, true) => 1,
        (true, true) => -1,
    }
}

fn check_scale(n: u32) -> Result<()> {
    if n == 0 || n > MAX_SINE_SCALE {
        return Err(Error::InvalidCircuit(format!(
            "sine circuit scale n = {n} outside 1..={MAX_SINE_SCALE}"
        )));
    }
    Ok(())
}

/// Standalone sine circuit on `m + 3` qubits: input `[sign, b_{m−1} … b_0]`
/// followed by the `α_sign` and `α_value` ancillas, which receive
/// `sign ⊕ b_n` and `b_0 ∨ … ∨ b_{n−1}` by XOR.
///
/// When `m = n` the magnitude register is read as zero-extended, so `b_n = 0`.
pub fn sine_circuit(m: u32, n: u32) -> Result<Circuit> {
    check_scale(n)?;
    if m < n {
        return Err(Error::InvalidCircuit(format!("magnitude width {m} < scale {n}")));
    }
    let m = m as usize;
    let bit = |i: u32| 1 + (m - 1 - i as usize);
    let (a_s, a_v) = (m + 1, m + 2);
    let mut c = Circuit::new(m + 3);
    c.push(GateOp::cx(0, a_s)?)?;
    if (n as usize) < m {
        c.push(GateOp::cx(bit(n), a_s)?)?;
    }
    let low: Vec<usize> = (0..n).map(bit).collect();
    c.extend(or_into(&low, a_v)?)?;
    Ok(c)
}

/// `target ^= OR(bits)` via De Morgan: flip the inputs, AND them into the
/// target, flip the target, restore the inputs.
fn or_into(bits: &[usize], target: usize) -> Result<Vec<GateOp>> {
    if bits.is_empty() {
        return Ok(Vec::new());
    }
    let mut ops: Vec<GateOp> = bits.iter().map(|&q| GateOp::x(q)).collect();
    ops.push(GateOp::mcx(bits, target)?);
    ops.push(GateOp::x(target));
    ops.extend(bits.iter().map(|&q| GateOp::x(q)));
    Ok(ops)
}

/// Qubits holding a neuron's ternary output after [`sine_in_place`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TernaryPair {
    pub sign: usize,
    pub value: usize,
}

/// Whether [`sine_in_place`] needs a fresh value ancilla.
pub fn sine_needs_ancilla(magnitude_bits: usize, n: u32) -> bool {
    !(n == 1 && magnitude_bits >= 1)
}

/// In-place sine: `α_sign` overwrites the sign qubit (CNOT from `b_n`);
/// `α_value` is `b_0` itself when `n = 1`, otherwise it is ORed into
/// `value_ancilla`. The magnitude register is left as is.
pub fn sine_in_place(
    sign: usize,
    magnitude: &[usize],
    n: u32,
    value_ancilla: Option<usize>,
) -> Result<(Vec<GateOp>, TernaryPair)> {
    check_scale(n)?;
    let m = magnitude.len();
    let bit = |i: usize| magnitude[m - 1 - i];
    let mut ops = Vec::new();
    if (n as usize) < m {
        ops.push(GateOp::cx(bit(n as usize), sign)?);
    }
    let value = if sine_needs_ancilla(m, n) {
        let anc = value_ancilla
            .ok_or_else(|| Error::InvalidCircuit("sine circuit needs a value ancilla".into()))?;
        let low: Vec<usize> = (0..(n as usize).min(m)).map(bit).collect();
        ops.extend(or_into(&low, anc)?);
        anc
    } else {
        bit(0)
    };
    Ok((ops, TernaryPair { sign, value }))
}

/// Bits of the plus circuit's two's-complement registers for `fan_in`
/// ternary inputs.
pub fn plus_width(fan_in: usize) -> u32 {
    1 + bit_length(fan_in as u64)
}

pub fn twos_complement_negate(x: u64, width: u32) -> u64 {
    x.wrapping_neg() & mask(width)
}

pub fn add_mod(a: u64, b: u64, width: u32) -> u64 {
    a.wrapping_add(b) & mask(width)
}

/// Two's complement to sign-magnitude: a leading 1 keeps the sign, and the
/// remaining bits become `¬(bits − 1)`.
pub fn twos_to_sign_magnitude(x: u64, width: u32) -> u64 {
    let top = 1u64 << (width - 1);
    if x & top == 0 {
        return x;
    }
    let low = mask(width - 1);
    top | (!((x & low).wrapping_sub(1)) & low)
}

fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// `(count of +1, count of −1)` in a packed list of pairs, first pair most
/// significant, each pair `(sign, value)`.
fn counts(packed: u64, fan_in: usize) -> (u64, u64) {
    let mut pos = 0;
    let mut neg = 0;
    for i in 0..fan_in {
        let pair = (packed >> (2 * (fan_in - 1 - i))) & 0b11;
        match ternary_value(pair & 0b10 != 0, pair & 0b01 != 0) {
            1 => pos += 1,
            -1 => neg += 1,
            _ => {}
        }
    }
    (pos, neg)
}

fn pair_targets(pairs: &[TernaryPair]) -> Vec<usize> {
    pairs.iter().flat_map(|p| [p.sign, p.value]).collect()
}

/// One permutation: `out ^= sign_magnitude(Σ ternary(pair_i))`.
pub fn plus_fused(pairs: &[TernaryPair], out: &[usize]) -> Result<GateOp> {
    let f = pairs.len();
    let w = out.len() as u32;
    if w < plus_width(f) {
        return Err(Error::InvalidCircuit(format!(
            "sum register of {w} qubits too narrow for fan-in {f}"
        )));
    }
    let mut targets = pair_targets(pairs);
    targets.extend_from_slice(out);
    let wmask = mask(w);
    GateOp::permutation_from_fn(targets, |idx| {
        let idx = idx as u64;
        let (pos, neg) = counts(idx >> w, f);
        let sum = pos as i64 - neg as i64;
        let sm = sign_magnitude_bits(sum, w).expect("width checked");
        (idx & !wmask | ((idx & wmask) ^ sm)) as u32
    })
}

/// The same sum in four permutation stages over two `plus_width` registers:
/// count `+1`s into `p` and `−1`s into `q`; negate `q` in two's complement;
/// `p ← p + q`; convert `p` to sign-magnitude. `q` keeps `−count(−1)`.
pub fn plus_staged(pairs: &[TernaryPair], p: &[usize], q: &[usize]) -> Result<Vec<GateOp>> {
    let f = pairs.len();
    let w = plus_width(f);
    if p.len() != w as usize || q.len() != w as usize {
        return Err(Error::InvalidCircuit(format!("plus registers must have {w} qubits")));
    }
    let mut count_targets = pair_targets(pairs);
    count_targets.extend_from_slice(p);
    count_targets.extend_from_slice(q);
    let wm = mask(w);
    let count = GateOp::permutation_from_fn(count_targets, |idx| {
        let idx = idx as u64;
        let (pos, neg) = counts(idx >> (2 * w), f);
        let pv = ((idx >> w) & wm) ^ pos;
        let qv = (idx & wm) ^ neg;
        ((idx >> (2 * w)) << (2 * w) | pv << w | qv) as u32
    })?;
    let negate = GateOp::permutation_from_fn(q.to_vec(), |x| twos_complement_negate(x as u64, w) as u32)?;
    let mut pq = p.to_vec();
    pq.extend_from_slice(q);
    let add = GateOp::permutation_from_fn(pq, |idx| {
        let (a, b) = ((idx as u64 >> w) & wm, idx as u64 & wm);
        (add_mod(a, b, w) << w | b) as u32
    })?;
    let convert = GateOp::permutation_from_fn(p.to_vec(), |x| twos_to_sign_magnitude(x as u64, w) as u32)?;
    Ok(vec![count, negate, add, convert])
}

/// Pass/fail tally of an exhaustive equivalence check.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

/// Read the basis state of a state that must be a single basis vector.
fn basis_index<S: QuantumState>(s: &S, dim_hint: u64) -> Option<u64> {
    (0..dim_hint).find(|&i| (s.amplitude(i).norm_sqr() - 1.0).abs() < 1e-9)
}

/// Every encoding with `n ∈ 1..=max_n`, `m ∈ n..=max_m`, both sign bits:
/// the simulated sine circuit must decode to `D′(sin z)`.
pub fn verify_sine(max_n: u32, max_m: u32) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        name: "sine".into(),
        ..Default::default()
    };
    for n in 1..=max_n {
        for m in n..=max_m {
            let circuit = sine_circuit(m, n)?;
            let q = m as usize + 3;
            for input in 0..1u64 << (m + 1) {
                let mut s = StateVector::basis(q, input << 2)?;
                circuit.run(&mut s)?;
                let out = basis_index(&s, 1 << q);
                let sign = input >> m & 1 == 1;
                let magnitude = input & mask(m);
                let k = if sign { -(magnitude as i64) } else { magnitude as i64 };
                let expected = ternary_discretize((k as f64 * PI / 2f64.powi(n as i32)).sin())? as i64;
                let ok = match out {
                    Some(o) if o >> 2 == input => ternary_value(o & 0b10 != 0, o & 0b01 != 0) == expected,
                    _ => false,
                };
                report.cases += 1;
                report.failures += (!ok) as u64;
            }
        }
    }
    Ok(report)
}

/// Every `(sign, value)` input tuple with fan-in `1..=max_fan_in`, through
/// both the fused and the staged plus circuit.
pub fn verify_plus(max_fan_in: usize) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        name: "plus".into(),
        ..Default::default()
    };
    for f in 1..=max_fan_in {
        let w = plus_width(f) as usize;
        let pairs: Vec<TernaryPair> = (0..f)
            .map(|i| TernaryPair {
                sign: 2 * i,
                value: 2 * i + 1,
            })
            .collect();
        let out: Vec<usize> = (2 * f..2 * f + w).collect();
        let fused = plus_fused(&pairs, &out)?;
        let q: Vec<usize> = (2 * f + w..2 * f + 2 * w).collect();
        let staged = plus_staged(&pairs, &out, &q)?;
        for input in 0..1u64 << (2 * f) {
            let expected: i64 = (0..f)
                .map(|i| {
                    let pair = input >> (2 * (f - 1 - i)) & 0b11;
                    ternary_value(pair & 0b10 != 0, pair & 0b01 != 0)
                })
                .sum();

            let nq = 2 * f + w;
            let mut s = SparseState::basis(nq, input << w)?;
            s.apply_gate(&fused)?;
            let ok_fused = single_entry(&s).is_some_and(|o| {
                o >> w == input && decode_sign_magnitude(o & mask(w as u32), w as u32) == expected
            });

            let nq = 2 * f + 2 * w;
            let mut s = SparseState::basis(nq, input << (2 * w))?;
            for op in &staged {
                s.apply_gate(op)?;
            }
            let ok_staged = single_entry(&s).is_some_and(|o| {
                let p = (o >> w) & mask(w as u32);
                o >> (2 * w) == input && decode_sign_magnitude(p, w as u32) == expected
            });

            report.cases += 2;
            report.failures += (!ok_fused) as u64 + (!ok_staged) as u64;
        }
    }
    Ok(report)
}

fn single_entry(s: &SparseState) -> Option<u64> {
    match s.entries() {
        [(k, a)] if (a.norm_sqr() - 1.0).abs() < 1e-12 => Some(*k),
        _ => None,
    }
}
