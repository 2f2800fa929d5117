//! Phase estimation, the threshold oracle, diffusion and the Grover
//! training loop.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::network::QsinnCircuit;
use crate::error::{Error, Result};
use crate::nets::{dsinnn_forward, WeightSpace};
use crate::sim::{Circuit, DensityMatrix, GateOp, QuantumState, SparseState, StateVector, MAX_DENSE_QUBITS};

/// Smallest N′ with exact readout when N is a power of two; otherwise
/// `ceil(log2 2N) + 2` (two guard bits).
pub fn default_phase_bits(n: usize) -> usize {
    let two_n = (2 * n.max(1)) as u64;
    let bits = (u64::BITS - (two_n - 1).leading_zeros()) as usize;
    if n.max(1).is_power_of_two() {
        bits
    } else {
        bits + 2
    }
}

/// Oracle threshold separating `c` correct predictions from `c − 1`:
/// midway between the phase fractions `(c − 1)/2N` and `c/2N`.
pub fn threshold_for_count(c: usize, n: usize) -> f64 {
    (c as f64 - 0.5) / (2 * n) as f64
}

/// Inverse QFT with the register reversal first; reads `j₁ j₂ …` with `j₁`
/// on the first phase qubit.
pub fn inverse_qft(num_qubits: usize, phase: &[usize]) -> Result<Circuit> {
    let t = phase.len();
    let mut c = Circuit::new(num_qubits);
    if t > 1 {
        c.push(GateOp::permutation_from_fn(phase.to_vec(), |x| {
            (0..t).fold(0, |acc, b| acc | ((x >> b) & 1) << (t - 1 - b))
        })?)?;
    }
    for k in (0..t).rev() {
        for l in (k + 1..t).rev() {
            let angle = -2.0 * PI / (1u64 << (l - k + 1)) as f64;
            c.push(GateOp::phase(phase[k], angle).controlled_by(&[phase[l]])?)?;
        }
        c.push(GateOp::h(phase[k]))?;
    }
    Ok(c)
}

/// Hadamards, controlled `U^{2^{t−1−k}}` on phase qubit `k`, inverse QFT.
pub fn phase_estimation(u: Arc<Circuit>, phase: &[usize]) -> Result<Circuit> {
    if phase.is_empty() {
        return Err(Error::InvalidCircuit("phase estimation needs at least one phase qubit".into()));
    }
    let n = u.num_qubits();
    let t = phase.len();
    let mut c = Circuit::new(n);
    c.extend(phase.iter().map(|&q| GateOp::h(q)))?;
    for (k, &q) in phase.iter().enumerate() {
        c.push_repeat(u.clone(), 1u64 << (t - 1 - k), &[q])?;
    }
    c.append(&inverse_qft(n, phase)?)?;
    Ok(c)
}

/// `−1` on phase readouts `j ≥ τ`.
pub fn oracle_pm(tau: f64, phase: &[usize]) -> Result<GateOp> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidConfig(format!("threshold τ = {tau} must lie in (0, 1)")));
    }
    let dim = 1usize << phase.len();
    let diag = (0..dim)
        .map(|j| {
            let frac = j as f64 / dim as f64;
            Complex64::new(if frac >= tau { -1.0 } else { 1.0 }, 0.0)
        })
        .collect();
    GateOp::diagonal(phase.to_vec(), diag)
}

/// `H^⊗M (2|0⟩⟨0| − I) H^⊗M` on the weight qubits.
pub fn diffusion(num_qubits: usize, weights: &[usize]) -> Result<Circuit> {
    let mut c = Circuit::new(num_qubits);
    c.extend(weights.iter().map(|&q| GateOp::h(q)))?;
    let diag = (0..1usize << weights.len())
        .map(|i| Complex64::new(if i == 0 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    c.push(GateOp::diagonal(weights.to_vec(), diag)?)?;
    c.extend(weights.iter().map(|&q| GateOp::h(q)))?;
    Ok(c)
}

/// Upper bound on Grover iterations per round: `floor(π/4·√2^M) + 1`.
pub fn iteration_cap(num_weights: usize) -> u64 {
    (FRAC_PI_4 * 2f64.powi(num_weights as i32).sqrt()).floor() as u64 + 1
}

/// Iteration schedule 1, 2, 3, 4, 6, 8, 11, … (`r ← max(r + 1, ⌈1.28 r⌉)`).
pub fn next_iteration_count(r: u64) -> u64 {
    (r + 1).max((1.28 * r as f64).ceil() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Backend {
    Dense,
    Sparse,
    /// Sparse: every block here is a basis permutation up to phases, so the
    /// support stays at `2^(M + N′)` entries.
    #[default]
    Auto,
}

/// The circuits of one Grover iteration for a given network.
pub struct GroverCircuits {
    pub network: QsinnCircuit,
    pub u: Arc<Circuit>,
    pub pe: Circuit,
    pub pe_inv: Circuit,
    pub diffusion: Circuit,
}

impl GroverCircuits {
    pub fn new(network: QsinnCircuit) -> Result<Self> {
        let u = network.unitary()?;
        let pe = phase_estimation(u.clone(), &network.layout.phase)?;
        let pe_inv = pe.inverse();
        let diffusion = diffusion(network.num_qubits(), &network.layout.weights)?;
        Ok(GroverCircuits {
            network,
            u,
            pe,
            pe_inv,
            diffusion,
        })
    }

    pub fn uniform<S: QuantumState>(&self, mut state: S) -> Result<S> {
        for &q in &self.network.layout.weights {
            state.apply_gate(&GateOp::h(q))?;
        }
        Ok(state)
    }

    /// `D · PE⁻¹ · O± · PE`.
    pub fn iterate<S: QuantumState>(&self, state: &mut S, oracle: &GateOp) -> Result<()> {
        self.pe.run(state)?;
        state.apply_gate(oracle)?;
        self.pe_inv.run(state)?;
        self.diffusion.run(state)
    }

    /// Probability that phase estimation on `state` reads `j ≥ τ`.
    pub fn success_probability<S: QuantumState + Clone>(&self, state: &S, tau: f64) -> Result<f64> {
        Ok(self.readout(state, tau)?.success_probability)
    }

    /// Measure phase and weight registers after phase estimation.
    pub fn readout<S: QuantumState + Clone>(&self, state: &S, tau: f64) -> Result<Readout> {
        let layout = &self.network.layout;
        let mut probe = state.clone();
        self.pe.run(&mut probe)?;
        let qubits: Vec<usize> = layout.phase.iter().chain(&layout.weights).copied().collect();
        let joint = probe.marginal_probabilities(&qubits)?;
        let m = layout.weights.len();
        let dim = (1usize << layout.phase.len()) as f64;
        let mut marked = vec![0.0; 1 << m];
        for (idx, p) in joint.iter().enumerate() {
            if (idx >> m) as f64 / dim >= tau {
                marked[idx & ((1 << m) - 1)] += p;
            }
        }
        let success_probability: f64 = marked.iter().sum();
        if success_probability > 0.0 {
            marked.iter_mut().for_each(|p| *p /= success_probability);
        }
        Ok(Readout {
            success_probability,
            marked_weights: marked,
        })
    }
}

/// Joint phase/weight measurement statistics for one threshold.
#[derive(Debug, Clone)]
pub struct Readout {
    pub success_probability: f64,
    /// Weight distribution conditioned on a marked phase readout (all zero
    /// when nothing is marked).
    pub marked_weights: Vec<f64>,
}

/// Classical correct-prediction count of one weight branch.
pub fn classical_correct_count(network: &QsinnCircuit, bits: u64) -> Result<usize> {
    let cfg = network.classical_config();
    let w = WeightSpace::from_bits(bits, network.num_weights());
    let mut count = 0;
    for row in &network.dataset.rows {
        if dsinnn_forward(&cfg, &w, row.x())? == row.y {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QTrainConfig {
    pub hidden: Vec<usize>,
    /// N′; `None` picks [`default_phase_bits`].
    pub phase_bits: Option<usize>,
    /// Threshold precision δ: at most `ceil(log2(N/δ))` rounds.
    pub delta: f64,
    pub backend: Backend,
    /// Weight index whose qubit carries the checker phase.
    pub phase_carrier: usize,
    /// A round succeeds once the marked readout probability reaches this.
    pub success_threshold: f64,
}

impl Default for QTrainConfig {
    fn default() -> Self {
        QTrainConfig {
            hidden: vec![2],
            phase_bits: None,
            delta: 0.1,
            backend: Backend::Auto,
            phase_carrier: 0,
            success_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Found,
    /// No threshold round produced a verified weight string.
    NoImprovement,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundReport {
    pub count_threshold: usize,
    pub tau: f64,
    /// Largest iteration count reached in this round.
    pub iterations: u64,
    /// Iteration count at the best readout.
    pub best_iterations: u64,
    pub success_probability: f64,
    pub succeeded: bool,
    pub verified: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub num_qubits: usize,
    pub phase_bits: usize,
    pub rounds: Vec<RoundReport>,
    /// Sum over rounds of the iterations applied coherently.
    pub grover_iterations: u64,
    /// Sum of every iteration count probed (cost with restarts per probe).
    pub restart_iterations: u64,
    pub pe_invocations: u64,
    pub classical_checks: u64,
    /// `N·2^M` forward evaluations of an exhaustive search.
    pub classical_calls_bruteforce: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QTrainResult {
    pub outcome: Outcome,
    pub bits: Option<u64>,
    pub correct_count: Option<usize>,
    /// Weight-register distribution of the final state.
    pub weight_distribution: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// Descending-threshold Grover search over the weight register.
pub fn grover_train(dataset: super::QDataset, cfg: &QTrainConfig) -> Result<QTrainResult> {
    if dataset.is_empty() {
        return Err(Error::InvalidDataset("quantum training needs at least one pair".into()));
    }
    if cfg.delta.is_nan() || cfg.delta <= 0.0 {
        return Err(Error::InvalidConfig("delta must be positive".into()));
    }
    let n = dataset.len();
    let t = cfg.phase_bits.unwrap_or_else(|| default_phase_bits(n));
    let network = QsinnCircuit::new(&cfg.hidden, dataset, t, cfg.phase_carrier)?;
    let q = network.num_qubits();
    let circuits = GroverCircuits::new(network)?;
    match cfg.backend {
        Backend::Dense => {
            if q > MAX_DENSE_QUBITS {
                return Err(Error::TooManyQubits {
                    requested: q,
                    limit: MAX_DENSE_QUBITS,
                });
            }
            run_rounds(&circuits, cfg, StateVector::new(q)?)
        }
        Backend::Sparse | Backend::Auto => run_rounds(&circuits, cfg, SparseState::new(q)?),
    }
}

fn run_rounds<S: QuantumState + Clone>(g: &GroverCircuits, cfg: &QTrainConfig, zero: S) -> Result<QTrainResult> {
    let net = &g.network;
    let n = net.dataset.len();
    let m = net.num_weights();
    let cap = iteration_cap(m);
    let max_rounds = ((n as f64 / cfg.delta).log2().ceil() as usize).max(1);
    let mut diag = Diagnostics {
        num_qubits: net.num_qubits(),
        phase_bits: net.layout.phase.len(),
        classical_calls_bruteforce: (n as u64) << m,
        ..Default::default()
    };
    let uniform = g.uniform(zero)?;
    let mut last_distribution = uniform.marginal_probabilities(&net.layout.weights)?;

    for c in (1..=n).rev().take(max_rounds) {
        let tau = threshold_for_count(c, n);
        let oracle = oracle_pm(tau, &net.layout.phase)?;
        let mut cur = uniform.clone();
        let mut r = 0u64;
        let mut read = g.readout(&cur, tau)?;
        let mut p = read.success_probability;
        diag.pe_invocations += 1;
        let mut best = (p, 0u64, cur.clone(), read);
        let mut next = 1u64;
        while next <= cap {
            if best.0 >= cfg.success_threshold - 1e-9 && p < best.0 {
                break;
            }
            for _ in r..next {
                g.iterate(&mut cur, &oracle)?;
                diag.pe_invocations += 2;
            }
            r = next;
            diag.restart_iterations += r;
            read = g.readout(&cur, tau)?;
            p = read.success_probability;
            diag.pe_invocations += 1;
            if p > best.0 {
                best = (p, r, cur.clone(), read);
            }
            next = next_iteration_count(next);
        }
        diag.grover_iterations += r;
        let succeeded = best.0 >= cfg.success_threshold - 1e-9;
        let mut report = RoundReport {
            count_threshold: c,
            tau,
            iterations: r,
            best_iterations: best.1,
            success_probability: best.0,
            succeeded,
            verified: false,
        };
        let distribution = best.2.marginal_probabilities(&net.layout.weights)?;
        last_distribution = distribution.clone();
        if succeeded {
            let top = argmax(&best.3.marked_weights);
            diag.classical_checks += 1;
            let count = classical_correct_count(net, top)?;
            if count >= c {
                report.verified = true;
                diag.rounds.push(report);
                return Ok(QTrainResult {
                    outcome: Outcome::Found,
                    bits: Some(top),
                    correct_count: Some(count),
                    weight_distribution: distribution,
                    diagnostics: diag,
                });
            }
        }
        diag.rounds.push(report);
    }
    Ok(QTrainResult {
        outcome: Outcome::NoImprovement,
        bits: None,
        correct_count: None,
        weight_distribution: last_distribution,
        diagnostics: diag,
    })
}

/// Index of the largest entry; ties go to the smallest index.
fn argmax(v: &[f64]) -> u64 {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] + 1e-12 {
            best = i;
        }
    }
    best as u64
}

/// Eigenphase of `U` on one weight branch.
#[derive(Debug, Clone, Serialize)]
pub struct BranchPhase {
    pub bits: u64,
    /// `arg` in `[0, 2π)`.
    pub phase: f64,
    pub modulus: f64,
    /// All non-weight qubits returned to |0⟩.
    pub clean: bool,
}

/// Apply `U` to each weight basis state and read its eigenvalue.
pub fn branch_eigenphases(net: &QsinnCircuit) -> Result<Vec<BranchPhase>> {
    let u = net.unitary()?;
    (0..1u64 << net.num_weights())
        .map(|bits| {
            let idx = net.weight_basis_index(bits);
            let mut s = SparseState::basis(net.num_qubits(), idx)?;
            u.run(&mut s)?;
            let (clean, amp) = match s.entries() {
                [(k, a)] if *k == idx => (true, *a),
                _ => (false, s.amplitude(idx)),
            };
            Ok(BranchPhase {
                bits,
                phase: amp.arg().rem_euclid(2.0 * PI),
                modulus: amp.norm(),
                clean,
            })
        })
        .collect()
}

/// Smallest distance between two angles.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Reduced density matrices captured along a fixed-length run.
#[derive(Debug, Clone)]
pub struct PipelineSnapshots {
    /// Phase register right after the last phase estimation.
    pub phase: DensityMatrix,
    /// Weight register after the last oracle and uncompute.
    pub weight: DensityMatrix,
    /// Weight register after the last diffusion.
    pub final_weight: DensityMatrix,
    /// Probability that every work qubit is back in |0⟩ at the end.
    pub work_clean_probability: f64,
    pub norm: f64,
}

/// Run `iterations` Grover iterations with a fixed threshold from the
/// uniform weight state, recording the last iteration's snapshots.
pub fn run_fixed_pipeline<S: QuantumState + Clone>(
    g: &GroverCircuits,
    tau: f64,
    iterations: u64,
    zero: S,
) -> Result<PipelineSnapshots> {
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    let layout = &g.network.layout;
    let oracle = oracle_pm(tau, &layout.phase)?;
    let mut s = g.uniform(zero)?;
    let mut phase = None;
    let mut weight = None;
    for _ in 0..iterations {
        g.pe.run(&mut s)?;
        phase = Some(s.reduced_density(&layout.phase)?);
        s.apply_gate(&oracle)?;
        g.pe_inv.run(&mut s)?;
        weight = Some(s.reduced_density(&layout.weights)?);
        g.diffusion.run(&mut s)?;
    }
    let mut rest: Vec<usize> = layout.phase.clone();
    rest.extend(layout.work_qubits());
    let clean = s.zero_probability(&rest)?;
    Ok(PipelineSnapshots {
        phase: phase.expect("at least one iteration"),
        weight: weight.expect("at least one iteration"),
        final_weight: s.reduced_density(&layout.weights)?,
        work_clean_probability: clean,
        norm: s.norm_sqr(),
    })
}
