use std::sync::Arc;

use num_complex::Complex64;

use super::gate::GateOp;
use super::QuantumState;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum Instruction {
    Gate(GateOp),
    /// `body^power`, conditioned on every qubit in `controls`.
    Repeat {
        body: Arc<Circuit>,
        power: u64,
        controls: Vec<usize>,
    },
}

/// Ordered list of instructions over a fixed qubit count.
#[derive(Debug, Clone)]
pub struct Circuit {
    num_qubits: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        self.instructions.push(Instruction::Gate(op));
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<()> {
        for op in ops {
            self.push(op)?;
        }
        Ok(())
    }

    /// Append all instructions of `other` (same qubit count).
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::InvalidCircuit(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            )));
        }
        self.instructions.extend(other.instructions.iter().cloned());
        Ok(())
    }

    /// Append `body^power` controlled on `controls`. The body must not act
    /// on any control qubit.
    pub fn push_repeat(&mut self, body: Arc<Circuit>, power: u64, controls: &[usize]) -> Result<()> {
        if body.num_qubits != self.num_qubits {
            return Err(Error::InvalidCircuit("repeat body has a different qubit count".into()));
        }
        for &c in controls {
            if c >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: c,
                    num_qubits: self.num_qubits,
                });
            }
            if body.touches(c) {
                return Err(Error::OverlappingQubits(c));
            }
        }
        self.instructions.push(Instruction::Repeat {
            body,
            power,
            controls: controls.to_vec(),
        });
        Ok(())
    }

    /// Whether any gate of the circuit targets or is controlled by `q`.
    pub fn touches(&self, q: usize) -> bool {
        self.instructions.iter().any(|ins| match ins {
            Instruction::Gate(op) => op.targets.contains(&q) || op.controls.contains(&q),
            Instruction::Repeat { body, controls, .. } => controls.contains(&q) || body.touches(q),
        })
    }

    pub fn inverse(&self) -> Circuit {
        let instructions = self
            .instructions
            .iter()
            .rev()
            .map(|ins| match ins {
                Instruction::Gate(op) => Instruction::Gate(op.inverse()),
                Instruction::Repeat {
                    body,
                    power,
                    controls,
                } => Instruction::Repeat {
                    body: Arc::new(body.inverse()),
                    power: *power,
                    controls: controls.clone(),
                },
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            instructions,
        }
    }

    /// Number of elementary gates after expanding repeats.
    pub fn gate_count(&self) -> u64 {
        self.instructions
            .iter()
            .map(|ins| match ins {
                Instruction::Gate(_) => 1,
                Instruction::Repeat { body, power, .. } => body.gate_count() * power,
            })
            .sum()
    }

    pub fn is_monomial(&self) -> bool {
        self.instructions.iter().all(|ins| match ins {
            Instruction::Gate(op) => op.is_monomial(),
            Instruction::Repeat { body, .. } => body.is_monomial(),
        })
    }

    /// Image of a basis state under a monomial circuit.
    pub fn map_basis(&self, index: u64) -> Option<(u64, Complex64)> {
        let mut cur = index;
        let mut phase = Complex64::new(1.0, 0.0);
        for ins in &self.instructions {
            match ins {
                Instruction::Gate(op) => {
                    let (next, p) = op.map_basis(self.num_qubits, cur)?;
                    cur = next;
                    phase *= p;
                }
                Instruction::Repeat {
                    body,
                    power,
                    controls,
                } => {
                    let n = self.num_qubits;
                    if controls.iter().all(|&c| (cur >> (n - 1 - c)) & 1 == 1) {
                        for _ in 0..*power {
                            let (next, p) = body.map_basis(cur)?;
                            cur = next;
                            phase *= p;
                        }
                    }
                }
            }
        }
        Some((cur, phase))
    }

    pub fn run<S: QuantumState + ?Sized>(&self, state: &mut S) -> Result<()> {
        self.run_controlled(state, &[])
    }

    /// Run with every instruction additionally conditioned on `extra`.
    pub fn run_controlled<S: QuantumState + ?Sized>(&self, state: &mut S, extra: &[usize]) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::InvalidCircuit(format!(
                "{}-qubit circuit run on a {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        for ins in &self.instructions {
            match ins {
                Instruction::Gate(op) if extra.is_empty() => state.apply_gate(op)?,
                Instruction::Gate(op) => state.apply_gate(&op.clone().controlled_by(extra)?)?,
                Instruction::Repeat {
                    body,
                    power,
                    controls,
                } => {
                    let mut all = controls.clone();
                    all.extend_from_slice(extra);
                    state.apply_repeat(body, *power, &all)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StateVector;

    #[test]
    fn repeat_validation() {
        let mut body = Circuit::new(2);
        body.push(GateOp::x(1)).unwrap();
        let body = Arc::new(body);
        let mut c = Circuit::new(2);
        assert!(c.push_repeat(body.clone(), 2, &[1]).is_err());
        assert!(c.push_repeat(body.clone(), 2, &[0]).is_ok());
        assert_eq!(c.gate_count(), 2);
        assert!(c.is_monomial());
        // control |0> on qubit 0: body skipped
        assert_eq!(c.map_basis(0b00), Some((0b00, Complex64::new(1.0, 0.0))));
        // power 2 of X is identity
        assert_eq!(c.map_basis(0b10), Some((0b10, Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn inverse_undoes_circuit() {
        let mut c = Circuit::new(3);
        c.push(GateOp::h(0)).unwrap();
        c.push(GateOp::cx(0, 2).unwrap()).unwrap();
        c.push(GateOp::phase(2, 0.7)).unwrap();
        c.push(GateOp::permutation(vec![1, 2], vec![3, 0, 1, 2]).unwrap()).unwrap();
        let mut s = StateVector::init_basis(3, "011").unwrap();
        let before = s.amplitudes().to_vec();
        c.run(&mut s).unwrap();
        c.inverse().run(&mut s).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&before) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
