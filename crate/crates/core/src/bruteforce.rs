//! Exhaustive search over all `2^M` sign assignments of a discrete network.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nets::{dsinnn_forward, NetworkConfig, WeightSpace};
use crate::par::{self, Parallelism};
use crate::quantum::train::Diagnostics;

pub const MAX_SEARCH_WEIGHTS: usize = 24;

/// One weight assignment. Bit `i` of the `M`-bit string (first character is
/// weight 0) set means weight −1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchReport {
    pub bits: u64,
    pub num_weights: usize,
    pub correct_count: usize,
    pub mse: f64,
}

impl BranchReport {
    pub fn bitstring(&self) -> String {
        (0..self.num_weights)
            .map(|i| if (self.bits >> (self.num_weights - 1 - i)) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    /// Sorted by correct count (descending), then bits (ascending).
    pub branches: Vec<BranchReport>,
    /// `N·2^M` forward evaluations.
    pub classical_calls: u64,
}

impl SearchReport {
    pub fn best_count(&self) -> usize {
        self.branches.first().map_or(0, |b| b.correct_count)
    }

    /// Every branch attaining the best correct count.
    pub fn maximizers(&self) -> Vec<u64> {
        let best = self.best_count();
        self.branches
            .iter()
            .take_while(|b| b.correct_count == best)
            .map(|b| b.bits)
            .collect()
    }

    pub fn branch(&self, bits: u64) -> Option<&BranchReport> {
        self.branches.iter().find(|b| b.bits == bits)
    }

    /// `bits, correct_count, mse` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bits", "correct_count", "mse"])?;
        for b in &self.branches {
            w.write_record([b.bitstring(), b.correct_count.to_string(), crate::fmt_f64(b.mse)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluate every sign assignment on every pair. A prediction is correct
/// when the integer network output equals the target.
pub fn exhaustive_search(cfg: &NetworkConfig, data: &[(f64, f64)], mode: Parallelism) -> Result<SearchReport> {
    cfg.validate()?;
    let m = cfg.num_weights();
    if m > MAX_SEARCH_WEIGHTS {
        return Err(Error::SearchTooLarge {
            weights: m,
            limit: MAX_SEARCH_WEIGHTS,
        });
    }
    let evaluated = par::map_range(1usize << m, mode, |bits| -> Result<BranchReport> {
        let w = WeightSpace::from_bits(bits as u64, m);
        let mut correct = 0;
        let mut sq = 0.0;
        for &(x, y) in data {
            let pred = dsinnn_forward(cfg, &w, x)? as f64;
            correct += (pred == y) as usize;
            sq += (pred - y) * (pred - y);
        }
        Ok(BranchReport {
            bits: bits as u64,
            num_weights: m,
            correct_count: correct,
            mse: if data.is_empty() { 0.0 } else { sq / data.len() as f64 },
        })
    });
    let mut branches = evaluated.into_iter().collect::<Result<Vec<_>>>()?;
    branches.sort_by(|a, b| b.correct_count.cmp(&a.correct_count).then(a.bits.cmp(&b.bits)));
    Ok(SearchReport {
        branches,
        classical_calls: (data.len() as u64) << m,
    })
}

/// Classical versus quantum oracle-call counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CallReport {
    pub classical_calls: u64,
    pub grover_iterations: u64,
    pub pe_invocations: u64,
    /// `classical_calls / grover_iterations` (infinite when no iteration ran).
    pub ratio: f64,
}

pub fn call_report(search: &SearchReport, quantum: &Diagnostics) -> CallReport {
    CallReport {
        classical_calls: search.classical_calls,
        grover_iterations: quantum.grover_iterations,
        pe_invocations: quantum.pe_invocations,
        ratio: search.classical_calls as f64 / quantum.grover_iterations as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::QDataset;

    #[test]
    fn toy_branches() {
        let data = QDataset::toy().classical_pairs();
        let r = exhaustive_search(&NetworkConfig::toy_discrete(), &data, Parallelism::Auto).unwrap();
        let summary: Vec<(String, usize)> = r.branches.iter().map(|b| (b.bitstring(), b.correct_count)).collect();
        assert_eq!(
            summary,
            vec![("00".into(), 4), ("01".into(), 0), ("10".into(), 0), ("11".into(), 0)]
        );
        assert_eq!(r.branches[0].mse, 0.0);
        assert_eq!(r.classical_calls, 16);
        assert_eq!(r.maximizers(), vec![0]);
    }

    #[test]
    fn empty_dataset_ties() {
        let r = exhaustive_search(&NetworkConfig::toy_discrete(), &[], Parallelism::Sequential).unwrap();
        assert_eq!(r.maximizers(), vec![0, 1, 2, 3]);
        assert_eq!(r.classical_calls, 0);
    }

    #[test]
    fn guardrail() {
        let cfg = NetworkConfig::dsinnn(&[5, 5], 0.0);
        assert!(matches!(
            exhaustive_search(&cfg, &[], Parallelism::Auto),
            Err(Error::SearchTooLarge { weights: 30, .. })
        ));
    }

    #[test]
    fn csv_output() {
        let data = QDataset::toy().classical_pairs();
        let r = exhaustive_search(&NetworkConfig::toy_discrete(), &data, Parallelism::Auto).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("bits,correct_count,mse\n00,4,0.0000000000000000e0\n"));
    }
}
