//! Random small training problems for referee tests: a planted teacher
//! network labels random exact inputs, with a share of labels replaced by
//! noise.

use rand::Rng;

use super::encoding::{QDataset, QRow};
use crate::error::Result;
use crate::nets::{dsinnn_forward, NetworkConfig, WeightSpace};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone)]
pub struct Instance {
    pub hidden: Vec<usize>,
    pub dataset: QDataset,
    pub teacher_bits: u64,
}

impl Instance {
    pub fn num_weights(&self) -> usize {
        NetworkConfig::dsinnn(&self.hidden, 0.0).num_weights()
    }
}

/// Architectures with `num_weights` weights: one hidden layer or two.
pub fn architectures(num_weights: usize) -> Vec<Vec<usize>> {
    match num_weights {
        2 => vec![vec![2], vec![1, 1]],
        3 => vec![vec![3], vec![1, 2]],
        4 => vec![vec![4], vec![2, 1]],
        m => vec![vec![m]],
    }
}

/// `N` pairs at scale `n ∈ {1, 2}`, `|k| ≤ 2^{n+1}`; a quarter of the
/// labels (in expectation) are uniform noise in `[−H, H]`.
pub fn random_instance(seed: u64, num_weights: usize, num_pairs: usize) -> Result<Instance> {
    let mut rng = stream(seed, Stream::Instance);
    let archs = architectures(num_weights);
    let hidden = archs[rng.random_range(0..archs.len())].clone();
    let cfg = NetworkConfig::dsinnn(&hidden, 0.0);
    let m = cfg.num_weights();
    let teacher_bits = rng.random_range(0..1u64 << m);
    let teacher = WeightSpace::from_bits(teacher_bits, m);
    let n: u32 = rng.random_range(1..=2);
    let kmax = 1i64 << (n + 1);
    let h = *hidden.last().unwrap() as i64;
    let mut rows = Vec::with_capacity(num_pairs);
    for _ in 0..num_pairs {
        let k = rng.random_range(-kmax..=kmax);
        let row = QRow { k, n, y: 0 };
        let y = if rng.random_bool(0.25) {
            rng.random_range(-h..=h)
        } else {
            dsinnn_forward(&cfg, &teacher, row.x())?
        };
        rows.push(QRow { y, ..row });
    }
    Ok(Instance {
        hidden,
        dataset: QDataset { rows },
        teacher_bits,
    })
}

/// Instance `index` of a reproducible referee batch: `M` cycles through
/// 2, 3, 4 and `N` is drawn from `2..=8`.
pub fn referee_instance(master_seed: u64, index: u64) -> Result<Instance> {
    let seed = crate::rng::derive_seed(master_seed, index);
    let mut rng = stream(seed, Stream::DatasetSplit);
    let m = 2 + (index % 3) as usize;
    let n = rng.random_range(2..=8);
    random_instance(seed, m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible_and_in_range() {
        for i in 0..30 {
            let a = referee_instance(7, i).unwrap();
            let b = referee_instance(7, i).unwrap();
            assert_eq!(a.dataset, b.dataset);
            assert_eq!(a.num_weights(), 2 + (i % 3) as usize);
            assert!((2..=8).contains(&a.dataset.len()));
            for r in &a.dataset.rows {
                assert!(r.n <= 2 && r.k.abs() <= 1 << (r.n + 1));
            }
        }
    }
}
