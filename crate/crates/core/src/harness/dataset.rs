use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetFunction {
    /// `Σ_{k=1..5} sin kx`.
    SineSum,
    /// `round(Σ_{k=1..5} sin kx)`, integers in `[−5, 5]`.
    RoundedSineSum,
}

impl TargetFunction {
    pub fn eval(self, x: f64) -> f64 {
        let s: f64 = (1..=5).map(|k| (k as f64 * x).sin()).sum();
        match self {
            TargetFunction::SineSum => s,
            TargetFunction::RoundedSineSum => s.round(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub target: TargetFunction,
    pub count: usize,
    pub interval: (f64, f64),
    /// Rescale inputs to `[−1, 1]` after computing targets.
    pub normalize: bool,
    /// Share of the samples used for training.
    pub split_fraction: f64,
}

impl DatasetSpec {
    /// 200 points on `[−7π/2, 7π/2]`, normalized inputs, 80/20 split.
    pub fn sinnn() -> Self {
        DatasetSpec {
            target: TargetFunction::SineSum,
            count: 200,
            interval: (-7.0 * FRAC_PI_2, 7.0 * FRAC_PI_2),
            normalize: true,
            split_fraction: 0.8,
        }
    }

    /// 200 points on `[−7π, 7π]`, raw inputs, rounded targets.
    pub fn dsinnn() -> Self {
        DatasetSpec {
            target: TargetFunction::RoundedSineSum,
            count: 200,
            interval: (-7.0 * PI, 7.0 * PI),
            normalize: false,
            split_fraction: 0.8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("empty input interval [{lo}, {hi}]")));
        }
        if self.count < 2 {
            return Err(Error::InvalidConfig("need at least 2 samples".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split fraction {} must lie in (0, 1)",
                self.split_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<(f64, f64)>,
    pub test: Vec<(f64, f64)>,
}

/// Sample inputs uniformly, label them, then split at random. Both sides
/// keep at least one sample.
pub fn generate_dataset(spec: &DatasetSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let (lo, hi) = spec.interval;
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut rng = stream(seed, Stream::DatasetInputs);
    let mut pairs: Vec<(f64, f64)> = (0..spec.count)
        .map(|_| {
            let x = rng.random_range(lo..=hi);
            let y = spec.target.eval(x);
            (if spec.normalize { (x - mid) / half } else { x }, y)
        })
        .collect();
    pairs.shuffle(&mut stream(seed, Stream::DatasetSplit));
    let n_train = ((spec.count as f64 * spec.split_fraction).round() as usize).clamp(1, spec.count - 1);
    let test = pairs.split_off(n_train);
    Ok(Dataset { train: pairs, test })
}

/// `(−3π/2, 2), (−π/2, −2), (π/2, 2), (3π/2, −2)`.
pub fn toy_dataset() -> Vec<(f64, f64)> {
    vec![
        (-3.0 * FRAC_PI_2, 2.0),
        (-FRAC_PI_2, -2.0),
        (FRAC_PI_2, 2.0),
        (3.0 * FRAC_PI_2, -2.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinnn_split_and_range() {
        let d = generate_dataset(&DatasetSpec::sinnn(), 3).unwrap();
        assert_eq!((d.train.len(), d.test.len()), (160, 40));
        assert!(d.train.iter().chain(&d.test).all(|p| p.0.abs() <= 1.0));
        assert_eq!(d, generate_dataset(&DatasetSpec::sinnn(), 3).unwrap());
        assert_ne!(d, generate_dataset(&DatasetSpec::sinnn(), 4).unwrap());
    }

    #[test]
    fn dsinnn_targets_are_small_integers() {
        let d = generate_dataset(&DatasetSpec::dsinnn(), 1).unwrap();
        for &(x, y) in d.train.iter().chain(&d.test) {
            assert!(x.abs() <= 7.0 * PI);
            assert_eq!(y, y.round());
            assert!(y.abs() <= 5.0);
        }
    }

    #[test]
    fn normalization_keeps_labels_of_raw_inputs() {
        let spec = DatasetSpec {
            count: 10,
            ..DatasetSpec::sinnn()
        };
        let d = generate_dataset(&spec, 0).unwrap();
        for &(u, y) in &d.train {
            let x = u * 7.0 * FRAC_PI_2;
            assert!((TargetFunction::SineSum.eval(x) - y).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let empty = DatasetSpec {
            interval: (1.0, 1.0),
            ..DatasetSpec::sinnn()
        };
        assert!(generate_dataset(&empty, 0).is_err());
        let split = DatasetSpec {
            split_fraction: 1.0,
            ..DatasetSpec::sinnn()
        };
        assert!(generate_dataset(&split, 0).is_err());
        let tiny = DatasetSpec {
            count: 2,
            split_fraction: 0.99,
            ..DatasetSpec::sinnn()
        };
        let d = generate_dataset(&tiny, 0).unwrap();
        assert_eq!((d.train.len(), d.test.len()), (1, 1));
    }
}
