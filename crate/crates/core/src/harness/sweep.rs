use std::io::Write;

use serde::{Deserialize, Serialize};

use super::dataset::{generate_dataset, Dataset, DatasetSpec};
use super::train::{classify_bad_minimum, train_gd};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::nets::{batch_loss, decreasing_widths, init_siren, NetworkConfig};
use crate::par::{self, Parallelism};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NetworkFamily {
    /// Continuous weights, first layer scaled by ω₀.
    Sinnn { first_layer_scale: f64 },
    /// Sign weights, ternary activations, constant sine offset.
    Dsinnn { sine_offset: f64 },
}

impl NetworkFamily {
    /// Network with the "decreasing" widths of `(first_width, layers)`.
    pub fn config(self, first_width: usize, layers: usize) -> NetworkConfig {
        let widths = decreasing_widths(first_width, layers);
        match self {
            NetworkFamily::Sinnn { first_layer_scale } => NetworkConfig::sinnn(&widths, first_layer_scale),
            NetworkFamily::Dsinnn { sine_offset } => NetworkConfig::dsinnn(&widths, sine_offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: NetworkFamily,
    /// `(first_layer_width, num_hidden_layers)`.
    pub architectures: Vec<(usize, usize)>,
    pub seeds: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub dataset: DatasetSpec,
    pub bad_minimum_factor: f64,
    pub bad_minimum_margin: f64,
    /// Seeds every run's initialization (run `i` uses `derive_seed(master, i)`).
    pub master_seed: u64,
    /// One dataset shared by every run.
    pub data_seed: u64,
}

impl SweepConfig {
    /// Continuous sweep: ω₀ = 20, lr 0.002, 300 epochs.
    pub fn sinnn(architectures: Vec<(usize, usize)>, seeds: usize) -> Self {
        SweepConfig {
            family: NetworkFamily::Sinnn { first_layer_scale: 20.0 },
            architectures,
            seeds,
            learning_rate: 0.002,
            epochs: 300,
            dataset: DatasetSpec::sinnn(),
            bad_minimum_factor: 2.0,
            bad_minimum_margin: 1e-4,
            master_seed: 0,
            data_seed: 0,
        }
    }

    /// Discrete sweep: sine offset 0.1, raw inputs on `[−7π, 7π]`.
    pub fn dsinnn(architectures: Vec<(usize, usize)>, seeds: usize) -> Self {
        SweepConfig {
            family: NetworkFamily::Dsinnn { sine_offset: 0.1 },
            dataset: DatasetSpec::dsinnn(),
            ..Self::sinnn(architectures, seeds)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.seeds == 0 {
            return bad("seeds must be >= 1".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {} must be positive", self.learning_rate));
        }
        if self.bad_minimum_factor.is_nan() || self.bad_minimum_factor <= 1.0 {
            return bad(format!("bad-minimum factor {} must exceed 1", self.bad_minimum_factor));
        }
        if self.bad_minimum_margin.is_nan() || self.bad_minimum_margin < 0.0 {
            return bad(format!("bad-minimum margin {} must be >= 0", self.bad_minimum_margin));
        }
        if self.architectures.is_empty() || self.architectures.iter().any(|&(w, l)| w == 0 || l == 0) {
            return bad("architectures need positive width and depth".into());
        }
        self.dataset.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub first_width: usize,
    pub layers: usize,
    /// Seed index within the sweep.
    pub seed: usize,
    pub final_train_loss: f64,
    pub final_test_loss: f64,
    pub loss_history: Vec<f64>,
    pub bad_train: bool,
    pub bad_test: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchAggregate {
    pub first_width: usize,
    pub layers: usize,
    pub global_min_train: f64,
    pub global_min_test: f64,
    pub frac_bad_train: f64,
    pub frac_bad_test: f64,
    /// Among runs not bad on train, the share also not bad on test.
    pub frac_good_generalize: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Sorted by architecture (config order), then seed.
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<ArchAggregate>,
}

fn finite_min(v: impl Iterator<Item = f64>) -> f64 {
    v.filter(|x| x.is_finite()).fold(f64::NAN, f64::min)
}

/// Classify every run against its architecture's best encountered loss and
/// compute the heatmap fractions. Pure in the run records.
pub fn aggregate(runs: &mut [RunRecord], factor: f64, margin: f64) -> Vec<ArchAggregate> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < runs.len() {
        let arch = (runs[start].first_width, runs[start].layers);
        let len = runs[start..]
            .iter()
            .take_while(|r| (r.first_width, r.layers) == arch)
            .count();
        let group = &mut runs[start..start + len];
        let gmin_train = finite_min(group.iter().map(|r| r.final_train_loss));
        let gmin_test = finite_min(group.iter().map(|r| r.final_test_loss));
        for r in group.iter_mut() {
            r.bad_train = classify_bad_minimum(r.final_train_loss, gmin_train, factor, margin);
            r.bad_test = classify_bad_minimum(r.final_test_loss, gmin_test, factor, margin);
        }
        let n = len as f64;
        let good_train: Vec<&RunRecord> = group.iter().filter(|r| !r.bad_train).collect();
        let frac_good_generalize = if good_train.is_empty() {
            0.0
        } else {
            good_train.iter().filter(|r| !r.bad_test).count() as f64 / good_train.len() as f64
        };
        out.push(ArchAggregate {
            first_width: arch.0,
            layers: arch.1,
            global_min_train: gmin_train,
            global_min_test: gmin_test,
            frac_bad_train: group.iter().filter(|r| r.bad_train).count() as f64 / n,
            frac_bad_test: group.iter().filter(|r| r.bad_test).count() as f64 / n,
            frac_good_generalize,
        });
        start += len;
    }
    out
}

fn train_one(cfg: &SweepConfig, data: &Dataset, arch: (usize, usize), seed: usize) -> Result<RunRecord> {
    let net = cfg.family.config(arch.0, arch.1);
    let w0 = init_siren(&net, derive_seed(cfg.master_seed, seed as u64))?;
    let r = train_gd(&net, w0, &data.train, cfg.learning_rate, cfg.epochs)?;
    let test = if r.diverged {
        f64::NAN
    } else {
        batch_loss(&net, &r.weights, &data.test).unwrap_or(f64::NAN)
    };
    Ok(RunRecord {
        first_width: arch.0,
        layers: arch.1,
        seed,
        final_train_loss: r.final_loss,
        final_test_loss: if test.is_finite() { test } else { f64::NAN },
        loss_history: r.history,
        bad_train: false,
        bad_test: false,
    })
}

/// Train every `(architecture, seed)` pair on one shared dataset.
pub fn run_sweep(cfg: &SweepConfig, mode: Parallelism) -> Result<SweepResult> {
    cfg.validate()?;
    let data = generate_dataset(&cfg.dataset, cfg.data_seed)?;
    let tasks: Vec<((usize, usize), usize)> = cfg
        .architectures
        .iter()
        .flat_map(|&a| (0..cfg.seeds).map(move |s| (a, s)))
        .collect();
    let mut runs = par::map(&tasks, mode, |&(arch, seed)| train_one(cfg, &data, arch, seed))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let aggregates = aggregate(&mut runs, cfg.bad_minimum_factor, cfg.bad_minimum_margin);
    Ok(SweepResult { runs, aggregates })
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "arch_first_width",
        "arch_layers",
        "seed",
        "final_train_loss",
        "final_test_loss",
        "bad_train",
        "bad_test",
    ])?;
    for r in &result.runs {
        w.write_record([
            r.first_width.to_string(),
            r.layers.to_string(),
            r.seed.to_string(),
            fmt_f64(r.final_train_loss),
            fmt_f64(r.final_test_loss),
            (r.bad_train as u8).to_string(),
            (r.bad_test as u8).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_heatmap_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "arch_first_width",
        "arch_layers",
        "frac_bad_train",
        "frac_bad_test",
        "frac_good_generalize",
        "global_min_train",
        "global_min_test",
    ])?;
    for a in &result.aggregates {
        w.write_record([
            a.first_width.to_string(),
            a.layers.to_string(),
            fmt_f64(a.frac_bad_train),
            fmt_f64(a.frac_bad_test),
            fmt_f64(a.frac_good_generalize),
            fmt_f64(a.global_min_train),
            fmt_f64(a.global_min_test),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(family_discrete: bool) -> SweepConfig {
        let mut cfg = if family_discrete {
            SweepConfig::dsinnn(vec![(3, 1), (4, 2)], 3)
        } else {
            SweepConfig::sinnn(vec![(3, 1), (4, 2)], 3)
        };
        cfg.epochs = 20;
        cfg.dataset.count = 40;
        cfg
    }

    #[test]
    fn single_run_is_never_bad() {
        let mut cfg = small(false);
        cfg.architectures = vec![(4, 2)];
        cfg.seeds = 1;
        let r = run_sweep(&cfg, Parallelism::Auto).unwrap();
        assert_eq!(r.runs.len(), 1);
        let a = &r.aggregates[0];
        assert_eq!((a.frac_bad_train, a.frac_bad_test, a.frac_good_generalize), (0.0, 0.0, 1.0));
    }

    #[test]
    fn parallel_matches_sequential() {
        for discrete in [false, true] {
            let cfg = small(discrete);
            let a = run_sweep(&cfg, Parallelism::Auto).unwrap();
            let b = run_sweep(&cfg, Parallelism::Sequential).unwrap();
            assert_eq!(a, b);
            let order: Vec<(usize, usize, usize)> = a.runs.iter().map(|r| (r.first_width, r.layers, r.seed)).collect();
            assert_eq!(order[0], (3, 1, 0));
            assert_eq!(order[5], (4, 2, 2));
            for agg in &a.aggregates {
                let best = a
                    .runs
                    .iter()
                    .filter(|r| (r.first_width, r.layers) == (agg.first_width, agg.layers))
                    .map(|r| r.final_train_loss)
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(agg.global_min_train, best);
                assert!(agg.frac_bad_train < 1.0);
            }
        }
    }

    #[test]
    fn rejects_invalid_configs() {
        let base = small(false);
        for broken in [
            SweepConfig { seeds: 0, ..base.clone() },
            SweepConfig { epochs: 0, ..base.clone() },
            SweepConfig { learning_rate: -1.0, ..base.clone() },
            SweepConfig { bad_minimum_factor: 1.0, ..base.clone() },
            SweepConfig { bad_minimum_margin: -1.0, ..base.clone() },
            SweepConfig { architectures: vec![(0, 1)], ..base.clone() },
        ] {
            assert!(matches!(run_sweep(&broken, Parallelism::Sequential), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn csv_layout() {
        let r = run_sweep(&small(true), Parallelism::Auto).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("arch_first_width,arch_layers,seed,final_train_loss,final_test_loss,bad_train,bad_test\n3,1,0,"));
        let mut buf = Vec::new();
        write_heatmap_csv(&r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }

    fn record(seed: usize, train: f64, test: f64) -> RunRecord {
        RunRecord {
            first_width: 2,
            layers: 1,
            seed,
            final_train_loss: train,
            final_test_loss: test,
            loss_history: vec![],
            bad_train: false,
            bad_test: false,
        }
    }

    proptest! {
        #[test]
        fn aggregation_recomputes_from_records(
            losses in prop::collection::vec((0.0f64..3.0, 0.0f64..3.0), 1..30),
            nan_at in prop::option::of(0usize..30),
        ) {
            let mut runs: Vec<RunRecord> = losses.iter().enumerate().map(|(i, &(a, b))| record(i, a, b)).collect();
            if let Some(i) = nan_at.filter(|&i| i < runs.len() && runs.len() > 1) {
                runs[i].final_train_loss = f64::NAN;
            }
            let agg = aggregate(&mut runs, 2.0, 1e-4)[0].clone();
            let n = runs.len() as f64;
            let bad = runs.iter().filter(|r| r.bad_train).count() as f64;
            prop_assert_eq!(agg.frac_bad_train, bad / n);
            prop_assert!((0.0..=1.0).contains(&agg.frac_good_generalize));
            // the argmin run is never bad
            let best = runs.iter().filter(|r| r.final_train_loss == agg.global_min_train).count();
            prop_assert!(best >= 1);
            prop_assert!(runs.iter().any(|r| !r.bad_train));
            prop_assert!(runs.iter().filter(|r| !r.final_train_loss.is_finite()).all(|r| r.bad_train));
        }
    }
}
