use std::io::Write;

use serde::{Deserialize, Serialize};

use super::dataset::toy_dataset;
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::nets::{batch_loss, NetworkConfig, WeightSpace};

/// Square grid: both axes take `points` values `lo + (hi−lo)·i/(points−1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn with_step(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidConfig(format!("bad grid [{lo}, {hi}] step {step}")));
        }
        Ok(GridSpec {
            lo,
            hi,
            points: ((hi - lo) / step).round() as usize + 1,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
    }
}

impl Default for GridSpec {
    /// `[−3, 3]` at step 0.05.
    fn default() -> Self {
        GridSpec {
            lo: -3.0,
            hi: 3.0,
            points: 121,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMinimum {
    pub i: usize,
    pub j: usize,
    pub w1: f64,
    pub w2: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub grid: GridSpec,
    /// Row-major: `loss[i·points + j]` at `(w₁, w₂) = (value(i), value(j))`.
    pub loss: Vec<f64>,
}

impl Landscape {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.loss[i * self.grid.points + j]
    }

    /// Interior points strictly below all eight neighbours.
    pub fn local_minima(&self) -> Vec<LocalMinimum> {
        let n = self.grid.points;
        let mut out = Vec::new();
        for i in 1..n.saturating_sub(1) {
            for j in 1..n - 1 {
                let v = self.get(i, j);
                let strict = (i - 1..=i + 1)
                    .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                    .filter(|&p| p != (i, j))
                    .all(|(a, b)| v < self.get(a, b));
                if strict {
                    out.push(LocalMinimum {
                        i,
                        j,
                        w1: self.grid.value(i),
                        w2: self.grid.value(j),
                        loss: v,
                    });
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["w1", "w2", "loss"])?;
        for i in 0..self.grid.points {
            for j in 0..self.grid.points {
                w.write_record([fmt_f64(self.grid.value(i)), fmt_f64(self.grid.value(j)), fmt_f64(self.get(i, j))])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// MSE of `sin(w₁x) + sin(w₂x)` on the four toy pairs over the grid.
pub fn toy_landscape(grid: GridSpec) -> Result<Landscape> {
    if grid.points < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 points per axis".into()));
    }
    let cfg = NetworkConfig::toy_continuous();
    let data = toy_dataset();
    let mut loss = Vec::with_capacity(grid.points * grid.points);
    for i in 0..grid.points {
        for j in 0..grid.points {
            let w = WeightSpace::new(vec![grid.value(i), grid.value(j)]);
            loss.push(batch_loss(&cfg, &w, &data)?);
        }
    }
    Ok(Landscape { grid, loss })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g = GridSpec::default();
        assert_eq!(g, GridSpec::with_step(-3.0, 3.0, 0.05).unwrap());
        assert_eq!(g.value(0), -3.0);
        assert_eq!(g.value(80), 1.0);
        assert_eq!(g.value(120), 3.0);
        assert!(GridSpec::with_step(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn symmetric_and_zero_at_optimum() {
        let l = toy_landscape(GridSpec::default()).unwrap();
        assert!(l.get(80, 80).abs() < 1e-12);
        for i in 0..121 {
            for j in 0..121 {
                assert_eq!(l.get(i, j), l.get(j, i));
            }
        }
    }

    #[test]
    fn period_four_in_each_weight() {
        // step 0.05: a shift of 4 is 80 grid steps
        let l = toy_landscape(GridSpec::default()).unwrap();
        for i in 0..=40 {
            for j in 0..121 {
                assert!((l.get(i, j) - l.get(i + 80, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn minima_on_small_grid() {
        let l = toy_landscape(GridSpec::with_step(-3.0, 3.0, 0.5).unwrap()).unwrap();
        let mut buf = Vec::new();
        l.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 13 * 13);
        assert!(l.local_minima().iter().any(|m| (m.w1, m.w2) == (1.0, 1.0)));
    }
}
