use rand::Rng;

use crate::error::{Error, Result};
use crate::nets::{batch_loss, ste_gradient, NetworkConfig, WeightSpace};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub weights: WeightSpace,
    /// Train loss after each epoch; ends early with NaN on divergence.
    pub history: Vec<f64>,
    pub final_loss: f64,
    pub diverged: bool,
}

/// Full-batch gradient descent `w ← w − lr·∇L`.
pub fn train_gd(
    cfg: &NetworkConfig,
    w0: WeightSpace,
    data: &[(f64, f64)],
    lr: f64,
    epochs: usize,
) -> Result<TrainResult> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidConfig(format!("learning rate {lr} must be positive")));
    }
    let mut w = w0;
    let mut history = Vec::with_capacity(epochs);
    let mut loss = batch_loss(cfg, &w, data)?;
    for _ in 0..epochs {
        let step = match ste_gradient(cfg, &w, data) {
            Ok(g) => g,
            Err(Error::NonFinite(_)) => {
                loss = f64::NAN;
                history.push(loss);
                break;
            }
            Err(e) => return Err(e),
        };
        for (v, g) in w.values.iter_mut().zip(step) {
            *v -= lr * g;
        }
        loss = match batch_loss(cfg, &w, data) {
            Ok(l) if l.is_finite() => l,
            Ok(_) | Err(Error::NonFinite(_)) => f64::NAN,
            Err(e) => return Err(e),
        };
        history.push(loss);
        if loss.is_nan() {
            break;
        }
    }
    Ok(TrainResult {
        weights: w,
        history,
        final_loss: loss,
        diverged: loss.is_nan(),
    })
}

/// Bad when above both `factor·global_min` and `global_min + margin`.
/// Non-finite losses always count as bad.
pub fn classify_bad_minimum(final_loss: f64, global_min: f64, factor: f64, margin: f64) -> bool {
    if !final_loss.is_finite() {
        return true;
    }
    final_loss > factor * global_min && final_loss > global_min + margin
}

/// Toy starting point `(w₁, w₂)` uniform on `[lo, hi]²`.
pub fn toy_init(seed: u64, lo: f64, hi: f64) -> WeightSpace {
    let mut rng = stream(seed, Stream::ToyInit);
    WeightSpace::new((0..2).map(|_| rng.random_range(lo..=hi)).collect())
}
