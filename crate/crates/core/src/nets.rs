//! Sinusoidal networks with continuous or discretized weights.
//!
//! A hidden neuron computes `sin(scale * Σ w·z + offset)`. In discrete mode
//! weights pass through the sign discretizer [`discretize`] and neuron outputs
//! through [`ternary_discretize`] (or the sign discretizer, see
//! [`Activation`]). The network output is the plain sum of the last hidden
//! layer. Gradients use the identity straight-through estimator: every
//! discretizer is the identity in the backward pass.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Sign discretizer: −1 for negative input, +1 otherwise (so `D(0) = +1`).
pub fn discretize(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(if x < 0.0 { -1.0 } else { 1.0 })
}

/// Ternary discretizer with a ±0.1 dead zone.
pub fn ternary_discretize(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite(a));
    }
    Ok(if a < -0.1 {
        -1.0
    } else if a > 0.1 {
        1.0
    } else {
        0.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Continuous,
    Discrete,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Continuous => "continuous",
            Mode::Discrete => "discrete",
        }
    }
}

/// Output discretizer of a discrete-mode neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    /// Binary sign `D`.
    Sign,
    /// Ternary `D′` with dead zone `[-0.1, 0.1]`.
    Ternary,
}

impl Activation {
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Sign => {
                if v < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            Activation::Ternary => {
                if v < -0.1 {
                    -1.0
                } else if v > 0.1 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[inline]
fn sign(w: f64) -> f64 {
    if w < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Scale applied to the integer fan-in sum of a deeper discrete layer:
/// `min(π/2, π/2^(m−1))` with `m = floor(log2 fan_in)`.
pub fn discrete_layer_scale(fan_in: usize) -> f64 {
    assert!(fan_in >= 1);
    let m = (usize::BITS - 1 - fan_in.leading_zeros()) as i32;
    FRAC_PI_2.min(PI / 2f64.powi(m - 1))
}

/// Hidden widths of the "decreasing" architecture: drop by one per layer
/// until five, then stay at five.
pub fn decreasing_widths(first_width: usize, layers: usize) -> Vec<usize> {
    let mut widths = Vec::with_capacity(layers);
    let mut w = first_width;
    for _ in 0..layers {
        widths.push(w);
        if w > 5 {
            w -= 1;
        }
    }
    widths
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Input width followed by hidden widths. The output is the sum of the
    /// last hidden layer.
    pub layer_widths: Vec<usize>,
    /// ω₀, multiplies the first layer's pre-activation.
    pub first_layer_scale: f64,
    /// λ for hidden layers 2.. (one entry per deeper layer).
    pub deep_layer_scales: Vec<f64>,
    pub mode: Mode,
    pub activation: Activation,
    pub sine_offset: f64,
}

impl NetworkConfig {
    /// `ŷ = sin(w₁x) + sin(w₂x)`.
    pub fn toy_continuous() -> Self {
        Self::sinnn(&[2], 1.0)
    }

    /// `ŷ = D′(sin(D(w₁)x)) + D′(sin(D(w₂)x))`.
    pub fn toy_discrete() -> Self {
        Self::dsinnn(&[2], 0.0)
    }

    /// Continuous network on a scalar input.
    pub fn sinnn(hidden: &[usize], first_layer_scale: f64) -> Self {
        NetworkConfig {
            layer_widths: std::iter::once(1).chain(hidden.iter().copied()).collect(),
            first_layer_scale,
            deep_layer_scales: vec![1.0; hidden.len().saturating_sub(1)],
            mode: Mode::Continuous,
            activation: Activation::Ternary,
            sine_offset: 0.0,
        }
    }

    /// Discrete network on a scalar input: first-layer scale 1, deeper layers
    /// scaled by [`discrete_layer_scale`], ternary activations.
    pub fn dsinnn(hidden: &[usize], sine_offset: f64) -> Self {
        NetworkConfig {
            layer_widths: std::iter::once(1).chain(hidden.iter().copied()).collect(),
            first_layer_scale: 1.0,
            deep_layer_scales: hidden
                .windows(2)
                .map(|w| discrete_layer_scale(w[0]))
                .collect(),
            mode: Mode::Discrete,
            activation: Activation::Ternary,
            sine_offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 2 {
            return Err(Error::InvalidNetwork(
                "need an input width and at least one hidden layer".into(),
            ));
        }
        if self.layer_widths.contains(&0) {
            return Err(Error::InvalidNetwork("all widths must be >= 1".into()));
        }
        if self.deep_layer_scales.len() != self.layer_widths.len() - 2 {
            return Err(Error::InvalidNetwork(format!(
                "{} deep-layer scales for {} hidden layers",
                self.deep_layer_scales.len(),
                self.layer_widths.len() - 1
            )));
        }
        let finite = self.first_layer_scale.is_finite()
            && self.sine_offset.is_finite()
            && self.deep_layer_scales.iter().all(|s| s.is_finite());
        if !finite {
            return Err(Error::InvalidNetwork("scales must be finite".into()));
        }
        Ok(())
    }

    pub fn hidden_layers(&self) -> usize {
        self.layer_widths.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn last_width(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    /// `(fan_in, fan_out)` of every hidden layer.
    pub fn layer_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layer_widths.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn num_weights(&self) -> usize {
        self.layer_shapes().map(|(i, o)| i * o).sum()
    }

    pub fn layer_scale(&self, layer: usize) -> f64 {
        if layer == 0 {
            self.first_layer_scale
        } else {
            self.deep_layer_scales[layer - 1]
        }
    }

    fn require(&self, mode: Mode) -> Result<()> {
        if self.mode != mode {
            return Err(Error::WrongMode {
                required: mode.name(),
                actual: self.mode.name(),
            });
        }
        Ok(())
    }

    fn check_weights(&self, w: &WeightSpace) -> Result<()> {
        self.validate()?;
        if w.len() != self.num_weights() {
            return Err(Error::WeightCount {
                expected: self.num_weights(),
                got: w.len(),
            });
        }
        Ok(())
    }
}

/// Flat weight vector, layer by layer, each layer row-major `[out][in]`.
///
/// In discrete mode these are the full-precision shadow weights; their signs
/// define the discrete network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpace {
    pub values: Vec<f64>,
}

impl WeightSpace {
    pub fn new(values: Vec<f64>) -> Self {
        WeightSpace { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Weights from a basis bitstring: bit `i` (weight `i` is the most
    /// significant of `count` bits) set means weight −1, clear means +1.
    pub fn from_bits(bits: u64, count: usize) -> Self {
        let values = (0..count)
            .map(|i| {
                if (bits >> (count - 1 - i)) & 1 == 1 {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect();
        WeightSpace { values }
    }

    /// Inverse of [`WeightSpace::from_bits`] on the signs.
    pub fn to_bits(&self) -> u64 {
        let n = self.values.len();
        self.values
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &w)| acc | ((w < 0.0) as u64) << (n - 1 - i))
    }

    pub fn signs(&self) -> Vec<f64> {
        self.values.iter().map(|&w| sign(w)).collect()
    }
}

struct LayerTrace {
    inputs: Vec<f64>,
    pre: Vec<f64>,
}

struct Trace {
    layers: Vec<LayerTrace>,
    output: f64,
}

fn trace(cfg: &NetworkConfig, w: &WeightSpace, input: &[f64]) -> Trace {
    let discrete = cfg.mode == Mode::Discrete;
    let mut z = input.to_vec();
    let mut layers = Vec::with_capacity(cfg.hidden_layers());
    let mut offset = 0;
    for (l, (fan_in, fan_out)) in cfg.layer_shapes().enumerate() {
        let scale = cfg.layer_scale(l);
        let block = &w.values[offset..offset + fan_in * fan_out];
        offset += fan_in * fan_out;
        let mut pre = Vec::with_capacity(fan_out);
        let mut out = Vec::with_capacity(fan_out);
        for row in block.chunks_exact(fan_in) {
            let s: f64 = row
                .iter()
                .zip(&z)
                .map(|(&wv, &zi)| if discrete { sign(wv) * zi } else { wv * zi })
                .sum();
            let a = scale * s + cfg.sine_offset;
            pre.push(a);
            out.push(if discrete {
                cfg.activation.apply(a.sin())
            } else {
                a.sin()
            });
        }
        layers.push(LayerTrace { inputs: z, pre });
        z = out;
    }
    Trace {
        layers,
        output: z.iter().sum(),
    }
}

/// Output of any-mode network on a scalar input.
pub fn predict(cfg: &NetworkConfig, w: &WeightSpace, x: f64) -> Result<f64> {
    cfg.check_weights(w)?;
    if cfg.input_width() != 1 {
        return Err(Error::InvalidNetwork(format!(
            "scalar input given to a network of input width {}",
            cfg.input_width()
        )));
    }
    Ok(trace(cfg, w, &[x]).output)
}

pub fn sinnn_forward(cfg: &NetworkConfig, w: &WeightSpace, x: f64) -> Result<f64> {
    cfg.require(Mode::Continuous)?;
    predict(cfg, w, x)
}

/// Discrete forward pass. With ternary activations and integer fan-in sums
/// the result is an integer in `[-last_width, last_width]`.
pub fn dsinnn_forward(cfg: &NetworkConfig, w: &WeightSpace, x: f64) -> Result<i64> {
    cfg.require(Mode::Discrete)?;
    Ok(predict(cfg, w, x)?.round() as i64)
}

pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::LengthMismatch {
            preds: preds.len(),
            targets: targets.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let sum: f64 = preds
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / preds.len() as f64)
}

/// Mean squared error of the network over `(x, y)` pairs.
pub fn batch_loss(cfg: &NetworkConfig, w: &WeightSpace, batch: &[(f64, f64)]) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut preds = Vec::with_capacity(batch.len());
    for &(x, _) in batch {
        preds.push(predict(cfg, w, x)?);
    }
    let targets: Vec<f64> = batch.iter().map(|p| p.1).collect();
    mse_loss(&preds, &targets)
}

/// Gradient of the batch MSE. The forward pass keeps every discretizer; the
/// backward pass treats each as the identity.
pub fn ste_gradient(cfg: &NetworkConfig, w: &WeightSpace, batch: &[(f64, f64)]) -> Result<Vec<f64>> {
    cfg.check_weights(w)?;
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let discrete = cfg.mode == Mode::Discrete;
    let shapes: Vec<(usize, usize)> = cfg.layer_shapes().collect();
    let mut offsets = Vec::with_capacity(shapes.len());
    let mut acc = 0;
    for &(i, o) in &shapes {
        offsets.push(acc);
        acc += i * o;
    }

    let n = batch.len() as f64;
    let mut grad = vec![0.0; w.len()];
    for &(x, y) in batch {
        let t = trace(cfg, w, &[x]);
        let g_out = 2.0 * (t.output - y) / n;
        let mut d_out = vec![g_out; cfg.last_width()];
        for l in (0..shapes.len()).rev() {
            let (fan_in, _) = shapes[l];
            let scale = cfg.layer_scale(l);
            let lt = &t.layers[l];
            let block = &w.values[offsets[l]..];
            let mut d_in = vec![0.0; fan_in];
            for (j, (&d, &a)) in d_out.iter().zip(&lt.pre).enumerate() {
                let da = d * a.cos();
                for i in 0..fan_in {
                    let wv = block[j * fan_in + i];
                    grad[offsets[l] + j * fan_in + i] += da * scale * lt.inputs[i];
                    d_in[i] += da * scale * if discrete { sign(wv) } else { wv };
                }
            }
            d_out = d_in;
        }
    }
    Ok(grad)
}

/// SIREN-style initialization. The first layer draws from `U(-1, 1)` (the
/// forward pass multiplies by ω₀); deeper layers draw from
/// `U(-√(6/n), √(6/n))` with `n` the fan-in. Layer `l` uses its own stream.
pub fn init_siren(cfg: &NetworkConfig, seed: u64) -> Result<WeightSpace> {
    cfg.validate()?;
    let mut values = Vec::with_capacity(cfg.num_weights());
    for (l, (fan_in, fan_out)) in cfg.layer_shapes().enumerate() {
        let bound = if l == 0 {
            1.0
        } else {
            (6.0 / fan_in as f64).sqrt()
        };
        let mut rng = rng::stream(seed, Stream::Layer(l as u32));
        for _ in 0..fan_in * fan_out {
            values.push(rng.random_range(-bound..=bound));
        }
    }
    Ok(WeightSpace { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_batch() -> Vec<(f64, f64)> {
        vec![
            (-3.0 * FRAC_PI_2, 2.0),
            (-FRAC_PI_2, -2.0),
            (FRAC_PI_2, 2.0),
            (3.0 * FRAC_PI_2, -2.0),
        ]
    }

    #[test]
    fn discretizers_match_examples() {
        assert_eq!(discretize(-0.5).unwrap(), -1.0);
        assert_eq!(discretize(0.0).unwrap(), 1.0);
        assert_eq!(discretize(3.2).unwrap(), 1.0);
        assert!(discretize(f64::NAN).is_err());
        assert!(discretize(f64::INFINITY).is_err());
        assert_eq!(ternary_discretize(-0.2).unwrap(), -1.0);
        assert_eq!(ternary_discretize(0.05).unwrap(), 0.0);
        assert_eq!(ternary_discretize(0.3).unwrap(), 1.0);
        assert_eq!(ternary_discretize(0.1).unwrap(), 0.0);
        assert_eq!(ternary_discretize(-0.1).unwrap(), 0.0);
        assert!(ternary_discretize(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn layer_scale_rule() {
        assert_eq!(discrete_layer_scale(1), FRAC_PI_2);
        assert_eq!(discrete_layer_scale(3), FRAC_PI_2);
        assert_eq!(discrete_layer_scale(7), FRAC_PI_2);
        assert_eq!(discrete_layer_scale(8), PI / 4.0);
        assert_eq!(discrete_layer_scale(16), PI / 8.0);
        assert_eq!(decreasing_widths(8, 6), vec![8, 7, 6, 5, 5, 5]);
        assert_eq!(decreasing_widths(3, 3), vec![3, 3, 3]);
    }

    #[test]
    fn continuous_toy_forward() {
        let cfg = NetworkConfig::toy_continuous();
        let one = WeightSpace::new(vec![1.0, 1.0]);
        assert_eq!(sinnn_forward(&cfg, &one, FRAC_PI_2).unwrap(), 2.0);
        assert!(sinnn_forward(&cfg, &one, PI).unwrap().abs() < 1e-15);
        let zero = WeightSpace::new(vec![0.0, 0.0]);
        assert_eq!(sinnn_forward(&cfg, &zero, 1.234).unwrap(), 0.0);
        assert!(sinnn_forward(&cfg, &WeightSpace::new(vec![1.0]), 0.0).is_err());
        assert!(dsinnn_forward(&cfg, &one, 0.0).is_err());
    }

    #[test]
    fn discrete_toy_forward() {
        let cfg = NetworkConfig::toy_discrete();
        let pos = WeightSpace::new(vec![0.7, 0.2]);
        assert_eq!(dsinnn_forward(&cfg, &pos, FRAC_PI_2).unwrap(), 2);
        assert_eq!(dsinnn_forward(&cfg, &pos, -FRAC_PI_2).unwrap(), -2);
        assert_eq!(dsinnn_forward(&cfg, &pos, 0.0).unwrap(), 0);
        let mixed = WeightSpace::new(vec![0.7, -0.2]);
        assert_eq!(dsinnn_forward(&cfg, &mixed, FRAC_PI_2).unwrap(), 0);
        // sin(π) rounds to ~1e-16, inside the dead zone.
        assert_eq!(dsinnn_forward(&cfg, &pos, PI).unwrap(), 0);
    }

    #[test]
    fn sign_activation_variant() {
        let mut cfg = NetworkConfig::toy_discrete();
        cfg.activation = Activation::Sign;
        let pos = WeightSpace::new(vec![1.0, 1.0]);
        assert_eq!(dsinnn_forward(&cfg, &pos, FRAC_PI_2).unwrap(), 2);
        assert_eq!(dsinnn_forward(&cfg, &pos, 0.0).unwrap(), 2);
    }

    #[test]
    fn mse_examples() {
        let t = [2.0, -2.0, 2.0, -2.0];
        assert_eq!(mse_loss(&t, &t).unwrap(), 0.0);
        assert_eq!(mse_loss(&[0.0; 4], &t).unwrap(), 4.0);
        assert_eq!(mse_loss(&[], &[]), Err(Error::EmptyBatch));
        assert!(mse_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_residual_gives_zero_gradient() {
        let batch = toy_batch();
        let d = NetworkConfig::toy_discrete();
        let g = ste_gradient(&d, &WeightSpace::new(vec![0.3, 0.9]), &batch).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        let c = NetworkConfig::toy_continuous();
        let g = ste_gradient(&c, &WeightSpace::new(vec![1.0, 1.0]), &batch).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-12), "{g:?}");
        assert!(ste_gradient(&c, &WeightSpace::new(vec![1.0, 1.0]), &[]).is_err());
    }

    fn central_difference(cfg: &NetworkConfig, w: &WeightSpace, batch: &[(f64, f64)], h: f64) -> Vec<f64> {
        (0..w.len())
            .map(|i| {
                let mut up = w.clone();
                let mut dn = w.clone();
                up.values[i] += h;
                dn.values[i] -= h;
                (batch_loss(cfg, &up, batch).unwrap() - batch_loss(cfg, &dn, batch).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn continuous_gradient_matches_finite_differences() {
        let c = NetworkConfig::toy_continuous();
        let w = WeightSpace::new(vec![0.5, 0.5]);
        let g = ste_gradient(&c, &w, &toy_batch()).unwrap();
        let fd = central_difference(&c, &w, &toy_batch(), 1e-6);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0), "{a} vs {b}");
        }

        // Deep network with ω₀ and an offset.
        let mut deep = NetworkConfig::sinnn(&[4, 3, 2], 3.0);
        deep.sine_offset = 0.1;
        let w = init_siren(&deep, 11).unwrap();
        let batch: Vec<(f64, f64)> = (0..7).map(|i| (i as f64 * 0.3 - 1.0, (i as f64).cos())).collect();
        let g = ste_gradient(&deep, &w, &batch).unwrap();
        let fd = central_difference(&deep, &w, &batch, 1e-6);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn discrete_gradient_uses_identity_surrogate() {
        // Single-neuron discrete net: ŷ = D′(sin(D(w)x)). The STE gradient
        // is 2(ŷ−y)·cos(D(w)x)·x.
        let cfg = NetworkConfig::dsinnn(&[1], 0.0);
        let w = WeightSpace::new(vec![0.4]);
        let x = 1.0;
        let y = 0.0;
        let g = ste_gradient(&cfg, &w, &[(x, y)]).unwrap();
        let yhat = ternary_discretize((1.0f64).sin()).unwrap();
        assert_eq!(yhat, 1.0);
        let expected = 2.0 * (yhat - y) * (1.0f64).cos() * x;
        assert!((g[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn siren_init_ranges() {
        let cfg = NetworkConfig::sinnn(&[10, 9, 8], 20.0);
        let w = init_siren(&cfg, 3).unwrap();
        assert_eq!(w.len(), 10 + 90 + 72);
        assert!(w.values[..10].iter().all(|v| v.abs() <= 1.0));
        assert!(w.values[..10].iter().all(|v| v.abs() <= cfg.first_layer_scale));
        let b2 = (6.0f64 / 10.0).sqrt();
        assert!(w.values[10..100].iter().all(|v| v.abs() <= b2));
        let b3 = (6.0f64 / 9.0).sqrt();
        assert!(w.values[100..].iter().all(|v| v.abs() <= b3));
        assert_eq!(w, init_siren(&cfg, 3).unwrap());
        assert_ne!(w, init_siren(&cfg, 4).unwrap());
    }

    #[test]
    fn bit_conversions() {
        let w = WeightSpace::from_bits(0b10, 2);
        assert_eq!(w.values, vec![-1.0, 1.0]);
        assert_eq!(w.to_bits(), 0b10);
        assert_eq!(WeightSpace::from_bits(0, 3).values, vec![1.0; 3]);
    }

    #[test]
    fn dsinnn_deep_scales() {
        let cfg = NetworkConfig::dsinnn(&[10, 9, 8], 0.1);
        assert_eq!(cfg.deep_layer_scales, vec![PI / 4.0, PI / 4.0]);
        cfg.validate().unwrap();
        let bad = NetworkConfig {
            layer_widths: vec![1, 0],
            ..NetworkConfig::toy_discrete()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn discretize_idempotent(x in -1e6f64..1e6) {
            let d = discretize(x).unwrap();
            prop_assert_eq!(discretize(d).unwrap(), d);
        }

        #[test]
        fn dsinnn_output_integer_and_bounded(
            ws in proptest::collection::vec(-1.0f64..1.0, 4 + 4 * 3 + 3 * 2),
            x in -20.0f64..20.0,
            offset in prop_oneof![Just(0.0), Just(0.1)],
        ) {
            let cfg = NetworkConfig::dsinnn(&[4, 3, 2], offset);
            let w = WeightSpace::new(ws);
            let y = predict(&cfg, &w, x).unwrap();
            prop_assert_eq!(y, y.round());
            prop_assert!(y.abs() <= 2.0);
        }

        #[test]
        fn toy_depends_only_on_signs(a in -2.0f64..2.0, b in -2.0f64..2.0, x in -10.0f64..10.0) {
            let cfg = NetworkConfig::toy_discrete();
            let w = WeightSpace::new(vec![a, b]);
            let s = WeightSpace::new(w.signs());
            prop_assert_eq!(dsinnn_forward(&cfg, &w, x).unwrap(), dsinnn_forward(&cfg, &s, x).unwrap());
        }

        #[test]
        fn neuron_outputs_are_ternary(z in -50.0f64..50.0, lam in 0.1f64..2.0) {
            let v = ternary_discretize((lam * z + 0.1).sin()).unwrap();
            prop_assert!(v == -1.0 || v == 0.0 || v == 1.0);
        }
    }
}
