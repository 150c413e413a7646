//! Tiny dense-network backend.
//!
//! Validates the drift physics end to end at desk scale: a two-layer dense
//! network (hidden width derived from the architecture's mean width) is
//! trained digitally on a fixed synthetic two-class Gaussian-blobs dataset,
//! optionally with additive weight-noise injection, then run through the
//! analog pipeline at the requested read time.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::imc::{linear_forward, RpuConfig};
use crate::seeds::{derive_rng, tag};
use crate::space::Architecture;

/// Parameters of the tiny-net backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TinyNetParams {
    pub input_dim: usize,
    pub train_samples: usize,
    pub test_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Distance between the two class means (within-class std is 1).
    pub class_separation: f64,
    /// Inject weight noise during training (hardware-aware training).
    pub hwa_noise: bool,
    /// Recorded seed of the synthetic dataset.
    pub data_seed: u64,
}

impl Default for TinyNetParams {
    fn default() -> Self {
        TinyNetParams {
            input_dim: 16,
            train_samples: 256,
            test_samples: 512,
            epochs: 300,
            learning_rate: 0.1,
            class_separation: 2.4,
            hwa_noise: true,
            data_seed: 0x5eed,
        }
    }
}

/// A trained two-layer network plus its held-out test set.
#[derive(Debug, Clone)]
pub struct TrainedTinyNet {
    w1: Array2<f64>,
    b1: Array1<f64>,
    w2: Array2<f64>,
    b2: Array1<f64>,
    test_x: Array2<f64>,
    test_y: Vec<usize>,
}

/// Hidden width derived from the architecture's mean external width.
pub fn hidden_width(arch: &Architecture) -> usize {
    let mean_ext: f64 = arch
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (arch.oc0 * (1 << i) * b.wf) as f64)
        .sum::<f64>()
        / arch.blocks.len() as f64;
    ((mean_ext / 8.0).round() as usize).clamp(4, 48)
}

fn gaussian_blobs(
    n: usize,
    dim: usize,
    separation: f64,
    rng: &mut ChaCha8Rng,
) -> (Array2<f64>, Vec<usize>) {
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let mut dir: Vec<f64> = (0..dim).map(|_| std_normal.sample(rng)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|v| *v /= norm);

    let mut x = Array2::zeros((n, dim));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let sign = if class == 0 { -1.0 } else { 1.0 };
        for j in 0..dim {
            x[[i, j]] = sign * separation / 2.0 * dir[j] + std_normal.sample(rng);
        }
        y.push(class);
    }
    (x, y)
}

fn relu(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(|v| v.max(0.0))
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

fn noisy(w: &Array2<f64>, rel_std: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    if rel_std <= 0.0 {
        return w.clone();
    }
    let max_abs = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return w.clone();
    }
    let dist = Normal::new(0.0, rel_std * max_abs).unwrap();
    w.mapv(|v| v) + Array2::from_shape_fn(w.dim(), |_| dist.sample(rng))
}

fn accuracy_from_logits(logits: &Array2<f64>, labels: &[usize]) -> f64 {
    let hits = logits
        .outer_iter()
        .zip(labels)
        .filter(|(row, &y)| {
            let pred = if row[1] > row[0] { 1 } else { 0 };
            pred == y
        })
        .count();
    hits as f64 / labels.len() as f64
}

/// Trains the tiny network for an architecture proxy.
///
/// Training is plain full-batch gradient descent on softmax cross-entropy.
/// With `hwa_noise` set, each step injects additive Gaussian weight noise
/// (std `rpu.prog_noise_std` of the layer max) into the forward/backward
/// pass while updates accumulate into the clean weights. Non-convergence is
/// not an error; the achieved accuracy is simply what the net delivers.
pub fn train_tiny_net(
    arch: &Architecture,
    rpu: &RpuConfig,
    params: &TinyNetParams,
    seed: u64,
) -> TrainedTinyNet {
    let h = hidden_width(arch);
    let d = params.input_dim;
    let mut data_rng = derive_rng(params.data_seed, &[tag::TINYNET_DATA]);
    let (train_x, train_y) =
        gaussian_blobs(params.train_samples, d, params.class_separation, &mut data_rng);
    let (test_x, test_y) =
        gaussian_blobs(params.test_samples, d, params.class_separation, &mut data_rng);

    let mut rng = derive_rng(seed, &[tag::TRAIN]);
    let init = Normal::new(0.0, 1.0).unwrap();
    let mut w1 = Array2::from_shape_fn((h, d), |_| init.sample(&mut rng) / (d as f64).sqrt());
    let mut b1 = Array1::zeros(h);
    let mut w2 = Array2::from_shape_fn((2, h), |_| init.sample(&mut rng) / (h as f64).sqrt());
    let mut b2 = Array1::zeros(2);

    let n = train_x.nrows() as f64;
    let mut onehot = Array2::zeros((train_x.nrows(), 2));
    for (i, &y) in train_y.iter().enumerate() {
        onehot[[i, y]] = 1.0;
    }

    let inject = if params.hwa_noise { rpu.prog_noise_std } else { 0.0 };
    for _ in 0..params.epochs {
        let w1n = noisy(&w1, inject, &mut rng);
        let w2n = noisy(&w2, inject, &mut rng);

        let z1 = train_x.dot(&w1n.t()) + &b1;
        let a1 = relu(&z1);
        let z2 = a1.dot(&w2n.t()) + &b2;
        let p = softmax_rows(&z2);

        let dz2 = (&p - &onehot) / n;
        let dw2 = dz2.t().dot(&a1);
        let db2 = dz2.sum_axis(Axis(0));
        let da1 = dz2.dot(&w2n);
        let dz1 = &da1 * &z1.mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
        let dw1 = dz1.t().dot(&train_x);
        let db1 = dz1.sum_axis(Axis(0));

        w2 = w2 - params.learning_rate * &dw2;
        b2 = b2 - params.learning_rate * &db2;
        w1 = w1 - params.learning_rate * &dw1;
        b1 = b1 - params.learning_rate * &db1;
    }

    TrainedTinyNet {
        w1,
        b1,
        w2,
        b2,
        test_x,
        test_y,
    }
}

impl TrainedTinyNet {
    /// Test accuracy of the pure digital forward pass.
    pub fn digital_accuracy(&self) -> f64 {
        let a1 = relu(&(self.test_x.dot(&self.w1.t()) + &self.b1));
        let logits = a1.dot(&self.w2.t()) + &self.b2;
        accuracy_from_logits(&logits, &self.test_y)
    }

    fn analog_layer(
        &self,
        w: ArrayView2<'_, f64>,
        x: ArrayView2<'_, f64>,
        rpu: &RpuConfig,
        t: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Array2<f64>> {
        linear_forward(w, x, rpu, t, rng)
    }
}

/// Test accuracy with both dense layers executed through the analog
/// pipeline at read time `t`. Biases and activations remain digital.
pub fn tiny_net_eval(
    net: &TrainedTinyNet,
    rpu: &RpuConfig,
    t: f64,
    trial_rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let z1 = net.analog_layer(net.w1.view(), net.test_x.view(), rpu, t, trial_rng)? + &net.b1;
    let a1 = relu(&z1);
    let logits = net.analog_layer(net.w2.view(), a1.view(), rpu, t, trial_rng)? + &net.b2;
    Ok(accuracy_from_logits(&logits, &net.test_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures;

    #[test]
    fn ideal_analog_matches_digital_within_one_percent() {
        let rpu = RpuConfig::ideal();
        let params = TinyNetParams::default();
        let net = train_tiny_net(&fixtures::analognas_t100(), &rpu, &params, 1);
        let digital = net.digital_accuracy();
        assert!(digital > 0.8, "training failed: {digital}");
        let mut rng = derive_rng(2, &[tag::EVAL_TRIAL]);
        let analog = tiny_net_eval(&net, &rpu, rpu.t0, &mut rng).unwrap();
        assert!((digital - analog).abs() <= 0.01, "{digital} vs {analog}");
    }

    #[test]
    fn hidden_width_tracks_architecture_width() {
        let narrow = fixtures::analognas_t100();
        let wide = fixtures::analognas_t1m();
        assert!(hidden_width(&wide) >= hidden_width(&narrow));
    }

    #[test]
    fn month_degrades_no_more_than_tolerance_over_trials() {
        let rpu = RpuConfig::default();
        let params = TinyNetParams::default();
        let net = train_tiny_net(&fixtures::analognas_t100(), &rpu, &params, 3);
        let mut short = 0.0;
        let mut month = 0.0;
        for trial in 0..8u64 {
            let base = derive_rng(4, &[tag::EVAL_TRIAL, trial]);
            short += tiny_net_eval(&net, &rpu, rpu.t0, &mut base.clone()).unwrap();
            month += tiny_net_eval(&net, &rpu, 2_592_000.0, &mut base.clone()).unwrap();
        }
        short /= 8.0;
        month /= 8.0;
        assert!(month <= short + 0.02, "short {short}, month {month}");
    }
}
