use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self { epochs: 500, learning_rate: 0.05, seed: 0 }
    }
}

/// Two-layer perceptron `[k, 2C, C]`: ReLU hidden layer, softmax output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

fn softmax_rows(z: &mut Array2<f64>) {
    for mut row in z.outer_iter_mut() {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|x| (x - m).exp());
        let s = row.sum();
        row.mapv_inplace(|x| x / s);
    }
}

impl MlpModel {
    /// He-uniform weights, zero biases.
    pub fn init(inputs: usize, classes: usize, seed: u64) -> Self {
        let hidden = 2 * classes;
        let mut rng = seed::rng(seed);
        let a1 = (6.0 / inputs.max(1) as f64).sqrt();
        let a2 = (6.0 / hidden.max(1) as f64).sqrt();
        Self {
            w1: Array2::from_shape_simple_fn((inputs, hidden), || rng.random_range(-a1..=a1)),
            b1: Array1::zeros(hidden),
            w2: Array2::from_shape_simple_fn((hidden, classes), || rng.random_range(-a2..=a2)),
            b2: Array1::zeros(classes),
        }
    }

    pub fn classes(&self) -> usize {
        self.b2.len()
    }

    fn forward(&self, x: ArrayView2<'_, f64>) -> (Array2<f64>, Array2<f64>) {
        let mut h = x.dot(&self.w1) + &self.b1;
        h.mapv_inplace(|v| v.max(0.0));
        let mut p = h.dot(&self.w2) + &self.b2;
        softmax_rows(&mut p);
        (h, p)
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        self.forward(x).1
    }

    /// Mean cross-entropy and its gradient (same layout as the model).
    pub fn loss_and_grad(&self, x: ArrayView2<'_, f64>, y: &[usize]) -> (f64, MlpModel) {
        let n = x.nrows() as f64;
        let (h, p) = self.forward(x);
        let loss = -y.iter().enumerate().map(|(i, &c)| p[[i, c]].max(1e-300).ln()).sum::<f64>() / n;
        let mut dz = p;
        for (i, &c) in y.iter().enumerate() {
            dz[[i, c]] -= 1.0;
        }
        dz /= n;
        let gw2 = h.t().dot(&dz);
        let gb2 = dz.sum_axis(Axis(0));
        let mut dh = dz.dot(&self.w2.t());
        dh.zip_mut_with(&h, |d, &hv| {
            if hv <= 0.0 {
                *d = 0.0
            }
        });
        let gw1 = x.t().dot(&dh);
        let gb1 = dh.sum_axis(Axis(0));
        (loss, MlpModel { w1: gw1, b1: gb1, w2: gw2, b2: gb2 })
    }

    /// All parameters flattened as `w1, b1, w2, b2`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2).copied().collect()
    }

    pub fn set_from_slice(&mut self, p: &[f64]) {
        let mut it = p.iter().copied();
        for x in self.w1.iter_mut().chain(&mut self.b1).chain(&mut self.w2).chain(&mut self.b2) {
            *x = it.next().expect("parameter vector too short");
        }
    }

    fn step(&mut self, g: &MlpModel, lr: f64) {
        self.w1.scaled_add(-lr, &g.w1);
        self.b1.scaled_add(-lr, &g.b1);
        self.w2.scaled_add(-lr, &g.w2);
        self.b2.scaled_add(-lr, &g.b2);
    }
}

/// Full-batch gradient descent on cross-entropy. Needs at least two distinct
/// classes in `y`; `classes` fixes the output width.
pub fn mlp_train(x: ArrayView2<'_, f64>, y: &[usize], classes: usize, cfg: &MlpConfig) -> Result<MlpModel> {
    if x.nrows() != y.len() {
        return Err(Error::invalid(format!("{} rows for {} labels", x.nrows(), y.len())));
    }
    if let Some(&c) = y.iter().find(|&&c| c >= classes) {
        return Err(Error::invalid(format!("label {c} outside {classes} classes")));
    }
    let mut distinct: Vec<usize> = y.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid("training labels need at least two distinct classes"));
    }
    let mut model = MlpModel::init(x.ncols(), classes, cfg.seed);
    for epoch in 0..cfg.epochs {
        let (loss, grad) = model.loss_and_grad(x, y);
        if !loss.is_finite() {
            return Err(Error::Numerical(format!("classifier loss became {loss} in epoch {epoch}")));
        }
        model.step(&grad, cfg.learning_rate);
    }
    Ok(model)
}

/// Row-stochastic class probabilities.
pub fn mlp_predict(model: &MlpModel, x: ArrayView2<'_, f64>) -> Array2<f64> {
    model.predict(x)
}
