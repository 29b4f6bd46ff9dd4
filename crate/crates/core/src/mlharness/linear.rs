use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature-wise affine map fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Population mean and std per column; a constant column gets scale 1.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let scale = (0..d)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                let s = var.sqrt();
                if s > 1e-12 * mean[j].abs().max(1.0) {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, scale }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(self.mean.iter().zip(&self.scale)).map(|(v, (m, s))| (v - m) / s).collect()
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(t))` without overflow.
pub(crate) fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub(crate) fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Weights plus intercept of a linear score `w . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearParams {
    pub fn zeros(d: usize) -> Self {
        Self { weights: vec![0.0; d], intercept: 0.0 }
    }

    pub fn margin(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.intercept
    }
}

/// Mean log-loss plus `lambda / 2 * |w|^2` and its gradient
/// `(dL/dw, dL/db)`. The intercept is not penalised.
pub fn logistic_loss_and_grad(p: &LinearParams, x: &[Vec<f64>], y: &[u8], lambda: f64) -> (f64, Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; p.weights.len()];
    let mut gb = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let t = p.margin(row);
        let yi = f64::from(label);
        // -[y log s(t) + (1-y) log(1 - s(t))] = softplus(t) - y t
        loss += softplus(t) - yi * t;
        let r = sigmoid(t) - yi;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
        gb += r;
    }
    loss /= n;
    gb /= n;
    for (g, w) in gw.iter_mut().zip(&p.weights) {
        *g = *g / n + lambda * w;
    }
    loss += 0.5 * lambda * dot(&p.weights, &p.weights);
    (loss, gw, gb)
}

pub(crate) fn fit_logistic(x: &[Vec<f64>], y: &[u8], lr: f64, epochs: usize, lambda: f64) -> Result<LinearParams> {
    let mut p = LinearParams::zeros(x[0].len());
    for _ in 0..epochs {
        let (loss, gw, gb) = logistic_loss_and_grad(&p, x, y, lambda);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        for (w, g) in p.weights.iter_mut().zip(&gw) {
            *w -= lr * g;
        }
        p.intercept -= lr * gb;
    }
    Ok(p)
}

/// Mean hinge loss on labels mapped to `+-1`, plus `lambda / 2 * |w|^2`.
pub fn hinge_loss(p: &LinearParams, x: &[Vec<f64>], y: &[u8], lambda: f64) -> f64 {
    let n = x.len() as f64;
    let hinge: f64 = x.iter().zip(y).map(|(row, &label)| (1.0 - signed(label) * p.margin(row)).max(0.0)).sum();
    hinge / n + 0.5 * lambda * dot(&p.weights, &p.weights)
}

fn signed(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn fit_svm(x: &[Vec<f64>], y: &[u8], lr: f64, epochs: usize, lambda: f64) -> Result<LinearParams> {
    let n = x.len() as f64;
    let mut p = LinearParams::zeros(x[0].len());
    for _ in 0..epochs {
        let mut gw: Vec<f64> = p.weights.iter().map(|w| lambda * w).collect();
        let mut gb = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let s = signed(label);
            if s * p.margin(row) < 1.0 {
                for (g, v) in gw.iter_mut().zip(row) {
                    *g -= s * v / n;
                }
                gb -= s / n;
            }
        }
        for (w, g) in p.weights.iter_mut().zip(&gw) {
            *w -= lr * g;
        }
        p.intercept -= lr * gb;
        if !p.intercept.is_finite() || p.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteLoss);
        }
    }
    Ok(p)
}
