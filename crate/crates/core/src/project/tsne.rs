use serde::{Deserialize, Serialize};

use super::{Embedding2D, EmbeddingMethod};
use crate::error::{Error, Result};
use crate::mlharness::FeatureMatrix;
use crate::synthsig::Gaussian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub exaggeration: f64,
    pub exaggeration_iters: usize,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 15.0,
            iterations: 1000,
            seed: 0,
            learning_rate: 200.0,
            exaggeration: 12.0,
            exaggeration_iters: 250,
        }
    }
}

const ENTROPY_TOL: f64 = 1e-5;
const MAX_BISECTION: usize = 50;

fn sq_distances(x: &FeatureMatrix) -> Vec<Vec<f64>> {
    let n = x.n_rows();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Conditional row `p_{j|i}` at precision `beta`, and its Shannon entropy in
/// nats. Distances are shifted by the row minimum for stability.
fn conditional_row(d: &[f64], i: usize, beta: f64, out: &mut [f64]) -> f64 {
    let dmin = d.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (j, o) in out.iter_mut().enumerate() {
        *o = if j == i { 0.0 } else { (-(d[j] - dmin) * beta).exp() };
        sum += *o;
    }
    let mut h = 0.0;
    for (j, o) in out.iter_mut().enumerate() {
        *o /= sum;
        if j != i && *o > 0.0 {
            h -= *o * o.ln();
        }
    }
    h
}

/// Symmetrised joint probabilities `(p_{j|i} + p_{i|j}) / 2n` and the
/// perplexity each row actually reached.
pub fn joint_probabilities(x: &FeatureMatrix, perplexity: f64) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = x.n_rows();
    let needed = (3.0 * perplexity).ceil() as usize;
    if !(perplexity > 1.0) || n < needed {
        return Err(Error::PerplexityTooLarge { perplexity, needed, rows: n });
    }
    let d = sq_distances(x);
    let target = perplexity.ln();
    let mut cond = vec![vec![0.0; n]; n];
    let mut achieved = vec![0.0; n];
    for i in 0..n {
        let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
        let mut beta = 1.0;
        let mut h = conditional_row(&d[i], i, beta, &mut cond[i]);
        for _ in 0..MAX_BISECTION {
            let diff = h - target;
            if diff.abs() < ENTROPY_TOL {
                break;
            }
            if diff > 0.0 {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
            h = conditional_row(&d[i], i, beta, &mut cond[i]);
        }
        achieved[i] = h.exp();
    }
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            p[i][j] = (cond[i][j] + cond[j][i]) / (2.0 * n as f64);
        }
    }
    Ok((p, achieved))
}

fn kl_divergence(p: &[Vec<f64>], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let mut z = 0.0;
    let mut num = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                num[i][j] = 1.0 / (1.0 + dx * dx + dy * dy);
                z += num[i][j];
            }
        }
    }
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && p[i][j] > 0.0 {
                let q = (num[i][j] / z).max(1e-300);
                kl += p[i][j] * (p[i][j] / q).ln();
            }
        }
    }
    kl
}

/// Exact t-SNE. Gradient descent with learning rate 200, momentum 0.5 and
/// then 0.8, early exaggeration of P for the first iterations, and
/// per-coordinate adaptive gains.
pub fn tsne_2d(x: &FeatureMatrix, cfg: &TsneConfig) -> Result<Embedding2D> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidConfig("t-SNE needs at least one iteration".into()));
    }
    let (p, _) = joint_probabilities(x, cfg.perplexity)?;
    let n = x.n_rows();
    let mut g = Gaussian::new(cfg.seed);
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [g.sample() * 1e-4, g.sample() * 1e-4]).collect();
    let mut velocity = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0_f64; 2]; n];
    let mut kl_trace = Vec::with_capacity(cfg.iterations + 1);
    let mut num = vec![vec![0.0; n]; n];

    for it in 0..cfg.iterations {
        kl_trace.push(kl_divergence(&p, &y));
        let exaggeration = if it < cfg.exaggeration_iters { cfg.exaggeration } else { 1.0 };
        let momentum = if it < 250 { 0.5 } else { 0.8 };

        let mut z = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let dx = y[i][0] - y[j][0];
                    let dy = y[i][1] - y[j][1];
                    num[i][j] = 1.0 / (1.0 + dx * dx + dy * dy);
                    z += num[i][j];
                }
            }
        }
        for i in 0..n {
            let mut grad = [0.0; 2];
            for j in 0..n {
                if i != j {
                    let w = (exaggeration * p[i][j] - num[i][j] / z) * num[i][j];
                    grad[0] += 4.0 * w * (y[i][0] - y[j][0]);
                    grad[1] += 4.0 * w * (y[i][1] - y[j][1]);
                }
            }
            for k in 0..2 {
                gains[i][k] = if (grad[k] > 0.0) != (velocity[i][k] > 0.0) {
                    gains[i][k] + 0.2
                } else {
                    (gains[i][k] * 0.8).max(0.01)
                };
                velocity[i][k] = momentum * velocity[i][k] - cfg.learning_rate * gains[i][k] * grad[k];
            }
        }
        for (yi, v) in y.iter_mut().zip(&velocity) {
            yi[0] += v[0];
            yi[1] += v[1];
        }
        let cx = y.iter().map(|v| v[0]).sum::<f64>() / n as f64;
        let cy = y.iter().map(|v| v[1]).sum::<f64>() / n as f64;
        for yi in &mut y {
            yi[0] -= cx;
            yi[1] -= cy;
        }
    }
    kl_trace.push(kl_divergence(&p, &y));
    if y.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
        return Err(Error::NonFiniteLoss);
    }
    Ok(Embedding2D {
        method: EmbeddingMethod::Tsne {
            perplexity: cfg.perplexity,
            iterations: cfg.iterations,
            seed: cfg.seed,
            kl_trace,
        },
        subject_ids: x.subject_ids().to_vec(),
        points: y,
        labels: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(seed: u64) -> FeatureMatrix {
        let mut g = Gaussian::new(seed);
        let rows = (0..40)
            .map(|i| {
                let c = if i < 20 { 0.0 } else { 10.0 };
                (0..3).map(|_| c + g.sample()).collect()
            })
            .collect();
        FeatureMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn p_is_a_symmetric_distribution() {
        let (p, achieved) = joint_probabilities(&blobs(1), 10.0).unwrap();
        let total: f64 = p.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-9);
        for i in 0..40 {
            assert_eq!(p[i][i], 0.0);
            for j in 0..40 {
                assert_eq!(p[i][j], p[j][i]);
                assert!(p[i][j] >= 0.0);
            }
        }
        assert!(achieved.iter().all(|a| (a - 10.0).abs() < 1e-3), "{achieved:?}");
    }

    #[test]
    fn perplexity_guard() {
        assert!(matches!(
            joint_probabilities(&blobs(1), 15.0),
            Err(Error::PerplexityTooLarge { needed: 45, rows: 40, .. })
        ));
    }

    #[test]
    fn seeded_and_decreasing() {
        let cfg = TsneConfig { perplexity: 8.0, iterations: 400, seed: 3, ..Default::default() };
        let a = tsne_2d(&blobs(2), &cfg).unwrap();
        assert_eq!(a, tsne_2d(&blobs(2), &cfg).unwrap());
        let EmbeddingMethod::Tsne { kl_trace, .. } = &a.method else { panic!() };
        assert_eq!(kl_trace.len(), 401);
        assert!(kl_trace[400] < kl_trace[251]);
        assert!(kl_trace[400] < kl_trace[0]);
    }
}
