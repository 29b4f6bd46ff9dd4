use serde::{Deserialize, Serialize};

use super::model::{AeConfig, AeModel};
use super::windows::SpectralWindowSet;
use crate::error::{Error, Result};

/// Loss terms, each averaged over its number of summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParts {
    pub total: f64,
    pub reconstruction: f64,
    pub invariance: f64,
}

/// Loss before each epoch's update.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub total: Vec<f64>,
    pub reconstruction: Vec<f64>,
    pub invariance: Vec<f64>,
}

impl TrainLog {
    pub fn len(&self) -> usize {
        self.total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_empty()
    }

    fn push(&mut self, parts: LossParts) {
        self.total.push(parts.total);
        self.reconstruction.push(parts.reconstruction);
        self.invariance.push(parts.invariance);
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `L = mean_t |x_t - xhat_t|^2 + lambda * mean_t |f_t - f_{t-1}|^2` and its
/// gradient with respect to every model parameter.
pub fn loss_and_gradient(
    model: &AeModel,
    windows: &SpectralWindowSet,
    invariance_weight: f64,
) -> Result<(LossParts, Vec<f64>)> {
    model.check_dim(windows)?;
    let n = windows.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let traces: Vec<_> = windows.features.iter().map(|x| model.forward(x)).collect();

    let recon_scale = 1.0 / n as f64;
    let inv_scale = invariance_weight / (n - 1) as f64;

    let reconstruction =
        traces.iter().zip(&windows.features).map(|(tr, x)| sq_dist(&tr.y, x)).sum::<f64>() * recon_scale;
    let invariance = traces.windows(2).map(|pair| sq_dist(&pair[1].z, &pair[0].z)).sum::<f64>() / (n - 1) as f64;

    let mut grad = vec![0.0; model.params().len()];
    let latent = model.latent_dim();
    for (t, (trace, x)) in traces.iter().zip(&windows.features).enumerate() {
        let dy: Vec<f64> = trace.y.iter().zip(x).map(|(y, x)| 2.0 * recon_scale * (y - x)).collect();
        let mut dz = vec![0.0; latent];
        if t > 0 {
            for (d, (a, b)) in dz.iter_mut().zip(trace.z.iter().zip(&traces[t - 1].z)) {
                *d += 2.0 * inv_scale * (a - b);
            }
        }
        if t + 1 < n {
            for (d, (a, b)) in dz.iter_mut().zip(traces[t + 1].z.iter().zip(&trace.z)) {
                *d -= 2.0 * inv_scale * (a - b);
            }
        }
        model.backward(x, trace, &dy, &dz, &mut grad);
    }

    let parts = LossParts { total: reconstruction + invariance_weight * invariance, reconstruction, invariance };
    Ok((parts, grad))
}

pub fn loss(model: &AeModel, windows: &SpectralWindowSet, invariance_weight: f64) -> Result<LossParts> {
    loss_and_gradient(model, windows, invariance_weight).map(|(parts, _)| parts)
}

/// Full-batch gradient descent for `cfg.epochs` epochs.
pub fn train(model: &AeModel, windows: &SpectralWindowSet, cfg: &AeConfig) -> Result<(AeModel, TrainLog)> {
    cfg.validate(model.input_dim())?;
    let mut model = model.clone();
    let mut log = TrainLog::default();
    for epoch in 0..cfg.epochs {
        let (parts, grad) = loss_and_gradient(&model, windows, cfg.invariance_weight)?;
        if !parts.total.is_finite() {
            return Err(Error::DivergedTraining { epoch });
        }
        log.push(parts);
        for (p, g) in model.params_mut().iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
    }
    if model.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::DivergedTraining { epoch: cfg.epochs });
    }
    Ok((model, log))
}

/// One latent vector per window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentTrace {
    pub latents: Vec<Vec<f64>>,
}

pub fn encode(model: &AeModel, windows: &SpectralWindowSet) -> Result<LatentTrace> {
    model.check_dim(windows)?;
    Ok(LatentTrace { latents: windows.features.iter().map(|x| model.encode_one(x)).collect() })
}

/// Decoded windows and their squared reconstruction errors.
pub fn reconstruct(model: &AeModel, windows: &SpectralWindowSet) -> Result<(SpectralWindowSet, Vec<f64>)> {
    model.check_dim(windows)?;
    let mut features = Vec::with_capacity(windows.len());
    let mut errors = Vec::with_capacity(windows.len());
    for x in &windows.features {
        let y = model.forward(x).y;
        errors.push(sq_dist(&y, x));
        features.push(y);
    }
    Ok((SpectralWindowSet { features, source_offsets: windows.source_offsets.clone() }, errors))
}

/// Euclidean distance between consecutive latents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityCurve(pub Vec<f64>);

impl DissimilarityCurve {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn dissimilarity_curve(trace: &LatentTrace) -> Result<DissimilarityCurve> {
    let n = trace.latents.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    Ok(DissimilarityCurve(trace.latents.windows(2).map(|pair| sq_dist(&pair[1], &pair[0]).sqrt()).collect()))
}
