use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor used when turning a real-valued curve into a distribution.
pub const KL_EPSILON: f64 = 1e-8;

const MEAN_FLOOR: f64 = 1e-12;
const RANGE_FLOOR: f64 = 1e-12;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard deviation with divisor N.
pub fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// `100 * std / mean`, population form.
pub fn coefficient_of_variation(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: xs.len() });
    }
    let m = mean(xs);
    if m.abs() < MEAN_FLOOR {
        return Err(Error::DegenerateStatistics { mean: m });
    }
    Ok(population_std(xs) / m * 100.0)
}

/// A strictly positive vector summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {i} is {} (must be > 0)", probs[i])));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for ProbVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Min-max rescale to `[epsilon, 1]`, then divide by the sum.
pub fn normalize_to_distribution(xs: &[f64], epsilon: f64) -> Result<ProbVector> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: xs.len() });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be in (0, 1), got {epsilon}")));
    }
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let range = hi - lo;
    if !(range >= RANGE_FLOOR) {
        return Err(Error::ConstantSeries { range });
    }
    let scaled: Vec<f64> = xs.iter().map(|&x| epsilon + (1.0 - epsilon) * (x - lo) / range).collect();
    let total: f64 = scaled.iter().sum();
    ProbVector::new(scaled.into_iter().map(|v| v / total).collect())
}

/// `sum p_i ln(p_i / q_i)` in nats.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    if let Some(index) = q.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroSupport { index });
    }
    Ok(p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cv_examples() {
        assert_eq!(coefficient_of_variation(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert!((coefficient_of_variation(&[1.0, 3.0]).unwrap() - 50.0).abs() < 1e-12);
        assert!(matches!(coefficient_of_variation(&[0.0, 0.0, 0.0]), Err(Error::DegenerateStatistics { .. })));
        assert!(matches!(coefficient_of_variation(&[1.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn normalize_examples() {
        let eps = 1e-8;
        let p = normalize_to_distribution(&[0.0, 1.0], eps).unwrap();
        assert!((p[0] - eps / (1.0 + eps)).abs() < 1e-20);
        assert!((p[1] - 1.0 / (1.0 + eps)).abs() < 1e-15);
        assert!(matches!(normalize_to_distribution(&[3.0, 3.0, 3.0], eps), Err(Error::ConstantSeries { .. })));
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        let got = kl_divergence(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.14384).abs() < 1e-5);

        let pq = kl_divergence(&[0.3, 0.7], &[0.7, 0.3]).unwrap();
        let qp = kl_divergence(&[0.7, 0.3], &[0.3, 0.7]).unwrap();
        let direct = 0.3 * (0.3f64 / 0.7).ln() + 0.7 * (0.7f64 / 0.3).ln();
        assert!((pq - direct).abs() < 1e-15);
        let uneven = kl_divergence(&[0.2, 0.8], &[0.6, 0.4]).unwrap();
        let reverse = kl_divergence(&[0.6, 0.4], &[0.2, 0.8]).unwrap();
        assert!((uneven - reverse).abs() > 1e-3);
        // mirrored pair: the two directions coincide
        assert!((pq - qp).abs() < 1e-15);
    }

    #[test]
    fn kl_guards() {
        assert!(matches!(kl_divergence(&[1.0], &[0.5, 0.5]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), Err(Error::ZeroSupport { index: 1 })));
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn cv_is_scale_invariant(
            xs in prop::collection::vec(0.1f64..100.0, 2..50),
            c in 0.001f64..1000.0,
        ) {
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let a = coefficient_of_variation(&xs).unwrap();
            let b = coefficient_of_variation(&scaled).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn normalized_sums_to_one(xs in prop::collection::vec(-1e3f64..1e3, 2..100)) {
            prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-6));
            let p = normalize_to_distribution(&xs, KL_EPSILON).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
