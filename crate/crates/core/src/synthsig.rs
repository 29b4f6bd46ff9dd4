//! Seeded synthetic signal generators.
//!
//! Gaussian draws use the Box-Muller transform over a ChaCha8 uniform stream,
//! so a given seed always produces the same series in this implementation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{dft_direct, fft_radix2, idft, RealSeries};

/// Standard normal sampler (Box-Muller, both outputs used).
pub struct Gaussian {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Gaussian {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        // u1 in (0, 1] keeps the log finite
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    WhiteNoise,
    Ar1 {
        phi: f64,
    },
    Flicker,
    /// `amplitude * sin(2 pi frequency t + phase)`, frequency in cycles/sample.
    Sine {
        frequency: f64,
        amplitude: f64,
        phase: f64,
    },
    LogisticMap {
        r: f64,
        x0: f64,
    },
    /// A sine plus white noise scaled to the requested measured SNR.
    Mix {
        frequency: f64,
        amplitude: f64,
        phase: f64,
        snr_db: f64,
    },
}

impl SignalKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::WhiteNoise => "white_noise",
            Self::Ar1 { .. } => "ar1",
            Self::Flicker => "flicker",
            Self::Sine { .. } => "sine",
            Self::LogisticMap { .. } => "logistic_map",
            Self::Mix { .. } => "mix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: SignalKind,
    pub length: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: SignalKind, length: usize, seed: u64) -> Self {
        Self { kind, length, seed }
    }

    /// For sine and mix specs, the phase replaced by a uniform draw on
    /// `[0, 2 pi)` determined by the seed; other kinds are returned as is.
    pub fn with_seeded_phase(mut self) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1);
        let drawn = rng.gen_range(0.0..2.0 * PI);
        match &mut self.kind {
            SignalKind::Sine { phase, .. } | SignalKind::Mix { phase, .. } => *phase = drawn,
            _ => {}
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.length < 10 {
            return bad(format!("length must be at least 10, got {}", self.length));
        }
        let finite = |v: f64, name: &str| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite")))
            }
        };
        match self.kind {
            SignalKind::WhiteNoise | SignalKind::Flicker => Ok(()),
            SignalKind::Ar1 { phi } => {
                if phi.is_finite() && phi.abs() < 1.0 {
                    Ok(())
                } else {
                    bad(format!("ar1 needs |phi| < 1, got {phi}"))
                }
            }
            SignalKind::Sine { frequency, amplitude, phase } | SignalKind::Mix { frequency, amplitude, phase, .. } => {
                finite(frequency, "frequency")?;
                finite(amplitude, "amplitude")?;
                finite(phase, "phase")?;
                if !(frequency > 0.0 && frequency <= 0.5) {
                    return bad(format!("frequency must be in (0, 0.5], got {frequency}"));
                }
                if amplitude <= 0.0 {
                    return bad(format!("amplitude must be positive, got {amplitude}"));
                }
                if let SignalKind::Mix { snr_db, .. } = self.kind {
                    finite(snr_db, "snr_db")?;
                }
                Ok(())
            }
            SignalKind::LogisticMap { r, x0 } => {
                if !(r > 0.0 && r <= 4.0) {
                    return bad(format!("logistic map needs r in (0, 4], got {r}"));
                }
                if !(x0 > 0.0 && x0 < 1.0) {
                    return bad(format!("logistic map needs x0 in (0, 1), got {x0}"));
                }
                Ok(())
            }
        }
    }
}

fn white(n: usize, gauss: &mut Gaussian) -> Vec<f64> {
    (0..n).map(|_| gauss.sample()).collect()
}

fn sine(n: usize, frequency: f64, amplitude: f64, phase: f64) -> Vec<f64> {
    (0..n).map(|t| amplitude * (2.0 * PI * frequency * t as f64 + phase).sin()).collect()
}

/// White noise with its amplitude spectrum shaped by `1/sqrt(f)`, giving a
/// `1/f` power spectrum. The DC bin is removed.
fn flicker(n: usize, gauss: &mut Gaussian) -> Result<Vec<f64>> {
    let noise = white(n, gauss);
    let spectrum = if n.is_power_of_two() { fft_radix2(&noise)? } else { dft_direct(&noise)? };
    let shaped: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let folded = k.min(n - k);
            if folded == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / (folded as f64 / n as f64).sqrt()
            }
        })
        .collect();
    Ok(idft(&shaped)?.into_iter().map(|c| c.re).collect())
}

fn power(xs: &[f64]) -> f64 {
    xs.iter().map(|v| v * v).sum::<f64>() / xs.len() as f64
}

pub fn generate(spec: &GeneratorSpec) -> Result<RealSeries> {
    spec.validate()?;
    let n = spec.length;
    let mut gauss = Gaussian::new(spec.seed);
    let values = match spec.kind {
        SignalKind::WhiteNoise => white(n, &mut gauss),
        SignalKind::Ar1 { phi } => {
            let mut out = Vec::with_capacity(n);
            // stationary start
            let mut x = gauss.sample() / (1.0 - phi * phi).sqrt();
            out.push(x);
            for _ in 1..n {
                x = phi * x + gauss.sample();
                out.push(x);
            }
            out
        }
        SignalKind::Flicker => flicker(n, &mut gauss)?,
        SignalKind::Sine { frequency, amplitude, phase } => sine(n, frequency, amplitude, phase),
        SignalKind::LogisticMap { r, x0 } => {
            let mut out = Vec::with_capacity(n);
            let mut x = x0;
            for _ in 0..n {
                out.push(x);
                x = r * x * (1.0 - x);
            }
            out
        }
        SignalKind::Mix { frequency, amplitude, phase, snr_db } => {
            let signal = sine(n, frequency, amplitude, phase);
            let noise = white(n, &mut gauss);
            let target = power(&signal) / 10f64.powf(snr_db / 10.0);
            let scale = (target / power(&noise)).sqrt();
            signal.iter().zip(&noise).map(|(s, e)| s + scale * e).collect()
        }
    };
    RealSeries::new(values)
}

/// One generated series with its class index (0 for `spec_a`, 1 for `spec_b`).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub class: u8,
    pub seed: u64,
    pub series: RealSeries,
}

/// `n_per_class` series of each spec. Seeds run `base_seed, base_seed + 1,
/// ...` across the whole cohort, class A first.
pub fn cohort(
    spec_a: &GeneratorSpec,
    spec_b: &GeneratorSpec,
    n_per_class: usize,
    base_seed: u64,
) -> Result<Vec<LabeledSeries>> {
    let mut out = Vec::with_capacity(2 * n_per_class);
    for (class, spec) in [(0u8, spec_a), (1u8, spec_b)] {
        for i in 0..n_per_class {
            let seed = base_seed + (class as usize * n_per_class + i) as u64;
            let series = generate(&GeneratorSpec { seed, ..*spec })?;
            out.push(LabeledSeries { class, seed, series });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::mean;

    #[test]
    fn sine_matches_closed_form() {
        let spec = GeneratorSpec::new(SignalKind::Sine { frequency: 0.1, amplitude: 1.0, phase: 0.0 }, 20, 0);
        let s = generate(&spec).unwrap();
        for (t, v) in s.iter().enumerate() {
            assert_eq!(*v, (2.0 * PI * 0.1 * t as f64).sin());
        }
    }

    #[test]
    fn logistic_map_iterates() {
        let spec = GeneratorSpec::new(SignalKind::LogisticMap { r: 4.0, x0: 0.2 }, 10, 0);
        let s = generate(&spec).unwrap();
        let mut x = 0.2f64;
        let mut oracle = vec![];
        for _ in 0..5 {
            oracle.push(x);
            x = 4.0 * x * (1.0 - x);
        }
        let expected = [0.2, 0.64, 0.9216, 0.28901376, 0.82193923];
        for i in 0..5 {
            assert_eq!(s[i], oracle[i]);
            assert!((s[i] - expected[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn white_noise_moments() {
        let s = generate(&GeneratorSpec::new(SignalKind::WhiteNoise, 10_000, 42)).unwrap();
        let m = mean(&s);
        let var = s.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / s.len() as f64;
        assert!(m.abs() < 0.05, "mean {m}");
        assert!((0.9..=1.1).contains(&var), "variance {var}");
    }

    #[test]
    fn determinism() {
        for kind in [
            SignalKind::WhiteNoise,
            SignalKind::Ar1 { phi: 0.5 },
            SignalKind::Flicker,
            SignalKind::Mix { frequency: 0.1, amplitude: 1.0, phase: 0.0, snr_db: 0.0 },
        ] {
            let spec = GeneratorSpec::new(kind, 128, 9);
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
            let other = GeneratorSpec { seed: 10, ..spec };
            assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
        }
    }

    #[test]
    fn ar1_lag_one_autocorrelation() {
        let phi = 0.6;
        let s = generate(&GeneratorSpec::new(SignalKind::Ar1 { phi }, 10_000, 3)).unwrap();
        let m = mean(&s);
        let c0: f64 = s.iter().map(|v| (v - m) * (v - m)).sum();
        let c1: f64 = s.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        assert!((c1 / c0 - phi).abs() < 0.1);
    }

    #[test]
    fn mix_hits_requested_snr() {
        let spec =
            GeneratorSpec::new(SignalKind::Mix { frequency: 0.05, amplitude: 2.0, phase: 0.3, snr_db: 3.0 }, 400, 5);
        let mixed = generate(&spec).unwrap();
        let clean = sine(400, 0.05, 2.0, 0.3);
        let noise: Vec<f64> = mixed.iter().zip(&clean).map(|(m, c)| m - c).collect();
        let snr = 10.0 * (power(&clean) / power(&noise)).log10();
        assert!((snr - 3.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_parameters() {
        let cases = [
            GeneratorSpec::new(SignalKind::Ar1 { phi: 1.0 }, 100, 0),
            GeneratorSpec::new(SignalKind::WhiteNoise, 5, 0),
            GeneratorSpec::new(SignalKind::LogisticMap { r: 4.5, x0: 0.2 }, 100, 0),
            GeneratorSpec::new(SignalKind::Sine { frequency: 0.0, amplitude: 1.0, phase: 0.0 }, 100, 0),
        ];
        for spec in cases {
            assert!(matches!(generate(&spec), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn seeded_phase() {
        let spec = GeneratorSpec::new(SignalKind::Sine { frequency: 0.1, amplitude: 1.0, phase: 0.0 }, 50, 4);
        let a = spec.with_seeded_phase();
        assert_eq!(a, spec.with_seeded_phase());
        let SignalKind::Sine { phase, .. } = a.kind else { panic!() };
        assert!((0.0..2.0 * PI).contains(&phase) && phase != 0.0);
        let b = GeneratorSpec { seed: 5, ..spec }.with_seeded_phase();
        assert_ne!(a.kind, b.kind);
        let noise = GeneratorSpec::new(SignalKind::WhiteNoise, 50, 4);
        assert_eq!(noise.with_seeded_phase(), noise);
    }

    #[test]
    fn cohort_shape_and_determinism() {
        let a = GeneratorSpec::new(SignalKind::WhiteNoise, 50, 0);
        let b = GeneratorSpec::new(SignalKind::Sine { frequency: 0.1, amplitude: 1.0, phase: 0.0 }, 50, 0);
        let c1 = cohort(&a, &b, 50, 100).unwrap();
        assert_eq!(c1.len(), 100);
        assert_eq!(c1.iter().filter(|s| s.class == 1).count(), 50);
        let c2 = cohort(&a, &b, 50, 100).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(c1[0].seed, 100);
        assert_eq!(c1[99].seed, 199);
    }
}
