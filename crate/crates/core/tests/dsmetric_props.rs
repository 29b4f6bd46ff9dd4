mod common;

use common::oracle::reference_ds;
use proptest::prelude::*;
use stochds::autoenc::AeConfig;
use stochds::dsmetric::{compute_ds, ds_from_curve, standardize_series, DsConfig, ScaleGrid};
use stochds::numkernel::RealSeries;
use stochds::synthsig::{generate, GeneratorSpec, SignalKind};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn series(kind: SignalKind, length: usize, seed: u64) -> RealSeries {
    generate(&GeneratorSpec::new(kind, length, seed).with_seeded_phase()).unwrap()
}

const SINE: SignalKind = SignalKind::Sine { frequency: 0.1, amplitude: 1.0, phase: 0.0 };

fn fast() -> DsConfig {
    DsConfig { ae: AeConfig { epochs: 60, ..AeConfig::default() }, ..DsConfig::default() }
}

#[test]
fn pipeline_matches_single_function_reference() {
    let cfg = DsConfig::default();
    let kinds = [
        SignalKind::WhiteNoise,
        SignalKind::Ar1 { phi: 0.7 },
        SignalKind::Mix { frequency: 0.1, amplitude: 1.0, phase: 0.0, snr_db: 10.0 },
        SignalKind::Flicker,
    ];
    let mut compared = 0;
    for seed in 0..20u64 {
        let x = series(kinds[seed as usize % kinds.len()], 150, seed);
        let r = compute_ds(&x, &cfg).unwrap();
        let d = r.dissimilarity.as_ref().unwrap();
        let oracle = reference_ds(&x, d.values(), cfg.windowing.window_len, cfg.grid.sizes());

        assert_eq!(r.kl_series.scales(), oracle.z.keys().copied().collect::<Vec<_>>());
        for (w, z) in &oracle.z {
            assert!(close(r.kl_series.0[w], *z), "seed {seed} z at {w}");
        }
        assert_eq!(r.prominence_cov.spans.len(), oracle.cov.len());
        for (w, cov) in &oracle.cov {
            let got = r.prominence_cov.for_scale(*w).unwrap();
            assert_eq!(got.len(), cov.len());
            for (a, b) in got.iter().zip(cov) {
                assert!(close(*a, *b), "seed {seed} COV at {w}");
            }
        }
        assert!(close(r.cv1, oracle.cv1));
        assert!(close(r.cv2, oracle.cv2));
        assert!(close(r.ds, oracle.ds));
        compared += 1;
    }
    assert_eq!(compared, 20);
}

#[test]
fn ds_is_cv1_times_cv2_over_100() {
    let cfg = fast();
    for seed in 0..10 {
        for kind in [SignalKind::WhiteNoise, SINE, SignalKind::Ar1 { phi: 0.5 }] {
            if let Ok(r) = compute_ds(&series(kind, 200, seed), &cfg) {
                assert!((r.ds - r.cv1 * r.cv2 / 100.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn amplitude_does_not_move_ds() {
    let cfg = DsConfig::default();
    for (kind, seed) in [(SignalKind::WhiteNoise, 1), (SINE, 1)] {
        let x = series(kind, 200, seed);
        let base = compute_ds(&x, &cfg).unwrap().ds;
        for c in [0.5, 2.0, 10.0] {
            let scaled = RealSeries::new(x.iter().map(|v| c * v).collect()).unwrap();
            let ds = compute_ds(&scaled, &cfg).unwrap().ds;
            assert!((ds - base).abs() < 0.1 * base, "{} c={c}: {ds} vs {base}", kind.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dropping_a_scale_keeps_the_others(seed in 0u64..1000, drop in 0usize..23) {
        let cfg = fast();
        let x = series(SignalKind::WhiteNoise, 150, seed);
        let full = compute_ds(&x, &cfg).unwrap();
        let d = full.dissimilarity.clone().unwrap();
        let xs = standardize_series(&x).unwrap();

        let mut sizes = cfg.grid.sizes().to_vec();
        sizes.remove(drop);
        let reduced = DsConfig { grid: ScaleGrid::from_sizes(sizes).unwrap(), ..cfg };
        let r = ds_from_curve(&xs, &d, &reduced).unwrap();
        for (w, z) in &r.kl_series.0 {
            prop_assert_eq!(z.to_bits(), full.kl_series.0[w].to_bits());
        }
        prop_assert!(!r.kl_series.0.contains_key(&cfg.grid.sizes()[drop]));
    }

    #[test]
    fn identity_holds_for_any_seed(seed in any::<u64>()) {
        let cfg = fast();
        if let Ok(r) = compute_ds(&series(SignalKind::Ar1 { phi: 0.3 }, 120, seed), &cfg) {
            prop_assert!((r.ds - r.cv1 * r.cv2 / 100.0).abs() <= 1e-9);
            prop_assert!(r.scales_used.len() >= 2);
        }
    }
}
