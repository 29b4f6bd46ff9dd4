use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use stochds::ingest::{write_roi_csv, Label, RoiCatalog, RoiTimeSeriesTable, CATALOG_SIZE};
use stochds::synthsig::{generate, GeneratorSpec, SignalKind};

use crate::config::{derive_seed, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    WhiteNoise,
    Ar1,
    Flicker,
    Sine,
    LogisticMap,
    Mix,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Signal family of a single series
    #[arg(long, value_enum, required_unless_present = "cohort_dir")]
    pub kind: Option<SynthKind>,
    #[arg(long, default_value_t = 200)]
    pub length: usize,
    /// Output CSV of a single series (header `value`)
    #[arg(long, required_unless_present = "cohort_dir", conflicts_with = "cohort_dir")]
    pub out: Option<PathBuf>,

    /// Write a labeled cohort (one ROI table per subject plus manifest.csv)
    #[arg(long)]
    pub cohort_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub per_class: usize,
    #[arg(long, default_value_t = CATALOG_SIZE)]
    pub rois: usize,
    /// Signal family of the HC class
    #[arg(long, value_enum, default_value = "white-noise")]
    pub kind_hc: SynthKind,
    /// Signal family of the AD class
    #[arg(long, value_enum, default_value = "mix")]
    pub kind_ad: SynthKind,

    #[arg(long, default_value_t = 0.1)]
    pub frequency: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    #[arg(long, default_value_t = 0.7)]
    pub phi: f64,
    #[arg(long, default_value_t = 20.0)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 3.9)]
    pub r: f64,
    #[arg(long, default_value_t = 0.4)]
    pub x0: f64,
}

impl SynthArgs {
    fn signal(&self, kind: SynthKind) -> SignalKind {
        let (frequency, amplitude, phase) = (self.frequency, self.amplitude, self.phase);
        match kind {
            SynthKind::WhiteNoise => SignalKind::WhiteNoise,
            SynthKind::Ar1 => SignalKind::Ar1 { phi: self.phi },
            SynthKind::Flicker => SignalKind::Flicker,
            SynthKind::Sine => SignalKind::Sine { frequency, amplitude, phase },
            SynthKind::LogisticMap => SignalKind::LogisticMap { r: self.r, x0: self.x0 },
            SynthKind::Mix => SignalKind::Mix { frequency, amplitude, phase, snr_db: self.snr_db },
        }
    }
}

pub fn run(args: &SynthArgs, cfg: &RunConfig) -> Result<(), CliError> {
    match (&args.cohort_dir, &args.out, args.kind) {
        (Some(dir), _, _) => write_cohort(args, cfg, dir),
        (None, Some(out), Some(kind)) => {
            let spec = GeneratorSpec::new(args.signal(kind), args.length, derive_seed(cfg.seed, "synth"));
            let series = generate(&spec)?;
            let table = RoiTimeSeriesTable::new("", vec!["value".into()], vec![series])?;
            write_roi_csv(&table, out)?;
            Ok(())
        }
        _ => Err(CliError::Usage("synth needs --kind and --out, or --cohort-dir".into())),
    }
}

fn write_cohort(args: &SynthArgs, cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    if args.per_class == 0 {
        return Err(CliError::Usage("--per-class must be at least 1".into()));
    }
    if args.rois == 0 || args.rois > CATALOG_SIZE {
        return Err(CliError::Usage(format!("--rois must be in 1..={CATALOG_SIZE}")));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let names: Vec<String> = RoiCatalog::default_dmn().names().into_iter().take(args.rois).collect();

    let mut manifest = String::from("subject_id,label,path\n");
    let mut n = 0;
    for (label, kind) in [(Label::Hc, args.kind_hc), (Label::Ad, args.kind_ad)] {
        for _ in 0..args.per_class {
            n += 1;
            let id = format!("sub-{n:03}");
            let series = (0..names.len())
                .map(|j| {
                    let seed = derive_seed(cfg.seed, &format!("synth/{id}/{j}"));
                    generate(&GeneratorSpec::new(args.signal(kind), args.length, seed).with_seeded_phase())
                })
                .collect::<Result<Vec<_>, _>>()?;
            let table = RoiTimeSeriesTable::new(id.clone(), names.clone(), series)?;
            let file = format!("{id}.csv");
            write_roi_csv(&table, dir.join(&file))?;
            manifest.push_str(&format!("{id},{label},{file}\n"));
        }
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, manifest).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
