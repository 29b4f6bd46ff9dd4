use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stochds::dsmetric::{compute_ds, DsConfig, StochasticityLabel};
use stochds::ingest::{
    extract_roi_means, parse_manifest, parse_roi_csv, read_nifti, Label, RoiMask, RoiTimeSeriesTable,
};

use crate::artifact::{to_json, write_json, Artifact};
use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Args)]
pub struct DsArgs {
    /// ROI table CSV of one subject (a single-series CSV also works)
    #[arg(long, conflicts_with_all = ["manifest", "nifti"])]
    pub input: Option<PathBuf>,
    /// Cohort manifest (subject_id,label,path)
    #[arg(long, conflicts_with = "nifti")]
    pub manifest: Option<PathBuf>,
    /// 4-D NIfTI volume of one subject; needs --masks
    #[arg(long, requires = "masks")]
    pub nifti: Option<PathBuf>,
    /// 3-D NIfTI ROI masks, one per ROI, named after the file
    #[arg(long, num_args = 1..)]
    pub masks: Vec<PathBuf>,
    /// Output JSON; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Abort on the first failing series instead of recording it
    #[arg(long)]
    pub fail_fast: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub code: String,
    pub message: String,
}

impl From<&stochds::Error> for ErrorRecord {
    fn from(e: &stochds::Error) -> Self {
        Self { code: e.code().into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RoiOutcome {
    Ok { cv1: f64, cv2: f64, ds: f64, label: StochasticityLabel, scales_used: Vec<usize>, skipped_scales: usize },
    Error(ErrorRecord),
}

impl RoiOutcome {
    pub fn ds(&self) -> Option<f64> {
        match self {
            RoiOutcome::Ok { ds, .. } => Some(*ds),
            RoiOutcome::Error(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub subject_id: String,
    pub cohort_label: Option<Label>,
    /// Set when the subject's input could not be loaded at all.
    pub error: Option<ErrorRecord>,
    pub rois: BTreeMap<String, RoiOutcome>,
}

impl SubjectRecord {
    pub fn is_complete(&self) -> bool {
        self.error.is_none() && !self.rois.is_empty() && self.rois.values().all(|r| r.ds().is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsBatch {
    pub records: Vec<SubjectRecord>,
}

enum Source {
    Table(PathBuf),
    Nifti(PathBuf),
}

struct Job {
    id: String,
    label: Option<Label>,
    source: Source,
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".nii").or_else(|| name.strip_suffix(".csv")).unwrap_or(&name).to_string()
}

fn is_nifti(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "nii")
}

fn load(source: &Source, masks: &[RoiMask]) -> stochds::Result<RoiTimeSeriesTable> {
    match source {
        Source::Table(p) => parse_roi_csv(p),
        Source::Nifti(p) => extract_roi_means(&read_nifti(p)?, masks),
    }
}

fn outcome(result: stochds::Result<stochds::dsmetric::DsResult>) -> RoiOutcome {
    match result {
        Ok(r) => RoiOutcome::Ok {
            cv1: r.cv1,
            cv2: r.cv2,
            ds: r.ds,
            label: r.label,
            scales_used: r.scales_used.sizes().to_vec(),
            skipped_scales: r.diagnostics.skipped.len(),
        },
        Err(e) => RoiOutcome::Error((&e).into()),
    }
}

/// DS for every ROI of every subject. ROI series run in parallel; records
/// come back sorted by subject, ROIs by name.
fn compute_batch(jobs: Vec<Job>, masks: &[RoiMask], cfg: &DsConfig) -> Vec<SubjectRecord> {
    let loaded: Vec<(Job, stochds::Result<RoiTimeSeriesTable>)> = jobs
        .into_par_iter()
        .map(|job| {
            let table = load(&job.source, masks);
            (job, table)
        })
        .collect();

    let series: Vec<(usize, &str, &stochds::numkernel::RealSeries)> = loaded
        .iter()
        .enumerate()
        .filter_map(|(i, (_, t))| t.as_ref().ok().map(|t| (i, t)))
        .flat_map(|(i, t)| t.roi_names.iter().zip(&t.series).map(move |(n, s)| (i, n.as_str(), s)))
        .collect();
    let results: Vec<(usize, String, RoiOutcome)> =
        series.par_iter().map(|&(i, name, s)| (i, name.to_string(), outcome(compute_ds(s, cfg)))).collect();

    let mut records: Vec<SubjectRecord> = loaded
        .iter()
        .map(|(job, table)| SubjectRecord {
            subject_id: job.id.clone(),
            cohort_label: job.label,
            error: table.as_ref().err().map(ErrorRecord::from),
            rois: BTreeMap::new(),
        })
        .collect();
    for (i, name, o) in results {
        records[i].rois.insert(name, o);
    }
    records.sort_by(|a, b| a.subject_id.cmp(&b.subject_id));
    records
}

pub fn run(args: &DsArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let masks = args.masks.iter().map(RoiMask::read).collect::<Result<Vec<_>, _>>()?;
    let jobs = if let Some(m) = &args.manifest {
        parse_manifest(m)?
            .entries
            .into_iter()
            .map(|e| Job {
                source: if is_nifti(&e.path) { Source::Nifti(e.path) } else { Source::Table(e.path) },
                id: e.subject_id,
                label: Some(e.label),
            })
            .collect()
    } else if let Some(p) = &args.input {
        vec![Job { id: stem(p), label: None, source: Source::Table(p.clone()) }]
    } else if let Some(p) = &args.nifti {
        vec![Job { id: stem(p), label: None, source: Source::Nifti(p.clone()) }]
    } else {
        return Err(CliError::Usage("ds needs one of --input, --manifest or --nifti".into()));
    };
    if jobs.iter().any(|j| matches!(j.source, Source::Nifti(_))) && masks.is_empty() {
        return Err(CliError::Usage("NIfTI inputs need --masks".into()));
    }

    let records = compute_batch(jobs, &masks, &cfg.ds_config());
    for r in &records {
        if let Some(e) = &r.error {
            eprintln!("warning: subject {}: {} ({})", r.subject_id, e.message, e.code);
        }
        for (roi, o) in &r.rois {
            if let RoiOutcome::Error(e) = o {
                eprintln!("warning: subject {} ROI {roi}: {} ({})", r.subject_id, e.message, e.code);
            }
        }
    }
    if args.fail_fast && records.iter().any(|r| !r.is_complete()) {
        return Err(CliError::Runtime("DS failed for at least one series".into()));
    }

    let artifact = Artifact::new("ds", cfg, DsBatch { records });
    match &args.out {
        Some(path) => write_json(path, &artifact),
        None => {
            print!("{}", to_json(&artifact));
            Ok(())
        }
    }
}
