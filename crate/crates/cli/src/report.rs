use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use stochds::ingest::{Label, RoiCatalog};
use stochds::numkernel::{mean, population_std};

use crate::artifact::{read_artifact, write_json, Artifact};
use crate::config::RunConfig;
use crate::ds::{DsBatch, SubjectRecord};
use crate::CliError;

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub ds: PathBuf,
    /// ROI catalog CSV with pairings; the default DMN catalog otherwise
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Require the paired-ROI view
    #[arg(long)]
    pub paired: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Summary over the subjects that have a value; the moments are absent
/// when there are none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
    pub median: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { count: 0, mean: None, std: None, median: None };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        Self { count: n, mean: Some(mean(values)), std: Some(population_std(values)), median: Some(median) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub hc_count: usize,
    pub ad_count: usize,
    /// AD mean minus HC mean.
    pub mean_difference: Option<f64>,
    /// AD median minus HC median.
    pub median_difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectDelta {
    pub subject_id: String,
    pub cohort_label: Label,
    pub delta: f64,
}

/// `second - first` for every subject with valid DS in both ROIs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedView {
    pub first: String,
    pub second: String,
    pub deltas: Vec<SubjectDelta>,
    pub hc: Summary,
    pub ad: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub subjects: BTreeMap<Label, usize>,
    pub within_hc: BTreeMap<String, Summary>,
    pub within_ad: BTreeMap<String, Summary>,
    pub hc_vs_ad: BTreeMap<String, Contrast>,
    pub paired_deltas: Vec<PairedView>,
}

fn diff(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

pub fn group_report(records: &[SubjectRecord], pairs: &[(String, String)]) -> Result<GroupReport, CliError> {
    let mut labeled = Vec::with_capacity(records.len());
    for r in records {
        let label = r.cohort_label.ok_or_else(|| {
            CliError::Usage(format!("subject {} has no cohort label; run ds with --manifest", r.subject_id))
        })?;
        labeled.push((label, r));
    }
    let values = |roi: &str, label: Label| -> Vec<f64> {
        labeled.iter().filter(|(l, _)| *l == label).filter_map(|(_, r)| r.rois.get(roi).and_then(|o| o.ds())).collect()
    };

    let rois: BTreeSet<&String> = records.iter().flat_map(|r| r.rois.keys()).collect();
    let mut report = GroupReport {
        subjects: BTreeMap::new(),
        within_hc: BTreeMap::new(),
        within_ad: BTreeMap::new(),
        hc_vs_ad: BTreeMap::new(),
        paired_deltas: Vec::new(),
    };
    for (label, _) in &labeled {
        *report.subjects.entry(*label).or_default() += 1;
    }
    for roi in rois {
        let hc = Summary::of(&values(roi, Label::Hc));
        let ad = Summary::of(&values(roi, Label::Ad));
        report.hc_vs_ad.insert(
            roi.clone(),
            Contrast {
                hc_count: hc.count,
                ad_count: ad.count,
                mean_difference: diff(ad.mean, hc.mean),
                median_difference: diff(ad.median, hc.median),
            },
        );
        report.within_hc.insert(roi.clone(), hc);
        report.within_ad.insert(roi.clone(), ad);
    }

    for (first, second) in pairs {
        let deltas: Vec<SubjectDelta> = labeled
            .iter()
            .filter_map(|(label, r)| {
                let a = r.rois.get(first)?.ds()?;
                let b = r.rois.get(second)?.ds()?;
                Some(SubjectDelta { subject_id: r.subject_id.clone(), cohort_label: *label, delta: b - a })
            })
            .collect();
        let of = |label: Label| {
            let v: Vec<f64> = deltas.iter().filter(|d| d.cohort_label == label).map(|d| d.delta).collect();
            Summary::of(&v)
        };
        report.paired_deltas.push(PairedView {
            first: first.clone(),
            second: second.clone(),
            hc: of(Label::Hc),
            ad: of(Label::Ad),
            deltas,
        });
    }
    Ok(report)
}

pub fn run(args: &ReportArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let batch: Artifact<DsBatch> = read_artifact(&args.ds, "ds")?;
    let catalog = match &args.catalog {
        Some(p) => RoiCatalog::parse_csv(p)?,
        None => RoiCatalog::default_dmn(),
    };
    let pairs = catalog.pairs();
    if args.paired && pairs.is_empty() {
        return Err(CliError::MissingPairing);
    }
    let report = group_report(&batch.body.records, &pairs)?;
    write_json(&args.out, &Artifact::new("report", cfg, report))
}
