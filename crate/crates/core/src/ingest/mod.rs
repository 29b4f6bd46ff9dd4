//! Readers for ROI time-series tables, cohort manifests, NIfTI-1 volumes and
//! ROI masks.

mod catalog;
mod manifest;
mod nifti;
mod points;
mod roi;
mod table;

pub use catalog::{RoiCatalog, RoiEntry, CATALOG_SIZE, NAMED_DMN_ROIS};
pub use manifest::{parse_manifest, CohortManifest, Label, ManifestEntry};
pub use nifti::{encode_nifti, parse_nifti, read_nifti, write_nifti, NiftiDatatype, NiftiVolume4D};
pub use points::{parse_points_csv, write_points_csv, LabeledPoint};
pub use roi::{extract_roi_means, RoiMask};
pub use table::{parse_roi_csv, write_roi_csv, RoiTimeSeriesTable};
