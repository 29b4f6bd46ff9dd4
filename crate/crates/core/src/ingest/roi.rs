use std::path::Path;

use serde::{Deserialize, Serialize};

use super::nifti::{read_nifti, NiftiVolume4D};
use super::table::RoiTimeSeriesTable;
use crate::error::{Error, Result};
use crate::numkernel::RealSeries;

/// Voxel inclusion map over a 3D grid, x fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoiMask {
    pub name: String,
    pub dims: [usize; 3],
    pub voxels: Vec<bool>,
}

impl RoiMask {
    pub fn new(name: impl Into<String>, dims: [usize; 3], voxels: Vec<bool>) -> Result<Self> {
        let name = name.into();
        if voxels.len() != dims.iter().product::<usize>() {
            return Err(Error::LengthMismatch { left: dims.iter().product(), right: voxels.len() });
        }
        if !voxels.iter().any(|&v| v) {
            return Err(Error::EmptyMask(name));
        }
        Ok(Self { name, dims, voxels })
    }

    pub fn from_coords(name: impl Into<String>, dims: [usize; 3], coords: &[[usize; 3]]) -> Result<Self> {
        let mut voxels = vec![false; dims.iter().product()];
        for &[x, y, z] in coords {
            if x >= dims[0] || y >= dims[1] || z >= dims[2] {
                return Err(Error::InvalidParameter(format!("voxel ({x}, {y}, {z}) outside {dims:?}")));
            }
            voxels[x + dims[0] * (y + dims[1] * z)] = true;
        }
        Self::new(name, dims, voxels)
    }

    /// Nonzero voxels of the first frame.
    pub fn from_volume(name: impl Into<String>, vol: &NiftiVolume4D) -> Result<Self> {
        Self::new(name, vol.spatial_dims(), vol.frame(0).iter().map(|&v| v != 0.0).collect())
    }

    /// Reads a mask file; the ROI name is the file stem.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name =
            path.file_name().map(|s| s.to_string_lossy().trim_end_matches(".nii").to_string()).unwrap_or_default();
        Self::from_volume(name, &read_nifti(path)?)
    }

    pub fn count(&self) -> usize {
        self.voxels.iter().filter(|&&v| v).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.voxels.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i)
    }
}

/// Mean of the voxels under each mask, per time frame. The table's subject id
/// is left empty for the caller to fill in.
pub fn extract_roi_means(vol: &NiftiVolume4D, masks: &[RoiMask]) -> Result<RoiTimeSeriesTable> {
    if masks.is_empty() {
        return Err(Error::EmptyInput);
    }
    let spatial = vol.spatial_dims();
    let mut names = Vec::with_capacity(masks.len());
    let mut series = Vec::with_capacity(masks.len());
    for mask in masks {
        if mask.dims != spatial {
            return Err(Error::DimMismatch { name: mask.name.clone(), mask: mask.dims, volume: spatial });
        }
        let idx: Vec<usize> = mask.indices().collect();
        if idx.is_empty() {
            return Err(Error::EmptyMask(mask.name.clone()));
        }
        let values = (0..vol.frames())
            .map(|t| {
                let frame = vol.frame(t);
                idx.iter().map(|&i| frame[i]).sum::<f64>() / idx.len() as f64
            })
            .collect();
        names.push(mask.name.clone());
        series.push(RealSeries::new(values)?);
    }
    RoiTimeSeriesTable::new("", names, series)
}
