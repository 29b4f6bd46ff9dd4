//! Uncompressed little-endian NIfTI-1 (`.nii`) with int16 or float32 voxels.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HEADER_LEN: usize = 348;
const DATA_OFFSET: usize = 352;
const MAGIC: [u8; 4] = *b"n+1\0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NiftiDatatype {
    Int16,
    Float32,
}

impl NiftiDatatype {
    pub fn code(self) -> i16 {
        match self {
            Self::Int16 => 4,
            Self::Float32 => 16,
        }
    }

    pub fn from_code(code: i16) -> Result<Self> {
        match code {
            4 => Ok(Self::Int16),
            16 => Ok(Self::Float32),
            other => Err(Error::UnsupportedDatatype(other)),
        }
    }

    fn bytes(self) -> usize {
        match self {
            Self::Int16 => 2,
            Self::Float32 => 4,
        }
    }
}

/// Voxel values after intensity scaling, x fastest, then y, z and t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiftiVolume4D {
    pub dims: [usize; 4],
    pub pixdim: [f32; 4],
    pub datatype: NiftiDatatype,
    pub scl_slope: f32,
    pub scl_inter: f32,
    pub vox_offset: usize,
    pub data: Vec<f64>,
}

impl NiftiVolume4D {
    /// A float32 volume with unit voxels and no intensity scaling.
    pub fn new(dims: [usize; 4], data: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::BadHeader(format!("dimensions must be positive, got {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::LengthMismatch { left: n, right: data.len() });
        }
        Ok(Self {
            dims,
            pixdim: [1.0; 4],
            datatype: NiftiDatatype::Float32,
            scl_slope: 1.0,
            scl_inter: 0.0,
            vox_offset: DATA_OFFSET,
            data,
        })
    }

    pub fn spatial_dims(&self) -> [usize; 3] {
        [self.dims[0], self.dims[1], self.dims[2]]
    }

    pub fn voxels_per_frame(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn frames(&self) -> usize {
        self.dims[3]
    }

    pub fn get(&self, x: usize, y: usize, z: usize, t: usize) -> f64 {
        let [nx, ny, nz, _] = self.dims;
        self.data[x + nx * (y + ny * (z + nz * t))]
    }

    /// One time frame as a flat spatial slice.
    pub fn frame(&self, t: usize) -> &[f64] {
        let n = self.voxels_per_frame();
        &self.data[t * n..(t + 1) * n]
    }
}

fn i16_at(b: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([b[off], b[off + 1]])
}

fn f32_at(b: &[u8], off: usize) -> f32 {
    f32::from_le_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]])
}

/// Parses a NIfTI-1 image from its bytes.
pub fn parse_nifti(bytes: &[u8]) -> Result<NiftiVolume4D> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedData { expected: HEADER_LEN, found: bytes.len() });
    }
    let magic = [bytes[344], bytes[345], bytes[346], bytes[347]];
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let sizeof_hdr = i32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    if sizeof_hdr != HEADER_LEN as i32 {
        let reason = if i32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) == HEADER_LEN as i32 {
            "big-endian files are not supported".to_string()
        } else {
            format!("sizeof_hdr is {sizeof_hdr}, expected 348")
        };
        return Err(Error::BadHeader(reason));
    }

    let dim: Vec<i16> = (0..8).map(|i| i16_at(bytes, 40 + 2 * i)).collect();
    let ndim = dim[0];
    if !(1..=7).contains(&ndim) {
        return Err(Error::BadHeader(format!("dim[0] = {ndim}")));
    }
    let mut dims = [1usize; 4];
    for i in 1..=ndim as usize {
        let d = dim[i];
        if d <= 0 {
            return Err(Error::BadHeader(format!("dim[{i}] = {d}")));
        }
        if i <= 4 {
            dims[i - 1] = d as usize;
        } else if d != 1 {
            return Err(Error::BadHeader(format!("dimension {i} has extent {d}; at most 4 are supported")));
        }
    }

    let datatype = NiftiDatatype::from_code(i16_at(bytes, 70))?;
    let bitpix = i16_at(bytes, 72);
    if bitpix as usize != 8 * datatype.bytes() {
        return Err(Error::BadHeader(format!("bitpix {bitpix} does not match datatype {datatype:?}")));
    }
    let pixdim = [f32_at(bytes, 80), f32_at(bytes, 84), f32_at(bytes, 88), f32_at(bytes, 92)];
    let vox_offset = f32_at(bytes, 108);
    if !(vox_offset.is_finite() && vox_offset >= HEADER_LEN as f32) {
        return Err(Error::BadHeader(format!("vox_offset {vox_offset}")));
    }
    let vox_offset = vox_offset as usize;
    let raw_slope = f32_at(bytes, 112);
    let scl_slope = if raw_slope == 0.0 || !raw_slope.is_finite() { 1.0 } else { raw_slope };
    let raw_inter = f32_at(bytes, 116);
    let scl_inter = if raw_inter.is_finite() { raw_inter } else { 0.0 };

    let n: usize = dims.iter().product();
    let expected = vox_offset + n * datatype.bytes();
    if bytes.len() < expected {
        return Err(Error::TruncatedData { expected, found: bytes.len() });
    }
    let payload = &bytes[vox_offset..expected];
    let (slope, inter) = (f64::from(scl_slope), f64::from(scl_inter));
    let data = match datatype {
        NiftiDatatype::Int16 => {
            payload.chunks_exact(2).map(|c| f64::from(i16::from_le_bytes([c[0], c[1]])) * slope + inter).collect()
        }
        NiftiDatatype::Float32 => payload
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])) * slope + inter)
            .collect(),
    };
    Ok(NiftiVolume4D { dims, pixdim, datatype, scl_slope, scl_inter, vox_offset, data })
}

pub fn read_nifti(path: impl AsRef<Path>) -> Result<NiftiVolume4D> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_nifti(&bytes)
}

/// Encodes a volume. Stored values are inverted through the volume's slope
/// and intercept; int16 values are rounded to the nearest raw integer.
pub fn encode_nifti(vol: &NiftiVolume4D) -> Result<Vec<u8>> {
    let n: usize = vol.dims.iter().product();
    if vol.data.len() != n {
        return Err(Error::LengthMismatch { left: n, right: vol.data.len() });
    }
    let mut h = vec![0u8; DATA_OFFSET];
    h[0..4].copy_from_slice(&(HEADER_LEN as i32).to_le_bytes());
    let ndim: i16 = if vol.dims[3] > 1 { 4 } else { 3 };
    let mut dim = [1i16; 8];
    dim[0] = ndim;
    for (i, &d) in vol.dims.iter().enumerate() {
        dim[i + 1] = i16::try_from(d).map_err(|_| Error::BadHeader(format!("extent {d} exceeds i16")))?;
    }
    for (i, d) in dim.iter().enumerate() {
        h[40 + 2 * i..42 + 2 * i].copy_from_slice(&d.to_le_bytes());
    }
    h[70..72].copy_from_slice(&vol.datatype.code().to_le_bytes());
    h[72..74].copy_from_slice(&(8 * vol.datatype.bytes() as i16).to_le_bytes());
    let pixdim = [1.0f32, vol.pixdim[0], vol.pixdim[1], vol.pixdim[2], vol.pixdim[3], 0.0, 0.0, 0.0];
    for (i, p) in pixdim.iter().enumerate() {
        h[76 + 4 * i..80 + 4 * i].copy_from_slice(&p.to_le_bytes());
    }
    h[108..112].copy_from_slice(&(DATA_OFFSET as f32).to_le_bytes());
    h[112..116].copy_from_slice(&vol.scl_slope.to_le_bytes());
    h[116..120].copy_from_slice(&vol.scl_inter.to_le_bytes());
    h[344..348].copy_from_slice(&MAGIC);

    let slope = if vol.scl_slope == 0.0 { 1.0 } else { f64::from(vol.scl_slope) };
    let inter = f64::from(vol.scl_inter);
    for &v in &vol.data {
        let raw = (v - inter) / slope;
        match vol.datatype {
            NiftiDatatype::Int16 => {
                let r = raw.round();
                if !(r >= f64::from(i16::MIN) && r <= f64::from(i16::MAX)) {
                    return Err(Error::InvalidParameter(format!("value {v} does not fit int16")));
                }
                h.extend_from_slice(&(r as i16).to_le_bytes());
            }
            NiftiDatatype::Float32 => h.extend_from_slice(&(raw as f32).to_le_bytes()),
        }
    }
    Ok(h)
}

pub fn write_nifti(vol: &NiftiVolume4D, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_nifti(vol)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> NiftiVolume4D {
        let data = (0..24).map(|i| i as f64 * 0.5 - 3.25).collect();
        NiftiVolume4D::new([2, 2, 2, 3], data).unwrap()
    }

    #[test]
    fn float32_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.nii");
        let v = small();
        write_nifti(&v, &p).unwrap();
        let back = read_nifti(&p).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.get(1, 0, 1, 2), v.data[1 + 2 * 2 * (1 + 2 * 2)]);
    }

    #[test]
    fn int16_scaling() {
        let mut v = NiftiVolume4D::new([1, 1, 1, 1], vec![7.0]).unwrap();
        v.datatype = NiftiDatatype::Int16;
        v.scl_slope = 2.0;
        v.scl_inter = 1.0;
        let bytes = encode_nifti(&v).unwrap();
        assert_eq!(i16::from_le_bytes([bytes[352], bytes[353]]), 3);
        assert_eq!(parse_nifti(&bytes).unwrap().data, vec![7.0]);
    }

    #[test]
    fn zero_slope_means_unscaled() {
        let mut bytes = encode_nifti(&small()).unwrap();
        bytes[112..116].copy_from_slice(&0.0f32.to_le_bytes());
        let v = parse_nifti(&bytes).unwrap();
        assert_eq!(v.scl_slope, 1.0);
        assert_eq!(v.data, small().data);
    }

    #[test]
    fn header_guards() {
        let good = encode_nifti(&small()).unwrap();

        let mut b = good.clone();
        b[344..348].copy_from_slice(b"ni1\0");
        assert!(matches!(parse_nifti(&b), Err(Error::BadMagic(m)) if &m == b"ni1\0"));

        let mut b = good.clone();
        b[70..72].copy_from_slice(&64i16.to_le_bytes());
        assert!(matches!(parse_nifti(&b), Err(Error::UnsupportedDatatype(64))));

        let b = &good[..good.len() - 1];
        assert!(matches!(parse_nifti(b), Err(Error::TruncatedData { .. })));
        assert!(matches!(parse_nifti(&good[..100]), Err(Error::TruncatedData { .. })));

        let mut b = good.clone();
        b[0..4].copy_from_slice(&348i32.to_be_bytes());
        assert!(matches!(parse_nifti(&b), Err(Error::BadHeader(_))));
    }

    #[test]
    fn vox_offset_is_respected() {
        let v = small();
        let mut bytes = encode_nifti(&v).unwrap();
        bytes.splice(352..352, [0xAAu8; 48]);
        bytes[108..112].copy_from_slice(&400.0f32.to_le_bytes());
        let back = parse_nifti(&bytes).unwrap();
        assert_eq!(back.vox_offset, 400);
        assert_eq!(back.data, v.data);
    }
}
