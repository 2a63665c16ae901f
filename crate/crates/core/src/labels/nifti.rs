//! Single-file NIfTI-1 codec for 2-D label rasters.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const HEADER_SIZE: usize = 348;
pub const VOX_OFFSET: usize = 352;
pub const MAGIC: [u8; 4] = *b"n+1\0";

pub const DT_UINT8: i16 = 2;
pub const DT_INT16: i16 = 4;
pub const DT_UINT16: i16 = 512;

const OFF_DIM: usize = 40;
const OFF_DATATYPE: usize = 70;
const OFF_BITPIX: usize = 72;
const OFF_PIXDIM: usize = 76;
const OFF_VOX_OFFSET: usize = 108;
const OFF_SCL_SLOPE: usize = 112;
const OFF_XYZT_UNITS: usize = 123;
const OFF_QFORM_CODE: usize = 252;
const OFF_SFORM_CODE: usize = 254;
const OFF_SROW: usize = 280;
const OFF_MAGIC: usize = 344;

/// Header fields preserved across a read/write cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct NiftiHeader {
    /// Datatype code found on disk; writes always use [`DT_UINT16`].
    pub datatype: i16,
    /// Voxel spacing along x, y, z.
    pub pixdim: [f32; 3],
    pub sform_code: i16,
    pub srow: [[f32; 4]; 3],
}

impl Default for NiftiHeader {
    fn default() -> Self {
        Self {
            datatype: DT_UINT16,
            pixdim: [1.0; 3],
            sform_code: 1,
            srow: [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
        }
    }
}

/// 2-D label raster in NIfTI voxel order.
///
/// Voxel `(x, j)` sits at index `x + j * width`. Voxel rows run bottom-up
/// relative to the source image: image row `y` is voxel row `height - 1 - y`.
#[derive(Debug, Clone, PartialEq)]
pub struct NiftiLabelVolume {
    width: usize,
    height: usize,
    voxels: Vec<u16>,
    pub header: NiftiHeader,
}

impl NiftiLabelVolume {
    /// Wraps voxels that are already in NIfTI order.
    pub fn from_voxels(width: usize, height: usize, voxels: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("volume dimensions must be positive".into()));
        }
        if voxels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "expected {} voxels for {width}x{height}, got {}",
                width * height,
                voxels.len()
            )));
        }
        Ok(Self { width, height, voxels, header: NiftiHeader::default() })
    }

    /// Builds a volume from labels in image row order (row 0 at the top).
    pub fn from_image_labels(width: usize, height: usize, labels: &[u16]) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "expected {} labels for {width}x{height}, got {}",
                width * height,
                labels.len()
            )));
        }
        let mut voxels = Vec::with_capacity(labels.len());
        for j in 0..height {
            let y = height - 1 - j;
            voxels.extend_from_slice(&labels[y * width..(y + 1) * width]);
        }
        Self::from_voxels(width, height, voxels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn voxels(&self) -> &[u16] {
        &self.voxels
    }

    pub fn voxel(&self, x: usize, j: usize) -> u16 {
        self.voxels[x + j * self.width]
    }

    /// Label under image pixel `(x, y)`.
    pub fn image_label(&self, x: usize, y: usize) -> u16 {
        self.voxel(x, self.height - 1 - y)
    }

    /// Labels in image row order.
    pub fn to_image_labels(&self) -> Vec<u16> {
        let mut out = Vec::with_capacity(self.voxels.len());
        for y in 0..self.height {
            let j = self.height - 1 - y;
            out.extend_from_slice(&self.voxels[j * self.width..(j + 1) * self.width]);
        }
        out
    }
}

fn put_i16(buf: &mut [u8], off: usize, v: i16) {
    buf[off..off + 2].copy_from_slice(&v.to_le_bytes());
}

fn put_f32(buf: &mut [u8], off: usize, v: f32) {
    buf[off..off + 4].copy_from_slice(&v.to_le_bytes());
}

fn get_i16(buf: &[u8], off: usize) -> i16 {
    i16::from_le_bytes([buf[off], buf[off + 1]])
}

fn get_i32(buf: &[u8], off: usize) -> i32 {
    i32::from_le_bytes(buf[off..off + 4].try_into().expect("slice of 4"))
}

fn get_f32(buf: &[u8], off: usize) -> f32 {
    f32::from_le_bytes(buf[off..off + 4].try_into().expect("slice of 4"))
}

/// Serializes the volume as a little-endian unsigned 16-bit `.nii` image.
pub fn encode_nifti(volume: &NiftiLabelVolume) -> Result<Vec<u8>> {
    let max = i16::MAX as usize;
    if volume.width > max || volume.height > max {
        return Err(Error::InvalidParameter(format!(
            "{}x{} exceeds the 16-bit NIfTI-1 dimension limit",
            volume.width, volume.height
        )));
    }
    let mut buf = vec![0u8; VOX_OFFSET + 2 * volume.voxels.len()];
    buf[0..4].copy_from_slice(&(HEADER_SIZE as i32).to_le_bytes());
    buf[38] = b'r';
    let dims = [2, volume.width as i16, volume.height as i16, 1, 1, 1, 1, 1];
    for (i, d) in dims.iter().enumerate() {
        put_i16(&mut buf, OFF_DIM + 2 * i, *d);
    }
    put_i16(&mut buf, OFF_DATATYPE, DT_UINT16);
    put_i16(&mut buf, OFF_BITPIX, 16);
    let h = &volume.header;
    let pixdim = [1.0, h.pixdim[0], h.pixdim[1], h.pixdim[2], 0.0, 0.0, 0.0, 0.0];
    for (i, p) in pixdim.iter().enumerate() {
        put_f32(&mut buf, OFF_PIXDIM + 4 * i, *p);
    }
    put_f32(&mut buf, OFF_VOX_OFFSET, VOX_OFFSET as f32);
    put_f32(&mut buf, OFF_SCL_SLOPE, 1.0);
    buf[OFF_XYZT_UNITS] = 2;
    put_i16(&mut buf, OFF_QFORM_CODE, 0);
    put_i16(&mut buf, OFF_SFORM_CODE, h.sform_code);
    for (r, row) in h.srow.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            put_f32(&mut buf, OFF_SROW + 16 * r + 4 * c, *v);
        }
    }
    buf[OFF_MAGIC..OFF_MAGIC + 4].copy_from_slice(&MAGIC);
    for (i, v) in volume.voxels.iter().enumerate() {
        buf[VOX_OFFSET + 2 * i..VOX_OFFSET + 2 * i + 2].copy_from_slice(&v.to_le_bytes());
    }
    Ok(buf)
}

/// Parses a single-file NIfTI-1 image holding a 2-D integer label raster.
pub fn decode_nifti(bytes: &[u8]) -> Result<NiftiLabelVolume> {
    let fmt = |m: String| Error::NiftiFormat(m);
    if bytes.len() < HEADER_SIZE {
        return Err(fmt(format!("{} bytes is shorter than the 348-byte header", bytes.len())));
    }
    let sizeof_hdr = get_i32(bytes, 0);
    if sizeof_hdr != HEADER_SIZE as i32 {
        if i32::from_be_bytes(bytes[0..4].try_into().expect("slice of 4")) == HEADER_SIZE as i32 {
            return Err(fmt("big-endian files are not supported".into()));
        }
        return Err(fmt(format!("sizeof_hdr is {sizeof_hdr}, expected 348")));
    }
    if bytes[OFF_MAGIC..OFF_MAGIC + 4] != MAGIC {
        return Err(fmt("magic is not \"n+1\\0\"; only single-file images are supported".into()));
    }
    let ndim = get_i16(bytes, OFF_DIM);
    if !(2..=7).contains(&ndim) {
        return Err(fmt(format!("dim[0] = {ndim} is outside 2..=7")));
    }
    let dim = |i: usize| get_i16(bytes, OFF_DIM + 2 * i);
    let (w, h) = (dim(1), dim(2));
    if w < 1 || h < 1 {
        return Err(fmt(format!("non-positive in-plane dimensions {w}x{h}")));
    }
    for i in 3..=ndim as usize {
        if dim(i) != 1 {
            return Err(fmt(format!("dim[{i}] = {}; only 2-D images are supported", dim(i))));
        }
    }
    let datatype = get_i16(bytes, OFF_DATATYPE);
    let bytes_per_voxel = match datatype {
        DT_UINT8 => 1,
        DT_INT16 | DT_UINT16 => 2,
        other => return Err(Error::UnsupportedDtype(other)),
    };
    let bitpix = get_i16(bytes, OFF_BITPIX);
    if bitpix as usize != 8 * bytes_per_voxel {
        return Err(fmt(format!("bitpix {bitpix} does not match datatype {datatype}")));
    }
    let vox_offset = get_f32(bytes, OFF_VOX_OFFSET);
    if !(vox_offset.is_finite() && vox_offset >= VOX_OFFSET as f32 && vox_offset.fract() == 0.0) {
        return Err(fmt(format!("invalid vox_offset {vox_offset}")));
    }
    let (w, h) = (w as usize, h as usize);
    let start = vox_offset as usize;
    let end = start + w * h * bytes_per_voxel;
    if bytes.len() < end {
        return Err(fmt(format!("truncated voxel data: need {end} bytes, file has {}", bytes.len())));
    }
    let data = &bytes[start..end];
    let voxels = match datatype {
        DT_UINT8 => data.iter().map(|&b| b as u16).collect(),
        DT_UINT16 => data.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect(),
        _ => data
            .chunks_exact(2)
            .map(|c| {
                let v = i16::from_le_bytes([c[0], c[1]]);
                u16::try_from(v).map_err(|_| fmt(format!("negative label {v}")))
            })
            .collect::<Result<Vec<u16>>>()?,
    };
    let mut srow = [[0f32; 4]; 3];
    for (r, row) in srow.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = get_f32(bytes, OFF_SROW + 16 * r + 4 * c);
        }
    }
    let header = NiftiHeader {
        datatype,
        pixdim: [
            get_f32(bytes, OFF_PIXDIM + 4),
            get_f32(bytes, OFF_PIXDIM + 8),
            get_f32(bytes, OFF_PIXDIM + 12),
        ],
        sform_code: get_i16(bytes, OFF_SFORM_CODE),
        srow,
    };
    let mut volume = NiftiLabelVolume::from_voxels(w, h, voxels)?;
    volume.header = header;
    Ok(volume)
}

pub fn write_nifti(volume: &NiftiLabelVolume, path: &Path) -> Result<()> {
    let bytes = encode_nifti(volume)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_nifti(path: &Path) -> Result<NiftiLabelVolume> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_nifti(&bytes)
}
