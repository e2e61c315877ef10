//! Synthetic data and the IDX image format.

use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use rsgda_core::da::sigmoid;
use rsgda_core::dataset::{DataSource, Dataset};
use rsgda_core::rng::Stream;

use crate::error::{HarnessError, Result};

const IDX_MAGIC: u32 = 0x0000_0803;

/// `n` instances of `dims` coordinates with constant pairwise latent
/// correlation `ρ`: `σ(√ρ c + √(1−ρ) e_j)` with `c, e_j` standard normal.
pub fn gen_synthetic(n: usize, dims: usize, rho: f64, seed: u64, bias: bool) -> Result<Dataset> {
    if !(0.0..1.0).contains(&rho) {
        return Err(rsgda_core::Error::Domain(format!("rho = {rho} outside [0, 1)")).into());
    }
    if n == 0 || dims == 0 {
        return Err(rsgda_core::Error::Domain("n and dims must be positive".into()).into());
    }
    let mut rng = Stream::new(seed);
    let (shared, own) = (rho.sqrt(), (1.0 - rho).sqrt());
    let mut data = Vec::with_capacity(n * dims);
    for _ in 0..n {
        let c: f64 = StandardNormal.sample(&mut rng);
        for _ in 0..dims {
            let e: f64 = StandardNormal.sample(&mut rng);
            data.push(sigmoid(shared * c + own * e));
        }
    }
    Ok(Dataset::from_flat(
        n,
        dims,
        &data,
        bias,
        DataSource::Synthetic { rho, seed },
    )?)
}

fn read_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| HarnessError::Format {
            path: path.to_path_buf(),
            offset: bytes.len() as u64,
            reason: format!("file ends before the 4-byte field at offset {offset}"),
        })
}

/// Parse an IDX file of unsigned-byte images; pixels are scaled into `[0, 1]`.
pub fn parse_idx(bytes: &[u8], path: &Path, bias: bool) -> Result<Dataset> {
    let format = |offset: usize, reason: String| HarnessError::Format {
        path: path.to_path_buf(),
        offset: offset as u64,
        reason,
    };
    let magic = read_u32(bytes, 0, path)?;
    if magic != IDX_MAGIC {
        return Err(format(
            0,
            format!(
                "magic 0x{magic:08x} is not the 3-d unsigned byte image magic 0x{IDX_MAGIC:08x}"
            ),
        ));
    }
    let n = read_u32(bytes, 4, path)? as usize;
    let rows = read_u32(bytes, 8, path)? as usize;
    let cols = read_u32(bytes, 12, path)? as usize;
    let dims = rows.checked_mul(cols).filter(|&d| d > 0).ok_or_else(|| {
        format(
            8,
            format!("image size {rows} x {cols} is empty or overflows"),
        )
    })?;
    let total = n
        .checked_mul(dims)
        .ok_or_else(|| format(4, format!("{n} images of {dims} pixels overflow")))?;
    let payload = &bytes[16..];
    if payload.len() < total {
        return Err(format(
            bytes.len(),
            format!(
                "payload has {} bytes, header promises {total}",
                payload.len()
            ),
        ));
    }
    let data: Vec<f64> = payload[..total]
        .iter()
        .map(|&b| f64::from(b) / 255.0)
        .collect();
    Ok(Dataset::from_flat(
        n,
        dims,
        &data,
        bias,
        DataSource::IdxFile(path.to_path_buf()),
    )?)
}

pub fn load_idx(path: &Path, bias: bool) -> Result<Dataset> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path.display().to_string(), e))?;
    parse_idx(&bytes, path, bias)
}

/// Encode the data coordinates (bias excluded) as `n` images of
/// `rows x cols`, rounding to the nearest 1/255.
pub fn encode_idx(dataset: &Dataset, rows: usize, cols: usize) -> Result<Vec<u8>> {
    let dims = dataset.data_dims();
    if rows * cols != dims {
        return Err(HarnessError::Config(format!(
            "{rows} x {cols} images cannot hold {dims} coordinates"
        )));
    }
    let mut out = Vec::with_capacity(16 + dataset.len() * dims);
    for v in [IDX_MAGIC, dataset.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for row in dataset.rows() {
        out.extend(row[..dims].iter().map(|v| (v * 255.0).round() as u8));
    }
    Ok(out)
}

pub fn write_idx(path: &Path, dataset: &Dataset, rows: usize, cols: usize) -> Result<()> {
    let bytes = encode_idx(dataset, rows, cols)?;
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path.display().to_string(), e))
}
