//! TT3D, a minimal binary container for real third-order tensors.
//!
//! Layout: the ASCII magic `TT3D`, the three dimensions as little-endian
//! `u32`, then every entry as a little-endian `f64`, first index fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, TubalError};
use crate::tensor::Tensor3;

pub const MAGIC: &[u8; 4] = b"TT3D";

pub fn write_tt3d(mut w: impl Write, x: &Tensor3) -> Result<()> {
    let (n1, n2, n3) = x.dims();
    w.write_all(MAGIC)?;
    for n in [n1, n2, n3] {
        let n = u32::try_from(n).map_err(|_| TubalError::Format(format!("dimension {n} does not fit in 32 bits")))?;
        w.write_all(&n.to_le_bytes())?;
    }
    for v in x.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one tensor and requires the stream to end right after it.
pub fn read_tt3d(mut r: impl Read) -> Result<Tensor3> {
    let mut header = [0u8; 16];
    read_exact(&mut r, &mut header, "header")?;
    if &header[..4] != MAGIC {
        return Err(TubalError::Format("missing TT3D magic".into()));
    }
    let dim = |at: usize| u32::from_le_bytes(header[at..at + 4].try_into().unwrap()) as usize;
    let dims = (dim(4), dim(8), dim(12));
    let count = dims
        .0
        .checked_mul(dims.1)
        .and_then(|c| c.checked_mul(dims.2))
        .ok_or_else(|| TubalError::Format(format!("dimensions {dims:?} overflow")))?;
    let mut values = Vec::with_capacity(count.min(1 << 24));
    let mut buf = [0u8; 8];
    for _ in 0..count {
        read_exact(&mut r, &mut buf, "payload")?;
        values.push(f64::from_le_bytes(buf));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(TubalError::Format("trailing bytes after tensor payload".into()));
    }
    Tensor3::from_vec(dims, values)
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => TubalError::Format(format!("truncated {what}")),
        _ => TubalError::Io(e),
    })
}

pub fn save_tt3d(path: impl AsRef<Path>, x: &Tensor3) -> Result<()> {
    write_tt3d(BufWriter::new(File::create(path)?), x)
}

pub fn load_tt3d(path: impl AsRef<Path>) -> Result<Tensor3> {
    read_tt3d(BufReader::new(File::open(path)?))
}
