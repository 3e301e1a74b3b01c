//! SMHD binary snapshots.
//!
//! Little-endian layout:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `SMHD` |
//! | 4 | version `u32 = 1` |
//! | 4 | `n: u32` |
//! | 8 | `t: f64` |
//! | 4 | component count `u32` |
//! | 8 | box side `f64`, free-space snapshots only |
//! | `8·n²` per component | row-major physical samples, `f64` |
//!
//! The optional box-side field is detected from the file length.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::spectral::SpectralField;
use super::vector::VectorField;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"SMHD";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    pub components: Vec<Vec<f64>>,
    /// Side length of the sampling box for free-space data.
    pub box_size: Option<f64>,
}

impl Snapshot {
    pub fn from_vector<T: Real>(t: f64, v: &VectorField<T>) -> Self {
        let conv = |f: &SpectralField<T>| f.to_physical().into_iter().map(|x| x.to_f64_lossy()).collect();
        Self {
            n: v.grid().n(),
            t,
            components: vec![conv(&v.x), conv(&v.y)],
            box_size: None,
        }
    }

    pub fn from_scalar<T: Real>(t: f64, f: &SpectralField<T>) -> Self {
        Self {
            n: f.grid().n(),
            t,
            components: vec![f.to_physical().into_iter().map(|x| x.to_f64_lossy()).collect()],
            box_size: None,
        }
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let per = self.n * self.n;
        for c in &self.components {
            if c.len() != per {
                return Err(Error::DimensionMismatch {
                    expected: per,
                    found: c.len(),
                });
            }
        }
        let mut out = Vec::with_capacity(HEADER_LEN + 8 + 8 * per * self.components.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&(self.components.len() as u32).to_le_bytes());
        if let Some(l) = self.box_size {
            out.extend_from_slice(&l.to_le_bytes());
        }
        for c in &self.components {
            for v in c {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::MalformedSnapshot(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("file shorter than header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(bad("bad magic bytes"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(Error::MalformedSnapshot(format!("unsupported version {version}")));
        }
        let n = u32_at(8) as usize;
        let t = f64_at(12);
        let count = u32_at(20) as usize;
        let payload = 8 * n * n * count;
        let (box_size, start) = if bytes.len() == HEADER_LEN + payload {
            (None, HEADER_LEN)
        } else if bytes.len() == HEADER_LEN + 8 + payload {
            (Some(f64_at(HEADER_LEN)), HEADER_LEN + 8)
        } else {
            return Err(Error::MalformedSnapshot(format!(
                "payload length {} does not match n = {n}, components = {count}",
                bytes.len() - HEADER_LEN
            )));
        };
        let components = (0..count)
            .map(|c| {
                let base = start + 8 * n * n * c;
                (0..n * n).map(|i| f64_at(base + 8 * i)).collect()
            })
            .collect();
        Ok(Self {
            n,
            t,
            components,
            box_size,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }

    /// Writes via a temporary file and rename.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), &self.encode()?)
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_fixed() {
        let s = Snapshot {
            n: 4,
            t: 0.5,
            components: vec![vec![1.0; 16]],
            box_size: None,
        };
        let b = s.encode().unwrap();
        assert_eq!(&b[0..4], b"SMHD");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(b[12..20].try_into().unwrap()), 0.5);
        assert_eq!(u32::from_le_bytes(b[20..24].try_into().unwrap()), 1);
        assert_eq!(b.len(), 24 + 16 * 8);
    }

    #[test]
    fn box_size_survives_decoding() {
        let s = Snapshot {
            n: 4,
            t: 0.0,
            components: vec![(0..16).map(|i| i as f64).collect(), vec![0.0; 16]],
            box_size: Some(2.5),
        };
        assert_eq!(Snapshot::decode(&s.encode().unwrap()).unwrap(), s);
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(Snapshot::decode(b"SMHD").is_err());
        let mut b = Snapshot {
            n: 4,
            t: 0.0,
            components: vec![vec![0.0; 16]],
            box_size: None,
        }
        .encode()
        .unwrap();
        b.pop();
        assert!(matches!(Snapshot::decode(&b), Err(Error::MalformedSnapshot(_))));
        b[0] = b'X';
        assert!(Snapshot::decode(&b).is_err());
    }
}
