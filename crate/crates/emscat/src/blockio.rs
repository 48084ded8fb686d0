//! Binary container for dense operator blocks (regression baselines).
//!
//! Layout: a 64-byte header — 8-byte magic `EMSCATB1`, `u64` dimension N,
//! five little-endian `f64` medium parameters (Re ε, Im ε, Re μ, Im μ, ω),
//! 8 padding bytes — followed by N×N complex128 entries in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::linalg::CMat;
use crate::medium::MediumParams;

pub const MAGIC: &[u8; 8] = b"EMSCATB1";
pub const HEADER_LEN: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum BlockIoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic; not an operator block file")]
    BadMagic,
    #[error("file truncated: expected {expected} bytes of matrix data, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// Medium parameters as stored in the header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockHeader {
    pub n: usize,
    pub epsilon: Complex64,
    pub mu: Complex64,
    pub omega: f64,
}

impl BlockHeader {
    pub fn from_medium(n: usize, m: &MediumParams) -> Self {
        Self {
            n,
            epsilon: m.epsilon,
            mu: m.mu,
            omega: m.omega,
        }
    }
}

pub fn write_block(
    path: impl AsRef<Path>,
    mat: &CMat,
    header: &BlockHeader,
) -> Result<(), BlockIoError> {
    let path = path.as_ref();
    let io_err = |source| BlockIoError::Io {
        path: path.display().to_string(),
        source,
    };
    assert_eq!(mat.nrows(), header.n);
    assert_eq!(mat.ncols(), header.n);

    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * header.n * header.n);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(header.n as u64).to_le_bytes());
    for v in [
        header.epsilon.re,
        header.epsilon.im,
        header.mu.re,
        header.mu.im,
        header.omega,
    ] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.resize(HEADER_LEN, 0);
    for i in 0..header.n {
        for j in 0..header.n {
            let v = mat[(i, j)];
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    f.write_all(&buf).map_err(io_err)
}

pub fn read_block(path: impl AsRef<Path>) -> Result<(CMat, BlockHeader), BlockIoError> {
    let path = path.as_ref();
    let io_err = |source| BlockIoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .map_err(io_err)?
        .read_to_end(&mut bytes)
        .map_err(io_err)?;
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(BlockIoError::BadMagic);
    }
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8 bytes"));
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let header = BlockHeader {
        n,
        epsilon: Complex64::new(f64_at(16), f64_at(24)),
        mu: Complex64::new(f64_at(32), f64_at(40)),
        omega: f64_at(48),
    };
    let expected = 16 * n * n;
    let found = bytes.len() - HEADER_LEN;
    if found < expected {
        return Err(BlockIoError::Truncated { expected, found });
    }
    let mut m = CMat::zeros(n, n);
    let mut off = HEADER_LEN;
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(f64_at(off), f64_at(off + 8));
            off += 16;
        }
    }
    Ok((m, header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::Material;

    #[test]
    fn block_roundtrip_is_exact() {
        let n = 7;
        let m = CMat::from_fn(n, n, |i, j| {
            Complex64::new(i as f64 * 0.1 - j as f64, (i * j) as f64 * 1e-3)
        });
        let medium = MediumParams::new(&Material::dielectric(2.25), 2.0e8);
        let header = BlockHeader::from_medium(n, &medium);
        let path = std::env::temp_dir().join(format!("emscat_block_{}.bin", std::process::id()));
        write_block(&path, &m, &header).unwrap();
        let (back, h2) = read_block(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(h2.n, n);
        assert_eq!(h2.epsilon, medium.epsilon);
        assert_eq!(h2.omega, medium.omega);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(m[(i, j)], back[(i, j)]);
            }
        }
    }

    #[test]
    fn rejects_wrong_magic() {
        let path = std::env::temp_dir().join(format!("emscat_bad_{}.bin", std::process::id()));
        std::fs::write(&path, b"NOTMAGIC________________").unwrap();
        let err = read_block(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        assert!(matches!(err, BlockIoError::BadMagic));
    }
}
