//! Binary cache of assembled BEM matrices.
//!
//! Layout: magic `FILBEM`, u32 version, u32 key length, key bytes, u64 n,
//! then A and S as row-major little-endian f64.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::geometry::TubeMesh;

const MAGIC: &[u8; 6] = b"FILBEM";
const VERSION: u32 = 1;

/// Cache key from the curve samples, frame, radius and resolution.
pub fn key(mesh: &TubeMesh) -> String {
    let mut h = Sha256::new();
    h.update(mesh.curve.digest().as_bytes());
    for v in &mesh.frame.s1 {
        for c in v.iter() {
            h.update(c.to_le_bytes());
        }
    }
    h.update(mesh.eps.to_le_bytes());
    h.update((mesh.nt as u64).to_le_bytes());
    h.update((mesh.ntheta as u64).to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn path_for(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("bem-{}.bin", &key[..16]))
}

pub fn store(dir: &Path, key: &str, a: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".bem-{}.tmp", &key[..16]));
    {
        let mut f = BufWriter::new(fs::File::create(&tmp)?);
        f.write_all(MAGIC)?;
        f.write_all(&VERSION.to_le_bytes())?;
        f.write_all(&(key.len() as u32).to_le_bytes())?;
        f.write_all(key.as_bytes())?;
        f.write_all(&(a.nrows() as u64).to_le_bytes())?;
        for m in [a, s] {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    f.write_all(&m[(i, j)].to_le_bytes())?;
                }
            }
        }
        f.flush()?;
    }
    fs::rename(tmp, path_for(dir, key))?;
    Ok(())
}

/// Matrices for `key`, or `None` when absent or stale.
pub fn load(dir: &Path, key: &str, n: usize) -> Result<Option<(DMatrix<f64>, DMatrix<f64>)>> {
    let path = path_for(dir, key);
    if !path.exists() {
        return Ok(None);
    }
    let mut f = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 6];
    f.read_exact(&mut magic)?;
    let mut u4 = [0u8; 4];
    f.read_exact(&mut u4)?;
    if &magic != MAGIC || u32::from_le_bytes(u4) != VERSION {
        return Ok(None);
    }
    f.read_exact(&mut u4)?;
    let mut stored = vec![0u8; u32::from_le_bytes(u4) as usize];
    f.read_exact(&mut stored)?;
    let mut u8b = [0u8; 8];
    f.read_exact(&mut u8b)?;
    if stored != key.as_bytes() || u64::from_le_bytes(u8b) as usize != n {
        return Ok(None);
    }
    let mut read = || -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                f.read_exact(&mut u8b)?;
                m[(i, j)] = f64::from_le_bytes(u8b);
            }
        }
        Ok(m)
    };
    let a = read()?;
    let s = read()?;
    Ok(Some((a, s)))
}
