//! Binary snapshots of the profile.
//!
//! Little-endian layout: the magic bytes `SQGF`, a `u32` version (1), the
//! point count `N` as `u64`, the length `L` and the time `t` as `f64`, then
//! `N` pairs `(re, im)` of `f64` profile coefficients in FFT storage order.
//! Files are written to a temporary sibling and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::evolution::SimState;
use crate::spectral::{FourierGrid, SpectralError, SpectralField, C64};

pub const MAGIC: [u8; 4] = *b"SQGF";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 32;
/// Largest accepted `|c_k - conj(c_{-k})|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad magic {found:?}, expected \"SQGF\"")]
    BadMagic { found: [u8; 4] },
    #[error("snapshot version {found} is not supported (expected {VERSION})")]
    VersionMismatch { found: u32 },
    #[error("snapshot truncated at byte offset {offset}: {needed} bytes required")]
    Truncated { offset: usize, needed: usize },
    #[error("{extra} unexpected trailing bytes after offset {offset}")]
    TrailingBytes { offset: usize, extra: usize },
    #[error("coefficients violate conjugate symmetry by {defect:e}")]
    Symmetry { defect: f64 },
    #[error("non-finite value at byte offset {offset}")]
    NonFinite { offset: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

pub fn encode(state: &SimState) -> Vec<u8> {
    let grid = state.profile.grid();
    let mut out = Vec::with_capacity(HEADER_BYTES + 16 * grid.n_points());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.n_points() as u64).to_le_bytes());
    out.extend_from_slice(&grid.length().to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    for c in state.profile.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K], SnapshotError> {
        let chunk = self
            .bytes
            .get(self.offset..self.offset + K)
            .ok_or(SnapshotError::Truncated { offset: self.bytes.len(), needed: self.offset + K })?;
        self.offset += K;
        Ok(chunk.try_into().expect("slice has length K"))
    }

    fn real(&mut self) -> Result<f64, SnapshotError> {
        let offset = self.offset;
        let v = f64::from_le_bytes(self.take()?);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SnapshotError::NonFinite { offset })
        }
    }
}

pub fn decode(bytes: &[u8]) -> Result<SimState, SnapshotError> {
    let mut r = Reader { bytes, offset: 0 };
    let magic = r.take::<4>()?;
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic { found: magic });
    }
    let version = u32::from_le_bytes(r.take()?);
    if version != VERSION {
        return Err(SnapshotError::VersionMismatch { found: version });
    }
    let n = u64::from_le_bytes(r.take()?);
    let length = r.real()?;
    let t = r.real()?;
    let n = usize::try_from(n).map_err(|_| SnapshotError::Truncated { offset: bytes.len(), needed: usize::MAX })?;
    let needed = n.checked_mul(16).and_then(|b| b.checked_add(HEADER_BYTES)).unwrap_or(usize::MAX);
    if bytes.len() < needed {
        return Err(SnapshotError::Truncated { offset: bytes.len(), needed });
    }
    if bytes.len() > needed {
        return Err(SnapshotError::TrailingBytes { offset: needed, extra: bytes.len() - needed });
    }
    let grid = FourierGrid::new(n, length)?;
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        let re = r.real()?;
        let im = r.real()?;
        coeffs.push(C64::new(re, im));
    }
    let profile = SpectralField::new(grid, coeffs)?;
    let defect = profile.symmetry_defect();
    if defect > SYMMETRY_TOLERANCE {
        return Err(SnapshotError::Symmetry { defect });
    }
    Ok(SimState { t, profile, step: 0 })
}

/// Atomic write: temporary file in the target directory, then rename.
pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_snapshot(state: &SimState, path: &Path) -> Result<(), SnapshotError> {
    write_bytes_atomic(path, &encode(state)).map_err(|source| SnapshotError::Io { path: path.to_path_buf(), source })
}

pub fn read_snapshot(path: &Path) -> Result<SimState, SnapshotError> {
    let bytes = std::fs::read(path).map_err(|source| SnapshotError::Io { path: path.to_path_buf(), source })?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::RealField;

    fn state() -> SimState {
        let grid = FourierGrid::new(64, 30.0).unwrap();
        let phi = RealField::from_fn(grid, |x| 0.01 * (-(x / 3.0).powi(2)).exp()).forward();
        SimState::from_solution(&phi, 2.75)
    }

    #[test]
    fn roundtrip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.sqgf");
        let s = state();
        write_snapshot(&s, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.t.to_bits(), s.t.to_bits());
        for (a, b) in back.profile.coeffs().iter().zip(s.profile.coeffs()) {
            assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
        }
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = encode(&state());
        for cut in [2, 20, bytes.len() - 3] {
            match decode(&bytes[..cut]) {
                Err(SnapshotError::Truncated { offset, .. }) => assert_eq!(offset, cut),
                other => panic!("{other:?}"),
            }
        }
        let err = decode(&bytes[..100]).unwrap_err().to_string();
        assert!(err.contains("byte offset 100"), "{err}");
    }

    #[test]
    fn header_validation() {
        let mut v2 = encode(&state());
        v2[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(decode(&v2), Err(SnapshotError::VersionMismatch { found: 2 })));
        let mut bad = encode(&state());
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(SnapshotError::BadMagic { .. })));
        let mut long = encode(&state());
        long.push(0);
        assert!(matches!(decode(&long), Err(SnapshotError::TrailingBytes { extra: 1, .. })));
    }

    #[test]
    fn asymmetric_coefficients_are_rejected() {
        let mut s = state();
        s.profile.coeffs_mut()[3] += C64::new(1e-6, 0.0);
        assert!(matches!(decode(&encode(&s)), Err(SnapshotError::Symmetry { .. })));
        let mut ok = state();
        ok.profile.coeffs_mut()[3] += C64::new(1e-12, 0.0);
        assert!(decode(&encode(&ok)).is_ok());
    }
}
