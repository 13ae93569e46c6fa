//! Binary field snapshots (`.klfs`).
//!
//! Layout, all integers and floats little-endian:
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0  | 4 | magic `b"KLFS"` |
//! | 4  | 2 | format version, currently `1` (`u16`) |
//! | 6  | 1 | kind: `0` phase field, `1` spectral field, `2` phase mask (`u8`) |
//! | 7  | 1 | `d` (`u8`) |
//! | 8  | 4 | points per axis `M` (`u32`) |
//! | 12 | 8 | half width `L` (`f64`) |
//! | 20 | 8 | value count `M^{2d}` (`u64`) |
//! | 28 | … | payload |
//!
//! Field payloads hold `re, im` pairs of `f64` in grid order (axes
//! `x_1..x_d, v_1..v_d`, last axis fastest; spectral fields in FFT order).
//! Mask payloads hold one byte per node, `0` or `1`.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use kolmo_core::grid::Space;
use kolmo_core::{Complex64, GridMask, PhaseField, PhaseGrid, SpectralField};

pub const MAGIC: &[u8; 4] = b"KLFS";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 28;

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Phase(PhaseField),
    Spectral(SpectralField),
    Mask(GridMask),
}

impl Snapshot {
    pub fn grid(&self) -> &PhaseGrid {
        match self {
            Snapshot::Phase(f) => f.grid(),
            Snapshot::Spectral(f) => f.grid(),
            Snapshot::Mask(m) => m.grid(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.grid();
        let (kind, count) = match self {
            Snapshot::Phase(f) => (0u8, f.values().len()),
            Snapshot::Spectral(f) => (1u8, f.values().len()),
            Snapshot::Mask(m) => (2u8, m.bits().len()),
        };
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * count);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(kind);
        out.push(grid.d() as u8);
        out.extend_from_slice(&(grid.points_per_axis() as u32).to_le_bytes());
        out.extend_from_slice(&grid.half_width().to_le_bytes());
        out.extend_from_slice(&(count as u64).to_le_bytes());
        match self {
            Snapshot::Phase(f) => push_values(&mut out, f.values()),
            Snapshot::Spectral(f) => push_values(&mut out, f.values()),
            Snapshot::Mask(m) => out.extend(m.bits().iter().map(|&b| b as u8)),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> io::Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(invalid("not a KLFS snapshot"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(invalid(format!("unsupported snapshot version {version}")));
        }
        let kind = bytes[6];
        let d = bytes[7] as usize;
        let points = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let half_width = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let count = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
        let grid = PhaseGrid::new(d, points, half_width).map_err(|e| invalid(e.to_string()))?;
        if count != grid.len() {
            return Err(invalid(format!("header count {count} does not match grid size {}", grid.len())));
        }
        let payload = &bytes[HEADER_LEN..];
        match kind {
            0 | 1 => {
                if payload.len() != 16 * count {
                    return Err(invalid("truncated field payload"));
                }
                let values: Vec<Complex64> = payload
                    .chunks_exact(16)
                    .map(|c| {
                        Complex64::new(
                            f64::from_le_bytes(c[..8].try_into().unwrap()),
                            f64::from_le_bytes(c[8..].try_into().unwrap()),
                        )
                    })
                    .collect();
                let err = |e: kolmo_core::Error| invalid(e.to_string());
                Ok(if kind == 0 {
                    Snapshot::Phase(PhaseField::new(grid, values).map_err(err)?)
                } else {
                    Snapshot::Spectral(SpectralField::new(grid, values).map_err(err)?)
                })
            }
            2 => {
                if payload.len() != count {
                    return Err(invalid("truncated mask payload"));
                }
                if payload.iter().any(|&b| b > 1) {
                    return Err(invalid("mask bytes must be 0 or 1"));
                }
                let bits = payload.iter().map(|&b| b == 1).collect();
                Ok(Snapshot::Mask(GridMask::new(grid, Space::Phase, bits).map_err(|e| invalid(e.to_string()))?))
            }
            k => Err(invalid(format!("unknown snapshot kind {k}"))),
        }
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(&self.to_bytes())
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

fn push_values(out: &mut Vec<u8>, values: &[Complex64]) {
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let g = PhaseGrid::new(1, 4, 2.5).unwrap();
        let f = PhaseField::from_fn(g, |z| Complex64::new(z[0], z[1])).unwrap();
        let bytes = Snapshot::Phase(f.clone()).to_bytes();
        assert_eq!(&bytes[..4], b"KLFS");
        assert_eq!(bytes[6], 0);
        assert_eq!(bytes[7], 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 2.5);
        assert_eq!(bytes.len(), 28 + 16 * 16);
        assert_eq!(Snapshot::from_bytes(&bytes).unwrap(), Snapshot::Phase(f));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Snapshot::from_bytes(b"nope").is_err());
        let g = PhaseGrid::new(1, 2, 1.0).unwrap();
        let mut bytes = Snapshot::Mask(GridMask::full(g, Space::Phase)).to_bytes();
        bytes.pop();
        assert!(Snapshot::from_bytes(&bytes).is_err());
        let mut bytes = Snapshot::Mask(GridMask::full(g, Space::Phase)).to_bytes();
        bytes[4] = 9;
        assert!(Snapshot::from_bytes(&bytes).is_err());
    }
}
