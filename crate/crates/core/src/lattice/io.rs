//! FLD1 binary field format.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `FLD1` |
//! | 4     | format version, `u32` = 1 |
//! | 8     | reserved, zero |
//! | 4     | dimension `n`, `u32` |
//! | 4     | points per axis `N`, `u32` |
//! | 8     | box length `L`, `f64` |
//! | 1     | side: 0 = space, 1 = frequency |
//! | 16·N^n | values as `(re, im)` `f64` pairs |
//!
//! Values are row-major with axis 0 slowest. Frequency-side values use the
//! natural FFT order described in the lattice module docs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Field, Grid, Side};
use crate::{Error, Result, C64};

pub const FLD_MAGIC: &[u8; 4] = b"FLD1";
pub const FLD_VERSION: u32 = 1;

pub fn write_fld_to<W: Write>(field: &Field, mut w: W) -> Result<()> {
    let g = field.grid();
    w.write_all(FLD_MAGIC)?;
    w.write_all(&FLD_VERSION.to_le_bytes())?;
    w.write_all(&[0u8; 8])?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.points() as u32).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    let side = match field.side() {
        Side::Space => 0u8,
        Side::Frequency => 1u8,
    };
    w.write_all(&[side])?;
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fld_from<R: Read>(mut r: R) -> Result<Field> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..4] != FLD_MAGIC {
        return Err(Error::Format("missing FLD1 magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != FLD_VERSION {
        return Err(Error::Format(format!("unsupported FLD1 version {version}")));
    }
    let mut meta = [0u8; 17];
    r.read_exact(&mut meta)?;
    let dim = u32::from_le_bytes(meta[0..4].try_into().unwrap()) as usize;
    let points = u32::from_le_bytes(meta[4..8].try_into().unwrap()) as usize;
    let length = f64::from_le_bytes(meta[8..16].try_into().unwrap());
    let side = match meta[16] {
        0 => Side::Space,
        1 => Side::Frequency,
        other => return Err(Error::Format(format!("bad side tag {other}"))),
    };
    let grid = Grid::new(dim, points, length)?;
    let mut bytes = vec![0u8; grid.len() * 16];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::from_values(grid, side, values)
}

pub fn write_fld(field: &Field, path: &Path) -> Result<()> {
    write_fld_to(field, BufWriter::new(File::create(path)?))
}

pub fn read_fld(path: &Path) -> Result<Field> {
    read_fld_from(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridPreset;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = Grid::new(3, 16, 10.0).unwrap();
        let f = Field::random(g, Side::Frequency, 1);
        let mut buf = Vec::new();
        write_fld_to(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 17 + 16 * g.len());
        assert_eq!(read_fld_from(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn rejects_corrupt_headers() {
        let f = Field::zeros(GridPreset::Small.grid(), Side::Space);
        let mut buf = Vec::new();
        write_fld_to(&f, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_fld_from(bad.as_slice()), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[32] = 9;
        assert!(matches!(read_fld_from(bad.as_slice()), Err(Error::Format(_))));
        buf.truncate(100);
        assert!(matches!(read_fld_from(buf.as_slice()), Err(Error::Io(_))));
    }
}
