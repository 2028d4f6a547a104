//! Binary field dump.
//!
//! Layout: magic `PBSF`, u32 version (1), u8 chart kind (0 = torus,
//! 1 = sphere), u32 n1, u32 n2, four f64 coordinate ranges, then `n1 * n2`
//! little-endian f64 samples in row-major order (coordinate-1 major).

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::chart::{ChartKind, SurfaceChart};
use crate::geometry::field::ScalarField;

const MAGIC: &[u8; 4] = b"PBSF";
const VERSION: u32 = 1;

pub fn write_field(field: &ScalarField, path: &Path) -> Result<()> {
    let chart = field.chart();
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let kind: u8 = match chart.kind() {
        ChartKind::Torus => 0,
        ChartKind::SphereCyl => 1,
    };
    w.write_all(&[kind])?;
    w.write_all(&(chart.n1() as u32).to_le_bytes())?;
    w.write_all(&(chart.n2() as u32).to_le_bytes())?;
    for r in [chart.range1().0, chart.range1().1, chart.range2().0, chart.range2().1] {
        w.write_all(&r.to_le_bytes())?;
    }
    for &s in field.samples() {
        w.write_all(&s.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a field dump. The chart is reconstructed with its default density;
/// the format intentionally stores only kind, resolution and ranges.
pub fn read_field(path: &Path) -> Result<ScalarField> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?} in {}",
            magic,
            path.display()
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let n1 = read_u32(&mut r)? as usize;
    let n2 = read_u32(&mut r)? as usize;
    let mut ranges = [0.0f64; 4];
    for v in ranges.iter_mut() {
        *v = read_f64(&mut r)?;
    }
    let chart: Arc<SurfaceChart> = match kind[0] {
        0 => SurfaceChart::torus(ranges[1] - ranges[0], ranges[3] - ranges[2], n1, n2)?,
        1 => SurfaceChart::sphere(n1, n2)?,
        k => return Err(Error::Format(format!("unknown chart kind {k}"))),
    };
    let mut samples = vec![0.0f64; n1 * n2];
    for v in samples.iter_mut() {
        *v = read_f64(&mut r)?;
    }
    ScalarField::from_samples(&chart, samples)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_samples_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pbsf");
        let chart = SurfaceChart::torus(2.0, 1.0, 16, 8).unwrap();
        let f = ScalarField::from_fn(&chart, |x, y| (x * 17.0 + y).sin()).unwrap();
        write_field(&f, &path).unwrap();
        let g = read_field(&path).unwrap();
        assert_eq!(g.chart().n1(), 16);
        assert_eq!(g.chart().n2(), 8);
        for i in 0..chart.len() {
            assert_eq!(f.samples()[i].to_bits(), g.samples()[i].to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pbsf");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(matches!(read_field(&path), Err(Error::Format(_))));
    }
}
