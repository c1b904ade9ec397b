//! Binary field/path files and CSV tables.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic    4 bytes  "KENF"
//! version  u32      1
//! kind     u32      0 = single field, 1 = path of complex potentials
//! dim      u32      complex dimension of the grid
//! m        u32      points per axis (nodes on the projective line)
//! len      u64      samples per field
//! count    u64      number of fields (path: 2 per time slice, u then v)
//! times    count/2 × f64   path only
//! payload  count × len × f64, row-major samples
//! ```

use std::io::{Read, Write};

use kenergy_core::functionals::{ComplexPotential, FunctionalRow};
use kenergy_core::geodesics::{PotentialPath, ResidualPair};

use crate::LabError;

const MAGIC: &[u8; 4] = b"KENF";
pub const FORMAT_VERSION: u32 = 1;
const KIND_FIELD: u32 = 0;
const KIND_PATH: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridShape {
    pub dim: u32,
    pub m: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub shape: GridShape,
    pub values: Vec<f64>,
}

struct Header {
    kind: u32,
    shape: GridShape,
    len: u64,
    count: u64,
}

fn write_header(w: &mut impl Write, h: &Header) -> Result<(), LabError> {
    w.write_all(MAGIC)?;
    for x in [FORMAT_VERSION, h.kind, h.shape.dim, h.shape.m] {
        w.write_all(&x.to_le_bytes())?;
    }
    w.write_all(&h.len.to_le_bytes())?;
    w.write_all(&h.count.to_le_bytes())?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32, LabError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64, LabError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_header(r: &mut impl Read, expected_kind: u32) -> Result<Header, LabError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LabError::Format("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(LabError::Format(format!("unsupported version {version}")));
    }
    let kind = read_u32(r)?;
    if kind != expected_kind {
        return Err(LabError::Format(format!("expected kind {expected_kind}, found {kind}")));
    }
    let shape = GridShape { dim: read_u32(r)?, m: read_u32(r)? };
    let (len, count) = (read_u64(r)?, read_u64(r)?);
    // Torus fields carry `m^{2n}` samples, projective-line fields `m`.
    let torus_len = (shape.m as u64).checked_pow(2 * shape.dim);
    if torus_len != Some(len) && !(shape.dim == 1 && len == shape.m as u64) {
        return Err(LabError::Format(format!("length {len} does not fit dim {} and m {}", shape.dim, shape.m)));
    }
    Ok(Header { kind, shape, len, count })
}

fn write_f64s(w: &mut impl Write, xs: &[f64]) -> Result<(), LabError> {
    for x in xs {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_f64s(r: &mut impl Read, n: u64) -> Result<Vec<f64>, LabError> {
    let n = usize::try_from(n).map_err(|_| LabError::Format("payload too large".into()))?;
    let mut bytes = vec![0u8; n.checked_mul(8).ok_or_else(|| LabError::Format("payload too large".into()))?];
    r.read_exact(&mut bytes)?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
}

pub fn write_field(w: &mut impl Write, shape: GridShape, values: &[f64]) -> Result<(), LabError> {
    write_header(w, &Header { kind: KIND_FIELD, shape, len: values.len() as u64, count: 1 })?;
    write_f64s(w, values)
}

pub fn read_field(r: &mut impl Read) -> Result<FieldFile, LabError> {
    let h = read_header(r, KIND_FIELD)?;
    if h.count != 1 {
        return Err(LabError::Format(format!("field file holds {} fields", h.count)));
    }
    Ok(FieldFile { shape: h.shape, values: read_f64s(r, h.len)? })
}

pub fn write_path(w: &mut impl Write, shape: GridShape, path: &PotentialPath) -> Result<(), LabError> {
    let len = path.potentials()[0].len() as u64;
    write_header(w, &Header { kind: KIND_PATH, shape, len, count: 2 * path.len() as u64 })?;
    write_f64s(w, path.times())?;
    for p in path.potentials() {
        write_f64s(w, p.u())?;
        write_f64s(w, p.v())?;
    }
    Ok(())
}

pub fn read_path(r: &mut impl Read) -> Result<(GridShape, PotentialPath), LabError> {
    let h = read_header(r, KIND_PATH)?;
    if h.count == 0 || h.count % 2 != 0 {
        return Err(LabError::Format(format!("path file holds {} fields", h.count)));
    }
    let times = read_f64s(r, h.count / 2)?;
    let mut potentials = Vec::with_capacity(times.len());
    for _ in 0..times.len() {
        let u = read_f64s(r, h.len)?;
        let v = read_f64s(r, h.len)?;
        potentials.push(ComplexPotential::new(u, v));
    }
    Ok((h.shape, PotentialPath::new(times, potentials)?))
}

/// `iteration,value` table.
pub fn write_history(w: impl Write, values: &[f64]) -> Result<(), LabError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iteration", "value"])?;
    for (i, v) in values.iter().enumerate() {
        out.write_record([i.to_string(), format!("{v:e}")])?;
    }
    out.flush()?;
    Ok(())
}

/// Per-time residual table of a path.
pub fn write_residuals(w: impl Write, rows: &[ResidualPair]) -> Result<(), LabError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time", "first", "second"])?;
    for r in rows {
        out.write_record([format!("{:e}", r.time), format!("{:e}", r.first), format!("{:e}", r.second)])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per potential, one functional per column.
pub fn write_functionals(w: impl Write, rows: &[FunctionalRow]) -> Result<(), LabError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "entropy", "energy", "complex_energy_re", "complex_energy_im", "k_energy", "calabi"])?;
    for (i, r) in rows.iter().enumerate() {
        out.write_record([
            i.to_string(),
            format!("{:e}", r.entropy),
            format!("{:e}", r.energy),
            format!("{:e}", r.complexified_energy.re),
            format!("{:e}", r.complexified_energy.im),
            format!("{:e}", r.k_energy),
            format!("{:e}", r.calabi),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Profile samples on the projective line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileRow {
    pub x: f64,
    pub w: f64,
    pub b: f64,
    pub s: f64,
    pub theta: f64,
}

/// `x,w,b,s,theta` table.
pub fn write_profiles(w: impl Write, rows: &[ProfileRow]) -> Result<(), LabError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "w", "b", "s", "theta"])?;
    for r in rows {
        out.write_record([r.x, r.w, r.b, r.s, r.theta].map(|v| format!("{v:e}")))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn field_round_trip() {
        let shape = GridShape { dim: 1, m: 4 };
        let values: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        let mut buf = Vec::new();
        write_field(&mut buf, shape, &values).unwrap();
        assert_eq!(buf.len(), 4 + 4 * 4 + 16 + 16 * 8);
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back, FieldFile { shape, values });
    }

    #[test]
    fn rejects_corrupt_headers() {
        let mut buf = Vec::new();
        write_field(&mut buf, GridShape { dim: 1, m: 2 }, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_field(&mut bad.as_slice()), Err(LabError::Format(_))));
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(read_field(&mut bad.as_slice()), Err(LabError::Format(_))));
        assert!(matches!(read_path(&mut buf.as_slice()), Err(LabError::Format(_))));
        assert!(matches!(read_field(&mut &buf[..buf.len() - 3]), Err(LabError::Io(_))));
    }

    #[test]
    fn history_csv_layout() {
        let mut buf = Vec::new();
        write_history(&mut buf, &[1.0, 0.5]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,value\n0,1e0\n1,5e-1\n");
    }

    proptest! {
        #[test]
        fn path_round_trip(steps in 1usize..5, seed in any::<u64>()) {
            let len = 16;
            let mut rng = kenergy_core::random::LabRng::new(seed);
            let times: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
            let pots: Vec<ComplexPotential> = times
                .iter()
                .map(|_| ComplexPotential::new((0..len).map(|_| rng.normal()).collect(), (0..len).map(|_| rng.normal()).collect()))
                .collect();
            let path = PotentialPath::new(times, pots).unwrap();
            let shape = GridShape { dim: 1, m: 4 };
            let mut buf = Vec::new();
            write_path(&mut buf, shape, &path).unwrap();
            let (s, back) = read_path(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(s, shape);
            prop_assert_eq!(back.times(), path.times());
            for (a, b) in back.potentials().iter().zip(path.potentials()) {
                prop_assert_eq!(a, b);
            }
        }
    }
}
