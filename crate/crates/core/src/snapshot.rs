//! Binary field snapshot files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  content
//! 0       8     magic "HMHDSNAP"
//! 8       4     format version (u32, = 1)
//! 12      4     spatial dimension (u32, = 3)
//! 16      4     points per axis N (u32)
//! 20      4     field count (u32)
//! 24      8     time t (f64)
//! 32      40    parameter block: nu, mu, eta, alpha, s (5 × f64)
//! 72      8     seed (u64)
//! 80      ...   fields
//! ```
//!
//! Each field is a 1-byte name length, the UTF-8 name, then 3 components of
//! N³ f64 physical-space samples in row-major order (index `(i·N + j)·N + l`
//! for the point `x = 2π(i, j, l)/N`).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::solver::{SolverConfig, State};

const MAGIC: &[u8; 8] = b"HMHDSNAP";
const VERSION: u32 = 1;

/// In-memory form of a snapshot file.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    pub nu: f64,
    pub mu: f64,
    pub eta: f64,
    pub alpha: f64,
    pub s: f64,
    pub seed: u64,
    pub fields: Vec<(String, PhysicalField)>,
}

impl Snapshot {
    /// Captures a solver state (fields "u" and "b") with its parameters.
    pub fn from_state(state: &State, config: &SolverConfig) -> Self {
        Snapshot {
            n: state.grid().n(),
            t: state.t,
            nu: config.nu,
            mu: config.mu,
            eta: config.eta,
            alpha: config.alpha,
            s: config.s,
            seed: config.seed,
            fields: vec![
                ("u".to_string(), state.u.to_physical()),
                ("b".to_string(), state.b.to_physical()),
            ],
        }
    }

    /// Rebuilds a solver state; requires fields named "u" and "b".
    pub fn to_state(&self) -> Result<State> {
        let find = |name: &str| -> Result<SpectralField> {
            let phys = self
                .fields
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, f)| f)
                .ok_or_else(|| {
                    Error::InvalidOperand(format!("snapshot has no field named `{name}`"))
                })?;
            SpectralField::from_physical(phys)
        };
        Ok(State {
            t: self.t,
            u: find("u")?,
            b: find("b")?,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n)
    }
}

/// Writes a snapshot to `path`.
pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&3u32.to_le_bytes())?;
    w.write_all(&(snap.n as u32).to_le_bytes())?;
    w.write_all(&(snap.fields.len() as u32).to_le_bytes())?;
    w.write_all(&snap.t.to_le_bytes())?;
    for v in [snap.nu, snap.mu, snap.eta, snap.alpha, snap.s] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&snap.seed.to_le_bytes())?;
    for (name, field) in &snap.fields {
        let bytes = name.as_bytes();
        if bytes.len() > u8::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "field name `{name}` too long for the snapshot format"
            )));
        }
        w.write_all(&[bytes.len() as u8])?;
        w.write_all(bytes)?;
        for comp in &field.components {
            for &v in comp {
                w.write_all(&v.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot from `path`, validating magic, version, and sizes.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidOperand(format!(
            "{} is not a field snapshot (bad magic)",
            path.display()
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::InvalidOperand(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let dim = read_u32(&mut r)?;
    if dim != 3 {
        return Err(Error::InvalidOperand(format!(
            "snapshot dimension {dim} unsupported (expected 3)"
        )));
    }
    let n = read_u32(&mut r)? as usize;
    let grid = Grid::new(n)?;
    let field_count = read_u32(&mut r)? as usize;
    let t = read_f64(&mut r)?;
    let nu = read_f64(&mut r)?;
    let mu = read_f64(&mut r)?;
    let eta = read_f64(&mut r)?;
    let alpha = read_f64(&mut r)?;
    let s = read_f64(&mut r)?;
    let seed = read_u64(&mut r)?;

    let mut fields = Vec::with_capacity(field_count);
    for _ in 0..field_count {
        let mut len = [0u8; 1];
        r.read_exact(&mut len)?;
        let mut name = vec![0u8; len[0] as usize];
        r.read_exact(&mut name)?;
        let name = String::from_utf8(name)
            .map_err(|_| Error::InvalidOperand("snapshot field name is not UTF-8".into()))?;
        let mut field = PhysicalField::zeros(grid);
        for comp in field.components.iter_mut() {
            let mut buf = vec![0u8; grid.len() * 8];
            r.read_exact(&mut buf)?;
            for (slot, chunk) in comp.iter_mut().zip(buf.chunks_exact(8)) {
                *slot = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
            }
        }
        fields.push((name, field));
    }

    Ok(Snapshot {
        n,
        t,
        nu,
        mu,
        eta,
        alpha,
        s,
        seed,
        fields,
    })
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{make_initial, InitialKind};

    #[test]
    fn round_trip_preserves_state() {
        let grid = Grid::new(16).unwrap();
        let state = make_initial(InitialKind::RandomBand, grid, 12, 2.0).unwrap();
        let config = SolverConfig {
            n: 16,
            eta: 0.03,
            seed: 12,
            ..SolverConfig::default()
        };
        let dir = std::env::temp_dir().join("hallmhd-snapshot-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.snap");
        write_snapshot(&path, &Snapshot::from_state(&state, &config)).unwrap();

        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.n, 16);
        assert_eq!(snap.eta, 0.03);
        assert_eq!(snap.seed, 12);
        let restored = snap.to_state().unwrap();
        let rel_u = restored.u.difference(&state.u).l2_norm() / state.u.l2_norm();
        let rel_b = restored.b.difference(&state.b).l2_norm() / state.b.l2_norm();
        assert!(rel_u < 1e-13 && rel_b < 1e-13, "{rel_u} {rel_b}");
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = std::env::temp_dir().join("hallmhd-snapshot-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("not-a-snapshot.bin");
        std::fs::write(&path, b"definitely not a snapshot").unwrap();
        assert!(read_snapshot(&path).is_err());
        std::fs::remove_file(&path).unwrap();
    }
}
