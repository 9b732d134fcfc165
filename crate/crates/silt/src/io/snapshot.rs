//! Self-describing binary snapshots with bit-exact round-tripping, plus a
//! CSV export for plotting.
//!
//! Layout: magic, version, dims, cell size, time, origin, then a field list
//! and the dense row-major grids as little-endian doubles. The conserved
//! fields are stored exactly so a run can restart from a snapshot; velocity
//! and free surface are included as derived conveniences.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, SiltError};
use crate::grid::SimGrid;
use crate::state::FlowState;

const MAGIC: &[u8; 8] = b"SILTSNAP";
const VERSION: u32 = 1;

/// Field names in storage order.
pub const FIELDS: [&str; 7] = ["H", "hu", "hv", "b", "u", "v", "eta"];

/// A stored simulation state plus its grid header.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub time: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    pub fields: Vec<(String, Vec<f64>)>,
}

impl Snapshot {
    /// Capture the current state. `eps_dry` controls the derived velocity
    /// fields (dry cells report zero).
    pub fn capture(state: &FlowState, grid: &SimGrid, time: f64, eps_dry: f64) -> Snapshot {
        let n = state.h.len();
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut eta = vec![0.0; n];
        for idx in 0..n {
            let (ui, vi) = state.velocity(idx, eps_dry);
            u[idx] = ui;
            v[idx] = vi;
            eta[idx] = state.h[idx] + state.b[idx];
        }
        Snapshot {
            nx: state.nx,
            ny: state.ny,
            h: grid.h,
            time,
            origin_x: grid.origin_x,
            origin_y: grid.origin_y,
            fields: vec![
                ("H".into(), state.h.clone()),
                ("hu".into(), state.hu.clone()),
                ("hv".into(), state.hv.clone()),
                ("b".into(), state.b.clone()),
                ("u".into(), u),
                ("v".into(), v),
                ("eta".into(), eta),
            ],
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Rebuild a flow state from the conserved fields.
    pub fn to_state(&self) -> Result<FlowState> {
        let need = |name: &str| {
            self.field(name)
                .map(|f| f.to_vec())
                .ok_or_else(|| SiltError::Snapshot(format!("missing field '{name}'")))
        };
        Ok(FlowState { nx: self.nx, ny: self.ny, h: need("H")?, hu: need("hu")?, hv: need("hv")?, b: need("b")? })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.nx as u32).to_le_bytes())?;
        w.write_all(&(self.ny as u32).to_le_bytes())?;
        for v in [self.h, self.time, self.origin_x, self.origin_y] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.fields.len() as u32).to_le_bytes())?;
        for (name, _) in &self.fields {
            let bytes = name.as_bytes();
            w.write_all(&[bytes.len() as u8])?;
            w.write_all(bytes)?;
        }
        for (_, data) in &self.fields {
            if data.len() != self.nx * self.ny {
                return Err(SiltError::Snapshot("field size does not match dims".into()));
            }
            for v in data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Snapshot> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        let err = |msg: &str| SiltError::Snapshot(format!("{}: {msg}", path.display()));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| err("truncated header"))?;
        if &magic != MAGIC {
            return Err(err("bad magic"));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(err(&format!("unsupported version {version}")));
        }
        let nx = read_u32(&mut r)? as usize;
        let ny = read_u32(&mut r)? as usize;
        let h = read_f64(&mut r)?;
        let time = read_f64(&mut r)?;
        let origin_x = read_f64(&mut r)?;
        let origin_y = read_f64(&mut r)?;
        let nfields = read_u32(&mut r)? as usize;
        if nfields > 64 {
            return Err(err("implausible field count"));
        }
        let mut names = Vec::with_capacity(nfields);
        for _ in 0..nfields {
            let mut len = [0u8; 1];
            r.read_exact(&mut len).map_err(|_| err("truncated field list"))?;
            let mut name = vec![0u8; len[0] as usize];
            r.read_exact(&mut name).map_err(|_| err("truncated field list"))?;
            names.push(String::from_utf8(name).map_err(|_| err("field name not utf-8"))?);
        }
        let n = nx
            .checked_mul(ny)
            .ok_or_else(|| err("dims overflow"))?;
        let mut fields = Vec::with_capacity(nfields);
        for name in names {
            let mut data = vec![0.0; n];
            let mut buf = [0u8; 8];
            for v in data.iter_mut() {
                r.read_exact(&mut buf).map_err(|_| err("truncated field data"))?;
                *v = f64::from_le_bytes(buf);
            }
            fields.push((name, data));
        }
        Ok(Snapshot { nx, ny, h, time, origin_x, origin_y, fields })
    }

    /// Export as CSV: one row per cell with coordinates and all fields.
    pub fn export_csv(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        write!(w, "x,y")?;
        for (name, _) in &self.fields {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let idx = j * self.nx + i;
                let x = self.origin_x + (i as f64 + 0.5) * self.h;
                let y = self.origin_y + (j as f64 + 0.5) * self.h;
                write!(w, "{x},{y}")?;
                for (_, data) in &self.fields {
                    write!(w, ",{}", data[idx])?;
                }
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{new_state, WaterInit};

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn roundtrip_is_bitwise_exact() {
        let grid = SimGrid::new(7, 5, 0.25).unwrap().with_origin(-3.5, 12.0);
        let n = grid.cell_count();
        let mut seed = 0x517_5eed_u64;
        let mut bed = vec![0.0; n];
        for b in bed.iter_mut() {
            *b = xorshift(&mut seed) * 3.0 - 1.0;
        }
        let mut state = new_state(&grid, bed, &WaterInit::Surface { eta0: 1.0 }).unwrap();
        for idx in 0..n {
            // Awkward values on purpose: subnormals, negatives, exact zeros.
            state.hu[idx] = (xorshift(&mut seed) - 0.5) * 1e-300;
            state.hv[idx] = (xorshift(&mut seed) - 0.5) * 40.0;
        }
        let snap = Snapshot::capture(&state, &grid, 17.25, 1e-6);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        snap.write(&path).unwrap();
        let back = Snapshot::read(&path).unwrap();
        assert_eq!(snap, back);
        // And the conserved state survives exactly.
        let state2 = back.to_state().unwrap();
        assert_eq!(state.h, state2.h);
        assert_eq!(state.hu, state2.hu);
        assert_eq!(state.hv, state2.hv);
        assert_eq!(state.b, state2.b);
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"NOTASNAPxxxxxxxxxxxxxxx").unwrap();
        assert!(Snapshot::read(&path).is_err());
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let grid = SimGrid::new(3, 3, 1.0).unwrap();
        let state = new_state(&grid, vec![0.0; 9], &WaterInit::Depth { h0: 1.0 }).unwrap();
        let snap = Snapshot::capture(&state, &grid, 0.0, 1e-6);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        snap.export_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,y,H,hu,hv,b,u,v,eta");
        assert_eq!(lines.count(), 9);
    }
}
