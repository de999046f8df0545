//! Bit-exact binary field snapshots and run checkpoints.
//!
//! Snapshot layout (everything little-endian):
//!
//! ```text
//! magic    4 bytes   "NDAS"
//! version  u32       1
//! dim      u32
//! n        u32       points per axis
//! nfields  u32       component count (dim for velocity, 1 for scalars)
//! nu       f64       viscosity metadata
//! t        f64       simulation time
//! payload  nfields * n^dim * 2 * f64   coefficients, component-major,
//!          row-major within a component (axis 0 slowest), (re, im) pairs
//! ```
//!
//! A checkpoint is a small header (config hash, step counter, time) followed
//! by two embedded snapshots (reference, twin). Checkpoints are written at
//! observation instants just before the observation is taken, so resuming
//! re-observes at that instant and reproduces the uninterrupted run exactly.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"NDAS";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const CHECKPOINT_MAGIC: [u8; 4] = *b"NDCK";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug)]
pub struct Snapshot {
    pub field: SpectralField,
    pub nu: f64,
    pub t: f64,
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_exact<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Format("truncated file".into()))?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact::<R, 4>(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<R, 8>(r)?))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<R, 8>(r)?))
}

pub fn write_snapshot_to<W: Write>(w: &mut W, field: &SpectralField, nu: f64, t: f64) -> Result<()> {
    let grid = field.grid();
    w.write_all(&SNAPSHOT_MAGIC)?;
    write_u32(w, SNAPSHOT_VERSION)?;
    write_u32(w, grid.dim() as u32)?;
    write_u32(w, grid.n() as u32)?;
    write_u32(w, field.ncomp() as u32)?;
    write_f64(w, nu)?;
    write_f64(w, t)?;
    for comp in 0..field.ncomp() {
        for v in field.comp(comp).as_slice().expect("standard layout") {
            write_f64(w, v.re)?;
            write_f64(w, v.im)?;
        }
    }
    Ok(())
}

pub fn write_snapshot(path: &Path, field: &SpectralField, nu: f64, t: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot_to(&mut w, field, nu, t)?;
    w.flush()?;
    Ok(())
}

/// Read a snapshot, reconstructing the grid with the given box side (the
/// header does not carry it; runs on non-unit boxes must supply `length`).
pub fn read_snapshot_from<R: Read>(r: &mut R, length: f64) -> Result<Snapshot> {
    let magic = read_exact::<R, 4>(r)?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:02x?}, expected \"NDAS\"",
            magic
        )));
    }
    let version = read_u32(r)?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = read_u32(r)? as usize;
    let n = read_u32(r)? as usize;
    let nfields = read_u32(r)? as usize;
    let nu = read_f64(r)?;
    let t = read_f64(r)?;
    if nfields == 0 || nfields > 3 {
        return Err(Error::Format(format!("implausible field count {nfields}")));
    }
    let grid = Arc::new(Grid::new(dim, n, length)?);
    let mut field = SpectralField::zeros_with_comps(&grid, nfields);
    for comp in 0..nfields {
        let data = field.comp_mut(comp).as_slice_mut().expect("standard layout");
        for v in data.iter_mut() {
            let re = read_f64(r)?;
            let im = read_f64(r)?;
            *v = Complex64::new(re, im);
        }
    }
    if nfields == dim {
        let sol = field.divergence_max() <= 1e-12 * field.max_coeff().max(f64::MIN_POSITIVE);
        field.set_solenoidal(sol);
    }
    Ok(Snapshot { field, nu, t })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    read_snapshot_with_length(path, 1.0)
}

pub fn read_snapshot_with_length(path: &Path, length: f64) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    read_snapshot_from(&mut r, length)
}

#[derive(Debug)]
pub struct Checkpoint {
    pub config_hash: u64,
    pub step: u64,
    pub t: f64,
    pub reference: Snapshot,
    pub twin: Snapshot,
}

pub fn write_checkpoint(
    path: &Path,
    config_hash: u64,
    step: u64,
    t: f64,
    reference: &SpectralField,
    twin: &SpectralField,
    nu: f64,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CHECKPOINT_MAGIC)?;
    write_u32(&mut w, CHECKPOINT_VERSION)?;
    write_u64(&mut w, config_hash)?;
    write_u64(&mut w, step)?;
    write_f64(&mut w, t)?;
    write_snapshot_to(&mut w, reference, nu, t)?;
    write_snapshot_to(&mut w, twin, nu, t)?;
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint_with_length(path: &Path, length: f64) -> Result<Checkpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let magic = read_exact::<_, 4>(&mut r)?;
    if magic != CHECKPOINT_MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:02x?}, expected \"NDCK\"",
            magic
        )));
    }
    let version = read_u32(&mut r)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let config_hash = read_u64(&mut r)?;
    let step = read_u64(&mut r)?;
    let t = read_f64(&mut r)?;
    let reference = read_snapshot_from(&mut r, length)?;
    let twin = read_snapshot_from(&mut r, length)?;
    Ok(Checkpoint {
        config_hash,
        step,
        t,
        reference,
        twin,
    })
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    read_checkpoint_with_length(path, 1.0)
}
