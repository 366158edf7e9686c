//! Field snapshots.
//!
//! Binary layout (little-endian): magic `MTFIELD1`, then `T: f64`,
//! `Nt: u64`, `L: f64`, `Ns: u64`, `m₁: f64`, `m₂: f64`, followed by every
//! complex value as `(re: f64, im: f64)` in the field's index order.

use num_complex::Complex64;
use std::io::{Read, Write};

use super::field::MultiTimeField;
use super::grid::{GridSpec, SPIN};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"MTFIELD1";

pub fn write_field<W: Write>(field: &MultiTimeField, mut w: W) -> Result<()> {
    let g = &field.grid;
    w.write_all(MAGIC)?;
    w.write_all(&g.time_extent.to_le_bytes())?;
    w.write_all(&(g.time_steps as u64).to_le_bytes())?;
    w.write_all(&g.spatial_half_width.to_le_bytes())?;
    w.write_all(&(g.spatial_points as u64).to_le_bytes())?;
    w.write_all(&field.masses.0.to_le_bytes())?;
    w.write_all(&field.masses.1.to_le_bytes())?;
    let mut buf = Vec::with_capacity(1 << 16);
    for chunk in field.values.chunks(4096) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_field<R: Read>(mut r: R) -> Result<MultiTimeField> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io("not a field snapshot (bad magic)".into()));
    }
    let t = read_f64(&mut r)?;
    let nt = read_u64(&mut r)? as usize;
    let l = read_f64(&mut r)?;
    let ns = read_u64(&mut r)? as usize;
    let m1 = read_f64(&mut r)?;
    let m2 = read_f64(&mut r)?;
    let grid = GridSpec::new(t, nt, l, ns)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut buf = vec![0u8; 16 * 4096];
    let mut left = grid.len();
    while left > 0 {
        let n = left.min(4096);
        r.read_exact(&mut buf[..16 * n])?;
        for k in 0..n {
            let re = f64::from_le_bytes(buf[16 * k..16 * k + 8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[16 * k + 8..16 * k + 16].try_into().unwrap());
            values.push(Complex64::new(re, im));
        }
        left -= n;
    }
    MultiTimeField::from_values(grid, (m1, m2), values)
}

/// One (n₁, n₂) slice as CSV: `i1,x1,y1,z1,i2,x2,y2,z2,s,re,im`.
pub fn write_slice_csv<W: Write>(
    field: &MultiTimeField,
    n1: usize,
    n2: usize,
    mut w: W,
) -> Result<()> {
    let g = &field.grid;
    if n1 >= g.time_steps || n2 >= g.time_steps {
        return Err(Error::Config(format!("slice ({n1}, {n2}) outside the time grid")));
    }
    writeln!(w, "i1,x1,y1,z1,i2,x2,y2,z2,s,re,im")?;
    for i1 in 0..g.spatial_count() {
        let p1 = g.spatial_point(i1);
        for i2 in 0..g.spatial_count() {
            let p2 = g.spatial_point(i2);
            for (s, v) in field.at(n1, i1, n2, i2).iter().enumerate().take(SPIN) {
                writeln!(
                    w,
                    "{i1},{},{},{},{i2},{},{},{},{s},{:e},{:e}",
                    p1[0], p1[1], p1[2], p2[0], p2[1], p2[2], v.re, v.im
                )?;
            }
        }
    }
    Ok(())
}
