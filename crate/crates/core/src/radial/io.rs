//! CSV and binary serialisation of radial profiles.
//!
//! The binary layout is the magic `RWL1`, then `n: u32`, `num_points: u64`,
//! `r_max: f64`, `slices: u64`, followed by `slices * (num_points + 1)` values,
//! all little-endian.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{RadialGrid, RadialProfile};

const MAGIC: &[u8; 4] = b"RWL1";

/// Writes `r,value` rows.
pub fn write_profile_csv(profile: &RadialProfile, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "value"])?;
    for (i, v) in profile.values().iter().enumerate() {
        w.write_record([format!("{:e}", profile.grid().r(i)), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `r,value` rows and checks them against `grid`.
pub fn read_profile_csv(grid: RadialGrid, input: impl Read) -> Result<RadialProfile> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut values = Vec::with_capacity(grid.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |j: usize| -> Result<f64> {
            rec.get(j)
                .ok_or_else(|| Error::Format(format!("row {i}: missing column {j}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {i}: {e}")))
        };
        let r = parse(0)?;
        if (r - grid.r(i)).abs() > 1e-9 * grid.r_max() {
            return Err(Error::Format(format!("row {i}: radius {r} does not match the grid")));
        }
        values.push(parse(1)?);
    }
    RadialProfile::with_tail(grid, values)
}

/// Writes one or more profiles sharing `grid`.
pub fn write_binary(grid: &RadialGrid, slices: &[&[f64]], mut out: impl Write) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    out.write_all(&(grid.num_points() as u64).to_le_bytes())?;
    out.write_all(&grid.r_max().to_le_bytes())?;
    out.write_all(&(slices.len() as u64).to_le_bytes())?;
    for s in slices {
        if s.len() != grid.len() {
            return Err(Error::validation("slice length does not match the grid"));
        }
        for v in *s {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a binary dump written by [`write_binary`].
pub fn read_binary(mut input: impl Read) -> Result<(RadialGrid, Vec<Vec<f64>>)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    input.read_exact(&mut b8)?;
    let num_points = u64::from_le_bytes(b8) as usize;
    input.read_exact(&mut b8)?;
    let r_max = f64::from_le_bytes(b8);
    input.read_exact(&mut b8)?;
    let count = u64::from_le_bytes(b8) as usize;
    let grid = RadialGrid::new(n, r_max, num_points)?;
    let mut slices = Vec::with_capacity(count);
    for _ in 0..count {
        let mut s = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            input.read_exact(&mut b8)?;
            s.push(f64::from_le_bytes(b8));
        }
        slices.push(s);
    }
    Ok((grid, slices))
}
