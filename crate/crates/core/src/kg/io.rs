//! Field serialization: CSV rows `it,ix,re,im` and a binary block made of a
//! one-line JSON header followed by little-endian `f64` pairs.

use super::GridField;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct BinaryHeader {
    pub dims: [usize; 2],
    pub field: String,
}

pub fn write_csv<W: Write>(f: &GridField, out: &mut W) -> Result<()> {
    writeln!(out, "it,ix,re,im")?;
    for it in 0..f.nt {
        for ix in 0..f.nx {
            let z = f.at(it, ix);
            writeln!(out, "{it},{ix},{:e},{:e}", z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<GridField> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Shape(format!("line {}: expected 4 columns", i + 1)));
        }
        let p = |k: usize| -> Result<f64> {
            parts[k].trim().parse().map_err(|_| Error::Shape(format!("line {}: bad number", i + 1)))
        };
        rows.push((p(0)? as usize, p(1)? as usize, p(2)?, p(3)?));
    }
    let nt = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
    let nx = rows.iter().map(|r| r.1 + 1).max().unwrap_or(0);
    let mut f = GridField::zeros(nt, nx);
    for (it, ix, re, im) in rows {
        f.values[it * nx + ix] = num_complex::Complex64::new(re, im);
    }
    Ok(f)
}

pub fn write_binary<W: Write>(f: &GridField, name: &str, out: &mut W) -> Result<()> {
    let header = BinaryHeader { dims: [f.nt, f.nx], field: name.to_string() };
    serde_json::to_writer(&mut *out, &header)?;
    out.write_all(b"\n")?;
    for z in &f.values {
        out.write_all(&z.re.to_le_bytes())?;
        out.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: BufRead>(mut input: R) -> Result<(BinaryHeader, GridField)> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: BinaryHeader = serde_json::from_str(line.trim_end())?;
    let [nt, nx] = header.dims;
    let mut f = GridField::zeros(nt, nx);
    let mut buf = [0u8; 8];
    for z in f.values.iter_mut() {
        input.read_exact(&mut buf)?;
        z.re = f64::from_le_bytes(buf);
        input.read_exact(&mut buf)?;
        z.im = f64::from_le_bytes(buf);
    }
    Ok((header, f))
}
