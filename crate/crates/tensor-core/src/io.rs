//! The tensor file format.
//!
//! A tensor file is plain text:
//!
//! ```text
//! dims,I1,I2,I3
//! <entry 0>
//! <entry 1>
//! ...
//! ```
//!
//! with one entry per line in storage layout order (mode-1 fastest, i.e.
//! entry `(i, j, k)` on line `1 + i + I1*(j + I2*k)`). Entries are
//! written with Rust's shortest round-trip `f64` formatting, so reading a
//! written file reproduces the tensor bit for bit.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{CoreError, Tensor3};

/// Write a tensor to `path` in the tensor file format.
pub fn write_tensor(path: &Path, t: &Tensor3) -> Result<(), CoreError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let (i1, i2, i3) = t.dims();
    writeln!(w, "dims,{i1},{i2},{i3}")?;
    for v in t.values() {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Read a tensor from a file in the tensor file format.
pub fn read_tensor(path: &Path) -> Result<Tensor3, CoreError> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::Parse("empty tensor file".into()))??;
    let dims = parse_header(&header)?;
    let expected = dims.0 * dims.1 * dims.2;
    let mut values = Vec::with_capacity(expected);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|e| {
            CoreError::Parse(format!("line {}: bad entry {trimmed:?}: {e}", lineno + 2))
        })?;
        values.push(v);
    }
    if values.len() != expected {
        return Err(CoreError::Parse(format!(
            "expected {expected} entries for dims {dims:?}, found {}",
            values.len()
        )));
    }
    Tensor3::from_values(dims, values)
}

fn parse_header(header: &str) -> Result<(usize, usize, usize), CoreError> {
    let parts: Vec<&str> = header.trim().split(',').collect();
    if parts.len() != 4 || parts[0] != "dims" {
        return Err(CoreError::Parse(format!(
            "bad header {header:?}; expected `dims,I1,I2,I3`"
        )));
    }
    let mut dims = [0usize; 3];
    for (d, p) in dims.iter_mut().zip(&parts[1..]) {
        *d = p
            .parse()
            .map_err(|e| CoreError::Parse(format!("bad dimension {p:?}: {e}")))?;
        if *d == 0 {
            return Err(CoreError::Parse("dimensions must be positive".into()));
        }
    }
    Ok((dims[0], dims[1], dims[2]))
}
