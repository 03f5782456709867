//! Plain-text grid snapshots.
//!
//! ```text
//! # kacbath charfun grid v1
//! dim 2
//! radius 6
//! nodes_per_axis 65
//! <re> <im>        (one line per node, row-major, last axis fastest)
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces the grid bit for bit.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::grid::CharFunGrid;
use super::lattice::Lattice;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &str = "# kacbath charfun grid v1";

pub fn write_snapshot<W: Write>(grid: &CharFunGrid, mut out: W) -> Result<()> {
    writeln!(out, "{SNAPSHOT_MAGIC}")?;
    writeln!(out, "dim {}", grid.dim())?;
    writeln!(out, "radius {:?}", grid.radius())?;
    writeln!(out, "nodes_per_axis {}", grid.nodes_per_axis())?;
    for v in grid.values() {
        writeln!(out, "{:?} {:?}", v.re, v.im)?;
    }
    Ok(())
}

fn header<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Snapshot(format!("missing `{key}` line")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::Snapshot(format!("expected `{key} <value>`, got `{line}`")))
}

pub fn read_snapshot<R: BufRead>(input: R) -> Result<CharFunGrid> {
    let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
    let mut it = lines.iter().map(|s| s.trim_end());
    if it.next() != Some(SNAPSHOT_MAGIC) {
        return Err(Error::Snapshot("missing magic header".into()));
    }
    let bad = |what: &str| Error::Snapshot(format!("cannot parse {what}"));
    let dim: usize = header(it.next(), "dim")?.parse().map_err(|_| bad("dim"))?;
    let radius: f64 = header(it.next(), "radius")?.parse().map_err(|_| bad("radius"))?;
    let nodes: usize = header(it.next(), "nodes_per_axis")?
        .parse()
        .map_err(|_| bad("nodes_per_axis"))?;
    let lattice = Lattice::new(dim, radius, nodes)?;
    let mut values = Vec::with_capacity(lattice.len());
    for (n, line) in it.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Snapshot(format!("value line {} is malformed", n + 1)));
        };
        values.push(Complex64::new(
            re.parse().map_err(|_| bad("real part"))?,
            im.parse().map_err(|_| bad("imaginary part"))?,
        ));
    }
    if values.len() != lattice.len() {
        return Err(Error::Snapshot(format!(
            "expected {} values, found {}",
            lattice.len(),
            values.len()
        )));
    }
    CharFunGrid::from_values(lattice, values)
}
