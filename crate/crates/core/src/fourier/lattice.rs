use std::sync::Arc;

use crate::error::{Error, Result};

/// Regular tensor lattice over `[-radius, radius]^dim` with an odd number of
/// nodes per axis, so the origin is a node. Nodes with `|ξ| <= radius` are
/// active; every inactive node is mapped to an active node of strictly
/// smaller norm whose value it copies.
#[derive(Debug, PartialEq)]
pub struct Lattice {
    dim: usize,
    radius: f64,
    nodes: usize,
    spacing: f64,
    center: usize,
    strides: [usize; 3],
    len: usize,
    active: Vec<bool>,
    fill_from: Vec<usize>,
    norm2: Vec<f64>,
}

pub const MIN_NODES: usize = 33;

impl Lattice {
    pub fn new(dim: usize, radius: f64, nodes: usize) -> Result<Arc<Self>> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "grids support 1, 2 or 3 dimensions".into(),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("grid.radius", format!("must be finite and > 0, got {radius}")));
        }
        if nodes.is_multiple_of(2) || nodes < MIN_NODES {
            return Err(Error::invalid(
                "grid.nodes_per_axis",
                format!("must be odd and >= {MIN_NODES}, got {nodes}"),
            ));
        }
        let half = (nodes - 1) / 2;
        let spacing = radius / half as f64;
        let mut strides = [0usize; 3];
        let mut s = 1;
        for k in (0..dim).rev() {
            strides[k] = s;
            s *= nodes;
        }
        let len = s;
        let c = half as i64;
        let mut active = vec![false; len];
        let mut fill_from = vec![0usize; len];
        let mut norm2 = vec![0.0; len];
        let mut offs = [0i64; 3];
        for (idx, ((act, fill), n2)) in active.iter_mut().zip(fill_from.iter_mut()).zip(norm2.iter_mut()).enumerate() {
            let mut rem = idx;
            for k in 0..dim {
                offs[k] = (rem / strides[k]) as i64 - c;
                rem %= strides[k];
            }
            let int_n2: i64 = offs[..dim].iter().map(|o| o * o).sum();
            *n2 = int_n2 as f64 * spacing * spacing;
            if int_n2 <= c * c {
                *act = true;
                *fill = idx;
            } else {
                // Scale towards the origin onto the ball and truncate towards
                // zero: the target is active and strictly shorter.
                let scale = c as f64 / (int_n2 as f64).sqrt();
                let mut target = 0usize;
                for k in 0..dim {
                    let o = (offs[k] as f64 * scale).trunc() as i64;
                    target += (o + c) as usize * strides[k];
                }
                *fill = target;
            }
        }
        Ok(Arc::new(Lattice {
            dim,
            radius,
            nodes,
            spacing,
            center: half,
            strides,
            len,
            active,
            fill_from,
            norm2,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes
    }

    /// Lattice spacing `h`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Linear index of the origin.
    pub fn origin(&self) -> usize {
        self.center * self.strides[..self.dim].iter().sum::<usize>()
    }

    /// Linear index of the node `-ξ` for the node at `idx`.
    pub fn mirror(&self, idx: usize) -> usize {
        self.len - 1 - idx
    }

    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn fill_source(&self, idx: usize) -> usize {
        self.fill_from[idx]
    }

    pub fn norm2(&self, idx: usize) -> f64 {
        self.norm2[idx]
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides[..self.dim]
    }

    pub(crate) fn center_index(&self) -> usize {
        self.center
    }

    /// Coordinates of node `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.coords_into(idx, &mut out);
        out
    }

    pub(crate) fn coords_into(&self, idx: usize, out: &mut [f64]) {
        let mut rem = idx;
        for k in 0..self.dim {
            let i = rem / self.strides[k];
            rem %= self.strides[k];
            out[k] = (i as f64 - self.center as f64) * self.spacing;
        }
    }

    /// Linear index of the node with the given signed offsets (in lattice
    /// steps) from the origin, if it lies in the box.
    pub fn index_of_offsets(&self, offsets: &[i64]) -> Option<usize> {
        if offsets.len() != self.dim {
            return None;
        }
        let c = self.center as i64;
        let mut idx = 0usize;
        for (k, &o) in offsets.iter().enumerate() {
            let i = o + c;
            if i < 0 || i >= self.nodes as i64 {
                return None;
            }
            idx += i as usize * self.strides[k];
        }
        Some(idx)
    }

    /// Active node indices, origin included.
    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.active[i])
    }

    pub fn same_geometry(&self, other: &Lattice) -> bool {
        self.dim == other.dim && self.nodes == other.nodes && self.radius == other.radius
    }
}
