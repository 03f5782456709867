use crate::error::{Error, Result};
use crate::fourier::{CharFunGrid, Lattice};

/// Smallest small-probe radius as a fraction of the probe radius.
pub const SMALL_PROBE_FRACTION: f64 = 1e-3;
const SMALL_PROBES_PER_DIRECTION: usize = 24;

/// Finite set of nonzero frequencies over which a supremum is taken.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl ProbeSet {
    pub fn from_points(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: p.len(),
                    right: dim,
                });
            }
            if p.iter().any(|x| !x.is_finite()) || p.iter().all(|&x| x == 0.0) {
                return Err(Error::invalid("probes", "probes must be finite and nonzero"));
            }
        }
        Ok(ProbeSet { dim, points })
    }

    /// Active nodes of a lattice, origin excluded.
    pub fn lattice(lat: &Lattice) -> Self {
        let points = lat
            .active_indices()
            .filter(|&i| i != lat.origin())
            .map(|i| lat.coords(i))
            .collect();
        ProbeSet { dim: lat.dim(), points }
    }

    /// Points of the cubic lattice with `per_axis` points per axis on
    /// `[-radius, radius]` that lie in the ball, origin excluded.
    pub fn ball(dim: usize, radius: f64, per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "probe balls support 1 to 3 dimensions".into(),
            });
        }
        if per_axis < 3 || per_axis.is_multiple_of(2) {
            return Err(Error::invalid("probes.per_axis", "must be odd and at least 3"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("probes.radius", "must be positive and finite"));
        }
        let half = (per_axis / 2) as i64;
        let h = radius / half as f64;
        let mut points = Vec::new();
        let mut idx = vec![-half; dim];
        loop {
            if idx.iter().any(|&i| i != 0) {
                let p: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
                if p.iter().map(|x| x * x).sum::<f64>().sqrt() <= radius * (1.0 + 1e-12) {
                    points.push(p);
                }
            }
            let mut k = dim;
            loop {
                if k == 0 {
                    return Ok(ProbeSet { dim, points });
                }
                k -= 1;
                if idx[k] < half {
                    idx[k] += 1;
                    break;
                }
                idx[k] = -half;
            }
        }
    }

    /// Geometric sequence of radii from `radius · SMALL_PROBE_FRACTION` to
    /// `radius / 2` along every direction of `{-1, 0, 1}^dim` (up to sign).
    pub fn small(dim: usize, radius: f64) -> Self {
        let mut dirs = Vec::new();
        let total = 3usize.pow(dim as u32);
        for code in 0..total {
            let mut c = code;
            let d: Vec<f64> = (0..dim)
                .map(|_| {
                    let x = (c % 3) as f64 - 1.0;
                    c /= 3;
                    x
                })
                .collect();
            // first nonzero entry positive
            match d.iter().find(|&&x| x != 0.0) {
                Some(&x) if x > 0.0 => {
                    let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                    dirs.push(d.iter().map(|x| x / n).collect::<Vec<f64>>());
                }
                _ => {}
            }
        }
        let lo = radius * SMALL_PROBE_FRACTION;
        let hi = radius / 2.0;
        let steps = SMALL_PROBES_PER_DIRECTION;
        let mut points = Vec::new();
        for d in &dirs {
            for s in 0..steps {
                let r = lo * (hi / lo).powf(s as f64 / (steps - 1) as f64);
                points.push(d.iter().map(|x| x * r).collect());
            }
        }
        ProbeSet { dim, points }
    }

    /// Lattice nodes of a grid plus the small probes of its ball.
    pub fn for_grid(grid: &CharFunGrid) -> Self {
        Self::lattice(grid.lattice()).union(&Self::small(grid.dim(), grid.radius()))
    }

    /// Default set for analytic sources: a ball lattice (401, 65 or 33 points
    /// per axis in 1, 2, 3 dimensions) plus the small probes.
    pub fn standard(dim: usize, radius: f64) -> Result<Self> {
        let per_axis = match dim {
            1 => 401,
            2 => 65,
            _ => 33,
        };
        Ok(Self::ball(dim, radius, per_axis)?.union(&Self::small(dim, radius)))
    }

    pub fn union(mut self, other: &ProbeSet) -> Self {
        self.points.extend(other.points.iter().cloned());
        self
    }

    /// Probes in the subspace `ξ_{k+1} = … = ξ_N = 0`, as `k`-vectors.
    pub fn restrict(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim {
            return Err(Error::IndexOutOfRange { index: k, dim: self.dim });
        }
        let points = self
            .points
            .iter()
            .filter(|p| p[k..].iter().all(|&x| x == 0.0))
            .map(|p| p[..k].to_vec())
            .collect();
        Ok(ProbeSet { dim: k, points })
    }

    /// Probes embedded from `k` dimensions into `n` by zero padding.
    pub fn embed(&self, n: usize) -> Result<Self> {
        if n < self.dim {
            return Err(Error::DimensionMismatch {
                left: n,
                right: self.dim,
            });
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q.resize(n, 0.0);
                q
            })
            .collect();
        Ok(ProbeSet { dim: n, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_norm(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}
