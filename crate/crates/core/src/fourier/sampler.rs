use num_complex::Complex64;
use rand::Rng;

use super::grid::CharFunGrid;
use crate::error::{Error, Result};
use crate::smooth::smooth_step_down;

/// Draws velocity vectors from the law whose characteristic function is a
/// grid.
///
/// The grid is multiplied by a flat-top window (1 on `|ξ| <= R/2`, 0 at
/// `|ξ| = R`) and inverted onto the velocity lattice `δv·Z^N` with
/// `δv = π / R`. The window is flat near the origin, so the lattice law
/// keeps the low moments of the grid up to the small tails of the window
/// kernel (about `1e-5` relative for smooth grids). Cells with negative
/// density are clipped; the clipped mass is reported.
#[derive(Debug, Clone)]
pub struct GridSampler {
    dim: usize,
    spacing: f64,
    half: usize,
    cumulative: Vec<f64>,
    clipped_mass: f64,
}

fn transform_axis(data: &[Complex64], shape: &[usize], axis: usize, matrix: &[Vec<Complex64>]) -> (Vec<Complex64>, Vec<usize>) {
    let n_in = shape[axis];
    let n_out = matrix.len();
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * n_out * inner];
    for o in 0..outer {
        for (j, row) in matrix.iter().enumerate() {
            let dst = (o * n_out + j) * inner;
            for (i, &e) in row.iter().enumerate() {
                let src = (o * n_in + i) * inner;
                for k in 0..inner {
                    out[dst + k] += data[src + k] * e;
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = n_out;
    (out, new_shape)
}

impl GridSampler {
    /// `half_width` is the velocity box half-width per coordinate.
    pub fn new(grid: &CharFunGrid, half_width: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid("sampler.half_width", "must be positive and finite"));
        }
        let lat = grid.lattice();
        let dim = grid.dim();
        let radius = grid.radius();
        let spacing = std::f64::consts::PI / radius;
        let half = (half_width / spacing).ceil() as usize;
        let n = grid.nodes_per_axis();
        let c = lat.center_index() as f64;
        let h = grid.spacing();

        let mut data = Vec::with_capacity(lat.len());
        for i in 0..lat.len() {
            let w = if lat.is_active(i) {
                smooth_step_down(2.0 * lat.norm2(i).sqrt() / radius - 1.0)
            } else {
                0.0
            };
            data.push(grid.value(i) * w);
        }
        let matrix: Vec<Vec<Complex64>> = (0..2 * half + 1)
            .map(|j| {
                let v = (j as f64 - half as f64) * spacing;
                (0..n).map(|i| Complex64::from_polar(1.0, v * (i as f64 - c) * h)).collect()
            })
            .collect();
        let mut shape = vec![n; dim];
        for axis in 0..dim {
            let (d, s) = transform_axis(&data, &shape, axis, &matrix);
            data = d;
            shape = s;
        }
        let mut clipped = 0.0;
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(data.len());
        for z in &data {
            let f = z.re;
            if f < 0.0 {
                clipped -= f;
            } else {
                total += f;
            }
            cumulative.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::invalid("sampler", "windowed density has no positive mass"));
        }
        for x in &mut cumulative {
            *x /= total;
        }
        Ok(GridSampler {
            dim,
            spacing,
            half,
            cumulative,
            clipped_mass: clipped / (total + clipped),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Velocity lattice spacing `π / R`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Fraction of absolute mass discarded with negative cells.
    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    /// Probability of each velocity cell, row-major.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    /// Velocity of cell `idx`.
    pub fn velocity(&self, mut idx: usize, out: &mut [f64]) {
        let side = 2 * self.half + 1;
        for k in (0..self.dim).rev() {
            out[k] = ((idx % side) as f64 - self.half as f64) * self.spacing;
            idx /= side;
        }
    }

    /// Mean and second-moment matrix of the lattice law.
    pub fn moments(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let d = self.dim;
        let mut mean = vec![0.0; d];
        let mut second = vec![vec![0.0; d]; d];
        let mut v = vec![0.0; d];
        for (idx, p) in self.probabilities().into_iter().enumerate() {
            self.velocity(idx, &mut v);
            for k in 0..d {
                mean[k] += p * v[k];
                for l in 0..d {
                    second[k][l] += p * v[k] * v[l];
                }
            }
        }
        (mean, second)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let u: f64 = rng.gen();
        let idx = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        self.velocity(idx, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_lattice_law_has_exact_moments() {
        let grid = CharFunGrid::from_fn(2, 8.0, 65, |xi| {
            Complex64::new((-0.5 * (xi[0] * xi[0] + 2.0 * xi[1] * xi[1] + xi[0] * xi[1])).exp(), 0.0)
        })
        .unwrap();
        let s = GridSampler::new(&grid, 9.0).unwrap();
        assert!(s.clipped_mass() < 1e-5, "{}", s.clipped_mass());
        let (mean, second) = s.moments();
        assert!(mean.iter().all(|m| m.abs() < 1e-10));
        let exact = [[1.0, 0.5], [0.5, 2.0]];
        for k in 0..2 {
            for l in 0..2 {
                assert!((second[k][l] - exact[k][l]).abs() < 1e-4, "{second:?}");
            }
        }
    }

    #[test]
    fn samples_follow_lattice_law() {
        let grid = CharFunGrid::from_fn(1, 8.0, 65, |xi| Complex64::new((-0.5 * xi[0] * xi[0]).exp(), 0.0)).unwrap();
        let s = GridSampler::new(&grid, 8.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v = [0.0];
        let m = 200_000;
        let mut acc = 0.0;
        for _ in 0..m {
            s.sample(&mut rng, &mut v);
            acc += v[0] * v[0];
            let j = v[0] / s.spacing();
            assert!((j - j.round()).abs() < 1e-9);
        }
        let second = acc / m as f64;
        assert!((second - 1.0).abs() < 5.0 * (2.0 / m as f64).sqrt());
    }

    #[test]
    fn shifted_mass_keeps_its_mean() {
        let grid = CharFunGrid::from_fn(1, 8.0, 65, |xi| {
            Complex64::from_polar((-0.5 * xi[0] * xi[0]).exp(), -0.7 * xi[0])
        })
        .unwrap();
        let (mean, second) = GridSampler::new(&grid, 9.0).unwrap().moments();
        assert!((mean[0] - 0.7).abs() < 1e-4, "{mean:?}");
        assert!((second[0][0] - 1.49).abs() < 1e-4, "{second:?}");
    }

    #[test]
    fn rejects_bad_width() {
        let grid = CharFunGrid::constant_one(1, 8.0, 33).unwrap();
        assert!(GridSampler::new(&grid, 0.0).is_err());
    }
}
