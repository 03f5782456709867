use num_complex::Complex64;
use serde::Serialize;

use super::grid::{CharFunGrid, D1, D2, D4};
use crate::error::{Error, Result};

/// First and second moments read off a grid by central differences at the
/// origin: `∂_k F̂(0) = -i m_k` and `∂_k ∂_l F̂(0) = -m_kl`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMoments {
    pub mean: Vec<f64>,
    pub second: Vec<Vec<f64>>,
}

impl GridMoments {
    /// `Σ_k m_kk`.
    pub fn energy(&self) -> f64 {
        (0..self.mean.len()).map(|k| self.second[k][k]).sum()
    }
}

fn at(grid: &CharFunGrid, offsets: &[i64]) -> Complex64 {
    let idx = grid
        .lattice()
        .index_of_offsets(offsets)
        .expect("stencil stays inside the lattice");
    grid.value(idx)
}

fn axis_offsets(dim: usize, k: usize, step: i64) -> Vec<i64> {
    let mut o = vec![0; dim];
    o[k] = step;
    o
}

/// Mean vector and second-moment matrix with `O(h⁴)` truncation error.
pub fn moments_from_grid(grid: &CharFunGrid) -> Result<GridMoments> {
    let dim = grid.dim();
    let h = grid.spacing();
    let i = Complex64::i();
    let mut mean = vec![0.0; dim];
    let mut second = vec![vec![0.0; dim]; dim];
    for k in 0..dim {
        let d1: Complex64 = D1.iter().map(|&(s, w)| at(grid, &axis_offsets(dim, k, s)) * w).sum();
        mean[k] = (i * d1 / h).re;
        let d2: Complex64 = D2.iter().map(|&(s, w)| at(grid, &axis_offsets(dim, k, s)) * w).sum();
        second[k][k] = -(d2 / (h * h)).re;
        for l in k + 1..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, wa) in &D1 {
                for &(b, wb) in &D1 {
                    let mut o = vec![0; dim];
                    o[k] = a;
                    o[l] = b;
                    acc += at(grid, &o) * (wa * wb);
                }
            }
            let m = -(acc / (h * h)).re;
            second[k][l] = m;
            second[l][k] = m;
        }
    }
    Ok(GridMoments { mean, second })
}

/// Even moments of the `axis`-th one-dimensional marginal of a centred grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalShape {
    pub second: f64,
    pub fourth: f64,
}

impl MarginalShape {
    /// `m4 / m2² - 3`.
    pub fn excess_kurtosis(&self) -> f64 {
        self.fourth / (self.second * self.second) - 3.0
    }

    /// Fourth cumulant `m4 - 3 m2²`.
    pub fn fourth_cumulant(&self) -> f64 {
        self.fourth - 3.0 * self.second * self.second
    }
}

pub fn marginal_shape(grid: &CharFunGrid, axis: usize) -> Result<MarginalShape> {
    let dim = grid.dim();
    if axis >= dim {
        return Err(Error::IndexOutOfRange { index: axis, dim });
    }
    let h = grid.spacing();
    let d2: Complex64 = D2.iter().map(|&(s, w)| at(grid, &axis_offsets(dim, axis, s)) * w).sum();
    let d4: Complex64 = D4.iter().map(|&(s, w)| at(grid, &axis_offsets(dim, axis, s)) * w).sum();
    Ok(MarginalShape {
        second: -(d2 / (h * h)).re,
        fourth: (d4 / h.powi(4)).re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gaussian() {
        let g = CharFunGrid::from_fn(2, 6.0, 65, |xi| {
            Complex64::new((-0.5 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0)
        })
        .unwrap();
        let m = moments_from_grid(&g).unwrap();
        for k in 0..2 {
            assert!(m.mean[k].abs() < 1e-6);
            for l in 0..2 {
                let target = if k == l { 1.0 } else { 0.0 };
                assert!((m.second[k][l] - target).abs() < 1e-3);
            }
        }
        let s = marginal_shape(&g, 0).unwrap();
        assert!(s.excess_kurtosis().abs() < 1e-2);
    }

    #[test]
    fn point_masses() {
        let one = CharFunGrid::constant_one(3, 6.0, 33).unwrap();
        let m = moments_from_grid(&one).unwrap();
        assert!(m.mean.iter().all(|&x| x == 0.0));
        assert!(m.second.iter().flatten().all(|&x| x.abs() < 1e-13));

        let a = 0.7;
        for nodes in [65, 129] {
            let g = CharFunGrid::from_fn(1, 6.0, nodes, |xi| Complex64::from_polar(1.0, -a * xi[0])).unwrap();
            let m = moments_from_grid(&g).unwrap();
            // fourth-order stencil: error ~ a^5 h^4 / 30
            let h = g.spacing();
            assert!((m.mean[0] - a).abs() < a.powi(5) * h.powi(4) / 20.0, "{}", m.mean[0]);
            assert!((m.second[0][0] - a * a).abs() < 1e-3);
        }
    }

    #[test]
    fn correlated_gaussian_cross_moment() {
        // covariance [[1, 0.4], [0.4, 2]] with mean (0.5, -0.25)
        let g = CharFunGrid::from_fn(2, 6.0, 129, |xi| {
            let q = xi[0] * xi[0] + 0.8 * xi[0] * xi[1] + 2.0 * xi[1] * xi[1];
            Complex64::from_polar((-0.5 * q).exp(), -(0.5 * xi[0] - 0.25 * xi[1]))
        })
        .unwrap();
        let m = moments_from_grid(&g).unwrap();
        assert!((m.mean[0] - 0.5).abs() < 1e-4 && (m.mean[1] + 0.25).abs() < 1e-4);
        assert!((m.second[0][1] - (0.4 - 0.125)).abs() < 1e-3);
        assert!((m.second[1][1] - (2.0 + 0.0625)).abs() < 1e-3);
    }

    #[test]
    fn uniform_kurtosis() {
        // uniform on [-√3, √3]: m4 = 9/5, excess kurtosis -6/5
        let a = 3f64.sqrt();
        let g = CharFunGrid::from_fn(1, 6.0, 129, |xi| {
            let x = a * xi[0];
            Complex64::new(if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0)
        })
        .unwrap();
        let s = marginal_shape(&g, 0).unwrap();
        assert!((s.excess_kurtosis() + 1.2).abs() < 1e-3, "{}", s.excess_kurtosis());
    }
}
