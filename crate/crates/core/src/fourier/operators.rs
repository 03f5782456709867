use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::CharFunGrid;
use crate::error::{Error, Result};
use crate::kinetic::{KacParams, ThermostatSpec};

/// Numerical settings of the Fourier engine.
///
/// Interpolation is always the anchored multilinear scheme of
/// [`CharFunGrid`]; angular integrals use the composite trapezoid rule on
/// `n_theta` equispaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub n_theta: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub dt: f64,
    pub nodes_per_axis: usize,
    /// Ball radius; `None` means `6 / sqrt(K_g)` (or 6 when `K_g = 0`).
    pub radius: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_theta: 128,
            picard_tol: 1e-10,
            picard_max_iter: 2000,
            dt: 0.02,
            nodes_per_axis: 65,
            radius: None,
        }
    }
}

pub const MIN_THETA: usize = 64;

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < MIN_THETA {
            return Err(Error::invalid(
                "solver.n_theta",
                format!("must be >= {MIN_THETA}, got {}", self.n_theta),
            ));
        }
        if !(self.picard_tol.is_finite() && self.picard_tol > 0.0) {
            return Err(Error::invalid("solver.picard_tol", "must be finite and > 0"));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::invalid("solver.picard_max_iter", "must be >= 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("solver.dt", "must be finite and > 0"));
        }
        if let Some(r) = self.radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::invalid("solver.radius", "must be finite and > 0"));
            }
        }
        if self.nodes_per_axis.is_multiple_of(2) || self.nodes_per_axis < super::lattice::MIN_NODES {
            return Err(Error::invalid(
                "solver.nodes_per_axis",
                format!("must be odd and >= {}", super::lattice::MIN_NODES),
            ));
        }
        Ok(())
    }

    /// Explicit Euler stability: `dt (lambda + mu) N < 1`.
    pub fn check_stability(&self, params: &KacParams) -> Result<()> {
        let value = self.dt * params.total_rate();
        if value >= 1.0 {
            return Err(Error::Unstable { value });
        }
        Ok(())
    }

    pub fn radius_for(&self, g: &ThermostatSpec) -> f64 {
        self.radius.unwrap_or_else(|| {
            let k = g.second_moment();
            if k > 0.0 {
                6.0 / k.sqrt()
            } else {
                6.0
            }
        })
    }

    /// Same settings at half the lattice spacing and twice the angles.
    pub fn refined(&self) -> Self {
        SolverConfig {
            n_theta: 2 * self.n_theta,
            nodes_per_axis: 2 * self.nodes_per_axis - 1,
            ..*self
        }
    }
}

struct Angles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Angles {
    fn new(n: usize) -> Self {
        let (sin, cos) = (0..n)
            .map(|m| (std::f64::consts::TAU * m as f64 / n as f64).sin_cos())
            .unzip();
        Angles { cos, sin }
    }
}

/// Applies `f` at every active node; exploits `F̂(-ξ) = conj F̂(ξ)` when the
/// input grid is Hermitian. The origin is pinned to 1.
fn map_nodes<F>(grid: &CharFunGrid, f: F) -> Result<CharFunGrid>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let lat = grid.lattice().clone();
    let dim = lat.dim();
    let origin = lat.origin();
    let hermitian = grid.hermitian_defect() <= 1e-12;
    let mut values: Vec<Complex64> = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            if i == origin {
                return Complex64::new(1.0, 0.0);
            }
            if !lat.is_active(i) || (hermitian && i > origin) {
                return Complex64::new(0.0, 0.0);
            }
            let mut xi = [0.0; 3];
            lat.coords_into(i, &mut xi[..dim]);
            f(&xi[..dim])
        })
        .collect();
    if hermitian {
        for i in origin + 1..values.len() {
            values[i] = values[lat.mirror(i)].conj();
        }
    }
    CharFunGrid::from_values(lat, values)
}

#[inline]
fn q_integrand(grid: &CharFunGrid, xi: &[f64], angles: &Angles) -> Complex64 {
    let dim = xi.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut eta = [0.0; 3];
    let mut pairs = 0usize;
    for k in 0..dim {
        for j in k + 1..dim {
            pairs += 1;
            eta[..dim].copy_from_slice(xi);
            for (c, s) in angles.cos.iter().zip(&angles.sin) {
                eta[k] = xi[k] * c + xi[j] * s;
                eta[j] = -xi[k] * s + xi[j] * c;
                acc += grid.eval_unchecked(&eta[..dim]);
            }
        }
    }
    acc / (pairs * angles.cos.len()) as f64
}

#[inline]
fn r_integrand(grid: &CharFunGrid, xi: &[f64], j: usize, g: &ThermostatSpec, angles: &Angles) -> Complex64 {
    let dim = xi.len();
    let mut eta = [0.0; 3];
    eta[..dim].copy_from_slice(xi);
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, s) in angles.cos.iter().zip(&angles.sin) {
        eta[j] = xi[j] * c;
        acc += grid.eval_unchecked(&eta[..dim]) * g.charfun(xi[j] * s);
    }
    acc / angles.cos.len() as f64
}

/// Pair-collision operator in Fourier variables: average over pairs `k < j`
/// and angles of `F̂` at the `(k, j)`-rotated argument.
pub fn apply_q_hat(grid: &CharFunGrid, cfg: &SolverConfig) -> Result<CharFunGrid> {
    cfg.validate()?;
    if grid.dim() < 2 {
        return Err(Error::UnsupportedDimension {
            dim: grid.dim(),
            reason: "the pair operator needs at least two coordinates".into(),
        });
    }
    let angles = Angles::new(cfg.n_theta);
    map_nodes(grid, |xi| q_integrand(grid, xi, &angles))
}

/// Thermostat operator on coordinate `j` (zero-based): angular average of
/// `F̂(ξ_j(θ)) ĝ(ξ_j sin θ)` where `ξ_j(θ)` scales the `j`-th coordinate by
/// `cos θ`.
pub fn apply_r_hat(grid: &CharFunGrid, j: usize, g: &ThermostatSpec, cfg: &SolverConfig) -> Result<CharFunGrid> {
    cfg.validate()?;
    if j >= grid.dim() {
        return Err(Error::IndexOutOfRange {
            index: j,
            dim: grid.dim(),
        });
    }
    let angles = Angles::new(cfg.n_theta);
    map_nodes(grid, |xi| r_integrand(grid, xi, j, g, &angles))
}

/// The fixed-point map `Φ = γ Q̂ + (1 - γ) (1/N) Σ_j R̂_j`.
pub fn apply_phi(grid: &CharFunGrid, params: &KacParams, g: &ThermostatSpec, cfg: &SolverConfig) -> Result<CharFunGrid> {
    cfg.validate()?;
    let n = params.n_particles();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch {
            left: grid.dim(),
            right: n,
        });
    }
    if params.is_frozen() {
        return Err(Error::invalid("params", "lambda and mu are both zero; Phi is undefined"));
    }
    let gamma = params.gamma();
    let angles = Angles::new(cfg.n_theta);
    map_nodes(grid, |xi| {
        let mut out = Complex64::new(0.0, 0.0);
        if gamma > 0.0 {
            out += q_integrand(grid, xi, &angles) * gamma;
        }
        if gamma < 1.0 {
            let mut r = Complex64::new(0.0, 0.0);
            for j in 0..n {
                r += r_integrand(grid, xi, j, g, &angles);
            }
            out += r * ((1.0 - gamma) / n as f64);
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn cfg() -> SolverConfig {
        SolverConfig {
            n_theta: 128,
            ..SolverConfig::default()
        }
    }

    fn radial(xi: &[f64]) -> Complex64 {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        Complex64::new((-0.5 * r2).exp() * (1.0 + 0.1 * r2), 0.0)
    }

    #[test]
    fn q_fixes_constants_and_radial_functions() {
        let one = CharFunGrid::constant_one(2, 6.0, 33).unwrap();
        let q = apply_q_hat(&one, &cfg()).unwrap();
        assert!(q.sup_distance(&one).unwrap() < 1e-14);

        let g = CharFunGrid::from_fn(2, 6.0, 65, radial).unwrap();
        let q = apply_q_hat(&g, &cfg()).unwrap();
        assert!(q.sup_distance(&g).unwrap() < 5e-3);
    }

    #[test]
    fn q_matches_quadrature_oracle() {
        // Independent oracle: fine trapezoid of the closed form, no grid.
        let f = |x: f64, y: f64| (-(x * x + 4.0 * y * y) / 2.0).exp();
        let m = 20_000;
        let oracle: f64 = (0..m)
            .map(|i| {
                let t = TAU * i as f64 / m as f64;
                f(t.cos(), -t.sin())
            })
            .sum::<f64>()
            / m as f64;
        let grid = CharFunGrid::from_fn(2, 8.0, 129, |xi| Complex64::new(f(xi[0], xi[1]), 0.0)).unwrap();
        let q = apply_q_hat(&grid, &cfg()).unwrap();
        let node = grid
            .lattice()
            .index_of_offsets(&[(1.0 / grid.spacing()).round() as i64, 0])
            .unwrap();
        assert_eq!(grid.lattice().coords(node), vec![1.0, 0.0]);
        assert!((q.value(node).re - oracle).abs() < 1e-3, "{} vs {oracle}", q.value(node).re);
    }

    #[test]
    fn q_rejects_one_dimension() {
        let one = CharFunGrid::constant_one(1, 6.0, 33).unwrap();
        assert!(matches!(apply_q_hat(&one, &cfg()), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn r_fixed_direction_and_index_check() {
        let g = ThermostatSpec::rademacher(1.0).unwrap();
        let grid = CharFunGrid::from_fn(2, 6.0, 33, radial).unwrap();
        let r = apply_r_hat(&grid, 0, &g, &cfg()).unwrap();
        // nodes on the ξ_1 = 0 line are untouched by R_1
        for off in -16..=16 {
            let i = grid.lattice().index_of_offsets(&[0, off]).unwrap();
            assert!((r.value(i) - grid.value(i)).norm() < 1e-14);
        }
        assert!(matches!(
            apply_r_hat(&grid, 2, &g, &cfg()),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn r_on_constant_matches_bessel_oracle() {
        // (1/2π)∫ exp(-sin²θ / 2) dθ = e^{-1/4} I_0(1/4), I_0 by its series.
        let i0: f64 = (0..30)
            .map(|k| {
                let fact: f64 = (1..=k).map(|j| j as f64).product();
                (0.125f64).powi(2 * k) / (fact * fact)
            })
            .sum();
        let oracle = (-0.25f64).exp() * i0;
        assert!((oracle - 0.791).abs() < 1e-3);
        let g = ThermostatSpec::gaussian(1.0).unwrap();
        let one = CharFunGrid::constant_one(1, 8.0, 65).unwrap();
        let r = apply_r_hat(&one, 0, &g, &cfg()).unwrap();
        let node = one
            .lattice()
            .index_of_offsets(&[(1.0 / one.spacing()).round() as i64])
            .unwrap();
        assert!((r.value(node).re - oracle).abs() < 1e-3);
    }

    #[test]
    fn r_with_dirac_reservoir_matches_quadrature() {
        let g = ThermostatSpec::dirac_zero();
        let f = |r2: f64| (-0.5 * r2).exp();
        let grid = CharFunGrid::from_fn(1, 6.0, 129, |xi| Complex64::new(f(xi[0] * xi[0]), 0.0)).unwrap();
        let r = apply_r_hat(&grid, 0, &g, &cfg()).unwrap();
        for off in [8i64, 21, 40] {
            let i = grid.lattice().index_of_offsets(&[off]).unwrap();
            let x = grid.lattice().coords(i)[0];
            let m = 10_000;
            let oracle: f64 = (0..m)
                .map(|k| f((x * (TAU * k as f64 / m as f64).cos()).powi(2)))
                .sum::<f64>()
                / m as f64;
            assert!((r.value(i).re - oracle).abs() < 1e-3, "x={x}");
        }
    }

    #[test]
    fn phi_fixes_point_mass_and_maxwellian() {
        let params = KacParams::new(1.0, 1.0, 2).unwrap();
        let dirac = ThermostatSpec::dirac_zero();
        let one = CharFunGrid::constant_one(2, 6.0, 33).unwrap();
        let out = apply_phi(&one, &params, &dirac, &cfg()).unwrap();
        assert!(out.sup_distance(&one).unwrap() < 1e-14);

        let g = ThermostatSpec::gaussian(1.0).unwrap();
        let m = CharFunGrid::from_fn(2, 6.0, 65, |xi| {
            Complex64::new((-0.5 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0)
        })
        .unwrap();
        let out = apply_phi(&m, &params, &g, &cfg()).unwrap();
        assert!(out.sup_distance(&m).unwrap() < 2e-3);
        assert_eq!(out.value(out.lattice().origin()), Complex64::new(1.0, 0.0));
        assert!(out.hermitian_defect() < 1e-15);
    }

    #[test]
    fn phi_checks_dimension() {
        let params = KacParams::new(1.0, 1.0, 3).unwrap();
        let one = CharFunGrid::constant_one(2, 6.0, 33).unwrap();
        assert!(apply_phi(&one, &params, &ThermostatSpec::dirac_zero(), &cfg()).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig { n_theta: 32, ..cfg() }.validate().is_err());
        assert!(SolverConfig {
            picard_tol: 0.0,
            ..cfg()
        }
        .validate()
        .is_err());
        let p = KacParams::new(1.0, 1.0, 2).unwrap();
        assert!(SolverConfig { dt: 0.25, ..cfg() }.check_stability(&p).is_err());
        assert!(SolverConfig { dt: 0.2, ..cfg() }.check_stability(&p).is_ok());
    }
}
