use serde::Serialize;

use super::grid::CharFunGrid;
use super::moments::moments_from_grid;
use super::operators::{apply_phi, SolverConfig};
use crate::error::{Error, Result};
use crate::kinetic::{KacParams, ThermostatSpec};

/// Convergence history of a Picard run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardReport {
    /// Lattice GTW distance between successive iterates.
    pub distances: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl PicardReport {
    /// Successive ratios `d_{n+1} / d_n`.
    pub fn ratios(&self) -> Vec<f64> {
        self.distances.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Largest ratio over the iterations whose distance still exceeds
    /// `floor` (below that, round-off dominates).
    pub fn max_ratio_above(&self, floor: f64) -> f64 {
        self.distances
            .windows(2)
            .filter(|w| w[0] > floor)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }
}

/// Largest first moment tolerated in a Picard starting point.
pub const INITIAL_MEAN_TOL: f64 = 1e-6;

/// Picard iteration of `Φ` from `initial` until the lattice GTW distance
/// between successive iterates drops below `cfg.picard_tol`.
pub fn solve_steady_state(
    params: &KacParams,
    g: &ThermostatSpec,
    cfg: &SolverConfig,
    initial: &CharFunGrid,
) -> Result<(CharFunGrid, PicardReport)> {
    cfg.validate()?;
    let mean = moments_from_grid(initial)?.mean;
    let gap = mean.iter().map(|m| m.abs()).fold(0.0, f64::max);
    if gap > INITIAL_MEAN_TOL {
        return Err(Error::invalid(
            "initial",
            format!("Picard start must have zero mean, largest first moment is {gap:e}"),
        ));
    }
    let mut current = initial.clone();
    let mut distances = Vec::new();
    for it in 1..=cfg.picard_max_iter {
        let next = apply_phi(&current, params, g, cfg)?;
        let (d, _) = next.lattice_gtw(&current)?;
        distances.push(d);
        current = next;
        if d < cfg.picard_tol {
            return Ok((
                current,
                PicardReport {
                    distances,
                    iterations: it,
                    converged: true,
                },
            ));
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.picard_max_iter,
        tolerance: cfg.picard_tol,
        last: distances.last().copied().unwrap_or(f64::NAN),
        trace: distances,
    })
}

/// One explicit Euler step of `∂_t F̂ = -(λ+μ) N (F̂ - Φ[F̂])`.
pub fn step_master(grid: &CharFunGrid, params: &KacParams, g: &ThermostatSpec, cfg: &SolverConfig) -> Result<CharFunGrid> {
    cfg.check_stability(params)?;
    if params.is_frozen() {
        return Ok(grid.clone());
    }
    let phi = apply_phi(grid, params, g, cfg)?;
    let a = cfg.dt * params.total_rate();
    grid.combine(1.0 - a, &phi, a)
}

/// Integrates the master equation, calling `observe(t, grid)` at `t = 0` and
/// after every step, up to the first step reaching `t_end`.
pub fn evolve<F>(
    initial: &CharFunGrid,
    params: &KacParams,
    g: &ThermostatSpec,
    cfg: &SolverConfig,
    t_end: f64,
    mut observe: F,
) -> Result<CharFunGrid>
where
    F: FnMut(f64, &CharFunGrid) -> Result<()>,
{
    cfg.check_stability(params)?;
    let steps = (t_end / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let mut grid = initial.clone();
    observe(0.0, &grid)?;
    for s in 1..=steps {
        grid = step_master(&grid, params, g, cfg)?;
        observe(s as f64 * cfg.dt, &grid)?;
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn gauss(k: f64) -> impl Fn(&[f64]) -> Complex64 {
        move |xi: &[f64]| Complex64::new((-0.5 * k * xi.iter().map(|x| x * x).sum::<f64>()).exp(), 0.0)
    }

    #[test]
    fn dirac_reservoir_steady_state_is_point_mass() {
        let params = KacParams::new(1.0, 1.0, 2).unwrap();
        let cfg = SolverConfig {
            n_theta: 64,
            picard_tol: 1e-9,
            nodes_per_axis: 33,
            ..SolverConfig::default()
        };
        let start = CharFunGrid::from_fn(2, 6.0, 33, gauss(1.0)).unwrap();
        let (ss, report) = solve_steady_state(&params, &ThermostatSpec::dirac_zero(), &cfg, &start).unwrap();
        assert!(report.converged);
        let one = CharFunGrid::constant_one(2, 6.0, 33).unwrap();
        let k = report.max_ratio_above(1e-12);
        assert!(k <= params.gtw_contraction_factor() + 0.01, "{k}");
        // a-posteriori fixed-point bound, GTW ratio times radius²
        let bound = cfg.picard_tol * k / (1.0 - k) * 36.0;
        assert!(ss.sup_distance(&one).unwrap() <= bound);
    }

    #[test]
    fn non_convergence_carries_trace() {
        let params = KacParams::new(1.0, 1.0, 2).unwrap();
        let cfg = SolverConfig {
            n_theta: 64,
            picard_tol: 1e-12,
            picard_max_iter: 3,
            nodes_per_axis: 33,
            ..SolverConfig::default()
        };
        let start = CharFunGrid::from_fn(2, 6.0, 33, gauss(2.0)).unwrap();
        match solve_steady_state(&params, &ThermostatSpec::gaussian(1.0).unwrap(), &cfg, &start) {
            Err(Error::NonConvergence { trace, iterations, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(trace.len(), 3);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nonzero_mean_start() {
        let params = KacParams::new(1.0, 1.0, 2).unwrap();
        let start = CharFunGrid::from_fn(2, 6.0, 33, |xi| {
            Complex64::from_polar((-0.5 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), -0.3 * xi[0])
        })
        .unwrap();
        let cfg = SolverConfig {
            nodes_per_axis: 33,
            ..SolverConfig::default()
        };
        assert!(solve_steady_state(&params, &ThermostatSpec::gaussian(1.0).unwrap(), &cfg, &start).is_err());
    }

    #[test]
    fn pure_rotations_conserve_energy() {
        let params = KacParams::new(1.0, 0.0, 2).unwrap();
        let cfg = SolverConfig {
            n_theta: 64,
            dt: 0.1,
            nodes_per_axis: 65,
            ..SolverConfig::default()
        };
        let g = ThermostatSpec::gaussian(1.0).unwrap();
        let start = CharFunGrid::from_fn(2, 6.0, 65, |xi| {
            Complex64::new((-0.5 * (xi[0] * xi[0] + 3.0 * xi[1] * xi[1])).exp(), 0.0)
        })
        .unwrap();
        let k0 = moments_from_grid(&start).unwrap().energy();
        let mut ks = Vec::new();
        evolve(&start, &params, &g, &cfg, 2.0, |_, grid| {
            ks.push(moments_from_grid(grid)?.energy());
            Ok(())
        })
        .unwrap();
        assert_eq!(ks.len(), 21);
        for k in ks {
            assert!((k - k0).abs() < 2e-3 * k0, "{k} vs {k0}");
        }
    }

    #[test]
    fn frozen_step_is_identity_and_unstable_step_rejected() {
        let g = ThermostatSpec::gaussian(1.0).unwrap();
        let start = CharFunGrid::from_fn(2, 6.0, 33, gauss(1.5)).unwrap();
        let frozen = KacParams::new(0.0, 0.0, 2).unwrap();
        let cfg = SolverConfig {
            nodes_per_axis: 33,
            ..SolverConfig::default()
        };
        assert_eq!(step_master(&start, &frozen, &g, &cfg).unwrap(), start);
        let p = KacParams::new(3.0, 3.0, 2).unwrap();
        let bad = SolverConfig { dt: 0.1, ..cfg };
        assert!(matches!(step_master(&start, &p, &g, &bad), Err(Error::Unstable { .. })));
    }
}
