//! Deterministic engine: characteristic functions on a lattice ball, the
//! collision operators in Fourier variables, Picard iteration to the steady
//! state and explicit time stepping of the master equation.

mod grid;
mod lattice;
mod moments;
mod operators;
mod sampler;
mod snapshot;
mod solver;

pub use grid::CharFunGrid;
pub use lattice::{Lattice, MIN_NODES};
pub use moments::{marginal_shape, moments_from_grid, GridMoments, MarginalShape};
pub use operators::{apply_phi, apply_q_hat, apply_r_hat, SolverConfig, MIN_THETA};
pub use sampler::GridSampler;
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC};
pub use solver::{evolve, solve_steady_state, step_master, PicardReport, INITIAL_MEAN_TOL};
