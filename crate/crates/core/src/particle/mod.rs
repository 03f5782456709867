//! Event-driven Monte Carlo for the N-particle jump process, its
//! synchronous coupling, and ensemble statistics.

mod ensemble;
mod init;
mod process;

pub use ensemble::{
    empirical_charfun, estimate_moments, replica_rng, run_coupled, run_ensemble, sample_states, CoupledTrajectory,
    EnsembleConfig, EnsembleSummary, FULL_SECOND_MOMENTS_MAX_N,
};
pub use init::{FixedState, IndependentPair, PairSampler, ProductLaw, SamePair, StateSampler};
pub use process::{simulate, simulate_coupled, CoupledPath, EventKind, JumpEvent, JumpProcess, Trajectory};
