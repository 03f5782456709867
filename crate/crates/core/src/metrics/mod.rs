//! Fourier distances, 1D Wasserstein distance and the marginal and
//! tensorization constructions built on them.

mod distance;
mod probes;
mod source;
mod wasserstein;

pub use distance::{
    corrected_gtw, gtw_distance, gtw_distance_with_tolerance, t1_distance, CorrectionKernel, MetricValue, MEAN_TOLERANCE,
};
pub use probes::{ProbeSet, SMALL_PROBE_FRACTION};
pub use source::{counterexample_pair, marginal_charfun, CharFunSource, ClosedForm};
pub use wasserstein::{w2_tensorization_check, wasserstein2_1d};
