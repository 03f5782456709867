use serde::{Deserialize, Serialize};

/// Ensemble moments at one time: `K(t) = sum E v_i^2`, `d_k = E v_k` and the
/// second-moment matrix `E v_k v_l` (diagonal included), each with its
/// standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub time: f64,
    pub energy: f64,
    pub energy_stderr: f64,
    pub first_moments: Vec<f64>,
    pub first_stderr: Vec<f64>,
    pub second_moments: Vec<Vec<f64>>,
    pub second_stderr: Vec<Vec<f64>>,
    /// Average of `d_k` over particles, and its standard error (computed
    /// per replica, so correlations between particles are accounted for).
    pub mean_first: f64,
    pub mean_first_stderr: f64,
    /// Average of `d_{k,l}` over pairs `k < l`, and its standard error.
    pub mean_mixed: f64,
    pub mean_mixed_stderr: f64,
    pub replicas: usize,
}

impl MomentRecord {
    pub fn n_particles(&self) -> usize {
        self.first_moments.len()
    }

    /// `d_{k,l}` for `k != l`.
    pub fn mixed(&self, k: usize, l: usize) -> f64 {
        self.second_moments[k][l]
    }
}
