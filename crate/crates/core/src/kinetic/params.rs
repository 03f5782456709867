use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collision intensities and particle count of the coupled Kac model.
///
/// `gamma = lambda / (lambda + mu)` is derived at construction. When both
/// intensities vanish the model is frozen and `gamma` is reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct KacParams {
    lambda: f64,
    mu: f64,
    n_particles: usize,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda: f64,
    mu: f64,
    n_particles: usize,
}

impl TryFrom<RawParams> for KacParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        KacParams::new(raw.lambda, raw.mu, raw.n_particles)
    }
}

impl From<KacParams> for RawParams {
    fn from(p: KacParams) -> Self {
        RawParams {
            lambda: p.lambda,
            mu: p.mu,
            n_particles: p.n_particles,
        }
    }
}

impl KacParams {
    /// `n_particles = 1` is accepted for thermostat-only Fourier solves; the
    /// particle engine and the pair operator need at least two particles.
    pub fn new(lambda: f64, mu: f64, n_particles: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(
                "params.lambda",
                format!("must be finite and >= 0, got {lambda}"),
            ));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::invalid("params.mu", format!("must be finite and >= 0, got {mu}")));
        }
        if n_particles == 0 {
            return Err(Error::invalid("params.n_particles", "must be >= 1"));
        }
        if n_particles == 1 && lambda > 0.0 {
            return Err(Error::invalid(
                "params.lambda",
                "pair collisions need n_particles >= 2; use lambda = 0 for a single particle",
            ));
        }
        let total = lambda + mu;
        let gamma = if total > 0.0 { lambda / total } else { 0.0 };
        Ok(KacParams {
            lambda,
            mu,
            n_particles,
            gamma,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// No events ever happen.
    pub fn is_frozen(&self) -> bool {
        self.lambda == 0.0 && self.mu == 0.0
    }

    /// Total pair-collision rate `lambda * N`.
    pub fn pair_rate(&self) -> f64 {
        self.lambda * self.n_particles as f64
    }

    /// Total thermostat rate `mu * N`.
    pub fn thermostat_rate(&self) -> f64 {
        self.mu * self.n_particles as f64
    }

    /// `(lambda + mu) * N`, the total jump rate and the generator prefactor
    /// in `dF/dt = -(lambda+mu) N (F - Phi[F])`.
    pub fn total_rate(&self) -> f64 {
        self.pair_rate() + self.thermostat_rate()
    }

    /// Fixed-point contraction factor of `Phi` in the GTW metric.
    pub fn gtw_contraction_factor(&self) -> f64 {
        1.0 - (1.0 - self.gamma) / (2.0 * self.n_particles as f64)
    }

    /// Fixed-point contraction factor of `Phi` in the T1 metric.
    pub fn t1_contraction_factor(&self) -> f64 {
        1.0 - (1.0 - self.gamma) / (4.0 * self.n_particles as f64)
    }

    /// Decay rate of the kinetic energy towards `N K_g`.
    pub fn energy_rate(&self) -> f64 {
        self.mu / 2.0
    }

    /// Decay rate of each first moment.
    pub fn first_moment_rate(&self) -> f64 {
        2.0 * self.lambda + self.mu
    }

    /// Decay rate of the mixed moments `E[v_k v_l]`, `k != l`.
    pub fn mixed_moment_rate(&self) -> f64 {
        let n = self.n_particles as f64;
        4.0 * self.lambda + 2.0 * self.mu - 2.0 * self.lambda / (n - 1.0)
    }

    /// Decay rate of `E sum_i (V_i - V'_i)^2` under synchronous coupling,
    /// with the thermostat acting on each particle at rate `mu`.
    pub fn coupling_rate(&self) -> f64 {
        self.mu / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_derived() {
        let p = KacParams::new(1.0, 3.0, 4).unwrap();
        assert_eq!(p.gamma(), 0.25);
        let frozen = KacParams::new(0.0, 0.0, 3).unwrap();
        assert!(frozen.is_frozen());
        assert_eq!(frozen.gamma(), 0.0);
    }

    #[test]
    fn rejects_negative_intensities() {
        let err = KacParams::new(-1.0, 1.0, 3).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref field, .. } if field == "params.lambda"));
        assert!(KacParams::new(1.0, -0.5, 3).is_err());
        assert!(KacParams::new(1.0, 1.0, 0).is_err());
        assert!(KacParams::new(1.0, 1.0, 1).is_err());
        assert!(KacParams::new(0.0, 1.0, 1).is_ok());
    }

    #[test]
    fn contraction_factors() {
        let p = KacParams::new(1.0, 1.0, 2).unwrap();
        assert!((p.gtw_contraction_factor() - 0.875).abs() < 1e-15);
        assert!((p.t1_contraction_factor() - 0.9375).abs() < 1e-15);
        let p = KacParams::new(1.0, 1.0, 10).unwrap();
        assert!((p.mixed_moment_rate() - (6.0 - 2.0 / 9.0)).abs() < 1e-12);
        assert_eq!(p.first_moment_rate(), 3.0);
    }
}
