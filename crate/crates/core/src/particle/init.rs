use rand::RngCore;

use crate::error::{Error, Result};
use crate::fourier::GridSampler;
use crate::kinetic::Law1d;

/// Source of initial N-particle states.
pub trait StateSampler: Sync {
    fn n_particles(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore, out: &mut [f64]);
}

/// Source of initial state pairs for the coupled process.
pub trait PairSampler: Sync {
    fn n_particles(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore, a: &mut [f64], b: &mut [f64]);
}

/// Independent coordinates, `law_k` for particle `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductLaw {
    laws: Vec<Law1d>,
}

impl ProductLaw {
    pub fn new(laws: Vec<Law1d>) -> Result<Self> {
        if laws.is_empty() {
            return Err(Error::Empty);
        }
        Ok(ProductLaw { laws })
    }

    /// `law^{⊗n}`.
    pub fn tensor(law: Law1d, n: usize) -> Result<Self> {
        Self::new(vec![law; n])
    }

    pub fn laws(&self) -> &[Law1d] {
        &self.laws
    }
}

impl StateSampler for ProductLaw {
    fn n_particles(&self) -> usize {
        self.laws.len()
    }

    fn sample(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for (x, law) in out.iter_mut().zip(&self.laws) {
            *x = law.sample(rng);
        }
    }
}

/// Deterministic initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedState(pub Vec<f64>);

impl StateSampler for FixedState {
    fn n_particles(&self) -> usize {
        self.0.len()
    }

    fn sample(&self, _rng: &mut dyn RngCore, out: &mut [f64]) {
        out.copy_from_slice(&self.0);
    }
}

impl StateSampler for GridSampler {
    fn n_particles(&self) -> usize {
        self.dim()
    }

    fn sample(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        GridSampler::sample(self, rng, out)
    }
}

/// Both copies drawn independently.
pub struct IndependentPair<A, B> {
    pub first: A,
    pub second: B,
}

impl<A: StateSampler, B: StateSampler> IndependentPair<A, B> {
    pub fn new(first: A, second: B) -> Result<Self> {
        if first.n_particles() != second.n_particles() {
            return Err(Error::DimensionMismatch {
                left: first.n_particles(),
                right: second.n_particles(),
            });
        }
        Ok(IndependentPair { first, second })
    }
}

impl<A: StateSampler, B: StateSampler> PairSampler for IndependentPair<A, B> {
    fn n_particles(&self) -> usize {
        self.first.n_particles()
    }

    fn sample(&self, rng: &mut dyn RngCore, a: &mut [f64], b: &mut [f64]) {
        self.first.sample(rng, a);
        self.second.sample(rng, b);
    }
}

/// Both copies start from the same draw.
pub struct SamePair<A>(pub A);

impl<A: StateSampler> PairSampler for SamePair<A> {
    fn n_particles(&self) -> usize {
        self.0.n_particles()
    }

    fn sample(&self, rng: &mut dyn RngCore, a: &mut [f64], b: &mut [f64]) {
        self.0.sample(rng, a);
        b.copy_from_slice(a);
    }
}
