use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{moments_from_grid, CharFunGrid};
use crate::kinetic::Law1d;
use crate::particle::empirical_charfun;

/// Analytic N-dimensional laws built from one-dimensional closed forms.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// Independent coordinates.
    Product(Vec<Law1d>),
    /// Convex combination; weights are positive and sum to 1.
    Mixture(Vec<(f64, ClosedForm)>),
}

impl ClosedForm {
    pub fn tensor(law: Law1d, n: usize) -> Self {
        ClosedForm::Product(vec![law; n])
    }

    pub fn mixture(parts: Vec<(f64, ClosedForm)>) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty)?;
        let dim = first.1.dim();
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if parts.iter().any(|p| !(p.0 > 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("mixture.weights", "must be positive and sum to 1"));
        }
        if let Some(p) = parts.iter().find(|p| p.1.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: p.1.dim(),
                right: dim,
            });
        }
        Ok(ClosedForm::Mixture(parts))
    }

    pub fn dim(&self) -> usize {
        match self {
            ClosedForm::Product(laws) => laws.len(),
            ClosedForm::Mixture(parts) => parts[0].1.dim(),
        }
    }

    pub fn charfun(&self, xi: &[f64]) -> Complex64 {
        match self {
            ClosedForm::Product(laws) => laws.iter().zip(xi).map(|(l, &x)| l.charfun(x)).product(),
            ClosedForm::Mixture(parts) => parts.iter().map(|(w, c)| c.charfun(xi) * *w).sum(),
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        match self {
            ClosedForm::Product(laws) => laws.iter().map(|l| l.mean()).collect(),
            ClosedForm::Mixture(parts) => {
                let mut m = vec![0.0; self.dim()];
                for (w, c) in parts {
                    for (a, b) in m.iter_mut().zip(c.mean()) {
                        *a += w * b;
                    }
                }
                m
            }
        }
    }

    /// Law of the first `k` coordinates.
    pub fn marginal(&self, k: usize) -> Self {
        match self {
            ClosedForm::Product(laws) => ClosedForm::Product(laws[..k].to_vec()),
            ClosedForm::Mixture(parts) => ClosedForm::Mixture(parts.iter().map(|(w, c)| (*w, c.marginal(k))).collect()),
        }
    }
}

/// A characteristic function that the distances can probe.
#[derive(Debug, Clone)]
pub enum CharFunSource {
    Grid(CharFunGrid),
    ClosedForm(ClosedForm),
    /// Monte Carlo estimate from an ensemble of states.
    Empirical(Arc<Vec<Vec<f64>>>),
}

impl CharFunSource {
    pub fn empirical(states: Vec<Vec<f64>>) -> Result<Self> {
        let dim = states.first().ok_or(Error::Empty)?.len();
        if let Some(s) = states.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch {
                left: s.len(),
                right: dim,
            });
        }
        Ok(CharFunSource::Empirical(Arc::new(states)))
    }

    pub fn dim(&self) -> usize {
        match self {
            CharFunSource::Grid(g) => g.dim(),
            CharFunSource::ClosedForm(c) => c.dim(),
            CharFunSource::Empirical(s) => s[0].len(),
        }
    }

    pub fn value(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: xi.len(),
                right: self.dim(),
            });
        }
        match self {
            CharFunSource::Grid(g) => g.eval(xi),
            CharFunSource::ClosedForm(c) => Ok(c.charfun(xi)),
            CharFunSource::Empirical(s) => empirical_charfun(s, xi),
        }
    }

    /// Mean vector: stencils at the origin for grids, exact for closed
    /// forms, the sample mean for ensembles.
    pub fn mean(&self) -> Result<Vec<f64>> {
        match self {
            CharFunSource::Grid(g) => Ok(moments_from_grid(g)?.mean),
            CharFunSource::ClosedForm(c) => Ok(c.mean()),
            CharFunSource::Empirical(s) => {
                let m = s.len() as f64;
                let mut mean = vec![0.0; self.dim()];
                for v in s.iter() {
                    for (a, b) in mean.iter_mut().zip(v) {
                        *a += b / m;
                    }
                }
                Ok(mean)
            }
        }
    }

    /// Radius of the ball on which the source is defined.
    pub fn domain_radius(&self) -> f64 {
        match self {
            CharFunSource::Grid(g) => g.radius(),
            _ => f64::INFINITY,
        }
    }

    /// Smallest probe radius at which the source is trusted: `M^{-1/4}` for
    /// an ensemble of `M` states, 0 otherwise.
    pub fn probe_floor(&self) -> f64 {
        match self {
            CharFunSource::Empirical(s) => (s.len() as f64).powf(-0.25),
            _ => 0.0,
        }
    }

    /// Characteristic function of the first `k` coordinates, the restriction
    /// to `ξ_{k+1} = … = ξ_N = 0`.
    pub fn marginal(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                dim: self.dim(),
            });
        }
        Ok(match self {
            CharFunSource::Grid(g) => CharFunSource::Grid(g.restrict(k)?),
            CharFunSource::ClosedForm(c) => CharFunSource::ClosedForm(c.marginal(k)),
            CharFunSource::Empirical(s) => CharFunSource::Empirical(Arc::new(s.iter().map(|v| v[..k].to_vec()).collect())),
        })
    }
}

/// `marginal_charfun(f, k)`.
pub fn marginal_charfun(f: &CharFunSource, k: usize) -> Result<CharFunSource> {
    f.marginal(k)
}

/// The pair `½(φ(v₁)φ(-v₂) + φ(-v₁)φ(v₂))`, `½(φ(v₁)φ(v₂) + φ(-v₁)φ(-v₂))`:
/// equal one-particle marginals, different two-particle laws whenever `φ`
/// is not even.
pub fn counterexample_pair(phi: Law1d) -> (ClosedForm, ClosedForm) {
    let r = phi.reflected();
    let f = ClosedForm::Mixture(vec![
        (0.5, ClosedForm::Product(vec![phi, r])),
        (0.5, ClosedForm::Product(vec![r, phi])),
    ]);
    let g = ClosedForm::Mixture(vec![
        (0.5, ClosedForm::Product(vec![phi, phi])),
        (0.5, ClosedForm::Product(vec![r, r])),
    ]);
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::ThermostatSpec;

    fn phi() -> Law1d {
        Law1d::centred(ThermostatSpec::two_point(2.0, -1.0).unwrap())
    }

    #[test]
    fn normalization_and_means() {
        let (f, g) = counterexample_pair(phi());
        for c in [&f, &g] {
            assert_eq!(c.charfun(&[0.0, 0.0]), Complex64::new(1.0, 0.0));
            assert!(c.mean().iter().all(|m| m.abs() < 1e-15));
        }
        let shifted = ClosedForm::tensor(Law1d::dirac(0.5), 3);
        assert_eq!(shifted.mean(), vec![0.5; 3]);
    }

    #[test]
    fn counterexample_marginals_agree() {
        let (f, g) = counterexample_pair(phi());
        for x in [-3.0, -0.4, 0.7, 2.2] {
            assert!((f.marginal(1).charfun(&[x]) - g.marginal(1).charfun(&[x])).norm() < 1e-15);
        }
        assert!((f.charfun(&[1.0, 1.0]) - g.charfun(&[1.0, 1.0])).norm() > 0.01);
    }

    #[test]
    fn mixture_validation() {
        let p = ClosedForm::tensor(phi(), 2);
        assert!(ClosedForm::mixture(vec![(0.5, p.clone()), (0.6, p.clone())]).is_err());
        assert!(ClosedForm::mixture(vec![(0.5, p.clone()), (0.5, ClosedForm::tensor(phi(), 3))]).is_err());
        assert!(ClosedForm::mixture(vec![]).is_err());
        assert!(ClosedForm::mixture(vec![(1.0, p)]).is_ok());
    }

    #[test]
    fn empirical_source() {
        let s = CharFunSource::empirical(vec![vec![1.0, 2.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(s.mean().unwrap(), vec![2.0, 1.0]);
        assert_eq!(s.marginal(1).unwrap().mean().unwrap(), vec![2.0]);
        assert!((s.probe_floor() - 2f64.powf(-0.25)).abs() < 1e-15);
        assert!(s.marginal(3).is_err());
        assert!(CharFunSource::empirical(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn grid_source_matches_closed_form() {
        let law = Law1d::centred(ThermostatSpec::gaussian(1.0).unwrap());
        let c = ClosedForm::tensor(law, 2);
        let grid = CharFunGrid::from_fn(2, 6.0, 65, |xi| c.charfun(xi)).unwrap();
        let g = CharFunSource::Grid(grid);
        let z = g.value(&[0.33, -1.1]).unwrap();
        assert!((z - c.charfun(&[0.33, -1.1])).norm() < 1e-4);
        assert!(g.value(&[0.1]).is_err());
        assert!(g.value(&[7.0, 0.0]).is_err());
    }
}
