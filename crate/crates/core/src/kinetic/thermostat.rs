use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form reservoir laws. All are centred; `TwoPoint` picks its weight so
/// that `p a + (1 - p) b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThermostatKind {
    Gaussian { sigma: f64 },
    Uniform { half_width: f64 },
    Rademacher { scale: f64 },
    TwoPoint { a: f64, b: f64 },
    DiracZero,
}

/// Validated reservoir law `g` with its first moments cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThermostatKind", into = "ThermostatKind")]
pub struct ThermostatSpec {
    kind: ThermostatKind,
    /// Weight of the atom at `a` for `TwoPoint`, unused otherwise.
    p: f64,
    second_moment: f64,
    fourth_moment: f64,
}

impl From<ThermostatSpec> for ThermostatKind {
    fn from(s: ThermostatSpec) -> Self {
        s.kind
    }
}

impl TryFrom<ThermostatKind> for ThermostatSpec {
    type Error = Error;
    fn try_from(kind: ThermostatKind) -> Result<Self> {
        ThermostatSpec::new(kind)
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {x}")))
    }
}

impl ThermostatSpec {
    pub fn new(kind: ThermostatKind) -> Result<Self> {
        let (p, m2, m4) = match kind {
            ThermostatKind::Gaussian { sigma } => {
                positive("thermostat.sigma", sigma)?;
                let s2 = sigma * sigma;
                (0.0, s2, 3.0 * s2 * s2)
            }
            ThermostatKind::Uniform { half_width } => {
                positive("thermostat.half_width", half_width)?;
                let a2 = half_width * half_width;
                (0.0, a2 / 3.0, a2 * a2 / 5.0)
            }
            ThermostatKind::Rademacher { scale } => {
                positive("thermostat.scale", scale)?;
                let s2 = scale * scale;
                (0.0, s2, s2 * s2)
            }
            ThermostatKind::TwoPoint { a, b } => {
                if !(a.is_finite() && b.is_finite()) || a * b >= 0.0 {
                    return Err(Error::invalid(
                        "thermostat.a",
                        format!("two-point atoms must be finite, nonzero and of opposite sign, got a={a}, b={b}"),
                    ));
                }
                let p = b / (b - a);
                let m2 = p * a * a + (1.0 - p) * b * b;
                let m4 = p * a.powi(4) + (1.0 - p) * b.powi(4);
                (p, m2, m4)
            }
            ThermostatKind::DiracZero => (0.0, 0.0, 0.0),
        };
        Ok(ThermostatSpec {
            kind,
            p,
            second_moment: m2,
            fourth_moment: m4,
        })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(ThermostatKind::Gaussian { sigma })
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        Self::new(ThermostatKind::Uniform { half_width })
    }

    pub fn rademacher(scale: f64) -> Result<Self> {
        Self::new(ThermostatKind::Rademacher { scale })
    }

    pub fn two_point(a: f64, b: f64) -> Result<Self> {
        Self::new(ThermostatKind::TwoPoint { a, b })
    }

    pub fn dirac_zero() -> Self {
        Self::new(ThermostatKind::DiracZero).expect("dirac is always valid")
    }

    pub fn kind(&self) -> ThermostatKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    /// `K_g`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn fourth_moment(&self) -> Option<f64> {
        Some(self.fourth_moment)
    }

    /// Weight `p` of the atom at `a` (two-point laws only).
    pub fn two_point_weight(&self) -> Option<f64> {
        matches!(self.kind, ThermostatKind::TwoPoint { .. }).then_some(self.p)
    }

    /// `ĝ(ξ) = E exp(-i w ξ)`.
    pub fn charfun(&self, xi: f64) -> Complex64 {
        match self.kind {
            ThermostatKind::Gaussian { sigma } => Complex64::new((-0.5 * sigma * sigma * xi * xi).exp(), 0.0),
            ThermostatKind::Uniform { half_width } => {
                let x = half_width * xi;
                let v = if x.abs() < 1e-4 {
                    1.0 - x * x / 6.0 + x.powi(4) / 120.0
                } else {
                    x.sin() / x
                };
                Complex64::new(v, 0.0)
            }
            ThermostatKind::Rademacher { scale } => Complex64::new((scale * xi).cos(), 0.0),
            ThermostatKind::TwoPoint { a, b } => {
                Complex64::from_polar(self.p, -a * xi) + Complex64::from_polar(1.0 - self.p, -b * xi)
            }
            ThermostatKind::DiracZero => Complex64::new(1.0, 0.0),
        }
    }

    /// One draw from `g`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            ThermostatKind::Gaussian { sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                sigma * z
            }
            ThermostatKind::Uniform { half_width } => half_width * (2.0 * rng.gen::<f64>() - 1.0),
            ThermostatKind::Rademacher { scale } => {
                if rng.gen::<bool>() {
                    scale
                } else {
                    -scale
                }
            }
            ThermostatKind::TwoPoint { a, b } => {
                if rng.gen::<f64>() < self.p {
                    a
                } else {
                    b
                }
            }
            ThermostatKind::DiracZero => 0.0,
        }
    }

    /// The law of `-w`.
    pub fn reflected(&self) -> Self {
        match self.kind {
            ThermostatKind::TwoPoint { a, b } => Self::two_point(-a, -b).expect("reflection keeps validity"),
            _ => *self,
        }
    }

    /// Whether `ĝ` is real (the law is symmetric).
    pub fn is_even(&self) -> bool {
        !matches!(self.kind, ThermostatKind::TwoPoint { .. })
    }
}

/// A one-dimensional law with arbitrary mean: a centred closed-form law
/// translated by `shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Law1d {
    pub base: ThermostatSpec,
    pub shift: f64,
}

impl Law1d {
    pub fn centred(base: ThermostatSpec) -> Self {
        Law1d { base, shift: 0.0 }
    }

    pub fn shifted(base: ThermostatSpec, shift: f64) -> Self {
        Law1d { base, shift }
    }

    /// Point mass at `a`.
    pub fn dirac(a: f64) -> Self {
        Law1d {
            base: ThermostatSpec::dirac_zero(),
            shift: a,
        }
    }

    pub fn mean(&self) -> f64 {
        self.shift
    }

    pub fn second_moment(&self) -> f64 {
        self.base.second_moment() + self.shift * self.shift
    }

    pub fn charfun(&self, xi: f64) -> Complex64 {
        self.base.charfun(xi) * Complex64::from_polar(1.0, -self.shift * xi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.shift + self.base.sample(rng)
    }

    pub fn reflected(&self) -> Self {
        Law1d {
            base: self.base.reflected(),
            shift: -self.shift,
        }
    }
}
