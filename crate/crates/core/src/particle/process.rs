use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::init::{PairSampler, StateSampler};
use crate::error::{Error, Result};
use crate::kinetic::{pair_collision, thermostat_collision, KacParams, ThermostatSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// Rotation of particles `i < j` by `theta`.
    Pair { i: usize, j: usize, theta: f64 },
    /// Collision of particle `j` with reservoir velocity `w`.
    Thermostat { j: usize, w: f64, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub kind: EventKind,
}

impl JumpEvent {
    #[inline]
    pub fn apply(&self, v: &mut [f64]) {
        match self.kind {
            EventKind::Pair { i, j, theta } => {
                let (a, b) = pair_collision(v[i], v[j], theta);
                v[i] = a;
                v[j] = b;
            }
            EventKind::Thermostat { j, w, theta } => {
                v[j] = thermostat_collision(v[j], w, theta).0;
            }
        }
    }
}

/// Gillespie sampler of the jump times and marks: pair channel at total
/// rate `λN` with the pair uniform among `C(N,2)`, thermostat channel at
/// total rate `μN` with the particle uniform, `θ` uniform on `[0, 2π)` and
/// `w ~ g`.
#[derive(Debug, Clone, Copy)]
pub struct JumpProcess {
    params: KacParams,
    g: ThermostatSpec,
}

impl JumpProcess {
    pub fn new(params: KacParams, g: ThermostatSpec) -> Self {
        JumpProcess { params, g }
    }

    pub fn params(&self) -> &KacParams {
        &self.params
    }

    /// Next event after time `t`, or `None` when no channel is active.
    pub fn next_event<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Option<JumpEvent> {
        let total = self.params.total_rate();
        if total <= 0.0 {
            return None;
        }
        let wait: f64 = Exp1.sample(rng);
        let time = t + wait / total;
        let n = self.params.n_particles();
        let pair = rng.gen::<f64>() * total < self.params.pair_rate();
        let kind = if pair {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let theta = rng.gen::<f64>() * TAU;
            EventKind::Pair {
                i: i.min(j),
                j: i.max(j),
                theta,
            }
        } else {
            let j = rng.gen_range(0..n);
            let theta = rng.gen::<f64>() * TAU;
            let w = self.g.sample(rng);
            EventKind::Thermostat { j, w, theta }
        };
        Some(JumpEvent { time, kind })
    }

    /// Runs one path from `v` (updated in place), calling `record(k, v)` at
    /// every `record_times[k]`. Returns the number of events.
    pub fn run<R, F>(&self, v: &mut [f64], t_end: f64, record_times: &[f64], rng: &mut R, mut record: F) -> usize
    where
        R: Rng + ?Sized,
        F: FnMut(usize, &[f64]),
    {
        let mut t = 0.0;
        let mut k = 0;
        let mut events = 0;
        loop {
            let next = self.next_event(t, rng);
            let horizon = next.map_or(f64::INFINITY, |e| e.time);
            while k < record_times.len() && record_times[k] < horizon {
                record(k, v);
                k += 1;
            }
            match next {
                Some(e) if e.time <= t_end => {
                    e.apply(v);
                    t = e.time;
                    events += 1;
                }
                _ => return events,
            }
        }
    }

    /// Two copies driven by the same events (synchronous coupling).
    pub fn run_coupled<R, F>(
        &self,
        a: &mut [f64],
        b: &mut [f64],
        t_end: f64,
        record_times: &[f64],
        rng: &mut R,
        mut record: F,
    ) -> usize
    where
        R: Rng + ?Sized,
        F: FnMut(usize, &[f64], &[f64]),
    {
        let mut t = 0.0;
        let mut k = 0;
        let mut events = 0;
        loop {
            let next = self.next_event(t, rng);
            let horizon = next.map_or(f64::INFINITY, |e| e.time);
            while k < record_times.len() && record_times[k] < horizon {
                record(k, a, b);
                k += 1;
            }
            match next {
                Some(e) if e.time <= t_end => {
                    e.apply(a);
                    e.apply(b);
                    t = e.time;
                    events += 1;
                }
                _ => return events,
            }
        }
    }
}

pub(crate) fn check_schedule(t_end: f64, record_times: &[f64]) -> Result<()> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::invalid("t_end", format!("must be finite and >= 0, got {t_end}")));
    }
    let mut prev = f64::NEG_INFINITY;
    for &t in record_times {
        if !(t.is_finite() && t >= 0.0 && t > prev) {
            return Err(Error::invalid("record_times", "must be finite, >= 0 and strictly increasing"));
        }
        prev = t;
    }
    if prev > t_end {
        return Err(Error::invalid(
            "record_times",
            format!("last record time {prev} exceeds t_end {t_end}"),
        ));
    }
    Ok(())
}

pub(crate) fn check_particles(params: &KacParams, n: usize) -> Result<()> {
    if n != params.n_particles() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: params.n_particles(),
        });
    }
    Ok(())
}

/// States of one path at the record times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub events: usize,
}

pub fn simulate<R: Rng>(
    params: &KacParams,
    g: &ThermostatSpec,
    init: &dyn StateSampler,
    t_end: f64,
    record_times: &[f64],
    rng: &mut R,
) -> Result<Trajectory> {
    check_schedule(t_end, record_times)?;
    check_particles(params, init.n_particles())?;
    let mut v = vec![0.0; params.n_particles()];
    init.sample(rng, &mut v);
    let mut states = Vec::with_capacity(record_times.len());
    let events = JumpProcess::new(*params, *g).run(&mut v, t_end, record_times, rng, |_, s| states.push(s.to_vec()));
    Ok(Trajectory {
        times: record_times.to_vec(),
        states,
        events,
    })
}

/// Paths of both copies of a synchronously coupled pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPath {
    pub times: Vec<f64>,
    pub first: Vec<Vec<f64>>,
    pub second: Vec<Vec<f64>>,
}

impl CoupledPath {
    /// `Σ_i (V_i - V'_i)²` at each record time.
    pub fn delta_sq(&self) -> Vec<f64> {
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
            .collect()
    }
}

pub fn simulate_coupled<R: Rng>(
    params: &KacParams,
    g: &ThermostatSpec,
    init: &dyn PairSampler,
    t_end: f64,
    record_times: &[f64],
    rng: &mut R,
) -> Result<CoupledPath> {
    check_schedule(t_end, record_times)?;
    check_particles(params, init.n_particles())?;
    let n = params.n_particles();
    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
    init.sample(rng, &mut a, &mut b);
    let mut first = Vec::new();
    let mut second = Vec::new();
    JumpProcess::new(*params, *g).run_coupled(&mut a, &mut b, t_end, record_times, rng, |_, x, y| {
        first.push(x.to_vec());
        second.push(y.to_vec());
    });
    Ok(CoupledPath {
        times: record_times.to_vec(),
        first,
        second,
    })
}
