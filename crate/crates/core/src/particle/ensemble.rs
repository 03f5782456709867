use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::init::{PairSampler, StateSampler};
use super::process::{check_particles, check_schedule, JumpProcess};
use crate::error::{Error, Result};
use crate::kinetic::{KacParams, MomentRecord, ThermostatSpec};

/// Replicas per work unit. Units are reduced in a fixed order, so results do
/// not depend on the number of threads.
const CHUNK: usize = 64;

/// Above this particle count only the diagonal of `E v_k v_l` is tracked.
pub const FULL_SECOND_MOMENTS_MAX_N: usize = 64;

/// Generator of replica `r`: the master seed selects the key, `r` the
/// stream.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

#[derive(Debug, Clone, Copy, Default)]
struct Stat {
    sum: f64,
    sumsq: f64,
}

impl Stat {
    #[inline]
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sumsq += x * x;
    }

    fn merge(&mut self, o: &Stat) {
        self.sum += o.sum;
        self.sumsq += o.sumsq;
    }

    fn mean_stderr(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let mean = self.sum / nf;
        if n < 2 {
            return (mean, 0.0);
        }
        let var = ((self.sumsq - self.sum * mean) / (nf - 1.0)).max(0.0);
        (mean, (var / nf).sqrt())
    }
}

#[derive(Debug, Clone)]
struct MomentAcc {
    n: usize,
    full: bool,
    energy: Stat,
    first: Vec<Stat>,
    // upper triangle (k <= l) row by row, or the diagonal only
    second: Vec<Stat>,
    mean_first: Stat,
    mean_mixed: Stat,
    charfun: Vec<Complex64>,
}

impl MomentAcc {
    fn new(particles: usize, probes: usize) -> Self {
        let full = particles <= FULL_SECOND_MOMENTS_MAX_N;
        let second = if full { particles * (particles + 1) / 2 } else { particles };
        MomentAcc {
            n: 0,
            full,
            energy: Stat::default(),
            first: vec![Stat::default(); particles],
            second: vec![Stat::default(); second],
            mean_first: Stat::default(),
            mean_mixed: Stat::default(),
            charfun: vec![Complex64::new(0.0, 0.0); probes],
        }
    }

    fn push(&mut self, v: &[f64], probes: &[Vec<f64>]) {
        let n = v.len();
        self.n += 1;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (k, &x) in v.iter().enumerate() {
            s1 += x;
            s2 += x * x;
            self.first[k].push(x);
        }
        self.energy.push(s2);
        if self.full {
            let mut idx = 0;
            for k in 0..n {
                for l in k..n {
                    self.second[idx].push(v[k] * v[l]);
                    idx += 1;
                }
            }
        } else {
            for (k, &x) in v.iter().enumerate() {
                self.second[k].push(x * x);
            }
        }
        self.mean_first.push(s1 / n as f64);
        if n > 1 {
            self.mean_mixed.push((s1 * s1 - s2) / (n * (n - 1)) as f64);
        }
        for (acc, xi) in self.charfun.iter_mut().zip(probes) {
            let dot: f64 = v.iter().zip(xi).map(|(a, b)| a * b).sum();
            *acc += Complex64::from_polar(1.0, -dot);
        }
    }

    fn merge(&mut self, o: &MomentAcc) {
        self.n += o.n;
        self.energy.merge(&o.energy);
        for (a, b) in self.first.iter_mut().zip(&o.first) {
            a.merge(b);
        }
        for (a, b) in self.second.iter_mut().zip(&o.second) {
            a.merge(b);
        }
        self.mean_first.merge(&o.mean_first);
        self.mean_mixed.merge(&o.mean_mixed);
        for (a, b) in self.charfun.iter_mut().zip(&o.charfun) {
            *a += b;
        }
    }

    fn record(&self, time: f64) -> MomentRecord {
        let n = self.first.len();
        let m = self.n;
        let (energy, energy_stderr) = self.energy.mean_stderr(m);
        let (first_moments, first_stderr): (Vec<f64>, Vec<f64>) = self.first.iter().map(|s| s.mean_stderr(m)).unzip();
        let (second_moments, second_stderr) = if self.full {
            let mut mean = vec![vec![0.0; n]; n];
            let mut se = vec![vec![0.0; n]; n];
            let mut idx = 0;
            for k in 0..n {
                for l in k..n {
                    let (a, b) = self.second[idx].mean_stderr(m);
                    mean[k][l] = a;
                    mean[l][k] = a;
                    se[k][l] = b;
                    se[l][k] = b;
                    idx += 1;
                }
            }
            (mean, se)
        } else {
            let (d, s): (Vec<f64>, Vec<f64>) = self.second.iter().map(|s| s.mean_stderr(m)).unzip();
            (vec![d], vec![s])
        };
        let (mean_first, mean_first_stderr) = self.mean_first.mean_stderr(m);
        let (mean_mixed, mean_mixed_stderr) = if n > 1 { self.mean_mixed.mean_stderr(m) } else { (0.0, 0.0) };
        MomentRecord {
            time,
            energy,
            energy_stderr,
            first_moments,
            first_stderr,
            second_moments,
            second_stderr,
            mean_first,
            mean_first_stderr,
            mean_mixed,
            mean_mixed_stderr,
            replicas: m,
        }
    }
}

/// Replica count, master seed, time grid and charfun probes of an ensemble
/// run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub replicas: usize,
    pub seed: u64,
    pub t_end: f64,
    pub record_times: Vec<f64>,
    pub probes: Vec<Vec<f64>>,
}

impl EnsembleConfig {
    pub fn new(replicas: usize, seed: u64, record_times: Vec<f64>) -> Self {
        let t_end = record_times.last().copied().unwrap_or(0.0);
        EnsembleConfig {
            replicas,
            seed,
            t_end,
            record_times,
            probes: Vec::new(),
        }
    }

    pub fn with_probes(mut self, probes: Vec<Vec<f64>>) -> Self {
        self.probes = probes;
        self
    }

    fn validate(&self, params: &KacParams) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::invalid("replicas", "must be at least 1"));
        }
        check_schedule(self.t_end, &self.record_times)?;
        for p in &self.probes {
            if p.len() != params.n_particles() {
                return Err(Error::DimensionMismatch {
                    left: p.len(),
                    right: params.n_particles(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("probes", "non-finite probe"));
            }
        }
        Ok(())
    }

    fn chunks(&self) -> Vec<(u64, u64)> {
        (0..self.replicas)
            .step_by(CHUNK)
            .map(|s| (s as u64, (s + CHUNK).min(self.replicas) as u64))
            .collect()
    }
}

/// Moments and empirical characteristic functions along an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub records: Vec<MomentRecord>,
    pub probes: Vec<Vec<f64>>,
    /// `charfun[t][p]`: empirical `F̂` at probe `p` and record time `t`.
    pub charfun: Vec<Vec<Complex64>>,
    pub replicas: usize,
    pub seed: u64,
    pub events: u64,
}

impl EnsembleSummary {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }

    /// One row per record time: energy, `d_k`, the particle-averaged first
    /// and mixed moments (each with its standard error), then the probes.
    pub fn to_csv(&self) -> String {
        let n = self.records.first().map_or(0, |r| r.n_particles());
        let mut out = String::from("time,energy_mean,energy_stderr");
        for k in 1..=n {
            let _ = write!(out, ",d{k}_mean,d{k}_stderr");
        }
        out.push_str(",mean_first,mean_first_stderr,mean_mixed,mean_mixed_stderr");
        for p in 0..self.probes.len() {
            let _ = write!(out, ",charfun{p}_re,charfun{p}_im");
        }
        out.push('\n');
        for (r, cf) in self.records.iter().zip(&self.charfun) {
            let _ = write!(out, "{},{},{}", r.time, r.energy, r.energy_stderr);
            for k in 0..n {
                let _ = write!(out, ",{},{}", r.first_moments[k], r.first_stderr[k]);
            }
            let _ = write!(
                out,
                ",{},{},{},{}",
                r.mean_first, r.mean_first_stderr, r.mean_mixed, r.mean_mixed_stderr
            );
            for z in cf {
                let _ = write!(out, ",{},{}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_ensemble(
    params: &KacParams,
    g: &ThermostatSpec,
    init: &dyn StateSampler,
    cfg: &EnsembleConfig,
) -> Result<EnsembleSummary> {
    cfg.validate(params)?;
    check_particles(params, init.n_particles())?;
    let n = params.n_particles();
    let process = JumpProcess::new(*params, *g);
    let times = &cfg.record_times;
    let parts: Vec<(Vec<MomentAcc>, u64)> = cfg
        .chunks()
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut accs = vec![MomentAcc::new(n, cfg.probes.len()); times.len()];
            let mut v = vec![0.0; n];
            let mut events = 0u64;
            for r in lo..hi {
                let mut rng = replica_rng(cfg.seed, r);
                init.sample(&mut rng, &mut v);
                events += process.run(&mut v, cfg.t_end, times, &mut rng, |k, s| accs[k].push(s, &cfg.probes)) as u64;
            }
            (accs, events)
        })
        .collect();
    let mut total = vec![MomentAcc::new(n, cfg.probes.len()); times.len()];
    let mut events = 0;
    for (accs, e) in &parts {
        for (a, b) in total.iter_mut().zip(accs) {
            a.merge(b);
        }
        events += e;
    }
    let m = cfg.replicas as f64;
    Ok(EnsembleSummary {
        records: total.iter().zip(times).map(|(a, &t)| a.record(t)).collect(),
        probes: cfg.probes.clone(),
        charfun: total.iter().map(|a| a.charfun.iter().map(|z| z / m).collect()).collect(),
        replicas: cfg.replicas,
        seed: cfg.seed,
        events,
    })
}

/// States of every replica at time `t`.
pub fn sample_states(
    params: &KacParams,
    g: &ThermostatSpec,
    init: &dyn StateSampler,
    replicas: usize,
    seed: u64,
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    let cfg = EnsembleConfig::new(replicas, seed, vec![t]);
    cfg.validate(params)?;
    check_particles(params, init.n_particles())?;
    let n = params.n_particles();
    let process = JumpProcess::new(*params, *g);
    let parts: Vec<Vec<Vec<f64>>> = cfg
        .chunks()
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut out = Vec::with_capacity((hi - lo) as usize);
            let mut v = vec![0.0; n];
            for r in lo..hi {
                let mut rng = replica_rng(seed, r);
                init.sample(&mut rng, &mut v);
                process.run(&mut v, t, &[t], &mut rng, |_, s| out.push(s.to_vec()));
            }
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Mean of `Σ_i Δ_i²` over replicas of the synchronously coupled process.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTrajectory {
    pub times: Vec<f64>,
    pub delta_sq_mean: Vec<f64>,
    pub delta_sq_stderr: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
}

impl CoupledTrajectory {
    /// `sqrt(E Σ Δ²)`, an upper bound on the W2 distance of the two laws.
    pub fn w2_upper_bound(&self) -> Vec<f64> {
        self.delta_sq_mean.iter().map(|x| x.sqrt()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,delta_sq_mean,delta_sq_stderr,w2_upper_bound\n");
        for k in 0..self.times.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.times[k],
                self.delta_sq_mean[k],
                self.delta_sq_stderr[k],
                self.delta_sq_mean[k].sqrt()
            );
        }
        out
    }
}

pub fn run_coupled(
    params: &KacParams,
    g: &ThermostatSpec,
    init: &dyn PairSampler,
    cfg: &EnsembleConfig,
) -> Result<CoupledTrajectory> {
    cfg.validate(params)?;
    check_particles(params, init.n_particles())?;
    let n = params.n_particles();
    let process = JumpProcess::new(*params, *g);
    let times = &cfg.record_times;
    let parts: Vec<Vec<Stat>> = cfg
        .chunks()
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut stats = vec![Stat::default(); times.len()];
            let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
            for r in lo..hi {
                let mut rng = replica_rng(cfg.seed, r);
                init.sample(&mut rng, &mut a, &mut b);
                process.run_coupled(&mut a, &mut b, cfg.t_end, times, &mut rng, |k, x, y| {
                    stats[k].push(x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum());
                });
            }
            stats
        })
        .collect();
    let mut total = vec![Stat::default(); times.len()];
    for stats in &parts {
        for (a, b) in total.iter_mut().zip(stats) {
            a.merge(b);
        }
    }
    let (delta_sq_mean, delta_sq_stderr) = total.iter().map(|s| s.mean_stderr(cfg.replicas)).unzip();
    Ok(CoupledTrajectory {
        times: times.clone(),
        delta_sq_mean,
        delta_sq_stderr,
        replicas: cfg.replicas,
        seed: cfg.seed,
    })
}

/// Sample moments of an ensemble of states.
pub fn estimate_moments(time: f64, states: &[Vec<f64>]) -> Result<MomentRecord> {
    let first = states.first().ok_or(Error::Empty)?;
    let n = first.len();
    let mut acc = MomentAcc::new(n, 0);
    for s in states {
        if s.len() != n {
            return Err(Error::DimensionMismatch { left: s.len(), right: n });
        }
        acc.push(s, &[]);
    }
    Ok(acc.record(time))
}

/// `(1/M) Σ_m exp(-i v_m·ξ)`.
pub fn empirical_charfun(states: &[Vec<f64>], xi: &[f64]) -> Result<Complex64> {
    if states.is_empty() {
        return Err(Error::Empty);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for s in states {
        if s.len() != xi.len() {
            return Err(Error::DimensionMismatch {
                left: s.len(),
                right: xi.len(),
            });
        }
        let dot: f64 = s.iter().zip(xi).map(|(a, b)| a * b).sum();
        acc += Complex64::from_polar(1.0, -dot);
    }
    Ok(acc / states.len() as f64)
}
