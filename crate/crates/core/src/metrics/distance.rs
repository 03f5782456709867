use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::probes::ProbeSet;
use super::source::CharFunSource;
use crate::error::{Error, Result};
use crate::smooth::smooth_step_down;

/// Mean mismatch above which the GTW distance is refused.
pub const MEAN_TOLERANCE: f64 = 1e-6;

/// Value of a Fourier distance with the probe that attains it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricValue {
    pub metric: String,
    pub value: f64,
    pub argmax: Vec<f64>,
    /// Probes closer to the origin than this were skipped.
    pub probe_floor: f64,
    pub probes_used: usize,
    pub tolerance: f64,
}

impl MetricValue {
    pub const CSV_HEADER: &'static str = "metric,value,argmax,probe_floor,probes_used,tolerance";

    /// CSV row; the argmax coordinates are separated by `;`.
    pub fn csv_row(&self) -> String {
        let arg: Vec<String> = self.argmax.iter().map(|x| x.to_string()).collect();
        format!(
            "{},{},{},{},{},{}",
            self.metric,
            self.value,
            arg.join(";"),
            self.probe_floor,
            self.probes_used,
            self.tolerance
        )
    }
}

/// Smooth radial cutoff: 1 on `|ξ| <= r/2`, 0 on `|ξ| >= r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionKernel {
    cutoff_radius: f64,
}

impl CorrectionKernel {
    pub fn new(cutoff_radius: f64) -> Result<Self> {
        if !(cutoff_radius > 0.0) || cutoff_radius.is_nan() {
            return Err(Error::invalid("chi.cutoff_radius", "must be positive"));
        }
        Ok(CorrectionKernel { cutoff_radius })
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.cutoff_radius
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        smooth_step_down(2.0 * r / self.cutoff_radius - 1.0)
    }
}

fn check_dims(f: &CharFunSource, h: &CharFunSource, probes: &ProbeSet) -> Result<()> {
    if f.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: f.dim(),
            right: h.dim(),
        });
    }
    if probes.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: probes.dim(),
            right: f.dim(),
        });
    }
    Ok(())
}

// max over probes of |numerator(ξ)| / |ξ|^power
fn sup_ratio<N>(
    name: &str,
    f: &CharFunSource,
    h: &CharFunSource,
    probes: &ProbeSet,
    power: f64,
    tolerance: f64,
    numerator: N,
) -> Result<MetricValue>
where
    N: Fn(&[f64], Complex64, Complex64) -> Complex64 + Sync,
{
    check_dims(f, h, probes)?;
    let floor = f.probe_floor().max(h.probe_floor());
    let used: Vec<&Vec<f64>> = probes
        .points()
        .iter()
        .filter(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt() >= floor)
        .collect();
    if used.is_empty() {
        return Err(Error::Empty);
    }
    let ratios: Vec<f64> = used
        .par_iter()
        .map(|xi| {
            let a = f.value(xi)?;
            let b = h.value(xi)?;
            let n2: f64 = xi.iter().map(|x| x * x).sum();
            Ok(numerator(xi, a, b).norm() / n2.powf(power / 2.0))
        })
        .collect::<Result<_>>()?;
    let (best, value) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
    Ok(MetricValue {
        metric: name.to_string(),
        value,
        argmax: used[best].clone(),
        probe_floor: floor,
        probes_used: used.len(),
        tolerance,
    })
}

fn mean_gap(f: &CharFunSource, h: &CharFunSource) -> Result<Vec<f64>> {
    let (a, b) = (f.mean()?, h.mean()?);
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// `sup |f̂ - ĥ| / |ξ|²`, refusing sources whose means differ by more than
/// `MEAN_TOLERANCE`.
pub fn gtw_distance(f: &CharFunSource, h: &CharFunSource, probes: &ProbeSet) -> Result<MetricValue> {
    gtw_distance_with_tolerance(f, h, probes, MEAN_TOLERANCE)
}

/// As `gtw_distance` with an explicit mean tolerance (for Monte Carlo
/// sources, whose means only agree to within sampling error).
pub fn gtw_distance_with_tolerance(
    f: &CharFunSource,
    h: &CharFunSource,
    probes: &ProbeSet,
    tolerance: f64,
) -> Result<MetricValue> {
    check_dims(f, h, probes)?;
    let gap = mean_gap(f, h)?.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(gap <= tolerance) {
        return Err(Error::MeanMismatch { gap, tolerance });
    }
    sup_ratio("gtw", f, h, probes, 2.0, tolerance, |_, a, b| a - b)
}

/// `sup |f̂ - ĥ| / |ξ|`.
pub fn t1_distance(f: &CharFunSource, h: &CharFunSource, probes: &ProbeSet) -> Result<MetricValue> {
    sup_ratio("t1", f, h, probes, 1.0, 0.0, |_, a, b| a - b)
}

/// `sup |f̂ - ĥ + i χ(ξ) Σ_k (m_k^f - m_k^h) ξ_k| / |ξ|²`.
pub fn corrected_gtw(f: &CharFunSource, h: &CharFunSource, chi: &CorrectionKernel, probes: &ProbeSet) -> Result<MetricValue> {
    check_dims(f, h, probes)?;
    let dm = mean_gap(f, h)?;
    sup_ratio("corrected_gtw", f, h, probes, 2.0, 0.0, |xi, a, b| {
        let lin: f64 = dm.iter().zip(xi).map(|(m, x)| m * x).sum();
        a - b + Complex64::new(0.0, chi.value(xi) * lin)
    })
}
