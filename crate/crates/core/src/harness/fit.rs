use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `log|q(t) - q_∞| ≈ a - rate·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window_start: f64,
    pub window_end: f64,
    pub points: usize,
}

/// Straight-line OLS, returning `(slope, intercept, r²)`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::invalid("fit", "need at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::invalid("fit", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok((slope, my - slope * mx, r2))
}

/// Fits the decay rate of `values` towards `asymptote`.
///
/// The window opens at `start` and closes at the first later time where the
/// gap falls below `3 × stderr` (or the gap is not positive). At least three
/// points are required.
pub fn fit_decay_rate(times: &[f64], values: &[f64], stderr: &[f64], asymptote: f64, start: f64) -> Result<RateFit> {
    if times.len() != values.len() || times.len() != stderr.len() {
        return Err(Error::DimensionMismatch {
            left: times.len(),
            right: values.len().min(stderr.len()),
        });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for k in 0..times.len() {
        if times[k] < start {
            continue;
        }
        let gap = (values[k] - asymptote).abs();
        if !(gap > 3.0 * stderr[k]) || gap == 0.0 {
            break;
        }
        x.push(times[k]);
        y.push(gap.ln());
    }
    if x.len() < 3 {
        return Err(Error::invalid(
            "fit",
            format!("only {} points above the noise floor after t = {start}", x.len()),
        ));
    }
    let (slope, intercept, r_squared) = ols(&x, &y)?;
    Ok(RateFit {
        rate: -slope,
        intercept,
        r_squared,
        window_start: x[0],
        window_end: x[x.len() - 1],
        points: x.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let v: Vec<f64> = t.iter().map(|s| 2.0 + 3.0 * (-0.7 * s).exp()).collect();
        let se = vec![1e-6; t.len()];
        let f = fit_decay_rate(&t, &v, &se, 2.0, 1.0).unwrap();
        assert!((f.rate - 0.7).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.window_start, 1.0);
        assert_eq!(f.points, 40);
    }

    #[test]
    fn window_closes_at_noise_floor() {
        let t: Vec<f64> = (0..100).map(|k| k as f64 * 0.1).collect();
        let v: Vec<f64> = t.iter().map(|s| (-s).exp()).collect();
        let se = vec![0.01; t.len()];
        let f = fit_decay_rate(&t, &v, &se, 0.0, 0.0).unwrap();
        // e^{-t} > 0.03 until t = ln(100/3) ≈ 3.5
        assert!((f.window_end - 3.5).abs() < 0.1 + 1e-12);
    }

    #[test]
    fn too_few_points() {
        let t = [0.0, 1.0, 2.0];
        let v = [1.0, 0.001, 0.0];
        assert!(fit_decay_rate(&t, &v, &[0.01; 3], 0.0, 0.0).is_err());
        assert!(ols(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_rate(rate in 0.05f64..5.0, amp in 0.1f64..10.0) {
            let t: Vec<f64> = (0..30).map(|k| k as f64 * 0.2 / rate).collect();
            let v: Vec<f64> = t.iter().map(|s| -amp * (-rate * s).exp()).collect();
            let f = fit_decay_rate(&t, &v, &vec![0.0; 30], 0.0, 0.0).unwrap();
            prop_assert!((f.rate - rate).abs() < 1e-9 * rate);
        }
    }
}
