use crate::error::{Error, Result};

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::Empty);
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples", "must be finite"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

// ∫₀¹ (Q_a(u) - Q_b(u))² du for the empirical quantile functions
fn quantile_cost(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == b.len() {
        return a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    }
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut u = 0.0;
    let mut cost = 0.0;
    while i < na && j < nb {
        let ua = (i + 1) as f64 / na as f64;
        let ub = (j + 1) as f64 / nb as f64;
        let next = ua.min(ub);
        let d = a[i] - b[j];
        cost += d * d * (next - u);
        u = next;
        // (i+1)·nb == (j+1)·na is the exact tie test
        match ((i + 1) * nb).cmp(&((j + 1) * na)) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    cost
}

/// Exact W2 between two empirical measures on the line (quantile coupling).
/// Inputs need not be sorted; counts may differ.
pub fn wasserstein2_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(quantile_cost(&sorted(a)?, &sorted(b)?).sqrt())
}

/// Returns `(√n · W2(μ, ν), cost of an explicit coupling of μ^{⊗n} and ν^{⊗n})`.
///
/// The coupling pairs `(x_{σ_1(j)}, …, x_{σ_n(j)})` with
/// `(y_{σ_1(j)}, …, y_{σ_n(j)})` where `x`, `y` are the sorted samples and
/// `σ_k` is the cyclic shift by `k·⌊M/n⌋`, so every coordinate carries the
/// 1D quantile coupling and the joint points are not all on the diagonal.
/// Requires equal sample counts.
pub fn w2_tensorization_check(mu: &[f64], nu: &[f64], n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch {
            left: mu.len(),
            right: nu.len(),
        });
    }
    let (x, y) = (sorted(mu)?, sorted(nu)?);
    let m = x.len();
    let lhs = (n as f64).sqrt() * quantile_cost(&x, &y).sqrt();
    let step = (m / n).max(1);
    let mut total = 0.0;
    for j in 0..m {
        let mut sq = 0.0;
        for k in 0..n {
            let idx = (j + k * step) % m;
            let d = x[idx] - y[idx];
            sq += d * d;
        }
        total += sq;
    }
    Ok((lhs, (total / m as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(m: usize, sigma: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sigma * z
            })
            .collect()
    }

    #[test]
    fn point_masses() {
        assert_eq!(wasserstein2_1d(&[1.5; 7], &[-0.5; 7]).unwrap(), 2.0);
        assert_eq!(wasserstein2_1d(&[1.5; 3], &[-0.5; 5]).unwrap(), 2.0);
        let (l, r) = w2_tensorization_check(&[1.0; 10], &[0.25; 10], 4).unwrap();
        assert!((l - 1.5).abs() < 1e-15 && (r - 1.5).abs() < 1e-15);
    }

    #[test]
    fn identical_and_empty() {
        let a = normals(100, 1.0, 3);
        assert_eq!(wasserstein2_1d(&a, &a).unwrap(), 0.0);
        assert!(wasserstein2_1d(&[], &a).is_err());
        assert!(w2_tensorization_check(&a, &a[..50], 2).is_err());
    }

    #[test]
    fn gaussian_scale_pair() {
        let a = normals(100_000, 1.0, 1);
        let b = normals(100_000, 2.0, 2);
        let w = wasserstein2_1d(&a, &b).unwrap();
        assert!((w - 1.0).abs() < 0.02, "{w}");
        let (l, r) = w2_tensorization_check(&a, &b, 2).unwrap();
        assert!((l - 2f64.sqrt()).abs() < 0.02 * 2f64.sqrt());
        assert!((l - r).abs() < 1e-12);
    }

    #[test]
    fn unequal_counts_use_merged_breakpoints() {
        // Q_a = 0 on [0,1/2), 1 on [1/2,1); Q_b = 0, 0, 3 on thirds
        let w = wasserstein2_1d(&[0.0, 1.0], &[0.0, 0.0, 3.0]).unwrap();
        let expected = (1.0 / 6.0 * 1.0 + 1.0 / 3.0 * 4.0_f64).sqrt();
        assert!((w - expected).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn tensorization_agrees(xs in prop::collection::vec(-5.0f64..5.0, 1..40), shift in -2.0f64..2.0, n in 1usize..6) {
            let ys: Vec<f64> = xs.iter().rev().map(|x| 0.5 * x + shift).collect();
            let (l, r) = w2_tensorization_check(&xs, &ys, n).unwrap();
            prop_assert!((l - r).abs() <= 1e-12 * (1.0 + l));
            if n == 1 {
                prop_assert!((l - wasserstein2_1d(&xs, &ys).unwrap()).abs() <= 1e-15 * (1.0 + l));
            }
        }

        #[test]
        fn w2_metric_axioms(a in prop::collection::vec(-3.0f64..3.0, 12), b in prop::collection::vec(-3.0f64..3.0, 12), c in prop::collection::vec(-3.0f64..3.0, 12)) {
            let ab = wasserstein2_1d(&a, &b).unwrap();
            prop_assert_eq!(ab, wasserstein2_1d(&b, &a).unwrap());
            prop_assert!(ab >= 0.0);
            let ac = wasserstein2_1d(&a, &c).unwrap();
            let cb = wasserstein2_1d(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
        }
    }
}
