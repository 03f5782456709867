/// Rotation of the pair `(v_i, v_j)` by angle `theta`.
#[inline]
pub fn pair_collision(v_i: f64, v_j: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (v_i * c + v_j * s, -v_i * s + v_j * c)
}

/// Collision of particle velocity `v_j` with a reservoir velocity `w`.
///
/// Returns `(v_j', w*)`; `v_j'^2 + w*^2 = v_j^2 + w^2`.
#[inline]
pub fn thermostat_collision(v_j: f64, w: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (v_j * c + w * s, w * c - v_j * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn pair_identity_and_quarter_turn() {
        assert_eq!(pair_collision(1.5, -2.0, 0.0), (1.5, -2.0));
        let (a, b) = pair_collision(1.5, -2.0, FRAC_PI_2);
        assert!((a - -2.0).abs() < 1e-15 && (b - -1.5).abs() < 1e-15);
    }

    #[test]
    fn thermostat_identity_and_quarter_turn() {
        assert_eq!(thermostat_collision(0.7, 3.0, 0.0), (0.7, 3.0));
        let (a, b) = thermostat_collision(0.7, 3.0, FRAC_PI_2);
        assert!((a - 3.0).abs() < 1e-15 && (b - -0.7).abs() < 1e-15);
    }

    #[test]
    fn three_four_five() {
        for k in 0..100 {
            let theta = 2.0 * PI * k as f64 / 100.0;
            let (a, b) = pair_collision(3.0, 4.0, theta);
            assert!((a * a + b * b - 25.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn pair_is_orthogonal(vi in -50.0..50.0f64, vj in -50.0..50.0f64, theta in 0.0..(2.0 * PI)) {
            let (a, b) = pair_collision(vi, vj, theta);
            let scale = 1.0 + vi * vi + vj * vj;
            prop_assert!((a * a + b * b - vi * vi - vj * vj).abs() <= 1e-12 * scale);
            let (x, y) = pair_collision(a, b, -theta);
            prop_assert!((x - vi).abs() <= 1e-12 * scale.sqrt() && (y - vj).abs() <= 1e-12 * scale.sqrt());
        }

        #[test]
        fn thermostat_conserves_energy(v in -50.0..50.0f64, w in -50.0..50.0f64, theta in 0.0..(2.0 * PI)) {
            let (a, b) = thermostat_collision(v, w, theta);
            prop_assert!((a * a + b * b - v * v - w * w).abs() <= 1e-12 * (1.0 + v * v + w * w));
        }
    }
}
