use std::sync::Arc;

use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A characteristic function `F̂(ξ)` sampled on a lattice ball.
///
/// Between nodes the grid is evaluated by *anchored remainder
/// interpolation*. The anchor `T` is a Gaussian times a quartic polynomial
/// that matches the Taylor expansion of `F̂` at the origin to fourth degree
/// (fourth-order stencils). The remainder `r(ξ) = (F̂(ξ) - T(ξ)) / |ξ|²` is stored at every node with
/// `r(0) = 0`, and
///
/// ```text
/// eval(η) = T(η) + |η|² · multilinear[r](η).
/// ```
///
/// The scheme is exact at nodes, second order in the spacing, and carries
/// the moments up to fourth order through the cells around the origin
/// without the angular error plain multilinear interpolation makes there.
///
/// Values are immutable after construction.
#[derive(Debug, Clone)]
pub struct CharFunGrid {
    lattice: Arc<Lattice>,
    values: Vec<Complex64>,
    remainder: Vec<Complex64>,
    anchor: Anchor,
}

// Fourth-order central stencils at the origin, by derivative order.
pub(crate) const D1: [(i64, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
pub(crate) const D2: [(i64, f64); 5] = [
    (-2, -1.0 / 12.0),
    (-1, 16.0 / 12.0),
    (0, -30.0 / 12.0),
    (1, 16.0 / 12.0),
    (2, -1.0 / 12.0),
];
const D3: [(i64, f64); 6] = [(-3, 0.125), (-2, -1.0), (-1, 1.625), (1, -1.625), (2, 1.0), (3, -0.125)];
pub(crate) const D4: [(i64, f64); 7] = [
    (-3, -1.0 / 6.0),
    (-2, 2.0),
    (-1, -13.0 / 2.0),
    (0, 28.0 / 3.0),
    (1, -13.0 / 2.0),
    (2, 2.0),
    (3, -1.0 / 6.0),
];

fn stencil(order: u32) -> &'static [(i64, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &D1,
        2 => &D2,
        3 => &D3,
        _ => &D4,
    }
}

type Poly = Vec<([u32; 3], Complex64)>;

// Product of two polynomials in at most three variables, truncated at
// degree 4.
fn mul_trunc(a: &Poly, b: &Poly) -> Poly {
    let mut out: Poly = Vec::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            if e.iter().sum::<u32>() > 4 {
                continue;
            }
            match out.iter_mut().find(|(x, _)| *x == e) {
                Some((_, c)) => *c += ca * cb,
                None => out.push((e, ca * cb)),
            }
        }
    }
    out
}

fn positive_definite(c: &[[f64; 3]; 3], dim: usize) -> bool {
    let mut l = [[0.0f64; 3]; 3];
    for i in 0..dim {
        for j in 0..=i {
            let s: f64 = c[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Fourth-order anchor `G(ξ) (1 + P(ξ))` with
/// `G(ξ) = exp(-i m·ξ - ½ ξᵀCξ)`, `C` the covariance, and `P` the cubic and
/// quartic Taylor terms of `F̂ / G` at the origin. When `C` is not positive
/// definite the anchor is the quadratic Taylor polynomial.
#[derive(Debug, Clone)]
struct Anchor {
    mean: [f64; 3],
    second: [[f64; 3]; 3],
    cov: [[f64; 3]; 3],
    higher: Vec<([i32; 3], Complex64)>,
    gaussian: bool,
}

impl Anchor {
    fn from_values(lattice: &Lattice, values: &[Complex64]) -> Self {
        let dim = lattice.dim();
        let h = lattice.spacing();
        let o = lattice.origin() as i64;
        let strides = lattice.strides();
        // tensor-product stencil for ∂^α F̂(0)
        let derivative = |alpha: [u32; 3]| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut stack = vec![(0usize, o, 1.0f64)];
            while let Some((k, idx, w)) = stack.pop() {
                if k == dim {
                    acc += values[idx as usize] * w;
                    continue;
                }
                for &(s, ws) in stencil(alpha[k]) {
                    stack.push((k + 1, idx + s * strides[k] as i64, w * ws));
                }
            }
            acc / h.powi(alpha.iter().sum::<u32>() as i32)
        };
        let unit = |k: usize, n: u32| {
            let mut a = [0; 3];
            a[k] = n;
            a
        };
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for k in 0..dim {
            mean[k] = (Complex64::i() * derivative(unit(k, 1))).re;
            second[k][k] = -derivative(unit(k, 2)).re;
            for l in k + 1..dim {
                let mut a = unit(k, 1);
                a[l] = 1;
                second[k][l] = -derivative(a).re;
                second[l][k] = second[k][l];
            }
        }
        let mut cov = [[0.0; 3]; 3];
        for k in 0..dim {
            for l in 0..dim {
                cov[k][l] = second[k][l] - mean[k] * mean[l];
            }
        }
        let gaussian = positive_definite(&cov, dim);
        let mut higher = Vec::new();
        if gaussian {
            let factorial = |n: u32| (1..=n).product::<u32>() as f64;
            let i = Complex64::i();
            let top = |k: usize| if k < dim { 4 } else { 0 };
            // Taylor polynomial of F̂ and of q = log(1/G) = i m·ξ + ½ ξᵀCξ
            let mut taylor: Poly = vec![([0; 3], Complex64::new(1.0, 0.0))];
            let mut q: Poly = Vec::new();
            for k in 0..dim {
                taylor.push((unit(k, 1), -i * mean[k]));
                q.push((unit(k, 1), i * mean[k]));
                taylor.push((unit(k, 2), Complex64::new(-0.5 * second[k][k], 0.0)));
                q.push((unit(k, 2), Complex64::new(0.5 * cov[k][k], 0.0)));
                for l in k + 1..dim {
                    let mut a = unit(k, 1);
                    a[l] = 1;
                    taylor.push((a, Complex64::new(-second[k][l], 0.0)));
                    q.push((a, Complex64::new(cov[k][l], 0.0)));
                }
            }
            for a0 in 0..=top(0) {
                for a1 in 0..=top(1) {
                    for a2 in 0..=top(2) {
                        let alpha = [a0, a1, a2];
                        let deg: u32 = alpha.iter().sum();
                        if deg == 3 || deg == 4 {
                            let c = derivative(alpha) / alpha.iter().map(|&a| factorial(a)).product::<f64>();
                            taylor.push((alpha, c));
                        }
                    }
                }
            }
            // exp(q) to degree 4, then F̂ · exp(q)
            let mut exp_q: Poly = vec![([0; 3], Complex64::new(1.0, 0.0))];
            let mut power = exp_q.clone();
            for n in 1..=4 {
                power = mul_trunc(&power, &q);
                for (e, c) in &power {
                    let c = c / factorial(n);
                    match exp_q.iter_mut().find(|(x, _)| x == e) {
                        Some((_, v)) => *v += c,
                        None => exp_q.push((*e, c)),
                    }
                }
            }
            higher = mul_trunc(&taylor, &exp_q)
                .into_iter()
                .filter(|(e, _)| e.iter().sum::<u32>() >= 3)
                .map(|(e, c)| (e.map(|a| a as i32), c))
                .collect();
        }
        Anchor {
            mean,
            second,
            cov,
            higher,
            gaussian,
        }
    }

    #[inline]
    fn eval(&self, xi: &[f64]) -> Complex64 {
        let mut dot = 0.0;
        if !self.gaussian {
            let mut quad = 0.0;
            for k in 0..xi.len() {
                dot += self.mean[k] * xi[k];
                for l in 0..xi.len() {
                    quad += self.second[k][l] * xi[k] * xi[l];
                }
            }
            return Complex64::new(1.0 - 0.5 * quad, -dot);
        }
        let mut quad = 0.0;
        for k in 0..xi.len() {
            dot += self.mean[k] * xi[k];
            for l in 0..xi.len() {
                quad += self.cov[k][l] * xi[k] * xi[l];
            }
        }
        let mut pow = [[1.0f64; 5]; 3];
        for k in 0..xi.len() {
            for e in 1..5 {
                pow[k][e] = pow[k][e - 1] * xi[k];
            }
        }
        let mut p = Complex64::new(1.0, 0.0);
        for (alpha, c) in &self.higher {
            let mono = pow[0][alpha[0] as usize] * pow[1][alpha[1] as usize] * pow[2][alpha[2] as usize];
            p += c * mono;
        }
        Complex64::from_polar((-0.5 * quad).exp(), -dot) * p
    }
}

impl PartialEq for CharFunGrid {
    fn eq(&self, other: &Self) -> bool {
        self.lattice.same_geometry(&other.lattice) && self.values == other.values
    }
}

impl CharFunGrid {
    /// Builds a grid from nodal values (row-major, last axis fastest).
    ///
    /// Inactive nodes are overwritten by their fill source. The origin value
    /// must be 1 to within `1e-9` and is then set to exactly 1.
    pub fn from_values(lattice: Arc<Lattice>, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::invalid(
                "grid.values",
                format!("expected {} values, got {}", lattice.len(), values.len()),
            ));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::invalid("grid.values", "non-finite value"));
        }
        let o = lattice.origin();
        if (values[o] - ONE).norm() > 1e-9 {
            return Err(Error::invalid(
                "grid.values",
                format!("value at the origin must be 1, got {}", values[o]),
            ));
        }
        values[o] = ONE;
        for i in 0..values.len() {
            if !lattice.is_active(i) {
                values[i] = values[lattice.fill_source(i)];
            }
        }
        Ok(Self::assemble(lattice, values))
    }

    fn assemble(lattice: Arc<Lattice>, values: Vec<Complex64>) -> Self {
        let dim = lattice.dim();
        let o = lattice.origin();
        let anchor = Anchor::from_values(&lattice, &values);
        let mut xi = [0.0; 3];
        let mut remainder = vec![Complex64::new(0.0, 0.0); values.len()];
        for (i, r) in remainder.iter_mut().enumerate() {
            if i == o {
                continue;
            }
            lattice.coords_into(i, &mut xi[..dim]);
            *r = (values[i] - anchor.eval(&xi[..dim])) / lattice.norm2(i);
        }
        CharFunGrid {
            lattice,
            values,
            remainder,
            anchor,
        }
    }

    /// Samples `f` at every active node of a fresh lattice.
    pub fn from_fn<F>(dim: usize, radius: f64, nodes_per_axis: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let lattice = Lattice::new(dim, radius, nodes_per_axis)?;
        Self::sample_on(lattice, f)
    }

    pub fn sample_on<F>(lattice: Arc<Lattice>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let mut xi = vec![0.0; lattice.dim()];
        let values = (0..lattice.len())
            .map(|i| {
                if lattice.is_active(i) {
                    lattice.coords_into(i, &mut xi);
                    f(&xi)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self::from_values(lattice, values)
    }

    /// `F̂ ≡ 1`, the transform of the point mass at the origin.
    pub fn constant_one(dim: usize, radius: f64, nodes_per_axis: usize) -> Result<Self> {
        Self::from_fn(dim, radius, nodes_per_axis, |_| ONE)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn radius(&self) -> f64 {
        self.lattice.radius()
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.lattice.nodes_per_axis()
    }

    pub fn spacing(&self) -> f64 {
        self.lattice.spacing()
    }

    /// Nodal values, row-major over the full box (inactive nodes hold their
    /// fill copies).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Mean vector used by the interpolation anchor.
    pub fn anchor_mean(&self) -> &[f64] {
        &self.anchor.mean[..self.dim()]
    }

    /// Second-moment matrix used by the interpolation anchor.
    pub fn anchor_second(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d).map(|k| self.anchor.second[k][..d].to_vec()).collect()
    }

    /// Value at an arbitrary point of the ball.
    pub fn eval(&self, xi: &[f64]) -> Result<Complex64> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: xi.len(),
                right: self.dim(),
            });
        }
        let n2: f64 = xi.iter().map(|x| x * x).sum();
        let radius = self.radius();
        if !(n2.sqrt() <= radius * (1.0 + 1e-9)) {
            return Err(Error::OutOfDomain { norm: n2.sqrt(), radius });
        }
        Ok(self.eval_unchecked(xi))
    }

    /// Interpolated value; the caller guarantees `|ξ| <= radius`.
    #[inline]
    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> Complex64 {
        let lat = &*self.lattice;
        let h = lat.spacing();
        let c = lat.center_index() as f64;
        let max_cell = lat.nodes_per_axis() - 2;
        let strides = lat.strides();
        let mut base = 0usize;
        let mut frac = [0.0f64; 3];
        let mut n2 = 0.0;
        for k in 0..xi.len() {
            let x = xi[k];
            n2 += x * x;
            let t = x / h + c;
            let i0 = (t.floor().max(0.0) as usize).min(max_cell);
            frac[k] = t - i0 as f64;
            base += i0 * strides[k];
        }
        let r = &self.remainder;
        let interp = match xi.len() {
            1 => {
                let f = frac[0];
                r[base] * (1.0 - f) + r[base + 1] * f
            }
            2 => {
                let (fx, fy) = (frac[0], frac[1]);
                let s0 = strides[0];
                let a = r[base] * (1.0 - fy) + r[base + 1] * fy;
                let b = r[base + s0] * (1.0 - fy) + r[base + s0 + 1] * fy;
                a * (1.0 - fx) + b * fx
            }
            _ => {
                let (fx, fy, fz) = (frac[0], frac[1], frac[2]);
                let (s0, s1) = (strides[0], strides[1]);
                let line = |b: usize| r[b] * (1.0 - fz) + r[b + 1] * fz;
                let plane = |b: usize| line(b) * (1.0 - fy) + line(b + s1) * fy;
                plane(base) * (1.0 - fx) + plane(base + s0) * fx
            }
        };
        self.anchor.eval(xi) + interp * n2
    }

    /// Largest deviation from Hermitian symmetry over the lattice.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|i| (self.values[self.lattice.mirror(i)] - self.values[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|F̂|` over active nodes.
    pub fn max_modulus(&self) -> f64 {
        self.lattice
            .active_indices()
            .map(|i| self.values[i].norm())
            .fold(0.0, f64::max)
    }

    /// Sup over active nodes of `|F̂ - Ĥ|`.
    pub fn sup_distance(&self, other: &CharFunGrid) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .lattice
            .active_indices()
            .map(|i| (self.values[i] - other.values[i]).norm())
            .fold(0.0, f64::max))
    }

    /// Lattice GTW numerator: `max |F̂ - Ĥ| / |ξ|²` over active nodes `ξ ≠ 0`,
    /// with the maximizing node index.
    pub fn lattice_gtw(&self, other: &CharFunGrid) -> Result<(f64, usize)> {
        self.lattice_ratio(other, 2.0)
    }

    /// Lattice T1 numerator: `max |F̂ - Ĥ| / |ξ|`.
    pub fn lattice_t1(&self, other: &CharFunGrid) -> Result<(f64, usize)> {
        self.lattice_ratio(other, 1.0)
    }

    fn lattice_ratio(&self, other: &CharFunGrid, power: f64) -> Result<(f64, usize)> {
        self.check_same(other)?;
        let o = self.lattice.origin();
        let mut best = (0.0, o);
        for i in self.lattice.active_indices() {
            if i == o {
                continue;
            }
            let n2 = self.lattice.norm2(i);
            let denom = if power == 2.0 { n2 } else { n2.powf(power / 2.0) };
            let ratio = (self.values[i] - other.values[i]).norm() / denom;
            if ratio > best.0 {
                best = (ratio, i);
            }
        }
        Ok(best)
    }

    pub(crate) fn check_same(&self, other: &CharFunGrid) -> Result<()> {
        if !self.lattice.same_geometry(&other.lattice) {
            return Err(Error::invalid(
                "grid",
                "grids live on different lattices (dim, radius or nodes_per_axis differ)",
            ));
        }
        Ok(())
    }

    /// Pointwise affine combination `a F + b G` on a shared lattice.
    pub(crate) fn combine(&self, a: f64, other: &CharFunGrid, b: f64) -> Result<CharFunGrid> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * a + y * b).collect();
        CharFunGrid::from_values(self.lattice.clone(), values)
    }

    /// Restriction to the coordinate subspace `ξ_{k+1} = … = ξ_N = 0`.
    pub fn restrict(&self, k: usize) -> Result<CharFunGrid> {
        let dim = self.dim();
        if k == 0 || k > dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        if k == dim {
            return Ok(self.clone());
        }
        let sub = Lattice::new(k, self.radius(), self.nodes_per_axis())?;
        let c = self.lattice.center_index() as i64;
        let mut offsets = vec![0i64; dim];
        let mut values = Vec::with_capacity(sub.len());
        let n = self.nodes_per_axis();
        for idx in 0..sub.len() {
            let mut rem = idx;
            for (j, off) in offsets.iter_mut().enumerate().take(k) {
                let s = n.pow((k - 1 - j) as u32);
                *off = (rem / s) as i64 - c;
                rem %= s;
            }
            let full = self.lattice.index_of_offsets(&offsets).expect("subspace node");
            values.push(self.values[full]);
        }
        CharFunGrid::from_values(sub, values)
    }

    /// Re-samples this grid on another lattice of the same dimension and
    /// radius by interpolation.
    pub fn resample(&self, lattice: Arc<Lattice>) -> Result<CharFunGrid> {
        if lattice.dim() != self.dim() || lattice.radius() != self.radius() {
            return Err(Error::invalid("grid", "resampling needs equal dimension and radius"));
        }
        CharFunGrid::sample_on(lattice, |xi| self.eval_unchecked(xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(xi: &[f64]) -> Complex64 {
        Complex64::new((-0.5 * xi.iter().map(|x| x * x).sum::<f64>()).exp(), 0.0)
    }

    #[test]
    fn exact_at_nodes() {
        let g = CharFunGrid::from_fn(2, 6.0, 33, |xi| {
            Complex64::from_polar(
                (-0.3 * (xi[0] * xi[0] + 2.0 * xi[1] * xi[1])).exp(),
                -0.4 * xi[0] + 0.1 * xi[1],
            )
        })
        .unwrap();
        for i in g.lattice().active_indices() {
            let xi = g.lattice().coords(i);
            let v = g.eval(&xi).unwrap();
            assert!((v - g.value(i)).norm() < 1e-13, "node {xi:?}");
        }
    }

    #[test]
    fn constant_field() {
        let g = CharFunGrid::constant_one(3, 2.0, 33).unwrap();
        for xi in [[0.1, 0.2, -0.3], [1.0, 1.0, 0.5], [-1.1, 0.0, 1.5]] {
            assert!((g.eval(&xi).unwrap() - ONE).norm() < 1e-13);
        }
        assert_eq!(g.anchor_mean(), &[0.0, 0.0, 0.0]);
        assert!(g.anchor_second().iter().flatten().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn out_of_ball_is_domain_error() {
        let g = CharFunGrid::constant_one(2, 2.0, 33).unwrap();
        assert!(matches!(g.eval(&[1.5, 1.5]), Err(Error::OutOfDomain { .. })));
        assert!(matches!(g.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn second_order_at_cell_midpoints() {
        // Max midpoint error against the closed form shrinks ~4x per halving.
        let err = |nodes: usize| {
            let g = CharFunGrid::from_fn(2, 6.0, nodes, gaussian).unwrap();
            let h = g.spacing();
            let mut worst: f64 = 0.0;
            for i in g.lattice().active_indices() {
                let xi = g.lattice().coords(i);
                let p = [xi[0] + h / 2.0, xi[1] + h / 2.0];
                if p[0].hypot(p[1]) <= 6.0 {
                    worst = worst.max((g.eval(&p).unwrap() - gaussian(&p)).norm());
                }
            }
            worst
        };
        let (e1, e2, e3) = (err(33), err(65), err(129));
        assert!(e1 < 0.02, "{e1}");
        assert!(e2 / e3 > 3.0 && e1 / e2 > 3.0, "{e1} {e2} {e3}");
    }

    #[test]
    fn anchor_recovers_point_mass_moments() {
        let a = 0.8;
        let g = CharFunGrid::from_fn(1, 6.0, 65, |xi| Complex64::from_polar(1.0, -a * xi[0])).unwrap();
        let x = a * g.spacing();
        let m = (8.0 * x.sin() - (2.0 * x).sin()) / (6.0 * g.spacing());
        assert!((g.anchor_mean()[0] - m).abs() < 1e-14);
        assert!((g.anchor_second()[0][0] - a * a).abs() < 1e-4);
    }

    #[test]
    fn inactive_nodes_copy_shorter_active_nodes() {
        let g = CharFunGrid::from_fn(2, 3.0, 33, gaussian).unwrap();
        let lat = g.lattice();
        for i in 0..lat.len() {
            assert_eq!(g.value(i), g.value(lat.fill_source(i)));
        }
    }

    #[test]
    fn restriction_of_product() {
        let g = CharFunGrid::from_fn(3, 4.0, 33, |xi| {
            Complex64::new((-0.5 * xi[0] * xi[0]).exp() * xi[1].cos() * (1.0 - xi[2] * xi[2] / 40.0), 0.0)
        })
        .unwrap();
        let m = g.restrict(1).unwrap();
        assert_eq!(m.dim(), 1);
        for i in m.lattice().active_indices() {
            let x = m.lattice().coords(i)[0];
            assert!((m.value(i).re - (-0.5 * x * x).exp()).abs() < 1e-15);
        }
        assert!(g.restrict(4).is_err());
        assert!(g.restrict(0).is_err());
    }

    #[test]
    fn rejects_unnormalized() {
        let lat = Lattice::new(1, 1.0, 33).unwrap();
        assert!(CharFunGrid::from_values(lat.clone(), vec![Complex64::new(0.5, 0.0); 33]).is_err());
        assert!(CharFunGrid::from_values(lat, vec![ONE; 3]).is_err());
    }
}
