//! Cell-centred sampling of the unit disc inside a padded square.
//!
//! A grid with `n_side` nodes per unit of `[-1, 1]` and padding factor `pad`
//! covers `[-L, L]^2` with `L = pad` using `N = pad * n_side` nodes per side.
//! Node `(ix, iy)` sits at `(-L + (ix + 1/2) h, -L + (iy + 1/2) h)` and is
//! stored at linear index `iy * N + ix` (row-major, rows indexed by `y`).

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n_side: usize,
    pad: usize,
    n: usize,
    half_width: f64,
    spacing: f64,
}

impl GridSpec {
    pub fn new(n_side: usize, pad: usize) -> Result<Self> {
        if n_side < 4 {
            return Err(Error::InvalidGrid(format!("n_side must be >= 4, got {n_side}")));
        }
        if pad == 0 {
            return Err(Error::InvalidGrid("pad_factor must be >= 1".into()));
        }
        let n = n_side * pad;
        let half_width = pad as f64;
        Ok(Self {
            n_side,
            pad,
            n,
            half_width,
            spacing: 2.0 * half_width / n as f64,
        })
    }

    pub fn n_side(&self) -> usize {
        self.n_side
    }

    pub fn pad_factor(&self) -> usize {
        self.pad
    }

    /// Nodes per side of the padded square.
    pub fn side(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half-width `L` of the padded square.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    pub fn node(&self, ix: usize, iy: usize) -> C64 {
        C64::new(self.coord(ix), self.coord(iy))
    }

    pub fn point(&self, idx: usize) -> C64 {
        self.node(idx % self.n, idx / self.n)
    }

    pub fn in_disc(&self, idx: usize) -> bool {
        self.point(idx).norm_sqr() < 1.0
    }

    pub fn mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.in_disc(i)).collect()
    }

    /// Linear indices of the nodes inside the open unit disc.
    pub fn disc_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_disc(i)).collect()
    }

    pub fn masked_count(&self) -> usize {
        (0..self.len()).filter(|&i| self.in_disc(i)).count()
    }

    /// Fractional node coordinates of `z`, i.e. the `(ix, iy)` that would
    /// place a node exactly at `z`.
    pub fn locate(&self, z: C64) -> (f64, f64) {
        (
            (z.re + self.half_width) / self.spacing - 0.5,
            (z.im + self.half_width) / self.spacing - 0.5,
        )
    }
}

/// Complex samples on every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<C64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(C64) -> C64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    /// Samples `f` inside the disc and stores zero elsewhere.
    pub fn from_fn_disc(grid: GridSpec, f: impl Fn(C64) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let z = grid.point(i);
                if z.norm_sqr() < 1.0 {
                    f(z)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, ix: usize, iy: usize) -> C64 {
        self.values[self.grid.index(ix, iy)]
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn map_indexed(&self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| f(self.grid.point(i), v))
                .collect(),
        }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Copy with every node outside the disc set to zero.
    pub fn restrict_to_disc(&self) -> Self {
        self.map_indexed(|z, v| if z.norm_sqr() < 1.0 { v } else { C64::new(0.0, 0.0) })
    }

    /// Bilinear interpolation at an arbitrary point of the padded square.
    pub fn sample_bilinear(&self, z: C64) -> C64 {
        let n = self.grid.side();
        let (fx, fy) = self.grid.locate(z);
        let fx = fx.clamp(0.0, (n - 1) as f64);
        let fy = fy.clamp(0.0, (n - 1) as f64);
        let ix = (fx.floor() as usize).min(n - 2);
        let iy = (fy.floor() as usize).min(n - 2);
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        self.at(ix, iy) * ((1.0 - tx) * (1.0 - ty))
            + self.at(ix + 1, iy) * (tx * (1.0 - ty))
            + self.at(ix, iy + 1) * ((1.0 - tx) * ty)
            + self.at(ix + 1, iy + 1) * (tx * ty)
    }
}

/// Midpoint rule over the disc: `h^2` times the sum over masked nodes.
pub fn integrate_disc(f: &Field) -> C64 {
    let g = f.grid();
    let h2 = g.spacing() * g.spacing();
    let s: C64 = f
        .values()
        .iter()
        .enumerate()
        .filter(|&(i, _)| g.in_disc(i))
        .map(|(_, &v)| v)
        .sum();
    s * h2
}

/// Discrete `L^p(Omega)` norm. `p = f64::INFINITY` gives the max modulus.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("must be >= 1, got {p}")));
    }
    let g = f.grid();
    let inside = f
        .values()
        .iter()
        .enumerate()
        .filter(|&(i, _)| g.in_disc(i))
        .map(|(_, v)| v.norm());
    if p.is_infinite() {
        return Ok(inside.fold(0.0, f64::max));
    }
    let h2 = g.spacing() * g.spacing();
    let s: f64 = inside.map(|a| a.powf(p)).sum();
    Ok((s * h2).powf(1.0 / p))
}

/// `integral over Omega of f(z) |z - z0|^(-beta)` for `0 <= beta < 2`.
///
/// Cells whose centres lie within `h / sqrt(2)` of `z0` are replaced by the
/// exact integral over an equal-area disc centred at `z0`, with `f` frozen at
/// its mean over those cells.
pub fn integrate_weakly_singular(f: &Field, z0: C64, beta: f64) -> Result<C64> {
    if !(0.0..2.0).contains(&beta) {
        return Err(invalid("beta", format!("must lie in [0, 2), got {beta}")));
    }
    let g = f.grid();
    let h = g.spacing();
    let cut = h / 2f64.sqrt() * (1.0 + 1e-9);
    let mut regular = C64::new(0.0, 0.0);
    let mut near_sum = C64::new(0.0, 0.0);
    let mut near = 0usize;
    for (i, &v) in f.values().iter().enumerate() {
        if !g.in_disc(i) {
            continue;
        }
        let d = (g.point(i) - z0).norm();
        if d <= cut {
            near_sum += v;
            near += 1;
        } else {
            regular += v * d.powf(-beta);
        }
    }
    let mut total = regular * h * h;
    if near > 0 {
        let rho = (near as f64 * h * h / std::f64::consts::PI).sqrt();
        let disc = 2.0 * std::f64::consts::PI * rho.powf(2.0 - beta) / (2.0 - beta);
        total += near_sum / near as f64 * disc;
    }
    Ok(total)
}

/// Pair-sampling scheme for [`holder_seminorm_estimate`].
#[derive(Clone, Copy, Debug)]
pub struct HolderSampling {
    /// All pairs whose index offsets are at most this many nodes.
    pub neighborhood: usize,
    /// Number of additional uniformly random long-range pairs.
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for HolderSampling {
    fn default() -> Self {
        Self {
            neighborhood: 3,
            random_pairs: 20_000,
            seed: 0x5eed,
        }
    }
}

/// Lower estimate of `sup |f(a) - f(b)| / |a - b|^alpha` over pairs of
/// masked nodes drawn by `sampling`.
pub fn holder_seminorm_estimate(f: &Field, alpha: f64, sampling: HolderSampling) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    let g = f.grid();
    let n = g.side() as isize;
    let h = g.spacing();
    let k = sampling.neighborhood as isize;
    let mask = g.mask();
    let mut best = 0.0f64;
    for dy in 0..=k {
        for dx in -k..=k {
            if dy == 0 && dx <= 0 {
                continue;
            }
            let dist = h * ((dx * dx + dy * dy) as f64).sqrt();
            let w = dist.powf(-alpha);
            for iy in 0..(n - dy) {
                for ix in 0..n {
                    let jx = ix + dx;
                    if jx < 0 || jx >= n {
                        continue;
                    }
                    let a = (iy * n + ix) as usize;
                    let b = ((iy + dy) * n + jx) as usize;
                    if mask[a] && mask[b] {
                        best = best.max((f.values()[a] - f.values()[b]).norm() * w);
                    }
                }
            }
        }
    }
    let idx = g.disc_indices();
    if idx.len() > 1 && sampling.random_pairs > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
        for _ in 0..sampling.random_pairs {
            let a = idx[rng.gen_range(0..idx.len())];
            let b = idx[rng.gen_range(0..idx.len())];
            if a == b {
                continue;
            }
            let d = (g.point(a) - g.point(b)).norm();
            best = best.max((f.values()[a] - f.values()[b]).norm() / d.powf(alpha));
        }
    }
    Ok(best)
}

/// Hölder norm estimate: sup norm plus the sampled seminorm.
pub fn holder_norm_estimate(f: &Field, alpha: f64, sampling: HolderSampling) -> Result<f64> {
    Ok(lp_norm(f, f64::INFINITY)? + holder_seminorm_estimate(f, alpha, sampling)?)
}

/// Centred-difference approximations of `d/dz`, `d/dzbar` and the 5-point
/// Laplacian. Nodes on the outer frame of the padded square are set to zero.
pub mod diff {
    use super::Field;
    use num_complex::Complex64 as C64;

    fn stencil(f: &Field, op: impl Fn(C64, C64, C64, C64, C64) -> C64) -> Field {
        let g = *f.grid();
        let n = g.side();
        let mut out = Field::zeros(g);
        for iy in 1..n - 1 {
            for ix in 1..n - 1 {
                let c = f.at(ix, iy);
                let e = f.at(ix + 1, iy);
                let w = f.at(ix - 1, iy);
                let no = f.at(ix, iy + 1);
                let s = f.at(ix, iy - 1);
                out.values_mut()[g.index(ix, iy)] = op(c, e, w, no, s);
            }
        }
        out
    }

    pub fn dx(f: &Field) -> Field {
        let h = f.grid().spacing();
        stencil(f, |_, e, w, _, _| (e - w) / (2.0 * h))
    }

    pub fn dy(f: &Field) -> Field {
        let h = f.grid().spacing();
        stencil(f, |_, _, _, no, s| (no - s) / (2.0 * h))
    }

    /// `d/dz = (d/dx - i d/dy) / 2`.
    pub fn dz(f: &Field) -> Field {
        let h = f.grid().spacing();
        let i = C64::i();
        stencil(f, |_, e, w, no, s| ((e - w) - i * (no - s)) / (4.0 * h))
    }

    /// `d/dzbar = (d/dx + i d/dy) / 2`.
    pub fn dzbar(f: &Field) -> Field {
        let h = f.grid().spacing();
        let i = C64::i();
        stencil(f, |_, e, w, no, s| ((e - w) + i * (no - s)) / (4.0 * h))
    }

    pub fn laplacian(f: &Field) -> Field {
        let h = f.grid().spacing();
        stencil(f, |c, e, w, no, s| (e + w + no + s - 4.0 * c) / (h * h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn small_grid_arithmetic() {
        let g = GridSpec::new(4, 1).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.half_width(), 1.0);
        assert_eq!(g.coord(0), -0.75);
        assert_eq!(g.spacing() * g.side() as f64, 2.0 * g.half_width());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(4, 0).is_err());
        assert!(GridSpec::new(0, 2).is_err());
        assert!(GridSpec::new(3, 2).is_err());
    }

    #[test]
    fn row_major_ordering() {
        let g = GridSpec::new(8, 2).unwrap();
        let z = g.point(g.index(3, 5));
        assert_eq!(z, C64::new(g.coord(3), g.coord(5)));
        assert_eq!(g.point(1).im, g.point(0).im);
    }

    #[test]
    fn masked_count_near_quarter_pi() {
        let g = GridSpec::new(64, 2).unwrap();
        let direct = (0..64)
            .flat_map(|iy| (0..64).map(move |ix| (ix, iy)))
            .filter(|&(ix, iy)| {
                let x = -1.0 + (ix as f64 + 0.5) / 32.0;
                let y = -1.0 + (iy as f64 + 0.5) / 32.0;
                x * x + y * y < 1.0
            })
            .count();
        assert_eq!(g.masked_count(), direct);
        let expect = PI / 4.0 * 64.0 * 64.0;
        assert!((direct as f64 - expect).abs() / expect < 0.02);
        assert!(g.in_disc(g.index(64, 64)));
    }

    #[test]
    fn integrals_of_simple_fields() {
        let g = GridSpec::new(128, 1).unwrap();
        let one = Field::from_fn(g, |_| C64::new(1.0, 0.0));
        assert!((integrate_disc(&one).re - PI).abs() < 0.01);
        let z = Field::from_fn(g, |z| z);
        assert!(integrate_disc(&z).norm() < 1e-12);
    }

    #[test]
    fn integration_error_shrinks_under_refinement() {
        let exact = PI / 2.0;
        let err = |n| {
            let g = GridSpec::new(n, 1).unwrap();
            (integrate_disc(&Field::from_fn(g, |z| C64::new(z.norm_sqr(), 0.0))).re - exact).abs()
        };
        let e: Vec<f64> = [64, 128, 256, 512].iter().map(|&n| err(n)).collect();
        // cut cells make single steps noisy; compare over two doublings
        assert!(e[2] < e[0] / 2.0 && e[3] < e[1] / 2.0, "{e:?}");
    }

    #[test]
    fn norms_of_simple_fields() {
        let g = GridSpec::new(256, 1).unwrap();
        let one = Field::from_fn(g, |_| C64::new(1.0, 0.0));
        assert!((lp_norm(&one, 2.0).unwrap() - PI.sqrt()).abs() < 5e-3);
        let c = C64::new(0.6, -0.8) * 3.0;
        let cf = Field::from_fn(g, |_| c);
        for p in [1.0, 3.0, 4.5] {
            let want = 3.0 * PI.powf(1.0 / p);
            assert!((lp_norm(&cf, p).unwrap() - want).abs() / want < 5e-3);
        }
        let z = Field::from_fn(g, |z| z);
        assert!((lp_norm(&z, 2.0).unwrap() - (PI / 2.0).sqrt()).abs() < 5e-3);
        assert!(lp_norm(&z, f64::INFINITY).unwrap() < 1.0);
        assert!(lp_norm(&z, 0.5).is_err());
    }

    #[test]
    fn singular_integral_at_origin() {
        let g = GridSpec::new(128, 1).unwrap();
        let one = Field::from_fn(g, |_| C64::new(1.0, 0.0));
        let v = integrate_weakly_singular(&one, C64::new(0.0, 0.0), 0.5).unwrap();
        let want = 4.0 * PI / 3.0;
        assert!((v.re - want).abs() / want < 0.01, "{v}");
        assert!(integrate_weakly_singular(&one, C64::new(0.0, 0.0), 2.0).is_err());
    }

    #[test]
    fn holder_of_known_fields() {
        let g = GridSpec::new(64, 1).unwrap();
        let s = HolderSampling::default();
        let c = Field::from_fn(g, |_| C64::new(2.0, 1.0));
        assert_eq!(holder_seminorm_estimate(&c, 0.5, s).unwrap(), 0.0);
        let z = Field::from_fn(g, |z| z);
        let l = holder_seminorm_estimate(&z, 1.0, s).unwrap();
        assert!((l - 1.0).abs() < 1e-9 && l <= 1.0 + 1e-12);
        // |z^2 - w^2| / |z - w| = |z + w| < 2 in the disc
        let z2 = Field::from_fn(g, |z| z * z);
        let l2 = holder_seminorm_estimate(&z2, 1.0, s).unwrap();
        assert!(l2 <= 2.0 && l2 > 1.8);
        assert!(holder_seminorm_estimate(&z, 0.0, s).is_err());
    }

    #[test]
    fn holder_is_monotone_in_pair_set() {
        let g = GridSpec::new(48, 1).unwrap();
        let f = Field::from_fn(g, |z| (z * 3.0).sin());
        let mut prev = 0.0;
        for k in 1..=4 {
            let s = HolderSampling {
                neighborhood: k,
                random_pairs: 0,
                seed: 1,
            };
            let v = holder_seminorm_estimate(&f, 0.5, s).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn difference_operators_on_polynomials() {
        let g = GridSpec::new(32, 2).unwrap();
        let z2 = Field::from_fn(g, |z| z * z);
        let d = diff::dz(&z2);
        let db = diff::dzbar(&z2);
        let lap = diff::laplacian(&Field::from_fn(g, |z| C64::new(z.norm_sqr(), 0.0)));
        for idx in g.disc_indices() {
            let z = g.point(idx);
            assert!((d.values()[idx] - 2.0 * z).norm() < 1e-12);
            assert!(db.values()[idx].norm() < 1e-12);
            assert!((lap.values()[idx].re - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bilinear_reproduces_affine_fields() {
        let g = GridSpec::new(16, 2).unwrap();
        let f = Field::from_fn(g, |z| C64::new(1.0, 2.0) * z + z.conj() * 0.5);
        for &z in &[C64::new(0.1, -0.33), C64::new(-0.9, 0.2), C64::new(0.71, 0.7)] {
            let want = C64::new(1.0, 2.0) * z + z.conj() * 0.5;
            assert!((f.sample_bilinear(z) - want).norm() < 1e-12);
        }
    }

    fn field_strategy(g: GridSpec) -> impl Strategy<Value = Field> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), g.len())
            .prop_map(move |v| Field::from_values(g, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn integrate_is_linear(
            f in field_strategy(GridSpec::new(8, 1).unwrap()),
            g in field_strategy(GridSpec::new(8, 1).unwrap()),
            a in -3.0f64..3.0, b in -3.0f64..3.0,
        ) {
            let comb = f.scale(C64::new(a, 0.0)).add(&g.scale(C64::new(0.0, b))).unwrap();
            let lhs = integrate_disc(&comb);
            let rhs = integrate_disc(&f) * a + integrate_disc(&g) * C64::new(0.0, b);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn l2_matches_inner_product(f in field_strategy(GridSpec::new(8, 1).unwrap())) {
            let n2 = lp_norm(&f, 2.0).unwrap().powi(2);
            let ip = integrate_disc(&f.zip_with(&f, |a, b| a * b.conj()).unwrap()).re;
            prop_assert!((n2 - ip).abs() < 1e-12);
        }
    }
}
