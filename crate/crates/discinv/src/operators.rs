//! Solid Cauchy and Beurling transforms on the disc as padded FFT
//! convolutions, the complex Gaussian kernel and its Fourier transform.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::cgo::smooth_step;
use crate::error::{invalid, Error, Result};
use crate::grid::{lp_norm, Field, GridSpec};

/// Forward and inverse 2D FFT plans for square arrays of side `n`.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalised forward transform, in place.
    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.fwd);
    }

    /// Unnormalised inverse transform, in place.
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n);
        data.par_chunks_mut(n).for_each(|row| plan.process(row));
        let mut t = transpose(data, n);
        t.par_chunks_mut(n).for_each(|row| plan.process(row));
        data.copy_from_slice(&transpose(&t, n));
    }
}

fn transpose(data: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = data[i * n + j];
        }
    });
    out
}

/// Signed lag `h * k` for array index `i`, with `k` wrapped to `[-N/2, N/2)`.
fn lag(grid: &GridSpec, i: usize) -> f64 {
    let n = grid.side();
    let k = if i < n / 2 { i as isize } else { i as isize - n as isize };
    k as f64 * grid.spacing()
}

/// A translation-invariant kernel stored by its transform, ready for
/// circular convolution on the padded grid.
#[derive(Clone, Debug)]
pub struct Kernel {
    grid: GridSpec,
    hat: Vec<C64>,
}

impl Kernel {
    /// Samples `k` at every lag of the padded torus. `self_value` is used for
    /// the zero lag.
    pub fn from_lags(grid: GridSpec, fft: &Fft2, self_value: C64, k: impl Fn(C64) -> C64) -> Self {
        let n = grid.side();
        let mut data: Vec<C64> = (0..grid.len())
            .map(|idx| {
                let w = C64::new(lag(&grid, idx % n), lag(&grid, idx / n));
                if idx == 0 {
                    self_value
                } else {
                    k(w)
                }
            })
            .collect();
        fft.forward(&mut data);
        let h2 = grid.spacing() * grid.spacing();
        let norm = h2 / (n * n) as f64;
        data.iter_mut().for_each(|v| *v *= norm);
        Self { grid, hat: data }
    }

    /// `h^2 * sum_j k(z - z_j) f_j` at every node.
    pub fn apply(&self, f: &Field, fft: &Fft2) -> Result<Field> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut data = f.values().to_vec();
        fft.forward(&mut data);
        data.iter_mut().zip(&self.hat).for_each(|(d, k)| *d *= k);
        fft.inverse(&mut data);
        Field::from_values(self.grid, data)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Beurling {
    /// Kernel `-1 / (pi z^2)`.
    Pi,
    /// Kernel `-1 / (pi zbar^2)`.
    PiBar,
}

/// Precomputed kernel transforms of the four singular operators on one grid.
///
/// Inputs are restricted to the disc before convolving; outputs cover the
/// whole padded square. The zero lag of each kernel is set to 0, which is the
/// exact cell integral of an odd kernel over a centred square.
#[derive(Clone, Debug)]
pub struct OperatorWorkspace {
    grid: GridSpec,
    fft: Fft2,
    cauchy: Kernel,
    conj_cauchy: Kernel,
    pi: Kernel,
    pi_bar: Kernel,
}

impl OperatorWorkspace {
    pub fn new(grid: GridSpec) -> Result<Self> {
        if grid.pad_factor() < 2 {
            return Err(Error::Unpadded(grid.pad_factor()));
        }
        let fft = Fft2::new(grid.side());
        let zero = C64::new(0.0, 0.0);
        let cauchy = Kernel::from_lags(grid, &fft, zero, |w| 1.0 / (PI * w));
        let conj_cauchy = Kernel::from_lags(grid, &fft, zero, |w| 1.0 / (PI * w.conj()));
        let pi = Kernel::from_lags(grid, &fft, zero, |w| -1.0 / (PI * w * w));
        let pi_bar = Kernel::from_lags(grid, &fft, zero, |w| -1.0 / (PI * w.conj() * w.conj()));
        Ok(Self {
            grid,
            fft,
            cauchy,
            conj_cauchy,
            pi,
            pi_bar,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    /// `(1/pi) integral f(xi) / (z - xi)`.
    pub fn cauchy(&self, f: &Field) -> Result<Field> {
        self.cauchy.apply(&f.restrict_to_disc(), &self.fft)
    }

    /// `(1/pi) integral f(xi) / (zbar - xibar)`.
    pub fn conj_cauchy(&self, f: &Field) -> Result<Field> {
        self.conj_cauchy.apply(&f.restrict_to_disc(), &self.fft)
    }

    pub fn beurling(&self, f: &Field, variant: Beurling) -> Result<Field> {
        let k = match variant {
            Beurling::Pi => &self.pi,
            Beurling::PiBar => &self.pi_bar,
        };
        k.apply(&f.restrict_to_disc(), &self.fft)
    }

    pub fn convolve(&self, kernel: &Kernel, f: &Field) -> Result<Field> {
        kernel.apply(f, &self.fft)
    }
}

/// Transform `F(xi) = (1/2pi) integral e^{-i xi.x} f(x) dx` sampled at
/// `xi = (pi/L) k` with `k` wrapped to `[-N/2, N/2)` in both components.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: GridSpec,
    values: Vec<C64>,
}

impl Spectrum {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    /// Frequency at array index `idx`, packed as `xi_1 + i xi_2`.
    pub fn frequency(&self, idx: usize) -> C64 {
        frequency(&self.grid, idx)
    }
}

fn frequency(grid: &GridSpec, idx: usize) -> C64 {
    let n = grid.side();
    let step = PI / grid.half_width();
    let wrap = |i: usize| if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
    C64::new(wrap(idx % n) * step, wrap(idx / n) * step)
}

pub fn fourier_transform(f: &Field, fft: &Fft2) -> Spectrum {
    let g = *f.grid();
    let mut data = f.values().to_vec();
    fft.forward(&mut data);
    let x0 = g.coord(0);
    let c = g.spacing() * g.spacing() / (2.0 * PI);
    for (idx, v) in data.iter_mut().enumerate() {
        let xi = frequency(&g, idx);
        *v *= C64::from_polar(c, -(xi.re + xi.im) * x0);
    }
    Spectrum { grid: g, values: data }
}

pub fn inverse_fourier_transform(s: &Spectrum, fft: &Fft2) -> Field {
    let g = s.grid;
    let n = g.side();
    let x0 = g.coord(0);
    let c = 2.0 * PI / (g.spacing() * g.spacing() * (n * n) as f64);
    let mut data: Vec<C64> = s
        .values
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let xi = frequency(&g, idx);
            v * C64::from_polar(c, (xi.re + xi.im) * x0)
        })
        .collect();
    fft.inverse(&mut data);
    Field::from_values(g, data).expect("length preserved")
}

/// `(sgn n / 2pi) exp(-i (xi^2 + xibar^2) / (16 n))`.
pub fn gaussian_kernel_hat(n: f64, xi: C64) -> Result<C64> {
    if n == 0.0 || !n.is_finite() {
        return Err(invalid("n", "must be finite and nonzero"));
    }
    let phase = -2.0 * (xi.re * xi.re - xi.im * xi.im) / (16.0 * n);
    Ok(C64::from_polar(n.signum() / (2.0 * PI), phase))
}

/// The kernel `(2n/pi) exp(i n (z^2 + zbar^2))`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianKernel {
    n: f64,
    grid: GridSpec,
}

/// Separable window equal to 1 for `|x|, |y| <= plateau` and 0 beyond `edge`.
#[derive(Clone, Copy, Debug)]
pub struct Taper {
    pub plateau: f64,
    pub edge: f64,
}

impl Taper {
    pub fn weight(&self, x: f64) -> f64 {
        smooth_step(1.0 + (x.abs() - self.plateau) / (self.edge - self.plateau))
    }
}

impl GaussianKernel {
    pub fn new(n: f64, grid: GridSpec) -> Result<Self> {
        if n == 0.0 || !n.is_finite() {
            return Err(invalid("n", "must be finite and nonzero"));
        }
        Ok(Self { n, grid })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn value(&self, z: C64) -> C64 {
        let r = 2.0 * (z.re * z.re - z.im * z.im);
        C64::from_polar(2.0 * self.n / PI, self.n * r)
    }

    /// Values at every grid node.
    pub fn sample(&self) -> Field {
        Field::from_fn(self.grid, |z| self.value(z))
    }

    /// Node values multiplied by a smooth window. Truncating the chirp with a
    /// hard edge leaves an O(1/(L sqrt(n))) ripple in its transform; the
    /// window suppresses it.
    pub fn sample_tapered(&self, taper: Taper) -> Field {
        Field::from_fn(self.grid, |z| self.value(z) * taper.weight(z.re) * taper.weight(z.im))
    }

    /// Convolution kernel on the lags of the padded torus.
    pub fn kernel(&self, fft: &Fft2) -> Kernel {
        Kernel::from_lags(self.grid, fft, C64::new(2.0 * self.n / PI, 0.0), |w| self.value(w))
    }
}

/// `h^2/pi * sum_j f_j / (z - z_j)` over disc nodes at arbitrary points.
pub fn cauchy_at(f: &Field, points: &[C64]) -> Vec<C64> {
    direct_sum(f, points, |z, w| 1.0 / (z - w))
}

/// `h^2/pi * sum_j f_j / (zbar - zbar_j)` over disc nodes at arbitrary points.
pub fn conj_cauchy_at(f: &Field, points: &[C64]) -> Vec<C64> {
    direct_sum(f, points, |z, w| 1.0 / (z - w).conj())
}

fn direct_sum(f: &Field, points: &[C64], k: impl Fn(C64, C64) -> C64 + Sync) -> Vec<C64> {
    let g = *f.grid();
    let src: Vec<(C64, C64)> = g
        .disc_indices()
        .into_iter()
        .map(|i| (g.point(i), f.values()[i]))
        .filter(|(_, v)| *v != C64::new(0.0, 0.0))
        .collect();
    let c = g.spacing() * g.spacing() / PI;
    points
        .par_iter()
        .map(|&z| src.iter().map(|&(w, v)| v * k(z, w)).sum::<C64>() * c)
        .collect()
}

/// Smooth random field: a few low Fourier modes with random coefficients,
/// restricted to the disc and scaled to unit sup norm.
pub fn random_smooth_field(grid: GridSpec, rng: &mut impl Rng) -> Field {
    let modes: Vec<(f64, f64, C64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    let f = Field::from_fn_disc(grid, |z| {
        modes
            .iter()
            .map(|&(a, b, c)| c * C64::from_polar(1.0, a * z.re + b * z.im))
            .sum()
    });
    let s = lp_norm(&f, f64::INFINITY).unwrap_or(1.0);
    if s > 0.0 {
        f.scale(C64::new(1.0 / s, 0.0))
    } else {
        f
    }
}

/// Lower estimate of the `L^p(Omega) -> L^p(Omega)` norm of a linear map by
/// the nonlinear power iteration for `p`-norms. `adjoint` must be the adjoint
/// for the pairing `<a, b> = integral a conj(b)`.
pub fn estimate_lp_operator_norm(
    grid: GridSpec,
    p: f64,
    iterations: usize,
    seed: u64,
    op: impl Fn(&Field) -> Result<Field>,
    adjoint: impl Fn(&Field) -> Result<Field>,
) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", "must be finite and > 1"));
    }
    let q = p / (p - 1.0);
    let dual = |f: &Field, e: f64| {
        f.map(|v| {
            let a = v.norm();
            if a == 0.0 {
                v
            } else {
                v * a.powf(e - 2.0)
            }
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_smooth_field(grid, &mut rng);
    let mut best = 0.0f64;
    for _ in 0..iterations {
        let nx = lp_norm(&x, p)?;
        if nx == 0.0 {
            break;
        }
        x = x.scale(C64::new(1.0 / nx, 0.0));
        let y = op(&x)?.restrict_to_disc();
        best = best.max(lp_norm(&y, p)?);
        let z = adjoint(&dual(&y, p))?.restrict_to_disc();
        x = dual(&z, q);
    }
    Ok(best)
}

/// Empirical `C_p` (norm of the Cauchy transform on `L^p(Omega)`).
pub fn cauchy_norm_estimate(ws: &OperatorWorkspace, p: f64, iterations: usize, seed: u64) -> Result<f64> {
    estimate_lp_operator_norm(
        *ws.grid(),
        p,
        iterations,
        seed,
        |f| ws.cauchy(f),
        |f| Ok(ws.conj_cauchy(f)?.scale(C64::new(-1.0, 0.0))),
    )
}

/// Empirical `B_p` (norm of the Beurling transform on `L^p(Omega)`).
pub fn beurling_norm_estimate(ws: &OperatorWorkspace, p: f64, iterations: usize, seed: u64) -> Result<f64> {
    estimate_lp_operator_norm(
        *ws.grid(),
        p,
        iterations,
        seed,
        |f| ws.beurling(f, Beurling::Pi),
        |f| ws.beurling(f, Beurling::PiBar),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{diff, integrate_disc};
    use crate::potential::Potential;

    fn rel_l2_disc(a: &Field, b: &Field, margin: f64) -> f64 {
        let g = a.grid();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..g.len() {
            if g.point(i).norm() < 1.0 - margin {
                num += (a.values()[i] - b.values()[i]).norm_sqr();
                den += b.values()[i].norm_sqr();
            }
        }
        (num / den).sqrt()
    }

    #[test]
    fn rejects_unpadded_grid() {
        let g = GridSpec::new(16, 1).unwrap();
        assert!(matches!(OperatorWorkspace::new(g), Err(Error::Unpadded(1))));
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = GridSpec::new(32, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let z = Field::zeros(g);
        for out in [
            ws.cauchy(&z).unwrap(),
            ws.conj_cauchy(&z).unwrap(),
            ws.beurling(&z, Beurling::Pi).unwrap(),
            ws.beurling(&z, Beurling::PiBar).unwrap(),
        ] {
            assert!(out.values().iter().all(|v| v.norm() < 1e-15));
        }
    }

    #[test]
    fn cauchy_of_one_is_zbar_on_disc() {
        let g = GridSpec::new(128, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let one = Field::from_fn_disc(g, |_| C64::new(1.0, 0.0));
        let zbar = Field::from_fn(g, |z| z.conj());
        let c = ws.cauchy(&one).unwrap();
        assert!(rel_l2_disc(&c, &zbar, 0.0) < 0.02);
        let z = Field::from_fn(g, |z| z);
        assert!(rel_l2_disc(&ws.conj_cauchy(&one).unwrap(), &z, 0.0) < 0.02);
    }

    #[test]
    fn dbar_inverts_cauchy_on_a_bump() {
        let err = |n| {
            let g = GridSpec::new(n, 2).unwrap();
            let ws = OperatorWorkspace::new(g).unwrap();
            let b = Potential::default_bump().sample(&g);
            let e1 = rel_l2_disc(&diff::dzbar(&ws.cauchy(&b).unwrap()), &b, 0.0);
            let e2 = rel_l2_disc(&diff::dz(&ws.conj_cauchy(&b).unwrap()), &b, 0.0);
            (e1, e2)
        };
        let (a1, a2) = err(64);
        let (b1, b2) = err(128);
        assert!(b1 < 0.05 && b2 < 0.05, "{b1} {b2}");
        assert!(b1 < a1 && b2 < a2);
    }

    #[test]
    fn beurling_matches_derivative_of_cauchy() {
        let g = GridSpec::new(128, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let b = Potential::default_bump().sample(&g);
        let pi = ws.beurling(&b, Beurling::Pi).unwrap();
        let d = diff::dz(&ws.cauchy(&b).unwrap());
        assert!(rel_l2_disc(&pi, &d, 0.0) < 0.05);
        let pib = ws.beurling(&b, Beurling::PiBar).unwrap();
        let db = diff::dzbar(&ws.conj_cauchy(&b).unwrap());
        assert!(rel_l2_disc(&pib, &db, 0.0) < 0.05);
    }

    #[test]
    fn beurling_restricted_norm_at_most_one() {
        let g = GridSpec::new(128, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let f = random_smooth_field(g, &mut rng);
            let pf = ws.beurling(&f, Beurling::Pi).unwrap();
            let r = lp_norm(&pf, 2.0).unwrap() / lp_norm(&f, 2.0).unwrap();
            assert!(r <= 1.05, "{r}");
        }
    }

    #[test]
    fn radial_conjugate_symmetry() {
        let g = GridSpec::new(64, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let b = Potential::default_bump().sample(&g);
        let c = ws.cauchy(&b).unwrap();
        let cb = ws.conj_cauchy(&b).unwrap();
        let n = g.side();
        let reach = g.half_width() - 1.0;
        for iy in 0..n {
            for ix in 0..n {
                let z = g.node(ix, iy);
                // beyond `reach` the periodic images of the disc interfere
                if z.re.abs() >= reach || z.im.abs() >= reach {
                    continue;
                }
                // the grid is symmetric under y -> -y
                let mirrored = c.at(ix, n - 1 - iy);
                assert!((mirrored - c.at(ix, iy).conj()).norm() < 1e-12);
                assert!((mirrored - cb.at(ix, iy)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_round_trip() {
        let g = GridSpec::new(64, 2).unwrap();
        let fft = Fft2::new(g.side());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_smooth_field(g, &mut rng);
        let back = inverse_fourier_transform(&fourier_transform(&f, &fft), &fft);
        let num: f64 = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = f.values().iter().map(|a| a.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-10);
    }

    #[test]
    fn fourier_transform_of_gaussian() {
        // exp(-2|x|^2) has transform exp(-|xi|^2 / 8) / 4 in this convention
        let g = GridSpec::new(64, 4).unwrap();
        let fft = Fft2::new(g.side());
        let f = Field::from_fn(g, |z| C64::new((-2.0 * z.norm_sqr()).exp(), 0.0));
        let s = fourier_transform(&f, &fft);
        for idx in 0..g.len() {
            let xi = s.frequency(idx);
            if xi.norm() < 5.0 {
                let want = (-xi.norm_sqr() / 8.0).exp() / 4.0;
                assert!((s.values()[idx] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn kernel_hat_closed_form() {
        let v = gaussian_kernel_hat(3.0, C64::new(0.0, 0.0)).unwrap();
        assert!((v - 1.0 / (2.0 * PI)).norm() < 1e-15);
        let v = gaussian_kernel_hat(-2.0, C64::new(0.0, 0.0)).unwrap();
        assert!((v + 1.0 / (2.0 * PI)).norm() < 1e-15);
        for xi in [C64::new(1.5, -2.0), C64::new(-7.0, 0.3)] {
            assert!((gaussian_kernel_hat(5.0, xi).unwrap().norm() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
        assert!(gaussian_kernel_hat(0.0, C64::new(1.0, 0.0)).is_err());
        assert!(GaussianKernel::new(0.0, GridSpec::new(8, 2).unwrap()).is_err());
    }

    #[test]
    fn kernel_modulus_is_constant() {
        let g = GridSpec::new(32, 2).unwrap();
        let k = GaussianKernel::new(-3.0, g).unwrap().sample();
        assert!(k.values().iter().all(|v| (v.norm() - 6.0 / PI).abs() < 1e-12));
    }

    #[test]
    fn direct_sum_matches_fft_on_nodes() {
        let g = GridSpec::new(32, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let b = Potential::default_bump().sample(&g);
        let c = ws.cauchy(&b).unwrap();
        // off-disc nodes avoid the zero lag; the square of half-width L - 1
        // is free of periodic images
        let reach = g.half_width() - 1.0;
        let idx: Vec<usize> = (0..g.len())
            .filter(|&i| {
                let z = g.point(i);
                !g.in_disc(i) && z.re.abs() < reach && z.im.abs() < reach
            })
            .collect();
        assert!(idx.len() > 50);
        let pts: Vec<C64> = idx.iter().map(|&i| g.point(i)).collect();
        let d = cauchy_at(&b, &pts);
        for (k, &i) in idx.iter().enumerate() {
            assert!((d[k] - c.values()[i]).norm() < 1e-12);
        }
        let cb = ws.conj_cauchy(&b).unwrap();
        let d = conj_cauchy_at(&b, &pts);
        for (k, &i) in idx.iter().enumerate() {
            assert!((d[k] - cb.values()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn adjoint_pairing() {
        let g = GridSpec::new(32, 2).unwrap();
        let ws = OperatorWorkspace::new(g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_smooth_field(g, &mut rng);
        let h = random_smooth_field(g, &mut rng);
        let ip = |a: &Field, b: &Field| integrate_disc(&a.zip_with(b, |x, y| x * y.conj()).unwrap());
        let lhs = ip(&ws.cauchy(&f).unwrap(), &h);
        let rhs = ip(&f, &ws.conj_cauchy(&h).unwrap().scale(C64::new(-1.0, 0.0)));
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        let lhs = ip(&ws.beurling(&f, Beurling::Pi).unwrap(), &h);
        let rhs = ip(&f, &ws.beurling(&h, Beurling::PiBar).unwrap());
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]

        #[test]
        fn operators_are_linear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let g = GridSpec::new(16, 2).unwrap();
            let ws = OperatorWorkspace::new(g).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_smooth_field(g, &mut rng);
            let h = random_smooth_field(g, &mut rng);
            let ca = C64::new(a, 0.5);
            let cb = C64::new(-0.25, b);
            let comb = f.scale(ca).add(&h.scale(cb)).unwrap();
            let ops: Vec<Box<dyn Fn(&Field) -> Field>> = vec![
                Box::new(|x| ws.cauchy(x).unwrap()),
                Box::new(|x| ws.conj_cauchy(x).unwrap()),
                Box::new(|x| ws.beurling(x, Beurling::Pi).unwrap()),
                Box::new(|x| ws.beurling(x, Beurling::PiBar).unwrap()),
            ];
            for op in &ops {
                let lhs = op(&comb);
                let rhs = op(&f).scale(ca).add(&op(&h).scale(cb)).unwrap();
                let err = lhs.values().iter().zip(rhs.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                proptest::prop_assert!(err < 1e-12);
            }
        }
    }
}
