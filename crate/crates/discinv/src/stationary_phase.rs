//! The oscillatory averaging operator
//! `T_n f(z0) = (2n/pi) ∫ e^{i n R(z; z0)} f(z) dm(z)` and its diagnostics.
//!
//! The chirp has local frequency `4n|z - z0|`, so a grid of spacing `h`
//! resolves it over separations up to `pi / (4 n h)`. Results are only
//! meaningful while that covers the support of `f` as seen from `z0`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::cgo::phase_field;
use crate::error::{invalid, Error, Result};
use crate::grid::{integrate_disc, lp_norm, Field, GridSpec};
use crate::operators::{fourier_transform, inverse_fourier_transform, GaussianKernel, OperatorWorkspace};

#[derive(Clone, Debug)]
pub struct PhaseParams {
    pub n: f64,
    pub z0_grid: Vec<C64>,
}

impl PhaseParams {
    pub fn new(n: f64, z0_grid: Vec<C64>) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("n", format!("must be finite and positive, got {n}")));
        }
        if z0_grid.iter().any(|z| z.norm() >= 1.0) {
            return Err(invalid("z0_grid", "all centres must lie inside the disc"));
        }
        Ok(Self { n, z0_grid })
    }
}

fn check_n(n: f64) -> Result<()> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(invalid("n", format!("must be finite and positive, got {n}")))
    }
}

/// `T_n f` on the whole padded grid by convolution with `κ_n`.
pub fn apply_tn(f: &Field, n: f64, ws: &OperatorWorkspace) -> Result<Field> {
    check_n(n)?;
    let kernel = GaussianKernel::new(n, *ws.grid())?.kernel(ws.fft());
    ws.convolve(&kernel, &f.restrict_to_disc())
}

/// `T_n f` through its Fourier multiplier `e^{-i (xi^2 + xibar^2) / (16 n)}`
/// applied to the discrete transform. This is the periodic version.
pub fn apply_tn_multiplier(f: &Field, n: f64, ws: &OperatorWorkspace) -> Result<Field> {
    check_n(n)?;
    let mut s = fourier_transform(&f.restrict_to_disc(), ws.fft());
    for idx in 0..s.values().len() {
        let xi = s.frequency(idx);
        let m = C64::from_polar(1.0, -2.0 * (xi.re * xi.re - xi.im * xi.im) / (16.0 * n));
        s.values_mut()[idx] *= m;
    }
    Ok(inverse_fourier_transform(&s, ws.fft()))
}

/// L² norm over the whole padded square.
pub fn l2_padded(f: &Field) -> f64 {
    let h = f.grid().spacing();
    f.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() * h
}

/// `||T_n f||_{L²(padded square)} / ||f||_{L²(Ω)}`.
pub fn isometry_ratio(f: &Field, n: f64, ws: &OperatorWorkspace) -> Result<f64> {
    let t = apply_tn(f, n, ws)?;
    Ok(l2_padded(&t) / lp_norm(f, 2.0)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: f64,
    pub l2_error: f64,
}

/// `||T_n f - f||_{L²(Ω)}` for each `n`.
pub fn convergence_study(f: &Field, n_list: &[f64], ws: &OperatorWorkspace) -> Result<Vec<ConvergenceRow>> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("n_list", "must be strictly increasing"));
    }
    let f = f.restrict_to_disc();
    n_list
        .par_iter()
        .map(|&n| {
            let t = apply_tn(&f, n, ws)?;
            Ok(ConvergenceRow {
                n,
                l2_error: lp_norm(&t.sub(&f)?, 2.0)?,
            })
        })
        .collect()
}

/// Evaluation centres on a coarsened sub-lattice of the disc nodes: the
/// largest stride that still leaves at least `min_count` centres. Returns the
/// centres and the area each one represents.
pub fn z0_samples(grid: &GridSpec, min_count: usize) -> (Vec<C64>, f64) {
    let n = grid.side();
    let h = grid.spacing();
    let collect = |stride: usize| -> Vec<C64> {
        let offset = (n / 2) % stride;
        (offset..n)
            .step_by(stride)
            .flat_map(|iy| (offset..n).step_by(stride).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| grid.node(ix, iy))
            .filter(|z| z.norm() < 1.0)
            .collect()
    };
    let mut stride = grid.n_side();
    while stride > 1 && collect(stride).len() < min_count {
        stride -= 1;
    }
    let pts = collect(stride);
    let area = (stride as f64 * h).powi(2);
    (pts, area)
}

/// Discrete `L²(Ω, z0)` norm of `z0 -> (2n/pi) ∫ e^{inR} q g_{z0} dm` over the
/// centres in `params`, each weighted by `cell_area`.
pub fn remainder_functional(
    q: &Field,
    g_family: impl Fn(C64) -> Field + Sync,
    params: &PhaseParams,
    cell_area: f64,
) -> Result<f64> {
    let grid = *q.grid();
    let n = params.n;
    let sum: f64 = params
        .z0_grid
        .par_iter()
        .map(|&z0| {
            let g = g_family(z0);
            if g.grid() != &grid {
                return Err(Error::GridMismatch);
            }
            let e = phase_field(n, z0, grid, 1.0);
            let v = integrate_disc(&e.mul(q)?.mul(&g)?) * (2.0 * n / PI);
            Ok(v.norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok((sum * cell_area).sqrt())
}
