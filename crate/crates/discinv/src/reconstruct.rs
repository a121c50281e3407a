//! Pointwise recovery of a potential from boundary data of oscillating
//! solutions.
//!
//! The Cauchy data of `u1` is generated from the known potential (the solver
//! has no access to a measured Dirichlet-to-Neumann map). After that, only the
//! boundary pair and the explicit reference solution enter the functional
//! `(2n/pi) ∮ u1 ∂_n u2 - u2 ∂_n u1 dσ`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::cgo::{phase, phase_field, solve_cgo, CGOParams, CGOSolution, Kind, SolverOptions};
use crate::error::{invalid, Result};
use crate::forward::{boundary_pairing, BoundaryGrid, CauchyPair};
use crate::grid::{integrate_disc, Field};
use crate::operators::{cauchy_at, conj_cauchy_at, OperatorWorkspace};
use crate::potential::Potential;

/// `d/dθ` of periodic samples by FFT.
fn spectral_derivative(values: &[C64]) -> Vec<C64> {
    let m = values.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut data = values.to_vec();
    fwd.process(&mut data);
    for (k, v) in data.iter_mut().enumerate() {
        let kk = if k < m / 2 {
            k as f64
        } else if k == m / 2 && m % 2 == 0 {
            0.0
        } else {
            k as f64 - m as f64
        };
        *v *= C64::new(0.0, kk / m as f64);
    }
    inv.process(&mut data);
    data
}

/// Trace and normal derivative of `u = e^{inψ} (1 + r)` on the circle.
///
/// The remainder and its inner transform are summed directly at the boundary
/// nodes. The normal derivative uses `∂_r = z ∂ + zbar ∂̄` with the tangential
/// part from the spectral derivative of the trace and the transverse part
/// from the interior limit of `∂̄ r` (first kind) or `∂ r` (second kind).
pub fn cgo_cauchy_pair(sol: &CGOSolution, q: &Field, boundary: BoundaryGrid) -> Result<CauchyPair> {
    let p = sol.params;
    let grid = *q.grid();
    let e = phase_field(p.n, p.z0, grid, 1.0);
    let src = e.mul(q)?.mul(&sol.f)?;
    let pts = boundary.points();
    let outer = sol.inner.zip_with(&e, |a, b| a * b.conj())?.restrict_to_disc();
    let i = C64::i();
    let (rem, inner) = match p.kind {
        Kind::First => (cauchy_at(&outer, &pts), conj_cauchy_at(&src, &pts)),
        Kind::Second => (conj_cauchy_at(&outer, &pts), cauchy_at(&src, &pts)),
    };
    let rem: Vec<C64> = rem.into_iter().map(|v| v * -0.25).collect();
    let dtheta = spectral_derivative(&rem);
    let mut trace = Vec::with_capacity(pts.len());
    let mut dn = Vec::with_capacity(pts.len());
    for k in 0..pts.len() {
        let z = pts[k];
        let transverse = inner[k] * C64::from_polar(-0.25, -p.n * phase(z, p.z0));
        let ex = p.kind.exponential(p.n, z, p.z0);
        let (dr_rem, dr_phase) = match p.kind {
            Kind::First => (-i * dtheta[k] + 2.0 * z.conj() * transverse, 2.0 * i * p.n * z * (z - p.z0)),
            Kind::Second => (i * dtheta[k] + 2.0 * z * transverse, 2.0 * i * p.n * (z * (z - p.z0)).conj()),
        };
        trace.push(ex * (1.0 + rem[k]));
        dn.push(ex * (dr_phase * (1.0 + rem[k]) + dr_rem));
    }
    CauchyPair::new(boundary, trace, dn)
}

/// Cauchy data of the zero-potential reference `e^{in (zbar - zbar0)^2}`.
pub fn reference_pair(boundary: BoundaryGrid, n: f64, z0: C64) -> CauchyPair {
    let i = C64::i();
    CauchyPair::from_fn(
        boundary,
        |z| Kind::Second.exponential(n, z, z0),
        |z| Kind::Second.exponential(n, z, z0) * 2.0 * i * n * (z * (z - z0)).conj(),
    )
}

/// `(2n/pi) ∮ u1 ∂_n u2 - u2 ∂_n u1 dσ` with the closed-form reference `u2`.
pub fn reconstruct_point(data1: &CauchyPair, n: f64, z0: C64) -> Result<C64> {
    if z0.norm() >= 1.0 {
        return Err(invalid("z0", "must lie inside the unit disc"));
    }
    let u2 = reference_pair(data1.boundary, n, z0);
    reconstruct_point_with(data1, &u2, n)
}

/// Same functional with an arbitrary second-kind pair.
pub fn reconstruct_point_with(data1: &CauchyPair, data2: &CauchyPair, n: f64) -> Result<C64> {
    Ok(boundary_pairing(data1, data2)? * (2.0 * n / PI))
}

#[derive(Clone, Debug)]
pub struct ReconstructionConfig {
    pub n_list: Vec<f64>,
    pub z0_list: Vec<C64>,
    pub boundary_nodes: usize,
    pub p: f64,
    pub solver: SolverOptions,
}

impl ReconstructionConfig {
    pub fn new(n_list: Vec<f64>, z0_list: Vec<C64>) -> Self {
        Self {
            n_list,
            z0_list,
            boundary_nodes: 2048,
            p: 4.0,
            solver: SolverOptions::default(),
        }
    }
}

/// 3 x 3 lattice of centres at spacing `d` around the origin.
pub fn lattice_3x3(d: f64) -> Vec<C64> {
    let s = [-d, 0.0, d];
    s.iter()
        .flat_map(|&y| s.iter().map(move |&x| C64::new(x, y)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct PointRecord {
    pub z0: C64,
    pub n: f64,
    pub qhat: C64,
    pub qref: C64,
    pub abs_err: f64,
    /// `(2n/pi) ∫ (q1 - q2) u1 u2 dm` evaluated on the grid.
    pub volume: C64,
    /// `|qhat - volume| / max(|volume|, sup|q1 - q2|)`.
    pub bridge_rel: f64,
    pub iterations: usize,
    pub contraction: f64,
    pub failure: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSummary {
    pub n: f64,
    pub sup_err: f64,
    /// Discrete `L²(Ω, z0)` error with each centre weighted by `pi / count`.
    pub l2_err: f64,
}

#[derive(Clone, Debug)]
pub struct ReconstructionReport {
    pub records: Vec<PointRecord>,
    pub summary: Vec<ErrorSummary>,
    pub runtime_secs: f64,
}

impl ReconstructionReport {
    pub fn max_bridge_rel(&self) -> f64 {
        self.records.iter().map(|r| r.bridge_rel).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.failure.is_some()).count()
    }
}

fn sup_abs(f: &Field) -> f64 {
    f.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn reconstruct_one(
    q1: &Field,
    q2: Option<&Field>,
    qref: C64,
    n: f64,
    z0: C64,
    cfg: &ReconstructionConfig,
    ws: &OperatorWorkspace,
) -> Result<PointRecord> {
    let boundary = BoundaryGrid::new(cfg.boundary_nodes)?;
    let s1 = solve_cgo(q1, CGOParams::new(n, z0, cfg.p, Kind::First)?, cfg.solver, ws)?;
    let data1 = cgo_cauchy_pair(&s1, q1, boundary)?;
    let e = phase_field(n, z0, *ws.grid(), 1.0);
    let (qhat, volume, iterations, contraction, scale) = match q2 {
        None => {
            let qhat = reconstruct_point(&data1, n, z0)?;
            let volume = integrate_disc(&e.mul(q1)?.mul(&s1.f)?) * (2.0 * n / PI);
            (qhat, volume, s1.iterations, s1.empirical_contraction, sup_abs(q1))
        }
        Some(q2) => {
            let s2 = solve_cgo(q2, CGOParams::new(n, z0, cfg.p, Kind::Second)?, cfg.solver, ws)?;
            let data2 = cgo_cauchy_pair(&s2, q2, boundary)?;
            let qhat = reconstruct_point_with(&data1, &data2, n)?;
            let dq = q1.sub(q2)?;
            let volume = integrate_disc(&e.mul(&dq)?.mul(&s1.f)?.mul(&s2.f)?) * (2.0 * n / PI);
            (
                qhat,
                volume,
                s1.iterations.max(s2.iterations),
                s1.empirical_contraction.max(s2.empirical_contraction),
                sup_abs(&dq),
            )
        }
    };
    let scale = volume.norm().max(scale);
    let bridge_rel = if scale == 0.0 { (qhat - volume).norm() } else { (qhat - volume).norm() / scale };
    Ok(PointRecord {
        z0,
        n,
        qhat,
        qref,
        abs_err: (qhat - qref).norm(),
        volume,
        bridge_rel,
        iterations,
        contraction,
        failure: None,
    })
}

/// Reconstructs `(q1 - q2)(z0)` on every `(n, z0)` pair; `q2 = None` means
/// the zero reference. Per-point failures are recorded, not propagated.
pub fn reconstruct_grid(
    q1: &Potential,
    q2: Option<&Potential>,
    cfg: &ReconstructionConfig,
    ws: &OperatorWorkspace,
) -> Result<ReconstructionReport> {
    if cfg.n_list.iter().any(|&n| !(n > 1.0 && n.is_finite())) {
        return Err(invalid("n", "every frequency must be finite and > 1"));
    }
    if cfg.z0_list.iter().any(|z| z.norm() >= 1.0) {
        return Err(invalid("z0", "every centre must lie inside the unit disc"));
    }
    let start = Instant::now();
    let grid = *ws.grid();
    let f1 = q1.sample(&grid);
    let q2 = q2.filter(|q| !q.is_zero());
    let f2 = q2.map(|q| q.sample(&grid));
    let jobs: Vec<(f64, C64)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.z0_list.iter().map(move |&z| (n, z)))
        .collect();
    let records: Vec<PointRecord> = jobs
        .par_iter()
        .map(|&(n, z0)| {
            let qref = q1.eval(z0) - q2.map(|q| q.eval(z0)).unwrap_or_default();
            reconstruct_one(&f1, f2.as_ref(), qref, n, z0, cfg, ws).unwrap_or_else(|e| PointRecord {
                z0,
                n,
                qhat: C64::new(f64::NAN, f64::NAN),
                qref,
                abs_err: f64::NAN,
                volume: C64::new(f64::NAN, f64::NAN),
                bridge_rel: f64::NAN,
                iterations: 0,
                contraction: f64::NAN,
                failure: Some(e.to_string()),
            })
        })
        .collect();
    let summary = cfg
        .n_list
        .iter()
        .map(|&n| {
            let errs: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.abs_err).collect();
            let sup = errs.iter().copied().fold(0.0, f64::max);
            let w = PI / errs.len().max(1) as f64;
            let l2 = (errs.iter().map(|e| e * e).sum::<f64>() * w).sqrt();
            ErrorSummary {
                n,
                sup_err: if errs.iter().any(|e| e.is_nan()) { f64::NAN } else { sup },
                l2_err: l2,
            }
        })
        .collect();
    Ok(ReconstructionReport {
        records,
        summary,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}
