//! Oscillating solutions `u = e^{i n (z - z0)^2} (1 + r)` of `Δu + qu = 0`
//! built by fixed-point iteration, with the smooth cutoffs and diagnostics
//! that go with them.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::{diff, holder_norm_estimate, lp_norm, Field, GridSpec, HolderSampling};
use crate::operators::{random_smooth_field, OperatorWorkspace};

fn flat(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `g(2 - x) / (g(2 - x) + g(x - 1))` with `g(x) = e^{-1/x}` for `x > 0`:
/// equal to 1 for `x <= 1`, 0 for `x >= 2`, smooth and monotone between.
pub fn smooth_step(x: f64) -> f64 {
    let a = flat(2.0 - x);
    let b = flat(x - 1.0);
    a / (a + b)
}

#[derive(Clone, Copy, Debug)]
pub struct CutoffParams {
    z0: C64,
    delta: f64,
}

impl CutoffParams {
    pub fn new(z0: C64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        if z0.norm() >= 1.0 {
            return Err(invalid("z0", "must lie inside the unit disc"));
        }
        Ok(Self { z0, delta })
    }

    pub fn z0(&self) -> C64 {
        self.z0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `h(z) = γ_S(z) γ_B(z)`: zero near `z0` and near the unit circle.
    pub fn eval(&self, z: C64) -> f64 {
        let d = self.delta;
        let gs = 1.0 - smooth_step(2.0 / d * (z - self.z0).norm());
        let gb = smooth_step(2.0 / d * (z.norm() - (1.0 - d)) + 1.0);
        gs * gb
    }
}

pub fn cutoff(params: CutoffParams, grid: GridSpec) -> Field {
    Field::from_fn(grid, |z| C64::new(params.eval(z), 0.0))
}

/// `R(z) = (z - z0)^2 + (zbar - zbar0)^2`, real.
pub fn phase(z: C64, z0: C64) -> f64 {
    let w = z - z0;
    2.0 * (w.re * w.re - w.im * w.im)
}

/// `e^{sign i n R}` at every node.
pub fn phase_field(n: f64, z0: C64, grid: GridSpec, sign: f64) -> Field {
    Field::from_fn(grid, |z| C64::from_polar(1.0, sign * n * phase(z, z0)))
}

/// Holomorphic phase `e^{i n (z - z0)^2}` or its antiholomorphic mirror.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    First,
    Second,
}

impl Kind {
    pub fn exponential(&self, n: f64, z: C64, z0: C64) -> C64 {
        let w = match self {
            Kind::First => z - z0,
            Kind::Second => (z - z0).conj(),
        };
        (C64::i() * n * w * w).exp()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CGOParams {
    pub n: f64,
    pub z0: C64,
    pub p: f64,
    pub kind: Kind,
}

impl CGOParams {
    pub fn new(n: f64, z0: C64, p: f64, kind: Kind) -> Result<Self> {
        if !(n > 1.0 && n.is_finite()) {
            return Err(invalid("n", format!("must be finite and > 1, got {n}")));
        }
        if z0.norm() >= 1.0 {
            return Err(invalid("z0", "must lie inside the unit disc"));
        }
        if !(p > 2.0 && p.is_finite()) {
            return Err(invalid("p", format!("must be finite and > 2, got {p}")));
        }
        Ok(Self { n, z0, p, kind })
    }

    pub fn first(n: f64, z0: C64) -> Result<Self> {
        Self::new(n, z0, 4.0, Kind::First)
    }

    pub fn alpha(&self) -> f64 {
        1.0 - 2.0 / self.p
    }
}

/// The operator `S` (first kind) or `S̄` (second kind) of the fixed-point
/// equation, together with the inner transform it passes through.
pub struct Step {
    pub image: Field,
    /// `C̄(e^{inR} q f)` for the first kind, `C(e^{inR} q f)` for the second.
    pub inner: Field,
}

pub fn apply_s_with_inner(f: &Field, q: &Field, params: &CGOParams, ws: &OperatorWorkspace) -> Result<Step> {
    let g = *ws.grid();
    let e = phase_field(params.n, params.z0, g, 1.0);
    let src = e.mul(q)?.mul(f)?;
    let (inner, outer) = match params.kind {
        Kind::First => {
            let v = ws.conj_cauchy(&src)?;
            let w = v.zip_with(&e, |a, b| a * b.conj())?;
            (v, ws.cauchy(&w)?)
        }
        Kind::Second => {
            let v = ws.cauchy(&src)?;
            let w = v.zip_with(&e, |a, b| a * b.conj())?;
            (v, ws.conj_cauchy(&w)?)
        }
    };
    Ok(Step {
        image: outer.scale(C64::new(-0.25, 0.0)),
        inner,
    })
}

pub fn apply_s(f: &Field, q: &Field, params: &CGOParams, ws: &OperatorWorkspace) -> Result<Field> {
    Ok(apply_s_with_inner(f, q, params, ws)?.image)
}

fn sup_disc(f: &Field) -> f64 {
    lp_norm(f, f64::INFINITY).expect("infinite p is valid")
}

/// Largest `||S φ||_∞` over random smooth probes with `||φ||_∞ = 1`.
pub fn contraction_probe(
    q: &Field,
    params: &CGOParams,
    ws: &OperatorWorkspace,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..probes {
        let phi = random_smooth_field(*ws.grid(), &mut rng);
        best = best.max(sup_disc(&apply_s(&phi, q, params, ws)?));
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub probes: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 200,
            probes: 10,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CGOSolution {
    pub params: CGOParams,
    /// Fixed point `f = 1 + S f`.
    pub f: Field,
    /// `S f = f - 1`.
    pub remainder: Field,
    /// Inner transform of the last step, see [`Step::inner`].
    pub inner: Field,
    pub iterations: usize,
    /// Probe estimate of the operator norm of `S` in the sup norm.
    pub empirical_contraction: f64,
    /// `||f - 1 - S f||_∞` on the disc.
    pub fixed_point_residual: f64,
    /// Sup-norm size of each update `f^{k+1} - f^k`.
    pub updates: Vec<f64>,
}

impl CGOSolution {
    /// Ratios of successive updates, skipping those already at round-off.
    pub fn step_ratios(&self) -> Vec<f64> {
        self.updates
            .windows(2)
            .filter(|w| w[0] > 1e-13)
            .map(|w| w[1] / w[0])
            .collect()
    }

    /// `u = e^{i n (z - z0)^2} f` (first kind) or `e^{i n (zbar - zbar0)^2} f`.
    pub fn solution(&self) -> Field {
        let p = self.params;
        self.f.map_indexed(|z, v| p.kind.exponential(p.n, z, p.z0) * v)
    }
}

pub fn solve_cgo(q: &Field, params: CGOParams, opts: SolverOptions, ws: &OperatorWorkspace) -> Result<CGOSolution> {
    let one = Field::from_fn(*ws.grid(), |_| C64::new(1.0, 0.0));
    solve_cgo_from(q, params, opts, ws, one)
}

/// Fixed-point iteration `f <- 1 + S f` from an arbitrary start.
pub fn solve_cgo_from(
    q: &Field,
    params: CGOParams,
    opts: SolverOptions,
    ws: &OperatorWorkspace,
    start: Field,
) -> Result<CGOSolution> {
    if q.grid() != ws.grid() || start.grid() != ws.grid() {
        return Err(Error::GridMismatch);
    }
    let factor = contraction_probe(q, &params, ws, opts.probes, opts.seed)?;
    if factor >= 1.0 {
        return Err(Error::NonContractive { factor });
    }
    let mut f = start;
    let mut updates = Vec::new();
    let mut inner = Field::zeros(*ws.grid());
    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let step = apply_s_with_inner(&f, q, &params, ws)?;
        let next = step.image.map(|v| v + 1.0);
        let upd = sup_disc(&next.sub(&f)?);
        updates.push(upd);
        f = next;
        inner = step.inner;
        if upd <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: updates.len(),
            last_update: updates.last().copied().unwrap_or(f64::NAN),
        });
    }
    let check = apply_s_with_inner(&f, q, &params, ws)?;
    let residual = sup_disc(&f.sub(&check.image)?.map(|v| v - 1.0));
    Ok(CGOSolution {
        params,
        remainder: f.map(|v| v - 1.0),
        f,
        inner,
        iterations: updates.len(),
        empirical_contraction: factor,
        fixed_point_residual: residual,
        updates,
    })
}

/// `||Δu + q u||_2 / ||q u||_2` over nodes with `|z| < 1 - margin`,
/// Laplacian by the 5-point stencil.
///
/// The stencil error on the growing, oscillating exponential dominates, so
/// the value can be far above 1 on coarse grids; its decay under refinement
/// is what carries information.
/// For `q = 0` the absolute L² norm of `Δu` is returned.
pub fn pde_residual(sol: &CGOSolution, q: &Field, margin: f64) -> Result<f64> {
    let u = sol.solution();
    let lap = diff::laplacian(&u);
    let qu = q.mul(&u)?;
    let g = u.grid();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..g.len() {
        if g.point(i).norm() < 1.0 - margin {
            num += (lap.values()[i] + qu.values()[i]).norm_sqr();
            den += qu.values()[i].norm_sqr();
        }
    }
    if den == 0.0 {
        // absolute L² norm of the discrete Laplacian
        return Ok(num.sqrt() * g.spacing());
    }
    Ok((num / den).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayRow {
    pub n: f64,
    /// Sup over `z0` of the Hölder-α norm estimate of the remainder.
    pub sup_holder: f64,
    /// Sup over `z0` of `||∂̄ r||_∞` (first kind) or `||∂ r||_∞` (second).
    pub sup_dbar_inf: f64,
    /// Sup over `z0` of `||∂ r||_p` (first kind) or `||∂̄ r||_p` (second).
    pub sup_d_p: f64,
}

/// Norms of one remainder. Derivatives use centred differences and skip the
/// nodes within 1.5 cells of the circle.
pub fn remainder_norms(sol: &CGOSolution) -> Result<(f64, f64, f64)> {
    let r = sol.remainder.restrict_to_disc();
    let g = *r.grid();
    let limit = 1.0 - 1.5 * g.spacing();
    let (d, db) = match sol.params.kind {
        Kind::First => (diff::dz(&r), diff::dzbar(&r)),
        Kind::Second => (diff::dzbar(&r), diff::dz(&r)),
    };
    let inner = |f: Field| f.map_indexed(|z, v| if z.norm() < limit { v } else { C64::new(0.0, 0.0) });
    let holder = holder_norm_estimate(&r, sol.params.alpha(), HolderSampling::default())?;
    let dbar_inf = lp_norm(&inner(db), f64::INFINITY)?;
    let d_p = lp_norm(&inner(d), sol.params.p)?;
    Ok((holder, dbar_inf, d_p))
}

/// One row per `n`: sups over `z0_list` of the three remainder norms.
pub fn remainder_decay(
    q: &Field,
    n_list: &[f64],
    z0_list: &[C64],
    p: f64,
    opts: SolverOptions,
    ws: &OperatorWorkspace,
) -> Result<Vec<DecayRow>> {
    let jobs: Vec<(usize, C64)> = (0..n_list.len())
        .flat_map(|i| z0_list.iter().map(move |&z| (i, z)))
        .collect();
    let norms: Vec<(usize, (f64, f64, f64))> = jobs
        .par_iter()
        .map(|&(i, z0)| {
            let params = CGOParams::new(n_list[i], z0, p, Kind::First)?;
            let sol = solve_cgo(q, params, opts, ws)?;
            Ok((i, remainder_norms(&sol)?))
        })
        .collect::<Result<_>>()?;
    Ok(n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut row = DecayRow {
                n,
                sup_holder: 0.0,
                sup_dbar_inf: 0.0,
                sup_d_p: 0.0,
            };
            for (_, (a, b, c)) in norms.iter().filter(|(j, _)| *j == i) {
                row.sup_holder = row.sup_holder.max(*a);
                row.sup_dbar_inf = row.sup_dbar_inf.max(*b);
                row.sup_d_p = row.sup_d_p.max(*c);
            }
            row
        })
        .collect())
}

/// `C n^{-2/(p(2p+1))}` with `C` fitted so the bound is tight at the first row.
pub fn holder_decay_bound(rows: &[DecayRow], p: f64) -> Vec<f64> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let e = -2.0 / (p * (2.0 * p + 1.0));
    let c = first.sup_holder / first.n.powf(e);
    rows.iter().map(|r| c * r.n.powf(e)).collect()
}

/// Relative L² gap between `C(e^{±inR} g)` and its integrated-by-parts form
/// `±(1/(2in)) (e^{±inR} g/(zbar - zbar0) - C(e^{±inR} ∂̄(g/(zbar - zbar0))))`.
pub fn integration_by_parts_check(g: &Field, n: f64, z0: C64, sign: f64, ws: &OperatorWorkspace) -> Result<f64> {
    let grid = *ws.grid();
    let h = grid.spacing();
    let near = (0..grid.len()).any(|i| (grid.point(i) - z0).norm() < 2.0 * h && g.values()[i] != C64::new(0.0, 0.0));
    if near {
        return Err(invalid("g", "support must stay two cells away from z0"));
    }
    let sign = sign.signum();
    let e = phase_field(n, z0, grid, sign);
    let lhs = ws.cauchy(&e.mul(g)?)?;
    let quotient = g.map_indexed(|z, v| {
        if v == C64::new(0.0, 0.0) {
            v
        } else {
            v / (z - z0).conj()
        }
    });
    let dq = diff::dzbar(&quotient);
    let c = C64::new(0.0, 2.0 * sign * n).inv();
    let rhs = e
        .mul(&quotient)?
        .sub(&ws.cauchy(&e.mul(&dq)?)?)?
        .scale(c);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in grid.disc_indices() {
        num += (lhs.values()[i] - rhs.values()[i]).norm_sqr();
        den += lhs.values()[i].norm_sqr();
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}
