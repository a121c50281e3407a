//! Dirichlet problem `Δu + q u = 0` on the unit disc by polar finite
//! differences, boundary data, and the integral identities linking them.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::grid::{integrate_disc, Field, GridSpec};

/// `m` equispaced nodes `θ_k = 2πk/m` on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryGrid {
    m_nodes: usize,
}

impl BoundaryGrid {
    pub fn new(m_nodes: usize) -> Result<Self> {
        if m_nodes < 3 {
            return Err(invalid("m_nodes", "need at least 3 boundary nodes"));
        }
        Ok(Self { m_nodes })
    }

    pub fn len(&self) -> usize {
        self.m_nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.m_nodes as f64
    }

    pub fn point(&self, k: usize) -> C64 {
        C64::from_polar(1.0, self.angle(k))
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.m_nodes).map(|k| self.point(k)).collect()
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.m_nodes as f64
    }

    /// Trapezoid rule for `∮ f dσ`.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().sum::<C64>() * self.weight()
    }
}

/// Trace and outward normal derivative on a boundary grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyPair {
    pub boundary: BoundaryGrid,
    pub trace: Vec<C64>,
    pub normal_deriv: Vec<C64>,
}

impl CauchyPair {
    pub fn new(boundary: BoundaryGrid, trace: Vec<C64>, normal_deriv: Vec<C64>) -> Result<Self> {
        if trace.len() != boundary.len() || normal_deriv.len() != boundary.len() {
            return Err(Error::Format("cauchy pair length does not match boundary grid".into()));
        }
        if trace.iter().chain(&normal_deriv).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Format("cauchy pair has non-finite entries".into()));
        }
        Ok(Self {
            boundary,
            trace,
            normal_deriv,
        })
    }

    /// Pair of a closed-form solution given `u` and `∂_r u` on the circle.
    pub fn from_fn(boundary: BoundaryGrid, u: impl Fn(C64) -> C64, dn: impl Fn(C64) -> C64) -> Self {
        let pts = boundary.points();
        Self {
            boundary,
            trace: pts.iter().map(|&z| u(z)).collect(),
            normal_deriv: pts.iter().map(|&z| dn(z)).collect(),
        }
    }
}

/// `∮ u1 ∂_n u2 - u2 ∂_n u1 dσ`.
pub fn boundary_pairing(a: &CauchyPair, b: &CauchyPair) -> Result<C64> {
    if a.boundary != b.boundary {
        return Err(invalid("boundary", "pairs live on different boundary grids"));
    }
    let vals: Vec<C64> = (0..a.boundary.len())
        .map(|k| a.trace[k] * b.normal_deriv[k] - b.trace[k] * a.normal_deriv[k])
        .collect();
    Ok(a.boundary.integrate(&vals))
}

/// Complex band matrix with LU factorisation by partial pivoting. Row `i`
/// stores columns `i - kl ..= i + ku + kl`; the extra `kl` columns receive
/// pivoting fill-in.
#[derive(Clone, Debug)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![C64::new(0.0, 0.0); n * width],
        }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + self.kl < i || j > i + self.ku + self.kl || j >= self.n {
            return C64::new(0.0, 0.0);
        }
        self.data[self.slot(i, j)]
    }

    /// Matrix-vector product of the unfactorised matrix.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// In-place LU. Fails when a pivot falls below `rel_tol` times the
    /// largest entry.
    pub fn factorize(mut self, rel_tol: f64) -> Result<BandedLu> {
        let n = self.n;
        let scale = self.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut perm = vec![0usize; n];
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).norm();
            for i in k + 1..=last {
                let v = self.get(i, k).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= rel_tol * scale {
                return Err(Error::SingularSystem { row: k, pivot: best });
            }
            perm[k] = p;
            let right = (k + self.ku + self.kl).min(n - 1);
            if p != k {
                for j in k..=right {
                    let a = self.slot(k, j);
                    let b = self.slot(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last {
                let sik = self.slot(i, k);
                let l = self.data[sik] / pivot;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                self.data[sik] = l;
                for j in k + 1..=right {
                    let u = self.data[self.slot(k, j)];
                    let sij = self.slot(i, j);
                    self.data[sij] -= l * u;
                }
            }
        }
        Ok(BandedLu { m: self, perm })
    }
}

#[derive(Clone, Debug)]
pub struct BandedLu {
    m: BandedMatrix,
    perm: Vec<usize>,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let m = &self.m;
        let n = m.n;
        let mut x = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.perm[k]);
            let last = (k + m.kl).min(n - 1);
            let xk = x[k];
            for i in k + 1..=last {
                x[i] -= m.data[m.slot(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let right = (k + m.ku + m.kl).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=right {
                s -= m.data[m.slot(k, j)] * x[j];
            }
            x[k] = s / m.data[m.slot(k, k)];
        }
        x
    }
}

/// Factorised polar discretisation of `Δ + q` with Dirichlet conditions.
///
/// Rings sit at `r_i = i / n_r`, `i = 0..=n_r`, with angles `θ_j = 2πj/n_θ`.
/// Interior rings use the conservative 5-point stencil; the centre uses
/// `4 (mean of ring 1 - u_0) / h^2`.
#[derive(Clone, Debug)]
pub struct DirichletSolver {
    n_r: usize,
    n_theta: usize,
    lu: BandedLu,
}

/// Pivot threshold, relative to the largest matrix entry.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

impl DirichletSolver {
    pub fn new(q: impl Fn(C64) -> C64, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 3 {
            return Err(invalid("n_r", "need at least 3 radial intervals"));
        }
        if n_theta < 4 {
            return Err(invalid("n_theta", "need at least 4 angular nodes"));
        }
        let h = 1.0 / n_r as f64;
        let dt = 2.0 * PI / n_theta as f64;
        let size = 1 + (n_r - 1) * n_theta;
        let mut a = BandedMatrix::zeros(size, n_theta, n_theta);
        let idx = |i: usize, j: usize| 1 + (i - 1) * n_theta + (j % n_theta);
        let inv_h2 = 1.0 / (h * h);
        a.add(0, 0, C64::new(-4.0 * inv_h2, 0.0) + q(C64::new(0.0, 0.0)));
        for j in 0..n_theta {
            a.add(0, idx(1, j), C64::new(4.0 * inv_h2 / n_theta as f64, 0.0));
        }
        for i in 1..n_r {
            let r = i as f64 * h;
            let rp = r + 0.5 * h;
            let rm = r - 0.5 * h;
            let ang = 1.0 / (r * r * dt * dt);
            for j in 0..n_theta {
                let row = idx(i, j);
                let z = C64::from_polar(r, j as f64 * dt);
                a.add(row, row, C64::new(-(rp + rm) / (r * h * h) - 2.0 * ang, 0.0) + q(z));
                a.add(row, idx(i, j + 1), C64::new(ang, 0.0));
                a.add(row, idx(i, j + n_theta - 1), C64::new(ang, 0.0));
                if i + 1 < n_r {
                    a.add(row, idx(i + 1, j), C64::new(rp / (r * h * h), 0.0));
                }
                let inner = if i == 1 { 0 } else { idx(i - 1, j) };
                a.add(row, inner, C64::new(rm / (r * h * h), 0.0));
            }
        }
        Ok(Self {
            n_r,
            n_theta,
            lu: a.factorize(PIVOT_TOLERANCE)?,
        })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Solves for boundary values given at `θ_j`.
    pub fn solve(&self, boundary: &[C64]) -> Result<PolarSolution> {
        let (n_r, nt) = (self.n_r, self.n_theta);
        if boundary.len() != nt {
            return Err(invalid("boundary", format!("expected {nt} values, got {}", boundary.len())));
        }
        let h = 1.0 / n_r as f64;
        let size = 1 + (n_r - 1) * nt;
        let mut rhs = vec![C64::new(0.0, 0.0); size];
        let r = (n_r - 1) as f64 * h;
        let rp = r + 0.5 * h;
        for j in 0..nt {
            rhs[1 + (n_r - 2) * nt + j] = -boundary[j] * (rp / (r * h * h));
        }
        let x = self.lu.solve(&rhs);
        let mut values = vec![C64::new(0.0, 0.0); (n_r + 1) * nt];
        for j in 0..nt {
            values[j] = x[0];
            values[n_r * nt + j] = boundary[j];
        }
        values[nt..n_r * nt].copy_from_slice(&x[1..]);
        Ok(PolarSolution {
            n_r,
            n_theta: nt,
            values,
        })
    }

    pub fn solve_fn(&self, f: impl Fn(f64) -> C64) -> Result<PolarSolution> {
        let nt = self.n_theta;
        let b: Vec<C64> = (0..nt).map(|j| f(2.0 * PI * j as f64 / nt as f64)).collect();
        self.solve(&b)
    }
}

pub fn solve_dirichlet(
    q: impl Fn(C64) -> C64,
    f: impl Fn(f64) -> C64,
    n_r: usize,
    n_theta: usize,
) -> Result<PolarSolution> {
    DirichletSolver::new(q, n_r, n_theta)?.solve_fn(f)
}

/// Nodal values on the polar grid; ring 0 repeats the centre value.
#[derive(Clone, Debug)]
pub struct PolarSolution {
    n_r: usize,
    n_theta: usize,
    values: Vec<C64>,
}

impl PolarSolution {
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 / self.n_r as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.n_theta + (j % self.n_theta)]
    }

    pub fn trace(&self) -> Vec<C64> {
        (0..self.n_theta).map(|j| self.value(self.n_r, j)).collect()
    }

    pub fn boundary_grid(&self) -> BoundaryGrid {
        BoundaryGrid { m_nodes: self.n_theta }
    }

    /// Bilinear interpolation in `(r, θ)`.
    pub fn interpolate(&self, z: C64) -> C64 {
        let r = z.norm().min(1.0);
        let fr = r * self.n_r as f64;
        let i = (fr.floor() as usize).min(self.n_r - 1);
        let t = fr - i as f64;
        let th = z.arg().rem_euclid(2.0 * PI);
        let fj = th / (2.0 * PI) * self.n_theta as f64;
        let j = fj.floor() as usize % self.n_theta;
        let s = fj - fj.floor();
        let ring = |k: usize| self.value(k, j) * (1.0 - s) + self.value(k, j + 1) * s;
        ring(i) * (1.0 - t) + ring(i + 1) * t
    }

    /// Bilinear resampling onto the disc nodes of a Cartesian grid.
    pub fn to_cartesian(&self, grid: GridSpec) -> Field {
        Field::from_fn_disc(grid, |z| self.interpolate(z))
    }

    /// `∫_Ω F dm` for `F` given at the polar nodes, trapezoid in `r dr`.
    pub fn integrate_nodes(&self, f: impl Fn(usize, usize) -> C64) -> C64 {
        let h = 1.0 / self.n_r as f64;
        let dt = 2.0 * PI / self.n_theta as f64;
        let mut total = C64::new(0.0, 0.0);
        for i in 1..=self.n_r {
            let w = if i == self.n_r { 0.5 * h } else { h };
            let r = self.radius(i);
            let ring: C64 = (0..self.n_theta).map(|j| f(i, j)).sum();
            total += ring * (w * r * dt);
        }
        total
    }
}

/// One-sided second-order `∂_r u` at `r = 1`.
pub fn normal_derivative(u: &PolarSolution) -> Vec<C64> {
    let n = u.n_r;
    let h = 1.0 / n as f64;
    (0..u.n_theta)
        .map(|j| (u.value(n, j) * 3.0 - u.value(n - 1, j) * 4.0 + u.value(n - 2, j)) / (2.0 * h))
        .collect()
}

pub fn cauchy_pair(u: &PolarSolution) -> CauchyPair {
    CauchyPair {
        boundary: u.boundary_grid(),
        trace: u.trace(),
        normal_deriv: normal_derivative(u),
    }
}

/// Both sides of `∫_Ω (q1 - q2) u1 u2 dm = ∮ u1 ∂_n u2 - u2 ∂_n u1 dσ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalityGap {
    pub volume: C64,
    pub boundary: C64,
}

impl OrthogonalityGap {
    /// `|volume - boundary| / scale`.
    pub fn relative(&self, scale: f64) -> f64 {
        (self.volume - self.boundary).norm() / scale
    }
}

/// Volume side on a Cartesian grid (fields resampled there beforehand).
pub fn orthogonality_gap(
    q_diff: &Field,
    u1: &Field,
    u2: &Field,
    c1: &CauchyPair,
    c2: &CauchyPair,
) -> Result<OrthogonalityGap> {
    let volume = integrate_disc(&q_diff.mul(u1)?.mul(u2)?);
    Ok(OrthogonalityGap {
        volume,
        boundary: boundary_pairing(c1, c2)?,
    })
}

/// Volume side on the polar grid shared by both solutions.
pub fn orthogonality_gap_polar(
    q_diff: impl Fn(C64) -> C64,
    u1: &PolarSolution,
    u2: &PolarSolution,
) -> Result<OrthogonalityGap> {
    if u1.n_r != u2.n_r || u1.n_theta != u2.n_theta {
        return Err(invalid("u2", "solutions live on different polar grids"));
    }
    let volume = u1.integrate_nodes(|i, j| {
        let z = C64::from_polar(u1.radius(i), u1.angle(j));
        q_diff(z) * u1.value(i, j) * u2.value(i, j)
    });
    Ok(OrthogonalityGap {
        volume,
        boundary: boundary_pairing(&cauchy_pair(u1), &cauchy_pair(u2))?,
    })
}

/// `(∮ u ∂_n v dσ, ∮ v ∂_n u dσ)` for two solutions of the same equation.
pub fn reciprocity(u: &CauchyPair, v: &CauchyPair) -> Result<(C64, C64)> {
    if u.boundary != v.boundary {
        return Err(invalid("boundary", "pairs live on different boundary grids"));
    }
    let b = u.boundary;
    let n = b.len();
    let lhs = b.integrate(&(0..n).map(|k| u.trace[k] * v.normal_deriv[k]).collect::<Vec<_>>());
    let rhs = b.integrate(&(0..n).map(|k| v.trace[k] * u.normal_deriv[k]).collect::<Vec<_>>());
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;

    fn zero(_: C64) -> C64 {
        C64::new(0.0, 0.0)
    }

    fn max_err(u: &PolarSolution, exact: impl Fn(C64) -> C64) -> f64 {
        let mut e = 0.0f64;
        for i in 0..=u.n_r() {
            for j in 0..u.n_theta() {
                let z = C64::from_polar(u.radius(i), u.angle(j));
                e = e.max((u.value(i, j) - exact(z)).norm());
            }
        }
        e
    }

    #[test]
    fn banded_lu_matches_dense_solve() {
        let n = 12;
        let mut a = BandedMatrix::zeros(n, 2, 3);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 3).min(n - 1) {
                // small diagonal forces pivoting
                let d = if i == j { 0.01 } else { 1.0 };
                a.add(i, j, C64::new(d * (1.0 + (i * 7 + j * 3) as f64 % 5.0), (i as f64 - j as f64) * 0.3));
            }
        }
        let x: Vec<C64> = (0..n).map(|k| C64::new(k as f64, 1.0 - k as f64 * 0.5)).collect();
        let b = a.apply(&x);
        let lu = a.factorize(1e-14).unwrap();
        let y = lu.solve(&b);
        for k in 0..n {
            assert!((x[k] - y[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_detected() {
        let mut a = BandedMatrix::zeros(3, 1, 1);
        a.add(0, 0, C64::new(1.0, 0.0));
        a.add(0, 1, C64::new(1.0, 0.0));
        a.add(1, 0, C64::new(1.0, 0.0));
        a.add(1, 1, C64::new(1.0, 0.0));
        a.add(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(a.factorize(1e-12), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn dirichlet_eigenvalue_is_singular() {
        // the discrete operator with its own smallest radial eigenvalue
        let n_r = 8;
        let n_t = 8;
        let probe = DirichletSolver::new(zero, n_r, n_t).unwrap();
        // inverse iteration for the smallest eigenvalue of -Δ_h on radial data
        let mut v: Vec<C64> = vec![C64::new(1.0, 0.0); 1 + (n_r - 1) * n_t];
        let mut lambda = 0.0;
        let size = v.len();
        for _ in 0..200 {
            let w = probe.lu.solve(&v);
            let num: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let den: f64 = w.iter().map(|a| a.norm_sqr()).sum();
            lambda = num / den;
            let s = den.sqrt();
            v = w.iter().map(|a| a / s).collect();
        }
        assert_eq!(v.len(), size);
        let res = DirichletSolver::new(move |_| C64::new(-lambda, 0.0), n_r, n_t);
        assert!(matches!(res, Err(Error::SingularSystem { .. })), "lambda {lambda}");
    }

    #[test]
    fn constants_and_linear_data() {
        let u = solve_dirichlet(zero, |_| C64::new(1.0, 0.0), 16, 32).unwrap();
        assert!(max_err(&u, |_| C64::new(1.0, 0.0)) < 1e-12);
        let e1 = max_err(&solve_dirichlet(zero, |t| C64::new(t.cos(), 0.0), 16, 32).unwrap(), |z| C64::new(z.re, 0.0));
        let e2 = max_err(&solve_dirichlet(zero, |t| C64::new(t.cos(), 0.0), 32, 64).unwrap(), |z| C64::new(z.re, 0.0));
        assert!(e1 < 1e-2 && e2 < e1 / 3.0, "{e1} {e2}");
    }

    #[test]
    fn manufactured_exponential_converges_at_second_order() {
        let minus_one = |_| C64::new(-1.0, 0.0);
        let exact = |z: C64| C64::new(z.re.exp(), 0.0);
        let l2 = |n_r: usize| {
            let u = solve_dirichlet(minus_one, |t| C64::new(t.cos().exp(), 0.0), n_r, 2 * n_r).unwrap();
            let e = u.integrate_nodes(|i, j| {
                let z = C64::from_polar(u.radius(i), u.angle(j));
                C64::new((u.value(i, j) - exact(z)).norm_sqr(), 0.0)
            });
            e.re.sqrt()
        };
        let ratio = l2(16) / l2(32);
        assert!((3.3..4.7).contains(&ratio), "{ratio}");
    }

    #[test]
    fn manufactured_cauchy_data() {
        let minus_one = |_| C64::new(-1.0, 0.0);
        let err = |n_r: usize| {
            let u = solve_dirichlet(minus_one, |t| C64::new(t.cos().exp(), 0.0), n_r, 2 * n_r).unwrap();
            let c = cauchy_pair(&u);
            (0..c.boundary.len())
                .map(|k| {
                    let t = c.boundary.angle(k);
                    let want = t.cos() * t.cos().exp();
                    assert!((c.trace[k].re - t.cos().exp()).abs() < 1e-14);
                    (c.normal_deriv[k].re - want).abs()
                })
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(16), err(32));
        assert!(b < a / 3.0, "{a} {b}");
    }

    #[test]
    fn normal_derivatives_of_closed_forms() {
        let circle = |u: &dyn Fn(C64) -> C64, n_r: usize| {
            let vals: Vec<C64> = (0..=n_r)
                .flat_map(|i| (0..16).map(move |j| (i, j)))
                .map(|(i, j)| u(C64::from_polar(i as f64 / n_r as f64, 2.0 * PI * j as f64 / 16.0)))
                .collect();
            PolarSolution {
                n_r,
                n_theta: 16,
                values: vals,
            }
        };
        let u = circle(&|z| C64::new(z.norm_sqr(), 0.0), 8);
        assert!(normal_derivative(&u).iter().all(|v| (v.re - 2.0).abs() < 1e-12));
        let u = circle(&|_| C64::new(3.0, 0.0), 8);
        assert!(normal_derivative(&u).iter().all(|v| v.norm() < 1e-12));
        let u = circle(&|z| C64::new(z.re, 0.0), 8);
        let d = normal_derivative(&u);
        for (j, v) in d.iter().enumerate() {
            assert!((v.re - u.angle(j).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn cauchy_pair_of_harmonic_data() {
        let u = solve_dirichlet(zero, |_| C64::new(1.0, 0.0), 8, 16).unwrap();
        let c = cauchy_pair(&u);
        assert!(c.trace.iter().all(|v| (v - 1.0).norm() < 1e-14));
        assert!(c.normal_deriv.iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn superposition() {
        let q = |z: C64| Potential::default_bump().eval(z) * 2.0;
        let s = DirichletSolver::new(q, 12, 24).unwrap();
        let a = s.solve_fn(|t| C64::new(t.cos(), 0.0)).unwrap();
        let b = s.solve_fn(|t| C64::new(0.0, (2.0 * t).sin())).unwrap();
        let c = s.solve_fn(|t| C64::new(t.cos() * 2.0, -3.0 * (2.0 * t).sin())).unwrap();
        for k in 0..c.values.len() {
            let want = a.values[k] * 2.0 + b.values[k] * -3.0;
            assert!((c.values[k] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn ring_means_match_boundary_mean() {
        let u = solve_dirichlet(zero, |t| C64::new(0.3 + t.cos() + (3.0 * t).sin(), 0.5), 16, 32).unwrap();
        let bmean: C64 = u.trace().iter().sum::<C64>() / 32.0;
        for i in 0..=16 {
            let m: C64 = (0..32).map(|j| u.value(i, j)).sum::<C64>() / 32.0;
            assert!((m - bmean).norm() < 1e-10);
        }
    }

    #[test]
    fn resampling_error_is_second_order() {
        let err = |n_r: usize| {
            let u = solve_dirichlet(zero, |t| C64::new(t.cos(), 0.0), n_r, 2 * n_r).unwrap();
            let g = GridSpec::new(64, 1).unwrap();
            let f = u.to_cartesian(g);
            let mut e = 0.0f64;
            for i in g.disc_indices() {
                e = e.max((f.values()[i].re - g.point(i).re).abs());
            }
            e
        };
        let (a, b) = (err(16), err(32));
        assert!(b < a / 3.0, "{a} {b}");
    }

    #[test]
    fn trivial_orthogonality() {
        let u = solve_dirichlet(zero, |_| C64::new(1.0, 0.0), 8, 16).unwrap();
        let gap = orthogonality_gap_polar(zero, &u, &u).unwrap();
        assert!(gap.volume.norm() < 1e-14 && gap.boundary.norm() < 1e-10);
    }
}
