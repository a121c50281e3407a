use std::f64::consts::{E, PI};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use discinv::cgo::{
    cutoff, integration_by_parts_check, pde_residual, phase_field, remainder_decay, smooth_step, solve_cgo,
    CGOParams, CutoffParams, Kind, SolverOptions,
};
use discinv::forward::{cauchy_pair, reciprocity, DirichletSolver};
use discinv::grid::{diff, holder_norm_estimate, integrate_weakly_singular, lp_norm, HolderSampling};
use discinv::io;
use discinv::operators::{beurling_norm_estimate, cauchy_norm_estimate, Beurling, OperatorWorkspace};
use discinv::reconstruct::{lattice_3x3, reconstruct_grid, ReconstructionConfig};
use discinv::stationary_phase::convergence_study;
use discinv::{Complex64 as C64, Field, GridSpec, Potential};

use crate::args::{Settings, UsageError};

pub enum RunError {
    Usage(UsageError),
    Failed(String),
}

impl From<UsageError> for RunError {
    fn from(e: UsageError) -> Self {
        RunError::Usage(e)
    }
}

impl From<discinv::Error> for RunError {
    fn from(e: discinv::Error) -> Self {
        RunError::Failed(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failed(e.to_string())
    }
}

pub type Outcome = Result<Vec<Check>, RunError>;

pub struct Check {
    pub name: String,
    /// `None` for values reported without a bound.
    pub pass: Option<bool>,
    pub measured: f64,
    pub bound: String,
}

impl Check {
    fn bounded(name: impl Into<String>, measured: f64, bound: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass: Some(pass && measured.is_finite()),
            measured,
            bound: bound.into(),
        }
    }

    fn info(name: impl Into<String>, measured: f64) -> Self {
        Self {
            name: name.into(),
            pass: None,
            measured,
            bound: "-".into(),
        }
    }

    pub fn status(&self) -> &'static str {
        match self.pass {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "info",
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn grid(s: &Settings) -> Result<GridSpec, RunError> {
    Ok(GridSpec::new(s.grid, s.pad)?)
}

fn potential(name: &str, flag: &str, g: &GridSpec) -> Result<Potential, RunError> {
    if let Ok(q) = Potential::by_name(name, g) {
        return Ok(q);
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(UsageError(format!(
            "invalid value for --{flag}: `{name}` is neither a catalog entry (zero, bump, offset-bump, strong-bump, gaussian, half-disc, minus-one) nor a file"
        ))
        .into());
    }
    let field = io::read_bkgrid(&mut File::open(path)?)?;
    Ok(Potential::Samples(field))
}

fn out_file(s: &Settings, name: &str) -> Result<BufWriter<File>, RunError> {
    fs::create_dir_all(&s.out)?;
    Ok(BufWriter::new(File::create(s.out.join(name))?))
}

fn write_checks(s: &Settings, name: &str, checks: &[Check]) -> Result<PathBuf, RunError> {
    use std::io::Write;
    let mut w = out_file(s, name)?;
    writeln!(w, "name,status,measured,bound")?;
    for ch in checks {
        writeln!(w, "{},{},{},{}", ch.name, ch.status(), io::num(ch.measured), ch.bound)?;
    }
    Ok(s.out.join(name))
}

fn rel_l2_disc(a: &Field, b: &Field) -> Result<f64, RunError> {
    Ok(lp_norm(&a.sub(b)?, 2.0)? / lp_norm(b, 2.0)?)
}

fn solver(s: &Settings) -> SolverOptions {
    SolverOptions {
        tol: s.tol,
        seed: s.seed,
        ..SolverOptions::default()
    }
}

pub fn verify_lemmas(s: &Settings) -> Outcome {
    let g = grid(s)?;
    let h = g.spacing();
    let mut out = Vec::new();
    let sampling = HolderSampling {
        seed: s.seed,
        ..HolderSampling::default()
    };

    let step = 1e-5;
    let d = (0..10_000)
        .map(|k| {
            let x = -0.5 + 4.0 * k as f64 / 9_999.0;
            ((smooth_step(x + step) - smooth_step(x - step)) / (2.0 * step)).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::bounded("smooth_step_derivative", d, format!("{:.6}", 8.0 * E), d <= 8.0 * E));

    let z0 = s.z0.unwrap_or(c(0.0, 0.0));
    for delta in [0.1, 0.3] {
        let cut = cutoff(CutoffParams::new(z0, delta)?, g);
        let (mut near, mut quotient, mut support) = (0.0f64, 0.0f64, 0.0);
        for i in g.disc_indices() {
            let z = g.point(i);
            let v = cut.values()[i].re;
            let r = (z - z0).norm();
            if r < delta / 2.0 {
                near = near.max(v);
            }
            if r > 0.0 {
                quotient = quotient.max(v / r);
            }
            if v != 1.0 {
                support += h * h;
            }
        }
        out.push(Check::bounded(format!("cutoff_near_centre_delta{delta}"), near, "0", near == 0.0));
        out.push(Check::bounded(
            format!("cutoff_quotient_delta{delta}"),
            quotient,
            format!("{}", 2.0 / delta),
            quotient <= 2.0 / delta,
        ));
        let bound = 2.0 * PI * (delta + h);
        out.push(Check::bounded(
            format!("cutoff_support_delta{delta}"),
            support,
            format!("{bound:.6}"),
            support <= bound,
        ));
    }

    for n in [2.0, 4.0, 8.0] {
        for alpha in [1.0 / 3.0, 0.5] {
            let e = phase_field(n, z0, g, 1.0).restrict_to_disc();
            let v = holder_norm_estimate(&e, alpha, sampling)?;
            let bound = 11.0 * n.powf(alpha);
            out.push(Check::bounded(
                format!("phase_holder_n{n}_alpha{alpha:.3}"),
                v,
                format!("{bound:.6}"),
                v <= bound,
            ));
        }
    }

    let one = Field::from_fn_disc(g, |_| c(1.0, 0.0));
    for beta in [0.5, 1.0, 1.5] {
        for centre in [c(0.0, 0.0), z0] {
            let v = integrate_weakly_singular(&one, centre, beta)?.re;
            let bound = 2.0 * PI / (2.0 - beta) * 1.01;
            out.push(Check::bounded(
                format!("weakly_singular_beta{beta}_z0({},{})", centre.re, centre.im),
                v,
                format!("{bound:.6}"),
                v <= bound,
            ));
        }
    }

    let ws = OperatorWorkspace::new(g)?;
    let zbar = Field::from_fn_disc(g, |z| z.conj());
    let e = rel_l2_disc(&ws.cauchy(&one)?.restrict_to_disc(), &zbar)?;
    out.push(Check::bounded("cauchy_of_one", e, "0.02", e <= 0.02));

    let bump = Potential::default_bump().sample(&g);
    let cb = ws.cauchy(&bump)?;
    let e = rel_l2_disc(&diff::dzbar(&cb).restrict_to_disc(), &bump)?;
    out.push(Check::bounded("dbar_cauchy_identity", e, "0.05", e <= 0.05));
    let e = rel_l2_disc(&diff::dz(&ws.conj_cauchy(&bump)?).restrict_to_disc(), &bump)?;
    out.push(Check::bounded("d_conj_cauchy_identity", e, "0.05", e <= 0.05));
    let pi_b = ws.beurling(&bump, Beurling::Pi)?.restrict_to_disc();
    let e = rel_l2_disc(&diff::dz(&cb).restrict_to_disc(), &pi_b)?;
    out.push(Check::bounded("beurling_is_d_cauchy", e, "0.05", e <= 0.05));

    let g_off = Potential::bump(c(0.35, 0.1), 0.3, 1.0).sample(&g);
    let e = integration_by_parts_check(&g_off, 8.0, c(-0.3, 0.0), 1.0, &ws)?;
    out.push(Check::bounded("integration_by_parts", e, "0.05", e <= 0.05));

    write_checks(s, "lemmas.csv", &out)?;
    Ok(out)
}

pub fn operators_bench(s: &Settings) -> Outcome {
    use std::io::Write;
    let g = grid(s)?;
    let ws = OperatorWorkspace::new(g)?;
    let mut out = Vec::new();
    let mut w = out_file(s, "operators.csv")?;
    writeln!(w, "quantity,p,n_side,value")?;
    let ps = if s.p == 3.0 { vec![3.0] } else { vec![3.0, s.p] };
    for p in ps {
        let cp = cauchy_norm_estimate(&ws, p, 12, s.seed)?;
        let bp = beurling_norm_estimate(&ws, p, 12, s.seed)?;
        writeln!(w, "C_p,{p},{},{}", s.grid, io::num(cp))?;
        writeln!(w, "B_p,{p},{},{}", s.grid, io::num(bp))?;
        out.push(Check::info(format!("cauchy_norm_p{p}"), cp));
        out.push(Check::info(format!("beurling_norm_p{p}"), bp));
    }
    let b2 = beurling_norm_estimate(&ws, 2.0, 20, s.seed)?;
    writeln!(w, "B_p,2,{},{}", s.grid, io::num(b2))?;
    out.push(Check::bounded("beurling_norm_p2", b2, "1.05", b2 <= 1.05));

    let f = Potential::default_bump().sample(&g);
    let reps = 10;
    let t = Instant::now();
    for _ in 0..reps {
        ws.cauchy(&f)?;
    }
    let ms = t.elapsed().as_secs_f64() * 1e3 / reps as f64;
    writeln!(w, "cauchy_ms,-,{},{}", s.grid, io::num(ms))?;
    out.push(Check::info("cauchy_apply_ms", ms));
    Ok(out)
}

pub fn cgo_solve(s: &Settings) -> Outcome {
    let ns = s.cgo_n()?.to_vec();
    let g = grid(s)?;
    let ws = OperatorWorkspace::new(g)?;
    let q = potential(&s.potential, "potential", &g)?.sample(&g);
    let z0 = s.z0.unwrap_or(c(0.0, 0.0));
    let opts = solver(s);
    let mut out = Vec::new();
    for &n in &ns {
        let sol = solve_cgo(&q, CGOParams::new(n, z0, s.p, Kind::First)?, opts, &ws)?;
        let tag = format!("n{n}");
        io::write_bkgrid(&mut out_file(s, &format!("remainder_{tag}.bkgrid"))?, &sol.remainder)?;
        io::write_sidecar(&mut out_file(s, &format!("remainder_{tag}.meta"))?, &io::cgo_sidecar(&sol))?;
        out.push(Check::bounded(format!("contraction_{tag}"), sol.empirical_contraction, "1", sol.empirical_contraction < 1.0));
        out.push(Check::bounded(
            format!("fixed_point_residual_{tag}"),
            sol.fixed_point_residual,
            format!("{:e}", s.tol.max(1e-10)),
            sol.fixed_point_residual <= s.tol.max(1e-10),
        ));
        out.push(Check::info(format!("pde_residual_{tag}"), pde_residual(&sol, &q, 3.0 * g.spacing())?));
        out.push(Check::info(format!("iterations_{tag}"), sol.iterations as f64));
    }
    let rows = remainder_decay(&q, &ns, &[z0], s.p, opts, &ws)?;
    io::write_decay_csv(&mut out_file(s, "decay.csv")?, &rows)?;
    if rows.len() > 1 && rows[0].sup_holder > 0.0 {
        let decreasing = rows.windows(2).all(|w| {
            w[1].sup_holder < w[0].sup_holder && w[1].sup_dbar_inf < w[0].sup_dbar_inf && w[1].sup_d_p < w[0].sup_d_p
        });
        let last = rows.last().expect("nonempty");
        out.push(Check::bounded(
            "remainder_decay_monotone",
            last.sup_holder / rows[0].sup_holder,
            "strictly decreasing columns",
            decreasing,
        ));
    }
    Ok(out)
}

pub fn forward_solve(s: &Settings) -> Outcome {
    let g = grid(s)?;
    let q = potential(&s.potential, "potential", &g)?;
    let (n_r, n_theta) = ((s.grid / 2).max(4), s.grid.max(8));
    let solver = DirichletSolver::new(|z| q.eval(z), n_r, n_theta)?;
    let basis: Vec<(String, Box<dyn Fn(f64) -> C64>)> = vec![
        ("const".into(), Box::new(|_| c(1.0, 0.0))),
        ("cos1".into(), Box::new(|t: f64| c(t.cos(), 0.0))),
        ("sin1".into(), Box::new(|t: f64| c(t.sin(), 0.0))),
        ("cos2".into(), Box::new(|t: f64| c((2.0 * t).cos(), 0.0))),
        ("sin2".into(), Box::new(|t: f64| c((2.0 * t).sin(), 0.0))),
    ];
    let mut pairs = Vec::new();
    for (label, f) in &basis {
        let u = solver.solve_fn(f)?;
        let cp = cauchy_pair(&u);
        io::write_cauchy_pair_csv(&mut out_file(s, &format!("cauchy_{label}.csv"))?, &cp)?;
        io::write_bkgrid(&mut out_file(s, &format!("solution_{label}.bkgrid"))?, &u.to_cartesian(g))?;
        pairs.push(cp);
    }
    let mut worst = 0.0f64;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, b) = reciprocity(&pairs[i], &pairs[j])?;
            let scale = a.norm().max(b.norm()).max(1.0);
            worst = worst.max((a - b).norm() / scale);
        }
    }
    Ok(vec![Check::bounded("reciprocity_gap", worst, "0.005", worst <= 5e-3)])
}

pub fn reconstruct(s: &Settings) -> Outcome {
    let ns = s.cgo_n()?.to_vec();
    let g = grid(s)?;
    let ws = OperatorWorkspace::new(g)?;
    let q1 = potential(&s.potential, "potential", &g)?;
    let q2 = s.reference.as_deref().map(|r| potential(r, "reference", &g)).transpose()?;
    let z0s = s.z0.map(|z| vec![z]).unwrap_or_else(|| lattice_3x3(0.25));
    let mut cfg = ReconstructionConfig::new(ns, z0s);
    cfg.p = s.p;
    cfg.solver = solver(s);
    let rep = reconstruct_grid(&q1, q2.as_ref(), &cfg, &ws)?;
    io::write_report_csv(&mut out_file(s, "report.csv")?, &rep)?;
    {
        use std::io::Write;
        let mut w = out_file(s, "summary.csv")?;
        writeln!(w, "n,sup_err,l2_err")?;
        for e in &rep.summary {
            writeln!(w, "{},{},{}", io::num(e.n), io::num(e.sup_err), io::num(e.l2_err))?;
        }
    }
    let mut out: Vec<Check> = rep.summary.iter().map(|e| Check::info(format!("sup_err_n{}", e.n), e.sup_err)).collect();
    let failures = rep.failures();
    out.push(Check::bounded("failed_points", failures as f64, "0", failures == 0));
    let bridge = rep.max_bridge_rel();
    out.push(Check::bounded("bridge_identity", bridge, "0.01", bridge < 0.01));
    if rep.summary.len() > 1 {
        let first = rep.summary[0].sup_err;
        let last = rep.summary.last().expect("nonempty").sup_err;
        let ok = last < first || (first == 0.0 && last == 0.0);
        out.push(Check::bounded("sup_err_last_over_first", if first > 0.0 { last / first } else { 0.0 }, "< 1", ok));
    }
    out.push(Check::info("runtime_secs", rep.runtime_secs));
    Ok(out)
}

pub fn convergence(s: &Settings) -> Outcome {
    let g = grid(s)?;
    let ws = OperatorWorkspace::new(g)?;
    let f = potential(&s.potential, "potential", &g)?.sample(&g);
    let rows = convergence_study(&f, &s.n, &ws)?;
    let meta = [
        ("potential", s.potential.clone()),
        ("grid", s.grid.to_string()),
        ("pad", s.pad.to_string()),
    ];
    io::write_convergence_csv(&mut out_file(s, "convergence.csv")?, &rows, &meta)?;
    let mut out: Vec<Check> = rows.iter().map(|r| Check::info(format!("l2_error_n{}", r.n), r.l2_error)).collect();
    if rows.len() > 1 && rows[0].l2_error > 0.0 {
        let ok = rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error);
        let last = rows.last().expect("nonempty");
        out.push(Check::bounded("l2_error_decreasing", last.l2_error / rows[0].l2_error, "strictly decreasing", ok));
    }
    Ok(out)
}
