//! File formats: the `BKGRID1` binary field format, CSV tables and plain
//! `key=value` sidecars.

use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64 as C64;

use crate::cgo::{CGOSolution, DecayRow};
use crate::error::{Error, Result};
use crate::forward::{BoundaryGrid, CauchyPair};
use crate::grid::{Field, GridSpec};
use crate::reconstruct::ReconstructionReport;
use crate::stationary_phase::ConvergenceRow;

pub const MAGIC: &[u8; 7] = b"BKGRID1";

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Magic, `n_side` and `pad_factor` as u32 LE, then interleaved re/im f64 LE
/// values in row-major order.
pub fn write_bkgrid(w: &mut impl Write, f: &Field) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.n_side() as u32).to_le_bytes())?;
    w.write_all(&(g.pad_factor() as u32).to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_bkgrid(r: &mut impl Read) -> Result<Field> {
    let mut magic = [0u8; 7];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a BKGRID1 file".into()));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let n_side = u32::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let pad = u32::from_le_bytes(word) as usize;
    let grid = GridSpec::new(n_side, pad)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut buf = [0u8; 16];
    for _ in 0..grid.len() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        values.push(C64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    Field::from_values(grid, values)
}

/// Columns `x, y, re, im`, one row per node.
pub fn write_field_csv(w: &mut impl Write, f: &Field) -> Result<()> {
    writeln!(w, "x,y,re,im")?;
    let g = f.grid();
    for (i, v) in f.values().iter().enumerate() {
        let z = g.point(i);
        writeln!(w, "{},{},{},{}", num(z.re), num(z.im), num(v.re), num(v.im))?;
    }
    Ok(())
}

pub fn write_sidecar(w: &mut impl Write, entries: &[(&str, String)]) -> Result<()> {
    for (k, v) in entries {
        writeln!(w, "{k}={v}")?;
    }
    Ok(())
}

pub fn read_sidecar(r: &mut impl Read) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected key=value, got `{t}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn cgo_sidecar(sol: &CGOSolution) -> Vec<(&'static str, String)> {
    let p = sol.params;
    vec![
        ("n", num(p.n)),
        ("z0_re", num(p.z0.re)),
        ("z0_im", num(p.z0.im)),
        ("p", num(p.p)),
        ("iterations", sol.iterations.to_string()),
        ("contraction", num(sol.empirical_contraction)),
        ("residual", num(sol.fixed_point_residual)),
    ]
}

/// Columns `theta, tr_re, tr_im, dn_re, dn_im`.
pub fn write_cauchy_pair_csv(w: &mut impl Write, c: &CauchyPair) -> Result<()> {
    writeln!(w, "theta,tr_re,tr_im,dn_re,dn_im")?;
    for k in 0..c.boundary.len() {
        let (t, d) = (c.trace[k], c.normal_deriv[k]);
        writeln!(
            w,
            "{},{},{},{},{}",
            num(c.boundary.angle(k)),
            num(t.re),
            num(t.im),
            num(d.re),
            num(d.im)
        )?;
    }
    Ok(())
}

pub fn read_cauchy_pair_csv(r: &mut impl Read) -> Result<CauchyPair> {
    let mut trace = Vec::new();
    let mut dn = Vec::new();
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        if lineno == 0 {
            if line.trim() != "theta,tr_re,tr_im,dn_re,dn_im" {
                return Err(Error::Format(format!("unexpected header `{line}`")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))?;
        if cols.len() != 5 {
            return Err(Error::Format(format!("line {}: expected 5 columns", lineno + 1)));
        }
        trace.push(C64::new(cols[1], cols[2]));
        dn.push(C64::new(cols[3], cols[4]));
    }
    CauchyPair::new(BoundaryGrid::new(trace.len())?, trace, dn)
}

pub const REPORT_HEADER: &str = "z0_re,z0_im,n,qhat_re,qhat_im,qref_re,qref_im,abs_err";

pub fn write_report_csv(w: &mut impl Write, rep: &ReconstructionReport) -> Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in &rep.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            num(r.z0.re),
            num(r.z0.im),
            num(r.n),
            num(r.qhat.re),
            num(r.qhat.im),
            num(r.qref.re),
            num(r.qref.im),
            num(r.abs_err)
        )?;
    }
    Ok(())
}

/// Columns `n, l2_error` after `# key=value` metadata lines.
pub fn write_convergence_csv(w: &mut impl Write, rows: &[ConvergenceRow], meta: &[(&str, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "n,l2_error")?;
    for r in rows {
        writeln!(w, "{},{}", num(r.n), num(r.l2_error))?;
    }
    Ok(())
}

pub fn write_decay_csv(w: &mut impl Write, rows: &[DecayRow]) -> Result<()> {
    writeln!(w, "n,sup_holder,sup_dbar_inf,sup_d_p")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            num(r.n),
            num(r.sup_holder),
            num(r.sup_dbar_inf),
            num(r.sup_d_p)
        )?;
    }
    Ok(())
}
