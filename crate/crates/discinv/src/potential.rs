//! Closed-form potentials used as fixtures, plus imported samples.

use num_complex::Complex64 as C64;

use crate::cgo::smooth_step;
use crate::error::{invalid, Error, Result};
use crate::grid::{Field, GridSpec};

#[derive(Clone, Debug)]
pub enum Potential {
    Zero,
    /// Constant value on the disc.
    Constant(C64),
    /// `height * exp(1 - 1/(1 - s^2))` for `s = |z - center| / radius < 1`.
    Bump { center: C64, radius: f64, height: C64 },
    /// `height * exp(-|z - center|^2 / width^2)` times the unit bump profile
    /// of radius `support`.
    Gaussian {
        center: C64,
        width: f64,
        support: f64,
        height: C64,
    },
    /// Indicator of `{Re z > 0}` inside the disc, smoothed across the cut by
    /// `(1 + tanh(x / smoothing)) / 2`.
    HalfDisc { smoothing: f64, height: C64 },
    /// Samples on a fixed grid; evaluated off-grid by bilinear interpolation.
    Samples(Field),
}

impl Potential {
    pub fn bump(center: C64, radius: f64, height: f64) -> Self {
        Potential::Bump {
            center,
            radius,
            height: C64::new(height, 0.0),
        }
    }

    /// Default smooth fixture: unit bump of radius 1/2 at the origin.
    pub fn default_bump() -> Self {
        Self::bump(C64::new(0.0, 0.0), 0.5, 1.0)
    }

    pub fn gaussian(center: C64, width: f64) -> Self {
        Potential::Gaussian {
            center,
            width,
            support: 0.999,
            height: C64::new(1.0, 0.0),
        }
    }

    /// Half-disc indicator mollified at twice the grid spacing.
    pub fn half_disc(grid: &GridSpec) -> Self {
        Potential::HalfDisc {
            smoothing: 2.0 * grid.spacing(),
            height: C64::new(1.0, 0.0),
        }
    }

    /// Looks up a catalog entry by name.
    pub fn by_name(name: &str, grid: &GridSpec) -> Result<Self> {
        Ok(match name {
            "zero" => Potential::Zero,
            "bump" => Self::default_bump(),
            "offset-bump" => Self::bump(C64::new(0.3, -0.2), 0.4, 1.0),
            "strong-bump" => Self::bump(C64::new(0.0, 0.0), 0.5, 5.0),
            "gaussian" => Self::gaussian(C64::new(0.0, 0.0), 0.3),
            "half-disc" => Self::half_disc(grid),
            "minus-one" => Potential::Constant(C64::new(-1.0, 0.0)),
            other => return Err(invalid("potential", format!("unknown catalog entry `{other}`"))),
        })
    }

    pub fn eval(&self, z: C64) -> C64 {
        let zero = C64::new(0.0, 0.0);
        if z.norm_sqr() >= 1.0 {
            return zero;
        }
        match self {
            Potential::Zero => zero,
            Potential::Constant(c) => *c,
            Potential::Bump {
                center,
                radius,
                height,
            } => {
                let s2 = (z - center).norm_sqr() / (radius * radius);
                if s2 < 1.0 {
                    height * (1.0 - 1.0 / (1.0 - s2)).exp()
                } else {
                    zero
                }
            }
            Potential::Gaussian {
                center,
                width,
                support,
                height,
            } => {
                let d2 = (z - center).norm_sqr();
                let s2 = d2 / (support * support);
                if s2 < 1.0 {
                    height * (-d2 / (width * width) - s2 / (1.0 - s2)).exp()
                } else {
                    zero
                }
            }
            Potential::HalfDisc { smoothing, height } => height * 0.5 * (1.0 + (z.re / smoothing).tanh()),
            Potential::Samples(f) => f.sample_bilinear(z),
        }
    }

    /// Samples on `grid`, zero outside the disc.
    pub fn sample(&self, grid: &GridSpec) -> Field {
        if let Potential::Samples(f) = self {
            if f.grid() == grid {
                return f.restrict_to_disc();
            }
        }
        Field::from_fn_disc(*grid, |z| self.eval(z))
    }

    /// Number of pieces on which the potential is smooth (closure of the
    /// disc split along its discontinuity curves).
    pub fn smooth_pieces(&self) -> usize {
        match self {
            Potential::HalfDisc { .. } => 2,
            _ => 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Potential::Zero)
    }
}

/// Potential multiplied by a smooth point cutoff around `z0`: vanishes for
/// `|z - z0| < delta/2`, untouched for `|z - z0| > delta`, with
/// `delta = (eps / (2 pi^(1/p) sup|q|))^(p/2)`. Returns the field and `delta`.
pub fn mollified_potential(q: &Field, z0: C64, eps: f64, p: f64) -> Result<(Field, f64)> {
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid("p", "must be finite and >= 1"));
    }
    let sup = q.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok((q.clone(), 0.0));
    }
    let delta = (eps / (2.0 * std::f64::consts::PI.powf(1.0 / p) * sup)).powf(p / 2.0);
    if delta >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("cutoff radius {delta:.3} would not fit in the disc"),
        });
    }
    let out = q.map_indexed(|z, v| v * (1.0 - smooth_step(2.0 * (z - z0).norm() / delta)));
    Ok((out, delta))
}
