//! Ball averages of a density.
//!
//! For radius `r = 1/ν` the raw objective is the mass of the open ball of
//! radius `r` around `θ`; the normalized objective divides by the ball
//! volume `s_n · rⁿ`, so constant densities are fixed points and the
//! sequence converges pointwise to the density at its continuity points.

use std::f64::consts::PI;

use crate::argmax::ArgmaxResult;
use crate::density::{Density, SearchBox};
use crate::error::{Error, Result};
use crate::search::{self, SearchOptions};

/// Volume of the unit ball in `dim` dimensions (1D: 2, 2D: π).
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => PI,
        _ => panic!("only dimensions 1 and 2 are supported"),
    }
}

/// Ball-integral objective `θ ↦ ∫_{‖θ−z‖<r} f(z) dz`, optionally averaged.
#[derive(Debug, Clone, Copy)]
pub struct BallObjective<'a> {
    base: &'a Density,
    radius: f64,
    normalized: bool,
}

impl<'a> BallObjective<'a> {
    pub fn new(base: &'a Density, radius: f64, normalized: bool) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(BallObjective {
            base,
            radius,
            normalized,
        })
    }

    /// The mollified density at index `ν` (radius `1/ν`, normalized).
    pub fn mollified(base: &'a Density, nu: f64) -> Result<Self> {
        Self::new(base, 1.0 / nu, true)
    }

    pub fn base(&self) -> &Density {
        self.base
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn ball_volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    /// Raw ball mass at `theta`.
    pub fn raw(&self, theta: &[f64]) -> f64 {
        match self.base {
            Density::Piecewise(d) => search::window_mass(d, theta[0], self.radius),
            Density::Grid(g) if g.dim() == 1 => {
                let (o, h) = (g.origin()[0], g.spacing()[0]);
                let (u, v) = (theta[0] - self.radius, theta[0] + self.radius);
                g.values()
                    .iter()
                    .enumerate()
                    .map(|(i, val)| {
                        let lo = o + i as f64 * h;
                        let overlap = (lo + h).min(v) - lo.max(u);
                        if overlap > 0.0 {
                            val * overlap
                        } else {
                            0.0
                        }
                    })
                    .sum()
            }
            Density::Grid(g) => g.disc_mass(theta, self.radius),
        }
    }

    /// Objective value at `theta` (raw or averaged per `normalized`).
    pub fn value(&self, theta: &[f64]) -> f64 {
        let raw = self.raw(theta);
        if self.normalized {
            raw / self.ball_volume()
        } else {
            raw
        }
    }
}

/// Ball integral at `theta`.
pub fn ball_integral(b: &BallObjective<'_>, theta: &[f64]) -> f64 {
    b.value(theta)
}

/// Maximizes the raw ball mass; `tol_density` is on the density scale and
/// is multiplied by the ball volume.
pub(crate) fn raw_ball_argmax(
    d: &Density,
    radius: f64,
    sbox: &SearchBox,
    opts: &SearchOptions,
) -> Result<ArgmaxResult> {
    sbox.validate(d.dim())?;
    let volume = unit_ball_volume(d.dim()) * radius.powi(d.dim() as i32);
    let tol_raw = opts.tol_value.unwrap_or_else(|| d.default_tol_value()) * volume;
    match d.as_piecewise() {
        Some(pw) => Ok(search::ball_argmax_1d(&pw, radius, sbox.lo[0], sbox.hi[0], tol_raw, opts)),
        None => match d {
            Density::Grid(g) => Ok(search::ball_argmax_2d(g, radius, sbox, tol_raw, opts)),
            Density::Piecewise(_) => unreachable!("piecewise densities are one-dimensional"),
        },
    }
}

/// Supremum and maximizers of the averaged objective over `sbox`.
pub fn mollified_sup(b: &BallObjective<'_>, sbox: &SearchBox) -> Result<ArgmaxResult> {
    mollified_sup_with(b, sbox, &SearchOptions::default())
}

pub fn mollified_sup_with(b: &BallObjective<'_>, sbox: &SearchBox, opts: &SearchOptions) -> Result<ArgmaxResult> {
    if !b.normalized() {
        return Err(Error::InvalidArgument("mollified_sup needs a normalized objective".into()));
    }
    let raw = raw_ball_argmax(b.base(), b.radius(), sbox, opts)?;
    Ok(raw.scaled(1.0 / b.ball_volume()))
}
