//! MAP and 0-1 loss Bayes estimators.
//!
//! Under the loss `L^c(θ, z) = 1{‖θ − z‖ ≥ 1/c}` the posterior risk is one
//! minus the posterior mass of the open ball of radius `1/c`, so the Bayes
//! estimator maximizes that mass. Open and closed balls give the same
//! integral.

use serde::{Deserialize, Serialize};

pub use crate::argmax::{ArgmaxResult, Maximizer};
use crate::density::{Density, SearchBox};
use crate::error::{Error, Result};
use crate::mollifier::{raw_ball_argmax, BallObjective};
use crate::search::{self, SearchOptions};

/// 0-1 loss with scale `c`; zero loss inside the radius `1/c` ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    c: f64,
}

impl LossSpec {
    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidArgument(format!("loss scale c must be positive, got {c}")));
        }
        Ok(LossSpec { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.c
    }

    /// `L^c(θ, z)`.
    pub fn loss(&self, theta: &[f64], z: &[f64]) -> f64 {
        if crate::argmax::norm_diff(theta, z) < self.radius() {
            0.0
        } else {
            1.0
        }
    }
}

/// Suboptimality of a point for the Bayes objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxGap {
    pub theta: Vec<f64>,
    pub gap: f64,
    pub c: f64,
}

/// Posterior mode(s) over `sbox`.
pub fn map_estimate(d: &Density, sbox: &SearchBox) -> Result<ArgmaxResult> {
    map_estimate_with(d, sbox, &SearchOptions::default())
}

pub fn map_estimate_with(d: &Density, sbox: &SearchBox, opts: &SearchOptions) -> Result<ArgmaxResult> {
    sbox.validate(d.dim())?;
    let tol = opts.tol_value.unwrap_or_else(|| d.default_tol_value());
    match d.as_piecewise() {
        Some(pw) => Ok(search::density_argmax_1d(&pw, sbox.lo[0], sbox.hi[0], tol)),
        None => match d {
            Density::Grid(g) => Ok(search::grid_argmax_2d(g, sbox, tol)),
            Density::Piecewise(_) => unreachable!("piecewise densities are one-dimensional"),
        },
    }
}

/// Bayes estimator(s) under `loss`: maximizers of the raw ball mass.
///
/// `sup_value` and `tol_value` are in mass units; the value tolerance is the
/// density-scale tolerance times the ball volume.
pub fn bayes_estimate(d: &Density, loss: &LossSpec, sbox: &SearchBox) -> Result<ArgmaxResult> {
    bayes_estimate_with(d, loss, sbox, &SearchOptions::default())
}

pub fn bayes_estimate_with(d: &Density, loss: &LossSpec, sbox: &SearchBox, opts: &SearchOptions) -> Result<ArgmaxResult> {
    raw_ball_argmax(d, loss.radius(), sbox, opts)
}

/// `sup_θ ∫_{‖θ−z‖<1/c} f − ∫_{‖theta−z‖<1/c} f`.
pub fn approx_gap(d: &Density, loss: &LossSpec, theta: &[f64], sbox: &SearchBox) -> Result<ApproxGap> {
    approx_gap_with(d, loss, theta, sbox, &SearchOptions::default())
}

pub fn approx_gap_with(
    d: &Density,
    loss: &LossSpec,
    theta: &[f64],
    sbox: &SearchBox,
    opts: &SearchOptions,
) -> Result<ApproxGap> {
    if theta.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            got: theta.len(),
        });
    }
    let best = bayes_estimate_with(d, loss, sbox, opts)?;
    let here = BallObjective::new(d, loss.radius(), false)?.raw(theta);
    // theta may lie outside the box and beat the boxed supremum
    let gap = (best.sup_value - here).max(0.0);
    Ok(ApproxGap {
        theta: theta.to_vec(),
        gap,
        c: loss.c(),
    })
}
