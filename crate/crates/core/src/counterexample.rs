//! A continuous density whose Bayes estimators never approach its mode.
//!
//! The density is `1 − √|2θ|` on `(−1/2, 1/2)` plus, for every `n ≥ 1`, a
//! trapezoidal bump on `[n − 8⁻ⁿ, n + 2⁻ⁿ]` with plateau height `1 − 2⁻ⁿ`.
//! The mode is `0`, yet for `c = 2·4^ν` the radius-`1/c` ball around the
//! centre of bump `2ν` holds more mass than the ball around `0`.
//!
//! Only bumps `1..=max_bump` are materialized; the rest is described by a
//! [`Tail`] whose supremum is 1.

use serde::{Deserialize, Serialize};

use crate::convergence::{sweep_with, SweepTrace};
use crate::density::{Density, Piece, SearchBox, Tail, UscDensity1D};
use crate::error::{Error, Result};
use crate::estimators::{bayes_estimate_with, map_estimate_with, LossSpec};
use crate::mollifier::BallObjective;
use crate::search::SearchOptions;

pub const DEFAULT_MAX_BUMP: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub max_bump: u32,
}

impl Default for CounterexampleSpec {
    fn default() -> Self {
        CounterexampleSpec {
            max_bump: DEFAULT_MAX_BUMP,
        }
    }
}

impl CounterexampleSpec {
    pub fn new(max_bump: u32) -> Result<Self> {
        if max_bump == 0 {
            return Err(Error::InvalidArgument("max_bump must be at least 1".into()));
        }
        Ok(CounterexampleSpec { max_bump })
    }
}

fn pow2(n: u32) -> f64 {
    2f64.powi(n as i32)
}

/// `1 − 2⁻ⁿ`.
pub fn plateau_height(n: u32) -> f64 {
    1.0 - 1.0 / pow2(n)
}

/// Magnitude of the rise and fall slopes, `(2ⁿ − 1)·4ⁿ`.
pub fn bump_slope(n: u32) -> f64 {
    (pow2(n) - 1.0) * pow2(2 * n)
}

/// Knots `[n − 8⁻ⁿ, n, n + 2⁻ⁿ − 8⁻ⁿ, n + 2⁻ⁿ]` as floats.
pub fn bump_knots(n: u32) -> [f64; 4] {
    let n_f = n as f64;
    let eighth = 1.0 / pow2(3 * n);
    let half = 1.0 / pow2(n);
    [n_f - eighth, n_f, n_f + (half - eighth), n_f + half]
}

/// Mass of the centre piece, `1/3`.
pub fn center_mass() -> f64 {
    1.0 / 3.0
}

/// Mass of bump `n`: plateau plus the two triangles, `2⁻ⁿ − 4⁻ⁿ`.
pub fn bump_mass(n: u32) -> f64 {
    plateau_height(n) / pow2(n)
}

/// Closed-form mass of the materialized pieces up to `max_bump`.
pub fn exact_mass(max_bump: u32) -> f64 {
    center_mass() + (1..=max_bump).map(bump_mass).sum::<f64>()
}

fn bump_pieces(n: u32) -> Result<Vec<Piece>> {
    let [k0, k1, k2, k3] = bump_knots(n);
    let (h, slope) = (plateau_height(n), bump_slope(n));
    let mut out = Vec::with_capacity(3);
    // The rise is narrower than one ulp of n from n = 17 on.
    if k0 < k1 {
        out.push(Piece::affine_anchored(k0, k1, h, slope, k1)?);
    }
    out.push(Piece::constant(k1, k2, h)?);
    if k2 < k3 {
        out.push(Piece::affine_anchored(k2, k3, h, -slope, k2)?);
    }
    Ok(out)
}

/// Builds the density with bumps `1..=spec.max_bump`.
pub fn build(spec: &CounterexampleSpec) -> Result<UscDensity1D> {
    let spec = CounterexampleSpec::new(spec.max_bump)?;
    let root2 = 2f64.sqrt();
    let mut pieces = vec![
        Piece::sqrt(-0.5, 0.0, 1.0, -root2, -1.0, 0.0)?,
        Piece::sqrt(0.0, 0.5, 1.0, -root2, 1.0, 0.0)?,
    ];
    for n in 1..=spec.max_bump {
        pieces.extend(bump_pieces(n)?);
    }
    let last = bump_knots(spec.max_bump)[3];
    // the omitted bumps carry less than 2^-N of mass
    let mass_tol = 1.0 / pow2(spec.max_bump) + 1e-12;
    let d = UscDensity1D::from_parts(
        pieces,
        mass_tol,
        Vec::new(),
        Some(Tail { from: last, sup: 1.0 }),
    )?;
    verify_continuity(&d, spec.max_bump)?;
    Ok(d)
}

/// Builds and wraps as a [`Density`].
pub fn build_density(spec: &CounterexampleSpec) -> Result<Density> {
    build(spec).map(Density::from)
}

fn knot_tolerance(slope: f64, knot: f64) -> f64 {
    2.0 * slope * f64::EPSILON * knot.abs().max(1.0) + 1e-12
}

/// Checks that left limit, right limit and value agree at every knot.
pub fn verify_continuity(d: &UscDensity1D, max_bump: u32) -> Result<()> {
    let check = |t: f64, expected: f64, tol: f64, skip_left: bool| -> Result<()> {
        let vals = [
            (!skip_left).then(|| d.left_limit(t)),
            Some(d.right_limit(t)),
            Some(d.evaluate(t)),
        ];
        for v in vals.into_iter().flatten() {
            if (v - expected).abs() > tol {
                return Err(Error::Invariant(format!(
                    "discontinuity at {t}: got {v}, expected {expected}"
                )));
            }
        }
        Ok(())
    };
    check(-0.5, 0.0, 1e-12, false)?;
    check(0.0, 1.0, 1e-12, false)?;
    check(0.5, 0.0, 1e-12, false)?;
    for n in 1..=max_bump {
        let [k0, k1, k2, k3] = bump_knots(n);
        let (h, slope) = (plateau_height(n), bump_slope(n));
        let rise_dropped = k0 >= k1;
        if !rise_dropped {
            check(k0, 0.0, knot_tolerance(slope, k0), false)?;
        }
        check(k1, h, knot_tolerance(slope, k1), rise_dropped)?;
        check(k2, h, knot_tolerance(slope, k2), false)?;
        check(k3, 0.0, knot_tolerance(slope, k3), false)?;
    }
    Ok(())
}

/// `c = 2·4^ν`.
pub fn ladder_c(nu: u32) -> f64 {
    2.0 * pow2(2 * nu)
}

/// Loss radius `1/(2·4^ν)`.
pub fn ladder_radius(nu: u32) -> f64 {
    1.0 / ladder_c(nu)
}

/// Ball mass at the origin for `c = 2·4^ν`: `4^{−ν} − (2/3)·8^{−ν}`.
pub fn objective_at_origin(nu: u32) -> f64 {
    1.0 / pow2(2 * nu) - (2.0 / 3.0) / pow2(3 * nu)
}

/// Plateau mass of bump `2ν`: `(1 − 4^{−ν})(4^{−ν} − 64^{−ν})`.
pub fn plateau_bound(nu: u32, max_bump: u32) -> Result<f64> {
    if max_bump < 2 * nu {
        return Err(Error::CutoffTooSmall {
            max_bump,
            needed: 2 * nu,
        });
    }
    let q = 1.0 / pow2(2 * nu);
    Ok((1.0 - q) * (q - 1.0 / pow2(6 * nu)))
}

/// Midpoint of the plateau of bump `2ν`.
pub fn plateau_center(nu: u32) -> f64 {
    let [_, k1, k2, _] = bump_knots(2 * nu);
    k1 + 0.5 * (k2 - k1)
}

/// One row of the origin-vs-plateau comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationRow {
    pub nu: u32,
    pub c: f64,
    pub origin_value: f64,
    pub plateau_bound: f64,
    /// Ball mass around [`plateau_center`].
    pub plateau_value: f64,
    pub bayes_sup: f64,
    pub canonical: f64,
    /// Every Bayes maximizer avoids `(−1/2, 1/2)`.
    pub outside_center: bool,
}

/// Default search box for index `nu_max`: `[−1, 2·nu_max + 1]`.
pub fn search_box(nu_max: u32) -> SearchBox {
    SearchBox::interval(-1.0, 2.0 * nu_max as f64 + 1.0)
}

fn outside_center(est: &crate::argmax::ArgmaxResult) -> bool {
    est.maximizers
        .iter()
        .all(|m| m.upper()[0] <= -0.5 || m.lower()[0] >= 0.5)
}

/// Origin value, plateau bound and Bayes estimate for `ν = 1..=nu_max`.
pub fn domination_table(d: &Density, max_bump: u32, nu_max: u32) -> Result<Vec<DominationRow>> {
    let opts = SearchOptions::default();
    let sbox = search_box(nu_max);
    (1..=nu_max)
        .map(|nu| {
            let c = ladder_c(nu);
            let bound = plateau_bound(nu, max_bump)?;
            let plateau_value = BallObjective::new(d, 1.0 / c, false)?.raw(&[plateau_center(nu)]);
            let est = bayes_estimate_with(d, &LossSpec::new(c)?, &sbox, &opts)?;
            Ok(DominationRow {
                nu,
                c,
                origin_value: objective_at_origin(nu),
                plateau_bound: bound,
                plateau_value,
                bayes_sup: est.sup_value,
                canonical: est.canonical[0],
                outside_center: outside_center(&est),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonconvergenceReport {
    pub nu_max: u32,
    /// MAP canonical is 0 with value 1.
    pub map_at_origin: bool,
    /// For each ν, every Bayes maximizer avoids `(−1/2, 1/2)`.
    pub outside_center: Vec<bool>,
    pub trace: SweepTrace,
}

impl NonconvergenceReport {
    pub fn holds(&self) -> bool {
        self.map_at_origin && self.outside_center.iter().all(|&b| b)
    }
}

/// Sweeps `c = 2·4^ν` for `ν = 1..=nu_max` over `sbox`.
pub fn verify_nonconvergence(d: &Density, nu_max: u32, sbox: &SearchBox) -> Result<NonconvergenceReport> {
    if nu_max == 0 {
        return Err(Error::InvalidArgument("nu_max must be at least 1".into()));
    }
    sbox.validate(1)?;
    if sbox.lo[0] > -1.0 || sbox.hi[0] < 2.0 * nu_max as f64 + 1.0 {
        return Err(Error::InvalidArgument(format!(
            "search box must cover [-1, {}]",
            2 * nu_max + 1
        )));
    }
    let opts = SearchOptions::default();
    let ladder: Vec<f64> = (1..=nu_max).map(ladder_c).collect();
    let trace = sweep_with(d, &ladder, sbox, &opts)?;
    let map = map_estimate_with(d, sbox, &opts)?;
    let map_at_origin = map.canonical == [0.0] && map.sup_value == 1.0;
    let outside = ladder
        .iter()
        .map(|&c| Ok(outside_center(&bayes_estimate_with(d, &LossSpec::new(c)?, sbox, &opts)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NonconvergenceReport {
        nu_max,
        map_at_origin,
        outside_center: outside,
        trace,
    })
}
