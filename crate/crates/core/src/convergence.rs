//! Sufficient-condition checks and ladder sweeps for Bayes → MAP convergence.
//!
//! Everything here is a finite-scale rendering of asymptotic statements:
//! verdicts carry the ladder they were computed on, and the hypo-convergence
//! report is a diagnostic over a finite family of sets, not a proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::argmax::{ext_real, norm_diff, ArgmaxResult, Maximizer};
use crate::density::{Density, GridDensity, PieceKind, SearchBox, UscDensity1D};
use crate::error::{Error, Result};
use crate::estimators::{bayes_estimate_with, map_estimate_with, LossSpec};
use crate::mollifier::{mollified_sup_with, BallObjective};
use crate::search::SearchOptions;

/// Distance below which a canonical counts as sitting on the MAP set.
pub const MAP_DISTANCE_TOL: f64 = 1e-6;
/// Strictness margin for the shape-condition counterwitnesses.
pub const SHAPE_MARGIN: f64 = 1e-12;
/// Slack on the upper hit-and-miss inequality.
pub const HYPO_SLACK: f64 = 1e-12;
/// Randomized triples for grid shape checks.
pub const GRID_SHAPE_TRIPLES: usize = 10_000;

// ---------------------------------------------------------------------------
// Level sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSet {
    /// The whole space (`alpha ≤ 0`).
    Everything,
    /// Closed intervals, possibly degenerate.
    Intervals(Vec<[f64; 2]>),
    /// Closed grid cells, by index.
    Cells(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub alpha: f64,
    pub set: LevelSet,
    pub bounded: bool,
    #[serde(with = "ext_real")]
    pub bound_m: f64,
    pub nonempty_interior: bool,
    /// Set is unbounded because of an unmaterialized tail reaching above alpha.
    pub tail_unbounded: bool,
}

impl LevelSetReport {
    /// Membership in the materialized part of the set.
    pub fn contains(&self, point: &[f64], grid: Option<&GridDensity>) -> bool {
        match &self.set {
            LevelSet::Everything => true,
            LevelSet::Intervals(iv) => iv.iter().any(|[a, b]| *a <= point[0] && point[0] <= *b),
            LevelSet::Cells(cells) => {
                let g = grid.expect("cell level sets need their grid");
                cells.iter().any(|c| {
                    let (lo, hi) = g.cell_bounds(c);
                    (0..lo.len()).all(|a| lo[a] <= point[a] && point[a] <= hi[a])
                })
            }
        }
    }
}

fn piece_superlevel(lo: f64, hi: f64, kind: PieceKind, alpha: f64) -> Option<[f64; 2]> {
    let clip = |a: f64, b: f64| {
        let (a, b) = (a.max(lo), b.min(hi));
        (a <= b).then_some([a, b])
    };
    match kind {
        PieceKind::Constant { k } => (k >= alpha).then_some([lo, hi]),
        PieceKind::Affine { a, b, anchor } => {
            if b == 0.0 {
                return (a >= alpha).then_some([lo, hi]);
            }
            let cross = anchor + (alpha - a) / b;
            if b > 0.0 {
                clip(cross, hi)
            } else {
                clip(lo, cross)
            }
        }
        PieceKind::Sqrt { a, b, s, t0 } => {
            if b == 0.0 {
                return (a >= alpha).then_some([lo, hi]);
            }
            let q = (alpha - a) / b;
            if b > 0.0 {
                // √(s(t − t0)) ≥ q
                if q <= 0.0 {
                    return Some([lo, hi]);
                }
                if s > 0.0 {
                    clip(t0 + q * q, hi)
                } else {
                    clip(lo, t0 - q * q)
                }
            } else {
                // √(s(t − t0)) ≤ q
                if q < 0.0 {
                    return None;
                }
                if s > 0.0 {
                    clip(lo, t0 + q * q)
                } else {
                    clip(t0 - q * q, hi)
                }
            }
        }
    }
}

fn level_set_piecewise(d: &UscDensity1D, alpha: f64) -> LevelSetReport {
    let mut iv: Vec<[f64; 2]> = d
        .pieces()
        .iter()
        .filter_map(|p| piece_superlevel(p.lo, p.hi, p.kind, alpha))
        .collect();
    iv.extend(d.unbounded_at().iter().map(|&t| [t, t]));
    iv.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut merged: Vec<[f64; 2]> = Vec::new();
    for [a, b] in iv {
        match merged.last_mut() {
            Some(last) if a <= last[1] => last[1] = last[1].max(b),
            _ => merged.push([a, b]),
        }
    }
    let tail_unbounded = d.tail().is_some_and(|t| alpha < t.sup);
    let m = merged.iter().flat_map(|[a, b]| [a.abs(), b.abs()]).fold(0.0, f64::max);
    LevelSetReport {
        alpha,
        nonempty_interior: merged.iter().any(|[a, b]| b > a) || tail_unbounded,
        bounded: !tail_unbounded,
        bound_m: if tail_unbounded { f64::INFINITY } else { m },
        set: LevelSet::Intervals(merged),
        tail_unbounded,
    }
}

fn level_set_grid(g: &GridDensity, alpha: f64) -> LevelSetReport {
    let mut cells = Vec::new();
    let mut m: f64 = 0.0;
    let shape = g.shape().to_vec();
    let indices: Vec<Vec<usize>> = match shape.len() {
        1 => (0..shape[0]).map(|i| vec![i]).collect(),
        _ => (0..shape[0]).flat_map(|i| (0..shape[1]).map(move |j| vec![i, j])).collect(),
    };
    for idx in indices {
        if g.value_at_cell(&idx) >= alpha {
            let (lo, hi) = g.cell_bounds(&idx);
            m = lo.iter().chain(&hi).map(|x| x.abs()).fold(m, f64::max);
            cells.push(idx);
        }
    }
    LevelSetReport {
        alpha,
        nonempty_interior: !cells.is_empty(),
        bounded: true,
        bound_m: m,
        set: LevelSet::Cells(cells),
        tail_unbounded: false,
    }
}

/// Upper level set `{θ : f(θ) ≥ alpha}`.
pub fn level_set(d: &Density, alpha: f64) -> LevelSetReport {
    if alpha <= 0.0 {
        return LevelSetReport {
            alpha,
            set: LevelSet::Everything,
            bounded: false,
            bound_m: f64::INFINITY,
            nonempty_interior: true,
            tail_unbounded: false,
        };
    }
    match d {
        Density::Piecewise(pw) => level_set_piecewise(pw, alpha),
        Density::Grid(g) => level_set_grid(g, alpha),
    }
}

// ---------------------------------------------------------------------------
// Shape conditions
// ---------------------------------------------------------------------------

/// Triple `(x, y, λ)` with `z = λx + (1−λ)y` violating a shape inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    pub z: Vec<f64>,
    pub f_x: f64,
    pub f_y: f64,
    pub f_z: f64,
}

fn combine(x: &[f64], y: &[f64], lambda: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect()
}

/// `f(z) < min{f(x), f(y)} − margin`.
pub fn violates_quasiconcavity(d: &Density, x: &[f64], y: &[f64], lambda: f64, margin: f64) -> Option<ShapeWitness> {
    let z = combine(x, y, lambda);
    let (fx, fy, fz) = (d.evaluate(x), d.evaluate(y), d.evaluate(&z));
    (fz < fx.min(fy) - margin).then(|| ShapeWitness {
        x: x.to_vec(),
        y: y.to_vec(),
        lambda,
        z,
        f_x: fx,
        f_y: fy,
        f_z: fz,
    })
}

/// `f(z) < f(x)^λ f(y)^{1−λ} − margin`.
pub fn violates_log_concavity(d: &Density, x: &[f64], y: &[f64], lambda: f64, margin: f64) -> Option<ShapeWitness> {
    let z = combine(x, y, lambda);
    let (fx, fy, fz) = (d.evaluate(x), d.evaluate(y), d.evaluate(&z));
    let geo = fx.powf(lambda) * fy.powf(1.0 - lambda);
    (fz < geo - margin).then(|| ShapeWitness {
        x: x.to_vec(),
        y: y.to_vec(),
        lambda,
        z,
        f_x: fx,
        f_y: fy,
        f_z: fz,
    })
}

/// Sorted probe points: piece ends, points just inside them, a regular
/// interior sample, and gap midpoints. Piecewise-monotone densities attain
/// or approach their extreme values at these points.
fn shape_samples(d: &UscDensity1D) -> Vec<f64> {
    const INTERIOR: usize = 16;
    let mut pts = Vec::new();
    let pieces = d.pieces();
    for (i, p) in pieces.iter().enumerate() {
        let len = p.len();
        let delta = (len * 1e-9).max(p.lo.abs().max(p.hi.abs()) * 4.0 * f64::EPSILON);
        pts.push(p.lo);
        if 2.0 * delta < len {
            pts.push(p.lo + delta);
            pts.push(p.hi - delta);
        }
        for k in 1..INTERIOR {
            pts.push(p.lo + len * k as f64 / INTERIOR as f64);
        }
        pts.push(p.hi);
        if let Some(next) = pieces.get(i + 1) {
            if next.lo > p.hi {
                pts.push(0.5 * (p.hi + next.lo));
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.retain(|t| d.unbounded_at().binary_search_by(|u| u.total_cmp(t)).is_err());
    pts
}

fn quasiconcave_piecewise(dd: &Density, d: &UscDensity1D) -> Option<ShapeWitness> {
    let pts = shape_samples(d);
    let vals: Vec<f64> = pts.iter().map(|&t| d.evaluate(t)).collect();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let mut prefix = vec![0usize; n];
    for j in 1..n {
        prefix[j] = if vals[j - 1] > vals[prefix[j - 1]] { j - 1 } else { prefix[j - 1] };
    }
    let mut suffix = vec![n - 1; n];
    for j in (0..n - 1).rev() {
        suffix[j] = if j + 1 < n - 1 && vals[suffix[j + 1]] >= vals[j + 1] { suffix[j + 1] } else { j + 1 };
    }
    // keep the deepest verified dip
    let mut best: Option<(f64, ShapeWitness)> = None;
    for j in 1..n - 1 {
        let (i, k) = (prefix[j], suffix[j]);
        let deficit = vals[i].min(vals[k]) - vals[j];
        if deficit > SHAPE_MARGIN && best.as_ref().is_none_or(|(b, _)| deficit > *b) {
            let lambda = (pts[k] - pts[j]) / (pts[k] - pts[i]);
            if let Some(w) = violates_quasiconcavity(dd, &[pts[i]], &[pts[k]], lambda, SHAPE_MARGIN) {
                best = Some((deficit, w));
            }
        }
    }
    best.map(|(_, w)| w)
}

fn log_concave_piecewise(dd: &Density, d: &UscDensity1D) -> Option<ShapeWitness> {
    let pts = shape_samples(d);
    let vals: Vec<f64> = pts.iter().map(|&t| d.evaluate(t)).collect();
    let positive: Vec<usize> = (0..pts.len()).filter(|&i| vals[i] > 0.0).collect();
    let (Some(&first), Some(&last)) = (positive.first(), positive.last()) else {
        return None;
    };
    // zero strictly inside the support
    for j in first + 1..last {
        if vals[j] == 0.0 {
            let i = (first..j).rev().find(|&i| vals[i] > 0.0).unwrap();
            let k = (j + 1..=last).find(|&k| vals[k] > 0.0).unwrap();
            let lambda = (pts[k] - pts[j]) / (pts[k] - pts[i]);
            if let Some(w) = violates_log_concavity(dd, &[pts[i]], &[pts[k]], lambda, SHAPE_MARGIN) {
                return Some(w);
            }
        }
    }
    for w in (first..=last).collect::<Vec<_>>().windows(3) {
        let (i, j, k) = (w[0], w[1], w[2]);
        let lambda = (pts[k] - pts[j]) / (pts[k] - pts[i]);
        let lhs = vals[j].ln();
        let rhs = lambda * vals[i].ln() + (1.0 - lambda) * vals[k].ln();
        if lhs < rhs {
            if let Some(w) = violates_log_concavity(dd, &[pts[i]], &[pts[k]], lambda, SHAPE_MARGIN) {
                return Some(w);
            }
        }
    }
    None
}

type Violation = fn(&Density, &[f64], &[f64], f64, f64) -> Option<ShapeWitness>;

fn random_triples_grid(d: &Density, g: &GridDensity, seed: u64, check: Violation) -> Option<ShapeWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support: Vec<Vec<usize>> = match g.dim() {
        1 => (0..g.shape()[0]).map(|i| vec![i]).collect::<Vec<_>>(),
        _ => (0..g.shape()[0])
            .flat_map(|i| (0..g.shape()[1]).map(move |j| vec![i, j]))
            .collect(),
    }
    .into_iter()
    .filter(|c| g.value_at_cell(c) > 0.0)
    .collect();
    if support.is_empty() {
        return None;
    }
    let sample = |rng: &mut ChaCha8Rng| {
        let cell = &support[rng.gen_range(0..support.len())];
        let (lo, hi) = g.cell_bounds(cell);
        (0..lo.len())
            .map(|a| lo[a] + (hi[a] - lo[a]) * rng.gen_range(0.05..0.95))
            .collect::<Vec<f64>>()
    };
    for _ in 0..GRID_SHAPE_TRIPLES {
        let x = sample(&mut rng);
        let y = sample(&mut rng);
        let lambda: f64 = rng.gen_range(0.0..1.0);
        if let Some(w) = check(d, &x, &y, lambda, SHAPE_MARGIN) {
            return Some(w);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub level_set_condition: bool,
    pub level_set_witness_alpha: Option<f64>,
    pub level_sets: Vec<LevelSetReport>,
    pub quasiconcave: bool,
    pub quasiconcave_witness: Option<ShapeWitness>,
    pub log_concave: bool,
    pub log_concave_witness: Option<ShapeWitness>,
    pub eventually_level_bounded: bool,
}

/// Level-set, quasiconcavity and log-concavity checks.
///
/// The level-set condition asks for `{f > α}` bounded with nonempty
/// interior; it is evaluated as `{f ≥ α − 1e-12}` bounded and
/// `{f ≥ α + 1e-12}` with interior. `seed` drives the randomized grid checks.
pub fn check_conditions(d: &Density, alpha_grid: &[f64], seed: u64) -> Result<ConditionReport> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidArgument("alpha grid is empty".into()));
    }
    let mut level_sets = Vec::with_capacity(alpha_grid.len());
    let mut witness_alpha = None;
    let mut eventually_bounded = false;
    for &alpha in alpha_grid {
        let below = level_set(d, alpha - 1e-12);
        let above = level_set(d, alpha + 1e-12);
        if witness_alpha.is_none() && below.bounded && above.nonempty_interior {
            witness_alpha = Some(alpha);
        }
        let report = level_set(d, alpha);
        if alpha > 0.0 && report.bounded && report.nonempty_interior {
            eventually_bounded = true;
        }
        level_sets.push(report);
    }

    let pw = d.as_piecewise();
    let quasi_w = match (&pw, d) {
        (Some(pw), _) => quasiconcave_piecewise(d, pw),
        (None, Density::Grid(g)) => random_triples_grid(d, g, seed, violates_quasiconcavity),
        (None, Density::Piecewise(_)) => unreachable!(),
    };
    // min{f(x), f(y)} ≤ f(x)^λ f(y)^{1−λ}: a quasiconcavity witness also
    // refutes log-concavity
    let log_w = match (&quasi_w, &pw, d) {
        (Some(w), _, _) => Some(w.clone()),
        (None, Some(pw), _) => log_concave_piecewise(d, pw),
        (None, None, Density::Grid(g)) => random_triples_grid(d, g, seed.wrapping_add(1), violates_log_concavity),
        (None, None, Density::Piecewise(_)) => unreachable!(),
    };
    let report = ConditionReport {
        level_set_condition: witness_alpha.is_some(),
        level_set_witness_alpha: witness_alpha,
        level_sets,
        quasiconcave: quasi_w.is_none(),
        quasiconcave_witness: quasi_w,
        log_concave: log_w.is_none(),
        log_concave_witness: log_w,
        eventually_level_bounded: eventually_bounded,
    };
    if report.log_concave && !report.quasiconcave {
        return Err(Error::Invariant("log-concave density reported as not quasiconcave".into()));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Ladder sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergesToMap,
    LimitPointIsMap,
    DivergesFromMap,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub maximizers: Vec<Maximizer>,
    pub canonical: Vec<f64>,
    pub sup_value: f64,
    pub dist_to_map: f64,
    pub argmax_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub point: Vec<f64>,
    pub members: usize,
    pub dist_to_map: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTrace {
    pub ladder: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub map: ArgmaxResult,
    pub limit_points: Vec<LimitPoint>,
    pub verdict: Verdict,
}

/// `c = base · factor^k` for `k = 1..=count`.
pub fn geometric_ladder(base: f64, factor: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| base * factor.powi(k as i32)).collect()
}

/// The default ladder `c = 2·4^ν`, `ν = 1..=nu_max`.
pub fn default_ladder(nu_max: usize) -> Vec<f64> {
    geometric_ladder(2.0, 4.0, nu_max)
}

/// Bayes estimators along `ladder`, compared against the MAP set.
pub fn sweep(d: &Density, ladder: &[f64], sbox: &SearchBox) -> Result<SweepTrace> {
    sweep_with(d, ladder, sbox, &SearchOptions::default())
}

pub fn sweep_with(d: &Density, ladder: &[f64], sbox: &SearchBox, opts: &SearchOptions) -> Result<SweepTrace> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("ladder is empty".into()));
    }
    if ladder.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("ladder must be strictly increasing".into()));
    }
    let map = map_estimate_with(d, sbox, opts)?;
    let rows = ladder
        .par_iter()
        .map(|&c| {
            let est = bayes_estimate_with(d, &LossSpec::new(c)?, sbox, opts)?;
            Ok(SweepRow {
                c,
                dist_to_map: map.distance_to_set(&est.canonical),
                argmax_diameter: est.diameter(),
                canonical: est.canonical,
                sup_value: est.sup_value,
                maximizers: est.maximizers,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tail = &rows[rows.len() / 2..];
    let cluster_radius = 10.0 * MAP_DISTANCE_TOL;
    let mut limit_points: Vec<(Vec<f64>, usize)> = Vec::new();
    for row in tail {
        match limit_points
            .iter_mut()
            .find(|(p, _)| norm_diff(p, &row.canonical) <= cluster_radius)
        {
            Some((p, count)) => {
                for (a, b) in p.iter_mut().zip(&row.canonical) {
                    *a = (*a * *count as f64 + b) / (*count as f64 + 1.0);
                }
                *count += 1;
            }
            None => limit_points.push((row.canonical.clone(), 1)),
        }
    }
    let limit_points: Vec<LimitPoint> = limit_points
        .into_iter()
        .map(|(point, members)| LimitPoint {
            dist_to_map: map.distance_to_set(&point),
            point,
            members,
        })
        .collect();

    let verdict = classify(&rows, &limit_points);
    Ok(SweepTrace {
        ladder: ladder.to_vec(),
        rows,
        map,
        limit_points,
        verdict,
    })
}

fn classify(rows: &[SweepRow], limit_points: &[LimitPoint]) -> Verdict {
    if rows.len() < 2 {
        return Verdict::Inconclusive;
    }
    let near = |c: f64| MAP_DISTANCE_TOL + 1.0 / c;
    let tail = &rows[rows.len() / 2..];
    let last_c = tail[tail.len() - 1].c;
    let all_near = tail.iter().all(|r| r.dist_to_map <= near(r.c));
    let none_near = tail.iter().all(|r| r.dist_to_map > near(r.c));
    if all_near {
        let monotone = tail.windows(2).all(|w| w[1].dist_to_map <= w[0].dist_to_map + 1e-9);
        let concentrated = tail.iter().all(|r| r.argmax_diameter <= near(r.c));
        if monotone && concentrated {
            Verdict::ConvergesToMap
        } else {
            Verdict::LimitPointIsMap
        }
    } else if limit_points.iter().any(|l| l.dist_to_map <= near(last_c)) {
        Verdict::LimitPointIsMap
    } else if none_near {
        Verdict::DivergesFromMap
    } else {
        Verdict::Inconclusive
    }
}

// ---------------------------------------------------------------------------
// Hit-and-miss diagnostic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Closed,
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypoRecord {
    pub nu: f64,
    pub kind: SetKind,
    pub lo: f64,
    pub hi: f64,
    /// Supremum of the mollified density over the set.
    pub sup_mollified: f64,
    /// Supremum of the density over the set.
    pub sup_base: f64,
    /// `sup_mollified − sup_base`.
    pub margin: f64,
    /// Comparison value: sup over the dilated box (closed) or over the
    /// eroded interval minus the continuity slack (open).
    #[serde(with = "ext_real")]
    pub reference: f64,
    pub slack: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypoReport {
    pub label: String,
    pub records: Vec<HypoRecord>,
    pub violations: usize,
}

/// Bound on `f(θ) − inf_{|z−θ|≤r} f(z)` from piece moduli and jumps.
fn window_drop_bound(d: &UscDensity1D, theta: f64, r: f64) -> f64 {
    let (u, v) = (theta - r, theta + r);
    let mut slack = 0.0;
    for (a, b, piece) in d.segments(u, v) {
        if let Some(p) = piece {
            slack += p.modulus(b - a);
        }
    }
    for &bp in d.breakpoints().iter().filter(|b| u <= **b && **b <= v) {
        let (l, rr) = (d.left_limit(bp), d.right_limit(bp));
        slack += d.evaluate(bp) - l.min(rr);
    }
    slack
}

/// Finite-family hit-and-miss diagnostic for the mollified sequence.
///
/// For each closed box `B` it checks `sup_B f^ν ≤ sup_{B⊕1/ν} f + 1e-12`;
/// for each open interval `O` it checks `sup_O f^ν ≥ sup_{O⊖1/ν} f − slack`,
/// with the slack bounding how far `f` can drop within one window.
pub fn hypo_diagnostic(d: &Density, nu_list: &[f64], boxes: &[(f64, f64)], opens: &[(f64, f64)]) -> Result<HypoReport> {
    let pw = d.as_piecewise().ok_or(Error::DimensionMismatch { expected: 1, got: d.dim() })?;
    if nu_list.windows(2).any(|w| !(w[1] > w[0])) || nu_list.iter().any(|n| !(*n > 0.0)) {
        return Err(Error::InvalidArgument("nu list must be positive and increasing".into()));
    }
    let opts = SearchOptions::default();
    let mut records = Vec::new();
    for &nu in nu_list {
        let r = 1.0 / nu;
        let obj = BallObjective::mollified(d, nu)?;
        for &(a, b) in boxes {
            let sbox = SearchBox::interval(a, b);
            let sup_moll = mollified_sup_with(&obj, &sbox, &opts)?.sup_value;
            let sup_base = map_estimate_with(d, &sbox, &opts)?.sup_value;
            let dilated = map_estimate_with(d, &SearchBox::interval(a - r, b + r), &opts)?.sup_value;
            records.push(HypoRecord {
                nu,
                kind: SetKind::Closed,
                lo: a,
                hi: b,
                sup_mollified: sup_moll,
                sup_base,
                margin: sup_moll - sup_base,
                reference: dilated,
                slack: HYPO_SLACK,
                violation: sup_moll > dilated + HYPO_SLACK,
            });
        }
        for &(a, b) in opens {
            let sup_moll = mollified_sup_with(&obj, &SearchBox::interval(a, b), &opts)?.sup_value;
            let sup_base = pw.sup_open(a, b);
            let (reference, slack) = if b - a > 2.0 * r {
                let inner = map_estimate_with(d, &SearchBox::interval(a + r, b - r), &opts)?;
                let theta = inner.canonical[0];
                let slack = window_drop_bound(&pw, theta, r);
                (pw.sup_open(a + r, b - r).min(inner.sup_value) - slack, slack)
            } else {
                (f64::NEG_INFINITY, 0.0)
            };
            records.push(HypoRecord {
                nu,
                kind: SetKind::Open,
                lo: a,
                hi: b,
                sup_mollified: sup_moll,
                sup_base,
                margin: sup_moll - sup_base,
                reference,
                slack,
                violation: sup_moll < reference - HYPO_SLACK,
            });
        }
    }
    let violations = records.iter().filter(|r| r.violation).count();
    Ok(HypoReport {
        label: "finite-family diagnostic".into(),
        records,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Piece, Tail};

    fn triangle() -> Density {
        UscDensity1D::new(vec![
            Piece::affine(-1.0, 0.0, 1.0, 1.0).unwrap(),
            Piece::affine(0.0, 1.0, 1.0, -1.0).unwrap(),
        ])
        .unwrap()
        .into()
    }

    fn uniform() -> Density {
        UscDensity1D::new(vec![Piece::constant(0.0, 1.0, 1.0).unwrap()]).unwrap().into()
    }

    fn ramp() -> Density {
        UscDensity1D::new(vec![Piece::affine(0.0, 1.0, 0.0, 2.0).unwrap()]).unwrap().into()
    }

    fn bimodal() -> Density {
        UscDensity1D::normalized(vec![
            Piece::constant(0.0, 1.0, 2.0).unwrap(),
            Piece::constant(2.0, 3.0, 1.0).unwrap(),
        ])
        .unwrap()
        .into()
    }

    #[test]
    fn triangle_level_set() {
        let r = level_set(&triangle(), 0.5);
        assert_eq!(r.set, LevelSet::Intervals(vec![[-0.5, 0.5]]));
        assert!(r.bounded && r.nonempty_interior);
        assert_eq!(r.bound_m, 0.5);
    }

    #[test]
    fn empty_and_full_level_sets() {
        let r = level_set(&uniform(), 1.5);
        assert_eq!(r.set, LevelSet::Intervals(vec![]));
        assert!(r.bounded && !r.nonempty_interior);
        let all = level_set(&uniform(), 0.0);
        assert!(!all.bounded && all.set == LevelSet::Everything);
    }

    #[test]
    fn tail_makes_level_set_unbounded() {
        let d: Density = UscDensity1D::from_parts(
            vec![Piece::constant(0.0, 1.0, 1.0).unwrap()],
            1e-9,
            vec![],
            Some(Tail { from: 2.0, sup: 0.8 }),
        )
        .unwrap()
        .into();
        assert!(!level_set(&d, 0.5).bounded);
        assert!(level_set(&d, 0.9).bounded);
    }

    #[test]
    fn conditions_on_simple_shapes() {
        let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
        let t = check_conditions(&triangle(), &grid, 0).unwrap();
        assert!(t.level_set_condition && t.quasiconcave && t.log_concave && t.eventually_level_bounded);
        let r = check_conditions(&ramp(), &grid, 0).unwrap();
        assert!(r.level_set_condition && r.quasiconcave && r.log_concave);
        let b = check_conditions(&bimodal(), &grid, 0).unwrap();
        assert!(!b.quasiconcave && !b.log_concave);
        let w = b.quasiconcave_witness.unwrap();
        assert!(w.f_z < w.f_x.min(w.f_y) - SHAPE_MARGIN);
        assert!(check_conditions(&triangle(), &[], 0).is_err());
    }

    #[test]
    fn convex_piece_is_not_log_concave() {
        // exp-like convex decay sampled by sqrt: 1 − √(2t) is log-convex near 0
        let d: Density = UscDensity1D::normalized(vec![
            Piece::sqrt(-0.5, 0.0, 1.0, -std::f64::consts::SQRT_2, -1.0, 0.0).unwrap(),
            Piece::sqrt(0.0, 0.5, 1.0, -std::f64::consts::SQRT_2, 1.0, 0.0).unwrap(),
        ])
        .unwrap()
        .into();
        let r = check_conditions(&d, &[0.5], 0).unwrap();
        assert!(r.quasiconcave);
        assert!(!r.log_concave);
        let w = r.log_concave_witness.unwrap();
        assert!(w.f_z < w.f_x.powf(w.lambda) * w.f_y.powf(1.0 - w.lambda) - SHAPE_MARGIN);
    }

    #[test]
    fn grid_shape_checks_are_seeded() {
        let g: Density = GridDensity::normalized(
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![3, 1],
            vec![1.0, 0.1, 1.0],
        )
        .unwrap()
        .into();
        let a = check_conditions(&g, &[0.2], 7).unwrap();
        let b = check_conditions(&g, &[0.2], 7).unwrap();
        assert_eq!(a, b);
        assert!(!a.quasiconcave);
    }

    #[test]
    fn sweep_examples() {
        let sbox = SearchBox::interval(-2.0, 2.0);
        let t = sweep(&triangle(), &default_ladder(6), &sbox).unwrap();
        assert_eq!(t.verdict, Verdict::ConvergesToMap);
        assert!(t.rows.iter().all(|r| r.canonical[0].abs() < 1e-12));

        let u = sweep(&uniform(), &[4.0, 8.0], &sbox).unwrap();
        assert_eq!(u.verdict, Verdict::LimitPointIsMap);
        assert!((u.rows[0].canonical[0] - 0.25).abs() < 1e-12);

        let single = sweep(&triangle(), &[10.0], &sbox).unwrap();
        assert_eq!(single.verdict, Verdict::Inconclusive);
        assert!(sweep(&triangle(), &[4.0, 2.0], &sbox).is_err());
    }

    #[test]
    fn hypo_examples() {
        let r = hypo_diagnostic(&triangle(), &[10.0], &[(-1.0, 1.0)], &[]).unwrap();
        let rec = &r.records[0];
        assert!((rec.sup_mollified - 0.95).abs() < 1e-12);
        assert!(rec.margin <= 0.0);
        assert_eq!(r.violations, 0);

        let u = hypo_diagnostic(&uniform(), &[10.0, 20.0], &[], &[(0.2, 0.8)]).unwrap();
        for rec in &u.records {
            assert!((rec.sup_mollified - 1.0).abs() < 1e-12);
            assert!(rec.margin.abs() < 1e-12);
            assert!(!rec.violation);
        }
    }
}
