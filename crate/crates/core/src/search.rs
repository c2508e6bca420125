//! Global maximization of densities and of their ball integrals.
//!
//! In one dimension the ball integral `g(θ) = ∫_{θ−r}^{θ+r} f` is smooth
//! between the shifted breakpoints `b ± r`, with `g'(θ) = f(θ+r) − f(θ−r)`.
//! On each such sub-interval both window ends stay inside a single piece, so
//! the stationary condition reduces to at most a quadratic in a square-root
//! variable. Those roots, the sub-interval ends, and the box ends form an
//! exact candidate set; a uniform scan with golden-section polishing runs on
//! top as a safety net.

use crate::argmax::ArgmaxResult;
use crate::density::{GridDensity, Piece, PieceKind, SearchBox, UscDensity1D};

/// Tuning knobs shared by the maximizers.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Value tolerance on the density scale; `None` picks the density default.
    pub tol_value: Option<f64>,
    /// Fallback scan step; `None` means `1e-4 · box width` (1D).
    pub grid_step: Option<f64>,
    /// Golden-section / pattern-search stopping width, relative to the box.
    pub refine_tol: f64,
    pub fallback_scan: bool,
    pub max_scan_points: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol_value: None,
            grid_step: None,
            refine_tol: 1e-10,
            fallback_scan: true,
            max_scan_points: 1_000_000,
        }
    }
}

const REFINE_TOP_K: usize = 16;

/// Merge radius for maximizer points found in a box of width `width`.
pub(crate) fn merge_eps(width: f64) -> f64 {
    1e-8 * width.max(1.0)
}

// ---------------------------------------------------------------------------
// 1D density maximization
// ---------------------------------------------------------------------------

pub(crate) fn density_argmax_1d(d: &UscDensity1D, lo: f64, hi: f64, tol: f64) -> ArgmaxResult {
    let eps = merge_eps(hi - lo);
    let infinite: Vec<(Vec<f64>, f64)> = d
        .unbounded_at()
        .iter()
        .filter(|t| lo <= **t && **t <= hi)
        .map(|t| (vec![*t], f64::INFINITY))
        .collect();
    if !infinite.is_empty() {
        return ArgmaxResult::assemble(f64::INFINITY, tol, infinite, Vec::new(), eps);
    }

    let mut candidates: Vec<f64> = vec![lo, hi];
    candidates.extend(d.breakpoints().iter().copied().filter(|b| lo <= *b && *b <= hi));
    let valued: Vec<(f64, f64)> = candidates.iter().map(|&t| (t, d.evaluate(t))).collect();
    let sup = valued.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);

    let mut boxes = Vec::new();
    for (u, v, piece) in d.segments(lo, hi) {
        let flat_value = match piece {
            None => Some(0.0),
            Some(p) if p.kind.is_flat() => Some(p.value(u)),
            _ => None,
        };
        if let Some(k) = flat_value {
            if k >= sup - tol {
                boxes.push((vec![u], vec![v]));
            }
        }
    }
    let points = valued
        .into_iter()
        .filter(|(_, v)| *v >= sup - tol)
        .map(|(t, v)| (vec![t], v))
        .collect();
    ArgmaxResult::assemble(sup, tol, points, boxes, eps)
}

// ---------------------------------------------------------------------------
// 1D ball-integral maximization
// ---------------------------------------------------------------------------

/// Local description of one window end, relative to a reference point.
#[derive(Debug, Clone, Copy)]
enum Side {
    /// `v + slope·x`
    Linear { v: f64, slope: f64 },
    /// `a + b·√(w + s·x)`
    Sqrt { a: f64, b: f64, s: f64, w: f64 },
}

fn side_at(piece: Option<&Piece>, t: f64) -> Side {
    match piece.map(|p| p.kind) {
        None => Side::Linear { v: 0.0, slope: 0.0 },
        Some(PieceKind::Constant { k }) => Side::Linear { v: k, slope: 0.0 },
        Some(PieceKind::Affine { a, b, anchor }) => Side::Linear {
            v: a + b * (t - anchor),
            slope: b,
        },
        Some(PieceKind::Sqrt { a, b: 0.0, .. }) => Side::Linear { v: a, slope: 0.0 },
        Some(PieceKind::Sqrt { a, b, s, t0 }) => Side::Sqrt {
            a,
            b,
            s,
            w: (s * (t - t0)).max(0.0),
        },
    }
}

/// Nonnegative real roots of `A u² + B u + C = 0`.
fn nonneg_quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        let disc = if disc < 0.0 && disc > -1e-12 * b * b { 0.0 } else { disc };
        if disc >= 0.0 {
            let sign = if b >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (b + sign * disc.sqrt());
            if q != 0.0 {
                roots.push(q / a);
                roots.push(c / q);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots
        .into_iter()
        .filter(|u| u.is_finite() && *u >= -1e-12)
        .map(|u| u.max(0.0))
        .collect()
}

/// Offsets `x` solving `plus(x) = minus(x)`; `None` when the difference is
/// constant in `x` (then the objective is affine on the sub-interval).
fn stationary_offsets(plus: Side, minus: Side) -> Option<Vec<f64>> {
    let out = match (plus, minus) {
        (Side::Linear { v: v1, slope: c1 }, Side::Linear { v: v2, slope: c2 }) => {
            if c1 == c2 {
                return None;
            }
            vec![(v2 - v1) / (c1 - c2)]
        }
        (Side::Sqrt { a, b, s, w }, Side::Linear { v, slope }) => {
            // u² = w + s·x
            nonneg_quadratic_roots(slope * s, -b, v - slope * s * w - a)
                .into_iter()
                .map(|u| s * (u * u - w))
                .collect()
        }
        (Side::Linear { v, slope }, Side::Sqrt { a, b, s, w }) => nonneg_quadratic_roots(slope * s, -b, v - slope * s * w - a)
            .into_iter()
            .map(|u| s * (u * u - w))
            .collect(),
        (
            Side::Sqrt {
                a: a1,
                b: b1,
                s: s1,
                w: w1,
            },
            Side::Sqrt {
                a: a2,
                b: b2,
                s: s2,
                w: w2,
            },
        ) => {
            let delta = a1 - a2;
            let ss = s1 * s2;
            nonneg_quadratic_roots(
                b2 * b2 * ss - b1 * b1,
                -2.0 * delta * b1,
                b2 * b2 * (w2 - ss * w1) - delta * delta,
            )
            .into_iter()
            .map(|u| s1 * (u * u - w1))
            .collect()
        }
    };
    Some(out)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while (b - a) > tol && iter < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Raw ball integral in one dimension.
pub(crate) fn window_mass(d: &UscDensity1D, theta: f64, r: f64) -> f64 {
    let (u, v) = (theta - r, theta + r);
    if let Some(i) = d.piece_index_at(u) {
        let p = &d.pieces()[i];
        if v <= p.hi {
            // window inside one piece: midpoint rule is exact for these kinds
            match p.kind {
                PieceKind::Constant { k } => return 2.0 * r * k,
                PieceKind::Affine { .. } => return 2.0 * r * p.value(theta),
                PieceKind::Sqrt { .. } => {}
            }
        }
    }
    d.integrate(u, v)
}

/// Maximizes the raw ball integral of radius `r` over `[lo, hi]`.
/// `tol_raw` is the value tolerance in raw (mass) units.
pub(crate) fn ball_argmax_1d(
    d: &UscDensity1D,
    r: f64,
    lo: f64,
    hi: f64,
    tol_raw: f64,
    opts: &SearchOptions,
) -> ArgmaxResult {
    let g = |t: f64| window_mass(d, t, r);
    let width = hi - lo;

    let mut knots: Vec<f64> = vec![lo, hi];
    for &b in d.breakpoints() {
        for t in [b - r, b + r] {
            if lo < t && t < hi {
                knots.push(t);
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let mut candidates: Vec<f64> = knots.clone();
    let mut flat_spans: Vec<(f64, f64)> = Vec::new();
    for w in knots.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        if tb <= ta {
            continue;
        }
        let m = 0.5 * (ta + tb);
        let plus_piece = d.piece_index_at(m + r).map(|i| &d.pieces()[i]);
        let minus_piece = d.piece_index_at(m - r).map(|i| &d.pieces()[i]);
        let plus = side_at(plus_piece, m + r);
        let minus = side_at(minus_piece, m - r);
        match stationary_offsets(plus, minus) {
            None => flat_spans.push((ta, tb)),
            Some(xs) => {
                for x in xs {
                    let t = m + x;
                    if ta < t && t < tb {
                        candidates.push(t);
                    }
                }
            }
        }
    }

    if opts.fallback_scan && width > 0.0 {
        let step = opts.grid_step.unwrap_or(1e-4 * width).max(width / opts.max_scan_points as f64);
        let n = ((width / step).ceil() as usize).max(2);
        let ts: Vec<f64> = (0..=n).map(|i| lo + width * i as f64 / n as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
        let mut peaks: Vec<usize> = (0..=n)
            .filter(|&i| (i == 0 || vs[i] >= vs[i - 1]) && (i == n || vs[i] >= vs[i + 1]))
            .collect();
        peaks.sort_by(|&i, &j| vs[j].total_cmp(&vs[i]).then(i.cmp(&j)));
        for &i in peaks.iter().take(REFINE_TOP_K) {
            let a = ts[i.saturating_sub(1)];
            let b = ts[(i + 1).min(n)];
            candidates.push(ts[i]);
            candidates.push(golden_max(g, a, b, opts.refine_tol * width.max(1.0)));
        }
    }

    let valued: Vec<(f64, f64)> = candidates.into_iter().map(|t| (t, g(t))).collect();
    let sup = valued.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let threshold = sup - tol_raw;
    let boxes = flat_spans
        .into_iter()
        .filter(|(a, b)| g(*a) >= threshold && g(*b) >= threshold)
        .map(|(a, b)| (vec![a], vec![b]))
        .collect();
    let points = valued
        .into_iter()
        .filter(|(_, v)| *v >= threshold)
        .map(|(t, v)| (vec![t], v))
        .collect();
    ArgmaxResult::assemble(sup, tol_raw, points, boxes, merge_eps(width))
}

// ---------------------------------------------------------------------------
// 2D grid densities
// ---------------------------------------------------------------------------

pub(crate) fn grid_argmax_2d(g: &GridDensity, sbox: &SearchBox, tol: f64) -> ArgmaxResult {
    let axis_range = |a: usize| {
        let n = g.shape()[a] as f64;
        let lo = ((sbox.lo[a] - g.origin()[a]) / g.spacing()[a]).floor();
        let hi = ((sbox.hi[a] - g.origin()[a]) / g.spacing()[a]).floor();
        (lo.max(0.0).min(n) as usize)..((hi + 1.0).max(0.0).min(n) as usize)
    };
    let mut cells = Vec::new();
    let mut sup = 0.0f64;
    for i in axis_range(0) {
        for j in axis_range(1) {
            let (lo, hi) = g.cell_bounds(&[i, j]);
            let overlaps = (0..2).all(|a| lo[a] <= sbox.hi[a] && hi[a] >= sbox.lo[a]);
            if overlaps {
                let v = g.value_at_cell(&[i, j]);
                sup = sup.max(v);
                let clo: Vec<f64> = (0..2).map(|a| lo[a].max(sbox.lo[a])).collect();
                let chi: Vec<f64> = (0..2).map(|a| hi[a].min(sbox.hi[a])).collect();
                cells.push((clo, chi, v));
            }
        }
    }
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = if cells.iter().any(|c| c.2 >= sup - tol) {
        cells
            .into_iter()
            .filter(|c| c.2 >= sup - tol)
            .map(|c| (c.0, c.1))
            .collect()
    } else {
        vec![(sbox.lo.clone(), sbox.hi.clone())]
    };
    ArgmaxResult::assemble(sup, tol, Vec::new(), boxes, merge_eps(sbox.max_width()))
}

/// Maximizes the raw disc mass over a 2D box: uniform scan, then compass
/// search from the best local peaks.
pub(crate) fn ball_argmax_2d(g: &GridDensity, r: f64, sbox: &SearchBox, tol_raw: f64, opts: &SearchOptions) -> ArgmaxResult {
    let f = |p: &[f64]| g.disc_mass(p, r);
    let min_h = g.spacing().iter().copied().fold(f64::INFINITY, f64::min);
    let step = opts.grid_step.unwrap_or(min_h / 4.0);
    let n: Vec<usize> = (0..2)
        .map(|a| (((sbox.hi[a] - sbox.lo[a]) / step).ceil() as usize).clamp(1, 400))
        .collect();
    let coord = |a: usize, k: usize| sbox.lo[a] + (sbox.hi[a] - sbox.lo[a]) * k as f64 / n[a] as f64;
    let mut vals = vec![vec![0.0; n[1] + 1]; n[0] + 1];
    for (i, row) in vals.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = f(&[coord(0, i), coord(1, j)]);
        }
    }
    let mut peaks = Vec::new();
    for i in 0..=n[0] {
        for j in 0..=n[1] {
            let v = vals[i][j];
            let mut is_peak = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii >= 0 && jj >= 0 && ii <= n[0] as i64 && jj <= n[1] as i64 && vals[ii as usize][jj as usize] > v {
                    is_peak = false;
                }
            }
            if is_peak {
                peaks.push((i, j, v));
            }
        }
    }
    peaks.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));

    let width = sbox.max_width().max(1.0);
    let clamp = |p: [f64; 2]| [p[0].clamp(sbox.lo[0], sbox.hi[0]), p[1].clamp(sbox.lo[1], sbox.hi[1])];
    let mut candidates: Vec<(Vec<f64>, f64)> = Vec::new();
    for &(i, j, v) in peaks.iter().take(REFINE_TOP_K) {
        let mut p = [coord(0, i), coord(1, j)];
        let mut fp = v;
        candidates.push((p.to_vec(), fp));
        let mut h = step;
        while h > opts.refine_tol * width {
            let mut moved = false;
            for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
                let q = clamp([p[0] + dx, p[1] + dy]);
                let fq = f(&q);
                if fq > fp {
                    p = q;
                    fp = fq;
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        candidates.push((p.to_vec(), fp));
    }
    let sup = candidates.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    candidates.retain(|c| c.1 >= sup - tol_raw);
    ArgmaxResult::assemble(sup, tol_raw, candidates, Vec::new(), 1e-6 * width)
}
