//! Shared fixtures and oracles for the integration tests.
#![allow(dead_code)]

use mapbayes_core::{Density, Piece, UscDensity1D};
use rand::Rng;

pub fn triangle() -> Density {
    UscDensity1D::new(vec![
        Piece::affine(-1.0, 0.0, 1.0, 1.0).unwrap(),
        Piece::affine(0.0, 1.0, 1.0, -1.0).unwrap(),
    ])
    .unwrap()
    .into()
}

/// Apex 2/3 at 0 on [-1, 2].
pub fn skewed_triangle() -> Density {
    UscDensity1D::new(vec![
        Piece::affine(-1.0, 0.0, 2.0 / 3.0, 2.0 / 3.0).unwrap(),
        Piece::affine(0.0, 2.0, 2.0 / 3.0, -1.0 / 3.0).unwrap(),
    ])
    .unwrap()
    .into()
}

/// `(6/7)√t` on [0, 1], `(6/7)(2 − t)` on [1, 2]; mode at 1.
pub fn sqrt_rise() -> Density {
    let k = 6.0 / 7.0;
    UscDensity1D::new(vec![
        Piece::sqrt(0.0, 1.0, 0.0, k, 1.0, 0.0).unwrap(),
        Piece::affine(1.0, 2.0, 2.0 * k, -k).unwrap(),
    ])
    .unwrap()
    .into()
}

/// Trapezoid with a flat top on [0, 1]; the MAP set is an interval.
pub fn trapezoid() -> Density {
    UscDensity1D::normalized(vec![
        Piece::affine(-1.0, 0.0, 1.0, 1.0).unwrap(),
        Piece::constant(0.0, 1.0, 1.0).unwrap(),
        Piece::affine_anchored(1.0, 3.0, 1.0, -0.5, 1.0).unwrap(),
    ])
    .unwrap()
    .into()
}

pub fn quasiconcave_family() -> Vec<(&'static str, Density)> {
    vec![
        ("triangle", triangle()),
        ("skewed_triangle", skewed_triangle()),
        ("sqrt_rise", sqrt_rise()),
        ("trapezoid", trapezoid()),
    ]
}

/// Random normalized density with one to six pieces of every kind,
/// separated by occasional gaps.
pub fn random_density<R: Rng>(rng: &mut R) -> UscDensity1D {
    let count = rng.gen_range(1..=6);
    let mut t = rng.gen_range(-3.0..0.0);
    let mut pieces = Vec::with_capacity(count);
    for _ in 0..count {
        if rng.gen_bool(0.25) {
            t += rng.gen_range(0.05..0.5);
        }
        let len = rng.gen_range(0.1..1.5);
        let (lo, hi) = (t, t + len);
        let piece = match rng.gen_range(0..3) {
            0 => Piece::constant(lo, hi, rng.gen_range(0.0..2.0)),
            1 => {
                let (v0, v1) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
                Piece::affine_anchored(lo, hi, v0, (v1 - v0) / len, lo)
            }
            _ => {
                let a = rng.gen_range(0.0..1.5);
                let b = rng.gen_range(-a / len.sqrt()..2.0);
                if rng.gen_bool(0.5) {
                    Piece::sqrt(lo, hi, a, b, 1.0, lo)
                } else {
                    Piece::sqrt(lo, hi, a, b, -1.0, hi)
                }
            }
        };
        pieces.push(piece.unwrap());
        t = hi;
    }
    if pieces.iter().all(|p| p.integral(p.lo, p.hi) < 1e-3) {
        pieces.push(Piece::constant(t, t + 1.0, 1.0).unwrap());
    }
    UscDensity1D::normalized(pieces).unwrap()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Oracle integral of `d` over `[a, b]`, split at breakpoints so each
/// panel sees one smooth formula. Piece formulas are evaluated directly,
/// so endpoint values never leak across a jump.
pub fn oracle_integral(d: &UscDensity1D, a: f64, b: f64) -> f64 {
    d.pieces()
        .iter()
        .map(|p| {
            let (u, v) = (p.lo.max(a), p.hi.min(b));
            if v <= u {
                0.0
            } else {
                adaptive_simpson(|t| p.value(t), u, v, 1e-13)
            }
        })
        .sum()
}
