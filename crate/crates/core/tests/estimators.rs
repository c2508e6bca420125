mod common;

use common::{oracle_integral, random_density, triangle};
use mapbayes_core::counterexample::{build_density, CounterexampleSpec};
use mapbayes_core::mollifier::mollified_sup;
use mapbayes_core::{
    approx_gap, ball_integral, bayes_estimate, map_estimate, BallObjective, Density, GridDensity, LossSpec,
    SearchBox,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scan_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * step)
        .map(|t| (t, f(t)))
        .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

#[test]
fn ball_integral_examples() {
    let ce = build_density(&CounterexampleSpec::default()).unwrap();
    let raw = BallObjective::new(&ce, 0.125, false).unwrap();
    assert!((ball_integral(&raw, &[0.0]) - 1.0 / 6.0).abs() < 1e-15);
    let tri = triangle();
    let b = BallObjective::new(&tri, 0.5, false).unwrap();
    let pw = tri.as_piecewise().unwrap();
    assert!((ball_integral(&b, &[0.0]) - oracle_integral(&pw, -0.5, 0.5)).abs() < 1e-12);
}

#[test]
fn mollified_sup_examples() {
    let ce = build_density(&CounterexampleSpec::default()).unwrap();
    let b = BallObjective::mollified(&ce, 8.0).unwrap();
    let r = mollified_sup(&b, &SearchBox::interval(-0.5, 0.5)).unwrap();
    assert!((r.sup_value - 2.0 / 3.0).abs() < 1e-12);
    assert!(r.canonical[0].abs() < 1e-9);

    let tri = triangle();
    let b = BallObjective::new(&tri, 0.5, true).unwrap();
    let r = mollified_sup(&b, &SearchBox::interval(-2.0, 2.0)).unwrap();
    let (t, v) = scan_max(|t| b.value(&[t]), -2.0, 2.0, 1e-4);
    assert!(r.sup_value >= v - 1e-12 && (r.canonical[0] - t).abs() < 1e-4);
}

#[test]
fn mollified_sup_never_exceeds_density_sup() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let d: Density = random_density(&mut rng).into();
        let pw = d.as_piecewise().unwrap().into_owned();
        let (lo, hi) = pw.support();
        let sbox = SearchBox::interval(lo - 1.0, hi + 1.0);
        let map = map_estimate(&d, &sbox).unwrap();
        for nu in [1.0, 3.0, 10.0, 40.0] {
            let b = BallObjective::mollified(&d, nu).unwrap();
            let r = mollified_sup(&b, &sbox).unwrap();
            assert!(r.sup_value <= map.sup_value + 1e-12);
            let (_, v) = scan_max(|t| b.value(&[t]), lo - 1.0, hi + 1.0, 1e-3);
            assert!(r.sup_value >= v - 1e-9, "nu={nu}: {} < scan {v}", r.sup_value);
        }
    }
}

#[test]
fn bayes_matches_dense_scan_on_counterexample() {
    let ce = build_density(&CounterexampleSpec::default()).unwrap();
    let loss = LossSpec::new(8.0).unwrap();
    let r = bayes_estimate(&ce, &loss, &SearchBox::interval(-1.0, 3.0)).unwrap();
    let b = BallObjective::new(&ce, 0.125, false).unwrap();
    let (_, coarse) = scan_max(|t| b.raw(&[t]), -1.0, 3.0, 1e-4);
    let (t, fine) = scan_max(|t| b.raw(&[t]), 2.0, 2.25, 1e-6);
    assert!(r.sup_value >= coarse.max(fine) - 1e-14);
    assert!(r.sup_value >= 0.17578125);
    assert!((r.canonical[0] - t).abs() < 2e-6);
    assert!(r.canonical[0].abs() >= 0.5);
}

#[test]
fn bayes_and_gap_on_random_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..15 {
        let d: Density = random_density(&mut rng).into();
        let pw = d.as_piecewise().unwrap().into_owned();
        let (lo, hi) = pw.support();
        let c = rng.gen_range(1.0..50.0);
        let loss = LossSpec::new(c).unwrap();
        let sbox = SearchBox::interval(lo - 0.5, hi + 0.5);
        let r = bayes_estimate(&d, &loss, &sbox).unwrap();
        let b = BallObjective::new(&d, 1.0 / c, false).unwrap();
        let (_, v) = scan_max(|t| b.raw(&[t]), lo - 0.5, hi + 0.5, 1e-3);
        assert!(r.sup_value >= v - 1e-12);
        for m in &r.maximizers {
            assert!(b.raw(m.lower()) >= r.sup_value - 2.0 * r.tol_value);
        }
        let g = approx_gap(&d, &loss, &r.canonical, &sbox).unwrap();
        assert!(g.gap <= r.tol_value + 1e-15);
    }
}

fn bumpy_grid() -> GridDensity {
    let n = 12;
    let values: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = ((k / n) as f64, (k % n) as f64);
            (-((i - 4.0).powi(2) + (j - 7.0).powi(2)) / 6.0).exp() + 0.3 * (-((i - 9.0).powi(2) + (j - 2.0).powi(2)) / 2.0).exp()
        })
        .collect();
    GridDensity::normalized(vec![0.0, 0.0], vec![0.25, 0.25], vec![n, n], values).unwrap()
}

#[test]
fn grid_map_matches_exhaustive_scan() {
    let g = bumpy_grid();
    let best = (0..12)
        .flat_map(|i| (0..12).map(move |j| (i, j)))
        .max_by(|a, b| g.value_at_cell(&[a.0, a.1]).total_cmp(&g.value_at_cell(&[b.0, b.1])))
        .unwrap();
    let d: Density = g.clone().into();
    let r = map_estimate(&d, &SearchBox::rect([-1.0, -1.0], [4.0, 4.0])).unwrap();
    let (lo, hi) = g.cell_bounds(&[best.0, best.1]);
    assert!((0..2).all(|a| lo[a] - 1e-6 <= r.canonical[a] && r.canonical[a] <= hi[a] + 1e-6));
    assert_eq!(r.sup_value, g.value_at_cell(&[best.0, best.1]));
}

#[test]
fn grid_bayes_beats_coarse_scan() {
    let g = bumpy_grid();
    let d: Density = g.into();
    let loss = LossSpec::new(4.0).unwrap();
    let r = bayes_estimate(&d, &loss, &SearchBox::rect([0.0, 0.0], [3.0, 3.0])).unwrap();
    let b = BallObjective::new(&d, 0.25, false).unwrap();
    let mut best = f64::NEG_INFINITY;
    for i in 0..=120 {
        for j in 0..=120 {
            best = best.max(b.raw(&[i as f64 * 0.025, j as f64 * 0.025]));
        }
    }
    assert!(r.sup_value >= best - 1e-12);
    assert!((b.raw(&r.canonical) - r.sup_value).abs() <= r.tol_value);
}
