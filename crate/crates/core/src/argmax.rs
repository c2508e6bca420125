//! Maximizer sets with a deterministic canonical representative.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// One component of an argmax set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Maximizer {
    Point(Vec<f64>),
    /// Closed axis-aligned box; a closed interval in one dimension.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Maximizer {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Maximizer::Box {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    /// Point of the component nearest to `target`.
    pub fn nearest_to(&self, target: &[f64]) -> Vec<f64> {
        match self {
            Maximizer::Point(p) => p.clone(),
            Maximizer::Box { lo, hi } => target
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(t, (l, h))| t.clamp(*l, *h))
                .collect(),
        }
    }

    pub fn distance_to(&self, target: &[f64]) -> f64 {
        norm_diff(&self.nearest_to(target), target)
    }

    pub fn lower(&self) -> &[f64] {
        match self {
            Maximizer::Point(p) => p,
            Maximizer::Box { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &[f64] {
        match self {
            Maximizer::Point(p) => p,
            Maximizer::Box { hi, .. } => hi,
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Maximizer::Point(_))
    }
}

pub(crate) fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Supremum with its maximizer set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgmaxResult {
    #[serde(with = "ext_real")]
    pub sup_value: f64,
    pub maximizers: Vec<Maximizer>,
    /// Smallest-norm maximizer, ties broken lexicographically.
    pub canonical: Vec<f64>,
    pub tol_value: f64,
    pub sup_infinite: bool,
}

impl ArgmaxResult {
    /// Builds a result from candidates already known to be within `tol_value`
    /// of `sup_value`. Points closer than `merge_eps` collapse to the best one
    /// and points inside a box are absorbed by it.
    pub(crate) fn assemble(
        sup_value: f64,
        tol_value: f64,
        mut points: Vec<(Vec<f64>, f64)>,
        mut boxes: Vec<(Vec<f64>, Vec<f64>)>,
        merge_eps: f64,
    ) -> Self {
        let dim = points
            .first()
            .map(|p| p.0.len())
            .or_else(|| boxes.first().map(|b| b.0.len()))
            .unwrap_or(1);

        boxes.sort_by(|a, b| lex_cmp(&a.0, &b.0).then(lex_cmp(&a.1, &b.1)));
        if dim == 1 {
            let mut merged: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
            for (lo, hi) in boxes {
                match merged.last_mut() {
                    Some(last) if lo[0] <= last.1[0] + merge_eps => last.1[0] = last.1[0].max(hi[0]),
                    _ => merged.push((lo, hi)),
                }
            }
            boxes = merged;
        } else {
            boxes.dedup();
        }

        let in_box = |p: &[f64], eps: f64| {
            boxes.iter().any(|(lo, hi)| {
                p.iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(x, (l, h))| *x >= l - eps && *x <= h + eps)
            })
        };
        points.retain(|(p, _)| !in_box(p, merge_eps));

        // best value first, then smallest norm, then lexicographic
        points.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then(norm(&a.0).total_cmp(&norm(&b.0)))
                .then(lex_cmp(&a.0, &b.0))
        });
        let mut reps: Vec<Vec<f64>> = Vec::new();
        for (p, _) in points {
            if reps.iter().all(|r| norm_diff(r, &p) > merge_eps) {
                reps.push(p);
            }
        }

        let mut maximizers: Vec<Maximizer> = reps
            .into_iter()
            .map(Maximizer::Point)
            .chain(boxes.into_iter().map(|(lo, hi)| Maximizer::Box { lo, hi }))
            .collect();
        maximizers.sort_by(|a, b| lex_cmp(a.lower(), b.lower()).then(lex_cmp(a.upper(), b.upper())));

        let origin = vec![0.0; dim];
        let canonical = maximizers
            .iter()
            .map(|m| m.nearest_to(&origin))
            .min_by(|a, b| norm(a).total_cmp(&norm(b)).then(lex_cmp(a, b)))
            .unwrap_or_else(|| origin.clone());

        ArgmaxResult {
            sup_value,
            maximizers,
            canonical,
            tol_value,
            sup_infinite: sup_value == f64::INFINITY,
        }
    }

    /// Euclidean distance from `point` to the maximizer set.
    pub fn distance_to_set(&self, point: &[f64]) -> f64 {
        self.maximizers
            .iter()
            .map(|m| m.distance_to(point))
            .fold(f64::INFINITY, f64::min)
    }

    /// Per-axis bounding box of the maximizer set.
    pub fn hull(&self) -> (Vec<f64>, Vec<f64>) {
        let dim = self.canonical.len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for m in &self.maximizers {
            for a in 0..dim {
                lo[a] = lo[a].min(m.lower()[a]);
                hi[a] = hi[a].max(m.upper()[a]);
            }
        }
        (lo, hi)
    }

    /// Diameter of the hull.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.hull();
        norm_diff(&lo, &hi)
    }

    /// Scales objective values by `factor > 0`; maximizers are unchanged.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.sup_value *= factor;
        self.tol_value *= factor;
        self
    }
}

/// Serializes non-finite reals as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not an extended real: {other}"))),
            },
        }
    }
}
