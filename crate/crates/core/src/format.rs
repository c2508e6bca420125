//! JSON density specifications.
//!
//! Accepted shapes:
//!
//! ```json
//! {"pieces": [{"lo": -1, "hi": 0, "kind": "affine", "params": {"a": 1, "b": 1}}],
//!  "unbounded_at": [], "tail": {"from": 3, "sup": 0.5}, "mass_tol": 1e-9, "normalize": false}
//! {"dim": 1, "origin": 0.0, "spacing": 0.25, "values": [1, 3, 2, 1], "normalize": true}
//! {"dim": 2, "origin": [0, 0], "spacing": [0.5, 0.5], "values": [[1, 2], [3, 4]]}
//! {"counterexample": {"max_bump": 20}}
//! "path/to/density.json"
//! ```
//!
//! Relative paths resolve against the directory of the file that mentions them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::counterexample::{self, CounterexampleSpec};
use crate::density::{Density, GridDensity, Piece, Tail, UscDensity1D, TOL_MASS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecesSpec {
    pub pieces: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unbounded_at: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Tail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Scalar(f64),
    PerAxis(Vec<f64>),
}

impl Axis {
    fn to_vec(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            Axis::Scalar(x) => Ok(vec![*x; dim]),
            Axis::PerAxis(v) if v.len() == dim => Ok(v.clone()),
            Axis::PerAxis(v) => Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            }),
        }
    }
}

/// Flat row-major values or one nested row per first-axis index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValues {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub origin: Axis,
    pub spacing: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Vec<usize>>,
    pub values: GridValues,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleRef {
    pub counterexample: CounterexampleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    Path(PathBuf),
    Pieces(PiecesSpec),
    Grid(GridSpec),
    Counterexample(CounterexampleRef),
}

impl DensitySpec {
    /// Parses a spec, naming the expected shape in the error.
    pub fn from_value(v: &Value) -> Result<Self> {
        let shape_err = |e: serde_json::Error, what: &str| Error::InvalidDensity(format!("{what} spec: {e}"));
        match v {
            Value::String(s) => Ok(DensitySpec::Path(PathBuf::from(s))),
            Value::Object(m) if m.contains_key("pieces") => {
                serde_json::from_value(v.clone()).map(DensitySpec::Pieces).map_err(|e| shape_err(e, "pieces"))
            }
            Value::Object(m) if m.contains_key("dim") || m.contains_key("values") => {
                serde_json::from_value(v.clone()).map(DensitySpec::Grid).map_err(|e| shape_err(e, "grid"))
            }
            Value::Object(m) if m.contains_key("counterexample") => serde_json::from_value(v.clone())
                .map(DensitySpec::Counterexample)
                .map_err(|e| shape_err(e, "counterexample")),
            _ => Err(Error::InvalidDensity(
                "expected a path, or an object with `pieces`, `dim`/`values` or `counterexample`".into(),
            )),
        }
    }

    /// Materializes the density; `base_dir` anchors relative paths.
    pub fn load(&self, base_dir: &Path) -> Result<Density> {
        match self {
            DensitySpec::Path(p) => load_density_file(&base_dir.join(p)),
            DensitySpec::Pieces(spec) => spec.build().map(Density::from),
            DensitySpec::Grid(spec) => spec.build().map(Density::from),
            DensitySpec::Counterexample(r) => counterexample::build_density(&r.counterexample),
        }
    }
}

impl PiecesSpec {
    pub fn build(&self) -> Result<UscDensity1D> {
        let mut pieces = self.pieces.clone();
        let mut tail = self.tail;
        if self.normalize {
            let mass: f64 = pieces.iter().map(|p| p.integral(p.lo, p.hi)).sum();
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::InvalidDensity(format!("cannot normalize mass {mass}")));
            }
            pieces = pieces.iter().map(|p| p.scaled(1.0 / mass)).collect();
            tail = tail.map(|t| Tail {
                sup: t.sup / mass,
                ..t
            });
        }
        UscDensity1D::from_parts(pieces, self.mass_tol.unwrap_or(TOL_MASS), self.unbounded_at.clone(), tail)
    }

    pub fn from_density(d: &UscDensity1D) -> Self {
        PiecesSpec {
            pieces: d.pieces().to_vec(),
            unbounded_at: d.unbounded_at().to_vec(),
            tail: d.tail(),
            mass_tol: (d.mass_tol() != TOL_MASS).then_some(d.mass_tol()),
            normalize: false,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<GridDensity> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::InvalidDensity(format!("grid dim must be 1 or 2, got {}", self.dim)));
        }
        let origin = self.origin.to_vec(self.dim)?;
        let spacing = self.spacing.to_vec(self.dim)?;
        let (values, inferred) = match &self.values {
            GridValues::Flat(v) if self.dim == 1 => (v.clone(), Some(vec![v.len()])),
            GridValues::Flat(v) => (v.clone(), None),
            GridValues::Nested(rows) => {
                if self.dim != 2 {
                    return Err(Error::InvalidDensity("nested values need dim 2".into()));
                }
                let cols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidDensity("grid rows have different lengths".into()));
                }
                (rows.concat(), Some(vec![rows.len(), cols]))
            }
        };
        let shape = match (&self.shape, inferred) {
            (Some(s), Some(i)) if *s != i => {
                return Err(Error::InvalidDensity(format!("shape {s:?} does not match values {i:?}")));
            }
            (Some(s), _) => s.clone(),
            (None, Some(i)) => i,
            (None, None) => {
                return Err(Error::InvalidDensity("flat 2D values need an explicit shape".into()));
            }
        };
        if self.normalize {
            GridDensity::normalized(origin, spacing, shape, values)
        } else {
            GridDensity::new(origin, spacing, shape, values)
        }
    }

    pub fn from_density(g: &GridDensity) -> Self {
        GridSpec {
            dim: g.dim(),
            origin: Axis::PerAxis(g.origin().to_vec()),
            spacing: Axis::PerAxis(g.spacing().to_vec()),
            shape: Some(g.shape().to_vec()),
            values: GridValues::Flat(g.values().to_vec()),
            normalize: false,
        }
    }
}

/// Reads a density spec from a JSON file.
pub fn load_density_file(path: &Path) -> Result<Density> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidDensity(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let spec = DensitySpec::from_value(&value)?;
    if let DensitySpec::Path(p) = &spec {
        return Err(Error::InvalidDensity(format!(
            "{} only names another file ({}); nested references are not followed",
            path.display(),
            p.display()
        )));
    }
    spec.load(path.parent().unwrap_or(Path::new(".")))
}

/// Parses a density from JSON text.
pub fn density_from_json(text: &str) -> Result<Density> {
    let value: Value = serde_json::from_str(text)?;
    DensitySpec::from_value(&value)?.load(Path::new("."))
}

/// JSON spec that reloads to the same density.
pub fn density_to_json(d: &Density) -> Result<String> {
    let text = match d {
        Density::Piecewise(pw) => serde_json::to_string_pretty(&PiecesSpec::from_density(pw))?,
        Density::Grid(g) => serde_json::to_string_pretty(&GridSpec::from_density(g))?,
    };
    Ok(text)
}

/// `theta,value` rows at `lo + i·step`.
pub fn sample_csv(d: &Density, lo: f64, hi: f64, step: f64) -> String {
    let mut out = String::from("theta,value\n");
    let count = ((hi - lo) / step).round() as usize;
    for i in 0..=count {
        let t = lo + i as f64 * step;
        out.push_str(&format!("{},{}\n", fmt_num(t), fmt_num(d.evaluate(&[t]))));
    }
    out
}

/// 17 significant digits, round-trippable.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_round_trip() {
        let text = r#"{"pieces": [
            {"lo": -1, "hi": 0, "kind": "affine", "params": {"a": 1, "b": 1}},
            {"lo": 0, "hi": 1, "kind": "affine", "params": {"a": 1, "b": -1}}]}"#;
        let d = density_from_json(text).unwrap();
        assert_eq!(d.evaluate(&[0.0]), 1.0);
        let back = density_from_json(&density_to_json(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn sqrt_and_constant_pieces() {
        let text = r#"{"pieces": [
            {"lo": 0, "hi": 1, "kind": "sqrt", "params": {"a": 0, "b": 1.5, "s": 1, "t0": 0}},
            {"lo": 1, "hi": 2, "kind": "constant", "params": {"k": 0}}]}"#;
        let d = density_from_json(text).unwrap();
        assert_eq!(d.evaluate(&[0.25]), 0.75);
    }

    #[test]
    fn grid_shapes() {
        let d = density_from_json(r#"{"dim": 1, "origin": 0.0, "spacing": 0.5, "values": [1, 3], "normalize": true}"#).unwrap();
        assert_eq!(d.evaluate(&[0.75]), 1.5);
        let d2 = density_from_json(r#"{"dim": 2, "origin": [0, 0], "spacing": [1, 1], "values": [[0.25, 0.25], [0.25, 0.25]]}"#).unwrap();
        assert_eq!(d2.dim(), 2);
        let back = density_from_json(&density_to_json(&d2).unwrap()).unwrap();
        assert_eq!(back, d2);
        assert!(density_from_json(r#"{"dim": 2, "origin": 0, "spacing": 1, "values": [1, 1, 1, 1]}"#).is_err());
    }

    #[test]
    fn counterexample_reference() {
        let d = density_from_json(r#"{"counterexample": {"max_bump": 3}}"#).unwrap();
        assert_eq!(d.evaluate(&[2.125]), 0.75);
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(density_from_json(r#"{"pieces": [{"lo": 0, "hi": 1, "kind": "cubic", "params": {}}]}"#).is_err());
        assert!(density_from_json(r#"{"pieces": [{"lo": 0, "hi": 1, "kind": "constant", "params": {"k": -1}}]}"#).is_err());
        assert!(density_from_json(r#"{"pieces": [], "extra": 1}"#).is_err());
        assert!(density_from_json("[1, 2]").is_err());
    }

    #[test]
    fn csv_sampling_uses_full_precision() {
        let d = density_from_json(r#"{"dim": 1, "origin": 0.0, "spacing": 1.0, "values": [1]}"#).unwrap();
        let csv = sample_csv(&d, 0.0, 0.002, 1e-3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "1.0000000000000000e-3,1.0000000000000000e0");
    }
}
