//! Upper semicontinuous densities.
//!
//! A [`UscDensity1D`] is an ordered list of closed-form [`Piece`]s. Pointwise
//! values follow the usc envelope: inside a piece the piece formula, at a
//! breakpoint the larger of the one-sided limits, zero off the support. A
//! [`GridDensity`] is a cell-constant histogram in one or two dimensions with
//! the same boundary-max convention.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass tolerance for densities built from exact pieces.
pub const TOL_MASS: f64 = 1e-9;
/// Mass tolerance for grid densities.
pub const TOL_MASS_GRID: f64 = 1e-6;

/// Functional form of a piece.
///
/// Affine pieces are stored in anchored form `a + b·(t − anchor)` so that
/// steep pieces far from the origin keep their precision; `anchor = 0`
/// recovers the plain `a + b·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum PieceKind {
    Constant {
        k: f64,
    },
    Affine {
        a: f64,
        b: f64,
        #[serde(default)]
        anchor: f64,
    },
    /// `a + b·√(s·(t − t0))` with orientation `s ∈ {+1, −1}`.
    Sqrt { a: f64, b: f64, s: f64, t0: f64 },
}

impl PieceKind {
    fn raw_value(&self, t: f64) -> f64 {
        match *self {
            PieceKind::Constant { k } => k,
            PieceKind::Affine { a, b, anchor } => a + b * (t - anchor),
            PieceKind::Sqrt { a, b, s, t0 } => a + b * (s * (t - t0)).max(0.0).sqrt(),
        }
    }

    /// True when the piece does not vary with `t`.
    pub fn is_flat(&self) -> bool {
        match *self {
            PieceKind::Constant { .. } => true,
            PieceKind::Affine { b, .. } | PieceKind::Sqrt { b, .. } => b == 0.0,
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        match *self {
            PieceKind::Constant { k } => PieceKind::Constant { k: k * factor },
            PieceKind::Affine { a, b, anchor } => PieceKind::Affine {
                a: a * factor,
                b: b * factor,
                anchor,
            },
            PieceKind::Sqrt { a, b, s, t0 } => PieceKind::Sqrt {
                a: a * factor,
                b: b * factor,
                s,
                t0,
            },
        }
    }
}

/// A closed-form density segment on the half-open interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiece")]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    #[serde(flatten)]
    pub kind: PieceKind,
}

#[derive(Deserialize)]
struct RawPiece {
    lo: f64,
    hi: f64,
    #[serde(flatten)]
    kind: PieceKind,
}

impl TryFrom<RawPiece> for Piece {
    type Error = Error;

    fn try_from(raw: RawPiece) -> Result<Self> {
        Piece::new(raw.lo, raw.hi, raw.kind)
    }
}

impl Piece {
    pub fn new(lo: f64, hi: f64, kind: PieceKind) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid_piece(lo, hi, "need finite lo < hi"));
        }
        let params_finite = match kind {
            PieceKind::Constant { k } => k.is_finite(),
            PieceKind::Affine { a, b, anchor } => a.is_finite() && b.is_finite() && anchor.is_finite(),
            PieceKind::Sqrt { a, b, s, t0 } => {
                if s != 1.0 && s != -1.0 {
                    return Err(Error::invalid_piece(lo, hi, "sqrt orientation s must be +1 or -1"));
                }
                a.is_finite() && b.is_finite() && t0.is_finite()
            }
        };
        if !params_finite {
            return Err(Error::invalid_piece(lo, hi, "non-finite parameter"));
        }
        let ulp = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        if let PieceKind::Sqrt { s, t0, .. } = kind {
            let slack = 4.0 * ulp;
            if s * (lo - t0) < -slack || s * (hi - t0) < -slack {
                return Err(Error::invalid_piece(lo, hi, "sqrt argument negative on the interval"));
            }
        }
        // Monotone kinds attain their minimum at an endpoint. Steep affine
        // pieces whose knots are not representable get a rounding allowance.
        let slope = match kind {
            PieceKind::Affine { b, .. } => b.abs(),
            _ => 0.0,
        };
        let allowance = 1e-12 + 4.0 * slope * ulp;
        let min_end = kind.raw_value(lo).min(kind.raw_value(hi));
        if min_end < -allowance {
            return Err(Error::invalid_piece(
                lo,
                hi,
                format!("negative value {min_end} on the interval"),
            ));
        }
        Ok(Piece { lo, hi, kind })
    }

    pub fn constant(lo: f64, hi: f64, k: f64) -> Result<Self> {
        Piece::new(lo, hi, PieceKind::Constant { k })
    }

    /// Plain `a + b·t`.
    pub fn affine(lo: f64, hi: f64, a: f64, b: f64) -> Result<Self> {
        Piece::new(lo, hi, PieceKind::Affine { a, b, anchor: 0.0 })
    }

    /// `value_at_anchor + slope·(t − anchor)`.
    pub fn affine_anchored(lo: f64, hi: f64, value_at_anchor: f64, slope: f64, anchor: f64) -> Result<Self> {
        Piece::new(
            lo,
            hi,
            PieceKind::Affine {
                a: value_at_anchor,
                b: slope,
                anchor,
            },
        )
    }

    pub fn sqrt(lo: f64, hi: f64, a: f64, b: f64, s: f64, t0: f64) -> Result<Self> {
        Piece::new(lo, hi, PieceKind::Sqrt { a, b, s, t0 })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Piece formula at `t`, clamped at zero against rounding.
    pub fn value(&self, t: f64) -> f64 {
        self.kind.raw_value(t).max(0.0)
    }

    /// Slope of the formula at `t` (one-sided at the sqrt vertex).
    pub fn derivative(&self, t: f64) -> f64 {
        match self.kind {
            PieceKind::Constant { .. } => 0.0,
            PieceKind::Affine { b, .. } => b,
            PieceKind::Sqrt { b, s, t0, .. } => {
                if b == 0.0 {
                    return 0.0;
                }
                let w = s * (t - t0);
                if w <= 0.0 {
                    f64::INFINITY * b.signum() * s
                } else {
                    b * s / (2.0 * w.sqrt())
                }
            }
        }
    }

    /// Antiderivative of the formula (up to a constant).
    pub fn antiderivative(&self, t: f64) -> f64 {
        match self.kind {
            PieceKind::Constant { k } => k * t,
            PieceKind::Affine { a, b, anchor } => {
                let x = t - anchor;
                a * x + 0.5 * b * x * x
            }
            PieceKind::Sqrt { a, b, s, t0 } => {
                let w = (s * (t - t0)).max(0.0);
                a * t + s * (2.0 * b / 3.0) * w * w.sqrt()
            }
        }
    }

    /// Exact integral over `[u, v] ∩ [lo, hi]`.
    pub fn integral(&self, u: f64, v: f64) -> f64 {
        let u = u.max(self.lo);
        let v = v.min(self.hi);
        if v <= u {
            return 0.0;
        }
        match self.kind {
            PieceKind::Constant { k } => k * (v - u),
            // trapezoid is exact for affine and avoids cancellation for steep slopes
            PieceKind::Affine { .. } => 0.5 * (v - u) * (self.kind.raw_value(u) + self.kind.raw_value(v)),
            PieceKind::Sqrt { a, b, s, t0 } => {
                let wu = (s * (u - t0)).max(0.0);
                let wv = (s * (v - t0)).max(0.0);
                a * (v - u) + s * (2.0 * b / 3.0) * (wv * wv.sqrt() - wu * wu.sqrt())
            }
        }
    }

    /// Supremum of `|f'|` over `[u, v] ∩ [lo, hi]`.
    pub fn lipschitz_on(&self, u: f64, v: f64) -> f64 {
        let u = u.max(self.lo);
        let v = v.min(self.hi);
        match self.kind {
            PieceKind::Constant { .. } => 0.0,
            PieceKind::Affine { b, .. } => b.abs(),
            PieceKind::Sqrt { b, s, t0, .. } => {
                if b == 0.0 {
                    return 0.0;
                }
                let wmin = (s * (u - t0)).min(s * (v - t0));
                if wmin <= 0.0 {
                    f64::INFINITY
                } else {
                    b.abs() / (2.0 * wmin.sqrt())
                }
            }
        }
    }

    /// Modulus of continuity: bound on `|f(s) − f(t)|` for `|s − t| ≤ delta`.
    pub fn modulus(&self, delta: f64) -> f64 {
        let delta = delta.min(self.len()).max(0.0);
        match self.kind {
            PieceKind::Constant { .. } => 0.0,
            PieceKind::Affine { b, .. } => b.abs() * delta,
            PieceKind::Sqrt { b, .. } => b.abs() * delta.sqrt(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Piece {
            lo: self.lo,
            hi: self.hi,
            kind: self.kind.scaled(factor),
        }
    }
}

/// Unmaterialized continuation of a density to the right of `from`: values
/// there stay below `sup` but come arbitrarily close to it on an unbounded set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub from: f64,
    pub sup: f64,
}

/// Piecewise closed-form density on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct UscDensity1D {
    pieces: Vec<Piece>,
    breakpoints: Vec<f64>,
    total_mass: f64,
    mass_tol: f64,
    unbounded_at: Vec<f64>,
    tail: Option<Tail>,
}

impl UscDensity1D {
    /// Builds a density whose mass must be within [`TOL_MASS`] of one.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        Self::from_parts(pieces, TOL_MASS, Vec::new(), None)
    }

    /// Rescales the pieces to unit mass.
    pub fn normalized(pieces: Vec<Piece>) -> Result<Self> {
        let mass: f64 = pieces.iter().map(|p| p.integral(p.lo, p.hi)).sum();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidDensity(format!("cannot normalize mass {mass}")));
        }
        let scaled = pieces.iter().map(|p| p.scaled(1.0 / mass)).collect();
        Self::new(scaled)
    }

    pub fn from_parts(
        mut pieces: Vec<Piece>,
        mass_tol: f64,
        mut unbounded_at: Vec<f64>,
        tail: Option<Tail>,
    ) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidDensity("no pieces".into()));
        }
        if !(mass_tol >= 0.0) {
            return Err(Error::InvalidDensity("mass tolerance must be nonnegative".into()));
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in pieces.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(Error::InvalidDensity(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        if unbounded_at.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidDensity("unbounded_at points must be finite".into()));
        }
        unbounded_at.sort_by(f64::total_cmp);
        unbounded_at.dedup();
        if let Some(tail) = tail {
            let last = pieces.last().map(|p| p.hi).unwrap_or(f64::NEG_INFINITY);
            if !(tail.from.is_finite() && tail.sup.is_finite() && tail.sup >= 0.0 && tail.from >= last) {
                return Err(Error::InvalidDensity("tail must start after the last piece".into()));
            }
        }
        let mut breakpoints: Vec<f64> = pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        breakpoints.dedup();
        let total_mass: f64 = pieces.iter().map(|p| p.integral(p.lo, p.hi)).sum();
        if !((total_mass - 1.0).abs() <= mass_tol) {
            return Err(Error::InvalidDensity(format!(
                "total mass {total_mass} not within {mass_tol} of 1"
            )));
        }
        Ok(UscDensity1D {
            pieces,
            breakpoints,
            total_mass,
            mass_tol,
            unbounded_at,
            tail,
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Sorted, deduplicated piece endpoints.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn mass_tol(&self) -> f64 {
        self.mass_tol
    }

    pub fn unbounded_at(&self) -> &[f64] {
        &self.unbounded_at
    }

    pub fn tail(&self) -> Option<Tail> {
        self.tail
    }

    /// Convex hull of the materialized pieces.
    pub fn support(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Index of the first piece whose closed interval could contain `t`.
    fn first_piece_reaching(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.hi < t)
    }

    /// Index of the piece with `lo ≤ t < hi`.
    pub fn piece_index_at(&self, t: f64) -> Option<usize> {
        let i = self.pieces.partition_point(|p| p.hi <= t);
        (i < self.pieces.len() && self.pieces[i].lo <= t).then_some(i)
    }

    /// Usc envelope value at `t`.
    pub fn evaluate(&self, t: f64) -> f64 {
        if self.unbounded_at.binary_search_by(|p| p.total_cmp(&t)).is_ok() {
            return f64::INFINITY;
        }
        let mut best = 0.0f64;
        for p in self.pieces[self.first_piece_reaching(t)..].iter() {
            if p.lo > t {
                break;
            }
            best = best.max(p.value(t));
        }
        best
    }

    /// Limit from the left at `t` (0 off the support).
    pub fn left_limit(&self, t: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.hi < t);
        match self.pieces.get(i) {
            Some(p) if p.lo < t => p.value(t),
            _ => 0.0,
        }
    }

    /// Limit from the right at `t` (0 off the support).
    pub fn right_limit(&self, t: f64) -> f64 {
        match self.piece_index_at(t) {
            Some(i) => self.pieces[i].value(t),
            None => 0.0,
        }
    }

    /// Exact integral over `[lo, hi]`; reversed bounds flip the sign.
    pub fn integrate(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return -self.integrate(hi, lo);
        }
        if hi == lo {
            return 0.0;
        }
        let mut sum = 0.0;
        for p in self.pieces[self.pieces.partition_point(|p| p.hi <= lo)..].iter() {
            if p.lo >= hi {
                break;
            }
            sum += p.integral(lo, hi);
        }
        sum
    }

    /// Supremum over the open interval `(a, b)`.
    pub fn sup_open(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return f64::NEG_INFINITY;
        }
        if self.unbounded_at.iter().any(|&t| a < t && t < b) {
            return f64::INFINITY;
        }
        let mut best: f64 = 0.0;
        for p in self.pieces[self.pieces.partition_point(|p| p.hi <= a)..].iter() {
            if p.lo >= b {
                break;
            }
            let u = p.lo.max(a);
            let v = p.hi.min(b);
            best = best.max(p.value(u)).max(p.value(v));
        }
        best
    }

    /// Segments covering `[lo, hi]`, with `None` marking zero gaps.
    pub fn segments(&self, lo: f64, hi: f64) -> Vec<(f64, f64, Option<&Piece>)> {
        let mut out = Vec::new();
        let mut cursor = lo;
        for p in self.pieces[self.pieces.partition_point(|p| p.hi <= lo)..].iter() {
            if p.lo >= hi {
                break;
            }
            if p.lo > cursor {
                out.push((cursor, p.lo, None));
            }
            let u = p.lo.max(lo);
            let v = p.hi.min(hi);
            out.push((u, v, Some(p)));
            cursor = v;
        }
        if cursor < hi {
            out.push((cursor, hi, None));
        }
        out
    }
}

/// Cell-constant density on a regular grid in one or two dimensions.
///
/// Values are stored with the last axis fastest: cell `(i, j)` is at
/// `i * shape[1] + j`, axis 0 being the first coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl GridDensity {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let g = Self::unchecked(origin, spacing, shape, values)?;
        let mass = g.mass();
        if !((mass - 1.0).abs() <= TOL_MASS_GRID) {
            return Err(Error::InvalidDensity(format!(
                "grid mass {mass} not within {TOL_MASS_GRID} of 1"
            )));
        }
        Ok(g)
    }

    /// Rescales the values to unit Riemann mass.
    pub fn normalized(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let mut g = Self::unchecked(origin, spacing, shape, values)?;
        let mass = g.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidDensity(format!("cannot normalize grid mass {mass}")));
        }
        g.values.iter_mut().for_each(|v| *v /= mass);
        Ok(g)
    }

    fn unchecked(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let dim = shape.len();
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidDensity(format!("grid dim must be 1 or 2, got {dim}")));
        }
        if origin.len() != dim || spacing.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: origin.len().min(spacing.len()),
            });
        }
        if origin.iter().any(|o| !o.is_finite()) || spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidDensity("origin must be finite and spacing positive".into()));
        }
        let cells: usize = shape.iter().product();
        if cells == 0 || values.len() != cells {
            return Err(Error::InvalidDensity(format!(
                "expected {cells} grid values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDensity("grid values must be finite and nonnegative".into()));
        }
        Ok(GridDensity {
            origin,
            spacing,
            shape,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub(crate) fn flat_index(&self, idx: &[usize]) -> usize {
        match idx {
            [i] => *i,
            [i, j] => i * self.shape[1] + j,
            _ => unreachable!("grid dim is 1 or 2"),
        }
    }

    pub fn value_at_cell(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    /// Closed box of a cell.
    pub fn cell_bounds(&self, idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let lo: Vec<f64> = (0..self.dim())
            .map(|a| self.origin[a] + idx[a] as f64 * self.spacing[a])
            .collect();
        let hi: Vec<f64> = (0..self.dim()).map(|a| lo[a] + self.spacing[a]).collect();
        (lo, hi)
    }

    /// Cell indices along `axis` whose closure contains coordinate `x`.
    fn axis_cells(&self, axis: usize, x: f64) -> Vec<usize> {
        let u = (x - self.origin[axis]) / self.spacing[axis];
        let n = self.shape[axis] as i64;
        let k = u.round();
        let mut out = Vec::with_capacity(2);
        if (u - k).abs() <= 1e-12 * k.abs().max(1.0) {
            let k = k as i64;
            for c in [k - 1, k] {
                if (0..n).contains(&c) {
                    out.push(c as usize);
                }
            }
        } else {
            let c = u.floor() as i64;
            if (0..n).contains(&c) {
                out.push(c as usize);
            }
        }
        out
    }

    /// Usc value: maximum over all cells whose closure contains `point`.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim());
        match self.dim() {
            1 => self
                .axis_cells(0, point[0])
                .into_iter()
                .map(|i| self.values[i])
                .fold(0.0, f64::max),
            _ => {
                let xs = self.axis_cells(0, point[0]);
                let ys = self.axis_cells(1, point[1]);
                let mut best = 0.0f64;
                for &i in &xs {
                    for &j in &ys {
                        best = best.max(self.value_at_cell(&[i, j]));
                    }
                }
                best
            }
        }
    }

    /// Piecewise-constant copy of a one-dimensional grid.
    pub fn to_piecewise(&self) -> Result<UscDensity1D> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dim(),
            });
        }
        let h = self.spacing[0];
        let pieces = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, &v)| {
                let lo = self.origin[0] + i as f64 * h;
                Piece::constant(lo, self.origin[0] + (i + 1) as f64 * h, v)
            })
            .collect::<Result<Vec<_>>>()?;
        UscDensity1D::from_parts(pieces, TOL_MASS_GRID, Vec::new(), None)
    }

    /// Exact mass of the closed disc of radius `r` around `center` (2D only).
    pub fn disc_mass(&self, center: &[f64], r: f64) -> f64 {
        debug_assert_eq!(self.dim(), 2);
        let clamp_range = |axis: usize, lo: f64, hi: f64| {
            let n = self.shape[axis] as f64;
            let a = ((lo - self.origin[axis]) / self.spacing[axis]).floor().clamp(0.0, n) as usize;
            let b = ((hi - self.origin[axis]) / self.spacing[axis]).ceil().clamp(0.0, n) as usize;
            a..b
        };
        let mut sum = 0.0;
        for i in clamp_range(0, center[0] - r, center[0] + r) {
            for j in clamp_range(1, center[1] - r, center[1] + r) {
                let v = self.value_at_cell(&[i, j]);
                if v == 0.0 {
                    continue;
                }
                let (lo, hi) = self.cell_bounds(&[i, j]);
                sum += v * crate::geometry::disc_rect_area(center, r, &lo, &hi);
            }
        }
        sum
    }
}

/// Any density the estimators accept.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Piecewise(UscDensity1D),
    Grid(GridDensity),
}

impl Density {
    pub fn dim(&self) -> usize {
        match self {
            Density::Piecewise(_) => 1,
            Density::Grid(g) => g.dim(),
        }
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        match self {
            Density::Piecewise(d) => d.evaluate(point[0]),
            Density::Grid(g) => g.evaluate(point),
        }
    }

    /// One-dimensional densities as piecewise, `None` for 2D grids.
    pub fn as_piecewise(&self) -> Option<Cow<'_, UscDensity1D>> {
        match self {
            Density::Piecewise(d) => Some(Cow::Borrowed(d)),
            Density::Grid(g) if g.dim() == 1 => g.to_piecewise().ok().map(Cow::Owned),
            Density::Grid(_) => None,
        }
    }

    /// Default value tolerance for argmax reporting (density scale).
    pub fn default_tol_value(&self) -> f64 {
        match self {
            Density::Piecewise(_) => 1e-10,
            Density::Grid(_) => 1e-6,
        }
    }
}

impl From<UscDensity1D> for Density {
    fn from(d: UscDensity1D) -> Self {
        Density::Piecewise(d)
    }
}

impl From<GridDensity> for Density {
    fn from(g: GridDensity) -> Self {
        Density::Grid(g)
    }
}

/// Axis-aligned closed search region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    pub fn interval(lo: f64, hi: f64) -> Self {
        SearchBox {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn rect(lo: [f64; 2], hi: [f64; 2]) -> Self {
        SearchBox {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Checks the box is nonempty, finite, and of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.lo.len() != self.hi.len()
            || self.lo.is_empty()
            || self
                .lo
                .iter()
                .zip(&self.hi)
                .any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h))
        {
            return Err(Error::EmptySearchBox {
                lo: self.lo.clone(),
                hi: self.hi.clone(),
            });
        }
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }

    pub fn max_width(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).fold(0.0, f64::max)
    }
}
