//! Exact area of a disc intersected with an axis-aligned rectangle.

/// `∫ √(r² − x²) dx`.
fn half_chord_primitive(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    let s = (r * r - x * x).max(0.0).sqrt();
    0.5 * (x * s + r * r * (x / r).clamp(-1.0, 1.0).asin())
}

/// Area of `{X² + Y² ≤ r², X ≤ x, Y ≤ y}`.
fn lower_left_area(x: f64, y: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    if x <= -r || y <= -r {
        return 0.0;
    }
    let chord = |a: f64, b: f64| {
        if b <= a {
            0.0
        } else {
            half_chord_primitive(b, r) - half_chord_primitive(a, r)
        }
    };
    // integrand 2s outside [-q, q] (when y ≥ 0), y + s inside
    let full = |a: f64, b: f64| 2.0 * chord(a, b);
    let partial = |a: f64, b: f64| if b <= a { 0.0 } else { y * (b - a) + chord(a, b) };
    if y >= r {
        return full(-r, x);
    }
    let q = (r * r - y * y).max(0.0).sqrt();
    if y >= 0.0 {
        full(-r, x.min(-q)) + partial(-q, x.min(q)) + full(q, x)
    } else {
        partial(-q, x.min(q))
    }
}

/// Area of the disc of radius `r` around `center` inside the box `[lo, hi]`.
pub fn disc_rect_area(center: &[f64], r: f64, lo: &[f64], hi: &[f64]) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let (x0, x1) = (lo[0] - center[0], hi[0] - center[0]);
    let (y0, y1) = (lo[1] - center[1], hi[1] - center[1]);
    if x1 <= -r || x0 >= r || y1 <= -r || y0 >= r {
        return 0.0;
    }
    let a = lower_left_area(x1, y1, r) - lower_left_area(x0, y1, r) - lower_left_area(x1, y0, r)
        + lower_left_area(x0, y0, r);
    a.max(0.0)
}
