//! Annuli `E(x, r_k)`, the cone `Γ(x, r)` and its dual `Γ*(y, r)`.
//!
//! The cone is the set `{y ∈ B(x, r) : 0 < y₁ − x₁ <= r, |y₂ − x₂| < h*(x₁, y₁ − x₁)}`.
//! Distances inside it are computed along the non-turning geodesic issued
//! from the left point, so both predicates evaluate identical quantities.

use super::ball::{height, threshold};
use super::geodesic::{cone_distance, height_hstar};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::quad::quad;

pub type Point = [f64; 2];

/// Left point `a`, right point `b`: `b ∈ Γ(a, r)`.
fn cone_test(g: &Geometry, a: Point, b: Point, r: f64) -> Result<bool> {
    if !(a[0] > 0.0) {
        return Err(Error::Domain(format!("cone apex x1 = {} must be positive", a[0])));
    }
    let t = b[0] - a[0];
    if !(t > 0.0 && t <= r) || a[0] + t >= g.r_end() {
        return Ok(false);
    }
    let dy = (b[1] - a[1]).abs();
    if dy >= height_hstar(g, a[0], t)? {
        return Ok(false);
    }
    Ok(cone_distance(g, a[0], t, dy)? < r)
}

/// `y ∈ Γ(x, r)`.
pub fn in_cone(g: &Geometry, x: Point, y: Point, r: f64) -> Result<bool> {
    cone_test(g, x, y, r)
}

/// `x ∈ Γ*(y, r)`, i.e. `x ∈ B(y, r)`, `y₁ − r <= x₁ < y₁` and
/// `|x₂ − y₂| < h_{x,y}`.
pub fn in_dual_cone(g: &Geometry, y: Point, x: Point, r: f64) -> Result<bool> {
    if !(x[0] >= y[0] - r && x[0] < y[0]) {
        return Ok(false);
    }
    cone_test(g, x, y, r)
}

/// Whether `E(x, r_k)` is built in the large regime.
pub fn annulus_is_large(g: &Geometry, x1: f64, rk: f64) -> Result<bool> {
    Ok(rk >= threshold(g, x1)?)
}

/// Half-height of `E(x, r_k)` at horizontal offset `t ∈ [r_{k+1}, r_k)`.
pub fn annulus_half_height(g: &Geometry, x1: f64, rk: f64, t: f64) -> Result<f64> {
    if annulus_is_large(g, x1, rk)? {
        height_hstar(g, x1, t)
    } else {
        height(g, x1, rk)
    }
}

/// `y ∈ E(x, r_k)` for consecutive radii `rk > rk1`.
pub fn in_annulus(g: &Geometry, x: Point, y: Point, rk: f64, rk1: f64) -> Result<bool> {
    let t = y[0] - x[0];
    if !(t >= rk1 && t < rk) {
        return Ok(false);
    }
    Ok((y[1] - x[1]).abs() < annulus_half_height(g, x[0], rk, t)?)
}

/// `|E(x, r_k)|`.
pub fn annulus_area(g: &Geometry, x1: f64, rk: f64, rk1: f64) -> Result<f64> {
    if !(rk > rk1 && rk1 >= 0.0) {
        return Err(Error::Domain(format!("annulus radii {rk} > {rk1} >= 0 required")));
    }
    if !annulus_is_large(g, x1, rk)? {
        return Ok(2.0 * height(g, x1, rk)? * (rk - rk1));
    }
    let mut err = None;
    let v = quad(
        |t| match height_hstar(g, x1, t) {
            Ok(h) => 2.0 * h,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        rk1,
        rk,
        1e-9,
    );
    match err {
        Some(e) => Err(e),
        None => v,
    }
}
