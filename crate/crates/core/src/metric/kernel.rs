//! The subrepresentation kernel `K_r(x, y) = d̂(x,y) / |B(x, d(x,y))| · 1_Γ(x,r)(y)`.

use serde::Serialize;

use super::ball::{ball_volume, cross_section, d_hat};
use super::cone::{in_cone, Point};
use super::geodesic::{cone_distance, height_hstar};
use crate::error::Result;
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelForm {
    /// `d̂ / |B(x, d)|` with the analytic ball measure.
    Exact,
    /// `1 / h_{x,y}` with `h_{x,y} = h*(x₁, y₁ − x₁)`.
    Simplified,
}

/// Two-dimensional kernel value.
pub fn kernel_k(g: &Geometry, x: Point, y: Point, r: f64, form: KernelForm) -> Result<f64> {
    if !in_cone(g, x, y, r)? {
        return Ok(0.0);
    }
    let t = y[0] - x[0];
    match form {
        KernelForm::Exact => {
            let d = cone_distance(g, x[0], t, y[1] - x[1])?;
            Ok(d_hat(g, x[0], d)? / ball_volume(g, 2, x[0], d)?)
        }
        KernelForm::Simplified => Ok(1.0 / height_hstar(g, x[0], t)?),
    }
}

/// Kernel size `1/s_t` in dimension `n >= 3` at offset `t = y₁ − x₁`.
pub fn kernel_size(g: &Geometry, n: usize, x1: f64, t: f64) -> Result<f64> {
    Ok(1.0 / cross_section(g, n, x1, t)?)
}
