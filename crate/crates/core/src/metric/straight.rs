//! Straight-across integrals of the subrepresentation kernel.

use rayon::prelude::*;
use serde::Serialize;

use super::ball::{ball_volume, cross_section, d_hat, height, threshold};
use super::cone::annulus_is_large;
use super::geodesic::{chord, cone_distance, delta_for_radius, height_hstar, turning_radius};
use super::kernel::KernelForm;
use super::sequence::radius_sequence_until;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::quad::{gauss_legendre, quad};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StraightAcross {
    pub integral: f64,
    pub ratio: f64,
}

/// Offsets below `r · CUTOFF` are dropped; their contribution is `O(CUTOFF)`.
const CUTOFF_LEVELS: usize = 24;
const PANEL_NODES: usize = 12;
const SLICE_NODES: usize = 16;

/// `∫ K dy₂` over the vertical slice of `Γ` at offset `t` from the left point `x1`.
fn slice(g: &Geometry, x1: f64, t: f64, r: f64, form: KernelForm) -> Result<f64> {
    let hs = height_hstar(g, x1, t)?;
    let tr = turning_radius(g, x1, t)?;
    let cap = if tr < r { hs } else { chord(g, x1, t, delta_for_radius(g, x1, t, r)?)?.1 };
    if cap <= 0.0 {
        return Ok(0.0);
    }
    match form {
        KernelForm::Simplified => Ok(2.0 * cap / hs),
        KernelForm::Exact => {
            let theta = threshold(g, x1)?;
            let d_max = tr.min(r);
            let mut pieces = vec![0.0, cap];
            if t < theta && theta < d_max {
                // The volume law switches branch where d = 1/|F'(x1)|.
                let c = chord(g, x1, t, delta_for_radius(g, x1, t, theta)?)?.1;
                if c > 0.0 && c < cap {
                    pieces.insert(1, c);
                }
            }
            let (xs, ws) = gauss_legendre(SLICE_NODES);
            let mut total = 0.0;
            for p in pieces.windows(2) {
                let (a, b) = (p[0], p[1]);
                let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
                for (xi, wi) in xs.iter().zip(&ws) {
                    let dy = m + h * xi;
                    let d = cone_distance(g, x1, t, dy)?;
                    total += wi * h * d_hat(g, x1, d)? / ball_volume(g, 2, x1, d)?;
                }
            }
            Ok(2.0 * total)
        }
    }
}

/// Gauss–Legendre panels on `[r 2^{-m-1}, r 2^{-m}]`.
fn panel_nodes(r: f64) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(PANEL_NODES);
    let mut out = Vec::with_capacity(CUTOFF_LEVELS * PANEL_NODES);
    for m in 0..CUTOFF_LEVELS {
        let b = r * 0.5f64.powi(m as i32);
        let a = 0.5 * b;
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in xs.iter().zip(&ws) {
            out.push((c + h * xi, wi * h));
        }
    }
    out
}

/// `∫_{Γ(x,r)} K_r(x, y) dy` in two dimensions, evaluated numerically over
/// the cone with the kernel computed from exact control distances.
pub fn forward_cone_integral(g: &Geometry, x1: f64, r: f64, form: KernelForm) -> Result<StraightAcross> {
    if !(x1 > 0.0 && x1 + r < g.r_end()) {
        return Err(Error::Domain(format!("cone at x1 = {x1}, r = {r} leaves (0, {})", g.r_end())));
    }
    let parts: Result<Vec<f64>> =
        panel_nodes(r).par_iter().map(|&(t, w)| Ok(w * slice(g, x1, t, r, form)?)).collect();
    let integral: f64 = parts?.iter().sum();
    Ok(StraightAcross { integral, ratio: integral / r })
}

/// `∫_{Γ*(y,r)} K_r(x, y) dx` in two dimensions.
pub fn dual_cone_integral(g: &Geometry, y1: f64, r: f64, form: KernelForm) -> Result<StraightAcross> {
    if !(y1 - r > 0.0 && y1 < g.r_end()) {
        return Err(Error::Domain(format!("dual cone at y1 = {y1}, r = {r} leaves (0, {})", g.r_end())));
    }
    let parts: Result<Vec<f64>> =
        panel_nodes(r).par_iter().map(|&(t, w)| Ok(w * slice(g, y1 - t, t, r, form)?)).collect();
    let integral: f64 = parts?.iter().sum();
    Ok(StraightAcross { integral, ratio: integral / r })
}

/// `Σ_k ∫_{r_{k+1}}^{r_k} |Ẽ_k cross-section| / s_t dt` in dimension `n >= 3`,
/// where `Ẽ_k` has lateral extent `√(r_k² − r_{k+1}²)` in the `n − 2`
/// Euclidean directions and the half-height of `E(x, r_k)` in the
/// degenerate one.
pub fn straight_across_n(g: &Geometry, n: usize, x1: f64, r0: f64) -> Result<StraightAcross> {
    if n < 3 {
        return Err(Error::Domain(format!("analytic straight-across needs n >= 3, got {n}")));
    }
    let seq = radius_sequence_until(g, x1, r0, r0 * 1e-12, 100_000)?;
    let split = 2.0 * threshold(g, x1)?;
    let nf = n as f64;
    let mut total = 0.0;
    for w in seq.windows(2) {
        let (rk, rk1) = (w[0], w[1]);
        let lateral = (rk * rk - rk1 * rk1).sqrt().powf(nf - 2.0);
        let fixed = if annulus_is_large(g, x1, rk)? { None } else { Some(height(g, x1, rk)?) };
        let mut err = None;
        let mut piece = |a: f64, b: f64| -> f64 {
            let v = quad(
                |t| {
                    let h = match fixed {
                        Some(h) => Ok(h),
                        None => height_hstar(g, x1, t),
                    };
                    let v = h.and_then(|h| Ok(2.0 * h / cross_section(g, n, x1, t)?));
                    v.unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    })
                },
                a,
                b,
                1e-8,
            );
            v.unwrap_or_else(|e| {
                err.get_or_insert(e);
                0.0
            })
        };
        let inner = if rk1 < split && split < rk { piece(rk1, split) + piece(split, rk) } else { piece(rk1, rk) };
        if let Some(e) = err {
            return Err(e);
        }
        total += lateral * inner;
    }
    Ok(StraightAcross { integral: total, ratio: total / r0 })
}
