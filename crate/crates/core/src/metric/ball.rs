//! Analytic descriptors of control balls: regime, height, dual radius,
//! volume and cross-section.

use serde::Serialize;

use super::geodesic::{height_hstar, solve_turning};
use crate::error::{Error, Result};
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Small,
    Large,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Small => "small",
            Regime::Large => "large",
        }
    }
}

/// Regime of `B(x, r)`: small iff `r·|F'(x1)| <= 1`.
pub fn regime(g: &Geometry, x1: f64, r: f64) -> Result<Regime> {
    let d = g.d1(x1)?.abs();
    Ok(if r * d <= 1.0 { Regime::Small } else { Regime::Large })
}

/// `1/|F'(x1)|`, the radius where the two regimes meet.
pub fn threshold(g: &Geometry, x1: f64) -> Result<f64> {
    Ok(1.0 / g.d1(x1)?.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallModel {
    pub x1: f64,
    pub r: f64,
    pub n: usize,
    pub regime: Regime,
}

impl BallModel {
    pub fn new(g: &Geometry, n: usize, x1: f64, r: f64) -> Result<Self> {
        check_ball(g, n, x1, r)?;
        Ok(BallModel { x1, r, n, regime: regime(g, x1, r)? })
    }
}

fn check_ball(g: &Geometry, n: usize, x1: f64, r: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension {n} must be at least 2")));
    }
    if !(x1 > 0.0 && r > 0.0 && x1 + r < g.r_end()) {
        return Err(Error::Domain(format!("ball x1 = {x1}, r = {r} not inside (0, {})", g.r_end())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightProfile {
    /// Ball height `h = h*(x1, r*)`.
    pub h: f64,
    pub r_star: f64,
    pub lambda: f64,
    pub regime: Regime,
    /// Regime asymptotic: `r f(x1)` (small) or `f(x1+r)/|F'(x1+r)|` (large).
    pub surrogate: f64,
}

pub fn rstar_and_height(g: &Geometry, x1: f64, r: f64) -> Result<HeightProfile> {
    check_ball(g, 2, x1, r)?;
    let tr = solve_turning(g, x1, r)?;
    let h = height_hstar(g, x1, tr.r_star)?;
    let reg = regime(g, x1, r)?;
    let surrogate = match reg {
        Regime::Small => r * g.f(x1)?,
        Regime::Large => {
            let e = g.eval(x1 + r)?;
            e.f / e.d1.abs()
        }
    };
    Ok(HeightProfile { h, r_star: tr.r_star, lambda: tr.lambda, regime: reg, surrogate })
}

/// Ball height `h(x1, r)`.
pub fn height(g: &Geometry, x1: f64, r: f64) -> Result<f64> {
    Ok(rstar_and_height(g, x1, r)?.h)
}

/// Dual radius `r*(x1, r)`.
pub fn r_star(g: &Geometry, x1: f64, r: f64) -> Result<f64> {
    Ok(solve_turning(g, x1, r)?.r_star)
}

/// Regime threshold used by the volume law in dimension `n`.
fn volume_threshold(g: &Geometry, n: usize, x1: f64) -> Result<f64> {
    let c = if n == 2 { 1.0 } else { 2.0 };
    Ok(c * threshold(g, x1)?)
}

/// Measure of `B(x, r)` up to comparability constants.
pub fn ball_volume(g: &Geometry, n: usize, x1: f64, r: f64) -> Result<f64> {
    check_ball(g, n, x1, r)?;
    let nf = n as f64;
    if r <= volume_threshold(g, n, x1)? {
        return Ok(r.powi(n as i32) * g.f(x1)?);
    }
    let e = g.eval(x1 + r)?;
    let d = e.d1.abs();
    if n == 2 {
        Ok(e.f / (d * d))
    } else {
        Ok(e.f / d.powf(nf) * (r * d).powf(0.5 * nf - 1.0))
    }
}

/// Both branches of the two-dimensional volume law at the same radius.
pub fn volume_branches(g: &Geometry, x1: f64, r: f64) -> Result<(f64, f64)> {
    check_ball(g, 2, x1, r)?;
    let small = r * r * g.f(x1)?;
    let e = g.eval(x1 + r)?;
    Ok((small, e.f / (e.d1 * e.d1)))
}

/// `d̂ = min{d, 1/|F'(x1 + d)|}`.
pub fn d_hat(g: &Geometry, x1: f64, d: f64) -> Result<f64> {
    Ok(d.min(1.0 / g.d1(x1 + d)?.abs()))
}

/// Cross-section `s_r` in dimension `n >= 3`: `r^{n-1} f(x1)` below
/// `2/|F'(x1)|` and `f(x1+r) λ^{n-2} / |F'(x1+r)|^{n-1}` above it, with
/// `λ = √(r |F'(x1+r)|)`.
pub fn cross_section(g: &Geometry, n: usize, x1: f64, r: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("cross-section needs n >= 3, got {n}")));
    }
    check_ball(g, n, x1, r)?;
    let nf = n as f64;
    if r < volume_threshold(g, n, x1)? {
        return Ok(r.powi(n as i32 - 1) * g.f(x1)?);
    }
    let e = g.eval(x1 + r)?;
    let d = e.d1.abs();
    let lam = (r * d).sqrt();
    Ok(e.f * lam.powf(nf - 2.0) / d.powf(nf - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_regime_formula_is_exact() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let (x1, r) = (0.3, 1e-3);
        assert_eq!(ball_volume(&g, 2, x1, r).unwrap(), r * r * g.f(x1).unwrap());
        assert_eq!(cross_section(&g, 3, x1, r).unwrap(), r * r * g.f(x1).unwrap());
    }

    #[test]
    fn regime_tie_is_small() {
        let g = Geometry::inverse_power(1.0).unwrap();
        let x1 = 0.5;
        let r = threshold(&g, x1).unwrap();
        assert_eq!(regime(&g, x1, r).unwrap(), Regime::Small);
    }
}
