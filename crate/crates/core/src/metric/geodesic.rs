//! Geodesics of the metric `ds² = dx₁² + f(x₁)⁻² dx₂²` that move rightward
//! from `x₁` and either turn vertical at `x_end` (`λ = f(x_end)`) or cross it
//! with `λ > f(x_end)`.
//!
//! Each integrand is written in terms of the log gap
//! `g(u) = F(u) + ln λ ≥ 0`, so `f(u)/λ = e^{-g}`, and integrated after the
//! substitution `u = x_end − v²`, which removes the inverse square-root
//! singularity at the turning point.

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::quad::{integrate, QuadOptions};
use crate::roots::brent;

const REL_TOL: f64 = 1e-11;

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 0.0, rel_tol: REL_TOL, max_intervals: 4000 }
}

/// `F(x_e − d) − F(x_e)` without cancellation for small `d`.
fn gap_to_end(g: &Geometry, x_e: f64, fe: f64, dfe: f64, d: f64) -> Result<f64> {
    let u = x_e - d;
    if u <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if d > 1e-3 * x_e {
        return Ok(g.big_f(u)? - fe);
    }
    // Simpson's rule on ∫ F' over [u, x_e].
    let mid = g.d1(x_e - 0.5 * d)?;
    let du = g.d1(u)?;
    Ok(-d * (du + 4.0 * mid + dfe) / 6.0)
}

/// A geodesic from `x1` to `x_end = x1 + t` with log excess
/// `delta = ln(λ / f(x_end)) ≥ 0`; `delta = 0` is the turning geodesic.
#[derive(Debug, Clone, Copy)]
struct Chord {
    x_end: f64,
    t: f64,
    fe: f64,
    dfe: f64,
    delta: f64,
}

impl Chord {
    fn new(g: &Geometry, x1: f64, t: f64, delta: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("horizontal offset t = {t} must be positive")));
        }
        if !(delta >= 0.0) {
            return Err(Error::Domain(format!("log excess {delta} must be nonnegative")));
        }
        let x_end = x1 + t;
        let e = g.eval(x_end)?;
        Ok(Chord { x_end, t, fe: e.big_f, dfe: e.d1, delta })
    }

    /// Log gap at `u = x_end − v²`.
    fn gap(&self, g: &Geometry, v: f64) -> Result<f64> {
        Ok(gap_to_end(g, self.x_end, self.fe, self.dfe, v * v)? + self.delta)
    }

    /// Endpoint limit of `2v / √(1 − e^{−2g})` as `v → 0` on a turning arc.
    fn radius_limit(&self) -> f64 {
        (2.0 / self.dfe.abs()).sqrt()
    }

    fn integrate<I: Fn(f64, f64) -> f64>(&self, g: &Geometry, integrand: I) -> Result<f64> {
        let mut err = None;
        let vmax = self.t.sqrt();
        let res = integrate(
            |v| {
                if err.is_some() {
                    return 0.0;
                }
                match self.gap(g, v) {
                    Ok(gp) => integrand(v, gp),
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            0.0,
            vmax,
            quad_opts(),
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(res?.value)
    }

    /// `∫ λ / √(λ² − f²) du`.
    fn radius(&self, g: &Geometry) -> Result<f64> {
        let lim = self.radius_limit();
        let delta = self.delta;
        self.integrate(g, |v, gp| {
            let s = -(-2.0 * gp).exp_m1();
            if s > 0.0 {
                2.0 * v / s.sqrt()
            } else if delta == 0.0 {
                lim
            } else {
                f64::INFINITY
            }
        })
    }

    /// `∫ f² / √(λ² − f²) du`.
    fn height(&self, g: &Geometry) -> Result<f64> {
        let lambda = (-self.fe).exp() * self.delta.exp();
        let lim = lambda * self.radius_limit();
        let delta = self.delta;
        self.integrate(g, |v, gp| {
            let s = -(-2.0 * gp).exp_m1();
            if s > 0.0 {
                2.0 * v * lambda * (-2.0 * gp).exp() / s.sqrt()
            } else if delta == 0.0 {
                lim
            } else {
                f64::INFINITY
            }
        })
    }
}

/// Length `∫_{x1}^{x_end} λ/√(λ² − f(u)²) du` of the geodesic with parameter `λ`.
pub fn geodesic_radius(g: &Geometry, x1: f64, x_end: f64, lambda: f64) -> Result<f64> {
    if x_end == x1 {
        return Ok(0.0);
    }
    if !(x_end > x1 && x1 >= 0.0) {
        return Err(Error::Domain(format!("need 0 <= x1 < x_end, got x1 = {x1}, x_end = {x_end}")));
    }
    if lambda.is_infinite() {
        return Ok(x_end - x1);
    }
    let delta = lambda.ln() + g.big_f(x_end)?;
    if !(delta > 0.0) {
        return Err(Error::Singularity(format!(
            "lambda = {lambda:e} does not exceed f(x_end) = {:e}",
            g.f(x_end)?
        )));
    }
    Chord::new(g, x1, x_end - x1, delta)?.radius(g)
}

/// Length of the geodesic that turns vertical at `x1 + t`.
pub fn turning_radius(g: &Geometry, x1: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    Chord::new(g, x1, t, 0.0)?.radius(g)
}

/// `h*(x1, t) = ∫_{x1}^{x1+t} f(u)² / √(f(x1+t)² − f(u)²) du`, the height
/// gained by the geodesic turning at `x1 + t`.
pub fn height_hstar(g: &Geometry, x1: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if !(x1 + t < g.r_end()) {
        return Err(Error::Domain(format!("x1 + t = {} reaches R = {}", x1 + t, g.r_end())));
    }
    Chord::new(g, x1, t, 0.0)?.height(g)
}

/// Length and height of the geodesic from `x1` to `x1 + t` with
/// `λ = f(x1 + t)·e^{delta}`.
pub fn chord(g: &Geometry, x1: f64, t: f64, delta: f64) -> Result<(f64, f64)> {
    let ch = Chord::new(g, x1, t, delta)?;
    Ok((ch.radius(g)?, ch.height(g)?))
}

/// Turning geodesic of a given length `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Turning {
    pub lambda: f64,
    /// Horizontal offset of the turning point (the dual radius `r*`).
    pub r_star: f64,
}

/// Finds the turning offset `r*` with `turning_radius(x1, r*) = r`, and the
/// corresponding `λ = f(x1 + r*)`.
pub fn solve_turning(g: &Geometry, x1: f64, r: f64) -> Result<Turning> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    if !(x1 + r < g.r_end()) {
        return Err(Error::Domain(format!("x1 + r = {} reaches R = {}", x1 + r, g.r_end())));
    }
    let big_f_lo = if x1 > 0.0 { g.big_f(x1)? } else { f64::INFINITY };
    if !(g.big_f(x1 + r)? < big_f_lo) {
        return Err(Error::Bracket(format!(
            "f is not increasing on [{x1}, {}]; no geodesic turns",
            x1 + r
        )));
    }
    // turning_radius(t) >= t, so t = r is an upper bracket.
    let mut lo = 0.5 * r;
    let mut found = false;
    for _ in 0..200 {
        if turning_radius(g, x1, lo)? < r {
            found = true;
            break;
        }
        lo *= 0.25;
        if lo < f64::MIN_POSITIVE {
            break;
        }
    }
    if !found {
        return Err(Error::Bracket(format!("no turning offset below r = {r} at x1 = {x1}")));
    }
    let t = brent(|t| Ok(turning_radius(g, x1, t)? - r), lo, r, 0.0, 1e-12)?;
    Ok(Turning { lambda: g.f(x1 + t)?, r_star: t })
}

/// `λ` of the turning geodesic of length `r`.
pub fn solve_lambda(g: &Geometry, x1: f64, r: f64) -> Result<f64> {
    Ok(solve_turning(g, x1, r)?.lambda)
}

/// Control distance from `(x1, 0)` to `(x1 + t, dy)` for
/// `|dy| <= h*(x1, t)`, realised by a geodesic that does not turn.
pub fn cone_distance(g: &Geometry, x1: f64, t: f64, dy: f64) -> Result<f64> {
    let dy = dy.abs();
    if t == 0.0 && dy == 0.0 {
        return Ok(0.0);
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("cone distance needs t > 0, got {t}")));
    }
    if dy == 0.0 {
        return Ok(t);
    }
    let hstar = height_hstar(g, x1, t)?;
    if dy > hstar {
        return Err(Error::Domain(format!("height {dy:e} exceeds h*(x1, t) = {hstar:e}")));
    }
    if dy == hstar {
        return turning_radius(g, x1, t);
    }
    let delta = delta_for_height(g, x1, t, dy)?;
    Chord::new(g, x1, t, delta)?.radius(g)
}

/// Log excess of the non-turning geodesic of height `dy` over `[x1, x1+t]`.
pub fn delta_for_height(g: &Geometry, x1: f64, t: f64, dy: f64) -> Result<f64> {
    let height = |d: f64| -> Result<f64> { Chord::new(g, x1, t, d)?.height(g) };
    let mut hi = 1.0;
    while height(hi)? > dy {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Bracket(format!("height {dy:e} too small to resolve")));
        }
    }
    brent(|d| Ok(height(d)? - dy), 0.0, hi, 1e-14, 1e-12)
}

/// Log excess of the non-turning geodesic of length `len` over
/// `[x1, x1+t]`; requires `t < len < turning_radius(x1, t)`.
pub fn delta_for_radius(g: &Geometry, x1: f64, t: f64, len: f64) -> Result<f64> {
    let radius = |d: f64| -> Result<f64> { Chord::new(g, x1, t, d)?.radius(g) };
    let mut hi = 1.0;
    while radius(hi)? > len {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Bracket(format!("length {len:e} too close to t = {t:e}")));
        }
    }
    brent(|d| Ok(radius(d)? - len), 0.0, hi, 1e-14, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn linear() -> Geometry {
        Geometry::finite_type(1.0).unwrap()
    }

    #[test]
    fn arcsin_closed_form() {
        let v = geodesic_radius(&linear(), 0.1, 0.2, 0.3).unwrap();
        let exact = 0.3 * ((2.0f64 / 3.0).asin() - (1.0f64 / 3.0).asin());
        assert!((v / exact - 1.0).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn hstar_linear_profile() {
        for t in [0.05, 0.1, 0.2] {
            let h = height_hstar(&linear(), 0.0, t).unwrap();
            assert!((h / (PI * t * t / 4.0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn turning_at_origin() {
        let a = 0.1;
        let tr = solve_turning(&linear(), 0.0, a * PI / 2.0).unwrap();
        assert!((tr.lambda - a).abs() < 1e-10);
        assert!((tr.r_star - a).abs() < 1e-10);
    }

    #[test]
    fn constant_profile_has_no_turning() {
        let g = Geometry::constant(0.0).unwrap();
        assert!(matches!(solve_lambda(&g, 0.2, 0.1), Err(Error::Bracket(_))));
    }

    #[test]
    fn chord_interpolates_between_straight_and_turning() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let (x1, t) = (0.2, 0.05);
        let hs = height_hstar(&g, x1, t).unwrap();
        let tr = turning_radius(&g, x1, t).unwrap();
        let d = cone_distance(&g, x1, t, 0.5 * hs).unwrap();
        assert!(d > t && d < tr);
        let delta = delta_for_height(&g, x1, t, 0.5 * hs).unwrap();
        let (_, h) = chord(&g, x1, t, delta).unwrap();
        assert!((h / (0.5 * hs) - 1.0).abs() < 1e-9);
    }
}
