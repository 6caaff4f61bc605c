//! Dyadic-type radius sequences `r_{k+1} = r*(x1, r_k)` in the large regime
//! and `r_k / 2` in the small one.

use super::ball::threshold;
use super::geodesic::solve_turning;
use crate::error::{Error, Result};
use crate::geometry::Geometry;

/// Returns `r_0, …, r_{k_max}`.
pub fn radius_sequence(g: &Geometry, x1: f64, r0: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(r0 > 0.0) {
        return Err(Error::Domain(format!("r0 = {r0} must be positive")));
    }
    let theta = threshold(g, x1)?;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(r0);
    let mut r = r0;
    for _ in 0..k_max {
        r = if r >= theta { solve_turning(g, x1, r)?.r_star } else { 0.5 * r };
        out.push(r);
    }
    Ok(out)
}

/// Radii from `r0` down to the first one below `r_min`, with at most
/// `max_len` entries.
pub fn radius_sequence_until(g: &Geometry, x1: f64, r0: f64, r_min: f64, max_len: usize) -> Result<Vec<f64>> {
    if !(r0 > 0.0 && r_min > 0.0) {
        return Err(Error::Domain(format!("radii r0 = {r0}, r_min = {r_min} must be positive")));
    }
    let theta = threshold(g, x1)?;
    let mut out = vec![r0];
    let mut r = r0;
    while r >= r_min {
        if out.len() >= max_len {
            return Err(Error::NoConvergence { iterations: max_len, residual: r });
        }
        r = if r >= theta { solve_turning(g, x1, r)?.r_star } else { 0.5 * r };
        out.push(r);
    }
    Ok(out)
}

/// First index whose radius is in the halving branch.
pub fn first_halving_index(g: &Geometry, seq: &[f64], x1: f64) -> Result<Option<usize>> {
    let theta = threshold(g, x1)?;
    Ok(seq.iter().position(|&r| r < theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_start_halves() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let x1 = 0.3;
        let r0 = 0.5 * threshold(&g, x1).unwrap();
        let seq = radius_sequence(&g, x1, r0, 8).unwrap();
        for (k, r) in seq.iter().enumerate() {
            assert_eq!(*r, r0 / 2f64.powi(k as i32));
        }
    }

    #[test]
    fn large_start_uses_dual_radius() {
        let g = Geometry::inverse_power(1.0).unwrap();
        let x1 = 0.05;
        let seq = radius_sequence_until(&g, x1, 0.3, 1e-6, 10_000).unwrap();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
        let k = first_halving_index(&g, &seq, x1).unwrap().unwrap();
        assert!(seq[k - 1] >= threshold(&g, x1).unwrap());
        assert!(k >= 1);
        for w in seq[k..].windows(2) {
            assert_eq!(w[1], 0.5 * w[0]);
        }
    }
}
