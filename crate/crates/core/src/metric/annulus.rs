//! Grid measurements of the annuli `E(x, r_k)` against the balls `B(x, r_k)`.

use serde::Serialize;

use super::cone::{annulus_area, annulus_half_height};
use super::oracle::GridOracle;
use super::sequence::radius_sequence;
use crate::error::Result;
use crate::geometry::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusMeasure {
    pub k: usize,
    pub r_k: f64,
    pub r_next: f64,
    /// `|E(x, r_k)|` by quadrature of its defining half-height.
    pub e_area: f64,
    /// `|E(x, r_k) ∩ B(x, r_k)|` on the grid.
    pub e_cap_b_area: f64,
    /// `|B(x, r_k)|` on the grid.
    pub b_area: f64,
    pub ratio: f64,
}

/// Measures `E(x, r_k)`, `E ∩ B` and `B` for `k = 0..=k_max` at `x = (x1, 0)`,
/// each on an oracle grid with about `cells` nodes across the ball.
pub fn annulus_measures(g: &Geometry, x1: f64, r0: f64, k_max: usize, cells: usize) -> Result<Vec<AnnulusMeasure>> {
    let seq = radius_sequence(g, x1, r0, k_max + 1)?;
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let (rk, rk1) = (seq[k], seq[k + 1]);
        let oracle = GridOracle::for_ball(g, x1, rk, cells)?;
        let b_area = oracle.ball_area([x1, 0.0], rk)?;
        let gr = *oracle.grid();
        let ball = oracle.ball_mask([x1, 0.0], rk)?;
        let mut half = vec![None; gr.n1];
        for (i, h) in half.iter_mut().enumerate() {
            let t = gr.x1(i) - x1;
            if t >= rk1 && t < rk {
                *h = Some(annulus_half_height(g, x1, rk, t)?);
            }
        }
        let cap: Vec<bool> = (0..gr.len())
            .map(|idx| {
                let (i, j) = gr.ij(idx);
                ball[idx] && half[i].is_some_and(|h| gr.x2(j).abs() < h)
            })
            .collect();
        let e_area = annulus_area(g, x1, rk, rk1)?;
        out.push(AnnulusMeasure {
            k,
            r_k: rk,
            r_next: rk1,
            e_area,
            e_cap_b_area: gr.cell_measure(&cap),
            b_area,
            ratio: e_area / b_area,
        });
    }
    Ok(out)
}
