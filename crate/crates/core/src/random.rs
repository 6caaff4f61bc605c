//! Seeded random test data.
//!
//! All randomness comes from `ChaCha8Rng` seeded with a single `u64`, so a
//! seed reproduces the same field on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::Grid;

/// Name of the generator, echoed in report metadata.
pub const PRNG_NAME: &str = "ChaCha8Rng";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Continuous piecewise-linear function on a rectangle: random nodal values
/// on an `m1 × m2` coarse lattice, each coarse cell split into two triangles
/// along its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    a: [f64; 2],
    b: [f64; 2],
    m1: usize,
    m2: usize,
    nodes: Vec<f64>,
}

impl PiecewiseLinear {
    /// Values uniform in `[-1, 1]` over `[a1, b1] × [a2, b2]`.
    pub fn random<R: Rng>(rng: &mut R, a: [f64; 2], b: [f64; 2], m1: usize, m2: usize) -> Self {
        let (m1, m2) = (m1.max(1), m2.max(1));
        let nodes = (0..(m1 + 1) * (m2 + 1)).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        PiecewiseLinear { a, b, m1, m2, nodes }
    }

    /// Random field covering `grid` with a lattice of 1 to `max_cells` cells per axis.
    pub fn random_on<R: Rng>(rng: &mut R, grid: &Grid, max_cells: usize) -> Self {
        let m1 = rng.gen_range(1..=max_cells.max(1));
        let m2 = rng.gen_range(1..=max_cells.max(1));
        Self::random(rng, [grid.a1, grid.a2], [grid.b1(), grid.b2()], m1, m2)
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        let s = ((x1 - self.a[0]) / (self.b[0] - self.a[0]) * self.m1 as f64).clamp(0.0, self.m1 as f64);
        let t = ((x2 - self.a[1]) / (self.b[1] - self.a[1]) * self.m2 as f64).clamp(0.0, self.m2 as f64);
        let i = (s.floor() as usize).min(self.m1 - 1);
        let j = (t.floor() as usize).min(self.m2 - 1);
        let (u, v) = (s - i as f64, t - j as f64);
        let n = |di: usize, dj: usize| self.nodes[(j + dj) * (self.m1 + 1) + i + di];
        if u >= v {
            n(0, 0) + u * (n(1, 0) - n(0, 0)) + v * (n(1, 1) - n(1, 0))
        } else {
            n(0, 0) + v * (n(0, 1) - n(0, 0)) + u * (n(1, 1) - n(0, 1))
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Same lattice with new nodal values.
    pub fn with_nodes(&self, nodes: &[f64]) -> Self {
        assert_eq!(nodes.len(), self.nodes.len(), "lattice size mismatch");
        PiecewiseLinear { nodes: nodes.to_vec(), ..self.clone() }
    }

    /// Samples of the hat function of every lattice node; `sample` is their
    /// combination with the nodal values as weights.
    pub fn basis(&self, grid: &Grid) -> Vec<Vec<f64>> {
        (0..self.nodes.len())
            .map(|k| {
                let mut e = vec![0.0; self.nodes.len()];
                e[k] = 1.0;
                self.with_nodes(&e).sample(grid)
            })
            .collect()
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                let p = grid.point(k);
                self.eval(p[0], p[1])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let gr = Grid::new(0.1, 0.3, 9, -0.1, 0.1, 9).unwrap();
        let a = PiecewiseLinear::random_on(&mut rng(7), &gr, 4).sample(&gr);
        let b = PiecewiseLinear::random_on(&mut rng(7), &gr, 4).sample(&gr);
        assert_eq!(a, b);
    }

    #[test]
    fn basis_reproduces_sample() {
        let gr = Grid::new(0.0, 1.0, 7, 0.0, 2.0, 9).unwrap();
        let p = PiecewiseLinear::random_on(&mut rng(11), &gr, 3);
        let direct = p.sample(&gr);
        let basis = p.basis(&gr);
        for (k, v) in direct.iter().enumerate() {
            let s: f64 = basis.iter().zip(p.nodes()).map(|(b, c)| b[k] * c).sum();
            assert!((s - v).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolates_lattice_values_and_is_continuous() {
        let p = PiecewiseLinear::random(&mut rng(3), [0.0, 0.0], [1.0, 1.0], 3, 2);
        assert_eq!(p.eval(0.0, 0.0), p.nodes[0]);
        assert!((p.eval(1.0, 1.0) - p.nodes.last().unwrap()).abs() < 1e-15);
        let x = 1.0 / 3.0;
        assert!((p.eval(x - 1e-12, 0.3) - p.eval(x + 1e-12, 0.3)).abs() < 1e-9);
        assert!((p.eval(0.2, 0.25 - 1e-12) - p.eval(0.2, 0.25 + 1e-12)).abs() < 1e-9);
    }
}
