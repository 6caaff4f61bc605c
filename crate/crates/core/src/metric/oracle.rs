//! Shortest paths on a weighted grid graph as a numeric stand-in for the
//! control distance in two dimensions.
//!
//! Edges join each node to its 16 neighbours (king and knight moves). A move
//! `(Δ₁, Δ₂)` costs the trapezoidal average of `√(Δ₁² + Δ₂²/f(x₁)²)` at its
//! two end columns.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::ball::height;
use crate::error::{Error, Result};
use crate::geometry::{Family, Geometry};
use crate::grid::Grid;

const MOVES: [(i64, i64); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
];

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.dist.total_cmp(&self.dist).then_with(|| o.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// `f` with its limit at `x₁ = 0`.
fn f_at(g: &Geometry, x: f64) -> Result<f64> {
    if x > 0.0 {
        return g.f(x);
    }
    match g.family() {
        Family::Constant { value } => Ok((-value).exp()),
        _ => Ok(0.0),
    }
}

#[derive(Debug, Clone)]
pub struct GridOracle {
    grid: Grid,
    inv_f: Vec<f64>,
}

impl GridOracle {
    /// Oracle on an explicit grid with `a1 >= 0`.
    pub fn new(g: &Geometry, grid: Grid) -> Result<Self> {
        if grid.a1 < 0.0 || grid.b1() >= g.r_end() {
            return Err(Error::Domain(format!(
                "oracle columns [{}, {}] must lie in [0, {})",
                grid.a1,
                grid.b1(),
                g.r_end()
            )));
        }
        let inv_f = (0..grid.n1)
            .map(|i| f_at(g, grid.x1(i)).map(|f| if f > 0.0 { 1.0 / f } else { f64::INFINITY }))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridOracle { grid, inv_f })
    }

    /// Oracle sized to contain `B((x1, 0), r)`, with `(x1, 0)` on a node and
    /// roughly `cells` nodes across each axis. When the ball reaches past
    /// `x₁ = 0` the grid starts at 0 and the far side is handled by reflection.
    pub fn for_ball(g: &Geometry, x1: f64, r: f64, cells: usize) -> Result<Self> {
        if !(x1 > 0.0 && r > 0.0) {
            return Err(Error::Domain(format!("ball centre x1 = {x1} and radius r = {r} must be positive")));
        }
        if cells < 16 {
            return Err(Error::Resolution(format!("{cells} cells per axis is too coarse")));
        }
        let reach = 1.05 * r;
        let target = 2.0 * reach / cells as f64;
        let (h1, n_left) = if x1 - reach - 2.0 * target <= 0.0 {
            let n = (x1 / target).ceil().max(1.0);
            (x1 / n, n as usize)
        } else {
            (target, (reach / target).ceil() as usize + 2)
        };
        let mut n_right = (reach / h1).ceil() as usize + 2;
        while x1 + n_right as f64 * h1 >= g.r_end() {
            n_right -= 1;
        }
        let h = match height(g, x1, r) {
            Ok(h) => h,
            Err(_) => r * f_at(g, x1 + r)?,
        };
        let half = cells / 2;
        let h2 = 1.3 * h / half as f64;
        let a1 = x1 - n_left as f64 * h1;
        let grid = Grid {
            a1: a1.max(0.0),
            a2: -(half as f64 + 2.0) * h2,
            h1,
            h2,
            n1: n_left + n_right + 1,
            n2: 2 * half + 5,
        };
        GridOracle::new(g, grid)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn reflects(&self) -> bool {
        self.grid.a1 == 0.0
    }

    fn run(&self, dist: &mut [f64], heap: &mut BinaryHeap<Entry>) {
        let gr = &self.grid;
        let (n1, n2) = (gr.n1 as i64, gr.n2 as i64);
        while let Some(Entry { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            let (i, j) = gr.ij(node);
            for &(di, dj) in &MOVES {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 0 || nj < 0 || ni >= n1 || nj >= n2 {
                    continue;
                }
                let (ni, nj) = (ni as usize, nj as usize);
                let dx = di as f64 * gr.h1;
                let dy = dj as f64 * gr.h2;
                let w = if dj == 0 {
                    dx.abs()
                } else {
                    let a = (dx * dx + (dy * self.inv_f[i]).powi(2)).sqrt();
                    let b = (dx * dx + (dy * self.inv_f[ni]).powi(2)).sqrt();
                    0.5 * (a + b)
                };
                if !w.is_finite() {
                    continue;
                }
                let k = gr.idx(ni, nj);
                let nd = d + w;
                if nd < dist[k] {
                    dist[k] = nd;
                    heap.push(Entry { dist: nd, node: k });
                }
            }
        }
    }

    /// Grid distances from the node nearest to `p`.
    pub fn distances_from(&self, p: [f64; 2]) -> Result<Vec<f64>> {
        let (i, j) = self.grid.nearest(p)?;
        let mut dist = vec![f64::INFINITY; self.grid.len()];
        let s = self.grid.idx(i, j);
        dist[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Entry { dist: 0.0, node: s });
        self.run(&mut dist, &mut heap);
        Ok(dist)
    }

    /// Distances to the mirror images `(-x₁, x₂)` of the grid nodes, given
    /// distances `direct` on the half plane. Paths must cross `x₁ = 0`, so
    /// the search restarts from column 0 seeded with `direct`.
    pub fn mirrored_distances(&self, direct: &[f64]) -> Result<Vec<f64>> {
        if !self.reflects() {
            return Err(Error::Domain("grid does not start at x1 = 0".into()));
        }
        let mut dist = vec![f64::INFINITY; self.grid.len()];
        let mut heap = BinaryHeap::new();
        for j in 0..self.grid.n2 {
            let k = self.grid.idx(0, j);
            dist[k] = direct[k];
            if direct[k].is_finite() {
                heap.push(Entry { dist: direct[k], node: k });
            }
        }
        self.run(&mut dist, &mut heap);
        Ok(dist)
    }

    /// Shortest-path distance between the nodes nearest to `p` and `q`.
    pub fn numeric_distance(&self, p: [f64; 2], q: [f64; 2]) -> Result<f64> {
        let d = self.distances_from(p)?;
        let (i, j) = self.grid.nearest(q)?;
        Ok(d[self.grid.idx(i, j)])
    }

    /// Node mask of `B(p, r)` on this grid (half plane only).
    pub fn ball_mask(&self, p: [f64; 2], r: f64) -> Result<Vec<bool>> {
        Ok(self.distances_from(p)?.iter().map(|&d| d < r).collect())
    }

    /// Measure of `B(p, r)`, including the part across `x₁ = 0` when the grid
    /// starts there. Fails if the ball touches an outer edge of the grid.
    pub fn ball_area(&self, p: [f64; 2], r: f64) -> Result<f64> {
        let direct = self.distances_from(p)?;
        let mask: Vec<bool> = direct.iter().map(|&d| d < r).collect();
        self.ensure_interior(&mask, r)?;
        let mut area = self.grid.cell_measure(&mask);
        if self.reflects() {
            let mirrored = self.mirrored_distances(&direct)?;
            let mmask: Vec<bool> = mirrored.iter().map(|&d| d < r).collect();
            self.ensure_interior(&mmask, r)?;
            area += self.grid.cell_measure(&mmask);
        }
        Ok(area)
    }

    /// Fails if any node of `mask` lies on an outer edge of the grid (the
    /// reflecting column excepted).
    pub fn ensure_interior(&self, mask: &[bool], r: f64) -> Result<()> {
        let gr = &self.grid;
        for j in 0..gr.n2 {
            for i in 0..gr.n1 {
                let edge = j == 0 || j + 1 == gr.n2 || i + 1 == gr.n1 || (i == 0 && !self.reflects());
                if edge && mask[gr.idx(i, j)] {
                    return Err(Error::Resolution(format!(
                        "ball of radius {r:e} reaches the grid edge at ({:e}, {:e})",
                        gr.x1(i),
                        gr.x2(j)
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_distance_with_constant_profile() {
        let g = Geometry::constant(0.0).unwrap();
        let grid = Grid::new(0.0, 0.5, 257, 0.0, 0.5, 257).unwrap();
        let o = GridOracle::new(&g, grid).unwrap();
        let d = o.numeric_distance([0.0, 0.0], [0.3, 0.4]).unwrap();
        assert!((d / 0.5 - 1.0).abs() < 0.02, "{d}");
    }

    #[test]
    fn euclidean_disc_area() {
        let g = Geometry::constant(0.0).unwrap();
        let o = GridOracle::for_ball(&g, 0.5, 0.1, 200).unwrap();
        let a = o.ball_area([0.5, 0.0], 0.1).unwrap();
        let exact = std::f64::consts::PI * 0.01;
        assert!((a / exact - 1.0).abs() < 0.05, "{a} vs {exact}");
    }
}
