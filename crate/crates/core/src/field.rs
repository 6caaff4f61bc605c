//! Scalar fields sampled on a uniform grid, with the degenerate gradient
//! `∇_A w = (∂₁w, f(x₁) ∂₂w)` and the integrals the inequalities need.
//!
//! Integrals over a node set use the cells with at least two corners in the
//! set, each weighted by the mean of its corner values. Energies over the
//! whole grid use edge differences, which matches the solver's flux scheme.

use crate::error::{Error, Result};
use crate::geometry::{Family, Geometry};
use crate::grid::Grid;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    grid: Grid,
    values: Vec<f64>,
    f_col: Vec<f64>,
}

/// `f` at every grid column. The grid must sit strictly inside `(0, R)`.
pub fn column_profile(g: &Geometry, grid: &Grid) -> Result<Vec<f64>> {
    if !(grid.a1 > 0.0 && grid.b1() < g.r_end()) {
        return Err(Error::Domain(format!(
            "grid columns [{}, {}] must lie strictly inside (0, {})",
            grid.a1,
            grid.b1(),
            g.r_end()
        )));
    }
    (0..grid.n1)
        .map(|i| match g.family() {
            Family::Constant { value } => Ok((-value).exp()),
            _ => g.f(grid.x1(i)),
        })
        .collect()
}

impl DiscreteField {
    pub fn new(g: &Geometry, grid: Grid, values: Vec<f64>) -> Result<Self> {
        let f_col = column_profile(g, &grid)?;
        Self::with_profile(grid, f_col, values)
    }

    /// Field on a grid whose column profile has already been evaluated.
    pub fn with_profile(grid: Grid, f_col: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() || f_col.len() != grid.n1 {
            return Err(Error::Config(format!(
                "field has {} values and {} columns for a {} x {} grid",
                values.len(),
                f_col.len(),
                grid.n1,
                grid.n2
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let p = grid.point(k);
            return Err(Error::Domain(format!("non-finite field value at ({}, {})", p[0], p[1])));
        }
        Ok(DiscreteField { grid, values, f_col })
    }

    pub fn from_fn(g: &Geometry, grid: Grid, w: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| {
            let p = grid.point(k);
            w(p[0], p[1])
        });
        Self::new(g, grid, values.collect())
    }

    /// Same grid and profile, new values.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        DiscreteField { grid: self.grid, values: self.values.iter().map(|&v| op(v)).collect(), f_col: self.f_col.clone() }
    }

    pub fn zip_with(&self, other: &DiscreteField, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Config("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(DiscreteField { grid: self.grid, values, f_col: self.f_col.clone() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn f_col(&self) -> &[f64] {
        &self.f_col
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Nodal `∇_A w`: centred differences inside, one-sided on the boundary.
    pub fn a_gradient(&self) -> Vec<[f64; 2]> {
        let gr = &self.grid;
        let diff = |lo: usize, hi: usize, n: usize, h: f64, get: &dyn Fn(usize) -> f64| {
            let (a, b) = (lo.saturating_sub(1), (hi + 1).min(n - 1));
            (get(b) - get(a)) / ((b - a) as f64 * h)
        };
        (0..gr.len())
            .map(|k| {
                let (i, j) = gr.ij(k);
                let d1 = diff(i, i, gr.n1, gr.h1, &|ii| self.at(ii, j));
                let d2 = diff(j, j, gr.n2, gr.h2, &|jj| self.at(i, jj));
                [d1, self.f_col[i] * d2]
            })
            .collect()
    }

    /// `∇_A w` on cell `(i, j)`, exact for bilinear data.
    pub fn cell_a_gradient(&self, i: usize, j: usize) -> [f64; 2] {
        let (w00, w10, w01, w11) = (self.at(i, j), self.at(i + 1, j), self.at(i, j + 1), self.at(i + 1, j + 1));
        let g1 = 0.5 * ((w10 - w00) + (w11 - w01)) / self.grid.h1;
        let g2 = 0.5 * ((w01 - w00) + (w11 - w10)) / self.grid.h2;
        let f = 0.5 * (self.f_col[i] + self.f_col[i + 1]);
        [g1, f * g2]
    }

    /// Cells with at least two corners in `mask`.
    pub fn cells<'a>(&'a self, mask: &'a [bool]) -> impl Iterator<Item = (usize, usize)> + 'a {
        let gr = self.grid;
        (0..gr.n2 - 1).flat_map(move |j| (0..gr.n1 - 1).map(move |i| (i, j))).filter(move |&(i, j)| {
            [gr.idx(i, j), gr.idx(i + 1, j), gr.idx(i, j + 1), gr.idx(i + 1, j + 1)].iter().filter(|&&k| mask[k]).count()
                >= 2
        })
    }

    /// `∫_S φ(w)` with `φ` averaged over the corners of each cell of `S`.
    pub fn integral(&self, mask: &[bool], phi: impl Fn(f64) -> f64) -> f64 {
        let area = self.grid.cell_area();
        self.cells(mask)
            .map(|(i, j)| {
                let s = phi(self.at(i, j)) + phi(self.at(i + 1, j)) + phi(self.at(i, j + 1)) + phi(self.at(i + 1, j + 1));
                0.25 * s * area
            })
            .sum()
    }

    /// `∫_S |∇_A w|^p` with the cell gradient.
    pub fn grad_integral(&self, mask: &[bool], p: i32) -> f64 {
        let area = self.grid.cell_area();
        self.cells(mask)
            .map(|(i, j)| {
                let g = self.cell_a_gradient(i, j);
                (g[0] * g[0] + g[1] * g[1]).sqrt().powi(p) * area
            })
            .sum()
    }

    /// `sup |∇_A w|` over all cells.
    pub fn grad_sup(&self) -> f64 {
        let gr = self.grid;
        let mut s: f64 = 0.0;
        for j in 0..gr.n2 - 1 {
            for i in 0..gr.n1 - 1 {
                let g = self.cell_a_gradient(i, j);
                s = s.max((g[0] * g[0] + g[1] * g[1]).sqrt());
            }
        }
        s
    }

    /// Edge energy `Σ ρ (Δw)² a/h²·h₁h₂` over all grid edges, where `a` is 1
    /// horizontally and `f(x₁)²` vertically, `ρ` is the mean of `weight` at
    /// the two end nodes, and edges on the outer boundary count one half.
    pub fn edge_energy(&self, weight: Option<&[f64]>) -> f64 {
        let gr = self.grid;
        let area = gr.cell_area();
        let rho = |a: usize, b: usize| weight.map_or(1.0, |w| 0.5 * (w[a] + w[b]));
        let mut e = 0.0;
        for j in 0..gr.n2 {
            let c = if j == 0 || j + 1 == gr.n2 { 0.5 } else { 1.0 };
            for i in 0..gr.n1 - 1 {
                let (a, b) = (gr.idx(i, j), gr.idx(i + 1, j));
                let d = (self.values[b] - self.values[a]) / gr.h1;
                e += c * rho(a, b) * d * d * area;
            }
        }
        for i in 0..gr.n1 {
            let c = if i == 0 || i + 1 == gr.n1 { 0.5 } else { 1.0 };
            let f2 = self.f_col[i] * self.f_col[i];
            for j in 0..gr.n2 - 1 {
                let (a, b) = (gr.idx(i, j), gr.idx(i, j + 1));
                let d = (self.values[b] - self.values[a]) / gr.h2;
                e += c * rho(a, b) * f2 * d * d * area;
            }
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(0.1, 0.5, 41, -0.2, 0.2, 41).unwrap()
    }

    #[test]
    fn gradient_of_coordinates() {
        let g = Geometry::inverse_power(1.0).unwrap();
        let w1 = DiscreteField::from_fn(&g, grid(), |x1, _| x1).unwrap();
        let w2 = DiscreteField::from_fn(&g, grid(), |_, x2| x2).unwrap();
        let (g1, g2) = (w1.a_gradient(), w2.a_gradient());
        for k in 0..grid().len() {
            let (i, _) = grid().ij(k);
            let f = g.f(grid().x1(i)).unwrap();
            assert!((g1[k][0] - 1.0).abs() < 1e-12 && g1[k][1] == 0.0);
            assert!(g2[k][0] == 0.0 && (g2[k][1] - f).abs() < 1e-12 * f.max(1e-300));
        }
    }

    #[test]
    fn gradient_of_product_at_node() {
        let g = Geometry::inverse_power(1.0).unwrap();
        let gr = Grid::new(0.1, 0.3, 21, 0.2, 0.4, 21).unwrap();
        let w = DiscreteField::from_fn(&g, gr, |x1, x2| x1 * x2).unwrap();
        let (i, j) = gr.nearest([0.2, 0.3]).unwrap();
        let d = w.a_gradient()[gr.idx(i, j)];
        assert!((d[0] - 0.3).abs() < 1e-12);
        assert!((d[1] - 0.2 * (-5.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn integrals_of_constants_are_areas() {
        let g = Geometry::constant(0.0).unwrap();
        let w = DiscreteField::from_fn(&g, grid(), |_, _| 2.0).unwrap();
        let all = vec![true; grid().len()];
        let area = 0.4 * 0.4;
        assert!((w.integral(&all, |v| v) - 2.0 * area).abs() < 1e-12);
        assert_eq!(w.grad_integral(&all, 1), 0.0);
        assert_eq!(w.edge_energy(None), 0.0);
    }

    #[test]
    fn edge_energy_of_linear_field() {
        let g = Geometry::constant(0.0).unwrap();
        let w = DiscreteField::from_fn(&g, grid(), |x1, x2| 3.0 * x1 - x2).unwrap();
        assert!((w.edge_energy(None) - 10.0 * 0.16).abs() < 1e-10);
    }

    #[test]
    fn rejects_grid_touching_degeneracy() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let gr = Grid::new(0.0, 0.5, 5, 0.0, 1.0, 5).unwrap();
        assert!(DiscreteField::new(&g, gr, vec![0.0; 25]).is_err());
    }
}
