//! Finite-difference solver for `div(A ∇u) = 0`, `A = diag(1, f(x₁)²)`, on a
//! rectangle with Dirichlet data, plus the truncation cascade and the
//! oscillation-decay harness.
//!
//! The scheme is the 5-point flux form. Vertical fluxes use `f(x₁)²` at the
//! column shared by both nodes, so the matrix is symmetric and `u = x₁`,
//! `u = x₂` are exact discrete solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{column_profile, DiscreteField};
use crate::geometry::Geometry;
use crate::grid::Grid;
use crate::metric::GridOracle;
use crate::random::{rng, PiecewiseLinear};
use crate::sparse::{pcg, Csr, CsrBuilder};

/// Smallest admissible `f(x₁)²` on the rectangle.
pub const MIN_COEFFICIENT: f64 = 1e-300;

/// Dirichlet data on the rectangle boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundaryData {
    LinearX1,
    LinearX2,
    /// `x₁² − x₂²`, harmonic when `f ≡ 1`.
    Quadratic,
    /// `e^{x₁} cos x₂`, harmonic when `f ≡ 1`.
    ExpCos,
    /// Random piecewise-linear function on a `lattice × lattice` coarse mesh.
    RandomPiecewise {
        seed: u64,
        #[serde(default = "default_lattice")]
        lattice: usize,
    },
}

fn default_lattice() -> usize {
    4
}

impl BoundaryData {
    /// Values at every node of `grid` (interior values are discarded by the solver).
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        let pl = match self {
            BoundaryData::RandomPiecewise { seed, lattice } => {
                let mut r = rng(*seed);
                Some(PiecewiseLinear::random(&mut r, [grid.a1, grid.a2], [grid.b1(), grid.b2()], *lattice, *lattice))
            }
            _ => None,
        };
        (0..grid.len())
            .map(|k| {
                let [x1, x2] = grid.point(k);
                match self {
                    BoundaryData::LinearX1 => x1,
                    BoundaryData::LinearX2 => x2,
                    BoundaryData::Quadratic => x1 * x1 - x2 * x2,
                    BoundaryData::ExpCos => x1.exp() * x2.cos(),
                    BoundaryData::RandomPiecewise { .. } => pl.as_ref().unwrap().eval(x1, x2),
                }
            })
            .collect()
    }

    pub fn name(&self) -> String {
        match self {
            BoundaryData::LinearX1 => "linear-x1".into(),
            BoundaryData::LinearX2 => "linear-x2".into(),
            BoundaryData::Quadratic => "quadratic".into(),
            BoundaryData::ExpCos => "exp-cos".into(),
            BoundaryData::RandomPiecewise { seed, lattice } => format!("random-piecewise:{seed}:{lattice}"),
        }
    }
}

impl std::str::FromStr for BoundaryData {
    type Err = Error;

    /// Parses `linear-x1`, `linear-x2`, `quadratic`, `exp-cos` or
    /// `random:SEED[:LATTICE]` (also spelled `random-piecewise`).
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let num = |t: &str| t.parse::<u64>().map_err(|e| Error::Config(format!("bad integer {t:?} in {s:?}: {e}")));
        match (head, rest.as_slice()) {
            ("linear-x1", []) => Ok(BoundaryData::LinearX1),
            ("linear-x2", []) => Ok(BoundaryData::LinearX2),
            ("quadratic", []) => Ok(BoundaryData::Quadratic),
            ("exp-cos", []) => Ok(BoundaryData::ExpCos),
            ("random" | "random-piecewise", [seed]) => Ok(BoundaryData::RandomPiecewise { seed: num(seed)?, lattice: 4 }),
            ("random" | "random-piecewise", [seed, lattice]) => {
                let lattice = num(lattice)? as usize;
                if lattice == 0 {
                    return Err(Error::Config("lattice must be at least 1".into()));
                }
                Ok(BoundaryData::RandomPiecewise { seed: num(seed)?, lattice })
            }
            _ => Err(Error::Config(format!("unknown boundary data {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DegenerateProblem {
    pub geometry: Geometry,
    /// `[a1, b1, a2, b2]`.
    pub rect: [f64; 4],
    /// Cells per axis; the grid has one more node than cells.
    pub cells: [usize; 2],
    pub boundary: BoundaryData,
}

impl DegenerateProblem {
    pub fn grid(&self) -> Result<Grid> {
        let [a1, b1, a2, b2] = self.rect;
        Grid::new(a1, b1, self.cells[0] + 1, a2, b2, self.cells[1] + 1)
    }
}

/// Assembled system for the interior unknowns.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub grid: Grid,
    pub f_col: Vec<f64>,
    pub matrix: Csr,
    pub rhs: Vec<f64>,
    /// Node index of each unknown.
    pub nodes: Vec<usize>,
    /// Boundary values at boundary nodes, zero inside.
    pub boundary_values: Vec<f64>,
}

/// Edge weights `(h₂/h₁, f_i² h₁/h₂)` of the scaled flux scheme.
fn weights(grid: &Grid, f_col: &[f64]) -> (f64, Vec<f64>) {
    let wx = grid.h2 / grid.h1;
    let wy = f_col.iter().map(|f| f * f * grid.h1 / grid.h2).collect();
    (wx, wy)
}

pub fn assemble(p: &DegenerateProblem) -> Result<LinearSystem> {
    let grid = p.grid()?;
    assemble_values(&p.geometry, grid, &p.boundary.sample(&grid))
}

/// Assembly with boundary values given at every node of `grid` (only the
/// boundary entries are read).
pub fn assemble_values(g: &Geometry, grid: Grid, data: &[f64]) -> Result<LinearSystem> {
    if data.len() != grid.len() {
        return Err(Error::Config(format!("{} boundary values for {} nodes", data.len(), grid.len())));
    }
    if grid.n1 < 3 || grid.n2 < 3 {
        return Err(Error::Config("the solver needs at least one interior node".into()));
    }
    let f_col = column_profile(g, &grid)?;
    if let Some(i) = f_col.iter().position(|f| !(f * f >= MIN_COEFFICIENT)) {
        return Err(Error::Domain(format!(
            "f(x1)^2 underflows at x1 = {}; move the rectangle away from x1 = 0",
            grid.x1(i)
        )));
    }
    let (wx, wy) = weights(&grid, &f_col);
    let mut unknown = vec![usize::MAX; grid.len()];
    let mut nodes = Vec::new();
    let mut boundary_values = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let (i, j) = grid.ij(k);
        if grid.is_boundary(i, j) {
            boundary_values[k] = data[k];
        } else {
            unknown[k] = nodes.len();
            nodes.push(k);
        }
    }
    let mut b = CsrBuilder::new(nodes.len());
    let mut rhs = vec![0.0; nodes.len()];
    for (row, &k) in nodes.iter().enumerate() {
        let (i, j) = grid.ij(k);
        let nbrs = [
            (grid.idx(i - 1, j), wx),
            (grid.idx(i + 1, j), wx),
            (grid.idx(i, j - 1), wy[i]),
            (grid.idx(i, j + 1), wy[i]),
        ];
        b.push(row, 2.0 * wx + 2.0 * wy[i]);
        for (nb, w) in nbrs {
            if unknown[nb] == usize::MAX {
                rhs[row] += w * boundary_values[nb];
            } else {
                b.push(unknown[nb], -w);
            }
        }
        b.end_row();
    }
    Ok(LinearSystem { grid, f_col, matrix: b.finish(), rhs, nodes, boundary_values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { rel_tol: 1e-12, max_iter: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: DiscreteField,
    pub residual: f64,
    pub iterations: usize,
    /// `∫ |∇_A u|²` by edge differences.
    pub energy: f64,
}

pub fn solve(sys: &LinearSystem, opts: SolveOptions) -> Result<SolveResult> {
    // Start from the mean of the boundary data.
    let grid = sys.grid;
    let bnd: Vec<f64> = (0..grid.len())
        .filter(|&k| {
            let (i, j) = grid.ij(k);
            grid.is_boundary(i, j)
        })
        .map(|k| sys.boundary_values[k])
        .collect();
    let (lo, hi) = bnd.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = bnd.iter().sum::<f64>() / bnd.len() as f64;
    let mut x = vec![mean; sys.nodes.len()];
    let out = pcg(&sys.matrix, &sys.rhs, &mut x, opts.rel_tol, opts.max_iter)?;
    let mut values = sys.boundary_values.clone();
    for (row, &k) in sys.nodes.iter().enumerate() {
        values[k] = x[row];
    }
    let tol = 1e-9 * (hi - lo).abs().max(lo.abs()).max(hi.abs()).max(1e-300);
    if let Some(k) = values.iter().position(|&v| v < lo - tol || v > hi + tol) {
        let p = grid.point(k);
        return Err(Error::Invariant(format!(
            "maximum principle fails at ({}, {}): u = {} outside [{lo}, {hi}]",
            p[0], p[1], values[k]
        )));
    }
    let u = DiscreteField::with_profile(grid, sys.f_col.clone(), values)?;
    let energy = u.edge_energy(None);
    Ok(SolveResult { u, residual: out.relative_residual, iterations: out.iterations, energy })
}

pub fn solve_problem(p: &DegenerateProblem, opts: SolveOptions) -> Result<SolveResult> {
    solve(&assemble(p)?, opts)
}

/// Relative residual of the discrete equation at the interior nodes of `u`:
/// `‖r‖₂ / ‖D u‖₂` with `D` the diagonal of the scheme.
#[allow(clippy::needless_range_loop)]
pub fn residual_norm(u: &DiscreteField) -> f64 {
    let grid = *u.grid();
    let (wx, wy) = weights(&grid, u.f_col());
    let (mut num, mut den) = (0.0, 0.0);
    for j in 1..grid.n2 - 1 {
        for i in 1..grid.n1 - 1 {
            let c = u.at(i, j);
            let r = wx * (2.0 * c - u.at(i - 1, j) - u.at(i + 1, j)) + wy[i] * (2.0 * c - u.at(i, j - 1) - u.at(i, j + 1));
            num += r * r;
            den += ((2.0 * wx + 2.0 * wy[i]) * c).powi(2);
        }
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// `w_k = 2^k (v − (1 − 2^{−k}))` for `k = 0..=k_max`.
pub fn truncation_cascade(v: &DiscreteField, k_max: usize) -> Result<Vec<DiscreteField>> {
    if v.max() > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!("truncation needs v <= 1, got max v = {}", v.max())));
    }
    if k_max > 52 {
        return Err(Error::Config(format!("k_max = {k_max} exceeds the precision of 2^-k")));
    }
    Ok((0..=k_max)
        .map(|k| {
            let s = (2.0f64).powi(k as i32);
            let c = 1.0 - 1.0 / s;
            v.map(|x| s * (x - c))
        })
        .collect())
}

/// Worst defect of `w_{k+1} = 2 w_k − 1` over a cascade, as
/// `(absolute, scaled)`. The scaled defect divides by `max(1, |2w_k|)`, the
/// magnitude at which the two sides are computed.
pub fn cascade_defect(ws: &[DiscreteField]) -> (f64, f64) {
    let mut abs: f64 = 0.0;
    let mut rel: f64 = 0.0;
    for pair in ws.windows(2) {
        for (&a, &b) in pair[0].values().iter().zip(pair[1].values()) {
            let d = (b - (2.0 * a - 1.0)).abs();
            abs = abs.max(d);
            rel = rel.max(d / (2.0 * a).abs().max(1.0));
        }
    }
    (abs, rel)
}

fn check_same_grid(u: &DiscreteField, oracle: &GridOracle) -> Result<()> {
    if u.grid() != oracle.grid() {
        return Err(Error::Config("oracle and field grids differ".into()));
    }
    Ok(())
}

/// Minimum number of nodes a ball needs before its oscillation is trusted.
pub const MIN_BALL_NODES: usize = 16;

fn osc_over(u: &DiscreteField, dist: &[f64], r: f64) -> Result<(f64, f64, usize)> {
    let (mut lo, mut hi, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for (k, &d) in dist.iter().enumerate() {
        if d < r {
            let v = u.values()[k];
            lo = lo.min(v);
            hi = hi.max(v);
            n += 1;
        }
    }
    if n < MIN_BALL_NODES {
        return Err(Error::Resolution(format!("ball of radius {r:e} holds {n} nodes, need {MIN_BALL_NODES}")));
    }
    Ok((lo, hi, n))
}

/// `osc_{B(x, r)} u` over the nodes of the numeric control ball.
pub fn oscillation(u: &DiscreteField, x: [f64; 2], r: f64, oracle: &GridOracle) -> Result<f64> {
    check_same_grid(u, oracle)?;
    let dist = oracle.distances_from(x)?;
    let (lo, hi, _) = osc_over(u, &dist, r)?;
    Ok(hi - lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscLevel {
    pub level: usize,
    pub r: f64,
    pub osc: f64,
    pub nodes: usize,
    /// `osc(B_r) / osc(B_{2r})`; absent at level 0.
    pub ratio: Option<f64>,
    /// `1 − λ(r)/2` at this level's radius: the contraction promised for the next level.
    pub predicted_cap: f64,
    /// Measure fraction of `{v ≤ 0}` in `B_r` for the normalised `v`.
    pub nonpositive_fraction: f64,
    /// Which half-measure hypothesis holds: `"v<=0"` or `"v>=0"`.
    pub hypothesis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub geometry: String,
    pub boundary: String,
    pub center: [f64; 2],
    pub r0: f64,
    pub levels: Vec<OscLevel>,
}

impl OscillationReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].osc < w[0].osc)
    }

    /// `osc` at the last level over `osc` at level 0.
    pub fn final_over_initial(&self) -> f64 {
        match (self.levels.first(), self.levels.last()) {
            (Some(a), Some(b)) if a.osc > 0.0 => b.osc / a.osc,
            _ => f64::NAN,
        }
    }

    pub fn max_ratio(&self) -> f64 {
        self.levels.iter().filter_map(|l| l.ratio).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Solves `p`, then measures `osc` over `B(x, r0/2^ℓ)` for `ℓ < levels`.
/// `lambda` supplies `λ(r)` for the predicted contraction, which is reported
/// but not enforced. Requires `B(x, 3 r0)` to stay inside the rectangle.
pub fn oscillation_decay_run(
    p: &DegenerateProblem,
    x: [f64; 2],
    r0: f64,
    levels: usize,
    lambda: &dyn Fn(f64) -> f64,
) -> Result<OscillationReport> {
    let sol = solve_problem(p, SolveOptions::default())?;
    oscillation_decay_of(&p.geometry, &sol.u, &p.boundary.name(), x, r0, levels, lambda)
}

pub fn oscillation_decay_of(
    g: &Geometry,
    u: &DiscreteField,
    boundary: &str,
    x: [f64; 2],
    r0: f64,
    levels: usize,
    lambda: &dyn Fn(f64) -> f64,
) -> Result<OscillationReport> {
    let oracle = GridOracle::new(g, *u.grid())?;
    let dist = oracle.distances_from(x)?;
    let big: Vec<bool> = dist.iter().map(|&d| d < 3.0 * r0).collect();
    oracle.ensure_interior(&big, 3.0 * r0).map_err(|_| {
        Error::Domain(format!("B(x, 3 r0) with r0 = {r0} leaves the rectangle"))
    })?;
    let mut out: Vec<OscLevel> = Vec::with_capacity(levels);
    for level in 0..levels {
        let r = r0 / (1u64 << level) as f64;
        let (lo, hi, nodes) = osc_over(u, &dist, r)?;
        let osc = hi - lo;
        let mask: Vec<bool> = dist.iter().map(|&d| d < r).collect();
        let mid = 0.5 * (hi + lo);
        let nonpos: Vec<bool> = u.values().iter().zip(&mask).map(|(&v, &m)| m && v <= mid).collect();
        let nonneg: Vec<bool> = u.values().iter().zip(&mask).map(|(&v, &m)| m && v >= mid).collect();
        let grid = u.grid();
        let area = grid.cell_measure(&mask);
        let frac = if area > 0.0 { grid.cell_measure(&nonpos) / area } else { f64::NAN };
        let hypothesis = if frac >= 0.5 || grid.cell_measure(&nonneg) < 0.5 * area { "v<=0" } else { "v>=0" };
        let ratio = out.last().map(|prev| if prev.osc > 0.0 { osc / prev.osc } else { f64::NAN });
        out.push(OscLevel {
            level,
            r,
            osc,
            nodes,
            ratio,
            predicted_cap: 1.0 - 0.5 * lambda(r),
            nonpositive_fraction: frac,
            hypothesis: hypothesis.into(),
        });
    }
    Ok(OscillationReport { geometry: g.id(), boundary: boundary.into(), center: x, r0, levels: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(g: Geometry, boundary: BoundaryData, n: usize) -> DegenerateProblem {
        DegenerateProblem { geometry: g, rect: [0.1, 0.4, -0.15, 0.15], cells: [n, n], boundary }
    }

    #[test]
    fn laplacian_stencil_for_unit_profile() {
        let sys = assemble(&problem(Geometry::constant(0.0).unwrap(), BoundaryData::LinearX1, 4)).unwrap();
        assert!(sys.matrix.is_symmetric());
        // 3x3 interior with h1 = 0.075, h2 = 0.075: weights 1 and 1.
        assert_eq!(sys.matrix.n, 9);
        assert!((sys.matrix.get(4, 4) - 4.0).abs() < 1e-14);
        assert!((sys.matrix.get(4, 3) + 1.0).abs() < 1e-14);
        assert!((sys.matrix.get(4, 1) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn hand_assembled_centre_row() {
        let g = Geometry::finite_type(1.0).unwrap();
        let p = DegenerateProblem { geometry: g, rect: [0.1, 0.5, 0.0, 0.2], cells: [4, 4], boundary: BoundaryData::LinearX2 };
        let sys = assemble(&p).unwrap();
        // Centre node x1 = 0.3: h1 = 0.1, h2 = 0.05, wx = 0.5, wy = 0.09 * 2.
        let (wx, wy) = (0.5, 0.3f64 * 0.3 * 2.0);
        assert!((sys.matrix.get(4, 4) - (2.0 * wx + 2.0 * wy)).abs() < 1e-15);
        assert!((sys.matrix.get(4, 3) + wx).abs() < 1e-15);
        assert!((sys.matrix.get(4, 7) + wy).abs() < 1e-15);
    }

    #[test]
    fn coordinates_are_exact_solutions() {
        for g in [Geometry::power_log(3, 0.5).unwrap(), Geometry::inverse_power(0.5).unwrap()] {
            for (bd, exact) in [(BoundaryData::LinearX1, 0usize), (BoundaryData::LinearX2, 1)] {
                let sol = solve_problem(&problem(g.clone(), bd, 32), SolveOptions::default()).unwrap();
                let gr = *sol.u.grid();
                let err = (0..gr.len()).map(|k| (sol.u.values()[k] - gr.point(k)[exact]).abs()).fold(0.0, f64::max);
                assert!(err < 1e-9, "{} {err}", g.id());
            }
        }
    }

    #[test]
    fn cascade_examples() {
        let g = Geometry::constant(0.0).unwrap();
        let gr = Grid::new(0.1, 0.2, 3, 0.0, 0.1, 3).unwrap();
        let one = DiscreteField::from_fn(&g, gr, |_, _| 1.0).unwrap();
        assert!(truncation_cascade(&one, 5).unwrap().iter().all(|w| w.values().iter().all(|&v| v == 1.0)));
        let zero = one.map(|_| 0.0);
        let ws = truncation_cascade(&zero, 2).unwrap();
        assert_eq!([ws[0].at(0, 0), ws[1].at(0, 0), ws[2].at(0, 0)], [0.0, -1.0, -3.0]);
        assert!(matches!(truncation_cascade(&one.map(|_| 1.5), 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn residual_detects_non_solutions() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let sol = solve_problem(&problem(g.clone(), BoundaryData::RandomPiecewise { seed: 1, lattice: 3 }, 24), SolveOptions::default())
            .unwrap();
        assert!(residual_norm(&sol.u) < 1e-10);
        let bumped = sol.u.map(|v| v * v);
        assert!(residual_norm(&bumped) > 1e-4);
    }
}
