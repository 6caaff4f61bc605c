//! Both sides of the Poincaré, proportional-vanishing Sobolev, Caccioppoli
//! and DeGiorgi inequalities on discrete fields, and a seeded Monte Carlo
//! that calibrates each implied constant on one seed set and validates it on
//! another.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{column_profile, DiscreteField};
use crate::geometry::Geometry;
use crate::grid::Grid;
use crate::metric::GridOracle;
use crate::random::{rng, PiecewiseLinear};
use crate::solver::{assemble_values, residual_norm, solve, SolveOptions};

/// Largest relative residual accepted for a Caccioppoli input.
pub const SOLUTION_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub inequality: String,
    pub geometry: String,
    pub x1: f64,
    pub r: f64,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; `NaN` when both sides vanish, `inf` when only `rhs` does.
    pub implied_constant: f64,
    pub applicable: bool,
}

impl InequalityReport {
    #[allow(clippy::too_many_arguments)]
    fn new(inequality: &str, geometry: &str, x1: f64, r: f64, seed: u64, lhs: f64, rhs: f64, applicable: bool) -> Self {
        let implied_constant = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
        InequalityReport { inequality: inequality.into(), geometry: geometry.into(), x1, r, seed, lhs, rhs, implied_constant, applicable }
    }

    pub fn indeterminate(&self) -> bool {
        self.lhs == 0.0 && self.rhs == 0.0
    }
}

/// A numeric control ball `B = B((x1, 0), r)` together with `2B`, on a grid
/// that contains `2B` and stays clear of `x₁ = 0`.
#[derive(Debug, Clone)]
pub struct TrialBall {
    pub geometry: String,
    pub x1: f64,
    pub r: f64,
    pub grid: Grid,
    f_col: Vec<f64>,
    pub b: Vec<bool>,
    pub b2: Vec<bool>,
    pub b_area: f64,
    pub b2_area: f64,
}

impl TrialBall {
    pub fn new(g: &Geometry, x1: f64, r: f64, cells: usize) -> Result<Self> {
        let oracle = GridOracle::for_ball(g, x1, 2.0 * r, cells)?;
        let grid = *oracle.grid();
        if grid.a1 <= 0.0 {
            return Err(Error::Domain(format!("B((x1, 0), 2r) with x1 = {x1}, r = {r} reaches x1 = 0")));
        }
        let dist = oracle.distances_from([x1, 0.0])?;
        let b: Vec<bool> = dist.iter().map(|&d| d < r).collect();
        let b2: Vec<bool> = dist.iter().map(|&d| d < 2.0 * r).collect();
        oracle.ensure_interior(&b2, 2.0 * r)?;
        let (b_area, b2_area) = (grid.cell_measure(&b), grid.cell_measure(&b2));
        Ok(TrialBall { geometry: g.id(), x1, r, grid, f_col: column_profile(g, &grid)?, b, b2, b_area, b2_area })
    }

    pub fn field(&self, values: Vec<f64>) -> Result<DiscreteField> {
        DiscreteField::with_profile(self.grid, self.f_col.clone(), values)
    }

    fn check(&self, w: &DiscreteField) -> Result<()> {
        if *w.grid() != self.grid {
            return Err(Error::Config("field grid differs from the ball grid".into()));
        }
        Ok(())
    }
}

/// `∫_B |w − w̄| ≤ C r ∫_{2B} |∇_A w|`.
pub fn poincare_trial(w: &DiscreteField, ball: &TrialBall, seed: u64) -> Result<InequalityReport> {
    ball.check(w)?;
    let mean = w.integral(&ball.b, |v| v) / ball.b_area;
    let lhs = w.integral(&ball.b, |v| (v - mean).abs());
    let rhs = ball.r * w.grad_integral(&ball.b2, 1);
    Ok(InequalityReport::new("poincare", &ball.geometry, ball.x1, ball.r, seed, lhs, rhs, true))
}

/// `∫_B |w| ≤ C r ∫_{2B} |∇_A w|` for `w` vanishing on `E` with `|E ∩ B| ≥ ½|B|`.
pub fn vanishing_sobolev_trial(w: &DiscreteField, ball: &TrialBall, e: &[bool], seed: u64) -> Result<InequalityReport> {
    ball.check(w)?;
    if let Some(k) = e.iter().zip(w.values()).position(|(&inside, &v)| inside && v != 0.0) {
        let p = ball.grid.point(k);
        return Err(Error::Precondition(format!("w does not vanish on E at ({}, {})", p[0], p[1])));
    }
    let e_in_b: Vec<bool> = e.iter().zip(&ball.b).map(|(&a, &b)| a && b).collect();
    let e_area = ball.grid.cell_measure(&e_in_b);
    if e_area < 0.5 * ball.b_area {
        return Err(Error::Precondition(format!("|E| = {e_area:e} is below half of |B| = {:e}", ball.b_area)));
    }
    let lhs = w.integral(&ball.b, f64::abs);
    let rhs = ball.r * w.grad_integral(&ball.b2, 1);
    Ok(InequalityReport::new("vanishing-sobolev", &ball.geometry, ball.x1, ball.r, seed, lhs, rhs, true))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaccioppoliReport {
    /// `∫|∇_A(ψu₊)|²` against `(‖ψ‖∞ + ‖∇_Aψ‖∞)² ∫u₊²`.
    pub standard: InequalityReport,
    /// `∫|ψ∇_A u₊|²` against `∫|∇_Aψ|² u₊²`; the continuum constant is 4.
    pub intermediate: InequalityReport,
}

/// Caccioppoli for a discrete solution `u` and a cutoff `ψ` vanishing on
/// the boundary of the grid. Energies use edge differences, matching the
/// solver's weak form.
pub fn caccioppoli_trial(u: &DiscreteField, psi: &DiscreteField, geometry: &str, seed: u64) -> Result<CaccioppoliReport> {
    if u.grid() != psi.grid() {
        return Err(Error::Config("u and psi live on different grids".into()));
    }
    let res = residual_norm(u);
    if !(res <= SOLUTION_RESIDUAL) {
        return Err(Error::Precondition(format!("u is not a discrete solution (relative residual {res:e})")));
    }
    let gr = *u.grid();
    for k in 0..gr.len() {
        let (i, j) = gr.ij(k);
        if gr.is_boundary(i, j) && psi.values()[k] != 0.0 {
            return Err(Error::Precondition("psi must vanish on the grid boundary".into()));
        }
    }
    let up = u.map(|v| v.max(0.0));
    let psi_up = up.zip_with(psi, |a, b| a * b)?;
    let psi2: Vec<f64> = psi.values().iter().map(|v| v * v).collect();
    let up2: Vec<f64> = up.values().iter().map(|v| v * v).collect();
    let all = vec![true; gr.len()];
    let sup = psi.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) + psi.grad_sup();
    let (x1, r) = (0.5 * (gr.a1 + gr.b1()), 0.5 * (gr.b1() - gr.a1));
    let standard = InequalityReport::new(
        "caccioppoli",
        geometry,
        x1,
        r,
        seed,
        psi_up.edge_energy(None),
        sup * sup * up.integral(&all, |v| v * v),
        true,
    );
    let intermediate = InequalityReport::new(
        "caccioppoli-intermediate",
        geometry,
        x1,
        r,
        seed,
        up.edge_energy(Some(&psi2)),
        psi.edge_energy(Some(&up2)),
        true,
    );
    Ok(CaccioppoliReport { standard, intermediate })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeGiorgiSets {
    /// `|{w ≤ 0} ∩ B|`.
    pub a: f64,
    /// `|{w ≥ 1} ∩ B|`.
    pub c: f64,
    /// `|{0 < w < 1} ∩ 2B|`.
    pub d: f64,
    /// `∫_{2B} |∇_A w₊|²`.
    pub c0: f64,
    /// `∫_𝒟 |∇_A w|`, the middle term of the proof's chain.
    pub d_grad_l1: f64,
    pub b_area: f64,
    pub r: f64,
    /// Largest change of `min(max(w, 0), 1)` along a grid edge inside `2B`.
    pub band_step: f64,
}

/// Largest admissible `band_step`: the band `0 < w < 1` must span at least
/// four grid cells, otherwise the grid cannot measure `𝒟`.
pub const MAX_BAND_STEP: f64 = 0.25;

impl DeGiorgiSets {
    /// The lemma's hypothesis `|𝒜| ≥ ½|B|`, on a field whose band is resolved.
    pub fn applicable(&self) -> bool {
        self.a >= 0.5 * self.b_area && self.band_step <= MAX_BAND_STEP
    }

    pub fn lhs(&self) -> f64 {
        self.c0 * self.d
    }

    pub fn rhs(&self) -> f64 {
        (self.a * self.c / (self.r * self.b_area)).powi(2)
    }
}

pub fn degiorgi_sets(w: &DiscreteField, ball: &TrialBall) -> Result<DeGiorgiSets> {
    ball.check(w)?;
    let v = w.values();
    let pick = |base: &[bool], test: &dyn Fn(f64) -> bool| -> Vec<bool> {
        base.iter().zip(v).map(|(&m, &x)| m && test(x)).collect()
    };
    let a = pick(&ball.b, &|x| x <= 0.0);
    let c = pick(&ball.b, &|x| x >= 1.0);
    let d = pick(&ball.b2, &|x| x > 0.0 && x < 1.0);
    let gr = &ball.grid;
    let clip = |k: usize| v[k].clamp(0.0, 1.0);
    let mut band_step: f64 = 0.0;
    for k in 0..gr.len() {
        let (i, j) = gr.ij(k);
        for nb in [(i + 1 < gr.n1).then(|| gr.idx(i + 1, j)), (j + 1 < gr.n2).then(|| gr.idx(i, j + 1))].into_iter().flatten() {
            if ball.b2[k] && ball.b2[nb] {
                band_step = band_step.max((clip(k) - clip(nb)).abs());
            }
        }
    }
    Ok(DeGiorgiSets {
        band_step,
        a: gr.cell_measure(&a),
        c: gr.cell_measure(&c),
        d: gr.cell_measure(&d),
        c0: w.map(|x| x.max(0.0)).grad_integral(&ball.b2, 2),
        d_grad_l1: w.grad_integral(&d, 1),
        b_area: ball.b_area,
        r: ball.r,
    })
}

/// `C₀|𝒟| ≥ C₁ (|𝒜||𝒞| / (r|B|))²`; the implied constant is the largest
/// admissible `C₁`.
pub fn degiorgi_check(sets: &DeGiorgiSets, geometry: &str, x1: f64, seed: u64) -> InequalityReport {
    InequalityReport::new("degiorgi", geometry, x1, sets.r, seed, sets.lhs(), sets.rhs(), sets.applicable())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityKind {
    Poincare,
    VanishingSobolev,
    Caccioppoli,
    DeGiorgi,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 4] =
        [InequalityKind::Poincare, InequalityKind::VanishingSobolev, InequalityKind::Caccioppoli, InequalityKind::DeGiorgi];

    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::Poincare => "poincare",
            InequalityKind::VanishingSobolev => "vanishing-sobolev",
            InequalityKind::Caccioppoli => "caccioppoli",
            InequalityKind::DeGiorgi => "degiorgi",
        }
    }

    /// DeGiorgi bounds its constant from below, the others from above.
    pub fn is_lower_bound(self) -> bool {
        self == InequalityKind::DeGiorgi
    }
}

impl std::str::FromStr for InequalityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        InequalityKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "sobolev" && *k == InequalityKind::VanishingSobolev))
            .ok_or_else(|| Error::Config(format!("unknown inequality '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub geometry: Geometry,
    pub calibration_trials: usize,
    pub validation_trials: usize,
    pub calibration_seed: u64,
    pub validation_seed: u64,
    /// Relative slack on the calibrated constant during validation.
    pub slack: f64,
    /// Relative slack on the factor 4 of the Caccioppoli intermediate bound.
    pub intermediate_slack: f64,
    /// Oracle nodes across `2B`.
    pub cells: usize,
    /// Solver cells per axis for Caccioppoli trials.
    pub solver_cells: usize,
    /// Cap on hill-climbing proposals per trial; 0 keeps the plain random sample.
    pub search_iters: usize,
}

impl MonteCarloConfig {
    pub fn new(geometry: Geometry) -> Self {
        MonteCarloConfig {
            geometry,
            calibration_trials: 500,
            validation_trials: 500,
            calibration_seed: 1,
            validation_seed: 1_000_001,
            slack: 0.01,
            intermediate_slack: 0.05,
            cells: 64,
            solver_cells: 40,
            search_iters: 400,
        }
    }
}

/// Random ball `B((x1, 0), r)` with `2B` clear of `x₁ = 0`.
fn random_ball<R: Rng>(rng: &mut R) -> (f64, f64) {
    let x1 = rng.gen_range(0.1..0.4);
    let e: f64 = rng.gen_range(4.0..6.0);
    (x1, 2f64.powf(-e).min(x1 / 4.6))
}

fn quantile(mut v: Vec<f64>, p: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = ((v.len() - 1) as f64 * p).round() as usize;
    v[k]
}

fn combine(basis: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for (b, &c) in basis.iter().zip(weights) {
        if c != 0.0 {
            out.iter_mut().zip(b).for_each(|(o, v)| *o += c * v);
        }
    }
    out
}

/// Consecutive rejected proposals after which the search is considered converged.
pub const SEARCH_PATIENCE: usize = 50;

/// Random-perturbation hill climb from `theta`, maximising `score`
/// (`None` marks an inadmissible point). Stops after `SEARCH_PATIENCE`
/// consecutive rejections or `iters` proposals, returning the best point.
fn hill_climb<R: Rng>(
    rng: &mut R,
    mut theta: Vec<f64>,
    iters: usize,
    score: &mut dyn FnMut(&[f64]) -> Result<Option<f64>>,
) -> Result<Vec<f64>> {
    let mut best = score(&theta)?.unwrap_or(f64::NEG_INFINITY);
    let mut step = 0.5;
    let mut idle = 0;
    for _ in 0..iters {
        if idle >= SEARCH_PATIENCE {
            break;
        }
        let cand: Vec<f64> = theta.iter().map(|&t| t + rng.gen_range(-step..=step)).collect();
        match score(&cand)? {
            Some(v) if v > best => {
                best = v;
                theta = cand;
                idle = 0;
            }
            _ => {
                step = (step * 0.93f64).max(0.02);
                idle += 1;
            }
        }
    }
    Ok(theta)
}

/// One trial of `kind` for `seed`: a random ball and random piecewise-linear
/// data, followed by a short seeded search over the data towards the extreme
/// implied constant. Caccioppoli returns the standard and the intermediate
/// report, the others a single report.
pub fn run_trial(kind: InequalityKind, cfg: &MonteCarloConfig, seed: u64) -> Result<Vec<InequalityReport>> {
    let g = &cfg.geometry;
    let mut r = rng(seed);
    if kind == InequalityKind::Caccioppoli {
        return caccioppoli_search(g, cfg, seed, &mut r);
    }
    let (x1, rad) = random_ball(&mut r);
    let ball = TrialBall::new(g, x1, rad, cfg.cells)?;
    let lattice = PiecewiseLinear::random_on(&mut r, &ball.grid, 4);
    let basis = lattice.basis(&ball.grid);
    let nn = lattice.nodes().len();
    let mut theta = lattice.nodes().to_vec();
    match kind {
        InequalityKind::Poincare => {
            let mut score = |t: &[f64]| -> Result<Option<f64>> {
                let rep = poincare_trial(&ball.field(combine(&basis, t))?, &ball, seed)?;
                Ok(Some(rep.implied_constant).filter(|c| c.is_finite()))
            };
            let best = hill_climb(&mut r, theta, cfg.search_iters, &mut score)?;
            Ok(vec![poincare_trial(&ball.field(combine(&basis, &best))?, &ball, seed)?])
        }
        InequalityKind::VanishingSobolev => {
            let sign = if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            theta.push(r.gen_range(0.55..0.85));
            let eval = |t: &[f64]| -> Result<InequalityReport> {
                let phi = combine(&basis, &t[..nn]);
                let in_b: Vec<f64> = phi.iter().zip(&ball.b).filter(|(_, &m)| m).map(|(&v, _)| v).collect();
                let q = quantile(in_b, t[nn].clamp(0.5, 0.95));
                let w: Vec<f64> = phi.iter().map(|&v| sign * (v - q).max(0.0)).collect();
                let e: Vec<bool> = w.iter().map(|&v| v == 0.0).collect();
                match vanishing_sobolev_trial(&ball.field(w)?, &ball, &e, seed) {
                    Err(Error::Precondition(_)) => {
                        Ok(InequalityReport::new("vanishing-sobolev", &ball.geometry, x1, rad, seed, f64::NAN, f64::NAN, false))
                    }
                    other => other,
                }
            };
            let mut score = |t: &[f64]| -> Result<Option<f64>> {
                let rep = eval(t)?;
                Ok(Some(rep.implied_constant).filter(|c| rep.applicable && c.is_finite()))
            };
            let best = hill_climb(&mut r, theta, cfg.search_iters, &mut score)?;
            Ok(vec![eval(&best)?])
        }
        InequalityKind::DeGiorgi => {
            theta.push(r.gen_range(0.5..0.8));
            theta.push(r.gen_range(1.0..4.0));
            let eval = |t: &[f64]| -> Result<InequalityReport> {
                let phi = combine(&basis, &t[..nn]);
                let in_b: Vec<f64> = phi.iter().zip(&ball.b).filter(|(_, &m)| m).map(|(&v, _)| v).collect();
                let q = quantile(in_b, t[nn].clamp(0.5, 0.95));
                let top = phi.iter().zip(&ball.b2).filter(|(_, &m)| m).map(|(&v, _)| v).fold(f64::NEG_INFINITY, f64::max);
                let s = t[nn + 1].clamp(1.0, 4.0) / (top - q).max(1e-12);
                let w = ball.field(phi.iter().map(|&v| s * (v - q)).collect())?;
                Ok(degiorgi_check(&degiorgi_sets(&w, &ball)?, &ball.geometry, x1, seed))
            };
            let mut score = |t: &[f64]| -> Result<Option<f64>> {
                let rep = eval(t)?;
                Ok(Some(-rep.implied_constant).filter(|c| rep.applicable && c.is_finite()))
            };
            let best = hill_climb(&mut r, theta, cfg.search_iters, &mut score)?;
            Ok(vec![eval(&best)?])
        }
        InequalityKind::Caccioppoli => unreachable!(),
    }
}

/// Caccioppoli trial on a random rectangle around a random `x₁`. Solutions
/// are linear in the boundary lattice values, so the search combines
/// precomputed basis solutions instead of re-solving.
fn caccioppoli_search<R: Rng>(g: &Geometry, cfg: &MonteCarloConfig, seed: u64, r: &mut R) -> Result<Vec<InequalityReport>> {
    let x1 = r.gen_range(0.15..0.4);
    let a = x1 * r.gen_range(0.2..0.6);
    let b = a * g.f(x1)? * r.gen_range(0.5..2.0);
    let n = cfg.solver_cells;
    let grid = Grid::new(x1 - a, x1 + a, n + 1, -b, b, n + 1)?;
    let m = r.gen_range(1..=4);
    let lattice = PiecewiseLinear::random(r, [grid.a1, grid.a2], [grid.b1(), grid.b2()], m, m);
    let mut weights = Vec::new();
    let mut basis = Vec::new();
    for (k, data) in lattice.basis(&grid).into_iter().enumerate() {
        let touches = (0..grid.len()).any(|idx| {
            let (i, j) = grid.ij(idx);
            grid.is_boundary(i, j) && data[idx] != 0.0
        });
        if touches {
            basis.push(solve(&assemble_values(g, grid, &data)?, SolveOptions::default())?.u.values().to_vec());
            weights.push(lattice.nodes()[k]);
        }
    }
    let f_col = column_profile(g, &grid)?;
    // Cutoff: a pyramid with half-widths `p·a`, `q·b` centred at offsets `c`
    // (as fractions of the remaining room).
    let cutoff = |t: &[f64]| -> Result<DiscreteField> {
        let (sx, sy) = (a * t[0].clamp(0.2, 0.95), b * t[1].clamp(0.2, 0.95));
        let cx = x1 + t[2].clamp(-1.0, 1.0) * (a - sx);
        let cy = t[3].clamp(-1.0, 1.0) * (b - sy);
        let vals = (0..grid.len())
            .map(|k| {
                let (i, j) = grid.ij(k);
                if grid.is_boundary(i, j) {
                    return 0.0;
                }
                let [y1, y2] = grid.point(k);
                (1.0 - ((y1 - cx) / sx).abs().max(((y2 - cy) / sy).abs())).max(0.0)
            })
            .collect();
        DiscreteField::with_profile(grid, f_col.clone(), vals)
    };
    let nb = weights.len();
    weights.push(r.gen_range(-0.5..0.5));
    for _ in 0..2 {
        weights.push(r.gen_range(0.3..0.9));
    }
    for _ in 0..2 {
        weights.push(r.gen_range(-1.0..1.0));
    }
    let id = g.id();
    let eval = |t: &[f64]| -> Result<CaccioppoliReport> {
        let shift = t[nb].clamp(-1.0, 1.0);
        let u = combine(&basis, &t[..nb]).into_iter().map(|v| v - shift).collect();
        let psi = cutoff(&t[nb + 1..])?;
        caccioppoli_trial(&DiscreteField::with_profile(grid, f_col.clone(), u)?, &psi, &id, seed)
    };
    let mut score = |t: &[f64]| -> Result<Option<f64>> {
        let c = eval(t)?.standard.implied_constant;
        Ok(Some(c).filter(|c| c.is_finite()))
    };
    let best = hill_climb(r, weights, cfg.search_iters, &mut score)?;
    let rep = eval(&best)?;
    Ok(vec![rep.standard, rep.intermediate])
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloSummary {
    pub kind: InequalityKind,
    pub geometry: String,
    /// Extreme implied constant over the calibration trials (max, or min for DeGiorgi).
    pub calibrated: f64,
    /// Extreme implied constant over the validation trials.
    pub worst_validation: f64,
    pub violations: usize,
    pub calibration_used: usize,
    pub validation_used: usize,
    /// Worst Caccioppoli intermediate ratio over all trials and its violations of `4(1 + slack)`.
    pub intermediate_worst: Option<f64>,
    pub intermediate_violations: usize,
    pub validation_reports: Vec<InequalityReport>,
}

impl MonteCarloSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.intermediate_violations == 0 && self.calibrated.is_finite()
    }
}

fn batch(kind: InequalityKind, cfg: &MonteCarloConfig, first: u64, n: usize) -> Result<Vec<Vec<InequalityReport>>> {
    (0..n as u64).into_par_iter().map(|i| run_trial(kind, cfg, first + i)).collect()
}

/// Calibrates the constant of `kind` on `calibration_trials` seeds and counts
/// validation trials that beat it by more than the slack.
pub fn monte_carlo(kind: InequalityKind, cfg: &MonteCarloConfig) -> Result<MonteCarloSummary> {
    let cal = batch(kind, cfg, cfg.calibration_seed, cfg.calibration_trials)?;
    let val = batch(kind, cfg, cfg.validation_seed, cfg.validation_trials)?;
    let usable = |rs: &[Vec<InequalityReport>]| -> Vec<f64> {
        rs.iter().map(|t| &t[0]).filter(|r| r.applicable && !r.indeterminate()).map(|r| r.implied_constant).collect()
    };
    let lower = kind.is_lower_bound();
    let extreme = |v: &[f64]| {
        if lower {
            v.iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        }
    };
    let (cv, vv) = (usable(&cal), usable(&val));
    let calibrated = extreme(&cv);
    let violations = vv
        .iter()
        .filter(|&&c| if lower { c < calibrated / (1.0 + cfg.slack) } else { c > calibrated * (1.0 + cfg.slack) })
        .count();
    let (mut intermediate_worst, mut intermediate_violations) = (None, 0);
    if kind == InequalityKind::Caccioppoli {
        let ratios: Vec<f64> = cal.iter().chain(&val).map(|t| t[1].implied_constant).filter(|c| !c.is_nan()).collect();
        intermediate_worst = Some(ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        intermediate_violations = ratios.iter().filter(|&&c| c > 4.0 * (1.0 + cfg.intermediate_slack)).count();
    }
    Ok(MonteCarloSummary {
        kind,
        geometry: cfg.geometry.id(),
        calibrated,
        worst_validation: extreme(&vv),
        violations,
        calibration_used: cv.len(),
        validation_used: vv.len(),
        intermediate_worst,
        intermediate_violations,
        validation_reports: val.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball() -> TrialBall {
        TrialBall::new(&Geometry::power_log(3, 0.5).unwrap(), 0.25, 0.03, 64).unwrap()
    }

    #[test]
    fn constant_field_has_zero_poincare_lhs() {
        let b = ball();
        let w = b.field(vec![3.0; b.grid.len()]).unwrap();
        let rep = poincare_trial(&w, &b, 0).unwrap();
        assert!(rep.lhs.abs() < 1e-15, "{}", rep.lhs);
        assert_eq!(rep.rhs, 0.0);
    }

    #[test]
    fn poincare_is_homogeneous() {
        let b = ball();
        let phi = PiecewiseLinear::random_on(&mut rng(5), &b.grid, 3).sample(&b.grid);
        let w = b.field(phi.clone()).unwrap();
        let w3 = b.field(phi.iter().map(|v| 3.0 * v).collect()).unwrap();
        let (r1, r3) = (poincare_trial(&w, &b, 0).unwrap(), poincare_trial(&w3, &b, 0).unwrap());
        assert!((r3.lhs / r1.lhs - 3.0).abs() < 1e-12);
        assert!((r3.rhs / r1.rhs - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_requires_half_measure() {
        let b = ball();
        let w = b.field(vec![1.0; b.grid.len()]).unwrap();
        let e = vec![false; b.grid.len()];
        assert!(matches!(vanishing_sobolev_trial(&w, &b, &e, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn degiorgi_trivial_fields() {
        let b = ball();
        let zero = degiorgi_sets(&b.field(vec![0.0; b.grid.len()]).unwrap(), &b).unwrap();
        assert_eq!((zero.c, zero.d), (0.0, 0.0));
        assert!(zero.applicable());
        let two = degiorgi_sets(&b.field(vec![2.0; b.grid.len()]).unwrap(), &b).unwrap();
        assert_eq!(two.a, 0.0);
        assert!(!two.applicable());
    }

    #[test]
    fn caccioppoli_rejects_non_solutions() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let gr = Grid::new(0.2, 0.3, 11, -0.05, 0.05, 11).unwrap();
        let u = DiscreteField::from_fn(&g, gr, |x1, x2| x1 * x1 + x2).unwrap();
        let psi = u.map(|_| 0.0);
        assert!(matches!(caccioppoli_trial(&u, &psi, "g", 0), Err(Error::Precondition(_))));
    }
}
