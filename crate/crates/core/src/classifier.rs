//! Continuity classification through the summability of the per-scale
//! oscillation gains `λ_j = 2^{-(3 + C₃/δ(r_j)²)}` on `r_j = r₀/4^j`.
//!
//! Everything is carried in log space. The tail of a sequence is probed at
//! `y = ln ln j`, which reaches indices far beyond anything an `f64` can
//! hold; the diagnostic exponent is `L = ln(1/λ_j)/ln j`.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Scale};

/// Tunable constants of the local-boundedness profile and the gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub n: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { c1: 1.0, c2: 1.0, c3: 1.0, n: 1.0 }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::Config(format!("C1 = {} must be positive", self.c1)));
        }
        if !(self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::Config(format!("C2 = {} must be nonnegative", self.c2)));
        }
        if !(self.c3 > 0.0 && self.c3.is_finite()) {
            return Err(Error::Config(format!("C3 = {} must be positive", self.c3)));
        }
        if !(self.n >= 1.0 && self.n.is_finite()) {
            return Err(Error::Config(format!("N = {} must be at least 1", self.n)));
        }
        Ok(())
    }
}

/// The growth map `G` entering `A_N(r) = C₁ exp(C₂ G(r)^{1/N})`.
#[derive(Debug, Clone)]
pub enum Growth {
    /// `G(r) = F(r)/ln(1/r)`.
    Geometry(Geometry),
    /// `G ≡ value`, giving a scale-independent `δ`.
    Constant(f64),
}

impl Growth {
    pub fn describe(&self) -> String {
        match self {
            Growth::Geometry(g) => format!("F(r)/ln(1/r) for {g}"),
            Growth::Constant(v) => format!("constant {v}"),
        }
    }

    /// `ln G` at a scale; `None` if the scale is out of reach for the profile.
    pub fn ln_g(&self, s: &Scale) -> Option<f64> {
        match self {
            Growth::Geometry(g) => g.ln_growth(s),
            Growth::Constant(v) => Some(v.ln()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeltaProfile {
    pub constants: Constants,
    pub growth: Growth,
}

impl DeltaProfile {
    pub fn new(constants: Constants, growth: Growth) -> Result<Self> {
        constants.validate()?;
        if let Growth::Constant(v) = growth {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("constant growth {v} must be nonnegative")));
            }
        }
        Ok(DeltaProfile { constants, growth })
    }

    pub fn of_geometry(g: &Geometry) -> Self {
        DeltaProfile { constants: Constants::default(), growth: Growth::Geometry(g.clone()) }
    }

    /// `ln A_N` at the scale `s`.
    pub fn ln_a_n(&self, s: &Scale) -> Result<f64> {
        let c = &self.constants;
        let ln_g = self
            .growth
            .ln_g(s)
            .ok_or_else(|| Error::Domain(format!("growth map undefined at ln(1/r) = {}", s.l1)))?;
        if ln_g.is_nan() {
            return Err(Error::Domain(format!("growth map undefined at ln(1/r) = {}", s.l1)));
        }
        let term = if c.c2 == 0.0 { 0.0 } else { c.c2 * (ln_g / c.n).exp() };
        Ok(c.c1.ln() + term)
    }

    /// `ln δ` where `s` is the scale of `3r`.
    pub fn ln_delta_at(&self, s: &Scale) -> Result<f64> {
        Ok(-(4f64).ln() - 2.0 * self.ln_a_n(s)?)
    }

    /// `ln ln(1/λ)` where `s` is the scale of `3r`.
    pub fn ln_ln_inv_lambda_at(&self, s: &Scale) -> Result<f64> {
        let ln_delta = self.ln_delta_at(s)?;
        Ok(ln_ln_inv_lambda(ln_delta, self.constants.c3))
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let limit = match &self.growth {
            Growth::Geometry(g) => g.r_end().min(1.0),
            Growth::Constant(_) => 1.0,
        };
        if !(r > 0.0 && 3.0 * r < limit) {
            return Err(Error::Domain(format!("need 0 < 3r < {limit}, got r = {r}")));
        }
        Ok(())
    }
}

/// `δ(r) = (2 A_N(3r))^{-2}`.
pub fn delta(profile: &DeltaProfile, r: f64) -> Result<f64> {
    profile.check_radius(r)?;
    Ok(profile.ln_delta_at(&Scale::from_radius(3.0 * r))?.exp())
}

/// `ln λ = -(3 + C₃ δ^{-2}) ln 2`, finite as long as `ln δ` is.
pub fn ln_lambda(ln_delta: f64, c3: f64) -> f64 {
    -(3.0 + c3 * (-2.0 * ln_delta).exp()) * LN_2
}

/// `ln ln(1/λ)`, which stays finite even when `ln λ` overflows.
pub fn ln_ln_inv_lambda(ln_delta: f64, c3: f64) -> f64 {
    LN_2.ln() + log_add_exp(3f64.ln(), c3.ln() - 2.0 * ln_delta)
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaRow {
    pub j: u64,
    pub ln_r_j: f64,
    /// `r_j`, or 0 once it underflows (see `ln_r_j`).
    pub r_j: f64,
    pub ln_delta: f64,
    pub ln_lambda: f64,
    /// Log of the partial sum `S_j = Σ_{i ≤ j} λ_i`.
    pub ln_partial_sum: f64,
}

/// The first `count` terms, with `ln λ_j` kept alongside so nothing underflows.
pub fn lambda_sequence(profile: &DeltaProfile, r0: f64, count: usize) -> Result<Vec<LambdaRow>> {
    profile.check_radius(r0 / 4.0)?;
    let ln4 = 4f64.ln();
    let c = (3.0 * r0).ln();
    let mut rows = Vec::with_capacity(count);
    let mut ln_s = f64::NEG_INFINITY;
    for j in 1..=count as u64 {
        let l1 = j as f64 * ln4 - c;
        let ln_delta = profile.ln_delta_at(&Scale::from_log(l1))?;
        let ln_lambda = ln_lambda(ln_delta, profile.constants.c3);
        ln_s = log_add_exp(ln_s, ln_lambda);
        let ln_r_j = r0.ln() - j as f64 * ln4;
        rows.push(LambdaRow { j, ln_r_j, r_j: ln_r_j.exp(), ln_delta, ln_lambda, ln_partial_sum: ln_s });
    }
    Ok(rows)
}

/// Explicit sequences for exercising the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Sequence {
    /// `1/j`.
    Harmonic,
    /// `2^{-j}`.
    Geometric,
    /// `j^{-p}`.
    Power { p: f64 },
    /// `1/(j (ln j)^p)`.
    Bertrand { p: f64 },
    /// `λ_j ≡ lambda`.
    Constant { lambda: f64 },
}

impl Sequence {
    /// `ln ln(1/λ_j)` at `y = ln ln j`.
    pub fn ln_ln_inv_lambda(&self, y: f64) -> f64 {
        match *self {
            Sequence::Harmonic => y,
            Sequence::Geometric => y.exp() + LN_2.ln(),
            Sequence::Power { p } => p.ln() + y,
            Sequence::Bertrand { p } => {
                if p >= 0.0 {
                    y + (p * y * (-y).exp()).ln_1p()
                } else {
                    log_sub(y, (-p).ln() + y.ln())
                }
            }
            Sequence::Constant { lambda } => (-lambda.ln()).ln(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Sequence::Power { p } if !(p > 0.0) => Err(Error::Config(format!("power exponent {p} must be positive"))),
            Sequence::Constant { lambda } if !(lambda > 0.0 && lambda < 1.0) => {
                Err(Error::Config(format!("constant λ = {lambda} must lie in (0, 1)")))
            }
            Sequence::Bertrand { p } if !p.is_finite() => Err(Error::Config("Bertrand exponent must be finite".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Harmonic => write!(f, "1/j"),
            Sequence::Geometric => write!(f, "2^-j"),
            Sequence::Power { p } => write!(f, "j^-{p}"),
            Sequence::Bertrand { p } => write!(f, "1/(j ln^{p} j)"),
            Sequence::Constant { lambda } => write!(f, "{lambda}"),
        }
    }
}

impl std::str::FromStr for Sequence {
    type Err = Error;

    /// Parses `harmonic`, `geometric`, `power:p`, `bertrand:p` or `constant:λ`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.trim().split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s.trim(), None),
        };
        let num = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Config(format!("sequence {s:?} needs a parameter")))?;
            a.trim().parse().map_err(|e| Error::Config(format!("bad number {a:?}: {e}")))
        };
        let seq = match head {
            "harmonic" if arg.is_none() => Sequence::Harmonic,
            "geometric" if arg.is_none() => Sequence::Geometric,
            "power" => Sequence::Power { p: num()? },
            "bertrand" => Sequence::Bertrand { p: num()? },
            "constant" => Sequence::Constant { lambda: num()? },
            _ => return Err(Error::Config(format!("unknown sequence {s:?}"))),
        };
        seq.validate()?;
        Ok(seq)
    }
}

/// `ln(e^a - e^b)` for `a > b`.
fn log_sub(a: f64, b: f64) -> f64 {
    a + (-(b - a).exp()).ln_1p()
}

/// Where the tail of the sequence is inspected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Tail {
    /// Indices `j ∈ [J/2, J]`.
    Index { j_max: f64 },
    /// `ln ln j ∈ [Y/2, Y]`, for growth that only separates at huge `j`.
    LogLog { y_max: f64 },
}

impl Tail {
    pub const DEFAULT_INDEX: Tail = Tail::Index { j_max: 1e6 };
    pub const DEFAULT_LOGLOG: Tail = Tail::LogLog { y_max: 1e12 };

    /// The window in `y = ln ln j`.
    pub fn window(&self) -> Result<[f64; 2]> {
        match *self {
            Tail::Index { j_max } if j_max >= 32.0 && j_max.is_finite() => {
                Ok([(0.5 * j_max).ln().ln(), j_max.ln().ln()])
            }
            Tail::LogLog { y_max } if y_max > 2.0 && y_max.is_finite() => Ok([0.5 * y_max, y_max]),
            _ => Err(Error::Config(format!("tail {self:?} is too short to classify"))),
        }
    }

    pub fn doubled(&self) -> Tail {
        match *self {
            Tail::Index { j_max } => Tail::Index { j_max: 2.0 * j_max },
            Tail::LogLog { y_max } => Tail::LogLog { y_max: 2.0 * y_max },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    /// `Σλ_j = ∞`: continuity predicted.
    Divergent,
    /// `Σλ_j < ∞`: the criterion gives no continuity.
    Convergent,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Divergent => "divergent",
            VerdictKind::Convergent => "convergent",
            VerdictKind::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    /// 0 if decided by `L`, 1 if by `L₁ = (ln(1/λ) - ln j)/ln ln j`.
    pub order: u8,
    pub window: [f64; 2],
    pub l_min: f64,
    pub l_max: f64,
    /// Least-squares slope of `ln L` against `y` over the window.
    pub l_trend: f64,
    pub l1_min: Option<f64>,
    pub l1_max: Option<f64>,
    /// Least-squares slope of `L₁` against `y` over the window.
    pub l1_trend: Option<f64>,
}

/// Samples per tail window.
const TAIL_SAMPLES: usize = 65;

/// Verdict for a sequence given as `y ↦ ln ln(1/λ)` with `y = ln ln j`.
///
/// Order 0 compares `L` with 1 up to `margin`, provided `L` is not moving
/// back towards 1 across the window. Otherwise the order-1 exponent `L₁`
/// decides, and a divergent call there also needs `L₁` not to rise, since a
/// rising `L₁` means `L` drifts above 1.
pub fn summability_verdict(model: &dyn Fn(f64) -> Result<f64>, tail: Tail, margin: f64) -> Result<Verdict> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::Config(format!("margin {margin} must lie in (0, 1)")));
    }
    let window = tail.window()?;
    let ys: Vec<f64> =
        (0..TAIL_SAMPLES).map(|i| window[0] + (window[1] - window[0]) * i as f64 / (TAIL_SAMPLES - 1) as f64).collect();
    let lnln: Vec<f64> = ys.iter().map(|&y| model(y)).collect::<Result<_>>()?;
    if let Some(k) = lnln.iter().position(|v| v.is_nan()) {
        return Err(Error::Domain(format!("ln ln(1/λ) is undefined at ln ln j = {}", ys[k])));
    }
    let ls: Vec<f64> = ys.iter().zip(&lnln).map(|(y, v)| (v - y).exp()).collect();
    let l_min = ls.iter().copied().fold(f64::INFINITY, f64::min);
    let l_max = ls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_l: Vec<f64> = ys.iter().zip(&lnln).map(|(y, v)| v - y).collect();
    let l_trend = finite_slope(&ys, &ln_l);
    let mut v = Verdict {
        verdict: VerdictKind::Inconclusive,
        order: 0,
        window,
        l_min,
        l_max,
        l_trend,
        l1_min: None,
        l1_max: None,
        l1_trend: None,
    };
    // An order-0 call stands only if L is not drifting back towards 1.
    let flat = 1e-9 * ln_l.iter().filter(|v| v.is_finite()).fold(1.0f64, |m, v| m.max(v.abs()));
    let drift = l_trend * (window[1] - window[0]);
    if l_max <= 1.0 - margin && drift <= flat {
        v.verdict = VerdictKind::Divergent;
        return Ok(v);
    }
    if l_min >= 1.0 + margin && drift >= -flat {
        v.verdict = VerdictKind::Convergent;
        return Ok(v);
    }
    // L₁ = e^y (L - 1) / y, assembled in logs so large y stays finite.
    let l1: Vec<f64> = ys
        .iter()
        .zip(&lnln)
        .map(|(&y, &w)| {
            let d = (w - y).exp_m1();
            if d == 0.0 {
                0.0
            } else {
                d.signum() * (y + d.abs().ln() - y.ln()).exp()
            }
        })
        .collect();
    let l1_min = l1.iter().copied().fold(f64::INFINITY, f64::min);
    let l1_max = l1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let trend = finite_slope(&ys, &l1);
    v.order = 1;
    v.l1_min = Some(l1_min);
    v.l1_max = Some(l1_max);
    v.l1_trend = Some(trend);
    let scale = l1_max.abs().max(1.0);
    if l1_max <= 1.0 - margin && trend * (window[1] - window[0]) <= 1e-9 * scale {
        v.verdict = VerdictKind::Divergent;
    } else if l1_min >= 1.0 + margin {
        v.verdict = VerdictKind::Convergent;
    }
    Ok(v)
}

/// Slope over the finite samples; 0 when fewer than two are finite.
fn finite_slope(x: &[f64], y: &[f64]) -> f64 {
    let (fx, fy): (Vec<f64>, Vec<f64>) = x.iter().zip(y).filter(|(_, b)| b.is_finite()).map(|(a, b)| (*a, *b)).unzip();
    if fx.len() < 2 {
        0.0
    } else {
        slope(&fx, &fy)
    }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Verdict at `tail` and at the doubled tail; disagreement is inconclusive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StableVerdict {
    pub verdict: VerdictKind,
    pub tail: Tail,
    pub primary: Verdict,
    pub doubled: Verdict,
    pub stable: bool,
}

pub fn stable_verdict(model: &dyn Fn(f64) -> Result<f64>, tail: Tail, margin: f64) -> Result<StableVerdict> {
    let primary = summability_verdict(model, tail, margin)?;
    let doubled = summability_verdict(model, tail.doubled(), margin)?;
    let stable = primary.verdict == doubled.verdict;
    let verdict = if stable { primary.verdict } else { VerdictKind::Inconclusive };
    Ok(StableVerdict { verdict, tail, primary, doubled, stable })
}

pub fn classify_sequence(seq: Sequence, tail: Tail, margin: f64) -> Result<StableVerdict> {
    seq.validate()?;
    stable_verdict(&|y| Ok(seq.ln_ln_inv_lambda(y)), tail, margin)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub constants: Constants,
    pub r0: f64,
    pub tail: Tail,
    pub margin: f64,
    /// Rows of the explicit `λ_j` table in the report.
    pub table_rows: usize,
    /// Replaces the geometric growth map with a constant.
    pub constant_growth: Option<f64>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            constants: Constants::default(),
            r0: 0.25,
            tail: Tail::DEFAULT_LOGLOG,
            margin: 0.05,
            table_rows: 32,
            constant_growth: None,
        }
    }
}

/// Whether `F ≤ F_{3,σ}` (literal iterated logs) on the sampled scales, and
/// the smallest such `σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domination {
    /// `None` when no finite `σ` dominates on the samples.
    pub sigma_min: Option<f64>,
    pub samples: usize,
    /// `sigma_min < 1`.
    pub hypothesis_holds: bool,
}

/// `σ ≥ ln G / ln ℓ₃` at every sample with `ln(1/r)` from `10³` up to far
/// beyond `f64` range.
pub fn domination(g: &Geometry) -> Domination {
    let mut scales: Vec<Scale> = (0..=60).map(|i| Scale::from_log(10f64.powf(3.0 + 5.0 * i as f64))).collect();
    scales.retain(|s| s.l1.is_finite());
    // Beyond f64: ln ln(1/r) from 700 up to 1e12.
    scales.extend((0..=40).map(|i| {
        let l2 = 700.0 * (1e12f64 / 700.0).powf(i as f64 / 40.0);
        Scale { l1: f64::INFINITY, l2, l3: l2.ln() }
    }));
    let mut sigma: f64 = f64::NEG_INFINITY;
    for s in &scales {
        let ln_ell3 = s.l3.ln();
        match g.ln_growth(s) {
            Some(lg) if lg.is_finite() || lg == f64::NEG_INFINITY => sigma = sigma.max(lg / ln_ell3),
            _ => {
                sigma = f64::INFINITY;
                break;
            }
        }
    }
    let sigma_min = if sigma.is_finite() { Some(sigma.max(0.0)) } else if sigma < 0.0 { Some(0.0) } else { None };
    Domination { sigma_min, samples: scales.len(), hypothesis_holds: sigma_min.is_some_and(|s| s < 1.0) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub geometry: String,
    pub constants: Constants,
    pub growth: String,
    pub r0: f64,
    pub margin: f64,
    pub rows: Vec<LambdaRow>,
    pub verdict: VerdictKind,
    pub continuity_predicted: bool,
    pub detail: StableVerdict,
    pub domination: Domination,
}

pub fn classify(g: &Geometry, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    let growth = match cfg.constant_growth {
        Some(v) => Growth::Constant(v),
        None => Growth::Geometry(g.clone()),
    };
    let profile = DeltaProfile::new(cfg.constants, growth)?;
    let rows = lambda_sequence(&profile, cfg.r0, cfg.table_rows)?;
    let r0 = cfg.r0;
    let model = |y: f64| profile.ln_ln_inv_lambda_at(&Scale::of_dyadic_index(r0, y));
    let detail = stable_verdict(&model, cfg.tail, cfg.margin)?;
    Ok(ClassificationReport {
        geometry: g.id(),
        constants: cfg.constants,
        growth: profile.growth.describe(),
        r0,
        margin: cfg.margin,
        rows,
        verdict: detail.verdict,
        continuity_predicted: detail.verdict == VerdictKind::Divergent,
        detail,
        domination: domination(g),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(g: Geometry) -> DeltaProfile {
        DeltaProfile::of_geometry(&g)
    }

    #[test]
    fn delta_of_flat_profile_is_a_quarter() {
        let p = DeltaProfile::new(Constants { c2: 0.0, ..Default::default() }, Growth::Constant(5.0)).unwrap();
        for r in [1e-3, 0.01, 0.2] {
            assert!((delta(&p, r).unwrap() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_with_growth_two() {
        let p = DeltaProfile::new(Constants::default(), Growth::Constant(2.0)).unwrap();
        let want = (2.0 * 2f64.exp()).powi(-2);
        assert!((delta(&p, 0.01).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn unit_delta_gives_one_sixteenth() {
        // ln δ = 0 with C₃ = 1.
        assert!((ln_lambda(0.0, 1.0).exp() - 0.0625).abs() < 1e-16);
        assert!((ln_ln_inv_lambda(0.0, 1.0) - (4.0 * LN_2).ln()).abs() < 1e-15);
    }

    #[test]
    fn log_forms_agree() {
        for ld in [-0.5, -2.0, -7.3] {
            let a = ln_lambda(ld, 1.7);
            assert!(((-a).ln() - ln_ln_inv_lambda(ld, 1.7)).abs() < 1e-13);
        }
    }

    #[test]
    fn partial_sums_increase_and_terms_are_small() {
        let rows = lambda_sequence(&profile(Geometry::power_log(3, 0.9).unwrap()), 0.25, 40).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].ln_partial_sum >= w[0].ln_partial_sum);
        }
        assert!(rows.iter().all(|r| r.ln_lambda <= -3.0 * LN_2));
    }

    #[test]
    fn pure_sequences() {
        let v = |s| classify_sequence(s, Tail::DEFAULT_INDEX, 0.05).unwrap().verdict;
        assert_eq!(v(Sequence::Harmonic), VerdictKind::Divergent);
        assert_eq!(v(Sequence::Geometric), VerdictKind::Convergent);
        assert_eq!(v(Sequence::Bertrand { p: 2.0 }), VerdictKind::Convergent);
        assert_eq!(v(Sequence::Bertrand { p: 0.5 }), VerdictKind::Divergent);
        assert_eq!(v(Sequence::Constant { lambda: 0.0625 }), VerdictKind::Divergent);
        assert_eq!(v(Sequence::Power { p: 0.5 }), VerdictKind::Divergent);
        assert_eq!(v(Sequence::Power { p: 2.0 }), VerdictKind::Convergent);
        assert_eq!(v(Sequence::Power { p: 1.02 }), VerdictKind::Inconclusive);
    }

    #[test]
    fn geometry_dichotomy() {
        let c = ClassifyConfig::default();
        let v = |g: Geometry| classify(&g, &c).unwrap().verdict;
        assert_eq!(v(Geometry::power_log(3, 0.9).unwrap()), VerdictKind::Divergent);
        assert_eq!(v(Geometry::power_log(3, 1.2).unwrap()), VerdictKind::Convergent);
        assert_eq!(v(Geometry::power_log(0, 1.5).unwrap()), VerdictKind::Convergent);
        assert_eq!(v(Geometry::inverse_power(1.0).unwrap()), VerdictKind::Convergent);
        assert_eq!(v(Geometry::finite_type(2.0).unwrap()), VerdictKind::Divergent);
    }

    #[test]
    fn domination_sigma() {
        let d = domination(&Geometry::power_log(3, 0.9).unwrap());
        let s = d.sigma_min.unwrap();
        assert!((0.9..0.91).contains(&s), "{s}");
        assert!(d.hypothesis_holds);
        assert_eq!(domination(&Geometry::inverse_power(1.0).unwrap()).sigma_min, None);
        assert!(!domination(&Geometry::power_log(0, 1.5).unwrap()).hypothesis_holds);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(Constants { n: 0.5, ..Default::default() }.validate().is_err());
        assert!(Constants { c1: 0.0, ..Default::default() }.validate().is_err());
        assert!(lambda_sequence(&profile(Geometry::power_log(3, 0.9).unwrap()), 2.0, 3).is_err());
    }
}
