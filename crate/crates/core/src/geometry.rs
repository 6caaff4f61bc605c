//! Degeneracy profiles `F = -ln f` and the structure-condition audit.
//!
//! Built-in families are evaluated in the log coordinate `L = ln(1/x)`, which
//! keeps the iterated logarithms accurate and lets the audit probe scales far
//! below the smallest representable `x`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// `E_k = exp^{(k)}(1)`: 1, e, e^e, e^{e^e}.
pub const TOWER: [f64; 4] = [1.0, std::f64::consts::E, 15.154_262_241_479_262, 3_814_279.104_760_220_6];

/// Largest `k` for which the anchored power-log family is available.
pub const MAX_ANCHORED_K: u32 = 4;

/// A user-supplied profile with its own derivative evaluators.
pub trait Profile: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    /// Returns `(F, F', F'')` at `x`.
    fn eval(&self, x: f64) -> Result<(f64, f64, f64)>;
}

#[derive(Clone, Debug)]
pub enum Family {
    /// `F = α ln(1/x)`, i.e. `f = x^α`.
    FiniteType { alpha: f64 },
    /// `F = ln(1/x) · (ℓ_k)^σ`. The anchored variant uses
    /// `ℓ_k = ln^{(k)}(E_k / x)`, which is at least 1 on `(0, 1]`; the literal
    /// variant uses `ℓ_k = ln^{(k)}(1/x)` and lives on `(0, 1/E_{k-1})`.
    PowerLog { k: u32, sigma: f64, anchored: bool },
    /// `F = x^{-σ}`.
    InversePower { sigma: f64 },
    /// `F ≡ c`; not a valid geometry (fails condition 1) but useful as a
    /// reference and for the elliptic case `f ≡ 1`.
    Constant { value: f64 },
    Custom(Arc<dyn Profile>),
}

/// Values of the profile at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eval {
    pub big_f: f64,
    pub d1: f64,
    pub d2: f64,
    pub f: f64,
}

#[derive(Clone, Debug)]
pub struct Geometry {
    family: Family,
    r_end: f64,
}

/// Iterated logarithm `ln^{(k)} x`; `k = 0` is the identity.
pub fn iterated_log(k: u32, x: f64) -> Result<f64> {
    let mut v = x;
    for i in 0..k {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("ln^({i}) of {x} is not positive")));
        }
        v = Jet::constant(v).ln().v;
    }
    Ok(v)
}

/// The three leading log scales `ln(1/r)`, `ln ln(1/r)`, `ln ln ln(1/r)`.
///
/// Any of them may be `+inf` when the scale is only known through a deeper
/// logarithm; the deepest entry is always accurate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl Scale {
    pub fn from_radius(r: f64) -> Self {
        let l1 = -r.ln();
        let l2 = l1.ln();
        Scale { l1, l2, l3: l2.ln() }
    }

    pub fn from_log(l1: f64) -> Self {
        let l2 = l1.ln();
        Scale { l1, l2, l3: l2.ln() }
    }

    /// Scale of `3 r_j` with `r_j = r0 / 4^j`, where the index is given by
    /// `y = ln ln j` so that astronomically large `j` can be represented.
    pub fn of_dyadic_index(r0: f64, y: f64) -> Self {
        let ln4 = 4f64.ln();
        let lnj = y.exp();
        let c = (3.0 * r0).ln();
        if lnj < 700.0 {
            let j = lnj.exp();
            return Scale::from_log(j * ln4 - c);
        }
        let lnln4 = ln4.ln();
        let l2 = lnj + lnln4;
        let l3 = y + (lnln4 * (-y).exp()).ln_1p();
        Scale { l1: f64::INFINITY, l2, l3 }
    }
}

impl Geometry {
    pub fn new(family: Family, r_end: f64) -> Result<Self> {
        if !(r_end > 0.0) {
            return Err(Error::Config(format!("domain endpoint R = {r_end} must be positive")));
        }
        match &family {
            Family::FiniteType { alpha } if !(*alpha > 0.0) => {
                return Err(Error::Config(format!("finite type exponent {alpha} must be positive")))
            }
            Family::InversePower { sigma } if !(*sigma > 0.0) => {
                return Err(Error::Config(format!("D_sigma exponent {sigma} must be positive")))
            }
            Family::PowerLog { k, sigma, anchored } => {
                if !(*sigma >= 0.0) {
                    return Err(Error::Config(format!("sigma = {sigma} must be nonnegative")));
                }
                if *anchored && *k > MAX_ANCHORED_K {
                    return Err(Error::Config(format!(
                        "anchored F_(k,sigma) supports k <= {MAX_ANCHORED_K}, got {k}"
                    )));
                }
            }
            Family::Constant { value } if !value.is_finite() => {
                return Err(Error::Config("constant profile must be finite".into()))
            }
            _ => {}
        }
        Ok(Geometry { family, r_end })
    }

    pub fn finite_type(alpha: f64) -> Result<Self> {
        Self::new(Family::FiniteType { alpha }, 1.0)
    }

    /// Anchored `F_{k,σ}` on `(0, 1)`.
    pub fn power_log(k: u32, sigma: f64) -> Result<Self> {
        Self::new(Family::PowerLog { k, sigma, anchored: true }, 1.0)
    }

    /// Literal `F_{k,σ}` on `(0, 1/E_{k-1})`.
    pub fn power_log_literal(k: u32, sigma: f64) -> Result<Self> {
        let r_end = if k == 0 {
            1.0
        } else {
            let e = exp_tower(k - 1).ok_or_else(|| Error::Config(format!("k = {k} too large")))?;
            1.0 / e
        };
        Self::new(Family::PowerLog { k, sigma, anchored: false }, r_end)
    }

    pub fn inverse_power(sigma: f64) -> Result<Self> {
        Self::new(Family::InversePower { sigma }, 1.0)
    }

    /// `F ≡ value`, so `f ≡ exp(-value)`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(Family::Constant { value }, 1.0)
    }

    pub fn custom(profile: Arc<dyn Profile>, r_end: f64) -> Result<Self> {
        Self::new(Family::Custom(profile), r_end)
    }

    pub fn with_domain(mut self, r_end: f64) -> Result<Self> {
        if !(r_end > 0.0) {
            return Err(Error::Config(format!("domain endpoint R = {r_end} must be positive")));
        }
        self.r_end = r_end;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn r_end(&self) -> f64 {
        self.r_end
    }

    /// Short identifier, also accepted by `FromStr`.
    pub fn id(&self) -> String {
        match &self.family {
            Family::FiniteType { alpha } => format!("finite:{alpha}"),
            Family::PowerLog { k, sigma, anchored: true } => format!("Fks:{k},{sigma}"),
            Family::PowerLog { k, sigma, anchored: false } => format!("Fks-literal:{k},{sigma}"),
            Family::InversePower { sigma } => format!("Dsigma:{sigma}"),
            Family::Constant { value } => {
                if *value == 0.0 {
                    "constant".to_string()
                } else {
                    format!("constant:{value}")
                }
            }
            Family::Custom(p) => format!("custom:{}", p.name()),
        }
    }

    /// `F` as a jet in `L = ln(1/x)`.
    pub fn eval_log(&self, l: f64) -> Result<Jet> {
        let t = Jet::variable(l);
        match &self.family {
            Family::FiniteType { alpha } => Ok(t.scale(*alpha)),
            Family::InversePower { sigma } => Ok(t.scale(*sigma).exp()),
            Family::Constant { value } => Ok(Jet::constant(*value)),
            Family::PowerLog { k, sigma, anchored } => {
                if *k == 0 {
                    return Ok(t * t.scale(*sigma).exp());
                }
                let mut ell = if *anchored { t + TOWER[(*k - 1) as usize] } else { t };
                for i in 1..*k {
                    if !(ell.v > 0.0) {
                        return Err(Error::Domain(format!(
                            "iterated log ln^({i})(1/x) is not positive at ln(1/x) = {l}"
                        )));
                    }
                    ell = ell.ln();
                }
                if !(ell.v > 0.0) {
                    return Err(Error::Domain(format!(
                        "iterated log ln^({k})(1/x) is not positive at ln(1/x) = {l}"
                    )));
                }
                Ok(t * ell.powf(*sigma))
            }
            Family::Custom(_) => {
                let x = (-l).exp();
                let e = self.eval(x)?;
                // dF/dL = -x F', d²F/dL² = x F' + x² F''
                Ok(Jet::new(e.big_f, -x * e.d1, x * e.d1 + x * x * e.d2))
            }
        }
    }

    pub fn eval(&self, x: f64) -> Result<Eval> {
        if !(x > 0.0 && x < self.r_end) {
            return Err(Error::Domain(format!("x = {x} outside (0, {})", self.r_end)));
        }
        let (big_f, d1, d2) = match &self.family {
            Family::Custom(p) => p.eval(x)?,
            _ => {
                let j = self.eval_log(-x.ln())?;
                (j.v, -j.d1 / x, (j.d2 + j.d1) / (x * x))
            }
        };
        Ok(Eval { big_f, d1, d2, f: (-big_f).exp() })
    }

    pub fn big_f(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.big_f)
    }

    /// `f = exp(-F)`.
    pub fn f(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.f)
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.d1)
    }

    /// `ln G` at the given scale, where `G = F(r) / ln(1/r)` is the growth map
    /// used by the classifier. Returns `None` when the scale cannot be
    /// represented for this profile.
    pub fn ln_growth(&self, s: &Scale) -> Option<f64> {
        match &self.family {
            Family::FiniteType { alpha } => Some(alpha.ln()),
            // e^{σL} outruns L, so an infinite L gives an infinite G.
            Family::InversePower { .. } if s.l1.is_infinite() => Some(f64::INFINITY),
            Family::InversePower { sigma } => Some(sigma * s.l1 - s.l2),
            Family::Constant { value } => Some(value.ln() - s.l2),
            Family::PowerLog { k, sigma, anchored } => {
                let ln_ell = ln_iterated_scale(*k, *anchored, s)?;
                Some(sigma * ln_ell)
            }
            Family::Custom(_) => {
                if s.l1.is_finite() && s.l1 < 700.0 {
                    let j = self.eval_log(s.l1).ok()?;
                    Some(j.v.ln() - s.l2)
                } else {
                    None
                }
            }
        }
    }
}

/// `exp^{(k)}(1)` when it fits in an `f64`.
fn exp_tower(k: u32) -> Option<f64> {
    TOWER.get(k as usize).copied()
}

/// `ln ℓ_k` at a scale, for the power-log family.
fn ln_iterated_scale(k: u32, anchored: bool, s: &Scale) -> Option<f64> {
    if k == 0 {
        return Some(s.l1);
    }
    let shift = if anchored { TOWER[(k - 1) as usize] } else { 0.0 };
    if s.l1.is_finite() {
        let ell = iterated_log(k - 1, s.l1 + shift).ok()?;
        return if ell > 0.0 { Some(ell.ln()) } else { None };
    }
    // ℓ_1 is infinite; the additive anchor is negligible beyond the first log.
    let deep = match k {
        1 => s.l2,
        2 => s.l3,
        _ => iterated_log(k - 3, s.l3).ok()?,
    };
    if k >= 3 {
        if deep > 0.0 {
            Some(deep.ln())
        } else {
            None
        }
    } else {
        Some(deep)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    /// Parses `Fks:k,σ`, `Fks-literal:k,σ`, `Dsigma:σ`, `finite:α`,
    /// `constant` or `constant:c`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), a.trim()),
            None => (s.trim(), ""),
        };
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| a.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number {a:?}: {e}"))))
                .collect()
        };
        let want = |v: &[f64], n: usize| -> Result<()> {
            if v.len() != n {
                Err(Error::Config(format!("geometry {s:?} expects {n} parameter(s)")))
            } else {
                Ok(())
            }
        };
        match name {
            "Fks" | "Fks-literal" => {
                let v = nums()?;
                want(&v, 2)?;
                if v[0] < 0.0 || v[0].fract() != 0.0 {
                    return Err(Error::Config(format!("k = {} must be a nonnegative integer", v[0])));
                }
                if name == "Fks" {
                    Geometry::power_log(v[0] as u32, v[1])
                } else {
                    Geometry::power_log_literal(v[0] as u32, v[1])
                }
            }
            "Dsigma" => {
                let v = nums()?;
                want(&v, 1)?;
                Geometry::inverse_power(v[0])
            }
            "finite" => {
                let v = nums()?;
                want(&v, 1)?;
                Geometry::finite_type(v[0])
            }
            "constant" => {
                let v = nums()?;
                if v.len() > 1 {
                    return Err(Error::Config("constant takes at most one parameter".into()));
                }
                Geometry::constant(v.first().copied().unwrap_or(0.0))
            }
            _ => Err(Error::Config(format!("unknown geometry family {name:?}"))),
        }
    }
}

/// Geometry as written in JSON run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchored: Option<bool>,
}

impl GeometrySpec {
    pub fn build(&self) -> Result<Geometry> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::Config(format!("family {:?} requires {what:?}", self.family)))
        };
        let g = match self.family.as_str() {
            "Fks" => {
                let k = self.k.ok_or_else(|| Error::Config("family \"Fks\" requires \"k\"".into()))?;
                let sigma = need(self.sigma, "sigma")?;
                if self.anchored.unwrap_or(true) {
                    Geometry::power_log(k, sigma)?
                } else {
                    Geometry::power_log_literal(k, sigma)?
                }
            }
            "Dsigma" => Geometry::inverse_power(need(self.sigma, "sigma")?)?,
            "finite" => Geometry::finite_type(need(self.alpha, "alpha")?)?,
            "constant" => Geometry::constant(self.alpha.unwrap_or(0.0))?,
            other => return Err(Error::Config(format!("unknown geometry family {other:?}"))),
        };
        match self.r_end {
            Some(r) => g.with_domain(r),
            None => Ok(g),
        }
    }

    pub fn of(g: &Geometry) -> Option<Self> {
        let mut spec = GeometrySpec {
            family: String::new(),
            k: None,
            sigma: None,
            alpha: None,
            r_end: Some(g.r_end()),
            anchored: None,
        };
        match g.family() {
            Family::FiniteType { alpha } => {
                spec.family = "finite".into();
                spec.alpha = Some(*alpha);
            }
            Family::PowerLog { k, sigma, anchored } => {
                spec.family = "Fks".into();
                spec.k = Some(*k);
                spec.sigma = Some(*sigma);
                spec.anchored = Some(*anchored);
            }
            Family::InversePower { sigma } => {
                spec.family = "Dsigma".into();
                spec.sigma = Some(*sigma);
            }
            Family::Constant { value } => {
                spec.family = "constant".into();
                spec.alpha = Some(*value);
            }
            Family::Custom(_) => return None,
        }
        Some(spec)
    }
}

/// Settings for [`audit_structure_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub sample_count: usize,
    /// Lower-bound constant of condition (4).
    pub epsilon: f64,
    /// Doubling constant of condition (3).
    pub doubling: f64,
    /// Relative slack for the monotonicity test of condition (4).
    pub tolerance: f64,
    /// Comparability constant for condition (5).
    pub comparability: f64,
    /// `F` must exceed this at the deepest probed scale for condition (1).
    pub growth_threshold: f64,
    /// Deepest probed scale, as a value of `ln(1/x)`.
    pub probe_log_max: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            sample_count: 257,
            epsilon: 0.25,
            doubling: 4.0,
            tolerance: 1e-9,
            comparability: 8.0,
            growth_threshold: 1e3,
            probe_log_max: 1e6,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 16 {
            return Err(Error::Config("audit needs at least 16 samples".into()));
        }
        if !(self.epsilon > 0.0 && self.doubling > 0.0 && self.comparability >= 1.0) {
            return Err(Error::Config("audit constants must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    /// Condition number, 1 to 5.
    pub index: u8,
    pub passed: bool,
    /// Worst sampled point.
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub geometry: String,
    pub interval: (f64, f64),
    pub conditions: Vec<ConditionVerdict>,
    pub passed: bool,
}

impl AuditReport {
    pub fn failed_conditions(&self) -> Vec<u8> {
        self.conditions.iter().filter(|c| !c.passed).map(|c| c.index).collect()
    }
}

/// Checks the five structure conditions on a geometric sample of `(a, b)`.
pub fn audit_structure_conditions(g: &Geometry, a: f64, b: f64, cfg: &AuditConfig) -> Result<AuditReport> {
    cfg.validate()?;
    if !(a > 0.0 && a < b && b <= g.r_end()) {
        return Err(Error::Domain(format!("audit interval ({a}, {b}) not inside (0, {})", g.r_end())));
    }
    let n = cfg.sample_count;
    let ratio = (b / a).ln() / (n - 1) as f64;
    // Stay strictly inside the open interval.
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            let x = a * (ratio * i as f64).exp();
            x.clamp(a, b * (1.0 - 1e-12))
        })
        .collect();
    let evals: Vec<Result<Eval>> = xs.iter().map(|&x| g.eval(x)).collect();

    let conditions = vec![
        condition_blowup(g, a, cfg),
        condition_convexity(&xs, &evals),
        condition_doubling(&xs, &evals, cfg),
        condition_monotone(&xs, &evals, cfg),
        condition_comparability(&xs, &evals, cfg),
    ];
    let passed = conditions.iter().all(|c| c.passed);
    Ok(AuditReport { geometry: g.id(), interval: (a, b), conditions, passed })
}

fn fail(index: u8, witness: Option<f64>, detail: String) -> ConditionVerdict {
    ConditionVerdict { index, passed: false, witness, detail }
}

fn first_error(xs: &[f64], evals: &[Result<Eval>], index: u8) -> Option<ConditionVerdict> {
    xs.iter().zip(evals).find_map(|(&x, e)| match e {
        Err(err) => Some(fail(index, Some(x), err.to_string())),
        Ok(_) => None,
    })
}

fn condition_blowup(g: &Geometry, a: f64, cfg: &AuditConfig) -> ConditionVerdict {
    // Probe from ln(1/a) down to the deepest scale in log coordinates.
    let l0 = -a.ln();
    let l_max = match g.family() {
        Family::Custom(_) => cfg.probe_log_max.min(700.0),
        _ => cfg.probe_log_max,
    }
    .max(l0);
    let steps = cfg.sample_count;
    let mut prev = f64::NEG_INFINITY;
    let mut last = f64::NAN;
    for i in 0..steps {
        let l = l0 * (l_max / l0).powf(i as f64 / (steps - 1) as f64);
        let v = match g.eval_log(l) {
            Ok(j) => j.v,
            Err(e) => return fail(1, Some((-l).exp()), e.to_string()),
        };
        if v.is_nan() || v < prev * (1.0 - cfg.tolerance) - cfg.tolerance {
            return fail(1, Some((-l).exp()), format!("F not increasing toward 0 at ln(1/x) = {l:.6e}"));
        }
        prev = v;
        last = v;
    }
    if last > cfg.growth_threshold {
        ConditionVerdict {
            index: 1,
            passed: true,
            witness: None,
            detail: format!("F = {last:.6e} at ln(1/x) = {l_max:.3e}"),
        }
    } else {
        fail(
            1,
            Some((-l_max).exp()),
            format!("F = {last:.6e} stays below {} at ln(1/x) = {l_max:.3e}", cfg.growth_threshold),
        )
    }
}

fn condition_convexity(xs: &[f64], evals: &[Result<Eval>]) -> ConditionVerdict {
    if let Some(v) = first_error(xs, evals, 2) {
        return v;
    }
    for (&x, e) in xs.iter().zip(evals) {
        let e = e.as_ref().expect("checked above");
        if !(e.d1 < 0.0) {
            return fail(2, Some(x), format!("F'({x:.6e}) = {:.6e} is not negative", e.d1));
        }
        if !(e.d2 > 0.0) {
            return fail(2, Some(x), format!("F''({x:.6e}) = {:.6e} is not positive", e.d2));
        }
    }
    ConditionVerdict { index: 2, passed: true, witness: None, detail: "F' < 0 and F'' > 0".into() }
}

fn condition_doubling(xs: &[f64], evals: &[Result<Eval>], cfg: &AuditConfig) -> ConditionVerdict {
    if let Some(v) = first_error(xs, evals, 3) {
        return v;
    }
    let d: Vec<f64> = evals.iter().map(|e| e.as_ref().expect("checked above").d1.abs()).collect();
    let mut worst = (1.0f64, None);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[j] >= 2.0 * xs[i] {
                break;
            }
            let q = (d[i] / d[j]).max(d[j] / d[i]);
            if q > worst.0 {
                worst = (q, Some(xs[i]));
            }
        }
    }
    ConditionVerdict {
        index: 3,
        passed: worst.0 <= cfg.doubling,
        witness: worst.1,
        detail: format!("max |F'| ratio over factor-2 pairs {:.6} (C = {})", worst.0, cfg.doubling),
    }
}

fn condition_monotone(xs: &[f64], evals: &[Result<Eval>], cfg: &AuditConfig) -> ConditionVerdict {
    if let Some(v) = first_error(xs, evals, 4) {
        return v;
    }
    let g: Vec<f64> = xs
        .iter()
        .zip(evals)
        .map(|(&x, e)| 1.0 / (-x * e.as_ref().expect("checked above").d1))
        .collect();
    for i in 1..g.len() {
        if !(g[i] >= g[i - 1] * (1.0 - cfg.tolerance)) {
            return fail(
                4,
                Some(xs[i]),
                format!("1/(-xF') decreases from {:.9e} to {:.9e}", g[i - 1], g[i]),
            );
        }
    }
    let (imax, gmax) = g
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if gmax > 1.0 / cfg.epsilon {
        return fail(4, Some(xs[imax]), format!("1/(-xF') = {gmax:.6e} exceeds 1/epsilon = {}", 1.0 / cfg.epsilon));
    }
    ConditionVerdict {
        index: 4,
        passed: true,
        witness: Some(xs[imax]),
        detail: format!("1/(-xF') nondecreasing, max {gmax:.6e}"),
    }
}

fn condition_comparability(xs: &[f64], evals: &[Result<Eval>], cfg: &AuditConfig) -> ConditionVerdict {
    if let Some(v) = first_error(xs, evals, 5) {
        return v;
    }
    let mut worst = (1.0f64, None, f64::NAN);
    for (&x, e) in xs.iter().zip(evals) {
        let e = e.as_ref().expect("checked above");
        let q = x * e.d2 / (-e.d1);
        let dev = if q > 0.0 { q.max(1.0 / q) } else { f64::INFINITY };
        if !(dev <= worst.0) {
            worst = (dev, Some(x), q);
        }
    }
    ConditionVerdict {
        index: 5,
        passed: worst.0 <= cfg.comparability,
        witness: worst.1,
        detail: format!(
            "x F''/(-F') worst value {:.6} (comparability {})",
            if worst.1.is_some() { worst.2 } else { 1.0 },
            cfg.comparability
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterated_log_identity_and_domain() {
        assert_eq!(iterated_log(0, 7.0).unwrap(), 7.0);
        assert!((iterated_log(2, TOWER[2]).unwrap() - 1.0).abs() < 1e-15);
        assert!(iterated_log(2, 0.5).is_err());
    }

    #[test]
    fn anchored_ell_is_one_at_x_one() {
        for k in 1..=MAX_ANCHORED_K {
            let g = Geometry::power_log(k, 0.5).unwrap();
            let j = g.eval_log(0.0).unwrap();
            assert_eq!(j.v, 0.0);
            // dF/dL at L = 0 equals ℓ_k^σ = 1
            assert!((j.d1 - 1.0).abs() < 1e-12, "k = {k}: {}", j.d1);
        }
    }

    #[test]
    fn parse_round_trip() {
        for s in ["Fks:3,0.5", "Fks-literal:3,0.5", "Dsigma:0.5", "finite:1", "constant"] {
            let g: Geometry = s.parse().unwrap();
            assert_eq!(g.id(), s);
        }
        assert!("Fks:3".parse::<Geometry>().is_err());
        assert!("Fks:1.5,0.5".parse::<Geometry>().is_err());
        assert!("bogus:1".parse::<Geometry>().is_err());
    }

    #[test]
    fn spec_round_trip() {
        let g = Geometry::power_log(3, 0.5).unwrap();
        let spec = GeometrySpec::of(&g).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: GeometrySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap().id(), g.id());
        let bad = r#"{"family":"Dsigma","sigma":0.5,"beta":1}"#;
        assert!(serde_json::from_str::<GeometrySpec>(bad).is_err());
    }

    #[test]
    fn dyadic_scale_matches_direct_evaluation() {
        let r0 = 0.1;
        let y = 1.0; // j = e^e
        let s = Scale::of_dyadic_index(r0, y);
        let j = y.exp().exp();
        let direct = Scale::from_radius(3.0 * r0 / 4f64.powf(j));
        assert!((s.l1 - direct.l1).abs() < 1e-9 * direct.l1);
        let far = Scale::of_dyadic_index(r0, 1e6);
        assert!(far.l1.is_infinite());
        assert!((far.l3 - 1e6).abs() < 1e-9);
    }
}
