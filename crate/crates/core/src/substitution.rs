//! Closed forms for the marginal rate of substitution `R = F_L / F_K`, the
//! elasticity of substitution `sigma = d ln k / d ln R`, their derivatives in
//! `k`, the asymptotic regimes of `sigma`, and the admissible range of `k`.
//!
//! The closed forms are real-valued for every `k > 0` (Sato-Hoffman excepted,
//! whose domain is `k < (1 - delta rho) / (1 - rho)` when `rho < 1`); they do
//! not require the production function's bracket to be positive. Use
//! [`validity_range`] to find where `R > 0`, `R' > 0`, `sigma > 0` and `y(k)`
//! exists simultaneously.

use std::fmt;

use crate::error::{domain, param, singular, Error, Result};
use crate::families::{lh_from_lf, loglinear_from_ves, FamilySpec, LogLinearParams};
use crate::grid::{log_spaced, shrink_log};

/// Tolerance for detecting the case boundaries `b = c`, `c = 1`, `b + c = 1`.
const BOUNDARY_TOL: f64 = 1e-9;

/// Probe used by [`classify_regime`] when cross-checking monotonicity.
const REGIME_PROBE: (f64, f64) = (1e-4, 1e4);

const VALIDITY_SAMPLES: usize = 2049;

fn check_k(spec: &FamilySpec, k: f64) -> Result<()> {
    spec.validate()?;
    if !(k.is_finite() && k > 0.0) {
        return Err(domain(format!("capital-labor ratio must be finite and positive, got {k}")));
    }
    if let FamilySpec::SatoHoffman(s) = spec {
        s.check_domain(k)?;
    }
    Ok(())
}

fn nonzero(den: f64, what: &str, k: f64) -> Result<f64> {
    if den == 0.0 || !den.is_finite() {
        Err(singular(format!("{what} vanishes at k = {k}")))
    } else {
        Ok(den)
    }
}

/// Wage-relation quantity `xi (1-b)(b+c-1) k^((b+c-1)/b)` shared by the Liu-Hildebrand formulas.
fn lh_x(p: &LogLinearParams, k: f64) -> f64 {
    let s = p.b + p.c - 1.0;
    p.xi * (1.0 - p.b) * s * k.powf(s / p.b)
}

fn lh_mrs(p: &LogLinearParams, k: f64) -> Result<f64> {
    let (b, c) = (p.b, p.c);
    let den = nonzero(lh_x(p, k) + b * c, "Liu-Hildebrand MRS denominator", k)?;
    Ok(-b * (b + c - 1.0) * k / den)
}

fn lh_mrs_derivative(p: &LogLinearParams, k: f64) -> Result<f64> {
    let (b, c) = (p.b, p.c);
    let x = lh_x(p, k);
    let den = nonzero(x + b * c, "Liu-Hildebrand MRS denominator", k)?;
    Ok(-(b + c - 1.0) * ((1.0 - c) * x + b * b * c) / (den * den))
}

fn lh_sigma(p: &LogLinearParams, k: f64) -> Result<f64> {
    let (b, c) = (p.b, p.c);
    let x = lh_x(p, k);
    let den = nonzero((1.0 - c) * x + b * b * c, "Liu-Hildebrand sigma denominator", k)?;
    Ok(b * (x + b * c) / den)
}

fn lh_sigma_derivative(p: &LogLinearParams, k: f64) -> Result<f64> {
    let LogLinearParams { b, c, xi, .. } = *p;
    let s = b + c - 1.0;
    let lead = xi * (1.0 - b) * s;
    let inner = lead * (1.0 - c) * k.powf((b - 1.0) / b) + b * b * c * k.powf(-c / b);
    let den = nonzero(inner * inner, "Liu-Hildebrand sigma denominator", k)?;
    Ok(lead * b * c * s * s * k.powf(-(c + 1.0) / b) / den)
}

/// `R(k) = F_L / F_K`.
pub fn mrs_closed(spec: &FamilySpec, k: f64) -> Result<f64> {
    check_k(spec, k)?;
    match spec {
        FamilySpec::CobbDouglas(p) => Ok((1.0 - p.beta) / p.beta * k),
        FamilySpec::Ces(p) => Ok((1.0 - p.delta) / p.delta * k.powf(1.0 / p.sigma)),
        FamilySpec::LiuHildebrand(p) => lh_mrs(p, k),
        FamilySpec::LuFletcher(p) => lh_mrs(&lh_from_lf(p)?, k),
        FamilySpec::SatoHoffman(p) => {
            let dr = p.delta * p.rho;
            let den = nonzero(1.0 - dr + (p.rho - 1.0) * k, "Sato-Hoffman MRS denominator", k)?;
            Ok(dr * k / den)
        }
        FamilySpec::Ves(v) => Ok(v.lambda * k + v.mu * k.powf(v.theta)),
    }
}

/// `R'(k)`.
pub fn mrs_derivative_closed(spec: &FamilySpec, k: f64) -> Result<f64> {
    check_k(spec, k)?;
    match spec {
        FamilySpec::CobbDouglas(p) => Ok((1.0 - p.beta) / p.beta),
        FamilySpec::Ces(p) => Ok((1.0 - p.delta) / (p.delta * p.sigma) * k.powf(1.0 / p.sigma - 1.0)),
        FamilySpec::LiuHildebrand(p) => lh_mrs_derivative(p, k),
        FamilySpec::LuFletcher(p) => lh_mrs_derivative(&lh_from_lf(p)?, k),
        FamilySpec::SatoHoffman(p) => {
            let dr = p.delta * p.rho;
            let den = nonzero(1.0 - dr + (p.rho - 1.0) * k, "Sato-Hoffman MRS denominator", k)?;
            Ok(dr * (1.0 - dr) / (den * den))
        }
        FamilySpec::Ves(v) => Ok(v.lambda + v.mu * v.theta * k.powf(v.theta - 1.0)),
    }
}

/// Elasticity of substitution `sigma(k)`.
pub fn sigma_closed(spec: &FamilySpec, k: f64) -> Result<f64> {
    check_k(spec, k)?;
    match spec {
        FamilySpec::CobbDouglas(_) => Ok(1.0),
        FamilySpec::Ces(p) => Ok(p.sigma),
        FamilySpec::LiuHildebrand(p) => lh_sigma(p, k),
        FamilySpec::LuFletcher(p) => {
            let (a, b, c, zeta) = (p.a, p.b, p.c, p.zeta);
            let left = zeta * (1.0 - b - c) * k.powf((b - 1.0) / b);
            let right = b * c * a.powf(-1.0 / b) * k.powf(-c / b);
            let den = nonzero((1.0 - c) * left + right, "Lu-Fletcher sigma denominator", k)?;
            Ok((b * left + right) / den)
        }
        FamilySpec::SatoHoffman(p) => {
            let dr = p.delta * p.rho;
            let den = nonzero(1.0 - dr, "1 - delta rho", k)?;
            Ok(1.0 + (p.rho - 1.0) / den * k)
        }
        FamilySpec::Ves(v) => {
            let r = v.lambda * k + v.mu * k.powf(v.theta);
            let den = nonzero(v.lambda * k + v.mu * v.theta * k.powf(v.theta), "k R'(k)", k)?;
            Ok(r / den)
        }
    }
}

/// `sigma'(k)`.
pub fn sigma_derivative_closed(spec: &FamilySpec, k: f64) -> Result<f64> {
    check_k(spec, k)?;
    match spec {
        FamilySpec::CobbDouglas(_) | FamilySpec::Ces(_) => Ok(0.0),
        FamilySpec::LiuHildebrand(p) => lh_sigma_derivative(p, k),
        FamilySpec::LuFletcher(p) => lh_sigma_derivative(&lh_from_lf(p)?, k),
        FamilySpec::SatoHoffman(p) => {
            let den = nonzero(1.0 - p.delta * p.rho, "1 - delta rho", k)?;
            Ok((p.rho - 1.0) / den)
        }
        FamilySpec::Ves(v) => {
            let kt = k.powf(v.theta);
            let den = nonzero(v.lambda * k + v.mu * v.theta * kt, "k R'(k)", k)?;
            let t1 = v.theta - 1.0;
            Ok(-v.lambda * v.mu * t1 * t1 * kt / (den * den))
        }
    }
}

/// Coefficients of the rental-relation closed forms written in `(a, b, c)`
/// with `xi` factored out:
///
/// ```text
/// R      = mrs_linear k + mrs_power_per_xi xi k^exponent
/// R'     = mrs_linear + mrs_derivative_power_per_xi xi k^derivative_exponent
/// sigma  = b (sigma_num_linear k + sigma_num_power_per_xi xi k^exponent)
///            / (sigma_den_linear k + sigma_den_power_per_xi xi k^exponent)
/// sigma' = sigma_derivative_per_xi xi k^exponent / (sigma denominator)^2
/// ```
///
/// The sigma numerator and denominator are both scaled by `-1` relative to the
/// `b(1-c)k - ...` arrangement so that the linear terms carry the factor `(c - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RentalCoefficients {
    pub b: f64,
    pub mrs_linear: f64,
    pub mrs_power_per_xi: f64,
    pub exponent: f64,
    pub mrs_derivative_power_per_xi: f64,
    pub derivative_exponent: f64,
    pub sigma_num_linear: f64,
    pub sigma_num_power_per_xi: f64,
    pub sigma_den_linear: f64,
    pub sigma_den_power_per_xi: f64,
    pub sigma_derivative_per_xi: f64,
}

impl RentalCoefficients {
    pub fn from_loglinear(p: &LogLinearParams) -> Result<Self> {
        p.check_ves_branch()?;
        let LogLinearParams { a, b, c, .. } = *p;
        let a1b = a.powf(1.0 / b);
        Ok(Self {
            b,
            mrs_linear: (1.0 - c) / (c - b),
            mrs_power_per_xi: -(1.0 - b) * a1b / b,
            exponent: c / b,
            mrs_derivative_power_per_xi: -c * (1.0 - b) * a1b / (b * b),
            derivative_exponent: c / b - 1.0,
            sigma_num_linear: b * (c - 1.0),
            sigma_num_power_per_xi: (1.0 - b) * (c - b) * a1b,
            sigma_den_linear: b * b * (c - 1.0),
            sigma_den_power_per_xi: c * (1.0 - b) * (c - b) * a1b,
            sigma_derivative_per_xi: (1.0 - b) * (1.0 - c) * (c - b) * b * (c - b) * (c - b) * a1b,
        })
    }

    pub fn mrs(&self, xi: f64, k: f64) -> f64 {
        self.mrs_linear * k + self.mrs_power_per_xi * xi * k.powf(self.exponent)
    }

    pub fn mrs_derivative(&self, xi: f64, k: f64) -> f64 {
        self.mrs_linear + self.mrs_derivative_power_per_xi * xi * k.powf(self.derivative_exponent)
    }

    fn sigma_denominator(&self, xi: f64, k: f64) -> f64 {
        self.sigma_den_linear * k + self.sigma_den_power_per_xi * xi * k.powf(self.exponent)
    }

    pub fn sigma(&self, xi: f64, k: f64) -> Result<f64> {
        let den = nonzero(self.sigma_denominator(xi, k), "sigma denominator", k)?;
        Ok(self.b * (self.sigma_num_linear * k + self.sigma_num_power_per_xi * xi * k.powf(self.exponent)) / den)
    }

    pub fn sigma_derivative(&self, xi: f64, k: f64) -> Result<f64> {
        let den = nonzero(self.sigma_denominator(xi, k), "sigma denominator", k)?;
        Ok(self.sigma_derivative_per_xi * xi * k.powf(self.exponent) / (den * den))
    }
}

/// `sigma = b (y - k y') / (c y - k y')`, from observed output and rental rate.
pub fn sigma_from_shares(p: &LogLinearParams, k: f64, y: f64, y_prime: f64) -> Result<f64> {
    p.validate()?;
    if !(k > 0.0 && y > 0.0 && k.is_finite() && y.is_finite() && y_prime.is_finite()) {
        return Err(domain(format!("need k > 0 and y > 0, got k = {k}, y = {y}")));
    }
    let share = k * y_prime / y;
    let labor = y - k * y_prime;
    if labor <= 0.0 {
        return Err(Error::Share(format!("y - k y' = {labor} is not positive (capital share {share} >= 1)")));
    }
    let den = p.c * y - k * y_prime;
    if den <= 0.0 {
        return Err(Error::Share(format!(
            "c y - k y' = {den} <= 0: c = {} does not exceed the capital share {share}",
            p.c
        )));
    }
    Ok(p.b * (labor / den))
}

/// `R / (c R + (c - 1) k)`, the factor multiplying `b` in [`sigma_from_mrs`].
pub fn mrs_correction_factor(p: &LogLinearParams, k: f64) -> Result<f64> {
    let coeffs = RentalCoefficients::from_loglinear(p)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(domain(format!("capital-labor ratio must be finite and positive, got {k}")));
    }
    let r = coeffs.mrs(p.xi, k);
    let den = nonzero(p.c * r + (p.c - 1.0) * k, "c R + (c - 1) k", k)?;
    Ok(r / den)
}

/// `sigma = b R / (c R + (c - 1) k)` with `R` from the rental-relation closed form.
pub fn sigma_from_mrs(p: &LogLinearParams, k: f64) -> Result<f64> {
    Ok(p.b * mrs_correction_factor(p, k)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeCase {
    /// Liu-Hildebrand with `b + c > 1`: `sigma -> b / (1 - c)`.
    LhCesLimit,
    /// Liu-Hildebrand with `b + c < 1`: `sigma -> 1`.
    LhCdLimit,
    /// `b < c < 1`: decreasing towards `b / c`.
    VesCaseI,
    /// `c < b < 1`: increasing towards 1.
    VesCaseII,
    /// `c > 1`: increasing towards `b / c`.
    VesCaseIII,
    ConstantSigma,
    UnitSigma,
}

impl fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeCase::LhCesLimit => "liu-hildebrand CES limit",
            RegimeCase::LhCdLimit => "liu-hildebrand Cobb-Douglas limit",
            RegimeCase::VesCaseI => "case i",
            RegimeCase::VesCaseII => "case ii",
            RegimeCase::VesCaseIII => "case iii",
            RegimeCase::ConstantSigma => "constant sigma",
            RegimeCase::UnitSigma => "unit sigma",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Increasing => "increasing",
            Monotonicity::Decreasing => "decreasing",
            Monotonicity::Constant => "constant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub case_label: RegimeCase,
    /// Limit of `sigma(k)` as `k -> infinity`; always finite and positive.
    pub sigma_limit: f64,
    pub monotonicity: Monotonicity,
}

fn near(x: f64, target: f64) -> bool {
    (x - target).abs() <= BOUNDARY_TOL
}

fn sign_monotonicity(s: f64) -> Monotonicity {
    if s > 0.0 {
        Monotonicity::Increasing
    } else if s < 0.0 {
        Monotonicity::Decreasing
    } else {
        Monotonicity::Constant
    }
}

fn classify_rental(p: &LogLinearParams) -> Result<RegimeReport> {
    let LogLinearParams { b, c, xi, .. } = *p;
    if xi >= 0.0 {
        return Err(param(format!(
            "xi = {xi}: regimes are classified only for xi < 0, where R can be positive and increasing"
        )));
    }
    if near(c, 1.0) {
        return Err(param(format!("c = 1 is a case boundary; use reduce: CES with sigma=b (b = {b})")));
    }
    if near(b, c) {
        return Err(param("b = c is a case boundary; use reduce_special_case"));
    }
    if b >= 1.0 {
        return Err(param(format!("b = {b} >= 1 lies outside the classified regimes (b < 1)")));
    }
    let (case_label, sigma_limit) = if c > 1.0 {
        (RegimeCase::VesCaseIII, b / c)
    } else if b < c {
        (RegimeCase::VesCaseI, b / c)
    } else {
        (RegimeCase::VesCaseII, 1.0)
    };
    let monotonicity = sign_monotonicity(xi * (1.0 - b) * (1.0 - c) * (c - b));
    Ok(RegimeReport { case_label, sigma_limit, monotonicity })
}

fn classify_wage(p: &LogLinearParams) -> Result<RegimeReport> {
    let LogLinearParams { b, c, xi, .. } = *p;
    if xi >= 0.0 {
        return Err(param(format!("xi = {xi}: regimes are classified only for xi < 0")));
    }
    if near(b + c, 1.0) {
        return Err(param("b + c = 1 is a case boundary: the marginal rate of substitution degenerates"));
    }
    if near(c, 0.0) {
        return Err(param(format!("c = 0 is a case boundary; the function is CES with sigma=b (b = {b})")));
    }
    if !(b < 1.0 && c < 1.0) {
        return Err(param(format!("b = {b}, c = {c}: regimes are classified for b, c in (0, 1)")));
    }
    let s = b + c - 1.0;
    let (case_label, sigma_limit) =
        if s > 0.0 { (RegimeCase::LhCesLimit, b / (1.0 - c)) } else { (RegimeCase::LhCdLimit, 1.0) };
    let monotonicity = sign_monotonicity(xi * (1.0 - b) * s);
    Ok(RegimeReport { case_label, sigma_limit, monotonicity })
}

/// Case, limit and monotonicity of `sigma(k)`.
///
/// The rental (VES) and wage (Liu-Hildebrand, Lu-Fletcher) families are
/// classified for `xi < 0` only, and parameters on a case boundary are
/// rejected. The reported monotonicity is cross-checked against `sigma'`
/// sampled at 32 log-spaced points inside the validity range.
pub fn classify_regime(spec: &FamilySpec) -> Result<RegimeReport> {
    spec.validate()?;
    let report = match spec {
        FamilySpec::CobbDouglas(_) => {
            RegimeReport { case_label: RegimeCase::UnitSigma, sigma_limit: 1.0, monotonicity: Monotonicity::Constant }
        }
        FamilySpec::Ces(p) => RegimeReport {
            case_label: RegimeCase::ConstantSigma,
            sigma_limit: p.sigma,
            monotonicity: Monotonicity::Constant,
        },
        FamilySpec::SatoHoffman(p) => {
            if p.rho != 1.0 {
                return Err(param(format!(
                    "Sato-Hoffman sigma is affine in k with slope {}; it has no finite positive limit",
                    (p.rho - 1.0) / (1.0 - p.delta * p.rho)
                )));
            }
            RegimeReport { case_label: RegimeCase::UnitSigma, sigma_limit: 1.0, monotonicity: Monotonicity::Constant }
        }
        FamilySpec::LiuHildebrand(p) => classify_wage(p)?,
        FamilySpec::LuFletcher(p) => classify_wage(&lh_from_lf(p)?)?,
        FamilySpec::Ves(v) => classify_rental(&loglinear_from_ves(v)?)?,
    };

    if report.monotonicity != Monotonicity::Constant {
        let interval = validity_range(spec, REGIME_PROBE.0, REGIME_PROBE.1);
        if let Some((lo, hi)) = interval.bounds {
            let (lo, hi) = shrink_log(lo, hi, 0.01);
            for k in log_spaced(lo, hi, 32) {
                let d = sigma_derivative_closed(spec, k)?;
                if d != 0.0 && sign_monotonicity(d) != report.monotonicity {
                    return Err(singular(format!(
                        "sampled sigma'({k}) = {d} contradicts the {} regime",
                        report.monotonicity
                    )));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// The closed form's bracketed base is positive, i.e. `y(k)` exists.
    BracketPositive,
    MrsPositive,
    MrsIncreasing,
    SigmaPositive,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::BracketPositive => "bracket>0",
            Constraint::MrsPositive => "R>0",
            Constraint::MrsIncreasing => "R'>0",
            Constraint::SigmaPositive => "sigma>0",
        })
    }
}

const ALL_CONSTRAINTS: [Constraint; 4] =
    [Constraint::BracketPositive, Constraint::MrsPositive, Constraint::MrsIncreasing, Constraint::SigmaPositive];

/// Range of `k` on which all four [`Constraint`]s hold.
///
/// `bounds` is `None` when no probed point satisfies them. `constraints_active`
/// lists the constraints that fail just outside the interior endpoints, or,
/// for an empty interval, every constraint that failed somewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityInterval {
    pub bounds: Option<(f64, f64)>,
    pub constraints_active: Vec<Constraint>,
}

impl ValidityInterval {
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn k_low(&self) -> Option<f64> {
        self.bounds.map(|b| b.0)
    }

    pub fn k_high(&self) -> Option<f64> {
        self.bounds.map(|b| b.1)
    }

    pub fn contains(&self, k: f64) -> bool {
        self.bounds.is_some_and(|(lo, hi)| k >= lo && k <= hi)
    }
}

pub(crate) fn failing(spec: &FamilySpec, k: f64) -> Vec<Constraint> {
    let positive = |r: Result<f64>| matches!(r, Ok(v) if v > 0.0 && v.is_finite());
    ALL_CONSTRAINTS
        .into_iter()
        .filter(|c| !match c {
            Constraint::BracketPositive => spec.eval_intensive(k).is_ok(),
            Constraint::MrsPositive => positive(mrs_closed(spec, k)),
            Constraint::MrsIncreasing => positive(mrs_derivative_closed(spec, k)),
            Constraint::SigmaPositive => positive(sigma_closed(spec, k)),
        })
        .collect()
}

/// Constraints failing at `k`, leaving out `sigma > 0` when `R` or `R'` already
/// fails (`sigma = R / (k R')`, so its sign follows from theirs).
fn binding(spec: &FamilySpec, k: f64) -> Vec<Constraint> {
    let mut f = failing(spec, k);
    if f.contains(&Constraint::MrsPositive) || f.contains(&Constraint::MrsIncreasing) {
        f.retain(|c| *c != Constraint::SigmaPositive);
    }
    f
}

fn holds(spec: &FamilySpec, k: f64) -> bool {
    failing(spec, k).is_empty()
}

/// Bisection in `ln k` between a failing and a passing point; returns the passing side.
fn refine(spec: &FamilySpec, mut bad: f64, mut good: f64) -> (f64, f64) {
    for _ in 0..200 {
        if (good / bad - 1.0).abs() < 1e-13 {
            break;
        }
        let mid = (bad.ln() * 0.5 + good.ln() * 0.5).exp();
        if mid == bad || mid == good {
            break;
        }
        if holds(spec, mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    (bad, good)
}

/// Largest sub-interval of `[k_probe_low, k_probe_high]` (longest in `ln k`
/// among those found on a 2049-point log grid) on which `y(k)` exists and
/// `R`, `R'`, `sigma` are positive. Interior endpoints are refined by bisection.
pub fn validity_range(spec: &FamilySpec, k_probe_low: f64, k_probe_high: f64) -> ValidityInterval {
    let empty = |constraints_active| ValidityInterval { bounds: None, constraints_active };
    if spec.validate().is_err() || !(k_probe_low > 0.0 && k_probe_high > k_probe_low && k_probe_high.is_finite()) {
        return empty(Vec::new());
    }
    let grid = log_spaced(k_probe_low, k_probe_high, VALIDITY_SAMPLES);
    let fails: Vec<Vec<Constraint>> = grid.iter().map(|&k| failing(spec, k)).collect();

    let mut runs = Vec::new();
    let mut start = None;
    for (i, f) in fails.iter().enumerate() {
        match (f.is_empty(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, grid.len() - 1));
    }
    // longest run, first one on ties
    let best = runs.into_iter().rev().max_by_key(|(s, e)| e - s);

    let Some((s, e)) = best else {
        let mut all: Vec<Constraint> = fails.into_iter().flatten().collect();
        all.sort();
        all.dedup();
        return empty(all);
    };

    let mut active = Vec::new();
    let k_low = if s == 0 {
        grid[0]
    } else {
        let (bad, good) = refine(spec, grid[s - 1], grid[s]);
        active.extend(binding(spec, bad));
        good
    };
    let k_high = if e == grid.len() - 1 {
        grid[e]
    } else {
        let (bad, good) = refine(spec, grid[e + 1], grid[e]);
        active.extend(binding(spec, bad));
        good
    };
    active.sort();
    active.dedup();
    ValidityInterval { bounds: Some((k_low, k_high)), constraints_active: active }
}
