//! Independent numerical checks of the closed forms.
//!
//! Ground truth is the definition of the two substitution measures for a
//! degree-one function, `R = y / y' - k` and `sigma = y' (k y' - y) / (k y y'')`,
//! evaluated with finite-difference derivatives of `y(k)`, together with a
//! fourth-order Runge-Kutta integration of `d ln y / dk = 1 / ((1 + lambda) k + mu k^theta)`.

use crate::error::{domain, param, singular, Result};
use crate::families::{lf_from_lh, FamilySpec, LogLinearParams, SatoHoffmanParams, VesParams};
use crate::grid::{log_spaced, shrink_log};
use crate::substitution::{
    failing, mrs_closed, mrs_derivative_closed, sigma_closed, sigma_derivative_closed, validity_range,
};

/// Relative tolerance for closed form versus finite-difference comparisons.
pub const DERIVATIVE_TOL: f64 = 1e-6;
/// Relative tolerance for algebraic identities between closed forms.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Step for three-point first differences of the (exact) closed forms.
fn step_first(k: f64) -> f64 {
    k * f64::EPSILON.cbrt()
}

/// Derivative of `f` at `x` by the three-point central difference.
pub fn central_first<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Five-point central first derivative, truncation error `O(h^4)`.
pub fn central_first_5<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (fm2, fm1, fp1, fp2) = (f(x - 2.0 * h)?, f(x - h)?, f(x + h)?, f(x + 2.0 * h)?);
    Ok((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h))
}

/// Five-point central second derivative, truncation error `O(h^4)`.
pub fn central_second_5<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (fm2, fm1, f0, fp1, fp2) = (f(x - 2.0 * h)?, f(x - h)?, f(x)?, f(x + h)?, f(x + 2.0 * h)?);
    Ok((-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h))
}

/// `y`, `y'`, `y''` of the intensive form, the derivatives by five-point central differences.
pub fn intensive_derivatives(spec: &FamilySpec, k: f64) -> Result<(f64, f64, f64)> {
    let f = |x: f64| spec.eval_intensive(x);
    let y = f(k)?;
    let d1 = central_first_5(f, k, k * f64::EPSILON.powf(0.2))?;
    let d2 = central_second_5(f, k, k * f64::EPSILON.powf(1.0 / 6.0))?;
    Ok((y, d1, d2))
}

/// `R = y / y' - k` with numerical `y'`.
pub fn mrs_numeric(spec: &FamilySpec, k: f64) -> Result<f64> {
    let (y, d1, _) = intensive_derivatives(spec, k)?;
    Ok(y / d1 - k)
}

/// `sigma = y' (k y' - y) / (k y y'')` with numerical derivatives.
pub fn sigma_numeric(spec: &FamilySpec, k: f64) -> Result<f64> {
    let (y, d1, d2) = intensive_derivatives(spec, k)?;
    Ok(d1 * (k * d1 - y) / (k * y * d2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub points_checked: usize,
    pub tolerance: f64,
    pub passed: bool,
    /// Grid point and quantity where `max_rel_error` was attained.
    pub worst_k: f64,
    pub worst_quantity: &'static str,
}

struct Tally {
    name: String,
    tolerance: f64,
    max_abs: f64,
    max_rel: f64,
    worst_k: f64,
    worst_quantity: &'static str,
    points: usize,
}

impl Tally {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            max_abs: 0.0,
            max_rel: 0.0,
            worst_k: f64::NAN,
            worst_quantity: "",
            points: 0,
        }
    }

    /// Records `|got - want|` relative to `scale`. NaN is treated as an infinite error.
    fn record(&mut self, k: f64, quantity: &'static str, got: f64, want: f64, scale: f64) {
        let abs = (got - want).abs();
        let rel = if abs == 0.0 { 0.0 } else { abs / scale.abs() };
        let (abs, rel) = if rel.is_nan() { (f64::INFINITY, f64::INFINITY) } else { (abs, rel) };
        self.max_abs = self.max_abs.max(abs);
        if rel > self.max_rel || self.worst_quantity.is_empty() {
            self.max_rel = self.max_rel.max(rel);
            self.worst_k = k;
            self.worst_quantity = quantity;
        }
    }

    fn finish(self) -> Result<VerificationReport> {
        if self.points == 0 {
            return Err(param("verification needs at least one grid point"));
        }
        Ok(VerificationReport {
            check_name: self.name,
            max_abs_error: self.max_abs,
            max_rel_error: self.max_rel,
            points_checked: self.points,
            tolerance: self.tolerance,
            passed: self.max_rel <= self.tolerance,
            worst_k: self.worst_k,
            worst_quantity: self.worst_quantity,
        })
    }
}

fn check_grid(k_grid: &[f64]) -> Result<()> {
    if k_grid.is_empty() {
        return Err(param("empty grid"));
    }
    if let Some(&k) = k_grid.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(domain(format!("grid point k = {k} is not a finite positive number")));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("grid must be strictly increasing"));
    }
    Ok(())
}

/// Smallest `k^2 |y''| / y = beta (1 - beta) / sigma` at which finite-difference
/// derivatives of `y` are trusted, where `beta = k / (k + R)` is the capital share.
///
/// The rounding error of the difference quotients relative to `sigma` grows
/// like `sigma / (beta (1 - beta))`.
pub const CURVATURE_FLOOR: f64 = 1e-3;

fn curvature(spec: &FamilySpec, k: f64) -> Option<f64> {
    let r = mrs_closed(spec, k).ok()?;
    let s = sigma_closed(spec, k).ok()?;
    let beta = k / (k + r);
    Some(beta * (1.0 - beta) / s)
}

/// Longest stretch of the validity range found on the probe where the
/// curvature is at least [`CURVATURE_FLOOR`], located on a 2049-point log grid
/// and pulled in by 2% of its log-width at each end so that the difference
/// stencils stay clear of the boundary.
pub fn oracle_window(spec: &FamilySpec, probe_low: f64, probe_high: f64) -> Result<(f64, f64)> {
    let iv = validity_range(spec, probe_low, probe_high);
    let (lo, hi) = iv.bounds.ok_or_else(|| {
        domain(format!(
            "no admissible k in [{probe_low}, {probe_high}] (failing: {})",
            iv.constraints_active.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
        ))
    })?;
    let dense = log_spaced(lo, hi, 2049);
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &k) in dense.iter().enumerate() {
        let ok = curvature(spec, k).is_some_and(|c| c >= CURVATURE_FLOOR);
        match (ok, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if best.is_none_or(|(bs, be)| i - 1 - s > be - bs) {
                    best = Some((s, i - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let e = dense.len() - 1;
        if best.is_none_or(|(bs, be)| e - s > be - bs) {
            best = Some((s, e));
        }
    }
    match best {
        Some((i, j)) if j > i => Ok(shrink_log(dense[i], dense[j], 0.02)),
        _ => Err(domain(format!(
            "beta (1 - beta) / sigma is below {CURVATURE_FLOOR} throughout the validity range [{lo}, {hi}]"
        ))),
    }
}

/// `n` log-spaced points across [`oracle_window`].
pub fn default_grid(spec: &FamilySpec, probe_low: f64, probe_high: f64, n: usize) -> Result<Vec<f64>> {
    let (lo, hi) = oracle_window(spec, probe_low, probe_high)?;
    Ok(log_spaced(lo, hi, n))
}

/// Closed-form `R`, `R'`, `sigma`, `sigma'` against finite-difference ground truth.
///
/// Errors are relative to the quantity's natural scale: `|R| + k` for `R`
/// (the definition subtracts `k` from `y / y'`), `max(|R'|, |R| / k)` for `R'`,
/// `|sigma|` for `sigma` and `max(|sigma'|, |sigma| / k)` for `sigma'`.
pub fn verify_family(spec: &FamilySpec, k_grid: &[f64], tolerance: f64) -> Result<VerificationReport> {
    verify_family_with(spec, k_grid, tolerance, sigma_closed)
}

/// [`verify_family`] with a substitute for the closed-form `sigma`, used to
/// exercise the failure path.
pub fn verify_family_with<S>(spec: &FamilySpec, k_grid: &[f64], tolerance: f64, sigma: S) -> Result<VerificationReport>
where
    S: Fn(&FamilySpec, f64) -> Result<f64>,
{
    spec.validate()?;
    if !spec.is_degree_one() {
        return Err(param("the substitution identities used here need a degree-one function (alpha = 1)"));
    }
    check_grid(k_grid)?;
    let mut t = Tally::new(format!("family:{}", spec.name()), tolerance);
    for &k in k_grid {
        let bad = failing(spec, k);
        if !bad.is_empty() {
            let names: Vec<String> = bad.iter().map(|c| c.to_string()).collect();
            return Err(domain(format!(
                "grid point k = {k} is outside the validity range ({} fails)",
                names.join(", ")
            )));
        }
        let r = mrs_closed(spec, k)?;
        t.record(k, "R", r, mrs_numeric(spec, k)?, r.abs() + k);

        let rp = mrs_derivative_closed(spec, k)?;
        let rp_fd = central_first(|x| mrs_closed(spec, x), k, step_first(k))?;
        t.record(k, "R'", rp, rp_fd, rp.abs().max(r.abs() / k));

        let s = sigma(spec, k)?;
        t.record(k, "sigma", s, sigma_numeric(spec, k)?, s);

        let sp = sigma_derivative_closed(spec, k)?;
        let sp_fd = central_first(|x| sigma(spec, x), k, step_first(k))?;
        t.record(k, "sigma'", sp, sp_fd, sp.abs().max(s.abs() / k));
        t.points += 1;
    }
    t.finish()
}

/// Liu-Hildebrand solution with `xi` against the Lu-Fletcher one with
/// `zeta = xi (b-1) a^(-1/b) / b`.
pub fn verify_equivalence_lh_lf(p: &LogLinearParams, k_grid: &[f64], tolerance: f64) -> Result<VerificationReport> {
    p.check_lh_branch()?;
    check_grid(k_grid)?;
    let lh = FamilySpec::LiuHildebrand(*p);
    let lf = FamilySpec::LuFletcher(lf_from_lh(p)?);
    let mut t = Tally::new("equivalence:liu-hildebrand/lu-fletcher", tolerance);
    for &k in k_grid {
        let a = lh.eval_intensive(k)?;
        let b = lf.eval_intensive(k)?;
        t.record(k, "y", b, a, a);
        t.points += 1;
    }
    t.finish()
}

/// Pointwise `y`, `R` and `sigma` of `spec` against `target`.
pub fn verify_reduction(
    spec: &FamilySpec,
    target: &FamilySpec,
    k_grid: &[f64],
    tolerance: f64,
) -> Result<VerificationReport> {
    check_grid(k_grid)?;
    let mut t = Tally::new(format!("reduction:{}->{}", spec.name(), target.name()), tolerance);
    for &k in k_grid {
        let (y0, y1) = (spec.eval_intensive(k)?, target.eval_intensive(k)?);
        t.record(k, "y", y0, y1, y1);
        let (r0, r1) = (mrs_closed(spec, k)?, mrs_closed(target, k)?);
        t.record(k, "R", r0, r1, r1.abs() + k);
        let (s0, s1) = (sigma_closed(spec, k)?, sigma_closed(target, k)?);
        t.record(k, "sigma", s0, s1, s1);
        t.points += 1;
    }
    t.finish()
}

/// Numerical `sigma` of the Sato-Hoffman closed form against `1 + (rho - 1) k / (1 - delta rho)`.
pub fn verify_sato_hoffman(s: &SatoHoffmanParams, k_grid: &[f64], tolerance: f64) -> Result<VerificationReport> {
    s.validate()?;
    if s.alpha != 1.0 {
        return Err(param("the affine-sigma check needs alpha = 1"));
    }
    check_grid(k_grid)?;
    for &k in k_grid {
        s.check_domain(k)?;
    }
    let dr = s.delta * s.rho;
    if dr == 1.0 {
        return Err(singular("delta rho = 1 makes the affine sigma formula singular"));
    }
    let spec = FamilySpec::SatoHoffman(*s);
    let mut t = Tally::new("sato-hoffman:affine-sigma", tolerance);
    for &k in k_grid {
        let affine = 1.0 + (s.rho - 1.0) / (1.0 - dr) * k;
        t.record(k, "sigma", sigma_numeric(&spec, k)?, affine, affine);
        t.points += 1;
    }
    t.finish()
}

/// Integrates `d ln y / dk = 1 / ((1 + lambda) k + mu k^theta)` from
/// `(k_start, y_start)` to `k_end` with `steps` classical fourth-order
/// Runge-Kutta steps and returns `y(k_end)`.
pub fn ode_integrate_theorem(v: &VesParams, k_start: f64, y_start: f64, k_end: f64, steps: usize) -> Result<f64> {
    v.validate()?;
    for (name, k) in [("k_start", k_start), ("k_end", k_end)] {
        if !(k.is_finite() && k > 0.0) {
            return Err(domain(format!("{name} = {k} must be finite and positive")));
        }
    }
    if !(y_start.is_finite() && y_start > 0.0) {
        return Err(domain(format!("y_start = {y_start} must be finite and positive")));
    }
    if steps < 2 {
        return Err(param(format!("need at least 2 steps, got {steps}")));
    }
    if k_start == k_end {
        return Ok(y_start);
    }

    let denom = |k: f64| (1.0 + v.lambda) * k + v.mu * k.powf(v.theta);
    let sign = denom(k_start).signum();
    let rhs = |k: f64| -> Result<f64> {
        let d = denom(k);
        if d == 0.0 || d.signum() != sign || !d.is_finite() {
            return Err(singular(format!("(1 + lambda) k + mu k^theta changes sign or vanishes near k = {k}")));
        }
        Ok(1.0 / d)
    };

    let h = (k_end - k_start) / steps as f64;
    let mut ln_y = y_start.ln();
    for i in 0..steps {
        let k = k_start + h * i as f64;
        let k1 = rhs(k)?;
        let k2 = rhs(k + 0.5 * h)?;
        let k3 = k2;
        let k4 = rhs(k + h)?;
        ln_y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(ln_y.exp())
}

/// Integrates from the first grid point, seeded with the closed form, and
/// compares against the closed form at every later grid point.
pub fn verify_ode(
    v: &VesParams,
    k_grid: &[f64],
    steps_per_interval: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    check_grid(k_grid)?;
    if k_grid.len() < 2 {
        return Err(param("the ODE check needs at least two grid points"));
    }
    let spec = FamilySpec::Ves(*v);
    let mut y = spec.eval_intensive(k_grid[0])?;
    let mut t = Tally::new("ode:theorem", tolerance);
    for w in k_grid.windows(2) {
        y = ode_integrate_theorem(v, w[0], y, w[1], steps_per_interval)?;
        let exact = spec.eval_intensive(w[1])?;
        t.record(w[1], "y", y, exact, exact);
        t.points += 1;
    }
    t.finish()
}
