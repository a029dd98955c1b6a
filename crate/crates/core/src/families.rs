//! Parameter types and closed-form evaluation of the production function
//! families, in intensive form `y(k)` and extensive form `F(K, L)`.
//!
//! Every family except Sato-Hoffman with `alpha != 1` is homogeneous of
//! degree one, so `F(K, L) = L * y(K / L)`.

use crate::error::{domain, param, singular, Result};

/// Default threshold used by [`reduce_special_case`].
pub const DEFAULT_REDUCTION_TOL: f64 = 1e-9;

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(param(format!("{name} must be finite, got {v}")))
    }
}

fn positive_output(y: f64, k: f64) -> Result<f64> {
    if y.is_finite() && y > 0.0 {
        Ok(y)
    } else {
        Err(domain(format!("output at k = {k} is not a finite positive number ({y})")))
    }
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("capital-labor ratio must be finite and positive, got {k}")))
    }
}

/// Regression-space parameters `(a, b, c)` plus the integration constant `xi`.
///
/// Shared by the wage-rate relation `ln y = ln a + b ln w + c ln k`
/// (Liu-Hildebrand) and the rental-rate relation `ln y = ln a + b ln r + c ln k`.
/// Zero `b` or `c` is admitted here because both appear as explicit special
/// cases; the branch checks reject them where the closed forms divide by them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLinearParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub xi: f64,
}

impl LogLinearParams {
    pub fn new(a: f64, b: f64, c: f64, xi: f64) -> Result<Self> {
        let p = Self { a, b, c, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("a", self.a)?;
        finite("b", self.b)?;
        finite("c", self.c)?;
        finite("xi", self.xi)?;
        if self.a <= 0.0 {
            return Err(param(format!("a must be positive, got {}", self.a)));
        }
        if self.b < 0.0 || self.c < 0.0 {
            return Err(param(format!("b and c must be non-negative, got b = {}, c = {}", self.b, self.c)));
        }
        Ok(())
    }

    /// Restrictions of the rental-rate (VES) branch: `b, c > 0`, `b != 1`, `b != c`.
    pub fn check_ves_branch(&self) -> Result<()> {
        self.validate()?;
        if self.b == 0.0 {
            return Err(param("b = 0 is the Cobb-Douglas case; use reduce_special_case"));
        }
        if self.c == 0.0 {
            return Err(param("c must be positive on the rental-rate branch"));
        }
        if self.b == 1.0 {
            return Err(param("b = 1 is a singular branch of the rental-rate solution"));
        }
        if self.b == self.c {
            return Err(param(format!("b = c = {} leaves lambda undefined", self.b)));
        }
        Ok(())
    }

    /// Restrictions of the wage-rate (Liu-Hildebrand) branch: `b > 0`, `b != 1`, `b + c != 1`.
    pub fn check_lh_branch(&self) -> Result<()> {
        self.validate()?;
        if self.b == 0.0 {
            return Err(param("b must be positive on the wage-rate branch"));
        }
        if self.b == 1.0 {
            return Err(param("b = 1 is a singular branch of the wage-rate solution"));
        }
        if self.b + self.c == 1.0 {
            return Err(param("b + c = 1: the marginal rate of substitution degenerates"));
        }
        Ok(())
    }
}

/// Structural parameters of the function whose marginal rate of substitution is
/// `R(k) = lambda * k + mu * k^theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesParams {
    pub lambda: f64,
    pub mu: f64,
    pub theta: f64,
    pub psi: f64,
}

impl VesParams {
    pub fn new(lambda: f64, mu: f64, theta: f64, psi: f64) -> Result<Self> {
        let v = Self { lambda, mu, theta, psi };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        finite("lambda", self.lambda)?;
        finite("mu", self.mu)?;
        finite("theta", self.theta)?;
        finite("psi", self.psi)?;
        if self.lambda == -1.0 {
            return Err(param("lambda = -1 is excluded"));
        }
        if self.mu == 0.0 {
            return Err(param("mu = 0 is excluded"));
        }
        if self.theta == 1.0 {
            return Err(param("theta = 1 is excluded"));
        }
        if self.psi <= 0.0 {
            return Err(param(format!("psi must be positive, got {}", self.psi)));
        }
        Ok(())
    }

    /// `(1 + lambda)(1 - theta)`, the reciprocal of the outer exponent.
    pub fn exponent_base(&self) -> f64 {
        (1.0 + self.lambda) * (1.0 - self.theta)
    }

    fn bracket(&self, k: f64) -> f64 {
        (1.0 + self.lambda) * k.powf(1.0 - self.theta) + self.mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CobbDouglasParams {
    pub scale: f64,
    pub beta: f64,
}

impl CobbDouglasParams {
    pub fn new(scale: f64, beta: f64) -> Result<Self> {
        let p = Self { scale, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("A", self.scale)?;
        finite("beta", self.beta)?;
        if self.scale <= 0.0 {
            return Err(param(format!("A must be positive, got {}", self.scale)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(param(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesParams {
    pub gamma: f64,
    pub delta: f64,
    pub sigma: f64,
}

impl CesParams {
    pub fn new(gamma: f64, delta: f64, sigma: f64) -> Result<Self> {
        let p = Self { gamma, delta, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("gamma", self.gamma)?;
        finite("delta", self.delta)?;
        finite("sigma", self.sigma)?;
        if self.gamma <= 0.0 {
            return Err(param(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(param(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.sigma <= 0.0 {
            return Err(param(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.sigma == 1.0 {
            return Err(param("sigma = 1 is the Cobb-Douglas family"));
        }
        Ok(())
    }

    /// `(sigma - 1) / sigma`.
    pub fn rho(&self) -> f64 {
        (self.sigma - 1.0) / self.sigma
    }
}

/// Lu-Fletcher parameterisation of the wage-rate solution, with its own
/// integration constant `zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuFletcherParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub zeta: f64,
}

impl LuFletcherParams {
    pub fn new(a: f64, b: f64, c: f64, zeta: f64) -> Result<Self> {
        let p = Self { a, b, c, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("zeta", self.zeta)?;
        LogLinearParams { a: self.a, b: self.b, c: self.c, xi: 0.0 }.check_lh_branch()
    }
}

/// Sato-Hoffman function `F = gamma K^(alpha(1 - delta rho)) [L + (rho - 1) K]^(alpha delta rho)`,
/// whose elasticity of substitution is affine in `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatoHoffmanParams {
    pub gamma: f64,
    pub delta: f64,
    pub rho: f64,
    pub alpha: f64,
}

impl SatoHoffmanParams {
    /// Degree-one form (`alpha = 1`).
    pub fn new(gamma: f64, delta: f64, rho: f64) -> Result<Self> {
        Self::with_alpha(gamma, delta, rho, 1.0)
    }

    pub fn with_alpha(gamma: f64, delta: f64, rho: f64, alpha: f64) -> Result<Self> {
        let p = Self { gamma, delta, rho, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("gamma", self.gamma)?;
        finite("delta", self.delta)?;
        finite("rho", self.rho)?;
        finite("alpha", self.alpha)?;
        if self.gamma <= 0.0 {
            return Err(param(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(param(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        let dr = self.delta * self.rho;
        if !(0.0..=1.0).contains(&dr) {
            return Err(param(format!("delta * rho must lie in [0, 1], got {dr}")));
        }
        if self.alpha <= 0.0 {
            return Err(param(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Upper end of the admissible capital-labor ratios, `(1 - delta rho) / (1 - rho)`
    /// when `rho < 1`; `None` when the domain is unbounded.
    pub fn k_max(&self) -> Option<f64> {
        (self.rho < 1.0).then(|| (1.0 - self.delta * self.rho) / (1.0 - self.rho))
    }

    pub fn check_domain(&self, k: f64) -> Result<()> {
        check_k(k)?;
        match self.k_max() {
            Some(kmax) if k >= kmax => Err(domain(format!("k = {k} violates the Sato-Hoffman restriction k < {kmax}"))),
            _ => Ok(()),
        }
    }
}

/// One production function family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    CobbDouglas(CobbDouglasParams),
    Ces(CesParams),
    LiuHildebrand(LogLinearParams),
    LuFletcher(LuFletcherParams),
    SatoHoffman(SatoHoffmanParams),
    Ves(VesParams),
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::CobbDouglas(_) => "cobb-douglas",
            FamilySpec::Ces(_) => "ces",
            FamilySpec::LiuHildebrand(_) => "liu-hildebrand",
            FamilySpec::LuFletcher(_) => "lu-fletcher",
            FamilySpec::SatoHoffman(_) => "sato-hoffman",
            FamilySpec::Ves(_) => "ves",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilySpec::CobbDouglas(p) => p.validate(),
            FamilySpec::Ces(p) => p.validate(),
            FamilySpec::LiuHildebrand(p) => p.check_lh_branch(),
            FamilySpec::LuFletcher(p) => p.validate(),
            FamilySpec::SatoHoffman(p) => p.validate(),
            FamilySpec::Ves(p) => p.validate(),
        }
    }

    /// Homogeneous of degree one (everything except Sato-Hoffman with `alpha != 1`).
    pub fn is_degree_one(&self) -> bool {
        !matches!(self, FamilySpec::SatoHoffman(s) if s.alpha != 1.0)
    }

    /// Output per worker `y(k)`.
    pub fn eval_intensive(&self, k: f64) -> Result<f64> {
        self.validate()?;
        check_k(k)?;
        let y = match self {
            FamilySpec::CobbDouglas(p) => p.scale * k.powf(p.beta),
            FamilySpec::Ces(p) => {
                let e = p.rho();
                p.gamma * (p.delta * k.powf(e) + (1.0 - p.delta)).powf(1.0 / e)
            }
            FamilySpec::LiuHildebrand(p) => {
                let e = (p.b - 1.0) / p.b;
                let base = p.xi * e * k.powf(e) + (p.b - 1.0) / (p.b + p.c - 1.0) * k.powf(-p.c / p.b);
                positive_bracket(base, k)?;
                p.a.powf(1.0 / (1.0 - p.b)) * base.powf(1.0 / e)
            }
            FamilySpec::LuFletcher(p) => {
                let e = (p.b - 1.0) / p.b;
                let base =
                    p.zeta * p.a.powf(1.0 / p.b) * k.powf(e) + (p.b - 1.0) / (p.b + p.c - 1.0) * k.powf(-p.c / p.b);
                positive_bracket(base, k)?;
                p.a.powf(1.0 / (1.0 - p.b)) * base.powf(1.0 / e)
            }
            FamilySpec::SatoHoffman(p) => {
                p.check_domain(k)?;
                let dr = p.delta * p.rho;
                p.gamma * k.powf(p.alpha * (1.0 - dr)) * (1.0 + (p.rho - 1.0) * k).powf(p.alpha * dr)
            }
            FamilySpec::Ves(v) => {
                let base = v.bracket(k);
                positive_bracket(base, k)?;
                v.psi * base.powf(1.0 / v.exponent_base())
            }
        };
        positive_output(y, k)
    }

    /// Total output `F(K, L)` from the family's two-factor closed form.
    pub fn eval_extensive(&self, capital: f64, labor: f64) -> Result<f64> {
        self.validate()?;
        if !(capital.is_finite() && capital > 0.0 && labor.is_finite() && labor > 0.0) {
            return Err(domain(format!("K and L must be finite and positive, got K = {capital}, L = {labor}")));
        }
        let k = capital / labor;
        let f = match self {
            FamilySpec::CobbDouglas(p) => p.scale * capital.powf(p.beta) * labor.powf(1.0 - p.beta),
            FamilySpec::Ces(p) => {
                let e = p.rho();
                p.gamma * (p.delta * capital.powf(e) + (1.0 - p.delta) * labor.powf(e)).powf(1.0 / e)
            }
            FamilySpec::LiuHildebrand(p) => {
                let e = (p.b - 1.0) / p.b;
                let base = p.xi * e * capital.powf(e)
                    + (p.b - 1.0) / (p.b + p.c - 1.0) * capital.powf(-p.c / p.b) * labor.powf((p.b + p.c - 1.0) / p.b);
                positive_bracket(base, k)?;
                p.a.powf(1.0 / (1.0 - p.b)) * base.powf(1.0 / e)
            }
            FamilySpec::LuFletcher(p) => {
                let e = (p.b - 1.0) / p.b;
                let base = p.zeta * p.a.powf(1.0 / p.b) * capital.powf(e)
                    + (p.b - 1.0) / (p.b + p.c - 1.0) * capital.powf(-p.c / p.b) * labor.powf((p.b + p.c - 1.0) / p.b);
                positive_bracket(base, k)?;
                p.a.powf(1.0 / (1.0 - p.b)) * base.powf(1.0 / e)
            }
            FamilySpec::SatoHoffman(p) => {
                p.check_domain(k)?;
                let dr = p.delta * p.rho;
                p.gamma * capital.powf(p.alpha * (1.0 - dr)) * (labor + (p.rho - 1.0) * capital).powf(p.alpha * dr)
            }
            FamilySpec::Ves(v) => {
                let s = v.exponent_base();
                let base = (1.0 + v.lambda) * capital.powf(1.0 - v.theta) * labor.powf(v.lambda * (1.0 - v.theta))
                    + v.mu * labor.powf(s);
                positive_bracket(base, k)?;
                v.psi * base.powf(1.0 / s)
            }
        };
        positive_output(f, k)
    }
}

fn positive_bracket(base: f64, k: f64) -> Result<()> {
    if base.is_finite() && base > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("bracketed base is non-positive at k = {k} ({base})")))
    }
}

/// Free-function form of [`FamilySpec::eval_intensive`].
pub fn eval_intensive(spec: &FamilySpec, k: f64) -> Result<f64> {
    spec.eval_intensive(k)
}

/// Free-function form of [`FamilySpec::eval_extensive`].
pub fn eval_extensive(spec: &FamilySpec, capital: f64, labor: f64) -> Result<f64> {
    spec.eval_extensive(capital, labor)
}

/// Maps rental-relation coefficients onto the structural parameters:
/// `theta = c/b`, `lambda = (c-1)/(b-c)`, `psi = a^(1/(1-b))`, `mu = xi (b-1) a^(1/b) / b`.
pub fn ves_from_loglinear(p: &LogLinearParams) -> Result<VesParams> {
    p.check_ves_branch()?;
    let LogLinearParams { a, b, c, xi } = *p;
    if xi == 0.0 {
        return Err(singular(
            "xi = 0 gives mu = 0: the VES form degenerates to a linear marginal rate of substitution",
        ));
    }
    let v = VesParams {
        lambda: (c - 1.0) / (b - c),
        mu: xi * (b - 1.0) * a.powf(1.0 / b) / b,
        theta: c / b,
        psi: a.powf(1.0 / (1.0 - b)),
    };
    v.validate()?;
    Ok(v)
}

/// Inverse of [`ves_from_loglinear`]: `b = 1 / (lambda (theta - 1) + theta)`, `c = b theta`.
pub fn loglinear_from_ves(v: &VesParams) -> Result<LogLinearParams> {
    v.validate()?;
    let denom = v.lambda * (v.theta - 1.0) + v.theta;
    if denom == 0.0 {
        return Err(singular("lambda (theta - 1) + theta = 0: no log-linear representation"));
    }
    let b = 1.0 / denom;
    let c = b * v.theta;
    if b <= 0.0 || c <= 0.0 {
        return Err(param(format!(
            "structural parameters map to b = {b}, c = {c}; the rental relation needs b, c > 0"
        )));
    }
    let a = v.psi.powf(1.0 - b);
    let xi = v.mu * b / ((b - 1.0) * a.powf(1.0 / b));
    Ok(LogLinearParams { a, b, c, xi })
}

/// Lu-Fletcher constant equivalent to a Liu-Hildebrand one: `zeta = xi (b-1) a^(-1/b) / b`.
pub fn lf_from_lh(p: &LogLinearParams) -> Result<LuFletcherParams> {
    p.check_lh_branch()?;
    Ok(LuFletcherParams { a: p.a, b: p.b, c: p.c, zeta: p.xi * (p.b - 1.0) * p.a.powf(-1.0 / p.b) / p.b })
}

pub fn lh_from_lf(p: &LuFletcherParams) -> Result<LogLinearParams> {
    p.validate()?;
    Ok(LogLinearParams { a: p.a, b: p.b, c: p.c, xi: p.zeta * p.b * p.a.powf(1.0 / p.b) / (p.b - 1.0) })
}

/// CES-like rewriting of the rental-rate solution:
/// `y = gamma [delta k^((b-1)/b) k^((1-c)/b) + (1 - delta)]^(b/(b-1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricForm {
    pub gamma: f64,
    pub delta: f64,
    pub b: f64,
    pub c: f64,
}

impl SymmetricForm {
    pub fn eval_intensive(&self, k: f64) -> Result<f64> {
        check_k(k)?;
        let b = self.b;
        let base = self.delta * k.powf((b - 1.0) / b) * k.powf((1.0 - self.c) / b) + (1.0 - self.delta);
        positive_bracket(base, k)?;
        positive_output(self.gamma * base.powf(b / (b - 1.0)), k)
    }
}

pub fn symmetric_form(p: &LogLinearParams) -> Result<SymmetricForm> {
    p.check_ves_branch()?;
    let LogLinearParams { a, b, c, xi } = *p;
    let lead = (1.0 - b) * a.powf(-1.0 / b) / (c - b);
    let gamma_pow = lead + xi * (b - 1.0) / b;
    if gamma_pow.is_nan() || gamma_pow <= 0.0 {
        return Err(domain(format!("gamma^((b-1)/b) = {gamma_pow} is not positive; no real symmetric form")));
    }
    let gamma = gamma_pow.powf(b / (b - 1.0));
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(domain(format!("gamma = {gamma} is not a finite positive scale")));
    }
    Ok(SymmetricForm { gamma, delta: lead / gamma_pow, b, c })
}

/// Collapses regression-space parameters onto Cobb-Douglas (`|b| <= tol`) or
/// CES (`|c - 1| <= tol`); otherwise returns the general VES function.
///
/// Fails only when the parameters fit no family at all (for example `b = c`
/// away from both special cases).
pub fn reduce_special_case(p: &LogLinearParams, tol: f64) -> Result<FamilySpec> {
    p.validate()?;
    if p.b.abs() <= tol {
        let cd = CobbDouglasParams::new(p.a, p.c)?;
        return Ok(FamilySpec::CobbDouglas(cd));
    }
    if (p.c - 1.0).abs() <= tol {
        let exact = LogLinearParams { c: 1.0, ..*p };
        if let Ok(sym) = symmetric_form(&exact) {
            if let Ok(ces) = CesParams::new(sym.gamma, sym.delta, p.b) {
                return Ok(FamilySpec::Ces(ces));
            }
        }
    }
    ves_from_loglinear(p).map(FamilySpec::Ves)
}

/// CES equivalent of the Liu-Hildebrand function at `c = 0`:
/// `sigma = b`, `delta = xi (b-1) / (b + xi (b-1))`.
pub fn ces_from_liu_hildebrand(p: &LogLinearParams) -> Result<CesParams> {
    p.check_lh_branch()?;
    if p.c != 0.0 {
        return Err(param(format!("the CES reduction needs c = 0, got c = {}", p.c)));
    }
    let LogLinearParams { a, b, xi, .. } = *p;
    let t = xi * (b - 1.0);
    let delta = t / (b + t);
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("implied CES distribution parameter {delta} is outside (0, 1)")));
    }
    let gamma = a.powf(1.0 / (1.0 - b)) * (1.0 - delta).powf(-b / (b - 1.0));
    CesParams::new(gamma, delta, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_A: f64 = 0.773454;
    const B: f64 = 0.934369;
    const C: f64 = 1.191951;

    fn rental_fit(xi: f64) -> LogLinearParams {
        LogLinearParams::new(LN_A.exp(), B, C, xi).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn ves_hand_values() {
        let v = FamilySpec::Ves(VesParams::new(0.0, 1.0, 2.0, 1.0).unwrap());
        assert!((v.eval_intensive(1.0).unwrap() - 0.5).abs() < 1e-15);
        let v2 = FamilySpec::Ves(VesParams::new(0.0, 1.0, 2.0, 2.0).unwrap());
        assert!((v2.eval_intensive(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((v.eval_extensive(2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        // y = k / (1 + k)
        for k in [0.1, 0.7, 3.0, 40.0] {
            assert!(rel(v.eval_intensive(k).unwrap(), k / (1.0 + k)) < 1e-14);
        }
    }

    #[test]
    fn ces_symmetric_point() {
        let ces = FamilySpec::Ces(CesParams::new(1.0, 0.5, 0.5).unwrap());
        assert!((ces.eval_intensive(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cd_extensive() {
        let cd = FamilySpec::CobbDouglas(CobbDouglasParams::new(2.0, 0.4).unwrap());
        assert!((cd.eval_extensive(8.0, 8.0).unwrap() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn extensive_matches_intensive_at_unit_labor() {
        let specs = [
            FamilySpec::Ves(ves_from_loglinear(&rental_fit(-3.79)).unwrap()),
            FamilySpec::LiuHildebrand(LogLinearParams::new(1.0, 0.5, 0.2, -1.0).unwrap()),
            FamilySpec::SatoHoffman(SatoHoffmanParams::new(1.3, 0.5, 0.5).unwrap()),
            FamilySpec::Ces(CesParams::new(1.2, 0.3, 0.6).unwrap()),
        ];
        for s in specs {
            for k in [0.3, 1.1, 1.4] {
                let k = if matches!(s, FamilySpec::Ves(_)) { k + 2.1 } else { k };
                let a = s.eval_extensive(k, 1.0).unwrap();
                let b = s.eval_intensive(k).unwrap();
                assert!(rel(a, b) < 1e-13, "{} at {k}: {a} vs {b}", s.name());
            }
        }
    }

    #[test]
    fn fitted_ves_is_homogeneous() {
        let v = FamilySpec::Ves(ves_from_loglinear(&rental_fit(-3.79)).unwrap());
        let one = v.eval_extensive(2.0799, 1.0).unwrap();
        let seven = v.eval_extensive(7.0 * 2.0799, 7.0).unwrap();
        assert!(rel(seven, 7.0 * one) < 1e-12);
    }

    #[test]
    fn structural_map_of_rental_fit() {
        let v = ves_from_loglinear(&rental_fit(-3.79)).unwrap();
        assert!((v.theta - 1.275675).abs() < 5e-7);
        assert!((v.lambda + 0.745203).abs() < 5e-7);
        assert!((v.mu - 0.160728 * 3.79).abs() < 1e-5);
    }

    #[test]
    fn unit_c_gives_zero_lambda() {
        let v = ves_from_loglinear(&LogLinearParams::new(1.7, 0.5, 1.0, -2.0).unwrap()).unwrap();
        assert_eq!(v.lambda, 0.0);
        assert_eq!(v.theta, 2.0);
    }

    #[test]
    fn equal_b_and_c_rejected() {
        let p = LogLinearParams::new(1.2, 0.7, 0.7, -1.0).unwrap();
        assert!(matches!(ves_from_loglinear(&p), Err(crate::Error::Param(_))));
        let zero_xi = LogLinearParams::new(1.2, 0.7, 0.9, 0.0).unwrap();
        assert!(matches!(ves_from_loglinear(&zero_xi), Err(crate::Error::Singular(_))));
    }

    #[test]
    fn structural_round_trip() {
        let p = rental_fit(-3.79);
        let back = loglinear_from_ves(&ves_from_loglinear(&p).unwrap()).unwrap();
        assert!(rel(back.b, B) < 1e-10);
        assert!(rel(back.c, C) < 1e-10);
        assert!(rel(back.a, p.a) < 1e-10);
        assert!(rel(back.xi, -3.79) < 1e-10);

        let ces_like = loglinear_from_ves(&VesParams::new(0.0, 0.4, 2.0, 1.5).unwrap()).unwrap();
        assert!((ces_like.b - 0.5).abs() < 1e-15 && (ces_like.c - 1.0).abs() < 1e-15);
        let b08 = loglinear_from_ves(&VesParams::new(0.0, 0.4, 1.0 / 0.8, 1.5).unwrap()).unwrap();
        assert!(rel(b08.b, 0.8) < 1e-15 && rel(b08.c, 1.0) < 1e-15);
    }

    #[test]
    fn singular_log_linear_map() {
        // lambda (theta - 1) + theta = -2 * 1 + 2 = 0
        let v = VesParams::new(-2.0, 1.0, 2.0, 1.0).unwrap();
        assert!(matches!(loglinear_from_ves(&v), Err(crate::Error::Singular(_))));
    }

    #[test]
    fn zeta_mapping() {
        let lf = lf_from_lh(&LogLinearParams::new(1.0, 0.5, 0.2, -1.0).unwrap()).unwrap();
        assert!((lf.zeta - 1.0).abs() < 1e-15);
        let lf0 = lf_from_lh(&LogLinearParams::new(2.0, 0.5, 0.2, 0.0).unwrap()).unwrap();
        assert_eq!(lf0.zeta, 0.0);
        let back = lh_from_lf(&lf).unwrap();
        assert!((back.xi + 1.0).abs() < 1e-15);
    }

    #[test]
    fn lh_and_lf_agree_on_wage_fit() {
        let lh = LogLinearParams::new(0.337698_f64.exp(), 0.942627, 0.057061, -1.0).unwrap();
        let lf = lf_from_lh(&lh).unwrap();
        for i in 0..40 {
            let k = 0.5 * 1.1_f64.powi(i);
            let a = FamilySpec::LiuHildebrand(lh).eval_intensive(k);
            let b = FamilySpec::LuFletcher(lf).eval_intensive(k);
            match (a, b) {
                (Ok(a), Ok(b)) => assert!(rel(a, b) < 1e-10),
                (Err(_), Err(_)) => {}
                other => panic!("domains disagree at {k}: {other:?}"),
            }
        }
    }

    #[test]
    fn symmetric_form_matches_rental_solution() {
        let p = rental_fit(-3.79);
        let sym = symmetric_form(&p).unwrap();
        let ves = FamilySpec::Ves(ves_from_loglinear(&p).unwrap());
        for i in 0..100 {
            let k = 0.05 * 10f64.powf(i as f64 * 3.0 / 99.0);
            assert!(rel(sym.eval_intensive(k).unwrap(), ves.eval_intensive(k).unwrap()) < 1e-12);
        }
        assert_eq!(sym.delta + (1.0 - sym.delta), 1.0);
    }

    #[test]
    fn symmetric_form_rejects_non_positive_base() {
        // b < c < 1 with xi > 0 pushes the sum negative for large xi
        let p = LogLinearParams::new(1.0, 0.5, 0.8, 50.0).unwrap();
        assert!(matches!(symmetric_form(&p), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn reductions() {
        let cd =
            reduce_special_case(&LogLinearParams::new(2.0, 0.0, 0.4, -1.0).unwrap(), DEFAULT_REDUCTION_TOL).unwrap();
        assert_eq!(cd, FamilySpec::CobbDouglas(CobbDouglasParams { scale: 2.0, beta: 0.4 }));

        let ces =
            reduce_special_case(&LogLinearParams::new(1.3, 0.6, 1.0, -2.0).unwrap(), DEFAULT_REDUCTION_TOL).unwrap();
        match ces {
            FamilySpec::Ces(c) => assert_eq!(c.sigma, 0.6),
            other => panic!("expected CES, got {other:?}"),
        }

        let p = rental_fit(-3.79);
        assert_eq!(
            reduce_special_case(&p, DEFAULT_REDUCTION_TOL).unwrap(),
            FamilySpec::Ves(ves_from_loglinear(&p).unwrap())
        );
    }

    #[test]
    fn lh_at_zero_c_is_ces() {
        let p = LogLinearParams::new(1.4, 0.7, 0.0, -2.0).unwrap();
        let ces = ces_from_liu_hildebrand(&p).unwrap();
        assert_eq!(ces.sigma, 0.7);
        let t = -2.0 * (0.7 - 1.0);
        assert!((ces.delta - t / (0.7 + t)).abs() < 1e-15);
        for k in [0.2, 1.0, 5.0] {
            let a = FamilySpec::LiuHildebrand(p).eval_intensive(k).unwrap();
            let b = FamilySpec::Ces(ces).eval_intensive(k).unwrap();
            assert!(rel(a, b) < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        let v = FamilySpec::Ves(VesParams::new(-2.0, 1.0, 2.0, 1.0).unwrap());
        // bracket = -k^-1 + 1 <= 0 for k <= 1
        assert!(matches!(v.eval_intensive(0.5), Err(crate::Error::Domain(_))));
        assert!(v.eval_intensive(2.0).is_ok());
        assert!(matches!(v.eval_intensive(-1.0), Err(crate::Error::Domain(_))));
        let sh = FamilySpec::SatoHoffman(SatoHoffmanParams::new(1.0, 0.5, 0.5).unwrap());
        assert!(matches!(sh.eval_intensive(1.6), Err(crate::Error::Domain(_))));
        assert!(sh.eval_intensive(1.4).is_ok());
    }

    #[test]
    fn invariant_violations() {
        assert!(VesParams::new(-1.0, 1.0, 2.0, 1.0).is_err());
        assert!(VesParams::new(0.0, 0.0, 2.0, 1.0).is_err());
        assert!(VesParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(VesParams::new(0.0, 1.0, 2.0, 0.0).is_err());
        assert!(CesParams::new(1.0, 0.5, 1.0).is_err());
        assert!(CobbDouglasParams::new(1.0, 1.0).is_err());
        assert!(SatoHoffmanParams::new(1.0, 0.5, 3.0).is_err());
        assert!(LogLinearParams::new(0.0, 0.5, 0.5, 1.0).is_err());
        let lh = LogLinearParams::new(1.0, 0.4, 0.6, -1.0).unwrap();
        assert!(lh.check_lh_branch().is_err());
    }
}
