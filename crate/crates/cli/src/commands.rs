use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use ves_core::estimation::{calibrate_xi as solve_xi, diagnose_fit, fit_loglinear, load_dataset, Relation};
use ves_core::families::{ces_from_liu_hildebrand, reduce_special_case, ves_from_loglinear, DEFAULT_REDUCTION_TOL};
use ves_core::grid::log_spaced;
use ves_core::oracles::{
    default_grid, verify_equivalence_lh_lf, verify_family_with, verify_ode, verify_reduction, verify_sato_hoffman,
    VerificationReport, DERIVATIVE_TOL, IDENTITY_TOL,
};
use ves_core::substitution::{
    classify_regime, mrs_closed, mrs_derivative_closed, sigma_closed, sigma_derivative_closed, validity_range,
};
use ves_core::{FamilySpec, VesParams};

use crate::format::{number, sig12};
use crate::params::{Family, ParamArgs};
use crate::{CliError, Status};

type Out<'a> = dyn Write + 'a;

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Default probe for validity ranges when no k range is given.
const PROBE: (f64, f64) = (1e-3, 1e3);

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Capital-labor ratio.
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Capital, with --L.
    #[arg(long = "K", value_parser = number, allow_negative_numbers = true)]
    capital: Option<f64>,
    /// Labor, with --K.
    #[arg(long = "L", value_parser = number, allow_negative_numbers = true)]
    labor: Option<f64>,
}

pub fn eval(a: &EvalArgs, out: &mut Out) -> Result<Status, CliError> {
    let spec = a.params.spec()?;
    let value = match (a.k, a.capital, a.labor) {
        (Some(k), None, None) => spec.eval_intensive(k)?,
        (None, Some(capital), Some(labor)) => spec.eval_extensive(capital, labor)?,
        _ => return Err(CliError::Usage("give either --k or both --K and --L".into())),
    };
    writeln!(out, "{}", sig12(value)).map_err(io)?;
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RelationArg {
    Rental,
    Wage,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Delimited text with columns period, y, k and r or w.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "rental")]
    relation: RelationArg,
    /// Also print degeneracy diagnostics.
    #[arg(long)]
    diagnose: bool,
}

pub fn fit(a: &FitArgs, out: &mut Out) -> Result<Status, CliError> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", a.input.display())))?;
    let data = load_dataset(&text)?;
    let relation = match a.relation {
        RelationArg::Rental => Relation::Rental,
        RelationArg::Wage => Relation::Wage,
    };
    let f = fit_loglinear(&data, relation)?;
    let price = relation.price_column();
    let cols = [f.intercept_ln_a, f.b_hat, f.c_hat];

    let mut s = String::new();
    s += &format!("ln y = ln a + b ln {price} + c ln k   ({relation} relation, {} observations)\n\n", f.n_obs);
    s += &format!("{:<12}{:<20}{:<20}{}\n", "", "ln a", "b", "c");
    s += &format!(
        "{:<12}{:<20}{:<20}{}\n",
        "estimate",
        sig12(cols[0].value),
        sig12(cols[1].value),
        sig12(cols[2].value)
    );
    let se: Vec<String> = cols.iter().map(|e| format!("({})", sig12(e.std_error))).collect();
    s += &format!("{:<12}{:<20}{:<20}{}\n\n", "std error", se[0], se[1], se[2]);
    s += &format!("{:<20}{}\n", "R^2", sig12(f.r_squared));
    s += &format!("{:<20}{}\n", "residual variance", sig12(f.residual_variance));

    if a.diagnose {
        let d = diagnose_fit(&data, &f);
        s += "\n";
        s += &format!("{:<20}{}\n", "b + c", sig12(d.b_plus_c));
        s += &format!("{:<20}{}\n", "|b + c - 1|", sig12(d.dist_to_unity));
        s += &format!("{:<20}{}\n", "c / se(c)", sig12(d.c_significance));
        if let Some((lo, hi)) = d.capital_share_range {
            s += &format!("{:<20}[{}, {}]\n", "capital share", sig12(lo), sig12(hi));
        }
        if d.unity_degenerate {
            s += "b+c within 1e-6 of unity: marginal rate of substitution degenerates\n";
        }
        if d.share_restriction_violated {
            s += "observed capital share reaches c: the restriction c y - k y' > 0 fails\n";
        }
    }
    out.write_all(s.as_bytes()).map_err(io)?;
    Ok(Status::Ok)
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = number)]
    k_from: f64,
    #[arg(long, value_parser = number)]
    k_to: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
}

/// Relative distance kept from a validity boundary that cuts into the requested range.
const CLIP_MARGIN: f64 = 1e-3;

pub fn trajectory(a: &TrajectoryArgs, out: &mut Out) -> Result<Status, CliError> {
    let spec = a.params.spec()?;
    if a.points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {}", a.points)));
    }
    if !(a.k_from > 0.0 && a.k_to > a.k_from) {
        return Err(CliError::Usage("need 0 < --k-from < --k-to".into()));
    }
    let iv = validity_range(&spec, a.k_from, a.k_to);
    let Some((lo, hi)) = iv.bounds else {
        let failing: Vec<String> = iv.constraints_active.iter().map(|c| c.to_string()).collect();
        return Err(CliError::Usage(format!(
            "[{}, {}] does not meet the validity range ({} fails throughout)",
            a.k_from,
            a.k_to,
            failing.join(", ")
        )));
    };
    let lo = if lo > a.k_from { lo * (1.0 + CLIP_MARGIN) } else { lo };
    let hi = if hi < a.k_to { hi * (1.0 - CLIP_MARGIN) } else { hi };
    if lo >= hi {
        return Err(CliError::Usage(format!("the validity range inside [{}, {}] is too narrow", a.k_from, a.k_to)));
    }

    let mut s = String::from("k,y,R,R_prime,sigma,sigma_prime\n");
    for k in log_spaced(lo, hi, a.points) {
        let row = [
            k,
            spec.eval_intensive(k)?,
            mrs_closed(&spec, k)?,
            mrs_derivative_closed(&spec, k)?,
            sigma_closed(&spec, k)?,
            sigma_derivative_closed(&spec, k)?,
        ];
        s += &row.iter().map(|v| sig12(*v)).collect::<Vec<_>>().join(",");
        s.push('\n');
    }
    out.write_all(s.as_bytes()).map_err(io)?;
    Ok(Status::Ok)
}

#[derive(Debug, Args)]
pub struct RegimeArgs {
    #[command(flatten)]
    params: ParamArgs,
}

pub fn regime(a: &RegimeArgs, out: &mut Out) -> Result<Status, CliError> {
    let rep = classify_regime(&a.params.spec()?)?;
    writeln!(out, "{}, limit {}, {}", rep.case_label, sig12(rep.sigma_limit), rep.monotonicity).map_err(io)?;
    Ok(Status::Ok)
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Capital-labor ratio at which R(k) should vanish.
    #[arg(long, value_parser = number)]
    k0: f64,
}

pub fn calibrate_xi(a: &CalibrateArgs, out: &mut Out) -> Result<Status, CliError> {
    if a.params.xi.is_some() {
        return Err(CliError::Usage("calibrate-xi computes xi; drop --xi".into()));
    }
    let p = a.params.regression(Some(0.0))?;
    let xi = solve_xi(p.a, p.b, p.c, a.k0)?;
    let spec = FamilySpec::Ves(ves_from_loglinear(&ves_core::LogLinearParams { xi, ..p })?);
    let end = if mrs_derivative_closed(&spec, a.k0)? > 0.0 { "lower" } else { "upper" };
    writeln!(out, "{}", sig12(xi)).map_err(io)?;
    writeln!(
        out,
        "criterion: R(k0) = 0, so k0 = {} is the {end} end of the validity range; pass --xi elsewhere to use another value",
        sig12(a.k0)
    )
    .map_err(io)?;
    Ok(Status::Ok)
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Distance from b = 0 or c = 1 treated as exact.
    #[arg(long, value_parser = number, default_value_t = DEFAULT_REDUCTION_TOL)]
    tol: f64,
}

fn describe(spec: &FamilySpec) -> String {
    let fields: Vec<(&str, f64)> = match spec {
        FamilySpec::CobbDouglas(p) => vec![("A", p.scale), ("beta", p.beta)],
        FamilySpec::Ces(p) => vec![("gamma", p.gamma), ("delta", p.delta), ("sigma", p.sigma)],
        FamilySpec::Ves(v) => vec![("lambda", v.lambda), ("mu", v.mu), ("theta", v.theta), ("psi", v.psi)],
        FamilySpec::LiuHildebrand(p) => vec![("a", p.a), ("b", p.b), ("c", p.c), ("xi", p.xi)],
        FamilySpec::LuFletcher(p) => vec![("a", p.a), ("b", p.b), ("c", p.c), ("zeta", p.zeta)],
        FamilySpec::SatoHoffman(p) => {
            vec![("gamma", p.gamma), ("delta", p.delta), ("rho", p.rho), ("alpha", p.alpha)]
        }
    };
    let parts: Vec<String> = fields.iter().map(|(n, v)| format!("{n} = {}", sig12(*v))).collect();
    format!("{}: {}", spec.name(), parts.join(", "))
}

pub fn reduce(a: &ReduceArgs, out: &mut Out) -> Result<Status, CliError> {
    let b = a.params.b.ok_or_else(|| CliError::Usage("reduce needs --b".into()))?;
    let xi_default = (b.abs() <= a.tol).then_some(0.0);
    let p = a.params.regression(xi_default)?;
    let spec = reduce_special_case(&p, a.tol)?;
    writeln!(out, "{}", describe(&spec)).map_err(io)?;
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Family,
    Equivalence,
    Ode,
    SatoHoffman,
    Reduction,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = number)]
    k_from: Option<f64>,
    #[arg(long, value_parser = number)]
    k_to: Option<f64>,
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Relative tolerance; defaults to 1e-6 for derivative checks, 1e-9 for the
    /// ODE and 1e-10 for identities.
    #[arg(long, value_parser = number)]
    tol: Option<f64>,
    /// Runge-Kutta steps per grid interval.
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Multiplies the closed-form sigma, to exercise the failure path.
    #[arg(long, value_parser = number, hide = true)]
    corrupt_sigma: Option<f64>,
}

impl VerifyArgs {
    /// Explicit `--k-from/--k-to` grid, or `None` when neither is given.
    fn explicit_grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        match (self.k_from, self.k_to) {
            (None, None) => Ok(None),
            (Some(lo), Some(hi)) if lo > 0.0 && hi > lo && self.points >= 2 => {
                Ok(Some(log_spaced(lo, hi, self.points)))
            }
            _ => Err(CliError::Usage("need 0 < --k-from < --k-to and --points >= 2".into())),
        }
    }

    fn validity_grid(&self, spec: &FamilySpec) -> Result<Vec<f64>, CliError> {
        if let Some(g) = self.explicit_grid()? {
            return Ok(g);
        }
        let iv = validity_range(spec, PROBE.0, PROBE.1);
        let (lo, hi) =
            iv.bounds.ok_or_else(|| CliError::Usage(format!("no admissible k in [{}, {}]", PROBE.0, PROBE.1)))?;
        Ok(log_spaced(lo, hi, self.points))
    }
}

fn print_report(rep: &VerificationReport, out: &mut Out) -> Result<Status, CliError> {
    writeln!(
        out,
        "{}: {}, max rel error {:.3e} (tolerance {:.1e}), points checked {}",
        rep.check_name,
        if rep.passed { "PASS" } else { "FAIL" },
        rep.max_rel_error,
        rep.tolerance,
        rep.points_checked
    )
    .map_err(io)?;
    writeln!(
        out,
        "worst: {} at k = {}, max abs error {:.3e}",
        rep.worst_quantity,
        sig12(rep.worst_k),
        rep.max_abs_error
    )
    .map_err(io)?;
    Ok(if rep.passed { Status::Ok } else { Status::VerificationFailed })
}

pub fn verify(a: &VerifyArgs, out: &mut Out) -> Result<Status, CliError> {
    if a.corrupt_sigma.is_some() && a.suite != Suite::Family {
        return Err(CliError::Usage("--corrupt-sigma applies to --suite family only".into()));
    }
    let rep = match a.suite {
        Suite::Family => {
            let spec = a.params.spec()?;
            let grid = match a.explicit_grid()? {
                Some(g) => g,
                None => default_grid(&spec, PROBE.0, PROBE.1, a.points)?,
            };
            let factor = a.corrupt_sigma.unwrap_or(1.0);
            verify_family_with(&spec, &grid, a.tol.unwrap_or(DERIVATIVE_TOL), |s, k| {
                sigma_closed(s, k).map(|x| x * factor)
            })?
        }
        Suite::Equivalence => {
            let spec = a.params.as_family(Family::Lh).spec()?;
            let FamilySpec::LiuHildebrand(p) = spec else { unreachable!() };
            verify_equivalence_lh_lf(&p, &a.validity_grid(&spec)?, a.tol.unwrap_or(IDENTITY_TOL))?
        }
        Suite::Ode => {
            let params = a.params.as_family(Family::Ves);
            let v = if params.is_structural() || params.a.is_some() || params.b.is_some() {
                params.ves()?
            } else {
                VesParams::new(0.0, 1.0, 2.0, 1.0)?
            };
            let grid = a.explicit_grid()?.unwrap_or_else(|| vec![1.0, 2.0]);
            verify_ode(&v, &grid, a.steps, a.tol.unwrap_or(1e-9))?
        }
        Suite::SatoHoffman => {
            let FamilySpec::SatoHoffman(s) = a.params.as_family(Family::Sh).spec()? else { unreachable!() };
            let grid = match a.explicit_grid()? {
                Some(g) => g,
                None => log_spaced(1e-2, s.k_max().map_or(1e2, |m| (0.99 * m).min(1e2)), a.points),
            };
            verify_sato_hoffman(&s, &grid, a.tol.unwrap_or(DERIVATIVE_TOL))?
        }
        Suite::Reduction => {
            let spec = a.params.spec()?;
            let target = match spec {
                FamilySpec::LiuHildebrand(p) if p.c == 0.0 => FamilySpec::Ces(ces_from_liu_hildebrand(&p)?),
                FamilySpec::Ves(_) if (a.params.c.unwrap_or(f64::NAN) - 1.0).abs() <= DEFAULT_REDUCTION_TOL => {
                    reduce_special_case(&a.params.regression(None)?, DEFAULT_REDUCTION_TOL)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "the reduction suite needs --family ves with --c 1, or --family lh with --c 0".into(),
                    ))
                }
            };
            if !matches!(target, FamilySpec::Ces(_)) {
                return Err(CliError::Usage(format!("these parameters reduce to {}, not ces", target.name())));
            }
            verify_reduction(&spec, &target, &a.validity_grid(&spec)?, a.tol.unwrap_or(IDENTITY_TOL))?
        }
    };
    print_report(&rep, out)
}
