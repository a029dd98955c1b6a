use clap::{Args, ValueEnum};

use ves_core::families::{lf_from_lh, ves_from_loglinear};
use ves_core::{
    CesParams, CobbDouglasParams, FamilySpec, LogLinearParams, LuFletcherParams, SatoHoffmanParams, VesParams,
};

use crate::format::number;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Cd,
    Ces,
    Lh,
    Lf,
    Sh,
    Ves,
}

/// Parameter flags shared by the subcommands. Which ones apply depends on `--family`.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_enum, default_value = "ves")]
    pub family: Family,

    /// Cobb-Douglas scale.
    #[arg(long = "A", value_parser = number, allow_negative_numbers = true)]
    pub scale: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub beta: Option<f64>,

    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Regression space: ln y = ln a + b ln(price) + c ln k, integration constant xi.
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub zeta: Option<f64>,

    /// Structural space: R(k) = lambda k + mu k^theta, scale psi.
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = number, allow_negative_numbers = true)]
    pub psi: Option<f64>,
}

const ALL: [&str; 16] = [
    "A", "beta", "gamma", "delta", "sigma", "rho", "alpha", "a", "b", "c", "xi", "zeta", "lambda", "mu", "theta", "psi",
];

impl ParamArgs {
    fn value(&self, name: &str) -> Option<f64> {
        match name {
            "A" => self.scale,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "delta" => self.delta,
            "sigma" => self.sigma,
            "rho" => self.rho,
            "alpha" => self.alpha,
            "a" => self.a,
            "b" => self.b,
            "c" => self.c,
            "xi" => self.xi,
            "zeta" => self.zeta,
            "lambda" => self.lambda,
            "mu" => self.mu,
            "theta" => self.theta,
            "psi" => self.psi,
            _ => None,
        }
    }

    fn given(&self, names: &[&str]) -> bool {
        names.iter().any(|n| self.value(n).is_some())
    }

    fn need(&self, name: &str) -> Result<f64, CliError> {
        self.value(name).ok_or_else(|| CliError::Usage(format!("--family {} needs --{name}", self.family_flag())))
    }

    fn family_flag(&self) -> &'static str {
        match self.family {
            Family::Cd => "cd",
            Family::Ces => "ces",
            Family::Lh => "lh",
            Family::Lf => "lf",
            Family::Sh => "sh",
            Family::Ves => "ves",
        }
    }

    /// Rejects flags outside `allowed`.
    fn only(&self, allowed: &[&str]) -> Result<(), CliError> {
        let stray: Vec<String> =
            ALL.iter().filter(|n| !allowed.contains(n) && self.value(n).is_some()).map(|n| format!("--{n}")).collect();
        if stray.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("{} not used by --family {}", stray.join(", "), self.family_flag())))
        }
    }

    /// Regression-space parameters `(a, b, c, xi)`; `xi` defaults to `xi_default` when given.
    pub fn loglinear(&self, xi_default: Option<f64>) -> Result<LogLinearParams, CliError> {
        let xi = match (self.xi, xi_default) {
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => self.need("xi")?,
        };
        Ok(LogLinearParams::new(self.need("a")?, self.need("b")?, self.need("c")?, xi)?)
    }

    /// Regression-space parameters for the VES relation, rejecting any other flag.
    pub fn regression(&self, xi_default: Option<f64>) -> Result<LogLinearParams, CliError> {
        if self.family != Family::Ves {
            return Err(CliError::Usage(format!("this command needs --family ves, got {}", self.family_flag())));
        }
        self.only(&["a", "b", "c", "xi"])?;
        self.loglinear(xi_default)
    }

    /// Copy with a different `--family`.
    pub fn as_family(&self, family: Family) -> Self {
        Self { family, ..self.clone() }
    }

    fn structural(&self) -> Result<VesParams, CliError> {
        Ok(VesParams::new(self.need("lambda")?, self.need("mu")?, self.need("theta")?, self.need("psi")?)?)
    }

    /// True when the VES parameters are given as `(lambda, mu, theta, psi)`.
    pub fn is_structural(&self) -> bool {
        self.given(&["lambda", "mu", "theta", "psi"])
    }

    pub fn ves(&self) -> Result<VesParams, CliError> {
        if self.family != Family::Ves {
            return Err(CliError::Usage(format!("this command needs --family ves, got {}", self.family_flag())));
        }
        self.spec().map(|s| match s {
            FamilySpec::Ves(v) => v,
            _ => unreachable!(),
        })
    }

    pub fn spec(&self) -> Result<FamilySpec, CliError> {
        Ok(match self.family {
            Family::Cd => {
                self.only(&["A", "beta"])?;
                FamilySpec::CobbDouglas(CobbDouglasParams::new(self.need("A")?, self.need("beta")?)?)
            }
            Family::Ces => {
                self.only(&["gamma", "delta", "sigma"])?;
                FamilySpec::Ces(CesParams::new(self.need("gamma")?, self.need("delta")?, self.need("sigma")?)?)
            }
            Family::Lh => {
                self.only(&["a", "b", "c", "xi"])?;
                let p = self.loglinear(None)?;
                p.check_lh_branch()?;
                FamilySpec::LiuHildebrand(p)
            }
            Family::Lf => {
                if self.xi.is_some() && self.zeta.is_none() {
                    self.only(&["a", "b", "c", "xi"])?;
                    FamilySpec::LuFletcher(lf_from_lh(&self.loglinear(None)?)?)
                } else {
                    self.only(&["a", "b", "c", "zeta"])?;
                    FamilySpec::LuFletcher(LuFletcherParams::new(
                        self.need("a")?,
                        self.need("b")?,
                        self.need("c")?,
                        self.need("zeta")?,
                    )?)
                }
            }
            Family::Sh => {
                self.only(&["gamma", "delta", "rho", "alpha"])?;
                let (g, d, r) = (self.need("gamma")?, self.need("delta")?, self.need("rho")?);
                FamilySpec::SatoHoffman(SatoHoffmanParams::with_alpha(g, d, r, self.alpha.unwrap_or(1.0))?)
            }
            Family::Ves => {
                self.only(&["a", "b", "c", "xi", "lambda", "mu", "theta", "psi"])?;
                let regression = self.given(&["a", "b", "c", "xi"]);
                match (regression, self.is_structural()) {
                    (true, true) => {
                        return Err(CliError::Usage(
                            "give either --lambda/--mu/--theta/--psi or --a/--b/--c/--xi, not both".into(),
                        ))
                    }
                    (true, false) => {
                        let p = self.loglinear(None)?;
                        p.check_ves_branch()?;
                        FamilySpec::Ves(ves_from_loglinear(&p)?)
                    }
                    (false, _) => FamilySpec::Ves(self.structural()?),
                }
            }
        })
    }
}
