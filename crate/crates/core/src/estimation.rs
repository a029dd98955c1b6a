//! Data ingestion, OLS fits of the two log-linear relations, fit diagnostics,
//! and calibration of the integration constant `xi`.
//!
//! Input format: a comma-separated header naming `period`, `y`, `k` and
//! optionally `r` (rental rate) and `w` (wage rate), in any order and any
//! letter case. Other columns are ignored.

use std::collections::HashSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{singular, Error, Result};
use crate::families::LogLinearParams;

/// Coefficients of a three-regressor fit.
pub const MIN_OBSERVATIONS: usize = 4;

/// `|b + c - 1|` below which the wage relation is flagged as degenerate.
pub const UNITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub period: String,
    pub y: f64,
    pub k: f64,
    pub r: Option<f64>,
    pub w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub rows: Vec<Observation>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_rental(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|o| o.r.is_some())
    }

    pub fn has_wage(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|o| o.w.is_some())
    }
}

/// Which log-linear relation to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `ln y = ln a + b ln r + c ln k`.
    Rental,
    /// `ln y = ln a + b ln w + c ln k`.
    Wage,
}

impl Relation {
    pub fn price_column(&self) -> &'static str {
        match self {
            Relation::Rental => "r",
            Relation::Wage => "w",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Rental => "rental",
            Relation::Wage => "wage",
        })
    }
}

fn parse_positive(row: usize, column: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|e| Error::Parse {
        row,
        column: column.to_string(),
        message: format!("`{raw}` is not a decimal number ({e})"),
    })?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::Validation {
            row,
            message: format!("{column} = {raw} must be finite and strictly positive"),
        });
    }
    Ok(v)
}

/// Parses delimited text. Rows are numbered from 1 after the header.
pub fn load_dataset(source: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source.as_bytes());
    let headers =
        reader.headers().map_err(|e| Error::Parse { row: 0, column: String::new(), message: e.to_string() })?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let required = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.to_string()));
    let (ip, iy, ik) = (required("period")?, required("y")?, required("k")?);
    let (ir, iw) = (find("r"), find("w"));

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Parse { row, column: String::new(), message: e.to_string() })?;
        let cell = |i: usize, name: &str| {
            record.get(i).ok_or_else(|| Error::Parse { row, column: name.to_string(), message: "missing field".into() })
        };
        let period = cell(ip, "period")?.to_string();
        if period.is_empty() {
            return Err(Error::Validation { row, message: "empty period label".into() });
        }
        if !seen.insert(period.clone()) {
            return Err(Error::Validation { row, message: format!("duplicate period `{period}`") });
        }
        let y = parse_positive(row, "y", cell(iy, "y")?)?;
        let k = parse_positive(row, "k", cell(ik, "k")?)?;
        let r = ir.map(|i| cell(i, "r").and_then(|s| parse_positive(row, "r", s))).transpose()?;
        let w = iw.map(|i| cell(i, "w").and_then(|s| parse_positive(row, "w", s))).transpose()?;
        rows.push(Observation { period, y, k, r, w });
    }
    Ok(Dataset { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub relation: Relation,
    pub intercept_ln_a: Estimate,
    pub b_hat: Estimate,
    pub c_hat: Estimate,
    /// Residual sum of squares over `n - 3`.
    pub residual_variance: f64,
    pub r_squared: f64,
    pub n_obs: usize,
    /// Residuals `ln y - fitted`, in row order.
    pub residuals: Vec<f64>,
}

impl FitReport {
    /// `(a, b, c)` with the given integration constant.
    pub fn params(&self, xi: f64) -> LogLinearParams {
        LogLinearParams { a: self.intercept_ln_a.value.exp(), b: self.b_hat.value, c: self.c_hat.value, xi }
    }
}

/// Regressor matrix `[1, ln price, ln k]` and response `ln y`.
pub fn design_matrix(d: &Dataset, relation: Relation) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let column = relation.price_column();
    let price: Vec<f64> = d
        .rows
        .iter()
        .map(|o| match relation {
            Relation::Rental => o.r,
            Relation::Wage => o.w,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::MissingColumn(column.to_string()))?;
    let n = d.len();
    let x = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => price[i].ln(),
        _ => d.rows[i].k.ln(),
    });
    let y = DVector::from_iterator(n, d.rows.iter().map(|o| o.y.ln()));
    Ok((x, y))
}

/// Ordinary least squares via a QR factorisation of the design matrix, with
/// classical standard errors `sqrt(s^2 [(X'X)^-1]_jj)`.
pub fn fit_loglinear(d: &Dataset, relation: Relation) -> Result<FitReport> {
    let (x, y) = design_matrix(d, relation)?;
    let n = d.len();
    if n < MIN_OBSERVATIONS {
        return Err(Error::InsufficientObservations { needed: MIN_OBSERVATIONS, got: n });
    }

    let qr = x.clone().qr();
    let r = qr.r();
    let col_norms: Vec<f64> = (0..3).map(|j| x.column(j).norm()).collect();
    for j in 0..3 {
        if r[(j, j)].abs() <= 1e-10 * col_norms[j] {
            let what = ["intercept", "ln price", "ln k"][j];
            return Err(Error::Rank(format!("{what} column is linearly dependent on the others")));
        }
    }
    let qty = qr.q().transpose() * &y;
    let beta = r.solve_upper_triangular(&qty).ok_or_else(|| Error::Rank("triangular factor is singular".into()))?;

    let residuals: DVector<f64> = &y - &x * &beta;
    let rss = residuals.norm_squared();
    let dof = (n - 3) as f64;
    let s2 = rss / dof;
    // (X'X)^-1 = R^-1 R^-T
    let r_inv = r.clone().try_inverse().ok_or_else(|| Error::Rank("triangular factor is singular".into()))?;
    let cov_diag: Vec<f64> = (0..3).map(|j| r_inv.row(j).norm_squared()).collect();
    let se = |j: usize| (s2 * cov_diag[j]).sqrt();

    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };

    Ok(FitReport {
        relation,
        intercept_ln_a: Estimate { value: beta[0], std_error: se(0) },
        b_hat: Estimate { value: beta[1], std_error: se(1) },
        c_hat: Estimate { value: beta[2], std_error: se(2) },
        residual_variance: s2,
        r_squared,
        n_obs: n,
        residuals: residuals.iter().copied().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyDiagnostics {
    pub b_plus_c: f64,
    pub dist_to_unity: f64,
    /// `c_hat / se(c_hat)`; `+inf` for an exact fit.
    pub c_significance: f64,
    /// Observed capital share `k r / y`, when the rental rate is present.
    pub capital_share_range: Option<(f64, f64)>,
    /// Wage relation with `|b + c - 1| < 1e-6`: its marginal rate of substitution degenerates.
    pub unity_degenerate: bool,
    /// Some observed capital share reaches `c_hat`, breaking `c y - k y' > 0`.
    pub share_restriction_violated: bool,
}

pub fn diagnose_fit(d: &Dataset, f: &FitReport) -> DegeneracyDiagnostics {
    let (b, c) = (f.b_hat.value, f.c_hat.value);
    let dist = (b + c - 1.0).abs();
    let c_significance = if f.c_hat.std_error == 0.0 { f64::INFINITY } else { c / f.c_hat.std_error };
    let shares = d.has_rental().then(|| {
        d.rows
            .iter()
            .filter_map(|o| o.r.map(|r| o.k * r / o.y))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)))
    });
    DegeneracyDiagnostics {
        b_plus_c: b + c,
        dist_to_unity: dist,
        c_significance,
        capital_share_range: shares,
        unity_degenerate: f.relation == Relation::Wage && dist < UNITY_TOL,
        share_restriction_violated: shares.is_some_and(|(_, hi)| hi >= c),
    }
}

/// `xi` for which the rental-relation MRS vanishes at `k0`:
/// `xi = (1-c)/(c-b) * b / ((1-b) a^(1/b)) * k0^(1 - c/b)`.
///
/// With this `xi`, `R(k0) = 0` and, when `R'(k0) > 0`, `k0` is the lower end
/// of the validity range.
pub fn calibrate_xi(a: f64, b: f64, c: f64, k0: f64) -> Result<f64> {
    let p = LogLinearParams::new(a, b, c, 0.0)?;
    p.check_ves_branch()?;
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(crate::error::param(format!("k0 must be finite and positive, got {k0}")));
    }
    let xi = (1.0 - c) / (c - b) * b / ((1.0 - b) * a.powf(1.0 / b)) * k0.powf(1.0 - c / b);
    if xi == 0.0 || !xi.is_finite() {
        return Err(singular(format!("no finite non-zero xi makes R({k0}) = 0 (c = {c}: R = mu k^theta has no zero)")));
    }
    Ok(xi)
}
