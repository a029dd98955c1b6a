//! Production functions with variable elasticity of factor substitution.
//!
//! The central family has marginal rate of substitution
//! `R(k) = lambda k + mu k^theta`, which integrates to
//! `y = psi [(1 + lambda) k^(1 - theta) + mu]^(1 / ((1 + lambda)(1 - theta)))`
//! and is identified from the log-linear relation `ln y = ln a + b ln r + c ln k`.
//! Cobb-Douglas, CES, Liu-Hildebrand, Lu-Fletcher and Sato-Hoffman functions
//! are provided alongside it for comparison and as special cases.
//!
//! - [`families`]: parameter types, `y(k)` and `F(K, L)`, parameter maps.
//! - [`substitution`]: closed-form `R`, `R'`, `sigma`, `sigma'`, regimes, validity ranges.
//! - [`estimation`]: CSV ingestion, OLS fits, diagnostics, `xi` calibration.
//! - [`oracles`]: finite-difference and ODE cross-checks.

pub mod error;
pub mod estimation;
pub mod families;
pub mod grid;
pub mod oracles;
pub mod substitution;

pub use error::{Error, Result};
pub use families::{
    CesParams, CobbDouglasParams, FamilySpec, LogLinearParams, LuFletcherParams, SatoHoffmanParams, VesParams,
};
