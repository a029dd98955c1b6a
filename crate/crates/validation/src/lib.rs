//! Acceptance checks for `ves-core`. The checks live in `tests/acceptance.rs`
//! and print one PASS/FAIL line per criterion:
//!
//! ```text
//! cargo test -p ves-validation --test acceptance
//! ```
