//! Resource caps.

use crate::error::{Error, Result};

pub const MAX_COEFFS_VAR: &str = "KPROJ_MAX_COEFFS";
pub const DEFAULT_MAX_COEFFS: usize = 1 << 20;

/// Largest coefficient count any single computation may request.
pub fn max_coeffs() -> usize {
    std::env::var(MAX_COEFFS_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_COEFFS)
}

pub fn check_coeffs(n: usize) -> Result<()> {
    let max = max_coeffs();
    if n > max {
        return Err(Error::TooLarge {
            what: "coefficient count",
            requested: n as u128,
            max: max as u128,
        });
    }
    Ok(())
}
