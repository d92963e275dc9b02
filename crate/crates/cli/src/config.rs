//! Resolution and validation of the shared flags.

use kolmo_core::filters::Grid;

use crate::args::{GridArgs, Pmax, Terms, Tol, Window};
use crate::error::{CliError, CliResult};

fn invalid(message: String) -> CliError {
    CliError::validation("invalid_config", message)
}

pub fn tolerance(t: &Tol, default: f64) -> CliResult<f64> {
    match t.tol {
        None => Ok(default),
        Some(v) if v.is_finite() && v > 0.0 => Ok(v),
        Some(v) => Err(invalid(format!("tolerance must be positive, got {v}"))),
    }
}

/// Overrides fields of `default`; the count must be a power of two.
pub fn grid_or(g: &GridArgs, default: Grid) -> CliResult<Grid> {
    let count = g.grid_count.unwrap_or(default.count);
    if !count.is_power_of_two() {
        return Err(invalid(format!("grid count must be a power of two, got {count}")));
    }
    Ok(Grid::new(
        g.grid_start.unwrap_or(default.start),
        g.grid_step.unwrap_or(default.step),
        count,
    )?)
}

pub fn terms_or(t: &Terms, default: u32) -> CliResult<u32> {
    match t.terms {
        Some(0) => Err(invalid("terms must be positive".into())),
        Some(v) => Ok(v),
        None => Ok(default),
    }
}

pub fn pmax_or(p: &Pmax, default: u32) -> CliResult<u32> {
    match p.pmax {
        Some(0) => Err(invalid("pmax must be positive".into())),
        Some(v) => Ok(v),
        None => Ok(default),
    }
}

pub fn window_or(w: &Window, default: (i64, i64)) -> CliResult<(i64, i64)> {
    let m = w.window_m.unwrap_or(default.0);
    let n = w.window_n.unwrap_or(default.1);
    if m < 0 || n < 0 {
        return Err(invalid(format!("window sizes must be nonnegative, got ({m}, {n})")));
    }
    Ok((m, n))
}
