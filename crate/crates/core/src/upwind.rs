//! One explicit upwind transport step with loss.

use crate::error::{Error, Result};

/// Tolerated undershoot before a negative entry counts as a scheme failure.
pub const NEGATIVE_SLACK: f64 = 1e-14;

/// Advances `values` in place by
/// `n_j <- n_j - c (n_j - n_{j-1}) - dt * rate_j * n_j` with `c = dt / ds`
/// and the ghost value `n_{-1} = inflow`. Returns the mass that left through
/// the last cell.
pub fn upwind_step(
    values: &mut [f64],
    rates: &[f64],
    inflow: f64,
    courant: f64,
    dt: f64,
    step: usize,
) -> Result<f64> {
    let len = values.len();
    if len == 0 {
        return Ok(0.0);
    }
    let end = values.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1);
    let upper = (end + 1).min(len);
    let outflow = values[len - 1];
    for j in (0..upper).rev() {
        let left = if j == 0 { inflow } else { values[j - 1] };
        let v = values[j];
        let next = v - courant * (v - left) - dt * rates[j] * v;
        values[j] = if next < 0.0 {
            if next < -NEGATIVE_SLACK {
                return Err(Error::Internal {
                    step,
                    reason: format!("density entry {j} went negative ({next:e})"),
                });
            }
            0.0
        } else {
            next
        };
    }
    Ok(courant * outflow)
}
