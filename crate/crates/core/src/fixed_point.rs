//! Scalar fixed-point solves: the discharge flux `N = F(N)` of the
//! instantaneous model and the activity `X = a F(X) + b` of the delayed model.

use crate::error::{Error, Result};
use crate::flux::{CellRates, FluxMap};
use crate::grid::DensityVector;
use crate::hazard::HazardModel;
use crate::roots::{newton_bisect, scan_roots, RootReport, ScanOptions};

/// All solutions of `N = F(N)` on `[0, p_sup * ds * sum gate_j n_j]`.
pub fn roots_of_map(map: &FluxMap<'_>, p_sup: f64, opts: &ScanOptions) -> Result<RootReport> {
    let hi = p_sup * map.mass_weight();
    let g = |x: f64| (x - map.eval(x), 1.0 - map.deriv(x));
    let upper = hi * (1.0 + 1e-9);
    let found = scan_roots(&g, 0.0, upper, hi, opts);
    if found.is_empty() {
        return Err(Error::Internal {
            step: 0,
            reason: format!("no fixed point on [0, {hi}]"),
        });
    }
    Ok(RootReport {
        roots: found.iter().map(|r| r.value).collect(),
        psi: found.iter().map(|r| map.psi(r.value)).collect(),
        tangent: found.iter().map(|r| r.tangent).collect(),
        selected: 0,
        jump_event: false,
    })
}

/// Scans `g(N) = N - F(N)` for the given density and refines every root.
pub fn find_all_roots(
    n: &DensityVector,
    model: &HazardModel,
    opts: &ScanOptions,
) -> Result<RootReport> {
    let norms = model.norms()?;
    let rates = CellRates::new(model, n.ds(), n.len());
    let map = rates.flux_map(model, n);
    roots_of_map(&map, norms.p_sup, opts)
}

/// Outcome of an activity solve.
#[derive(Debug, Clone, PartialEq)]
pub enum ActivitySolve {
    /// Ascending roots of `X = a F(X) + b`.
    Roots(Vec<f64>),
    /// The equation has no solution below the cap.
    Exceeded { at: f64 },
}

/// Solves `X = a F(X) + b` with `a, b >= 0`.
///
/// For a bounded rate the solutions lie in `[b, b + a F_max]` and are found by
/// the bracketing scan. For an unbounded rate the search walks upward from `b`
/// in 1% geometric steps and stops at the first sign change; reaching `cap`
/// without one reports `Exceeded`.
pub fn solve_activity(
    map: &FluxMap<'_>,
    a: f64,
    b: f64,
    f_max: Option<f64>,
    cap: f64,
    opts: &ScanOptions,
) -> ActivitySolve {
    let g = |x: f64| (x - a * map.eval(x) - b, 1.0 - a * map.deriv(x));
    match f_max {
        Some(fm) => {
            let hi = b + a * fm;
            let scale = hi.max(1.0);
            if hi <= b {
                return ActivitySolve::Roots(vec![b]);
            }
            let found = scan_roots(&g, b, hi + 1e-9 * scale, scale, opts);
            if found.is_empty() {
                ActivitySolve::Exceeded { at: hi }
            } else {
                ActivitySolve::Roots(found.iter().map(|r| r.value).collect())
            }
        }
        None => {
            let tol = opts.tolerance * b.max(1.0);
            let mut lo = b;
            let (g_lo, _) = g(lo);
            if g_lo.abs() <= tol {
                return ActivitySolve::Roots(vec![lo]);
            }
            loop {
                let step = (0.01 * lo.abs()).max(a * map.eval(lo)).max(1e-9);
                let hi = lo + step;
                if hi > cap {
                    return ActivitySolve::Exceeded { at: hi };
                }
                let (g_hi, _) = g(hi);
                if g_hi >= 0.0 {
                    let x = newton_bisect(&g, lo, hi, opts.tolerance * hi.max(1.0));
                    return ActivitySolve::Roots(vec![x]);
                }
                lo = hi;
            }
        }
    }
}
