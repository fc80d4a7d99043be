//! Stationary solutions: `N = 1 / int_0^inf exp(-int_0^s p(u, N) du) ds`
//! and the profile `n(s) = N exp(-int_0^s p)`.

use crate::error::{Error, Result};
use crate::grid::{DensityVector, Grid};
use crate::hazard::{HazardModel, Refractory};
use crate::quadrature::{adaptive_simpson_piecewise, gauss5_piecewise};
use crate::roots::{scan_roots, ScanOptions};

/// Survival level at which the integral is truncated.
const SURVIVAL_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// The rate is evaluated at `coupling * N` (the delayed model with kernel mass `J`).
    pub coupling: f64,
    pub scan: ScanOptions,
    /// Absolute tolerance of the survival quadrature.
    pub quad_tol: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            coupling: 1.0,
            scan: ScanOptions::default(),
            quad_tol: 1e-12,
        }
    }
}

/// `int_0^inf exp(-int_0^s p(u, arg) du) ds`, truncated where the survival
/// drops below `1e-14`.
pub fn survival_integral(model: &HazardModel, arg: f64, tol: f64) -> Result<f64> {
    let threshold = -SURVIVAL_FLOOR.ln();
    let mut end = 1.0;
    while model.cumulative(end, arg) < threshold {
        end *= 2.0;
        if end > 1e8 {
            return Err(Error::NonFiring(format!(
                "activity {arg}: survival stays above {SURVIVAL_FLOOR:e}"
            )));
        }
    }
    let mut breaks = model.breakpoints(arg);
    if let Refractory::Sigmoid { sigma, .. } = model.refractory {
        breaks.push(sigma);
    }
    let survival = |s: f64| (-model.cumulative(s, arg)).exp();
    Ok(adaptive_simpson_piecewise(
        &survival, 0.0, end, &breaks, tol,
    ))
}

/// `F(N)`; closed form `phi / (sigma phi + 1)` for step gates, quadrature otherwise.
pub fn stationary_map(model: &HazardModel, n: f64, opts: &SteadyOptions) -> Result<f64> {
    let arg = opts.coupling * n;
    match model.refractory {
        Refractory::Sigmoid { .. } => Ok(1.0 / survival_integral(model, arg, opts.quad_tol)?),
        _ => {
            let phi = model.eval(f64::INFINITY, arg);
            let sigma = model.refractory.period(arg).unwrap_or(0.0);
            Ok(phi / (sigma * phi + 1.0))
        }
    }
}

/// Ascending roots of `N = F(N)` on `[0, p_sup]`.
pub fn stationary_flux_roots(model: &HazardModel, opts: &SteadyOptions) -> Result<Vec<f64>> {
    model.validate()?;
    let p_sup = model.norms()?.p_sup;
    // a rate that vanishes identically never fires
    if p_sup == 0.0 {
        return Err(Error::NonFiring("rate is identically zero".into()));
    }
    let failure = std::cell::Cell::new(None);
    let g = |x: f64| match stationary_map(model, x, opts) {
        Ok(f) => (x - f, f64::NAN),
        Err(e) => {
            failure.set(Some(e));
            (f64::NAN, f64::NAN)
        }
    };
    let roots = scan_roots(&g, 0.0, p_sup * (1.0 + 1e-9), p_sup, &opts.scan);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(roots.into_iter().map(|r| r.value).collect())
}

/// Cell averages of `N* exp(-int_0^s p(u, coupling N*) du)`.
pub fn stationary_density(
    model: &HazardModel,
    n_star: f64,
    coupling: f64,
    grid: &Grid,
) -> DensityVector {
    let arg = coupling * n_star;
    let ds = grid.ds();
    let breaks = model.breakpoints(arg);
    let values = (0..grid.cells())
        .map(|j| {
            let a = j as f64 * ds;
            gauss5_piecewise(
                |s| n_star * (-model.cumulative(s, arg)).exp(),
                a,
                a + ds,
                &breaks,
            ) / ds
        })
        .collect();
    DensityVector::from_raw(ds, values)
}
