//! Grid-refinement studies: `ds` and `dt` halve together at every level.

use super::config::{Reference, ScenarioConfig};
use super::run::simulate;
use crate::error::{Error, Result};
use crate::grid::DensityVector;
use crate::initial::discretize_initial;
use crate::itm::linear_run;
use crate::oracle::characteristics_density;
use crate::quadrature::gauss5_piecewise;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub ds: f64,
    pub dt: f64,
    pub l1_error: f64,
    /// `log2(e_{k-1} / e_k)`; absent on the first row.
    pub observed_order: Option<f64>,
}

/// `log2` ratios of successive errors.
pub fn observed_orders(errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|k| (k > 0).then(|| (errors[k - 1] / errors[k]).log2()))
        .collect()
}

/// Runs `levels` refinements of `cfg` and reports the L1 error at the final time.
///
/// With the oracle reference the linear problem with the prescribed constant
/// flux is compared with the characteristics solution. With the self
/// reference each level is compared with the next finer one, so `levels`
/// runs give `levels - 1` rows.
pub fn convergence_study(cfg: &ScenarioConfig, levels: usize) -> Result<Vec<ConvergenceRow>> {
    if levels < 3 {
        return Err(Error::invalid(format!(
            "a convergence study needs at least 3 levels, got {levels}"
        )));
    }
    let cells0 = (cfg.s_max / cfg.ds).ceil();
    let base = ScenarioConfig {
        s_max: cells0 * cfg.ds,
        ..cfg.clone()
    };
    let configs: Vec<ScenarioConfig> = (0..levels as u32).map(|k| base.refined(k)).collect();
    let (errors, used) = match cfg.convergence.reference {
        Reference::Oracle => {
            let flux = cfg
                .convergence
                .prescribed_flux
                .ok_or_else(|| Error::invalid("the oracle reference needs a prescribed flux"))?;
            let errors = configs
                .iter()
                .map(|c| oracle_error(c, flux))
                .collect::<Result<Vec<_>>>()?;
            (errors, levels)
        }
        Reference::SelfConvergence => {
            let finals = configs
                .iter()
                .map(final_density)
                .collect::<Result<Vec<_>>>()?;
            let errors = finals
                .windows(2)
                .map(|w| coarse_distance(&w[0], &w[1]))
                .collect();
            (errors, levels - 1)
        }
    };
    let orders = observed_orders(&errors);
    Ok(configs[..used]
        .iter()
        .zip(errors.iter().zip(orders))
        .map(|(c, (&l1_error, observed_order))| ConvergenceRow {
            ds: c.ds,
            dt: c.dt,
            l1_error,
            observed_order,
        })
        .collect())
}

fn final_density(cfg: &ScenarioConfig) -> Result<DensityVector> {
    let c = ScenarioConfig {
        output: super::config::OutputConfig {
            snapshots: vec![cfg.t_final],
            ..cfg.output.clone()
        },
        ..cfg.clone()
    };
    let traj = simulate(&c)?;
    if traj.blow_up().is_some() {
        return Err(Error::invalid("the run blew up before the final time"));
    }
    traj.snapshots
        .last()
        .map(|s| s.density.clone())
        .ok_or_else(|| Error::invalid("no final snapshot"))
}

/// `ds_c sum_j |c_j - (f_{2j} + f_{2j+1}) / 2|`.
fn coarse_distance(coarse: &DensityVector, fine: &DensityVector) -> f64 {
    let f = fine.values();
    let at = |i: usize| f.get(i).copied().unwrap_or(0.0);
    let n = coarse.len().max(f.len().div_ceil(2));
    let c = coarse.values();
    coarse.ds()
        * (0..n)
            .map(|j| (c.get(j).copied().unwrap_or(0.0) - 0.5 * (at(2 * j) + at(2 * j + 1))).abs())
            .sum::<f64>()
}

fn oracle_error(cfg: &ScenarioConfig, flux: f64) -> Result<f64> {
    let grid = cfg.grid()?;
    let n0 = discretize_initial(&cfg.initial, &grid)?;
    let t = cfg.t_final;
    let traj = linear_run(n0, &cfg.model, &grid, &|_| flux, &[t])?;
    let numeric = &traj
        .snapshots
        .last()
        .ok_or_else(|| Error::invalid("no final snapshot"))?
        .density;
    let initial = cfg.initial;
    let model = cfg.model;
    let n0f = move |s: f64| if s < 0.0 { 0.0 } else { initial.eval(s) };
    let p = move |s: f64, n: f64| model.eval(s, n);
    let mut breaks = vec![t];
    for b in initial
        .breakpoints()
        .into_iter()
        .chain(model.breakpoints(flux))
    {
        breaks.extend([b, b + t]);
    }
    breaks.sort_by(f64::total_cmp);
    let reach = initial.support_bound() + t;
    let ds = grid.ds();
    let err = numeric
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let a = j as f64 * ds;
            let exact = if a >= reach {
                0.0
            } else {
                gauss5_piecewise(
                    |s| characteristics_density(&n0f, &|_| flux, &p, t, s),
                    a,
                    a + ds,
                    &breaks,
                ) / ds
            };
            (v - exact).abs()
        })
        .sum::<f64>();
    Ok(ds * err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::parse_config;

    const TRANSPORT: &str = "\
[model]
equation = itm
[hazard]
rate = constant
value = 0
[initial]
kind = cosine-bump
width = 1
[grid]
ds = 0.04
T = 1
[convergence]
reference = oracle
prescribed_flux = 1
";

    #[test]
    fn orders_from_errors() {
        let o = observed_orders(&[0.4, 0.2, 0.1]);
        assert_eq!(o, vec![None, Some(1.0), Some(1.0)]);
    }

    #[test]
    fn too_few_levels() {
        let cfg = parse_config(TRANSPORT).unwrap();
        assert!(matches!(
            convergence_study(&cfg, 2),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn pure_transport_is_first_order() {
        let cfg = parse_config(TRANSPORT).unwrap();
        let rows = convergence_study(&cfg, 3).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows[1..] {
            let q = r.observed_order.unwrap();
            assert!((0.8..=1.2).contains(&q), "{rows:?}");
        }
    }
}
