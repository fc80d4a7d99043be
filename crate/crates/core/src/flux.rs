//! The discrete discharge map `F(N) = ds * sum_j p_j(N) n_j` and the
//! invertibility diagnostic `Psi = 1 - F'(N)`.
//!
//! For a fixed age gate the cell rate is `p(s_j, N)` at the cell center. When
//! the refractory edge moves with the activity, the cell containing the edge
//! fires with the fraction of its width that lies past the edge, so `F` stays
//! continuous in `N`.

use crate::grid::DensityVector;
use crate::hazard::{Derivative, HazardModel};

/// Rate of cell `j` at activity `n`.
pub fn cell_rate(model: &HazardModel, j: usize, ds: f64, n: f64) -> f64 {
    if model.refractory.is_activity_dependent() {
        let sigma = model.refractory.period(n).unwrap_or(0.0);
        let rate = model.eval(f64::INFINITY, n);
        rate * edge_fraction(j, ds, sigma)
    } else {
        model.eval((j as f64 + 0.5) * ds, n)
    }
}

fn edge_fraction(j: usize, ds: f64, sigma: f64) -> f64 {
    ((j as f64 + 1.0) - sigma / ds).clamp(0.0, 1.0)
}

/// Precomputed age gates for a model on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRates {
    ds: f64,
    /// `gate(s_j)` for fixed gates; empty when the edge moves.
    gates: Vec<f64>,
    moving_edge: bool,
}

impl CellRates {
    pub fn new(model: &HazardModel, ds: f64, cells: usize) -> Self {
        let moving_edge = model.refractory.is_activity_dependent();
        let gates = if moving_edge {
            Vec::new()
        } else {
            (0..cells)
                .map(|j| model.refractory.gate((j as f64 + 0.5) * ds, 0.0))
                .collect()
        };
        Self {
            ds,
            gates,
            moving_edge,
        }
    }

    /// Writes `p_j(n)` for every cell into `out`.
    pub fn fill(&self, model: &HazardModel, n: f64, out: &mut [f64]) {
        let phi = model.eval(f64::INFINITY, n);
        if self.moving_edge {
            let sigma = model.refractory.period(n).unwrap_or(0.0);
            for (j, o) in out.iter_mut().enumerate() {
                *o = phi * edge_fraction(j, self.ds, sigma);
            }
        } else {
            for (o, g) in out.iter_mut().zip(&self.gates) {
                *o = phi * g;
            }
        }
    }

    /// Fast evaluator of `F` for a fixed density.
    pub fn flux_map<'a>(&self, model: &'a HazardModel, density: &DensityVector) -> FluxMap<'a> {
        let v = density.values();
        let form = if self.moving_edge {
            let mut suffix = vec![0.0; v.len() + 1];
            for j in (0..v.len()).rev() {
                suffix[j] = suffix[j + 1] + v[j];
            }
            Form::Edge {
                suffix,
                values: v.to_vec(),
            }
        } else {
            let w = v.iter().zip(&self.gates).map(|(a, g)| a * g).sum::<f64>();
            Form::Weighted(w)
        };
        FluxMap {
            model,
            ds: self.ds,
            form,
        }
    }
}

#[derive(Debug, Clone)]
enum Form {
    /// `sum_j gate_j n_j`.
    Weighted(f64),
    Edge {
        suffix: Vec<f64>,
        values: Vec<f64>,
    },
}

/// `F(N)` for one density in O(1) per evaluation.
#[derive(Debug, Clone)]
pub struct FluxMap<'a> {
    model: &'a HazardModel,
    ds: f64,
    form: Form,
}

impl FluxMap<'_> {
    pub fn eval(&self, n: f64) -> f64 {
        let phi = self.model.eval(f64::INFINITY, n);
        match &self.form {
            Form::Weighted(w) => phi * self.ds * w,
            Form::Edge { suffix, values } => {
                let sigma = self.model.refractory.period(n).unwrap_or(0.0);
                let pos = sigma / self.ds;
                let k = pos.floor().max(0.0) as usize;
                if k >= values.len() {
                    return 0.0;
                }
                let frac = ((k as f64 + 1.0) - pos).clamp(0.0, 1.0);
                phi * self.ds * (suffix[k + 1] + frac * values[k])
            }
        }
    }

    /// `F'(N)`: analytic for fixed gates, central differences otherwise.
    pub fn deriv(&self, n: f64) -> f64 {
        match &self.form {
            Form::Weighted(w) => match self.model.dn(f64::INFINITY, n) {
                Derivative::Analytic(d) => d * self.ds * w,
                Derivative::Singular => unreachable!("fixed gate with singular derivative"),
            },
            Form::Edge { .. } => central_difference(&|x| self.eval(x), n),
        }
    }

    pub fn psi(&self, n: f64) -> f64 {
        1.0 - self.deriv(n)
    }

    /// `ds * sum_j gate_j n_j`; `F(N) <= p_sup` times this.
    pub fn mass_weight(&self) -> f64 {
        match &self.form {
            Form::Weighted(w) => self.ds * w,
            Form::Edge { suffix, .. } => self.ds * suffix[0],
        }
    }
}

fn central_difference(f: &dyn Fn(f64) -> f64, n: f64) -> f64 {
    let h = 1e-6 * n.abs().max(1.0);
    if n >= h {
        (f(n + h) - f(n - h)) / (2.0 * h)
    } else {
        (f(n + h) - f(n)) / h
    }
}

/// Direct evaluation of `F(N) = ds * sum_j p_j(N) n_j`.
pub fn discrete_flux_map(n: &DensityVector, model: &HazardModel, flux: f64) -> f64 {
    let ds = n.ds();
    ds * n
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| cell_rate(model, j, ds, flux) * v)
        .sum::<f64>()
}

/// `Psi = 1 - ds * sum_j d_N p(s_j, N) n_j`, or a central difference of the
/// discrete flux map with step `1e-6 * max(1, N)` when `d_N p` is singular.
pub fn invertibility_psi(n: &DensityVector, model: &HazardModel, flux: f64) -> f64 {
    let ds = n.ds();
    if model.refractory.is_activity_dependent() {
        return 1.0 - central_difference(&|x| discrete_flux_map(n, model, x), flux);
    }
    let mut acc = 0.0;
    for (j, v) in n.values().iter().enumerate() {
        if let Derivative::Analytic(d) = model.dn((j as f64 + 0.5) * ds, flux) {
            acc += d * v;
        }
    }
    1.0 - ds * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard::{Rate, Refractory};

    fn density(ds: f64, f: impl Fn(f64) -> f64, cells: usize) -> DensityVector {
        DensityVector::new(ds, (0..cells).map(|j| f((j as f64 + 0.5) * ds)).collect()).unwrap()
    }

    #[test]
    fn constant_rate_gives_rate_times_mass() {
        let m = HazardModel::new(Rate::Constant { value: 2.0 }, Refractory::None);
        let n = density(0.1, |_| 1.0, 10);
        for x in [0.0, 0.3, 7.0] {
            assert!((discrete_flux_map(&n, &m, x) - 2.0).abs() < 1e-14);
        }
        assert_eq!(invertibility_psi(&n, &m, 0.4), 1.0);
    }

    #[test]
    fn mass_below_refractory_does_not_fire() {
        let m = HazardModel::new(
            Rate::Hill {
                amplitude: 10.0,
                offset: 0.5,
            },
            Refractory::Fixed { sigma: 1.0 },
        );
        let n = density(0.1, |s| if s < 0.9 { 1.0 } else { 0.0 }, 20);
        assert_eq!(discrete_flux_map(&n, &m, 0.7), 0.0);
    }

    #[test]
    fn fast_map_matches_direct_sum() {
        let ds = 0.02;
        let n = density(ds, |s| (-(s - 0.3f64).abs()).exp(), 500);
        let models = [
            HazardModel::new(
                Rate::Hill {
                    amplitude: 10.0,
                    offset: 0.5,
                },
                Refractory::Fixed { sigma: 1.0 },
            ),
            HazardModel::new(
                Rate::Logistic {
                    slope: 9.0,
                    shift: 3.5,
                },
                Refractory::Sigmoid {
                    sigma: 0.5,
                    width: 0.1,
                },
            ),
            HazardModel::new(
                Rate::Constant { value: 1.0 },
                Refractory::Variable {
                    max_period: 2.0,
                    drop: 1.0,
                    scale: 2.5,
                },
            ),
        ];
        for m in &models {
            let cr = CellRates::new(m, ds, n.len());
            let f = cr.flux_map(m, &n);
            for x in [0.0, 0.11, 0.37, 0.8, 1.6] {
                let direct = discrete_flux_map(&n, m, x);
                assert!((f.eval(x) - direct).abs() < 1e-12, "{m:?} at {x}");
                assert!((f.psi(x) - invertibility_psi(&n, m, x)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn variable_edge_map_is_continuous() {
        let ds = 0.05;
        let n = density(ds, |s| if s > 1.0 { (-(s - 1.0)).exp() } else { 0.0 }, 400);
        let m = HazardModel::new(
            Rate::Constant { value: 1.0 },
            Refractory::Variable {
                max_period: 2.0,
                drop: 1.0,
                scale: 1.0,
            },
        );
        let cr = CellRates::new(&m, ds, n.len());
        let f = cr.flux_map(&m, &n);
        let mut prev = f.eval(0.0);
        for i in 1..=20_000 {
            let v = f.eval(i as f64 * 1e-4);
            assert!((v - prev).abs() < 1e-3);
            prev = v;
        }
    }

    #[test]
    fn analytic_psi_agrees_with_differences() {
        let ds = 0.02;
        let n = density(ds, |s| if s > 1.0 { (-(s - 1.0)).exp() } else { 0.0 }, 2000);
        let m = HazardModel::new(
            Rate::Hill {
                amplitude: 10.0,
                offset: 0.5,
            },
            Refractory::Fixed { sigma: 1.0 },
        );
        for x in [0.2, 0.5, 1.3] {
            let fd = 1.0 - central_difference(&|y| discrete_flux_map(&n, &m, y), x);
            assert!((fd - invertibility_psi(&n, &m, x)).abs() < 1e-5);
        }
    }
}
