//! Uniform age/time mesh and the discrete density living on it.

use crate::error::{Error, Result};

/// Relative slack used when rounding a length to a whole number of steps.
const ROUNDING_SLACK: f64 = 1e-9;

/// Uniform discretization of `[0, T] x [0, s_max]`.
///
/// Cell `j` (zero-based) covers `[j ds, (j + 1) ds)` and has center
/// `(j + 1/2) ds`. Time level `m` sits at `m dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    ds: f64,
    dt: f64,
    s_max: f64,
    t_final: f64,
    steps: usize,
    cells: usize,
}

fn whole_steps(length: f64, step: f64) -> usize {
    let ratio = length / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= ROUNDING_SLACK * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Builds the mesh. `s_max` is rounded up to a multiple of `ds` and the step
/// count is `ceil(T / dt)`.
pub fn build_grid(ds: f64, dt: f64, s_max: f64, t_final: f64) -> Result<Grid> {
    for (name, v) in [("ds", ds), ("dt", dt), ("s_max", s_max), ("T", t_final)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let cells = whole_steps(s_max, ds);
    let steps = whole_steps(t_final, dt);
    Ok(Grid {
        ds,
        dt,
        s_max: cells as f64 * ds,
        t_final,
        steps,
        cells,
    })
}

impl Grid {
    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of time steps `M`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of age cells `J_max`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Courant number `dt / ds`.
    pub fn courant(&self) -> f64 {
        self.dt / self.ds
    }

    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.ds
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|j| self.center(j)).collect()
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.dt
    }

    /// Same mesh with a different time step (step count recomputed).
    pub fn with_dt(&self, dt: f64) -> Result<Grid> {
        build_grid(self.ds, dt, self.s_max, self.t_final)
    }
}

/// Largest stable time step for the instantaneous-transmission scheme,
/// `(1/ds + |p|_inf)^-1`.
pub fn cfl_dt_itm(ds: f64, p_sup: f64) -> Result<f64> {
    if !(ds > 0.0 && ds.is_finite()) {
        return Err(Error::invalid(format!("ds must be positive, got {ds}")));
    }
    if p_sup.is_infinite() {
        return Err(Error::UnboundedHazard);
    }
    if !(p_sup >= 0.0) {
        return Err(Error::invalid(format!(
            "rate bound must be nonnegative, got {p_sup}"
        )));
    }
    Ok(1.0 / (1.0 / ds + p_sup))
}

/// Largest admissible time step for the distributed-delay scheme: the
/// transport bound and the contraction bound `2 / (alpha_0 |d_X p|_inf |n0|_1)`
/// of the per-step activity solve.
pub fn cfl_dt_ddm(ds: f64, p_sup: f64, dxp_sup: f64, alpha0: f64, mass0: f64) -> Result<f64> {
    let transport = cfl_dt_itm(ds, p_sup)?;
    for (name, v) in [("dXp_sup", dxp_sup), ("alpha0", alpha0), ("mass0", mass0)] {
        if v.is_nan() || v < 0.0 {
            return Err(Error::invalid(format!(
                "{name} must be nonnegative, got {v}"
            )));
        }
    }
    let denom = alpha0 * dxp_sup * mass0;
    let contraction = if denom > 0.0 {
        2.0 / denom
    } else {
        f64::INFINITY
    };
    Ok(transport.min(contraction))
}

/// Nonnegative cell averages of the density at one time level. Entries past
/// the end of the vector are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    ds: f64,
    values: Vec<f64>,
}

impl DensityVector {
    pub fn new(ds: f64, values: Vec<f64>) -> Result<Self> {
        if !(ds > 0.0) {
            return Err(Error::invalid("density cell width must be positive"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!(
                "density entries must be finite and nonnegative, found {v}"
            )));
        }
        Ok(Self { ds, values })
    }

    pub fn zeros(ds: f64, cells: usize) -> Self {
        Self {
            ds,
            values: vec![0.0; cells],
        }
    }

    /// Wraps values produced by the scheme; sign checks happen at the caller.
    pub(crate) fn from_raw(ds: f64, values: Vec<f64>) -> Self {
        Self { ds, values }
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mass(&self) -> f64 {
        total_mass(self)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// Index one past the last nonzero entry.
    pub fn support_end(&self) -> usize {
        self.values
            .iter()
            .rposition(|&v| v != 0.0)
            .map_or(0, |i| i + 1)
    }

    pub fn total_variation(&self, boundary_flux: f64) -> f64 {
        total_variation(self, boundary_flux)
    }

    /// Discrete L1 distance `ds * sum |a_j - b_j|`, padding the shorter vector with zeros.
    pub fn l1_distance(&self, other: &DensityVector) -> f64 {
        let n = self.len().max(other.len());
        let get = |v: &[f64], j: usize| v.get(j).copied().unwrap_or(0.0);
        self.ds
            * (0..n)
                .map(|j| (get(&self.values, j) - get(&other.values, j)).abs())
                .sum::<f64>()
    }
}

/// `ds * sum_j n_j`.
pub fn total_mass(n: &DensityVector) -> f64 {
    n.ds * n.values.iter().sum::<f64>()
}

/// Total variation with the boundary term measured against the current flux:
/// `|n_1 - N| + sum_j |n_{j+1} - n_j|`, including the final drop to zero.
pub fn total_variation(n: &DensityVector, boundary_flux: f64) -> f64 {
    let v = &n.values;
    let Some(&first) = v.first() else {
        return boundary_flux.abs();
    };
    let interior: f64 = v.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    (first - boundary_flux).abs() + interior + v[v.len() - 1].abs()
}
