//! Closed-form initial densities and their cell averages.

use crate::error::{Error, Result};
use crate::grid::{DensityVector, Grid};
use crate::quadrature::gauss5_piecewise;
use std::f64::consts::PI;

/// Tail mass that may be dropped when truncating an exponential tail.
const TAIL_MASS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDensity {
    /// `height` on `[0, knee]`, then `height * exp(-(s - knee))`.
    PlateauExp { height: f64, knee: f64 },
    /// `exp(-(s - onset))` for `s > onset`, zero before.
    ShiftedExp { onset: f64 },
    /// `height` on `[start, end]`.
    Indicator { start: f64, end: f64, height: f64 },
    /// `rate * exp(-rate * s)`.
    Exponential { rate: f64 },
    /// `cos^2(pi s / (2 width))` on `[0, width]`.
    CosineBump { width: f64 },
}

impl InitialDensity {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            InitialDensity::PlateauExp { height, knee } => height >= 0.0 && knee >= 0.0,
            InitialDensity::ShiftedExp { onset } => onset >= 0.0,
            InitialDensity::Indicator { start, end, height } => {
                start >= 0.0 && end > start && height >= 0.0
            }
            InitialDensity::Exponential { rate } => rate > 0.0,
            InitialDensity::CosineBump { width } => width > 0.0,
        };
        let finite = match *self {
            InitialDensity::PlateauExp { height, knee } => height.is_finite() && knee.is_finite(),
            InitialDensity::ShiftedExp { onset } => onset.is_finite(),
            InitialDensity::Indicator { start, end, height } => {
                start.is_finite() && end.is_finite() && height.is_finite()
            }
            InitialDensity::Exponential { rate } => rate.is_finite(),
            InitialDensity::CosineBump { width } => width.is_finite(),
        };
        if ok && finite {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "initial density parameters out of range: {self:?}"
            )))
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        match *self {
            InitialDensity::PlateauExp { height, knee } => {
                if s <= knee {
                    height
                } else {
                    height * (-(s - knee)).exp()
                }
            }
            InitialDensity::ShiftedExp { onset } => {
                if s > onset {
                    (-(s - onset)).exp()
                } else {
                    0.0
                }
            }
            InitialDensity::Indicator { start, end, height } => {
                if s >= start && s <= end {
                    height
                } else {
                    0.0
                }
            }
            InitialDensity::Exponential { rate } => rate * (-rate * s).exp(),
            InitialDensity::CosineBump { width } => {
                if s <= width {
                    (PI * s / (2.0 * width)).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact integral over `[0, inf)`.
    pub fn mass(&self) -> f64 {
        match *self {
            InitialDensity::PlateauExp { height, knee } => height * (knee + 1.0),
            InitialDensity::ShiftedExp { .. } => 1.0,
            InitialDensity::Indicator { start, end, height } => height * (end - start),
            InitialDensity::Exponential { .. } => 1.0,
            InitialDensity::CosineBump { width } => 0.5 * width,
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            InitialDensity::PlateauExp { height, .. } => height,
            InitialDensity::ShiftedExp { .. } => 1.0,
            InitialDensity::Indicator { height, .. } => height,
            InitialDensity::Exponential { rate } => rate,
            InitialDensity::CosineBump { .. } => 1.0,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            InitialDensity::PlateauExp { knee, .. } => vec![knee],
            InitialDensity::ShiftedExp { onset } => vec![onset],
            InitialDensity::Indicator { start, end, .. } => vec![start, end],
            InitialDensity::Exponential { .. } => vec![],
            InitialDensity::CosineBump { width } => vec![width],
        }
    }

    /// Age beyond which the density is zero, or its remaining mass is below
    /// `1e-15` for exponential tails.
    pub fn support_bound(&self) -> f64 {
        let tail = |start: f64, scale: f64, rate: f64| {
            if scale <= TAIL_MASS * rate {
                start
            } else {
                start + (scale / (TAIL_MASS * rate)).ln() / rate
            }
        };
        match *self {
            InitialDensity::PlateauExp { height, knee } => tail(knee, height, 1.0),
            InitialDensity::ShiftedExp { onset } => tail(onset, 1.0, 1.0),
            InitialDensity::Indicator { end, .. } => end,
            InitialDensity::Exponential { rate } => tail(0.0, rate, rate),
            InitialDensity::CosineBump { width } => width,
        }
    }
}

/// Cell averages `(1/ds) int_{I_j} n0` by 5-point Gauss-Legendre, split at the
/// density's breakpoints. Cells past the support bound are exactly zero.
pub fn discretize_initial(n0: &InitialDensity, grid: &Grid) -> Result<DensityVector> {
    n0.validate()?;
    let support = n0.support_bound();
    let limit = grid.s_max() - grid.t_final();
    if support > limit + 1e-9 * grid.ds() {
        return Err(Error::DomainTruncation { support, limit });
    }
    let ds = grid.ds();
    let breaks = n0.breakpoints();
    let values = (0..grid.cells())
        .map(|j| {
            let a = j as f64 * ds;
            if a >= support {
                return 0.0;
            }
            let b = (a + ds).min(support);
            gauss5_piecewise(|s| n0.eval(s), a, b, &breaks) / ds
        })
        .collect();
    DensityVector::new(ds, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn aligned_indicator_is_exact() {
        let g = build_grid(0.5, 0.1, 3.0, 1.0).unwrap();
        let n = discretize_initial(
            &InitialDensity::Indicator {
                start: 0.0,
                end: 1.0,
                height: 1.0,
            },
            &g,
        )
        .unwrap();
        assert_eq!(n.values(), &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn example_masses() {
        let g = build_grid(0.02, 0.01, 80.0, 30.0).unwrap();
        for d in [
            InitialDensity::PlateauExp {
                height: 0.5,
                knee: 1.0,
            },
            InitialDensity::ShiftedExp { onset: 1.0 },
            InitialDensity::ShiftedExp { onset: 0.5 },
            InitialDensity::CosineBump { width: 1.0 },
        ] {
            let n = discretize_initial(&d, &g).unwrap();
            assert!((n.mass() - d.mass()).abs() < 1e-10, "{d:?}: {}", n.mass());
        }
    }

    #[test]
    fn truncation_is_reported() {
        let g = build_grid(0.02, 0.01, 20.0, 10.0).unwrap();
        let err = discretize_initial(&InitialDensity::ShiftedExp { onset: 1.0 }, &g).unwrap_err();
        assert!(matches!(err, Error::DomainTruncation { .. }));
    }

    #[test]
    fn support_bound_drops_negligible_mass() {
        let d = InitialDensity::PlateauExp {
            height: 0.5,
            knee: 1.0,
        };
        let r = d.support_bound();
        assert!(0.5 * (-(r - 1.0)).exp() <= 1.0001e-15);
    }
}
