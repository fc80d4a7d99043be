//! Firing coefficients `p(s, N) = phi(N) * gate(s, N)`.

use crate::error::{Error, Result};

/// Activity-dependent rate `phi(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate {
    /// `phi(N) = value`.
    Constant { value: f64 },
    /// `phi(N) = amplitude * exp(-decay * N)`.
    ExpDecay { amplitude: f64, decay: f64 },
    /// `phi(N) = amplitude * N^2 / (N^2 + 1) + offset`.
    Hill { amplitude: f64, offset: f64 },
    /// `phi(N) = 1 / (1 + exp(-slope * N + shift))`.
    Logistic { slope: f64, shift: f64 },
    /// `phi(N) = N^2 + offset`; unbounded in `N`.
    Quadratic { offset: f64 },
}

impl Rate {
    pub fn value(&self, n: f64) -> f64 {
        match *self {
            Rate::Constant { value } => value,
            Rate::ExpDecay { amplitude, decay } => amplitude * (-decay * n).exp(),
            Rate::Hill { amplitude, offset } => {
                let q = n * n;
                amplitude * q / (q + 1.0) + offset
            }
            Rate::Logistic { slope, shift } => 1.0 / (1.0 + (-slope * n + shift).exp()),
            Rate::Quadratic { offset } => n * n + offset,
        }
    }

    pub fn deriv(&self, n: f64) -> f64 {
        match *self {
            Rate::Constant { .. } => 0.0,
            Rate::ExpDecay { amplitude, decay } => -amplitude * decay * (-decay * n).exp(),
            Rate::Hill { amplitude, .. } => {
                let q = n * n + 1.0;
                2.0 * amplitude * n / (q * q)
            }
            Rate::Logistic { slope, .. } => {
                let v = self.value(n);
                slope * v * (1.0 - v)
            }
            Rate::Quadratic { .. } => 2.0 * n,
        }
    }

    /// `sup phi` over `[0, cap]`.
    fn sup(&self, cap: Option<f64>) -> f64 {
        match *self {
            Rate::Constant { value } => value,
            Rate::ExpDecay { amplitude, decay } => {
                if decay >= 0.0 {
                    amplitude
                } else {
                    cap.map_or(f64::INFINITY, |c| self.value(c))
                }
            }
            Rate::Hill { amplitude, offset } => amplitude.max(0.0) + offset,
            Rate::Logistic { .. } => 1.0,
            Rate::Quadratic { offset } => cap.map_or(f64::INFINITY, |c| c * c + offset),
        }
    }

    /// `(sup phi', sup |phi'|)` over `[0, cap]`.
    fn deriv_bounds(&self, cap: Option<f64>) -> (f64, f64) {
        match *self {
            Rate::Constant { .. } => (0.0, 0.0),
            Rate::ExpDecay { amplitude, decay } => {
                if decay >= 0.0 {
                    (0.0, (amplitude * decay).abs())
                } else {
                    let top = cap.map_or(f64::INFINITY, |c| self.deriv(c).abs());
                    (top, top)
                }
            }
            Rate::Hill { amplitude, .. } => {
                // 2 A n / (n^2 + 1)^2 peaks at n = 1/sqrt(3)
                let peak = self.deriv(1.0 / 3f64.sqrt());
                if amplitude >= 0.0 {
                    (peak, peak)
                } else {
                    (0.0, peak.abs())
                }
            }
            Rate::Logistic { slope, shift } => {
                let peak = if shift / slope >= 0.0 {
                    slope / 4.0
                } else {
                    self.deriv(0.0)
                };
                (peak.max(0.0), peak.abs())
            }
            Rate::Quadratic { .. } => {
                let top = cap.map_or(f64::INFINITY, |c| 2.0 * c);
                (top, top)
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.sup(None).is_finite()
    }
}

/// Age gate of the firing coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Refractory {
    /// Fires at every age.
    None,
    /// Absolute refractory period: `chi(s > sigma)`.
    Fixed { sigma: f64 },
    /// Activity-dependent period `sigma(x) = max_period - drop * x^4 / (x^4 + 1)`
    /// evaluated at `x = scale * N`.
    Variable {
        max_period: f64,
        drop: f64,
        scale: f64,
    },
    /// Smooth gate `1 / (1 + exp(-(s - sigma) / width))`.
    Sigmoid { sigma: f64, width: f64 },
}

/// `max_x 4 x^3 / (x^4 + 1)^2`, attained at `x^4 = 3/5`.
fn quartic_slope_max() -> f64 {
    let x = 0.6f64.powf(0.25);
    4.0 * x.powi(3) / (1.6 * 1.6)
}

impl Refractory {
    /// Refractory age at activity `n`; `None` for gates without a sharp edge.
    pub fn period(&self, n: f64) -> Option<f64> {
        match *self {
            Refractory::None => Some(0.0),
            Refractory::Fixed { sigma } => Some(sigma),
            Refractory::Variable {
                max_period,
                drop,
                scale,
            } => {
                let x4 = (scale * n).powi(4);
                Some(max_period - drop * x4 / (x4 + 1.0))
            }
            Refractory::Sigmoid { .. } => None,
        }
    }

    pub fn gate(&self, s: f64, n: f64) -> f64 {
        match *self {
            Refractory::Sigmoid { sigma, width } => 1.0 / (1.0 + (-(s - sigma) / width).exp()),
            _ => {
                let sigma = self.period(n).unwrap_or(0.0);
                if s > sigma {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `int_0^s gate(u, n) du`.
    pub fn gate_integral(&self, s: f64, n: f64) -> f64 {
        match *self {
            Refractory::Sigmoid { sigma, width } => {
                let softplus = |z: f64| if z > 30.0 { z } else { z.exp().ln_1p() };
                width * (softplus((s - sigma) / width) - softplus(-sigma / width))
            }
            _ => (s - self.period(n).unwrap_or(0.0)).max(0.0),
        }
    }

    /// Whether the gate moves with the activity.
    pub fn is_activity_dependent(&self) -> bool {
        matches!(self, Refractory::Variable { .. })
    }

    /// `sup |d sigma / dN|` for the variable gate, zero otherwise.
    pub fn period_lipschitz(&self) -> f64 {
        match *self {
            Refractory::Variable { drop, scale, .. } => (drop * scale).abs() * quartic_slope_max(),
            _ => 0.0,
        }
    }

    /// Ages where the gate is discontinuous at activity `n`.
    pub fn breakpoints(&self, n: f64) -> Vec<f64> {
        match self {
            Refractory::Fixed { .. } | Refractory::Variable { .. } => {
                self.period(n).into_iter().filter(|&p| p > 0.0).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// `d_N p` at a point, or a marker that the derivative is a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivative {
    Analytic(f64),
    /// The gate edge moves with `N`; use finite differences of the flux map.
    Singular,
}

/// Sup-norms of the hazard; infinite where undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardNorms {
    pub p_sup: f64,
    /// `sup d_N p`.
    pub gamma: f64,
    /// `sup |d_N p|`.
    pub dnp_sup: f64,
    /// `sup |d_s p|`.
    pub dsp_sup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardModel {
    pub rate: Rate,
    pub refractory: Refractory,
    /// Upper bound imposed on the activity argument; required when the rate is unbounded.
    pub activity_cap: Option<f64>,
}

impl HazardModel {
    pub fn new(rate: Rate, refractory: Refractory) -> Self {
        Self {
            rate,
            refractory,
            activity_cap: None,
        }
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.activity_cap = Some(cap);
        self
    }

    /// Checks parameter ranges that keep `p >= 0`.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite")))
            }
        };
        match self.rate {
            Rate::Constant { value } if value < 0.0 => {
                return Err(Error::invalid("constant rate must be nonnegative"))
            }
            Rate::ExpDecay { amplitude, decay } => {
                finite("decay", decay)?;
                if amplitude < 0.0 {
                    return Err(Error::invalid("exp-decay amplitude must be nonnegative"));
                }
            }
            Rate::Hill { amplitude, offset } => {
                if offset < 0.0 || amplitude + offset < 0.0 {
                    return Err(Error::invalid("hill rate must stay nonnegative"));
                }
            }
            Rate::Logistic { slope, shift } => {
                finite("slope", slope)?;
                finite("shift", shift)?;
                if slope == 0.0 {
                    return Err(Error::invalid("logistic slope must be nonzero"));
                }
            }
            Rate::Quadratic { offset } if offset < 0.0 => {
                return Err(Error::invalid("quadratic offset must be nonnegative"))
            }
            _ => {}
        }
        match self.refractory {
            Refractory::Fixed { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                return Err(Error::invalid("refractory period must be nonnegative"))
            }
            Refractory::Variable {
                max_period,
                drop,
                scale,
            } => {
                finite("scale", scale)?;
                if !(drop >= 0.0 && max_period - drop >= 0.0) {
                    return Err(Error::invalid(
                        "variable refractory period must stay nonnegative",
                    ));
                }
            }
            Refractory::Sigmoid { sigma, width } => {
                finite("sigma", sigma)?;
                if !(width > 0.0) {
                    return Err(Error::invalid("sigmoid width must be positive"));
                }
            }
            _ => {}
        }
        if let Some(cap) = self.activity_cap {
            if !(cap > 0.0 && cap.is_finite()) {
                return Err(Error::invalid("activity cap must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn is_bounded(&self) -> bool {
        self.rate.is_bounded()
    }

    /// The activity argument actually fed to the model, clamped at the cap.
    fn arg(&self, n: f64) -> f64 {
        match self.activity_cap {
            Some(cap) if !self.rate.is_bounded() => n.min(cap),
            _ => n,
        }
    }

    pub fn eval(&self, s: f64, n: f64) -> f64 {
        let n = self.arg(n);
        self.rate.value(n) * self.refractory.gate(s, n)
    }

    pub fn dn(&self, s: f64, n: f64) -> Derivative {
        if self.refractory.is_activity_dependent() {
            return Derivative::Singular;
        }
        let n = self.arg(n);
        Derivative::Analytic(self.rate.deriv(n) * self.refractory.gate(s, n))
    }

    pub fn cumulative(&self, s: f64, n: f64) -> f64 {
        let n = self.arg(n);
        self.rate.value(n) * self.refractory.gate_integral(s, n)
    }

    pub fn norms(&self) -> Result<HazardNorms> {
        let cap = self.activity_cap;
        let p_sup = self.rate.sup(cap);
        if !p_sup.is_finite() {
            return Err(Error::UnboundedHazard);
        }
        let (gamma, dnp_sup) = if self.refractory.is_activity_dependent() {
            (f64::INFINITY, f64::INFINITY)
        } else {
            self.rate.deriv_bounds(cap)
        };
        let dsp_sup = match self.refractory {
            Refractory::None => 0.0,
            Refractory::Sigmoid { width, .. } => p_sup / (4.0 * width),
            _ => f64::INFINITY,
        };
        Ok(HazardNorms {
            p_sup,
            gamma,
            dnp_sup,
            dsp_sup,
        })
    }

    /// Bound on `|dF/dN|` for `F(N) = int p(s, N) n(s) ds` over densities with
    /// the given mass and sup. The variable gate contributes through the motion
    /// of its edge.
    pub fn flux_lipschitz(&self, mass: f64, n_sup: f64) -> Result<f64> {
        let cap = self.activity_cap;
        let p_sup = self.rate.sup(cap);
        if !p_sup.is_finite() {
            return Err(Error::UnboundedHazard);
        }
        let (_, dphi) = self.rate.deriv_bounds(cap);
        Ok(dphi * mass + p_sup * self.refractory.period_lipschitz() * n_sup)
    }

    /// Ages where `p(., n)` jumps.
    pub fn breakpoints(&self, n: f64) -> Vec<f64> {
        self.refractory.breakpoints(self.arg(n))
    }
}

pub fn hazard_eval(model: &HazardModel, s: f64, n: f64) -> f64 {
    model.eval(s, n)
}

pub fn hazard_dn(model: &HazardModel, s: f64, n: f64) -> Derivative {
    model.dn(s, n)
}

pub fn cumulative_hazard(model: &HazardModel, s: f64, n: f64) -> f64 {
    model.cumulative(s, n)
}

pub fn hazard_norms(model: &HazardModel) -> Result<HazardNorms> {
    model.norms()
}
