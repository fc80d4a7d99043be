//! Delay kernels `alpha(t)` for the distributed-delay model.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelShape {
    /// `exp(-t / lambda) / lambda`.
    Exponential { lambda: f64 },
    /// Normal density with mean `d` and deviation `lambda`.
    Gaussian { d: f64, lambda: f64 },
}

/// `alpha(t) = scale * shape(t)`; `scale` is the connectivity `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayKernel {
    pub shape: KernelShape,
    pub scale: f64,
}

impl DelayKernel {
    pub fn exponential(lambda: f64) -> Self {
        Self {
            shape: KernelShape::Exponential { lambda },
            scale: 1.0,
        }
    }

    pub fn gaussian(d: f64, lambda: f64) -> Self {
        Self {
            shape: KernelShape::Gaussian { d, lambda },
            scale: 1.0,
        }
    }

    pub fn scaled(mut self, j: f64) -> Self {
        self.scale = j;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let lambda = self.lambda();
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel width must be positive, got {lambda}"
            )));
        }
        if let KernelShape::Gaussian { d, .. } = self.shape {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::invalid(format!(
                    "kernel delay must be nonnegative, got {d}"
                )));
            }
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(format!(
                "connectivity must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        match self.shape {
            KernelShape::Exponential { lambda } | KernelShape::Gaussian { lambda, .. } => lambda,
        }
    }

    /// Mean delay: `d` for the Gaussian, zero for the exponential.
    pub fn delay(&self) -> f64 {
        match self.shape {
            KernelShape::Exponential { .. } => 0.0,
            KernelShape::Gaussian { d, .. } => d,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let v = match self.shape {
            KernelShape::Exponential { lambda } => (-t / lambda).exp() / lambda,
            KernelShape::Gaussian { d, lambda } => {
                let z = (t - d) / lambda;
                (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * lambda)
            }
        };
        self.scale * v
    }

    /// Samples `alpha(k dt)` for `k = 0..=steps`.
    pub fn sample(&self, dt: f64, steps: usize) -> KernelSamples {
        let values: Vec<f64> = (0..=steps).map(|k| self.eval(k as f64 * dt)).collect();
        let l1 = dt * values.iter().map(|v| v.abs()).sum::<f64>();
        let tv = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        KernelSamples {
            alpha0: values[0],
            l1,
            tv,
            under_resolved: dt > self.lambda() / 4.0,
            dt,
            values,
        }
    }
}

pub fn kernel_eval(kernel: &DelayKernel, t: f64) -> f64 {
    kernel.eval(t)
}

pub fn kernel_sample(kernel: &DelayKernel, dt: f64, steps: usize) -> KernelSamples {
    kernel.sample(dt, steps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSamples {
    pub dt: f64,
    pub values: Vec<f64>,
    pub alpha0: f64,
    /// `dt * sum |alpha_k|`.
    pub l1: f64,
    /// `sum |alpha_{k+1} - alpha_k|`.
    pub tv: f64,
    /// Set when `dt > lambda / 4`.
    pub under_resolved: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(DelayKernel::exponential(1.0).eval(0.0), 1.0);
        assert_eq!(DelayKernel::exponential(1e-3).eval(0.0), 1000.0);
        let g = DelayKernel::gaussian(0.5, 1e-3).eval(0.5);
        assert!((g - 398.942_280_401_432_7).abs() < 1e-9);
    }

    #[test]
    fn sample_examples() {
        let s = DelayKernel::exponential(1.0).sample(0.5, 2);
        assert_eq!(s.values[0], 1.0);
        assert!((s.values[1] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((s.values[2] - (-1.0f64).exp()).abs() < 1e-15);
        assert!(!DelayKernel::exponential(1.0).sample(0.2, 2).under_resolved);
        assert!(
            DelayKernel::gaussian(0.5, 0.01)
                .sample(0.01, 10)
                .under_resolved
        );
        let j = DelayKernel::exponential(1e-3)
            .scaled(2.5)
            .sample(1e-5, 2000);
        assert!((j.l1 - 2.5).abs() < 2.5 * 1e-5 / 1e-3);
    }

    #[test]
    fn discrete_mass_close_to_one() {
        for lambda in [0.1, 0.5, 1.0] {
            let dt = lambda / 20.0;
            let steps = (40.0 * lambda / dt) as usize;
            let s = DelayKernel::exponential(lambda).sample(dt, steps);
            assert!((s.l1 - 1.0).abs() <= 5.0 * dt / lambda);
        }
    }
}
