//! Upwind stepper for the distributed-delay model.
//!
//! Each step advances the density with the rate frozen at `X^m`, solves for
//! `X^{m+1}`, then evaluates `N^{m+1} = F(X^{m+1})` directly.

use crate::error::{Error, Result};
use crate::fixed_point::{solve_activity, ActivitySolve};
use crate::flux::{CellRates, FluxMap};
use crate::grid::{cfl_dt_ddm, cfl_dt_itm, DensityVector, Grid};
use crate::hazard::HazardModel;
use crate::kernel::{DelayKernel, KernelSamples, KernelShape};
use crate::roots::{BranchTracker, ScanOptions};
use crate::trajectory::{snapshot_steps, Event, Snapshot, StepRecord, Trajectory};
use crate::upwind::upwind_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionWeights {
    /// `dt/2` at both ends, `dt` inside.
    #[default]
    Trapezoid,
    /// `dt/2` on every term.
    UniformHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivityMethod {
    /// Quadrature of `int alpha(t - u) N(u) du` over the full history.
    Convolution(ConvolutionWeights),
    /// Implicit Euler on `lambda X' + X = J N` (exponential kernels).
    ExponentialOde,
    /// `X^m = J N^{m - D}` with `D = round(d / dt)` (Gaussian kernels, vanishing width).
    DelayShift,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdmOptions {
    pub method: ActivityMethod,
    pub scan: ScanOptions,
    pub snapshot_times: Vec<f64>,
}

impl Default for DdmOptions {
    fn default() -> Self {
        Self {
            method: ActivityMethod::Convolution(ConvolutionWeights::Trapezoid),
            scan: ScanOptions::default(),
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdmState {
    pub step: usize,
    pub density: DensityVector,
    pub flux: f64,
    pub activity: f64,
    pub psi: f64,
    /// `N^0 .. N^m`.
    pub flux_history: Vec<f64>,
    pub jumped: bool,
    tracker: BranchTracker,
}

/// Result of one step.
#[derive(Debug, Clone, PartialEq)]
pub enum DdmStep {
    Advanced(DdmState),
    /// No admissible activity below the cap.
    BlowUp {
        step: usize,
        activity: f64,
    },
}

/// Checks `dt` against the bound matching the activity method. Unbounded
/// rates are checked at run time instead.
pub fn check_cfl_ddm(
    model: &HazardModel,
    kernel: &DelayKernel,
    grid: &Grid,
    method: ActivityMethod,
    n0: &DensityVector,
) -> Result<()> {
    if !model.is_bounded() {
        return Ok(());
    }
    let norms = model.norms()?;
    let bound = match method {
        ActivityMethod::Convolution(_) => {
            let mass = n0.mass();
            let lip = model.flux_lipschitz(mass, n0.sup())?;
            let per_mass = if mass > 0.0 { lip / mass } else { 0.0 };
            cfl_dt_ddm(grid.ds(), norms.p_sup, per_mass, kernel.eval(0.0), mass)?
        }
        _ => cfl_dt_itm(grid.ds(), norms.p_sup)?,
    };
    if grid.dt() > bound * (1.0 + 1e-12) {
        return Err(Error::CflViolation {
            dt: grid.dt(),
            bound,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DdmSolver<'a> {
    model: &'a HazardModel,
    kernel: &'a DelayKernel,
    grid: &'a Grid,
    rates: CellRates,
    opts: DdmOptions,
    samples: Option<KernelSamples>,
    delay_steps: usize,
    p_sup: Option<f64>,
    cap: f64,
    buf: Vec<f64>,
}

impl<'a> DdmSolver<'a> {
    pub fn new(
        model: &'a HazardModel,
        kernel: &'a DelayKernel,
        grid: &'a Grid,
        opts: DdmOptions,
    ) -> Result<Self> {
        model.validate()?;
        kernel.validate()?;
        let p_sup = if model.is_bounded() {
            Some(model.norms()?.p_sup)
        } else {
            None
        };
        let cap = match (model.activity_cap, p_sup) {
            (Some(c), _) => c,
            (None, Some(_)) => f64::INFINITY,
            (None, None) => return Err(Error::UnboundedHazard),
        };
        let mut delay_steps = 0;
        let mut samples = None;
        match opts.method {
            ActivityMethod::Convolution(_) => {
                samples = Some(kernel.sample(grid.dt(), grid.steps() + 1))
            }
            ActivityMethod::ExponentialOde => {
                if !matches!(kernel.shape, KernelShape::Exponential { .. }) {
                    return Err(Error::invalid(
                        "the ODE activity path needs an exponential kernel",
                    ));
                }
            }
            ActivityMethod::DelayShift => {
                if !matches!(kernel.shape, KernelShape::Gaussian { .. }) {
                    return Err(Error::invalid(
                        "the delay-shift activity path needs a Gaussian kernel",
                    ));
                }
                delay_steps = ((kernel.delay() / grid.dt()).round() as usize).max(1);
            }
        }
        Ok(Self {
            model,
            kernel,
            grid,
            rates: CellRates::new(model, grid.ds(), grid.cells()),
            opts,
            samples,
            delay_steps,
            p_sup,
            cap,
            buf: vec![0.0; grid.cells()],
        })
    }

    pub fn samples(&self) -> Option<&KernelSamples> {
        self.samples.as_ref()
    }

    /// Number of steps in the delay-shift lag.
    pub fn delay_steps(&self) -> usize {
        self.delay_steps
    }

    /// `X^0 = 0` and `N^0 = F(0)`.
    pub fn init(&self, n0: DensityVector) -> Result<DdmState> {
        if n0.len() != self.grid.cells() {
            return Err(Error::invalid(format!(
                "density has {} cells, grid has {}",
                n0.len(),
                self.grid.cells()
            )));
        }
        check_cfl_ddm(self.model, self.kernel, self.grid, self.opts.method, &n0)?;
        let map = self.rates.flux_map(self.model, &n0);
        let flux = map.eval(0.0);
        Ok(DdmState {
            step: 0,
            psi: map.psi(0.0),
            density: n0,
            flux,
            activity: 0.0,
            flux_history: vec![flux],
            jumped: false,
            tracker: BranchTracker::new(vec![0.0], 0),
        })
    }

    /// Known part of the quadrature for `X^{m+1}` and the weight on `N^{m+1}`.
    fn convolution_terms(&self, history: &[f64], weights: ConvolutionWeights) -> (f64, f64) {
        let alpha = &self
            .samples
            .as_ref()
            .expect("kernel sampled for convolution")
            .values;
        let dt = self.grid.dt();
        let m1 = history.len();
        let known: f64 = match weights {
            ConvolutionWeights::Trapezoid => {
                let interior: f64 = (1..m1).map(|k| alpha[m1 - k] * history[k]).sum();
                0.5 * dt * alpha[m1] * history[0] + dt * interior
            }
            ConvolutionWeights::UniformHalf => {
                0.5 * dt * (0..m1).map(|k| alpha[m1 - k] * history[k]).sum::<f64>()
            }
        };
        (0.5 * dt * alpha[0], known)
    }

    fn advance_density(
        &mut self,
        density: &DensityVector,
        flux: f64,
        activity: f64,
        step: usize,
    ) -> Result<DensityVector> {
        let ds = density.ds();
        let dt = self.grid.dt();
        let mut values = density.values().to_vec();
        let phi = self.model.eval(f64::INFINITY, activity);
        let bound = 1.0 / (1.0 / ds + phi);
        let sub = if dt <= bound * (1.0 + 1e-12) {
            1
        } else {
            (dt / bound).ceil() as usize
        };
        self.rates.fill(self.model, activity, &mut self.buf);
        if sub == 1 {
            upwind_step(&mut values, &self.buf, flux, self.grid.courant(), dt, step)?;
        } else {
            let h = dt / sub as f64;
            let mut inflow = flux;
            for _ in 0..sub {
                upwind_step(&mut values, &self.buf, inflow, h / ds, h, step)?;
                let partial = DensityVector::from_raw(ds, values.clone());
                inflow = self.rates.flux_map(self.model, &partial).eval(activity);
            }
        }
        Ok(DensityVector::from_raw(ds, values))
    }

    fn solve_x(&self, map: &FluxMap<'_>, a: f64, b: f64) -> ActivitySolve {
        let f_max = self.p_sup.map(|p| p * map.mass_weight());
        solve_activity(map, a, b, f_max, self.cap, &self.opts.scan)
    }

    pub fn step(&mut self, state: DdmState) -> Result<DdmStep> {
        let DdmState {
            step,
            density,
            flux,
            activity,
            mut flux_history,
            mut tracker,
            ..
        } = state;
        let next = step + 1;
        let density = self.advance_density(&density, flux, activity, next)?;
        let map = self.rates.flux_map(self.model, &density);
        let j = self.kernel.scale;
        let (x, jumped) = match self.opts.method {
            ActivityMethod::DelayShift => {
                let x = if next >= self.delay_steps {
                    j * flux_history[next - self.delay_steps]
                } else {
                    0.0
                };
                (x, false)
            }
            method => {
                let (a, b) = match method {
                    ActivityMethod::Convolution(w) => self.convolution_terms(&flux_history, w),
                    _ => {
                        let r = self.grid.dt() / self.kernel.lambda();
                        (j * r / (1.0 + r), activity / (1.0 + r))
                    }
                };
                match self.solve_x(&map, a, b) {
                    ActivitySolve::Roots(roots) => {
                        let follow = tracker.advance(roots);
                        (tracker.roots()[follow.index], follow.jumped)
                    }
                    ActivitySolve::Exceeded { at } => {
                        return Ok(DdmStep::BlowUp {
                            step: next,
                            activity: at,
                        })
                    }
                }
            }
        };
        if x > self.cap {
            return Ok(DdmStep::BlowUp {
                step: next,
                activity: x,
            });
        }
        if !matches!(
            self.opts.method,
            ActivityMethod::Convolution(_) | ActivityMethod::ExponentialOde
        ) {
            tracker = BranchTracker::new(vec![x], 0);
        }
        let n = map.eval(x);
        flux_history.push(n);
        Ok(DdmStep::Advanced(DdmState {
            step: next,
            psi: map.psi(x),
            density,
            flux: n,
            activity: x,
            flux_history,
            jumped,
            tracker,
        }))
    }

    pub fn run(&mut self, n0: DensityVector) -> Result<Trajectory> {
        let steps = self.grid.steps();
        let snaps = snapshot_steps(&self.opts.snapshot_times, self.grid.dt(), steps);
        let mut traj = Trajectory::new(self.grid.ds(), self.grid.dt(), &n0);
        let mut state = self.init(n0)?;
        for m in 0..=steps {
            if m > 0 {
                let prev = state.activity;
                state = match self.step(state)? {
                    DdmStep::Advanced(s) => s,
                    DdmStep::BlowUp { step, activity } => {
                        traj.events.push(Event::BlowUp {
                            step,
                            time: self.grid.time(step),
                            activity,
                        });
                        break;
                    }
                };
                if state.jumped {
                    traj.events.push(Event::Jump {
                        step: m,
                        time: self.grid.time(m),
                        from: prev,
                        to: state.activity,
                    });
                }
            }
            traj.record(
                StepRecord {
                    time: self.grid.time(m),
                    flux: state.flux,
                    activity: Some(state.activity),
                    psi: state.psi,
                    jump: state.jumped,
                },
                &state.density,
            );
            if snaps.binary_search(&m).is_ok() {
                traj.snapshots.push(Snapshot {
                    time: self.grid.time(m),
                    density: state.density.clone(),
                });
            }
        }
        Ok(traj)
    }
}

pub fn ddm_run(
    n0: DensityVector,
    model: &HazardModel,
    kernel: &DelayKernel,
    grid: &Grid,
    opts: DdmOptions,
) -> Result<Trajectory> {
    DdmSolver::new(model, kernel, grid, opts)?.run(n0)
}

pub fn ddm_run_exponential_ode(
    n0: DensityVector,
    model: &HazardModel,
    kernel: &DelayKernel,
    grid: &Grid,
    snapshot_times: Vec<f64>,
) -> Result<Trajectory> {
    let opts = DdmOptions {
        method: ActivityMethod::ExponentialOde,
        snapshot_times,
        ..Default::default()
    };
    ddm_run(n0, model, kernel, grid, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::hazard::{Rate, Refractory};
    use crate::initial::{discretize_initial, InitialDensity};
    use crate::itm::{itm_run, ItmOptions};

    fn example1() -> HazardModel {
        HazardModel::new(
            Rate::ExpDecay {
                amplitude: 1.0,
                decay: 9.0,
            },
            Refractory::Fixed { sigma: 0.5 },
        )
    }

    #[test]
    fn decoupled_rate_matches_itm() {
        let g = build_grid(0.05, 0.04, 6.0, 2.0).unwrap();
        let m = HazardModel::new(
            Rate::Constant { value: 0.7 },
            Refractory::Fixed { sigma: 0.5 },
        );
        let n0 = discretize_initial(
            &InitialDensity::Indicator {
                start: 0.0,
                end: 2.0,
                height: 0.5,
            },
            &g,
        )
        .unwrap();
        let k = DelayKernel::exponential(0.5);
        let d = ddm_run(n0.clone(), &m, &k, &g, DdmOptions::default()).unwrap();
        let i = itm_run(n0, &m, &g, ItmOptions::default()).unwrap();
        for (a, b) in d.flux.iter().zip(&i.flux) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn first_activity_uses_initial_terms_only() {
        let g = build_grid(0.05, 0.01, 40.0, 1.0).unwrap();
        let m = example1();
        let n0 = discretize_initial(
            &InitialDensity::PlateauExp {
                height: 0.5,
                knee: 1.0,
            },
            &g,
        )
        .unwrap();
        let k = DelayKernel::exponential(0.5);
        let mut s = DdmSolver::new(&m, &k, &g, DdmOptions::default()).unwrap();
        let st = s.init(n0).unwrap();
        let n_0 = st.flux;
        let DdmStep::Advanced(st1) = s.step(st).unwrap() else {
            panic!()
        };
        let expect = 0.5 * g.dt() * (k.eval(g.dt()) * n_0 + k.eval(0.0) * st1.flux);
        assert!((st1.activity - expect).abs() < 1e-12);
    }

    #[test]
    fn ode_path_relaxes_to_constant_flux() {
        let g = build_grid(0.05, 0.02, 42.0, 3.0).unwrap();
        let m = HazardModel::new(Rate::Constant { value: 1.0 }, Refractory::None);
        let n0 = discretize_initial(&InitialDensity::Exponential { rate: 1.0 }, &g).unwrap();
        let k = DelayKernel::exponential(0.2);
        let t = ddm_run_exponential_ode(n0, &m, &k, &g, vec![]).unwrap();
        assert!((t.activity.last().unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn delay_shift_lags_flux() {
        let g = build_grid(0.02, 0.5 / 29.0, 45.0, 5.0).unwrap();
        let m = example1();
        let n0 = discretize_initial(
            &InitialDensity::PlateauExp {
                height: 0.5,
                knee: 1.0,
            },
            &g,
        )
        .unwrap();
        let k = DelayKernel::gaussian(0.5, 1e-3);
        let opts = DdmOptions {
            method: ActivityMethod::DelayShift,
            ..Default::default()
        };
        let t = ddm_run(n0, &m, &k, &g, opts).unwrap();
        for i in 29..t.flux.len() {
            assert_eq!(t.activity[i], t.flux[i - 29]);
        }
        assert!(t.activity[..29].iter().all(|&x| x == 0.0));
    }
}
