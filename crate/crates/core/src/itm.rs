//! Explicit upwind stepper for the instantaneous-transmission model.

use crate::error::{Error, Result};
use crate::fixed_point::roots_of_map;
use crate::flux::CellRates;
use crate::grid::{cfl_dt_itm, DensityVector, Grid};
use crate::hazard::HazardModel;
use crate::roots::{select_branch, BranchPolicy, BranchTracker, RootReport, ScanOptions};
use crate::trajectory::{snapshot_steps, Event, Snapshot, StepRecord, Trajectory};
use crate::upwind::upwind_step;

/// How `N^{m+1}` is obtained from the advanced density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxSolve {
    /// Solve `N = F(N)` to tolerance, following a branch.
    #[default]
    Full,
    /// `N^{m+1} = F(N^m)` on the new density.
    Frozen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItmOptions {
    pub policy: BranchPolicy,
    pub flux_solve: FluxSolve,
    pub scan: ScanOptions,
    pub snapshot_times: Vec<f64>,
}

impl Default for ItmOptions {
    fn default() -> Self {
        Self {
            policy: BranchPolicy::Nearest,
            flux_solve: FluxSolve::Full,
            scan: ScanOptions::default(),
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItmState {
    pub step: usize,
    pub density: DensityVector,
    pub flux: f64,
    pub psi: f64,
    pub report: RootReport,
    /// Set when this state was reached through a branch jump.
    pub jumped: bool,
    tracker: BranchTracker,
}

/// Checks `dt` against the transport bound.
pub fn check_cfl_itm(model: &HazardModel, grid: &Grid) -> Result<()> {
    let bound = cfl_dt_itm(grid.ds(), model.norms()?.p_sup)?;
    if grid.dt() > bound * (1.0 + 1e-12) {
        return Err(Error::CflViolation {
            dt: grid.dt(),
            bound,
        });
    }
    Ok(())
}

/// Stepper bound to one model and mesh.
#[derive(Debug, Clone)]
pub struct ItmSolver<'a> {
    model: &'a HazardModel,
    grid: &'a Grid,
    rates: CellRates,
    p_sup: f64,
    opts: ItmOptions,
    buf: Vec<f64>,
}

impl<'a> ItmSolver<'a> {
    pub fn new(model: &'a HazardModel, grid: &'a Grid, opts: ItmOptions) -> Result<Self> {
        model.validate()?;
        check_cfl_itm(model, grid)?;
        let p_sup = model.norms()?.p_sup;
        Ok(Self {
            model,
            grid,
            rates: CellRates::new(model, grid.ds(), grid.cells()),
            p_sup,
            opts,
            buf: vec![0.0; grid.cells()],
        })
    }

    fn check_density(&self, n0: &DensityVector) -> Result<()> {
        if n0.len() != self.grid.cells()
            || (n0.ds() - self.grid.ds()).abs() > 1e-12 * self.grid.ds()
        {
            return Err(Error::invalid(format!(
                "density has {} cells of width {}, grid has {} of width {}",
                n0.len(),
                n0.ds(),
                self.grid.cells(),
                self.grid.ds()
            )));
        }
        Ok(())
    }

    /// Solves for `N^0` and applies the branch policy.
    pub fn init(&self, n0: DensityVector) -> Result<ItmState> {
        self.check_density(&n0)?;
        let map = self.rates.flux_map(self.model, &n0);
        let mut report = roots_of_map(&map, self.p_sup, &self.opts.scan)?;
        report.selected = select_branch(&report.roots, 0.0, self.opts.policy)?;
        let tracker = BranchTracker::new(report.roots.clone(), report.selected);
        Ok(ItmState {
            step: 0,
            flux: report.value(),
            psi: report.selected_psi(),
            density: n0,
            report,
            jumped: false,
            tracker,
        })
    }

    pub fn step(&mut self, state: ItmState) -> Result<ItmState> {
        let ItmState {
            step,
            density,
            flux,
            mut tracker,
            ..
        } = state;
        let ds = density.ds();
        let mut values = density.values().to_vec();
        self.rates.fill(self.model, flux, &mut self.buf);
        upwind_step(
            &mut values,
            &self.buf,
            flux,
            self.grid.courant(),
            self.grid.dt(),
            step + 1,
        )?;
        let density = DensityVector::from_raw(ds, values);
        let map = self.rates.flux_map(self.model, &density);
        let (report, jumped) = match self.opts.flux_solve {
            FluxSolve::Full => {
                let mut report =
                    roots_of_map(&map, self.p_sup, &self.opts.scan).map_err(|e| match e {
                        Error::Internal { reason, .. } => Error::FixedPoint {
                            step: step + 1,
                            reason,
                        },
                        other => other,
                    })?;
                let follow = tracker.advance(report.roots.clone());
                let (index, jumped) = match self.opts.policy {
                    BranchPolicy::Lowest => (0, follow.jumped || follow.index != 0),
                    BranchPolicy::Highest => {
                        let top = report.roots.len() - 1;
                        (top, follow.jumped || follow.index != top)
                    }
                    _ => (follow.index, follow.jumped),
                };
                tracker = BranchTracker::new(report.roots.clone(), index);
                report.selected = index;
                report.jump_event = jumped;
                (report, jumped)
            }
            FluxSolve::Frozen => {
                let n = map.eval(flux);
                let report = RootReport {
                    roots: vec![n],
                    psi: vec![map.psi(n)],
                    tangent: vec![false],
                    selected: 0,
                    jump_event: false,
                };
                tracker = BranchTracker::new(vec![n], 0);
                (report, false)
            }
        };
        Ok(ItmState {
            step: step + 1,
            flux: report.value(),
            psi: report.selected_psi(),
            density,
            report,
            jumped,
            tracker,
        })
    }

    pub fn run(&mut self, n0: DensityVector) -> Result<Trajectory> {
        let steps = self.grid.steps();
        let snaps = snapshot_steps(&self.opts.snapshot_times, self.grid.dt(), steps);
        let mut traj = Trajectory::new(self.grid.ds(), self.grid.dt(), &n0);
        let mut state = self.init(n0)?;
        for m in 0..=steps {
            if m > 0 {
                let prev = state.flux;
                state = self.step(state)?;
                if state.jumped {
                    traj.events.push(Event::Jump {
                        step: m,
                        time: self.grid.time(m),
                        from: prev,
                        to: state.flux,
                    });
                }
            }
            traj.record(
                StepRecord {
                    time: self.grid.time(m),
                    flux: state.flux,
                    activity: None,
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

pub fn itm_init(
    n0: DensityVector,
    model: &HazardModel,
    grid: &Grid,
    policy: BranchPolicy,
) -> Result<ItmState> {
    ItmSolver::new(
        model,
        grid,
        ItmOptions {
            policy,
            ..Default::default()
        },
    )?
    .init(n0)
}

pub fn itm_step(state: ItmState, model: &HazardModel, grid: &Grid) -> Result<ItmState> {
    ItmSolver::new(model, grid, ItmOptions::default())?.step(state)
}

pub fn itm_run(
    n0: DensityVector,
    model: &HazardModel,
    grid: &Grid,
    opts: ItmOptions,
) -> Result<Trajectory> {
    ItmSolver::new(model, grid, opts)?.run(n0)
}

/// Upwind run of the linear problem with a prescribed discharge flux `N(t)`.
pub fn linear_run(
    n0: DensityVector,
    model: &HazardModel,
    grid: &Grid,
    flux: &dyn Fn(f64) -> f64,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    model.validate()?;
    check_cfl_itm(model, grid)?;
    let rates = CellRates::new(model, grid.ds(), grid.cells());
    let mut buf = vec![0.0; grid.cells()];
    let steps = grid.steps();
    let snaps = snapshot_steps(snapshot_times, grid.dt(), steps);
    let mut traj = Trajectory::new(grid.ds(), grid.dt(), &n0);
    let ds = n0.ds();
    let mut values = n0.values().to_vec();
    for m in 0..=steps {
        let t = grid.time(m);
        if m > 0 {
            let prev = flux(grid.time(m - 1));
            rates.fill(model, prev, &mut buf);
            upwind_step(&mut values, &buf, prev, grid.courant(), grid.dt(), m)?;
        }
        let density = DensityVector::from_raw(ds, values.clone());
        traj.record(
            StepRecord {
                time: t,
                flux: flux(t),
                activity: None,
                psi: 1.0,
                jump: false,
            },
            &density,
        );
        if snaps.binary_search(&m).is_ok() {
            traj.snapshots.push(Snapshot { time: t, density });
        }
    }
    Ok(traj)
}
