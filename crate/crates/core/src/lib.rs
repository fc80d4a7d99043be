//! Finite-volume solvers for nonlinear age-structured neural population
//! equations: the instantaneous-transmission model
//!
//! ```text
//! d_t n + d_s n + p(s, N) n = 0,   N(t) = n(t, 0) = int p(s, N) n ds
//! ```
//!
//! and its distributed-delay variant, where the rate sees the total activity
//! `X = alpha * N` instead of `N`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bv;
pub mod ddm;
pub mod error;
pub mod fixed_point;
pub mod flux;
pub mod grid;
pub mod hazard;
pub mod initial;
pub mod itm;
pub mod kernel;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod scenario;
pub mod steady;
pub mod trajectory;
pub mod upwind;

pub use ddm::{
    ddm_run, ddm_run_exponential_ode, ActivityMethod, ConvolutionWeights, DdmOptions, DdmSolver,
    DdmState,
};
pub use error::{Error, Result};
pub use fixed_point::find_all_roots;
pub use flux::{discrete_flux_map, invertibility_psi};
pub use grid::{
    build_grid, cfl_dt_ddm, cfl_dt_itm, total_mass, total_variation, DensityVector, Grid,
};
pub use hazard::{HazardModel, HazardNorms, Rate, Refractory};
pub use initial::{discretize_initial, InitialDensity};
pub use itm::{itm_run, FluxSolve, ItmOptions, ItmSolver, ItmState};
pub use kernel::{DelayKernel, KernelSamples, KernelShape};
pub use roots::{select_branch, BranchPolicy, RootReport, ScanOptions};
pub use steady::{stationary_density, stationary_flux_roots};
pub use trajectory::{Event, Snapshot, Trajectory};
