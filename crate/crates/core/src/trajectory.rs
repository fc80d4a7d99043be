//! Per-step diagnostics of a run and the density snapshots.

use crate::grid::DensityVector;

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// The followed root disappeared and the solution moved to another branch.
    Jump {
        step: usize,
        time: f64,
        from: f64,
        to: f64,
    },
    /// The activity left the admissible range; the run stops here.
    BlowUp {
        step: usize,
        time: f64,
        activity: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub density: DensityVector,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub ds: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub flux: Vec<f64>,
    /// Total activity; empty for the instantaneous model.
    pub activity: Vec<f64>,
    pub psi: Vec<f64>,
    pub mass: Vec<f64>,
    pub tv: Vec<f64>,
    pub jump: Vec<bool>,
    pub density_min: Vec<f64>,
    pub density_max: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<Event>,
    /// Sup-norm of the initial cell averages.
    pub initial_sup: f64,
}

/// One row of per-step scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    pub flux: f64,
    pub activity: Option<f64>,
    pub psi: f64,
    pub jump: bool,
}

impl Trajectory {
    pub(crate) fn new(ds: f64, dt: f64, initial: &DensityVector) -> Self {
        Self {
            ds,
            dt,
            initial_sup: initial.sup(),
            ..Default::default()
        }
    }

    pub(crate) fn record(&mut self, row: StepRecord, density: &DensityVector) {
        self.times.push(row.time);
        self.flux.push(row.flux);
        if let Some(x) = row.activity {
            self.activity.push(x);
        }
        self.psi.push(row.psi);
        self.mass.push(density.mass());
        self.tv.push(density.total_variation(row.flux));
        self.jump.push(row.jump);
        let (lo, hi) = density
            .values()
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        self.density_min.push(if lo.is_finite() { lo } else { 0.0 });
        self.density_max.push(hi);
    }

    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn final_flux(&self) -> f64 {
        self.flux.last().copied().unwrap_or(0.0)
    }

    pub fn jump_count(&self) -> usize {
        self.jump.iter().filter(|&&j| j).count()
    }

    pub fn jump_steps(&self) -> Vec<usize> {
        self.jump
            .iter()
            .enumerate()
            .filter(|(_, &j)| j)
            .map(|(m, _)| m)
            .collect()
    }

    pub fn min_psi(&self) -> f64 {
        self.psi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_m |mass_m - mass_0| / mass_0` (absolute when the initial mass is zero).
    pub fn mass_drift(&self) -> f64 {
        let Some(&m0) = self.mass.first() else {
            return 0.0;
        };
        let scale = if m0 > 0.0 { m0 } else { 1.0 };
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / scale
    }

    pub fn blow_up(&self) -> Option<(f64, f64)> {
        self.events.iter().find_map(|e| match e {
            Event::BlowUp { time, activity, .. } => Some((*time, *activity)),
            _ => None,
        })
    }

    /// Index of the step closest to `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let m = (t / self.dt).round();
        (m.max(0.0) as usize).min(self.steps())
    }

    /// Linear interpolation of a per-step series at time `t`.
    pub fn interpolate(series: &[f64], dt: f64, t: f64) -> f64 {
        if series.is_empty() {
            return f64::NAN;
        }
        let x = (t / dt).max(0.0);
        let i = x.floor() as usize;
        if i + 1 >= series.len() {
            return series[series.len() - 1];
        }
        let w = x - i as f64;
        series[i] * (1.0 - w) + series[i + 1] * w
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
    }
}

/// Maps requested snapshot times to step indices, dropping duplicates.
pub(crate) fn snapshot_steps(times: &[f64], dt: f64, steps: usize) -> Vec<usize> {
    let mut out: Vec<usize> = times
        .iter()
        .filter(|t| t.is_finite() && **t >= 0.0)
        .map(|t| ((t / dt).round() as usize).min(steps))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_and_counts() {
        let d0 = DensityVector::new(0.5, vec![1.0, 1.0]).unwrap();
        let d1 = DensityVector::new(0.5, vec![1.0, 1.1]).unwrap();
        let mut t = Trajectory::new(0.5, 0.1, &d0);
        t.record(
            StepRecord {
                time: 0.0,
                flux: 0.2,
                activity: None,
                psi: 1.0,
                jump: false,
            },
            &d0,
        );
        t.record(
            StepRecord {
                time: 0.1,
                flux: 0.4,
                activity: None,
                psi: 0.3,
                jump: true,
            },
            &d1,
        );
        assert!((t.mass_drift() - 0.05).abs() < 1e-12);
        assert_eq!(t.jump_count(), 1);
        assert_eq!(t.min_psi(), 0.3);
        assert_eq!(t.density_max, vec![1.0, 1.1]);
        assert!((Trajectory::interpolate(&t.flux, 0.1, 0.05) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn snapshot_indices() {
        assert_eq!(
            snapshot_steps(&[0.0, 1.0, 1.01, 50.0], 0.1, 100),
            vec![0, 10, 100]
        );
    }
}
