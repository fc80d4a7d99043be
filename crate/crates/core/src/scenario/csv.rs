//! CSV writers. Floats use 17 significant digits so output is byte-stable.

use super::config::ScenarioConfig;
use super::converge::ConvergenceRow;
use super::run::method_name;
use crate::trajectory::Trajectory;
use std::io::{self, Write};

pub const FLUX_HEADER: &str = "t,N,X,psi,mass,tv,jump";
pub const DENSITY_HEADER: &str = "t,s,n";
pub const CONVERGENCE_HEADER: &str = "ds,dt,l1_error,observed_order";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn metadata(w: &mut impl Write, cfg: &ScenarioConfig) -> io::Result<()> {
    writeln!(w, "# scenario = {}", cfg.name)?;
    writeln!(w, "# equation = {}", cfg.equation.name())?;
    writeln!(w, "# method = {}", method_name(cfg))?;
    writeln!(w, "# ds = {}", cfg.ds)?;
    writeln!(w, "# dt = {}", cfg.dt)?;
    writeln!(w, "# s_max = {}", cfg.s_max)?;
    writeln!(w, "# T = {}", cfg.t_final)
}

pub fn write_flux(w: &mut impl Write, cfg: &ScenarioConfig, traj: &Trajectory) -> io::Result<()> {
    metadata(w, cfg)?;
    writeln!(w, "{FLUX_HEADER}")?;
    for m in 0..traj.times.len() {
        let x = traj
            .activity
            .get(m)
            .map(|&x| fmt_f64(x))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(traj.times[m]),
            fmt_f64(traj.flux[m]),
            x,
            fmt_f64(traj.psi[m]),
            fmt_f64(traj.mass[m]),
            fmt_f64(traj.tv[m]),
            u8::from(traj.jump[m])
        )?;
    }
    Ok(())
}

pub fn write_density(
    w: &mut impl Write,
    cfg: &ScenarioConfig,
    traj: &Trajectory,
) -> io::Result<()> {
    metadata(w, cfg)?;
    writeln!(w, "{DENSITY_HEADER}")?;
    for snap in &traj.snapshots {
        let ds = snap.density.ds();
        for (j, &n) in snap.density.values().iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(snap.time),
                fmt_f64((j as f64 + 0.5) * ds),
                fmt_f64(n)
            )?;
        }
    }
    Ok(())
}

pub fn write_convergence(
    w: &mut impl Write,
    cfg: &ScenarioConfig,
    rows: &[ConvergenceRow],
) -> io::Result<()> {
    metadata(w, cfg)?;
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for r in rows {
        let order = r.observed_order.map(fmt_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(r.ds),
            fmt_f64(r.dt),
            fmt_f64(r.l1_error),
            order
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
