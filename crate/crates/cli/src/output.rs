//! CSV emission. Numbers use Rust's shortest round-trip formatting, so
//! reading a file back gives the in-memory values exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use nozzleflow_core::gas::invariants_of;
use nozzleflow_core::riemann::WaveFan;
use nozzleflow_core::scheme::{SchemeParams, StepDiagnostics, StepState};
use nozzleflow_core::NozzleProfile;

pub const SNAPSHOT_HEADER: &str = "x,rho,m,v,z,w,A,zbound,wbound";

pub const DIAGNOSTICS_HEADER: &str = "step,max_z_violation,max_w_violation,mass_defect,clip_budget,t,dt,\
clipped_cells,vacuum_cutoffs,vacuum_clamps,regular,vacuum_case1,vacuum_case2,vacuum_case3,vacuum_case4,\
side_ladder,side_direct,side_damped,max_rh_residual,patch_violation,jumps";

/// `snap_<t>.csv`, with `t` in shortest round-trip form.
pub fn snapshot_name(t: f64) -> String {
    format!("snap_{t}.csv")
}

pub fn write_snapshot(
    w: &mut impl Write,
    state: &StepState,
    params: &SchemeParams,
    profile: &NozzleProfile,
) -> io::Result<()> {
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for (k, u) in state.u.iter().enumerate() {
        let x = state.x(k, params.dx);
        let iv = invariants_of(*u, &params.c);
        let (lo, hi) = params.bounds_at(x, profile);
        writeln!(
            w,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            x,
            u.rho,
            u.m,
            u.velocity(),
            iv.z,
            iv.w,
            profile.area(x),
            lo,
            hi
        )?;
    }
    Ok(())
}

pub fn write_diagnostics(w: &mut impl Write, diags: &[StepDiagnostics]) -> io::Result<()> {
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for d in diags {
        let c = &d.coverage;
        writeln!(
            w,
            "{},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{},{},{},{},{},{},{},{},{},{:?},{:?},{}",
            d.step,
            d.max_z_violation,
            d.max_w_violation,
            d.mass_defect,
            d.clip_budget,
            d.t,
            d.dt,
            d.clipped_cells,
            d.vacuum_cutoffs,
            d.vacuum_clamps,
            c.regular,
            c.vacuum_case[0],
            c.vacuum_case[1],
            c.vacuum_case[2],
            c.vacuum_case[3],
            c.side_ladder,
            c.side_direct,
            c.side_damped,
            d.max_rh_residual,
            d.patch_violation,
            d.jumps
        )?;
    }
    Ok(())
}

/// Exact fan at `samples` equally spaced rays.
pub fn write_fan(w: &mut impl Write, fan: &WaveFan, samples: usize) -> io::Result<()> {
    let (lo, hi) = fan.speed_range().unwrap_or((-1.0, 1.0));
    let pad = 0.25 * (hi - lo) + 0.5;
    let (a, b) = (lo - pad, hi + pad);
    let c = fan.constants();
    writeln!(w, "xi,rho,m,v,z,w")?;
    for k in 0..samples {
        let xi = if samples == 1 { 0.5 * (a + b) } else { a + (b - a) * k as f64 / (samples - 1) as f64 };
        let u = fan.sample(xi);
        let iv = invariants_of(u, c);
        writeln!(w, "{:?},{:?},{:?},{:?},{:?},{:?}", xi, u.rho, u.m, u.velocity(), iv.z, iv.w)?;
    }
    Ok(())
}

pub fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Rows of a CSV written by this module, header skipped.
pub fn read_rows(text: &str) -> Result<Vec<Vec<f64>>, String> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, l)| {
            l.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| format!("row {}: {s:?}: {e}", n + 1)))
                .collect()
        })
        .collect()
}
