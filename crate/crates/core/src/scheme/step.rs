//! Cut-off, one full step (construction, fractional step, averaging) and
//! the time loop.

use rayon::prelude::*;

use super::cell::{CellFan, CellKind, SideCase};
use super::construct::{construct_cell, max_rh, CellContext};
use super::SchemeParams;
use crate::error::{Error, Result};
use crate::gas::{invariants_of, state_of, GasState, Invariants};
use crate::nozzle::NozzleProfile;

/// Nodal values `u_j` for `j = j0 .. j0 + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub j0: i64,
    pub u: Vec<GasState>,
    pub t: f64,
}

impl StepState {
    pub fn x(&self, k: usize, dx: f64) -> f64 {
        (self.j0 + k as i64) as f64 * dx
    }

    /// Compensated sum of `rho_j dx`.
    pub fn mass(&self, dx: f64) -> f64 {
        let (mut s, mut comp) = (0.0f64, 0.0f64);
        for u in &self.u {
            let y = u.rho * dx;
            let t = s + y;
            comp += if s.abs() >= y.abs() { (s - t) + y } else { (y - t) + s };
            s = t;
        }
        s + comp
    }

    pub fn get(&self, j: i64) -> GasState {
        let k = (j - self.j0).clamp(0, self.u.len() as i64 - 1);
        self.u[k as usize]
    }
}

/// What the cut-off removed from one average.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Clip {
    pub mass: f64,
    pub momentum: f64,
    /// The average fell below `dx^delta` and was set to vacuum.
    pub vacuum: bool,
    /// An invariant bound was enforced.
    pub clipped: bool,
}

/// Apply the cut-off at node `x`: vacuum below `dx^delta`, otherwise clip
/// `z` up to `-M e^{-B(x)}` and `w` down to `M e^{B(x)}`. Averages already
/// inside the bounds are returned unchanged.
pub fn cutoff_state(e: GasState, x: f64, params: &SchemeParams, profile: &NozzleProfile) -> (GasState, Clip) {
    let c = &params.c;
    if e.rho < params.cutoff_threshold() {
        return (
            GasState::VACUUM,
            Clip {
                mass: e.rho,
                momentum: e.m,
                vacuum: true,
                clipped: false,
            },
        );
    }
    let iv = invariants_of(e, c);
    let (lo, hi) = params.bounds_at(x, profile);
    if iv.z >= lo && iv.w <= hi {
        return (e, Clip::default());
    }
    let mut z = iv.z.max(lo);
    let mut w = iv.w.min(hi);
    let vac = |e: GasState| {
        (
            GasState::VACUUM,
            Clip {
                mass: e.rho,
                momentum: e.m,
                vacuum: true,
                clipped: true,
            },
        )
    };
    if w <= z {
        return vac(e);
    }
    let mut u = state_of(Invariants::new(z, w), c);
    // round-trip through (rho, m) can land an ulp outside
    for _ in 0..64 {
        let r = invariants_of(u, c);
        if r.z >= lo && r.w <= hi {
            break;
        }
        if r.z < lo {
            z = z.next_up();
        }
        if r.w > hi {
            w = w.next_down();
        }
        if w <= z {
            return vac(e);
        }
        u = state_of(Invariants::new(z, w), c);
    }
    (
        u,
        Clip {
            mass: e.rho - u.rho,
            momentum: e.m - u.m,
            vacuum: u.is_vacuum(),
            clipped: true,
        },
    )
}

/// How often each construction path was taken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Coverage {
    pub regular: usize,
    /// Near-vacuum cells by case 1..4.
    pub vacuum_case: [usize; 4],
    /// Near-vacuum sides built with a ladder, directly, or damped.
    pub side_ladder: usize,
    pub side_direct: usize,
    pub side_damped: usize,
}

impl Coverage {
    fn record(&mut self, kind: CellKind) {
        match kind {
            CellKind::Regular => self.regular += 1,
            CellKind::Vacuum { case, left, right } => {
                self.vacuum_case[case as usize - 1] += 1;
                for s in [left, right].into_iter().flatten() {
                    match s {
                        SideCase::Ladder => self.side_ladder += 1,
                        SideCase::Direct => self.side_direct += 1,
                        SideCase::Damped => self.side_damped += 1,
                    }
                }
            }
        }
    }

    pub fn add(&mut self, o: &Coverage) {
        self.regular += o.regular;
        for k in 0..4 {
            self.vacuum_case[k] += o.vacuum_case[k];
        }
        self.side_ladder += o.side_ladder;
        self.side_direct += o.side_direct;
        self.side_damped += o.side_damped;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Time at the end of the step.
    pub t: f64,
    pub dt: f64,
    /// Largest `(-M e^{-B} - z)^+` over the pre-average scan.
    pub max_z_violation: f64,
    pub max_w_violation: f64,
    pub z_violation_x: f64,
    pub w_violation_x: f64,
    /// Total mass after the step.
    pub mass: f64,
    /// `|mass change - boundary inflow|` over the step.
    pub mass_defect: f64,
    /// Mass removed by the cut-off this step.
    pub clip_budget: f64,
    pub clipped_cells: usize,
    pub vacuum_cutoffs: usize,
    /// Quadrature nodes where the fractional step forced vacuum.
    pub vacuum_clamps: usize,
    pub coverage: Coverage,
    pub max_rh_residual: f64,
    pub jumps: usize,
    pub min_ladder_rho: f64,
    /// Largest excursion of Riemann-patch samples outside `[L_j, U_j]` in
    /// near-vacuum cells.
    pub patch_violation: f64,
    /// Wave speeds exceeding `dx / (2 dt)`.
    pub cfl_exceed: usize,
}

pub struct StepOutput {
    pub state: StepState,
    pub diag: StepDiagnostics,
    pub clips: Vec<Clip>,
    /// Populated only when requested.
    pub fans: Vec<CellFan>,
}

struct CellOut {
    left: [f64; 2],
    right: [f64; 2],
    clamps: usize,
    zv: (f64, f64),
    wv: (f64, f64),
    rh: f64,
    jumps: usize,
    min_rho: f64,
    patch: f64,
    cfl: usize,
    kind: CellKind,
    fan: Option<CellFan>,
}

/// Points per cell in the pre-average invariant-region scan.
pub const SCAN_POINTS: usize = 32;

fn process_cell(
    j: i64,
    ul: GasState,
    ur: GasState,
    ctx: &CellContext,
    keep: bool,
) -> Result<CellOut> {
    let params = ctx.params;
    let profile = ctx.profile;
    let c = &params.c;
    let fan = construct_cell(ul, ur, j, ctx)?;
    let dx = params.dx;
    let tau = ctx.dt;
    let xl = j as f64 * dx;
    let (lh, cl1) = fan.integrate(-0.5 * dx, 0.0, tau, profile, c);
    let (rh_, cl2) = fan.integrate(0.0, 0.5 * dx, tau, profile, c);
    let mut zv = (0.0, f64::NAN);
    let mut wv = (0.0, f64::NAN);
    for k in 0..=SCAN_POINTS {
        let x = xl + dx * k as f64 / SCAN_POINTS as f64;
        let (u, _) = fan.eval(x, tau, profile, c);
        if u.is_vacuum() {
            continue;
        }
        let iv = invariants_of(u, c);
        let (lo, hi) = params.bounds_at(x, profile);
        if lo - iv.z > zv.0 {
            zv = (lo - iv.z, x);
        }
        if iv.w - hi > wv.0 {
            wv = (iv.w - hi, x);
        }
    }
    let mut patch = 0.0f64;
    if matches!(fan.kind, CellKind::Vacuum { .. }) {
        let (lo, hi) = fan.bounds;
        for (w, rf) in fan.riemann_patches() {
            let a = (fan.xc + w.lo * tau).max(xl);
            let b = (fan.xc + w.hi * tau).min(xl + dx);
            if !(b > a) {
                continue;
            }
            for k in 0..=SCAN_POINTS {
                let x = a + (b - a) * k as f64 / SCAN_POINTS as f64;
                let u = rf.sample((x - fan.xc) / tau);
                if u.is_vacuum() {
                    continue;
                }
                let iv = invariants_of(u, c);
                patch = patch.max(lo - iv.z).max(iv.w - hi);
            }
        }
    }
    let vmax = dx / (2.0 * tau) * (1.0 + 1e-12);
    let mut cfl = fan.rays().iter().filter(|s| s.abs() > vmax).count();
    for (_, rf) in fan.riemann_patches() {
        cfl += rf.breakpoints().iter().filter(|s| s.abs() > vmax).count();
    }
    Ok(CellOut {
        left: lh,
        right: rh_,
        clamps: cl1 + cl2,
        zv,
        wv,
        rh: max_rh(&fan, c),
        jumps: fan.jumps.len(),
        min_rho: fan.min_ladder_rho,
        patch,
        cfl,
        kind: fan.kind,
        fan: keep.then_some(fan),
    })
}

/// One step of length `dt` from `state`. Boundaries are transmissive: the
/// end values are copied into ghost nodes.
pub fn advance_step(
    state: &StepState,
    params: &SchemeParams,
    profile: &NozzleProfile,
    dt: f64,
    step: usize,
    keep_fans: bool,
) -> Result<StepOutput> {
    if state.u.is_empty() {
        return Err(Error::Parameter("empty mesh".into()));
    }
    if !(dt > 0.0 && dt <= params.dt * (1.0 + 1e-12)) {
        return Err(Error::Parameter(format!("step {dt} outside (0, {}]", params.dt)));
    }
    let ctx = CellContext { params, profile, dt, step };
    let n = state.u.len();
    let j0 = state.j0;
    let outs: Vec<Result<CellOut>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let j = j0 - 1 + i as i64;
            process_cell(j, state.get(j), state.get(j + 1), &ctx, keep_fans)
        })
        .collect();
    let mut cells = Vec::with_capacity(n + 1);
    for o in outs {
        cells.push(o?);
    }
    let dx = params.dx;
    let mut diag = StepDiagnostics {
        step,
        t: state.t + dt,
        dt,
        z_violation_x: f64::NAN,
        w_violation_x: f64::NAN,
        min_ladder_rho: f64::INFINITY,
        ..Default::default()
    };
    for cell in &cells {
        if cell.zv.0 > diag.max_z_violation {
            diag.max_z_violation = cell.zv.0;
            diag.z_violation_x = cell.zv.1;
        }
        if cell.wv.0 > diag.max_w_violation {
            diag.max_w_violation = cell.wv.0;
            diag.w_violation_x = cell.wv.1;
        }
        diag.vacuum_clamps += cell.clamps;
        diag.max_rh_residual = diag.max_rh_residual.max(cell.rh);
        diag.jumps += cell.jumps;
        diag.min_ladder_rho = diag.min_ladder_rho.min(cell.min_rho);
        diag.patch_violation = diag.patch_violation.max(cell.patch);
        diag.cfl_exceed += cell.cfl;
        diag.coverage.record(cell.kind);
    }
    let mut u = Vec::with_capacity(n);
    let mut clips = Vec::with_capacity(n);
    for k in 0..n {
        let e = GasState {
            rho: (cells[k].right[0] + cells[k + 1].left[0]) / dx,
            m: (cells[k].right[1] + cells[k + 1].left[1]) / dx,
        };
        let (v, clip) = cutoff_state(e, state.x(k, dx), params, profile);
        diag.clip_budget += clip.mass.abs() * dx;
        diag.clipped_cells += clip.clipped as usize;
        diag.vacuum_cutoffs += clip.vacuum as usize;
        u.push(v);
        clips.push(clip);
    }
    let next = StepState { j0, u, t: state.t + dt };
    let before = state.mass(dx);
    diag.mass = next.mass(dx);
    let inflow = dt * (state.u[0].m - state.u[n - 1].m);
    diag.mass_defect = (diag.mass - before - inflow).abs();
    let fans = if keep_fans { cells.into_iter().filter_map(|c| c.fan).collect() } else { vec![] };
    Ok(StepOutput {
        state: next,
        diag,
        clips,
        fans,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: StepState,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub coverage: Coverage,
    pub final_state: StepState,
    /// Set when a step aborted; everything above is valid up to that step.
    pub failure: Option<Error>,
}

/// March from `init` to `params.t_final`, shortening steps to land exactly
/// on each snapshot time (and on `t_final`, which is always recorded).
pub fn run(params: &SchemeParams, profile: &NozzleProfile, init: StepState, snapshot_times: &[f64]) -> Result<RunOutput> {
    let t_end = params.t_final;
    let mut targets: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t >= init.t && t < t_end).collect();
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::Parameter("non-finite snapshot time".into()));
    }
    targets.push(t_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let mut out = RunOutput {
        snapshots: vec![],
        diagnostics: vec![],
        coverage: Coverage::default(),
        final_state: init.clone(),
        failure: None,
    };
    let mut state = init;
    let mut step = 0usize;
    for target in targets {
        while state.t < target {
            let remaining = target - state.t;
            let dt = if remaining <= params.dt * (1.0 + 1e-12) { remaining } else { params.dt };
            match advance_step(&state, params, profile, dt, step, false) {
                Ok(o) => {
                    out.coverage.add(&o.diag.coverage);
                    out.diagnostics.push(o.diag);
                    state = o.state;
                    if remaining <= params.dt * (1.0 + 1e-12) {
                        state.t = target;
                    }
                }
                Err(e) => {
                    out.final_state = state;
                    out.failure = Some(e);
                    return Ok(out);
                }
            }
            step += 1;
        }
        out.snapshots.push(Snapshot { t: target, state: state.clone() });
    }
    out.final_state = state;
    Ok(out)
}
