//! Runtime monitors: invariant-region scans, the source-sign inequality,
//! entropy admissibility of constructed jumps, weak residuals and
//! refinement studies.

use crate::error::Result;
use crate::gas::{
    char_speeds, entropy_production, flux, invariants_of, Family, GasConstants, GasState,
};
use crate::initial::{initial_state, InitialData};
use crate::nozzle::{AdmissibilityConstants, NozzleProfile};
use crate::riemann::solve as solve_riemann;
use crate::scheme::{
    run, CellFan, JumpKind, Piece, SchemeParams, StepDiagnostics, StepState, SCAN_POINTS,
};

/// Surrogate for the `o(dx)` violation allowance: `10 dx^1.1`.
pub fn violation_tolerance(dx: f64) -> f64 {
    10.0 * dx.powf(1.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ViolationReport {
    pub step: usize,
    /// `max (-M e^{-B(x)} - z)^+`
    pub max_z: f64,
    /// `max (w - M e^{B(x)})^+`
    pub max_w: f64,
    pub z_x: f64,
    pub w_x: f64,
}

impl ViolationReport {
    pub fn max(&self) -> f64 {
        self.max_z.max(self.max_w)
    }
}

impl From<&StepDiagnostics> for ViolationReport {
    fn from(d: &StepDiagnostics) -> Self {
        Self {
            step: d.step,
            max_z: d.max_z_violation,
            max_w: d.max_w_violation,
            z_x: d.z_violation_x,
            w_x: d.w_violation_x,
        }
    }
}

/// Scan the fractional-stepped fields of `fans` at `tau` (usually the full
/// step) on `points + 1` equispaced points per cell.
pub fn invariant_region_scan(
    fans: &[CellFan],
    tau: f64,
    points: usize,
    params: &SchemeParams,
    profile: &NozzleProfile,
    step: usize,
) -> ViolationReport {
    let c = &params.c;
    let dx = params.dx;
    let mut r = ViolationReport {
        step,
        z_x: f64::NAN,
        w_x: f64::NAN,
        ..Default::default()
    };
    for fan in fans {
        let xl = fan.xc - 0.5 * dx;
        for k in 0..=points.max(SCAN_POINTS) {
            let x = xl + dx * k as f64 / points.max(SCAN_POINTS) as f64;
            let (u, _) = fan.eval(x, tau, profile, c);
            if u.is_vacuum() {
                continue;
            }
            let iv = invariants_of(u, c);
            let (lo, hi) = params.bounds_at(x, profile);
            if lo - iv.z > r.max_z {
                r.max_z = lo - iv.z;
                r.z_x = x;
            }
            if iv.w - hi > r.max_w {
                r.max_w = iv.w - hi;
                r.w_x = x;
            }
        }
    }
    r
}

/// Nodes whose values break `z >= -M e^{-B(x_j)}` or `w <= M e^{B(x_j)}`.
pub fn post_average_failures(state: &StepState, params: &SchemeParams, profile: &NozzleProfile) -> Vec<i64> {
    let c = &params.c;
    state
        .u
        .iter()
        .enumerate()
        .filter_map(|(k, &u)| {
            let x = state.x(k, params.dx);
            let iv = invariants_of(u, c);
            let (lo, hi) = params.bounds_at(x, profile);
            (!(iv.z >= lo && iv.w <= hi)).then_some(state.j0 + k as i64)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSignReport {
    pub checked_z: usize,
    pub checked_w: usize,
    pub skipped: usize,
    /// Smallest `g1* = -a v rho^theta + b lambda1 z` among checked states.
    pub min_g1: f64,
    /// Largest `g2* = a v rho^theta - b lambda2 w` among checked states.
    pub max_g2: f64,
}

impl SourceSignReport {
    pub fn passed(&self) -> bool {
        self.min_g1 >= -1e-12 && self.max_g2 <= 1e-12
    }
}

/// Source terms of the invariant equations at `(x, u)`:
/// `(g1*, g2*)` with `z^Delta - z = g1* tau` and `w^Delta - w = g2* tau`.
pub fn source_terms(x: f64, u: GasState, profile: &NozzleProfile, c: &GasConstants) -> (f64, f64) {
    if u.is_vacuum() {
        return (0.0, 0.0);
    }
    let a = profile.a(x);
    let b = profile.b(x);
    let iv = invariants_of(u, c);
    let (l1, l2) = char_speeds(u, c);
    let g = a * u.velocity() * c.sound_speed(u.rho);
    (-g + b * l1 * iv.z, g - b * l2 * iv.w)
}

/// `g1* >= 0` where `sigma w + z <= 0`, and `g2* <= 0` where
/// `sigma z + w >= 0`; states outside both hypotheses are skipped.
pub fn source_sign_check(
    samples: &[(f64, GasState)],
    profile: &NozzleProfile,
    consts: &AdmissibilityConstants,
    c: &GasConstants,
) -> SourceSignReport {
    let s = consts.sigma;
    let mut r = SourceSignReport {
        checked_z: 0,
        checked_w: 0,
        skipped: 0,
        min_g1: f64::INFINITY,
        max_g2: f64::NEG_INFINITY,
    };
    for &(x, u) in samples {
        if u.is_vacuum() {
            r.skipped += 1;
            continue;
        }
        let iv = invariants_of(u, c);
        let (g1, g2) = source_terms(x, u, profile, c);
        let mut any = false;
        if s * iv.w + iv.z <= 0.0 {
            r.checked_z += 1;
            r.min_g1 = r.min_g1.min(g1);
            any = true;
        }
        if s * iv.z + iv.w >= 0.0 {
            r.checked_w += 1;
            r.max_g2 = r.max_g2.max(g2);
            any = true;
        }
        if !any {
            r.skipped += 1;
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub shocks: usize,
    pub min_production: f64,
    pub ladder_jumps: usize,
    /// Largest invariant increment across an expansive jump.
    pub max_ladder_strength: f64,
    pub strength_bound: f64,
}

impl EntropyReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.min_production >= -tol && self.max_ladder_strength <= self.strength_bound + tol
    }
}

/// Compressive jumps (including Riemann-patch shocks) must produce entropy;
/// expansive ones are ladder steps and may not exceed `2 dx^alpha` in the
/// invariant they carry.
pub fn entropy_scan(fans: &[CellFan], params: &SchemeParams) -> EntropyReport {
    let c = &params.c;
    let mut r = EntropyReport {
        shocks: 0,
        min_production: f64::INFINITY,
        ladder_jumps: 0,
        max_ladder_strength: 0.0,
        strength_bound: 2.0 * params.fan_step(),
    };
    let shock = |sigma: f64, l: GasState, rr: GasState, r: &mut EntropyReport| {
        r.shocks += 1;
        r.min_production = r.min_production.min(entropy_production(sigma, l, rr, c));
    };
    for fan in fans {
        for j in &fan.jumps {
            let fam = match j.kind {
                JumpKind::Ladder(f) | JumpKind::Diamond(f) => f,
            };
            let compressive = match fam {
                Family::One => j.right.rho > j.left.rho,
                Family::Two => j.left.rho > j.right.rho,
            };
            if compressive {
                shock(j.speed, j.left, j.right, &mut r);
            } else {
                let (il, ir) = (invariants_of(j.left, c), invariants_of(j.right, c));
                let s = match fam {
                    Family::One => (ir.z - il.z).abs(),
                    Family::Two => (ir.w - il.w).abs(),
                };
                r.ladder_jumps += 1;
                r.max_ladder_strength = r.max_ladder_strength.max(s);
            }
        }
        for (_, f) in fan.riemann_patches() {
            for (s, l, rr) in f.shocks() {
                shock(s, l, rr, &mut r);
            }
        }
    }
    r
}

/// Largest pointwise residual of `u_t + f(u)_x - a (m, m^2/rho)` over the
/// interiors of steady-block wedges, by central differences at `tau`.
pub fn weak_residual(fans: &[CellFan], tau: f64, params: &SchemeParams, profile: &NozzleProfile) -> f64 {
    let c = &params.c;
    let dx = params.dx;
    let h = 1e-4 * dx;
    let k = 1e-4 * tau;
    let mut worst = 0.0f64;
    for fan in fans {
        for w in &fan.wedges {
            if !matches!(w.piece, Piece::Block { .. }) {
                continue;
            }
            let a = (fan.xc + w.lo * tau).max(fan.xc - 0.5 * dx);
            let b = (fan.xc + w.hi * tau).min(fan.xc + 0.5 * dx);
            // stay clear of the rays so the stencil sees one piece
            let margin = 4.0 * (h + k * w.lo.abs().max(w.hi.abs()).min(1e6));
            if b - a <= 4.0 * margin {
                continue;
            }
            for s in 0..8 {
                let x = a + margin + (b - a - 2.0 * margin) * (s as f64 + 0.5) / 8.0;
                let u = |x: f64, t: f64| fan.eval(x, t, profile, c).0;
                let (ut0, ut1) = (u(x, tau - k), u(x, tau + k));
                let (fx0, fx1) = (flux(u(x - h, tau), c), flux(u(x + h, tau), c));
                let u0 = u(x, tau);
                if u0.is_vacuum() {
                    continue;
                }
                let av = profile.a(x);
                let g = [av * u0.m, av * u0.m * u0.m / u0.rho];
                let r0 = (ut1.rho - ut0.rho) / (2.0 * k) + (fx1[0] - fx0[0]) / (2.0 * h) - g[0];
                let r1 = (ut1.m - ut0.m) / (2.0 * k) + (fx1[1] - fx0[1]) / (2.0 * h) - g[1];
                worst = worst.max(r0.abs()).max(r1.abs());
            }
        }
    }
    worst
}

/// One row per mesh level.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub dx: Vec<f64>,
    pub value: Vec<f64>,
}

impl ConvergenceTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.value.windows(2).all(|w| w[1] < w[0])
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.value.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// `sum_j (|rho_j - E rho_j| + |m_j - E m_j|) dx` against the exact fan
/// centred at `x0`, cell-averaged over the node intervals.
pub fn l1_error_vs_fan(state: &StepState, dx: f64, ul: GasState, ur: GasState, x0: f64, c: &GasConstants) -> Result<f64> {
    let fan = solve_riemann(ul, ur, c)?;
    let t = state.t;
    let mut err = 0.0;
    for (k, u) in state.u.iter().enumerate() {
        let x = state.x(k, dx);
        let e = fan.average(x - 0.5 * dx - x0, x + 0.5 * dx - x0, t);
        err += ((u.rho - e.rho).abs() + (u.m - e.m).abs()) * dx;
    }
    Ok(err)
}

/// L¹ error of the scheme without source on the Riemann datum `(ul, ur)`
/// at `x0` over `[x_min, x_max]`, at each `dx`; `M` from the data.
#[allow(clippy::too_many_arguments)]
pub fn homogeneous_study(
    c: GasConstants,
    ul: GasState,
    ur: GasState,
    x0: f64,
    x_min: f64,
    x_max: f64,
    t_final: f64,
    dxs: &[f64],
) -> Result<ConvergenceTable> {
    let profile = NozzleProfile::constant();
    let data = InitialData::Riemann {
        x0,
        left: (ul.rho, ul.velocity()),
        right: (ur.rho, ur.velocity()),
    };
    let mut value = Vec::new();
    for &dx in dxs {
        let m = data.auto_m(x_min, x_max, dx, &profile, &c)?;
        let params = SchemeParams::new(c, dx, m, t_final, &profile)?;
        let (s0, _) = initial_state(&data, x_min, x_max, &params, &profile)?;
        let out = run(&params, &profile, s0, &[])?;
        if let Some(e) = out.failure {
            return Err(e);
        }
        value.push(l1_error_vs_fan(&out.final_state, dx, ul, ur, x0, &c)?);
    }
    Ok(ConvergenceTable { dx: dxs.to_vec(), value })
}

/// Largest pre-average violation over a run, at each `dx`. `profile_at`
/// builds the nozzle for a given mesh size (the default majorant depends
/// on it).
pub fn violation_study(
    c: GasConstants,
    data: &InitialData,
    x_min: f64,
    x_max: f64,
    t_final: f64,
    dxs: &[f64],
    profile_at: impl Fn(f64) -> Result<NozzleProfile>,
) -> Result<ConvergenceTable> {
    let mut value = Vec::new();
    for &dx in dxs {
        let profile = profile_at(dx)?;
        let m = data.auto_m(x_min, x_max, dx, &profile, &c)?;
        let params = SchemeParams::new(c, dx, m, t_final, &profile)?;
        let (s0, _) = initial_state(data, x_min, x_max, &params, &profile)?;
        let out = run(&params, &profile, s0, &[])?;
        if let Some(e) = out.failure {
            return Err(e);
        }
        let v = out
            .diagnostics
            .iter()
            .map(|d| d.max_z_violation.max(d.max_w_violation))
            .fold(0.0, f64::max);
        value.push(v);
    }
    Ok(ConvergenceTable { dx: dxs.to_vec(), value })
}
