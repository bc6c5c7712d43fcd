//! Building the in-cell solution from the data `(u_j, u_{j+1})`.
//!
//! 2-waves are built as 1-waves in the mirror frame `x' = 2 x_c - x`,
//! `B'(x') = -B(2 x_c - x')`, `(z, w) -> (-w, -z)`, then mapped back.

use super::cell::{block_from, CellFan, CellKind, JumpKind, JumpRecord, Piece, SideCase, Wedge};
use super::SchemeParams;
use crate::error::{Error, Result};
use crate::gas::{char_speeds, invariants_of, rh_residual, state_of, Family, GasConstants, GasState, Invariants};
use crate::newton::newton;
use crate::nozzle::NozzleProfile;
use crate::riemann::{solve as solve_riemann, Middle, WaveDesc, WaveFan};

/// Everything a cell needs besides its two states.
#[derive(Debug, Clone, Copy)]
pub struct CellContext<'a> {
    pub params: &'a SchemeParams,
    pub profile: &'a NozzleProfile,
    /// Length of the current step.
    pub dt: f64,
    pub step: usize,
}

impl CellContext<'_> {
    fn c(&self) -> &GasConstants {
        &self.params.c
    }

    fn centre(&self, j: i64) -> f64 {
        (j as f64 + 0.5) * self.params.dx
    }
}

#[derive(Clone, Copy)]
struct Frame<'a> {
    profile: &'a NozzleProfile,
    xc: f64,
    mirrored: bool,
}

impl Frame<'_> {
    fn big_b(&self, x: f64) -> f64 {
        if self.mirrored {
            -self.profile.big_b(2.0 * self.xc - x)
        } else {
            self.profile.big_b(x)
        }
    }

    fn block(&self, x: f64, anchor: f64, u: GasState, c: &GasConstants) -> Option<GasState> {
        block_from(self.big_b(x) - self.big_b(anchor), u, c)
    }
}

fn mirror_jump(r: JumpRecord, xc: f64) -> JumpRecord {
    let flip = |f: Family| match f {
        Family::One => Family::Two,
        Family::Two => Family::One,
    };
    JumpRecord {
        kind: match r.kind {
            JumpKind::Ladder(f) => JumpKind::Ladder(flip(f)),
            JumpKind::Diamond(f) => JumpKind::Diamond(flip(f)),
        },
        speed: -r.speed,
        x: 2.0 * xc - r.x,
        left: r.right.mirrored(),
        right: r.left.mirrored(),
    }
}

fn mirror_wedges(w: Vec<Wedge>, xc: f64) -> Vec<Wedge> {
    w.into_iter()
        .rev()
        .map(|w| Wedge {
            lo: -w.hi,
            hi: -w.lo,
            piece: w.piece.mirrored(xc),
        })
        .collect()
}

/// Ladder of `z` values for a centred 1-rarefaction, without source.
#[derive(Debug, Clone, PartialEq)]
pub struct FanLadder {
    pub p: usize,
    /// `z*_1 .. z*_p`.
    pub z: Vec<f64>,
    pub w: f64,
    /// Speed of the jump `z*_i -> z*_{i+1}` at fixed `w`.
    pub speeds: Vec<f64>,
}

/// Split the 1-rarefaction from `ul` to `z = z_m` into steps of `h`.
///
/// `p = max(floor((z_m - z_L)/h) + 1, 2)`; a quotient within `1e-9` of an
/// integer is taken as that integer.
pub fn build_fan_ladder(ul: GasState, z_m: f64, h: f64, c: &GasConstants) -> Result<FanLadder> {
    let il = invariants_of(ul, c);
    let d = z_m - il.z;
    if !(d >= 0.0) || !(h > 0.0) {
        return Err(Error::domain(format!("ladder needs z_m >= z_L and h > 0 (z_L={}, z_m={z_m}, h={h})", il.z)));
    }
    if z_m > il.w {
        return Err(Error::domain("ladder target beyond vacuum"));
    }
    let q = d / h;
    let r = q.round();
    let fl = if (q - r).abs() <= 1e-9 * q.max(1.0) { r } else { q.floor() };
    let p = (fl as usize + 1).max(2);
    let mut z: Vec<f64> = (0..p - 1).map(|i| il.z + i as f64 * h).collect();
    z.push(z_m);
    let w = il.w;
    let speeds = z
        .windows(2)
        .map(|s| {
            let a = state_of(Invariants::new(s[0], w), c);
            let b = state_of(Invariants::new(s[1], w), c);
            let sf = if a.is_vacuum() { 0.0 } else { (b.rho * c.pressure_secant(b.rho, a.rho) / a.rho).sqrt() };
            a.velocity() - sf
        })
        .collect();
    Ok(FanLadder { p, z, w, speeds })
}

/// 1-jump residuals `[sigma - (v_l - S(rho_r, rho_l)), v_r - v_l + G(rho_r, rho_l)]`.
fn one_jump(sigma: f64, ul: GasState, ur: GasState, c: &GasConstants) -> Option<[f64; 2]> {
    if ul.is_vacuum() || ur.is_vacuum() {
        return None;
    }
    let s = (ur.rho * c.pressure_secant(ur.rho, ul.rho) / ul.rho).sqrt();
    let g = c.hugoniot_gap(ur.rho, ul.rho);
    let r = [sigma - (ul.velocity() - s), ur.velocity() - ul.velocity() + g];
    (r[0].is_finite() && r[1].is_finite()).then_some(r)
}

/// 2-jump residuals `[sigma - (v_l + S(rho_r, rho_l)), v_r - v_l - G(rho_r, rho_l)]`.
fn two_jump(sigma: f64, ul: GasState, ur: GasState, c: &GasConstants) -> Option<[f64; 2]> {
    if ul.is_vacuum() || ur.is_vacuum() {
        return None;
    }
    let s = (ur.rho * c.pressure_secant(ur.rho, ul.rho) / ul.rho).sqrt();
    let g = c.hugoniot_gap(ur.rho, ul.rho);
    let r = [sigma - (ul.velocity() + s), ur.velocity() - ul.velocity() - g];
    (r[0].is_finite() && r[1].is_finite()).then_some(r)
}

/// Solve for `(sigma, w)` such that the steady block through `(anchor, left)`
/// and the state `(z_target, w)` are joined by a 1-jump at
/// `x_c + sigma dt/2`. Returns `(sigma, left trace, right state)`.
fn midtime_jump_in(
    frame: Frame,
    ctx: &CellContext,
    anchor: f64,
    left: GasState,
    z_target: f64,
    guess: [f64; 2],
) -> Result<(f64, GasState, GasState)> {
    let c = ctx.c();
    let half = 0.5 * ctx.dt;
    let f = |x: &[f64; 2]| {
        let ul = frame.block(frame.xc + x[0] * half, anchor, left, c)?;
        if !(x[1] > z_target) {
            return None;
        }
        let ur = state_of(Invariants::new(z_target, x[1]), c);
        one_jump(x[0], ul, ur, c)
    };
    let x = newton("ladder jump", guess, ctx.params.newton, f)?;
    let ul = frame
        .block(frame.xc + x[0] * half, anchor, left, c)
        .ok_or_else(|| Error::domain("ladder block degenerate at solution"))?;
    Ok((x[0], ul, state_of(Invariants::new(z_target, x[1]), c)))
}

/// Mid-time 1-jump from a steady block (physical frame).
/// Returns `(sigma, left trace, right state)`.
pub fn solve_midtime_jump(
    ctx: &CellContext,
    xc: f64,
    anchor: f64,
    left: GasState,
    z_target: f64,
    guess: [f64; 2],
) -> Result<(f64, GasState, GasState)> {
    let frame = Frame { profile: ctx.profile, xc, mirrored: false };
    midtime_jump_in(frame, ctx, anchor, left, z_target, guess)
}

struct SideLadder {
    /// `(anchor, state)` of blocks `1..p-1`.
    blocks: Vec<(f64, GasState)>,
    /// Speeds between consecutive blocks.
    speeds: Vec<f64>,
    jumps: Vec<JumpRecord>,
    /// `(sigma_p, x_p, u_p)` when the last step was solved.
    last: Option<(f64, f64, GasState)>,
    homog: FanLadder,
    min_rho: f64,
}

fn ladder_in(
    frame: Frame,
    ctx: &CellContext,
    ul: GasState,
    z_target: f64,
    solve_last: bool,
) -> Result<SideLadder> {
    let c = ctx.c();
    let homog = build_fan_ladder(ul, z_target, ctx.params.fan_step(), c)?;
    let p = homog.p;
    let x_l = frame.xc - 0.5 * ctx.params.dx;
    let mut blocks = vec![(x_l, ul)];
    let mut speeds: Vec<f64> = Vec::new();
    let mut jumps = Vec::new();
    let mut min_rho = ul.rho;
    let mut last = None;
    let n = if solve_last { p - 1 } else { p - 2 };
    for k in 0..n {
        let (anchor, u) = *blocks.last().unwrap();
        let guess = [homog.speeds[k], homog.w];
        let (sigma, tl, ur) = midtime_jump_in(frame, ctx, anchor, u, homog.z[k + 1], guess)?;
        if let Some(&prev) = speeds.last() {
            if !(sigma > prev) {
                return Err(Error::domain(format!("ladder speeds not increasing: {prev} then {sigma}")));
            }
        }
        let x = frame.xc + 0.5 * sigma * ctx.dt;
        jumps.push(JumpRecord {
            kind: JumpKind::Ladder(Family::One),
            speed: sigma,
            x,
            left: tl,
            right: ur,
        });
        min_rho = min_rho.min(ur.rho);
        if k + 2 == p {
            last = Some((sigma, x, ur));
        } else {
            speeds.push(sigma);
            blocks.push((x, ur));
        }
    }
    Ok(SideLadder {
        blocks,
        speeds,
        jumps,
        last,
        homog,
        min_rho,
    })
}

/// Solution of the four-unknown central system.
#[derive(Debug, Clone, Copy)]
pub struct DiamondSolution {
    pub sigma_p: f64,
    pub sigma_s: f64,
    /// State of the central block at `x_c`.
    pub middle: GasState,
    pub jumps: [JumpRecord; 2],
}

/// Find `(sigma_p, sigma_s, z, w)`: a 1-jump from the block `left` into the
/// central block through `(x_c, (z, w))`, and a 2-jump from it into the
/// block `right`, both at mid-time.
pub fn solve_diamond(
    ctx: &CellContext,
    xc: f64,
    left: (f64, GasState),
    right: (f64, GasState),
    guess: [f64; 4],
) -> Result<DiamondSolution> {
    let c = ctx.c();
    let frame = Frame { profile: ctx.profile, xc, mirrored: false };
    let half = 0.5 * ctx.dt;
    let traces = |x: &[f64; 4]| -> Option<[GasState; 4]> {
        if !(x[3] > x[2]) {
            return None;
        }
        let um = state_of(Invariants::new(x[2], x[3]), c);
        let xp = xc + x[0] * half;
        let xs = xc + x[1] * half;
        Some([
            frame.block(xp, left.0, left.1, c)?,
            frame.block(xp, xc, um, c)?,
            frame.block(xs, xc, um, c)?,
            frame.block(xs, right.0, right.1, c)?,
        ])
    };
    let f = |x: &[f64; 4]| {
        let t = traces(x)?;
        let a = one_jump(x[0], t[0], t[1], c)?;
        let b = two_jump(x[1], t[2], t[3], c)?;
        Some([a[0], a[1], b[0], b[1]])
    };
    let x = newton("diamond", guess, ctx.params.newton, f)?;
    let t = traces(&x).ok_or_else(|| Error::domain("diamond traces degenerate at solution"))?;
    let rec = |kind, speed: f64, l, r| JumpRecord {
        kind,
        speed,
        x: xc + speed * half,
        left: l,
        right: r,
    };
    Ok(DiamondSolution {
        sigma_p: x[0],
        sigma_s: x[1],
        middle: state_of(Invariants::new(x[2], x[3]), c),
        jumps: [
            rec(JumpKind::Diamond(Family::One), x[0], t[0], t[1]),
            rec(JumpKind::Diamond(Family::Two), x[1], t[2], t[3]),
        ],
    })
}

fn construction(j: i64, ctx: &CellContext, e: impl std::fmt::Display) -> Error {
    Error::Construction {
        j,
        step: ctx.step,
        reason: e.to_string(),
    }
}

/// Build the in-cell solution for cell `j` from `(ul, ur)`.
pub fn construct_cell(ul: GasState, ur: GasState, j: i64, ctx: &CellContext) -> Result<CellFan> {
    if ul == ur && ctx.profile.is_homogeneous() && !ul.is_vacuum() {
        return Ok(CellFan {
            j,
            xc: ctx.centre(j),
            dt: ctx.dt,
            kind: CellKind::Regular,
            wedges: vec![Wedge {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                piece: Piece::Constant(ul),
            }],
            jumps: vec![],
            bounds: local_bounds(j, ctx),
            min_ladder_rho: f64::INFINITY,
        });
    }
    let fan = solve_riemann(ul, ur, ctx.c()).map_err(|e| construction(j, ctx, e))?;
    let regular = matches!(fan.middle, Middle::State(_)) && fan.rho_middle() > ctx.params.vacuum_threshold();
    if regular {
        construct_cell_regular(&fan, j, ctx)
    } else {
        construct_cell_vacuum(&fan, j, ctx)
    }
}

fn local_bounds(j: i64, ctx: &CellContext) -> (f64, f64) {
    let dx = ctx.params.dx;
    let m = ctx.params.m_amp;
    (
        -m * (-ctx.profile.big_b((j + 1) as f64 * dx)).exp(),
        m * ctx.profile.big_b(j as f64 * dx).exp(),
    )
}

/// Steady-block ladders for rarefactions plus the central diamond.
/// `fan` is the homogeneous solution of the cell's Riemann problem.
pub fn construct_cell_regular(fan: &WaveFan, j: i64, ctx: &CellContext) -> Result<CellFan> {
    let err = |e: Error| construction(j, ctx, e);
    let c = ctx.c();
    let xc = ctx.centre(j);
    let dx = ctx.params.dx;
    let (ul, ur) = (fan.left, fan.right);
    let um = match fan.middle {
        Middle::State(u) => u,
        Middle::Vacuum => return Err(construction(j, ctx, "regular construction with vacuum middle")),
    };
    let im = invariants_of(um, c);
    let mut jumps = Vec::new();
    let mut min_rho = f64::INFINITY;

    let (lblocks, lspeeds, sp_guess) = if matches!(fan.wave1, WaveDesc::Rarefaction { .. }) {
        let frame = Frame { profile: ctx.profile, xc, mirrored: false };
        let lad = ladder_in(frame, ctx, ul, im.z, false).map_err(err)?;
        jumps.extend(lad.jumps.iter().copied());
        min_rho = min_rho.min(lad.min_rho);
        let g = *lad.homog.speeds.last().unwrap();
        (lad.blocks, lad.speeds, g)
    } else {
        let g = match fan.wave1 {
            WaveDesc::Shock { sigma } => sigma,
            _ => char_speeds(um, c).0,
        };
        (vec![(xc - 0.5 * dx, ul)], vec![], g)
    };

    let (rblocks, rspeeds, ss_guess) = if matches!(fan.wave2, WaveDesc::Rarefaction { .. }) {
        let frame = Frame { profile: ctx.profile, xc, mirrored: true };
        let lad = ladder_in(frame, ctx, ur.mirrored(), -im.w, false).map_err(err)?;
        jumps.extend(lad.jumps.iter().map(|r| mirror_jump(*r, xc)));
        min_rho = min_rho.min(lad.min_rho);
        let g = -*lad.homog.speeds.last().unwrap();
        let blocks: Vec<_> = lad.blocks.iter().rev().map(|&(a, u)| (2.0 * xc - a, u.mirrored())).collect();
        let speeds: Vec<_> = lad.speeds.iter().rev().map(|s| -s).collect();
        (blocks, speeds, g)
    } else {
        let g = match fan.wave2 {
            WaveDesc::Shock { sigma } => sigma,
            _ => char_speeds(um, c).1,
        };
        (vec![(xc + 0.5 * dx, ur)], vec![], g)
    };

    let d = solve_diamond(
        ctx,
        xc,
        *lblocks.last().unwrap(),
        rblocks[0],
        [sp_guess, ss_guess, im.z, im.w],
    )
    .map_err(err)?;
    jumps.extend(d.jumps);

    let mut speeds = lspeeds;
    speeds.push(d.sigma_p);
    speeds.push(d.sigma_s);
    speeds.extend(rspeeds);
    if let Some(k) = speeds.windows(2).position(|s| !(s[1] > s[0])) {
        return Err(construction(
            j,
            ctx,
            format!("wave speeds not strictly increasing: {} then {}", speeds[k], speeds[k + 1]),
        ));
    }
    let mut blocks = lblocks;
    blocks.push((xc, d.middle));
    blocks.extend(rblocks);

    let mut wedges = Vec::with_capacity(blocks.len());
    for (k, &(anchor, state)) in blocks.iter().enumerate() {
        let lo = if k == 0 { f64::NEG_INFINITY } else { speeds[k - 1] };
        let hi = speeds.get(k).copied().unwrap_or(f64::INFINITY);
        wedges.push(Wedge {
            lo,
            hi,
            piece: Piece::Block { anchor, state },
        });
    }
    check_blocks(&wedges, xc, ctx).map_err(|e| construction(j, ctx, e))?;
    Ok(CellFan {
        j,
        xc,
        dt: ctx.dt,
        kind: CellKind::Regular,
        wedges,
        jumps,
        bounds: local_bounds(j, ctx),
        min_ladder_rho: min_rho,
    })
}

/// Blocks must keep `w >= z` across the part of the cell they occupy.
fn check_blocks(wedges: &[Wedge], xc: f64, ctx: &CellContext) -> std::result::Result<(), String> {
    let h = 0.5 * ctx.params.dx;
    for w in wedges {
        if let Piece::Block { anchor, state } = w.piece {
            let a = (xc + w.lo * ctx.dt).max(xc - h);
            let b = (xc + w.hi * ctx.dt).min(xc + h);
            for x in [a, b] {
                if block_from(ctx.profile.big_b(x) - ctx.profile.big_b(anchor), state, ctx.c()).is_none() {
                    return Err(format!("steady block anchored at {anchor} loses positivity at x = {x}"));
                }
            }
        }
    }
    Ok(())
}

/// `x` in `[x_l, x_r]` with `B(x) - B(x_l) = target`, by bisection on the
/// nondecreasing `big_b`.
fn crossing(big_b: impl Fn(f64) -> f64, x_l: f64, x_r: f64, target: f64) -> Result<f64> {
    let b0 = big_b(x_l);
    let span = big_b(x_r) - b0;
    if target > span * (1.0 + 1e-12) + 1e-300 {
        return Err(Error::domain(format!(
            "damping crossing outside the cell (need {target:e}, cell offers {span:e})"
        )));
    }
    let (mut lo, mut hi) = (x_l, x_r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if big_b(mid) - b0 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Point where `z_l e^{-(B(x) - B(x_l))}` reaches `lower` (> z_l, both negative).
pub fn damped_crossing(profile: &NozzleProfile, x_l: f64, x_r: f64, z_l: f64, lower: f64) -> Result<f64> {
    if !(z_l < lower && lower < 0.0) {
        return Err(Error::domain("damped crossing needs z_l < lower < 0"));
    }
    crossing(|x| profile.big_b(x), x_l, x_r, (z_l / lower).ln())
}

struct VacuumSide {
    wedges: Vec<Wedge>,
    star: GasState,
    lambda: f64,
    case: SideCase,
    jumps: Vec<JumpRecord>,
    min_rho: f64,
}

/// Left side of a near-vacuum cell in `frame`; `lower` is the local lower
/// bound for `z` in that frame.
fn vacuum_side(frame: Frame, ctx: &CellContext, ul: GasState, lower: f64) -> Result<VacuumSide> {
    let c = ctx.c();
    let th = c.theta();
    let il = invariants_of(ul, c);
    let thr = 2.0 * ctx.params.vacuum_threshold();
    let x_l = frame.xc - 0.5 * ctx.params.dx;
    if ul.rho > thr {
        let z1 = il.w - 2.0 * c.sound_speed(thr) / th;
        let lad = ladder_in(frame, ctx, ul, z1, true)?;
        let (sp, xp, up) = lad.last.expect("ladder with solved last step");
        let mut wedges = Vec::new();
        let mut bounds = vec![f64::NEG_INFINITY];
        bounds.extend(lad.speeds.iter().copied());
        bounds.push(sp);
        for (k, &(anchor, state)) in lad.blocks.iter().enumerate() {
            wedges.push(Wedge {
                lo: bounds[k],
                hi: bounds[k + 1],
                piece: Piece::Block { anchor, state },
            });
        }
        let l2 = char_speeds(up, c).0;
        if l2 > sp {
            wedges.push(Wedge {
                lo: sp,
                hi: l2,
                piece: Piece::Block { anchor: xp, state: up },
            });
        }
        let z2 = invariants_of(up, c).z;
        let star = state_of(Invariants::new(z2.max(lower), il.w), c);
        return Ok(VacuumSide {
            wedges,
            star,
            lambda: l2.max(sp),
            case: SideCase::Ladder,
            jumps: lad.jumps,
            min_rho: lad.min_rho,
        });
    }
    if il.z >= lower || ul.is_vacuum() {
        return Ok(VacuumSide {
            wedges: vec![],
            star: ul,
            lambda: f64::NEG_INFINITY,
            case: SideCase::Direct,
            jumps: vec![],
            min_rho: f64::INFINITY,
        });
    }
    let x4 = crossing(|x| frame.big_b(x), x_l, x_l + ctx.params.dx, (il.z / lower).ln())?;
    let f = (-(frame.big_b(x4) - frame.big_b(x_l))).exp();
    let star = state_of(Invariants::new(lower, (il.w * f).max(lower)), c);
    let lambda = char_speeds(star, c).0;
    Ok(VacuumSide {
        wedges: vec![Wedge {
            lo: f64::NEG_INFINITY,
            hi: lambda,
            piece: Piece::Damped {
                anchor: x_l,
                state: ul,
                mirrored: frame.mirrored,
            },
        }],
        star,
        lambda,
        case: SideCase::Damped,
        jumps: vec![],
        min_rho: f64::INFINITY,
    })
}

/// Near-vacuum construction: ladders down to `2 dx^beta`, damped blocks or
/// plain Riemann patches on each side, and a source-free Riemann patch in
/// between.
pub fn construct_cell_vacuum(fan: &WaveFan, j: i64, ctx: &CellContext) -> Result<CellFan> {
    let err = |e: Error| construction(j, ctx, e);
    let xc = ctx.centre(j);
    let bounds = local_bounds(j, ctx);
    let (fan1, fan2) = (fan.wave1.is_fan(), fan.wave2.is_fan());
    let case = match (fan1, fan2) {
        (true, false) => 1,
        (false, true) => 2,
        (true, true) => 3,
        (false, false) => 4,
    };
    let base = CellFan {
        j,
        xc,
        dt: ctx.dt,
        kind: CellKind::Vacuum { case, left: None, right: None },
        wedges: vec![],
        jumps: vec![],
        bounds,
        min_ladder_rho: f64::INFINITY,
    };
    if case == 4 {
        return Ok(CellFan {
            wedges: vec![Wedge {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                piece: Piece::Riemann(fan.clone()),
            }],
            ..base
        });
    }
    let left = if fan1 {
        let frame = Frame { profile: ctx.profile, xc, mirrored: false };
        Some(vacuum_side(frame, ctx, fan.left, bounds.0).map_err(err)?)
    } else {
        None
    };
    let right = if fan2 {
        let frame = Frame { profile: ctx.profile, xc, mirrored: true };
        let s = vacuum_side(frame, ctx, fan.right.mirrored(), -bounds.1).map_err(err)?;
        Some(VacuumSide {
            wedges: mirror_wedges(s.wedges, xc),
            star: s.star.mirrored(),
            lambda: -s.lambda,
            case: s.case,
            jumps: s.jumps.into_iter().map(|r| mirror_jump(r, xc)).collect(),
            min_rho: s.min_rho,
        })
    } else {
        None
    };
    let (star_l, lam_l) = left.as_ref().map_or((fan.left, f64::NEG_INFINITY), |s| (s.star, s.lambda));
    let (star_r, lam_r) = right.as_ref().map_or((fan.right, f64::INFINITY), |s| (s.star, s.lambda));
    if lam_l > lam_r {
        return Err(construction(
            j,
            ctx,
            format!("near-vacuum sides overlap: left edge {lam_l} beyond right edge {lam_r}"),
        ));
    }
    let mid = solve_riemann(star_l, star_r, ctx.c()).map_err(err)?;
    let mut wedges = Vec::new();
    let mut jumps = Vec::new();
    let mut min_rho = f64::INFINITY;
    let lcase = left.as_ref().map(|s| s.case);
    let rcase = right.as_ref().map(|s| s.case);
    if let Some(s) = left {
        wedges.extend(s.wedges);
        jumps.extend(s.jumps);
        min_rho = min_rho.min(s.min_rho);
    }
    wedges.push(Wedge {
        lo: lam_l,
        hi: lam_r,
        piece: Piece::Riemann(mid),
    });
    if let Some(s) = right {
        wedges.extend(s.wedges);
        jumps.extend(s.jumps);
        min_rho = min_rho.min(s.min_rho);
    }
    check_blocks(&wedges, xc, ctx).map_err(|e| construction(j, ctx, e))?;
    Ok(CellFan {
        kind: CellKind::Vacuum {
            case,
            left: lcase,
            right: rcase,
        },
        wedges,
        jumps,
        min_ladder_rho: min_rho,
        ..base
    })
}

/// Largest `|RH residual|` over a cell's constructed jumps.
pub(crate) fn max_rh(fan: &CellFan, c: &GasConstants) -> f64 {
    fan.jumps
        .iter()
        .map(|r| {
            let e = rh_residual(r.speed, r.left, r.right, c);
            e[0].abs().max(e[1].abs())
        })
        .fold(0.0, f64::max)
}
