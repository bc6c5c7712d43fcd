//! In-cell approximate solution: wedges between rays from the cell centre,
//! each holding a constant, a steady block, a damped near-vacuum block or an
//! exact Riemann patch.

use crate::error::{Error, Result};
use crate::gas::{invariants_of, state_of, Family, GasConstants, GasState, Invariants};
use crate::nozzle::NozzleProfile;
use crate::quadrature::gauss16;
use crate::riemann::WaveFan;

/// Steady block through `(x_d, u_d)`:
/// `z = z_d e^{-(B(x)-B(x_d))}`, `w = w_d e^{B(x)-B(x_d)}`.
/// Returns `u_d` unchanged when `B(x) = B(x_d)`.
pub fn steady_block(x: f64, x_d: f64, u_d: GasState, profile: &NozzleProfile, c: &GasConstants) -> Result<GasState> {
    let db = profile.big_b(x) - profile.big_b(x_d);
    block_from(db, u_d, c).ok_or_else(|| {
        Error::domain(format!("steady block from x_d = {x_d} changes sign of w - z at x = {x}"))
    })
}

pub(crate) fn block_from(db: f64, u_d: GasState, c: &GasConstants) -> Option<GasState> {
    if db == 0.0 || u_d.is_vacuum() {
        return Some(u_d);
    }
    let iv = invariants_of(u_d, c);
    let z = iv.z * (-db).exp();
    let w = iv.w * db.exp();
    if w < z {
        return None;
    }
    Some(state_of(Invariants { z, w }, c))
}

/// Which source correction a piece receives in the fractional step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceForm {
    None,
    Regular,
    /// Near-vacuum block damped from the left node.
    Damped,
    /// Mirror image of `Damped`, damped from the right node.
    DampedMirrored,
}

/// `u^Delta = u + tau * (source terms)` in invariant form. The second value
/// is true when `w^Delta < z^Delta` forced a vacuum clamp.
pub fn fractional_step(
    u: GasState,
    x: f64,
    tau: f64,
    form: SourceForm,
    profile: &NozzleProfile,
    c: &GasConstants,
) -> (GasState, bool) {
    if form == SourceForm::None || u.is_vacuum() {
        return (u, false);
    }
    let a = profile.a(x);
    let b = profile.b(x);
    let iv = invariants_of(u, c);
    let v = u.velocity();
    let s = c.sound_speed(u.rho);
    let (l1, l2) = (v - s, v + s);
    let g = a * v * s;
    let (gz, gw) = match form {
        SourceForm::Regular => (g - b * l1 * iv.z, g - b * l2 * iv.w),
        SourceForm::Damped => (g - b * l1 * iv.z, g + b * l2 * iv.w),
        SourceForm::DampedMirrored => (g + b * l1 * iv.z, g - b * l2 * iv.w),
        SourceForm::None => unreachable!(),
    };
    let z = iv.z - gz * tau;
    let w = iv.w + gw * tau;
    if z == iv.z && w == iv.w {
        return (u, false);
    }
    if w < z {
        return (GasState::VACUUM, true);
    }
    (state_of(Invariants { z, w }, c), false)
}

#[derive(Debug, Clone)]
pub enum Piece {
    Constant(GasState),
    /// Steady block anchored at `anchor`.
    Block { anchor: f64, state: GasState },
    /// Both invariants damped by `e^{-|B(x) - B(anchor)|}`.
    Damped { anchor: f64, state: GasState, mirrored: bool },
    /// Homogeneous Riemann solution centred at the cell centre.
    Riemann(WaveFan),
}

impl Piece {
    fn source_form(&self) -> SourceForm {
        match self {
            Piece::Constant(_) | Piece::Riemann(_) => SourceForm::None,
            Piece::Block { .. } => SourceForm::Regular,
            Piece::Damped { mirrored: false, .. } => SourceForm::Damped,
            Piece::Damped { mirrored: true, .. } => SourceForm::DampedMirrored,
        }
    }

    /// Value before the source correction; `None` if a block degenerates.
    fn value(&self, x: f64, xi: f64, profile: &NozzleProfile, c: &GasConstants) -> Option<GasState> {
        match self {
            Piece::Constant(u) => Some(*u),
            Piece::Block { anchor, state } => block_from(profile.big_b(x) - profile.big_b(*anchor), *state, c),
            Piece::Damped { anchor, state, mirrored } => {
                let db = profile.big_b(x) - profile.big_b(*anchor);
                let f = if *mirrored { db.exp() } else { (-db).exp() };
                if f == 1.0 || state.is_vacuum() {
                    return Some(*state);
                }
                let iv = invariants_of(*state, c);
                Some(state_of(Invariants { z: iv.z * f, w: iv.w * f }, c))
            }
            Piece::Riemann(fan) => Some(fan.sample(xi)),
        }
    }

    pub fn mirrored(&self, xc: f64) -> Piece {
        match self {
            Piece::Constant(u) => Piece::Constant(u.mirrored()),
            Piece::Block { anchor, state } => Piece::Block {
                anchor: 2.0 * xc - anchor,
                state: state.mirrored(),
            },
            Piece::Damped { anchor, state, mirrored } => Piece::Damped {
                anchor: 2.0 * xc - anchor,
                state: state.mirrored(),
                mirrored: !mirrored,
            },
            Piece::Riemann(_) => unreachable!("Riemann patches are built in the physical frame"),
        }
    }
}

/// Piece occupying `lo <= (x - xc)/tau < hi`.
#[derive(Debug, Clone)]
pub struct Wedge {
    pub lo: f64,
    pub hi: f64,
    pub piece: Piece,
}

/// Near-vacuum treatment of one side of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideCase {
    /// Dense side: ladder down to `2 dx^beta`, then a Riemann patch.
    Ladder,
    /// Thin side inside the local region: plain Riemann patch.
    Direct,
    /// Thin side outside the local region: damped block.
    Damped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Regular,
    /// `case` is 1 (rarefaction then shock), 2 (its mirror), 3 (two fans)
    /// or 4 (no fan).
    Vacuum {
        case: u8,
        left: Option<SideCase>,
        right: Option<SideCase>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    /// Rarefaction-shock step of a ladder.
    Ladder(Family),
    /// Jump bounding the central diamond.
    Diamond(Family),
}

/// A constructed discontinuity, with its traces at the mid-time point.
#[derive(Debug, Clone, Copy)]
pub struct JumpRecord {
    pub kind: JumpKind,
    pub speed: f64,
    pub x: f64,
    pub left: GasState,
    pub right: GasState,
}

#[derive(Debug, Clone)]
pub struct CellFan {
    pub j: i64,
    pub xc: f64,
    pub dt: f64,
    pub kind: CellKind,
    /// Ordered left to right, covering all speeds.
    pub wedges: Vec<Wedge>,
    pub jumps: Vec<JumpRecord>,
    /// `(L_j, U_j)` local region for near-vacuum cells.
    pub bounds: (f64, f64),
    /// Smallest density among ladder states (infinite if there are none).
    pub min_ladder_rho: f64,
}

impl CellFan {
    fn wedge_at(&self, xi: f64) -> &Wedge {
        let k = self.wedges.partition_point(|w| w.hi <= xi);
        &self.wedges[k.min(self.wedges.len() - 1)]
    }

    /// Value at `x`, time `tau` after the step start, before the source.
    pub fn value(&self, x: f64, tau: f64, profile: &NozzleProfile, c: &GasConstants) -> GasState {
        let xi = self.xi(x, tau);
        self.wedge_at(xi).piece.value(x, xi, profile, c).unwrap_or(GasState::VACUUM)
    }

    /// Value after the fractional step; second flag marks a vacuum clamp.
    pub fn eval(&self, x: f64, tau: f64, profile: &NozzleProfile, c: &GasConstants) -> (GasState, bool) {
        let xi = self.xi(x, tau);
        let w = self.wedge_at(xi);
        match w.piece.value(x, xi, profile, c) {
            Some(u) => fractional_step(u, x, tau, w.piece.source_form(), profile, c),
            None => (GasState::VACUUM, true),
        }
    }

    fn xi(&self, x: f64, tau: f64) -> f64 {
        let d = x - self.xc;
        if tau > 0.0 {
            d / tau
        } else if d < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    /// Integral of `(rho, m)` after the fractional step over
    /// `[xc + d0, xc + d1]` (inside the cell) at `tau > 0`, and the number of
    /// clamped nodes. Offsets are taken from the centre so that lengths carry
    /// no cancellation from large `|x|`.
    pub fn integrate(&self, d0: f64, d1: f64, tau: f64, profile: &NozzleProfile, c: &GasConstants) -> ([f64; 2], usize) {
        let mut acc = [0.0; 2];
        let mut clamps = 0usize;
        let homogeneous = profile.is_homogeneous();
        for wedge in &self.wedges {
            let da = d0.max(wedge.lo * tau);
            let db = d1.min(wedge.hi * tau);
            if !(db > da) {
                continue;
            }
            match &wedge.piece {
                Piece::Block { state: u, .. } | Piece::Damped { state: u, .. } if homogeneous => {
                    acc[0] += u.rho * (db - da);
                    acc[1] += u.m * (db - da);
                }
                Piece::Constant(u) => {
                    acc[0] += u.rho * (db - da);
                    acc[1] += u.m * (db - da);
                }
                Piece::Riemann(fan) => {
                    let mut cuts: Vec<f64> = fan
                        .breakpoints()
                        .into_iter()
                        .map(|s| s * tau)
                        .filter(|&d| d > da && d < db)
                        .collect();
                    cuts.insert(0, da);
                    cuts.push(db);
                    let fans: Vec<(f64, f64)> = [fan.wave1, fan.wave2]
                        .iter()
                        .filter(|w| w.is_fan())
                        .filter_map(|w| w.span())
                        .collect();
                    for seg in cuts.windows(2) {
                        let mid = 0.5 * (seg[0] + seg[1]) / tau;
                        if fans.iter().all(|&(lo, hi)| mid < lo || mid > hi) {
                            let u = fan.sample(mid);
                            acc[0] += u.rho * (seg[1] - seg[0]);
                            acc[1] += u.m * (seg[1] - seg[0]);
                            continue;
                        }
                        let s = gauss16(seg[0], seg[1], |d| {
                            let u = fan.sample(d / tau);
                            [u.rho, u.m]
                        });
                        acc[0] += s[0];
                        acc[1] += s[1];
                    }
                }
                piece => {
                    let form = piece.source_form();
                    let s = gauss16(da, db, |d| {
                        let x = self.xc + d;
                        let (u, cl) = match piece.value(x, d / tau, profile, c) {
                            Some(u) => fractional_step(u, x, tau, form, profile, c),
                            None => (GasState::VACUUM, true),
                        };
                        [u.rho, u.m, cl as u8 as f64]
                    });
                    acc[0] += s[0];
                    acc[1] += s[1];
                    if s[2] > 0.0 {
                        clamps += 1;
                    }
                }
            }
        }
        (acc, clamps)
    }

    /// Riemann patches of the cell.
    pub fn riemann_patches(&self) -> impl Iterator<Item = (&Wedge, &WaveFan)> {
        self.wedges.iter().filter_map(|w| match &w.piece {
            Piece::Riemann(f) => Some((w, f)),
            _ => None,
        })
    }

    /// All wedge boundaries (ray speeds), left to right.
    pub fn rays(&self) -> Vec<f64> {
        self.wedges.iter().skip(1).map(|w| w.lo).collect()
    }
}
