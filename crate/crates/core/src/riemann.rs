//! Exact self-similar solution of the homogeneous isentropic Riemann
//! problem, vacuum included.
//!
//! The middle state is the intersection of the forward 1-wave curve of the
//! left state with the backward 2-wave curve of the right state. Both curves
//! are monotone in density, so the intersection is found by a bracketed
//! Newton/bisection solve in `rho_M`.

use crate::error::{Error, Result};
use crate::gas::{char_speeds, invariants_of, shock_speed_factor, state_of, GasConstants, GasState, Invariants};

pub mod oracle;

/// Location of the right state relative to the wave curves through the
/// left state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// 1-rarefaction and 2-rarefaction (also the no-wave case).
    I,
    /// 1-shock and 2-rarefaction.
    II,
    /// 1-shock and 2-shock.
    III,
    /// 1-rarefaction and 2-shock.
    IV,
    /// A vacuum appears between the two waves (or is one of the data).
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveDesc {
    None,
    Shock { sigma: f64 },
    /// `head` is the edge adjacent to the outer state, `tail` the edge
    /// adjacent to the middle state.
    Rarefaction { head: f64, tail: f64 },
    /// Rarefaction running into vacuum; `tail` is the vacuum front speed.
    VacuumFan { head: f64, tail: f64 },
}

impl WaveDesc {
    pub fn is_fan(&self) -> bool {
        matches!(self, WaveDesc::Rarefaction { .. } | WaveDesc::VacuumFan { .. })
    }

    /// Slowest and fastest speed occupied by the wave.
    pub fn span(&self) -> Option<(f64, f64)> {
        match *self {
            WaveDesc::None => None,
            WaveDesc::Shock { sigma } => Some((sigma, sigma)),
            WaveDesc::Rarefaction { head, tail } | WaveDesc::VacuumFan { head, tail } => {
                Some((head.min(tail), head.max(tail)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Middle {
    State(GasState),
    Vacuum,
}

impl Middle {
    pub fn state(&self) -> GasState {
        match *self {
            Middle::State(u) => u,
            Middle::Vacuum => GasState::VACUUM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFan {
    pub left: GasState,
    pub middle: Middle,
    pub right: GasState,
    pub wave1: WaveDesc,
    pub wave2: WaveDesc,
    c: GasConstants,
}

const MAX_ITER: usize = 200;

/// Both data within this of each other in density and velocity: no waves.
const DEGENERATE: f64 = 1e-12;

fn v_one(rho: f64, ul: GasState, il: Invariants, c: &GasConstants) -> (f64, f64) {
    if rho <= ul.rho {
        let s = c.sound_speed(rho);
        (il.w - s / c.theta(), -if rho > 0.0 { s / rho } else { f64::INFINITY })
    } else {
        (
            ul.velocity() - c.hugoniot_gap(rho, ul.rho),
            -c.hugoniot_gap_slope(rho, ul.rho),
        )
    }
}

fn v_two(rho: f64, ur: GasState, ir: Invariants, c: &GasConstants) -> (f64, f64) {
    if rho <= ur.rho {
        let s = c.sound_speed(rho);
        (ir.z + s / c.theta(), if rho > 0.0 { s / rho } else { f64::INFINITY })
    } else {
        (
            ur.velocity() + c.hugoniot_gap(rho, ur.rho),
            c.hugoniot_gap_slope(rho, ur.rho),
        )
    }
}

/// Middle density from the bracketed solve, or `None` if the two curves
/// only meet at vacuum.
fn middle_density(ul: GasState, ur: GasState, c: &GasConstants) -> Result<Option<f64>> {
    let il = invariants_of(ul, c);
    let ir = invariants_of(ur, c);
    if il.w <= ir.z {
        return Ok(None);
    }
    let f = |rho: f64| {
        let (a, da) = v_one(rho, ul, il, c);
        let (b, db) = v_two(rho, ur, ir, c);
        (a - b, da - db)
    };
    let dv = (ul.velocity() - ur.velocity()).abs();
    let mut lo = 0.0;
    let mut hi = ul.rho.max(ur.rho) * (1.0 + dv).powf(1.0 / c.theta()) + 1.0;
    let mut grow = 0;
    while f(hi).0 >= 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > MAX_ITER {
            return Err(Error::RiemannNonConvergence { lo, hi });
        }
    }
    // Two-rarefaction estimate, exact in region I.
    let guess = crate::gas::rho_pow(0.5 * c.theta() * (il.w - ir.z), 1.0 / c.theta());
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(Some(x));
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 1e-15 + 4.0 * f64::EPSILON * hi {
            return Ok(Some(0.5 * (lo + hi)));
        }
        let newton = x - fx / dfx;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (newton - x).abs() == 0.0 && (fx / dfx).abs() <= 1e-16 * x.max(1e-300) {
            return Ok(Some(x));
        }
    }
    Err(Error::RiemannNonConvergence { lo, hi })
}

/// Locate `(z_R, w_R)` relative to the wave curves through `(z_L, w_L)`.
pub fn classify(ul: GasState, ur: GasState, c: &GasConstants) -> Result<Region> {
    Ok(solve(ul, ur, c)?.region())
}

/// Exact Riemann solution with data `ul | ur` at the origin.
pub fn solve(ul: GasState, ur: GasState, c: &GasConstants) -> Result<WaveFan> {
    let c = *c;
    let none = |m: Middle| WaveFan {
        left: ul,
        middle: m,
        right: ur,
        wave1: WaveDesc::None,
        wave2: WaveDesc::None,
        c,
    };
    if ul.is_vacuum() && ur.is_vacuum() {
        return Ok(none(Middle::Vacuum));
    }
    if (ul.rho - ur.rho).abs() < DEGENERATE && (ul.velocity() - ur.velocity()).abs() < DEGENERATE {
        return Ok(none(Middle::State(ul)));
    }
    let il = invariants_of(ul, &c);
    let ir = invariants_of(ur, &c);
    if ul.is_vacuum() {
        let mut fan = none(Middle::Vacuum);
        fan.wave2 = WaveDesc::VacuumFan {
            head: char_speeds(ur, &c).1,
            tail: ir.z,
        };
        return Ok(fan);
    }
    if ur.is_vacuum() {
        let mut fan = none(Middle::Vacuum);
        fan.wave1 = WaveDesc::VacuumFan {
            head: char_speeds(ul, &c).0,
            tail: il.w,
        };
        return Ok(fan);
    }
    let rho_m = match middle_density(ul, ur, &c)? {
        Some(r) if r >= crate::gas::VACUUM_RHO => r,
        _ => {
            let mut fan = none(Middle::Vacuum);
            fan.wave1 = WaveDesc::VacuumFan {
                head: char_speeds(ul, &c).0,
                tail: il.w,
            };
            fan.wave2 = WaveDesc::VacuumFan {
                head: char_speeds(ur, &c).1,
                tail: ir.z,
            };
            return Ok(fan);
        }
    };
    let (v1, _) = v_one(rho_m, ul, il, &c);
    let (v2, _) = v_two(rho_m, ur, ir, &c);
    let um = GasState::from_velocity(rho_m, 0.5 * (v1 + v2));
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-13 * a.max(b);
    let wave1 = if same(rho_m, ul.rho) {
        WaveDesc::None
    } else if rho_m > ul.rho {
        WaveDesc::Shock {
            sigma: ul.velocity() - shock_speed_factor(rho_m, ul.rho, &c)?,
        }
    } else {
        WaveDesc::Rarefaction {
            head: char_speeds(ul, &c).0,
            tail: char_speeds(um, &c).0,
        }
    };
    let wave2 = if same(rho_m, ur.rho) {
        WaveDesc::None
    } else if rho_m > ur.rho {
        WaveDesc::Shock {
            sigma: um.velocity() + shock_speed_factor(ur.rho, rho_m, &c)?,
        }
    } else {
        WaveDesc::Rarefaction {
            head: char_speeds(ur, &c).1,
            tail: char_speeds(um, &c).1,
        }
    };
    Ok(WaveFan {
        left: ul,
        middle: Middle::State(um),
        right: ur,
        wave1,
        wave2,
        c,
    })
}

impl WaveFan {
    pub fn constants(&self) -> &GasConstants {
        &self.c
    }

    pub fn region(&self) -> Region {
        use WaveDesc::*;
        if matches!(self.middle, Middle::Vacuum) {
            return Region::Vacuum;
        }
        match (self.wave1, self.wave2) {
            (Shock { .. }, Shock { .. }) => Region::III,
            (Shock { .. }, _) => Region::II,
            (_, Shock { .. }) => Region::IV,
            _ => Region::I,
        }
    }

    /// Middle density; zero for a vacuum middle.
    pub fn rho_middle(&self) -> f64 {
        self.middle.state().rho
    }

    /// Sorted list of speeds where the solution is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4);
        for w in [self.wave1, self.wave2] {
            if let Some((a, b)) = w.span() {
                out.push(a);
                if b != a {
                    out.push(b);
                }
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    /// Slowest and fastest signal speed.
    pub fn speed_range(&self) -> Option<(f64, f64)> {
        let bp = self.breakpoints();
        Some((*bp.first()?, *bp.last()?))
    }

    /// Solution on the ray `x / t = xi`.
    pub fn sample(&self, xi: f64) -> GasState {
        let c = &self.c;
        let th = c.theta();
        let (lo1, hi1) = self.wave1.span().unwrap_or((f64::NEG_INFINITY, f64::NEG_INFINITY));
        if xi < lo1 {
            return self.left;
        }
        if self.wave1.is_fan() && xi <= hi1 {
            let w = invariants_of(self.left, c).w;
            let z = (2.0 * xi - (1.0 - th) * w) / (1.0 + th);
            return if z >= w { GasState::VACUUM } else { state_of(Invariants { z, w }, c) };
        }
        let (lo2, hi2) = self.wave2.span().unwrap_or((f64::INFINITY, f64::INFINITY));
        if xi < lo2 {
            return match self.wave1 {
                WaveDesc::None if !matches!(self.middle, Middle::Vacuum) => self.left,
                _ => self.middle.state(),
            };
        }
        if self.wave2.is_fan() && xi <= hi2 {
            let z = invariants_of(self.right, c).z;
            let w = (2.0 * xi - (1.0 - th) * z) / (1.0 + th);
            return if w <= z { GasState::VACUUM } else { state_of(Invariants { z, w }, c) };
        }
        self.right
    }

    /// Shock discontinuities as `(speed, left state, right state)`.
    pub fn shocks(&self) -> Vec<(f64, GasState, GasState)> {
        let mut out = Vec::new();
        let um = self.middle.state();
        if let WaveDesc::Shock { sigma } = self.wave1 {
            out.push((sigma, self.left, um));
        }
        if let WaveDesc::Shock { sigma } = self.wave2 {
            out.push((sigma, um, self.right));
        }
        out
    }

    /// Exact x-average of `(rho, m)` over `[x0, x1]` at time `t > 0`, the
    /// fan being centred at `x = 0`. Smooth pieces use 16-point Gauss.
    pub fn average(&self, x0: f64, x1: f64, t: f64) -> GasState {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .map(|s| s * t)
            .filter(|&x| x > x0 && x < x1)
            .collect();
        cuts.insert(0, x0);
        cuts.push(x1);
        let mut acc = [0.0; 2];
        for seg in cuts.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            let s = crate::quadrature::gauss16(a, b, |x| {
                let u = self.sample(x / t);
                [u.rho, u.m]
            });
            acc[0] += s[0];
            acc[1] += s[1];
        }
        let len = x1 - x0;
        GasState {
            rho: acc[0] / len,
            m: acc[1] / len,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c53() -> GasConstants {
        GasConstants::new(5.0 / 3.0).unwrap()
    }

    #[test]
    fn equal_states_give_no_waves() {
        let u = GasState::from_velocity(1.0, 0.0);
        let fan = solve(u, u, &c53()).unwrap();
        assert_eq!(fan.middle, Middle::State(u));
        assert_eq!(fan.region(), Region::I);
        assert_eq!(fan.sample(-3.0), u);
        assert_eq!(fan.sample(3.0), u);
    }

    #[test]
    fn symmetric_expansion_vacuum_threshold() {
        let c = c53();
        for &vh in &[3.0, 3.5, 10.0] {
            let fan = solve(
                GasState::from_velocity(1.0, -vh),
                GasState::from_velocity(1.0, vh),
                &c,
            )
            .unwrap();
            assert_eq!(fan.region(), Region::Vacuum, "vh = {vh}");
        }
        let fan = solve(
            GasState::from_velocity(1.0, -2.9),
            GasState::from_velocity(1.0, 2.9),
            &c,
        )
        .unwrap();
        assert_eq!(fan.region(), Region::I);
    }

    #[test]
    fn symmetric_compression_is_two_shocks() {
        let c = c53();
        let fan = solve(
            GasState::from_velocity(1.0, 1.0),
            GasState::from_velocity(1.0, -1.0),
            &c,
        )
        .unwrap();
        assert_eq!(fan.region(), Region::III);
        assert!(fan.middle.state().velocity().abs() < 1e-12);
    }

    #[test]
    fn symmetric_double_rarefaction_closed_form() {
        let c = c53();
        let fan = solve(
            GasState::from_velocity(1.0, -0.5),
            GasState::from_velocity(1.0, 0.5),
            &c,
        )
        .unwrap();
        let um = fan.middle.state();
        // w_M = w_L with v_M = 0: rho_M^theta = 1 - theta/2
        let expected = (1.0f64 - 1.0 / 6.0).powi(3);
        assert!((um.rho - expected).abs() < 1e-13, "{} vs {}", um.rho, expected);
        assert!(um.velocity().abs() < 1e-13);
        assert!((expected - 0.5787).abs() < 1e-4);
    }

    #[test]
    fn outer_rays_return_data() {
        let c = c53();
        let ul = GasState::from_velocity(2.0, 0.3);
        let ur = GasState::from_velocity(0.5, -0.4);
        let fan = solve(ul, ur, &c).unwrap();
        let (lo, hi) = fan.speed_range().unwrap();
        assert_eq!(fan.sample(lo - 1.0), ul);
        assert_eq!(fan.sample(hi + 1.0), ur);
    }

    #[test]
    fn rarefaction_interior_is_characteristic() {
        let c = c53();
        let fan = solve(
            GasState::from_velocity(1.0, -0.5),
            GasState::from_velocity(0.8, 0.6),
            &c,
        )
        .unwrap();
        let WaveDesc::Rarefaction { head, tail } = fan.wave1 else {
            panic!("expected 1-rarefaction, got {:?}", fan.wave1)
        };
        for k in 1..10 {
            let xi = head + (tail - head) * k as f64 / 10.0;
            let (l1, _) = char_speeds(fan.sample(xi), &c);
            assert!((l1 - xi).abs() < 1e-10);
        }
    }

    #[test]
    fn one_sided_vacuum_data() {
        let c = c53();
        let u = GasState::from_velocity(1.0, 0.2);
        let fan = solve(GasState::VACUUM, u, &c).unwrap();
        assert_eq!(fan.region(), Region::Vacuum);
        let z = invariants_of(u, &c).z;
        assert_eq!(fan.sample(z - 1e-9), GasState::VACUUM);
        assert_eq!(fan.sample(10.0), u);
        let fan = solve(u, GasState::VACUUM, &c).unwrap();
        let w = invariants_of(u, &c).w;
        assert_eq!(fan.sample(w + 1e-9), GasState::VACUUM);
        assert_eq!(fan.sample(-10.0), u);
    }
}
