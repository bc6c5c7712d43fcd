//! Isentropic gas: equation of state, Riemann invariants, characteristic
//! speeds, the mechanical entropy pair and the elementary wave curves.
//!
//! Pressure is `p(rho) = rho^gamma / gamma`, so `sqrt(p'(rho)) = rho^theta`
//! with `theta = (gamma - 1) / 2`.

use crate::error::{Error, Result};

/// Densities below this are treated as exact vacuum.
pub const VACUUM_RHO: f64 = 1e-300;

/// `rho^e` computed as `exp(e ln rho)`, with vacuum mapped to zero.
#[inline]
pub fn rho_pow(rho: f64, e: f64) -> f64 {
    if rho < VACUUM_RHO {
        0.0
    } else {
        (e * rho.ln()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasConstants {
    gamma: f64,
    theta: f64,
}

impl GasConstants {
    /// Adiabatic exponent must lie in `(1, 5/3]`.
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma <= 5.0 / 3.0 + 1e-15) {
            return Err(Error::domain(format!("gamma = {gamma} outside (1, 5/3]")));
        }
        Ok(Self {
            gamma,
            theta: (gamma - 1.0) / 2.0,
        })
    }

    /// Constructor without the physical range check. Only meant for
    /// algebraic unit tests (e.g. `gamma = 2`).
    pub fn unchecked(gamma: f64) -> Self {
        Self {
            gamma,
            theta: (gamma - 1.0) / 2.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn pressure(&self, rho: f64) -> f64 {
        rho_pow(rho, self.gamma) / self.gamma
    }

    /// `p'(rho) = rho^(gamma-1)`.
    #[inline]
    pub fn pressure_slope(&self, rho: f64) -> f64 {
        rho_pow(rho, self.gamma - 1.0)
    }

    /// `rho^theta`, the sound speed.
    #[inline]
    pub fn sound_speed(&self, rho: f64) -> f64 {
        rho_pow(rho, self.theta)
    }

    /// Secant slope `(p(rho) - p(rho0)) / (rho - rho0)`, continuous across
    /// `rho = rho0` (central Taylor expansion when the two are close).
    pub fn pressure_secant(&self, rho: f64, rho0: f64) -> f64 {
        let d = rho - rho0;
        let scale = rho.abs().max(rho0.abs());
        if d.abs() <= 1e-3 * scale {
            let mid = 0.5 * (rho + rho0);
            let g = self.gamma;
            // p'(mid) + p'''(mid) d^2 / 24
            let p1 = rho_pow(mid, g - 1.0);
            let p3 = (g - 1.0) * (g - 2.0) * rho_pow(mid, g - 3.0);
            p1 + p3 * d * d / 24.0
        } else {
            (self.pressure(rho) - self.pressure(rho0)) / d
        }
    }

    /// `G(rho, rho0) = (rho - rho0) sqrt(secant / (rho rho0))`.
    ///
    /// States on the 1-Hugoniot locus through `u0` satisfy
    /// `v = v0 - G(rho, rho0)`; on the 2-locus `v = v0 + G(rho, rho0)`.
    /// Antisymmetric in its arguments. Requires both densities positive.
    pub fn hugoniot_gap(&self, rho: f64, rho0: f64) -> f64 {
        (rho - rho0) * (self.pressure_secant(rho, rho0) / (rho * rho0)).sqrt()
    }

    /// `dG/drho` at fixed `rho0`.
    pub fn hugoniot_gap_slope(&self, rho: f64, rho0: f64) -> f64 {
        let psi = self.pressure_secant(rho, rho0);
        let s = (psi / (rho * rho0)).sqrt();
        let d = rho - rho0;
        s + (self.pressure_slope(rho) - psi - d * psi / rho) / (2.0 * s * rho * rho0)
    }
}

/// Conservative state `(rho, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GasState {
    pub rho: f64,
    pub m: f64,
}

impl GasState {
    pub const VACUUM: GasState = GasState { rho: 0.0, m: 0.0 };

    pub fn new(rho: f64, m: f64) -> Result<Self> {
        if !(rho >= 0.0) || !m.is_finite() || !rho.is_finite() {
            return Err(Error::domain(format!("invalid state rho={rho}, m={m}")));
        }
        if rho == 0.0 && m != 0.0 {
            return Err(Error::domain("vacuum state with nonzero momentum"));
        }
        Ok(Self { rho, m })
    }

    pub fn from_velocity(rho: f64, v: f64) -> Self {
        Self { rho, m: rho * v }
    }

    #[inline]
    pub fn is_vacuum(&self) -> bool {
        self.rho < VACUUM_RHO
    }

    /// Velocity, zero at vacuum by convention.
    #[inline]
    pub fn velocity(&self) -> f64 {
        if self.is_vacuum() {
            0.0
        } else {
            self.m / self.rho
        }
    }

    /// Reflection `x -> -x`: momentum changes sign.
    #[inline]
    pub fn mirrored(&self) -> Self {
        Self {
            rho: self.rho,
            m: -self.m,
        }
    }
}

/// Riemann invariants `z = v - rho^theta/theta`, `w = v + rho^theta/theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub z: f64,
    pub w: f64,
}

impl Invariants {
    pub fn new(z: f64, w: f64) -> Self {
        Self { z, w }
    }

    /// Image under `x -> -x`, `v -> -v`: `(z, w) -> (-w, -z)`.
    #[inline]
    pub fn mirrored(&self) -> Self {
        Self {
            z: -self.w,
            w: -self.z,
        }
    }
}

pub fn to_invariants(u: GasState, c: &GasConstants) -> Result<Invariants> {
    if !(u.rho >= 0.0) {
        return Err(Error::domain(format!("negative density {}", u.rho)));
    }
    Ok(invariants_of(u, c))
}

/// Infallible variant for states already known to be valid.
#[inline]
pub fn invariants_of(u: GasState, c: &GasConstants) -> Invariants {
    if u.is_vacuum() {
        return Invariants { z: 0.0, w: 0.0 };
    }
    let v = u.m / u.rho;
    let s = c.sound_speed(u.rho) / c.theta;
    Invariants { z: v - s, w: v + s }
}

pub fn from_invariants(iv: Invariants, c: &GasConstants) -> Result<GasState> {
    if iv.w < iv.z || !iv.w.is_finite() || !iv.z.is_finite() {
        return Err(Error::domain(format!(
            "w = {} < z = {} (negative density)",
            iv.w, iv.z
        )));
    }
    Ok(state_of(iv, c))
}

/// Infallible variant; requires `w >= z`.
#[inline]
pub fn state_of(iv: Invariants, c: &GasConstants) -> GasState {
    let base = 0.5 * c.theta * (iv.w - iv.z);
    let rho = rho_pow(base, 1.0 / c.theta);
    if rho < VACUUM_RHO {
        return GasState::VACUUM;
    }
    GasState {
        rho,
        m: rho * 0.5 * (iv.w + iv.z),
    }
}

/// `(lambda1, lambda2) = (v - rho^theta, v + rho^theta)`.
pub fn char_speeds(u: GasState, c: &GasConstants) -> (f64, f64) {
    let v = u.velocity();
    let s = c.sound_speed(u.rho);
    (v - s, v + s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    pub eta: f64,
    pub q: f64,
}

/// Mechanical energy and energy flux.
pub fn mech_entropy(u: GasState, c: &GasConstants) -> EntropyPair {
    if u.is_vacuum() {
        return EntropyPair { eta: 0.0, q: 0.0 };
    }
    let g = c.gamma;
    let v = u.m / u.rho;
    let eta = 0.5 * u.m * v + rho_pow(u.rho, g) / (g * (g - 1.0));
    let q = u.m * (0.5 * v * v + rho_pow(u.rho, g - 1.0) / (g - 1.0));
    EntropyPair { eta, q }
}

/// Shock speed factor `S(rho, rho0) = sqrt(rho (p(rho)-p(rho0)) / (rho0 (rho-rho0)))`,
/// equal to `sqrt(p'(rho0))` at `rho = rho0`.
///
/// A 1-jump from left state `u0` to right density `rho` moves at `v0 - S`;
/// a 2-jump at `v0 + S`.
pub fn shock_speed_factor(rho: f64, rho0: f64, c: &GasConstants) -> Result<f64> {
    if rho < 0.0 || rho0 < 0.0 {
        return Err(Error::domain("negative density in S"));
    }
    if rho == 0.0 && rho0 == 0.0 {
        return Err(Error::domain("S undefined between two vacuum states"));
    }
    if rho0 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((rho * c.pressure_secant(rho, rho0) / rho0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveKind {
    Shock,
    Rarefaction,
    InverseShock,
}

/// State at density `rho` on the chosen wave curve through `u0`.
///
/// For shocks and rarefactions `u0` is the left state (family 1) or the
/// left state of a 2-wave; inverse shocks take `u0` as the right state.
pub fn wave_curve(
    family: Family,
    kind: WaveKind,
    u0: GasState,
    rho: f64,
    c: &GasConstants,
) -> Result<GasState> {
    use Family::*;
    use WaveKind::*;
    if !(rho >= 0.0) {
        return Err(Error::domain("negative density on wave curve"));
    }
    if rho == u0.rho {
        return Ok(u0);
    }
    let rho0 = u0.rho;
    let admissible = match (family, kind) {
        (One, Rarefaction) => rho < rho0,
        (Two, Rarefaction) => rho > rho0,
        (One, Shock) => rho > rho0 && rho0 > 0.0,
        (Two, Shock) => rho < rho0 && rho > 0.0,
        (One, InverseShock) => rho < rho0 && rho > 0.0,
        (Two, InverseShock) => rho > rho0 && rho0 > 0.0,
    };
    if !admissible {
        return Err(Error::domain(format!(
            "density {rho} not admissible on {family:?}-{kind:?} curve from rho0 = {rho0}"
        )));
    }
    let iv0 = invariants_of(u0, c);
    let v = match (family, kind) {
        (One, Rarefaction) => iv0.w - c.sound_speed(rho) / c.theta,
        (Two, Rarefaction) => iv0.z + c.sound_speed(rho) / c.theta,
        (One, _) => u0.velocity() - c.hugoniot_gap(rho, rho0),
        (Two, _) => u0.velocity() + c.hugoniot_gap(rho, rho0),
    };
    Ok(GasState::from_velocity(rho, v))
}

/// Flux `f(u) = (m, m^2/rho + p(rho))`.
#[inline]
pub fn flux(u: GasState, c: &GasConstants) -> [f64; 2] {
    if u.is_vacuum() {
        return [0.0, 0.0];
    }
    [u.m, u.m * u.m / u.rho + c.pressure(u.rho)]
}

/// `f(uR) - f(uL) - sigma (uR - uL)`.
pub fn rh_residual(sigma: f64, ul: GasState, ur: GasState, c: &GasConstants) -> [f64; 2] {
    let fl = flux(ul, c);
    let fr = flux(ur, c);
    [
        fr[0] - fl[0] - sigma * (ur.rho - ul.rho),
        fr[1] - fl[1] - sigma * (ur.m - ul.m),
    ]
}

/// `sigma (eta(uR) - eta(uL)) - (q(uR) - q(uL))` for the mechanical pair;
/// nonnegative across admissible shocks.
pub fn entropy_production(sigma: f64, ul: GasState, ur: GasState, c: &GasConstants) -> f64 {
    let el = mech_entropy(ul, c);
    let er = mech_entropy(ur, c);
    sigma * (er.eta - el.eta) - (er.q - el.q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c53() -> GasConstants {
        GasConstants::new(5.0 / 3.0).unwrap()
    }

    #[test]
    fn invariants_of_unit_density_at_rest() {
        let iv = to_invariants(GasState::new(1.0, 0.0).unwrap(), &c53()).unwrap();
        assert!((iv.z + 3.0).abs() < 1e-14 && (iv.w - 3.0).abs() < 1e-14);
        let u = from_invariants(Invariants::new(-3.0, 3.0), &c53()).unwrap();
        assert!((u.rho - 1.0).abs() < 1e-14 && u.m.abs() < 1e-14);
    }

    #[test]
    fn invariants_of_cube_density() {
        let c = c53();
        let u = GasState::from_velocity(0.512, 0.3);
        let iv = to_invariants(u, &c).unwrap();
        assert!((iv.z + 2.1).abs() < 1e-13, "{iv:?}");
        assert!((iv.w - 2.7).abs() < 1e-13);
        let back = from_invariants(Invariants::new(-2.1, 2.7), &c).unwrap();
        assert!((back.rho - 0.512).abs() < 1e-13);
        assert!((back.velocity() - 0.3).abs() < 1e-13);
        let (l1, l2) = char_speeds(u, &c);
        assert!((l1 + 0.5).abs() < 1e-13 && (l2 - 1.1).abs() < 1e-13);
    }

    #[test]
    fn vacuum_conventions() {
        let c = c53();
        let iv = to_invariants(GasState::VACUUM, &c).unwrap();
        assert_eq!((iv.z, iv.w), (0.0, 0.0));
        assert_eq!(from_invariants(Invariants::new(0.7, 0.7), &c).unwrap(), GasState::VACUUM);
        assert_eq!(char_speeds(GasState::VACUUM, &c), (0.0, 0.0));
        let e = mech_entropy(GasState::VACUUM, &c);
        assert_eq!((e.eta, e.q), (0.0, 0.0));
    }

    #[test]
    fn domain_errors() {
        let c = c53();
        assert!(to_invariants(GasState { rho: -1.0, m: 0.0 }, &c).is_err());
        assert!(from_invariants(Invariants::new(1.0, 0.0), &c).is_err());
        assert!(GasState::new(0.0, 1.0).is_err());
        assert!(GasConstants::new(1.0).is_err());
        assert!(GasConstants::new(1.8).is_err());
        assert!(shock_speed_factor(0.0, 0.0, &c).is_err());
    }

    #[test]
    fn mechanical_entropy_values() {
        let c = c53();
        let e = mech_entropy(GasState::new(1.0, 0.0).unwrap(), &c);
        assert!((e.eta - 0.9).abs() < 1e-14 && e.q == 0.0);
        let e = mech_entropy(GasState::new(1.0, 1.0).unwrap(), &c);
        assert!((e.eta - 1.4).abs() < 1e-14);
    }

    #[test]
    fn shock_speed_factor_limits() {
        let c = c53();
        let s0 = shock_speed_factor(0.7, 0.7, &c).unwrap();
        assert!((s0 - c.sound_speed(0.7)).abs() < 1e-15);
        // near the diagonal the expansion must agree with the raw quotient
        let raw = |r: f64, r0: f64| (r * (c.pressure(r) - c.pressure(r0)) / (r0 * (r - r0))).sqrt();
        for r in [0.7 + 1e-6, 0.7 - 1e-6] {
            let s = shock_speed_factor(r, 0.7, &c).unwrap();
            assert!((s - raw(r, 0.7)).abs() < 1e-8);
            assert!((s - s0).abs() < 2e-6);
        }
        let c2 = GasConstants::unchecked(2.0);
        assert!((shock_speed_factor(2.0, 1.0, &c2).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn shock_speed_factor_increasing_in_rho() {
        let c = c53();
        let mut prev = shock_speed_factor(1e-3, 1.0, &c).unwrap();
        for k in 1..2000 {
            let rho = 1e-3 + k as f64 * 5e-3;
            let s = shock_speed_factor(rho, 1.0, &c).unwrap();
            assert!(s > prev, "not increasing at rho={rho}");
            prev = s;
        }
    }

    #[test]
    fn secant_branch_switch_is_continuous() {
        let c = c53();
        for &rho0 in &[1e-3, 0.3, 1.0, 7.0] {
            let d = 1e-3 * rho0;
            for f in [-0.999, 0.5, 0.999] {
                let r = rho0 + d * f;
                let a = c.pressure_secant(r, rho0);
                let b = (c.pressure(r) - c.pressure(rho0)) / (r - rho0);
                assert!((a - b).abs() <= 1e-9 * a.abs(), "{rho0}: {a} {b}");
            }
        }
    }

    #[test]
    fn rarefaction_identity_and_inverse_shock_roundtrip() {
        let c = c53();
        let u0 = GasState::from_velocity(1.0, 0.2);
        assert_eq!(wave_curve(Family::One, WaveKind::Rarefaction, u0, 1.0, &c).unwrap(), u0);
        let u1 = wave_curve(Family::One, WaveKind::Shock, u0, 1.6, &c).unwrap();
        // u0 lies on S1^{-1}(u1).
        let back = wave_curve(Family::One, WaveKind::InverseShock, u1, 1.0, &c).unwrap();
        assert!((back.rho - u0.rho).abs() < 1e-12 && (back.m - u0.m).abs() < 1e-12);
        let u2 = wave_curve(Family::Two, WaveKind::Shock, u0, 0.4, &c).unwrap();
        let back = wave_curve(Family::Two, WaveKind::InverseShock, u2, 1.0, &c).unwrap();
        assert!((back.m - u0.m).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_curve_requests() {
        let c = c53();
        let u0 = GasState::from_velocity(1.0, 0.0);
        assert!(wave_curve(Family::One, WaveKind::Shock, u0, 0.5, &c).is_err());
        assert!(wave_curve(Family::Two, WaveKind::Shock, u0, 1.5, &c).is_err());
        assert!(wave_curve(Family::One, WaveKind::Rarefaction, u0, 1.5, &c).is_err());
        assert!(wave_curve(Family::Two, WaveKind::Rarefaction, u0, 0.5, &c).is_err());
        assert!(wave_curve(Family::One, WaveKind::InverseShock, u0, 1.5, &c).is_err());
        assert!(wave_curve(Family::Two, WaveKind::InverseShock, u0, 0.5, &c).is_err());
    }

    #[test]
    fn rh_residual_and_entropy_on_constructed_shocks() {
        let c = c53();
        let ul = GasState::from_velocity(1.0, 0.5);
        // 2-shock with left state ul
        let ur = wave_curve(Family::Two, WaveKind::Shock, ul, 0.6, &c).unwrap();
        let sigma = ul.velocity() + shock_speed_factor(ur.rho, ul.rho, &c).unwrap();
        let r = rh_residual(sigma, ul, ur, &c);
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12, "{r:?}");
        assert!(entropy_production(sigma, ul, ur, &c) >= -1e-12);
        let r = rh_residual(sigma + 1e-3, ul, ur, &c);
        assert!(r[0].abs() > 1e-6);
        // 1-rarefaction shock: ur on S1^{-1}(ul)? take left state ul, right state of lower density
        let ur = wave_curve(Family::One, WaveKind::InverseShock, ul, 0.6, &c).unwrap();
        let sigma = ul.velocity() - shock_speed_factor(ur.rho, ul.rho, &c).unwrap();
        let r = rh_residual(sigma, ul, ur, &c);
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
        assert!(entropy_production(sigma, ul, ur, &c) < -1e-6);
        assert_eq!(rh_residual(0.3, ul, ul, &c), [0.0, 0.0]);
        assert_eq!(entropy_production(0.3, ul, ul, &c), 0.0);
    }

    #[test]
    fn hugoniot_gap_slope_matches_finite_difference() {
        let c = c53();
        for &(rho, rho0) in &[(1.3, 1.0), (0.4, 1.0), (1.0 + 1e-7, 1.0), (5.0, 0.2)] {
            let h = 1e-6 * rho;
            let fd = (c.hugoniot_gap(rho + h, rho0) - c.hugoniot_gap(rho - h, rho0)) / (2.0 * h);
            let an = c.hugoniot_gap_slope(rho, rho0);
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{rho} {rho0}: {fd} {an}");
        }
    }
}
