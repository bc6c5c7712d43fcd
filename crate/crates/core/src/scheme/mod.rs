//! The modified Godunov scheme: mesh, cut-off, in-cell wave construction
//! with steady blocks, mid-time jump solves, fractional step and the time
//! loop.
//!
//! Nodes sit at `x_j = j dx`. Cell `j` is `[j dx, (j+1) dx]` and carries the
//! Riemann problem `(u_j, u_{j+1})` centred at `(j + 1/2) dx`; the averages
//! `E_j` are taken over `[(j - 1/2) dx, (j + 1/2) dx]`.

mod cell;
mod construct;
mod step;

pub use cell::{
    fractional_step, steady_block, CellFan, CellKind, JumpKind, JumpRecord, Piece, SideCase, SourceForm, Wedge,
};
pub use construct::{
    build_fan_ladder, construct_cell, construct_cell_regular, construct_cell_vacuum, damped_crossing,
    solve_diamond, solve_midtime_jump, CellContext, DiamondSolution, FanLadder,
};
pub use step::{
    advance_step, cutoff_state, run, Clip, Coverage, RunOutput, Snapshot, StepDiagnostics, StepOutput, SCAN_POINTS,
    StepState,
};

use crate::error::{Error, Result};
use crate::gas::{invariants_of, GasConstants, GasState};
use crate::newton::NewtonOptions;
use crate::nozzle::NozzleProfile;

pub const DEFAULT_ALPHA: f64 = 0.7;
pub const DEFAULT_BETA: f64 = 0.1;

/// `(1 + 1/(2 theta)) / 2`, the midpoint of the admissible range.
pub fn default_delta(c: &GasConstants) -> f64 {
    0.5 * (1.0 + 1.0 / (2.0 * c.theta()))
}

/// Every violated exponent constraint, as readable strings.
pub fn exponent_violations(alpha: f64, beta: f64, delta: f64, c: &GasConstants) -> Vec<String> {
    let g = c.gamma();
    let mut out = Vec::new();
    if !(alpha > 0.5 && alpha < 1.0) {
        out.push(format!("need 1/2 < alpha < 1 (alpha = {alpha})"));
    }
    if !(beta > 0.0 && beta < alpha) {
        out.push(format!("need 0 < beta < alpha (beta = {beta})"));
    }
    if !(0.5 + 0.5 * beta < alpha) {
        out.push(format!("need 1/2 + beta/2 < alpha ({} >= {alpha})", 0.5 + 0.5 * beta));
    }
    if !(alpha < 1.0 - 2.0 * beta) {
        out.push(format!("need alpha < 1 - 2 beta ({alpha} >= {})", 1.0 - 2.0 * beta));
    }
    if !(beta < 2.0 / (g + 5.0)) {
        out.push(format!("need beta < 2/(gamma+5) ({beta} >= {})", 2.0 / (g + 5.0)));
    }
    if !((9.0 - 3.0 * g) * beta / 2.0 < alpha) {
        out.push(format!("need (9 - 3 gamma) beta / 2 < alpha ({} >= {alpha})", (9.0 - 3.0 * g) * beta / 2.0));
    }
    let top = 1.0 / (2.0 * c.theta());
    if !(delta > 1.0 && delta < top) {
        out.push(format!("need 1 < delta < 1/(2 theta) = {top} (delta = {delta})"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub c: GasConstants,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    /// Invariant-region amplitude `M`.
    pub m_amp: f64,
    pub dx: f64,
    /// Full step from the mesh ratio; the last step may be shorter.
    pub dt: f64,
    pub t_final: f64,
    pub newton: NewtonOptions,
}

impl SchemeParams {
    /// Default exponents; `dt` from the mesh ratio.
    pub fn new(c: GasConstants, dx: f64, m_amp: f64, t_final: f64, profile: &NozzleProfile) -> Result<Self> {
        Self::with_exponents(c, dx, m_amp, t_final, profile, DEFAULT_ALPHA, DEFAULT_BETA, default_delta(&c))
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_exponents(
        c: GasConstants,
        dx: f64,
        m_amp: f64,
        t_final: f64,
        profile: &NozzleProfile,
        alpha: f64,
        beta: f64,
        delta: f64,
    ) -> Result<Self> {
        let bad = exponent_violations(alpha, beta, delta, &c);
        if !bad.is_empty() {
            return Err(Error::Parameter(bad.join("; ")));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::Parameter(format!("T = {t_final} must be finite and >= 0")));
        }
        let dt = mesh_ratio(m_amp, dx, profile)?;
        Ok(Self {
            c,
            alpha,
            beta,
            delta,
            m_amp,
            dx,
            dt,
            t_final,
            newton: NewtonOptions::default(),
        })
    }

    /// `(dx)^alpha`, the ladder spacing in `z`.
    pub fn fan_step(&self) -> f64 {
        self.dx.powf(self.alpha)
    }

    /// `(dx)^beta`, the near-vacuum threshold for middle states.
    pub fn vacuum_threshold(&self) -> f64 {
        self.dx.powf(self.beta)
    }

    /// `(dx)^delta`, the averaging cut-off.
    pub fn cutoff_threshold(&self) -> f64 {
        self.dx.powf(self.delta)
    }

    /// `(-M e^{-B(x)}, M e^{B(x)})`.
    pub fn bounds_at(&self, x: f64, profile: &NozzleProfile) -> (f64, f64) {
        let b = profile.big_b(x);
        (-self.m_amp * (-b).exp(), self.m_amp * b.exp())
    }
}

/// `dt = dx / (2 M e^{max one-sided int b})`.
pub fn mesh_ratio(m_amp: f64, dx: f64, profile: &NozzleProfile) -> Result<f64> {
    if !(m_amp > 0.0 && m_amp.is_finite()) {
        return Err(Error::domain(format!("M = {m_amp}: need M > 0")));
    }
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::domain(format!("dx = {dx}: need dx > 0")));
    }
    Ok(dx / (2.0 * m_amp * profile.max_one_sided().exp()))
}

/// Smallest `M` (times `1 + 1e-12`) for which the samples satisfy the
/// initial bounds `-M e^{-B} <= z`, `w <= M e^{B}`.
pub fn auto_m(samples: &[(f64, GasState)], profile: &NozzleProfile, c: &GasConstants) -> Result<f64> {
    let mut m = 0.0f64;
    for &(x, u) in samples {
        if !(u.rho.is_finite() && u.m.is_finite() && x.is_finite()) || u.rho < 0.0 {
            return Err(Error::domain(format!("bad initial sample at x = {x}: {u:?}")));
        }
        let iv = invariants_of(u, c);
        let b = profile.big_b(x);
        m = m.max(-iv.z * b.exp()).max(iv.w * (-b).exp());
    }
    Ok(m * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c53() -> GasConstants {
        GasConstants::new(5.0 / 3.0).unwrap()
    }

    #[test]
    fn default_exponents_hold_for_all_gammas() {
        for k in 1..=40 {
            let c = GasConstants::new(1.0 + 2.0 / 3.0 * k as f64 / 40.0).unwrap();
            assert!(exponent_violations(DEFAULT_ALPHA, DEFAULT_BETA, default_delta(&c), &c).is_empty());
        }
    }

    #[test]
    fn alpha_too_large_rejected() {
        let v = exponent_violations(0.95, 0.1, 1.25, &c53());
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("1 - 2 beta"));
    }

    #[test]
    fn mesh_ratio_examples() {
        let p = NozzleProfile::constant();
        assert!((mesh_ratio(1.0, 0.01, &p).unwrap() - 0.005).abs() < 1e-18);
        assert_eq!(mesh_ratio(2.0, 0.01, &p).unwrap() * 2.0, mesh_ratio(1.0, 0.01, &p).unwrap());
        assert!(mesh_ratio(0.0, 0.01, &p).is_err());
        let maj = crate::nozzle::Majorant::from_table(vec![0.0, 0.25, 0.75, 1.0], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let p = NozzleProfile::new(crate::nozzle::Geometry::Constant, maj).unwrap();
        let s = 2f64.ln() / p.b_right();
        let p = p.clone().with_majorant(p.majorant().scaled(s).unwrap()).unwrap();
        let dt = mesh_ratio(1.0, 0.01, &p).unwrap();
        assert!((0.01 / dt - 4.0).abs() < 1e-12);
    }

    #[test]
    fn auto_m_examples() {
        let c = c53();
        let p = NozzleProfile::constant();
        let u = GasState::from_velocity(1.0, 0.0);
        let m = auto_m(&[(0.0, u), (1.0, u)], &p, &c).unwrap();
        assert!((m - 3.0).abs() < 1e-11);
        assert_eq!(auto_m(&[(0.0, GasState::VACUUM)], &p, &c).unwrap(), 0.0);
        let m1 = auto_m(&[(0.0, GasState::from_velocity(1.0, 0.5))], &p, &c).unwrap();
        let m2 = auto_m(&[(0.0, GasState::from_velocity(1.0, 1.0))], &p, &c).unwrap();
        assert!(m2 > m1);
        assert!(auto_m(&[(0.0, GasState { rho: f64::NAN, m: 0.0 })], &p, &c).is_err());
    }
}
