//! Brute-force middle-state finder, written independently of the solver
//! in the parent module: plain `powf`, no Newton, no shared curve helpers.
//! Only meant for cross-checking.

use crate::gas::{GasConstants, GasState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMiddle {
    State(GasState),
    Vacuum,
}

const SAMPLES: usize = 4000;
const RHO_MIN: f64 = 1e-12;

/// Intersection of the 1-curve through `ul` and the backward 2-curve
/// through `ur`, by dense log-spaced sampling and bisection.
pub fn oracle_middle_state(ul: GasState, ur: GasState, c: &GasConstants) -> OracleMiddle {
    let g = c.gamma();
    let th = 0.5 * (g - 1.0);
    if ul.rho <= 0.0 || ur.rho <= 0.0 {
        return OracleMiddle::Vacuum;
    }
    let vl = ul.m / ul.rho;
    let vr = ur.m / ur.rho;
    if ul.rho == ur.rho && vl == vr {
        return OracleMiddle::State(ul);
    }
    let p = |r: f64| r.powf(g) / g;
    let wl = vl + ul.rho.powf(th) / th;
    let zr = vr - ur.rho.powf(th) / th;
    let from_left = |r: f64| {
        if r <= ul.rho {
            wl - r.powf(th) / th
        } else {
            vl - ((p(r) - p(ul.rho)) * (r - ul.rho) / (r * ul.rho)).sqrt()
        }
    };
    let from_right = |r: f64| {
        if r <= ur.rho {
            zr + r.powf(th) / th
        } else {
            vr + ((p(r) - p(ur.rho)) * (r - ur.rho) / (r * ur.rho)).sqrt()
        }
    };
    let h = |r: f64| from_left(r) - from_right(r);
    if h(RHO_MIN) <= 0.0 {
        return OracleMiddle::Vacuum;
    }
    let mut rho_max = 10.0 * ul.rho.max(ur.rho) + 10.0;
    while h(rho_max) > 0.0 {
        rho_max *= 4.0;
    }
    let (l0, l1) = (RHO_MIN.ln(), rho_max.ln());
    let mut prev = RHO_MIN;
    let mut bracket = (RHO_MIN, rho_max);
    for k in 1..=SAMPLES {
        let r = (l0 + (l1 - l0) * k as f64 / SAMPLES as f64).exp();
        if h(r) <= 0.0 {
            bracket = (prev, r);
            break;
        }
        prev = r;
    }
    let (mut a, mut b) = bracket;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if h(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let r = 0.5 * (a + b);
    let v = 0.5 * (from_left(r) + from_right(r));
    OracleMiddle::State(GasState { rho: r, m: r * v })
}
