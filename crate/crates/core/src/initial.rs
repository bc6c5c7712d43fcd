//! Initial data presets and their cell averages.

use crate::error::{Error, Result};
use crate::gas::{GasConstants, GasState};
use crate::nozzle::NozzleProfile;
use crate::quadrature::gauss16;
use crate::scheme::{auto_m, cutoff_state, Clip, SchemeParams, StepState};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Constant {
        rho: f64,
        v: f64,
    },
    /// Jump at `x0` between `(rho, v)` pairs.
    Riemann {
        x0: f64,
        left: (f64, f64),
        right: (f64, f64),
    },
    /// `rho = rho0 + drho sin(k)`, `v = v0 + dv sin(k)`, `k = 2 pi (x - x0)/wavelength`.
    Wave {
        rho0: f64,
        drho: f64,
        v0: f64,
        dv: f64,
        x0: f64,
        wavelength: f64,
    },
    /// Piecewise linear `(x, rho, v)`, constant outside the table.
    Tabulated {
        x: Vec<f64>,
        rho: Vec<f64>,
        v: Vec<f64>,
    },
}

impl InitialData {
    /// Three whitespace-separated columns `x rho v`; `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Self> {
        let (mut x, mut rho, mut v) = (vec![], vec![], vec![]);
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(Error::Parameter(format!("line {}: expected 3 columns (x rho v)", n + 1)));
            }
            let p = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parameter(format!("line {}: bad number {s:?}", n + 1)))
            };
            let (a, r, u) = (p(cols[0])?, p(cols[1])?, p(cols[2])?);
            if r < 0.0 {
                return Err(Error::Parameter(format!("line {}: negative density", n + 1)));
            }
            if let Some(&last) = x.last() {
                if !(a > last) {
                    return Err(Error::Parameter(format!("line {}: x not strictly increasing", n + 1)));
                }
            }
            x.push(a);
            rho.push(r);
            v.push(u);
        }
        if x.len() < 2 {
            return Err(Error::Parameter("initial-data table needs at least 2 rows".into()));
        }
        Ok(InitialData::Tabulated { x, rho, v })
    }

    pub fn sample(&self, x: f64) -> GasState {
        match self {
            InitialData::Constant { rho, v } => GasState::from_velocity(*rho, *v),
            InitialData::Riemann { x0, left, right } => {
                let (r, v) = if x < *x0 { *left } else { *right };
                GasState::from_velocity(r, v)
            }
            InitialData::Wave {
                rho0,
                drho,
                v0,
                dv,
                x0,
                wavelength,
            } => {
                let s = (2.0 * std::f64::consts::PI * (x - x0) / wavelength).sin();
                GasState::from_velocity((rho0 + drho * s).max(0.0), v0 + dv * s)
            }
            InitialData::Tabulated { x: xs, rho, v } => {
                let n = xs.len();
                if x <= xs[0] {
                    return GasState::from_velocity(rho[0], v[0]);
                }
                if x >= xs[n - 1] {
                    return GasState::from_velocity(rho[n - 1], v[n - 1]);
                }
                let k = xs.partition_point(|&t| t <= x) - 1;
                let s = (x - xs[k]) / (xs[k + 1] - xs[k]);
                GasState::from_velocity(rho[k] + s * (rho[k + 1] - rho[k]), v[k] + s * (v[k + 1] - v[k]))
            }
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            InitialData::Riemann { x0, .. } => vec![*x0],
            InitialData::Tabulated { x, .. } => x.clone(),
            _ => vec![],
        }
    }

    /// Average of `(rho, m)` over `[a, b]`, split at kinks.
    pub fn average(&self, a: f64, b: f64) -> GasState {
        if let InitialData::Constant { .. } = self {
            return self.sample(a);
        }
        let mut cuts: Vec<f64> = self.kinks().into_iter().filter(|&x| x > a && x < b).collect();
        cuts.insert(0, a);
        cuts.push(b);
        let mut acc = [0.0; 2];
        for s in cuts.windows(2) {
            let r = gauss16(s[0], s[1], |x| {
                let u = self.sample(x);
                [u.rho, u.m]
            });
            acc[0] += r[0];
            acc[1] += r[1];
        }
        GasState {
            rho: acc[0] / (b - a),
            m: acc[1] / (b - a),
        }
    }

    /// `M` covering the data on `[x_min, x_max]` (16 samples per `dx`, plus
    /// both sides of every kink).
    pub fn auto_m(&self, x_min: f64, x_max: f64, dx: f64, profile: &NozzleProfile, c: &GasConstants) -> Result<f64> {
        let (a, b) = (x_min - dx, x_max + dx);
        let n = (((b - a) / dx) * 16.0).ceil() as usize + 1;
        let mut pts: Vec<(f64, GasState)> = (0..=n)
            .map(|k| {
                let x = a + (b - a) * k as f64 / n as f64;
                (x, self.sample(x))
            })
            .collect();
        for k in self.kinks() {
            if k >= a && k <= b {
                for x in [k, k.next_down(), k.next_up()] {
                    pts.push((x, self.sample(x)));
                }
            }
        }
        auto_m(&pts, profile, c)
    }
}

/// Node indices covering `[x_min, x_max]`.
pub fn node_range(x_min: f64, x_max: f64, dx: f64) -> Result<(i64, i64)> {
    if !(x_max > x_min) || !(dx > 0.0) {
        return Err(Error::Parameter(format!("need x_max > x_min and dx > 0 ({x_min}, {x_max}, {dx})")));
    }
    let j0 = (x_min / dx - 1e-9).ceil() as i64;
    let j1 = (x_max / dx + 1e-9).floor() as i64;
    if j1 < j0 + 1 {
        return Err(Error::Parameter("domain shorter than two cells".into()));
    }
    Ok((j0, j1))
}

/// Cut-off cell averages of the data on the nodes of `[x_min, x_max]`.
pub fn initial_state(
    data: &InitialData,
    x_min: f64,
    x_max: f64,
    params: &SchemeParams,
    profile: &NozzleProfile,
) -> Result<(StepState, Vec<Clip>)> {
    let dx = params.dx;
    let (j0, j1) = node_range(x_min, x_max, dx)?;
    let mut u = Vec::with_capacity((j1 - j0 + 1) as usize);
    let mut clips = Vec::with_capacity(u.capacity());
    for j in j0..=j1 {
        let x = j as f64 * dx;
        let e = data.average(x - 0.5 * dx, x + 0.5 * dx);
        let (v, clip) = cutoff_state(e, x, params, profile);
        u.push(v);
        clips.push(clip);
    }
    Ok((StepState { j0, u, t: 0.0 }, clips))
}
