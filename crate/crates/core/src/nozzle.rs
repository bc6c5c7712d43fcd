//! Nozzle geometry `A(x)`, source coefficient `a = -A'/A`, the majorant `b`
//! with its running integral `B(x) = int_0^x b`, and the admissibility
//! constants `mu`, `sigma`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gas::GasConstants;
use crate::interp::{ClampedSpline, Pchip};
use crate::quadrature::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityConstants {
    pub mu: f64,
    pub sigma: f64,
    /// Strengthening margin; zero for the plain condition.
    pub epsilon: f64,
}

impl AdmissibilityConstants {
    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || self.sigma + 2.0 * epsilon >= 1.0 {
            return Err(Error::Parameter(format!(
                "epsilon = {epsilon} needs sigma + 2 epsilon < 1 (sigma = {})",
                self.sigma
            )));
        }
        Ok(Self { epsilon, ..self })
    }

    /// Bound on each one-sided integral of `b`.
    pub fn integral_bound(&self) -> f64 {
        0.5 * (1.0 / (self.sigma + 2.0 * self.epsilon)).ln()
    }
}

pub fn mu_sigma(c: &GasConstants) -> Result<AdmissibilityConstants> {
    let th = c.theta();
    if !(th > 0.0 && th <= 1.0 / 3.0 + 1e-15) {
        return Err(Error::domain(format!("theta = {th} outside (0, 1/3]")));
    }
    let sq = th.sqrt();
    let mu = (1.0 - th).powi(2) / (th * (1.0 + th - 2.0 * sq));
    let sigma = (1.0 - th) / ((1.0 - sq) * (2.0 * (th + 1.0).sqrt() + sq - 1.0));
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain(format!("sigma = {sigma} not in (0, 1)")));
    }
    Ok(AdmissibilityConstants {
        mu,
        sigma,
        epsilon: 0.0,
    })
}

/// `f(k) = 2((1-theta)k + 1 + theta) / (theta |k^2 - 1|)`; `+inf` at the poles.
pub fn f_of_k(k: f64, c: &GasConstants) -> f64 {
    let th = c.theta();
    let den = th * (k * k - 1.0).abs();
    if den == 0.0 {
        return f64::INFINITY;
    }
    2.0 * ((1.0 - th) * k + 1.0 + th) / den
}

/// `1 - (1 - xi^2)^4` inside `[-1, 1]`, one outside; C^3 across `|xi| = 1`
/// (one order more than needed, so tabulated copies interpolate well) and
/// with value and slope zero at the origin.
fn taper(xi: f64) -> (f64, f64) {
    if xi.abs() >= 1.0 {
        return (1.0, 0.0);
    }
    let s = 1.0 - xi * xi;
    let s3 = s * s * s;
    (1.0 - s3 * s, 8.0 * xi * s3)
}

#[derive(Debug, Clone)]
pub enum Geometry {
    Constant,
    /// `A = 1 + h x^2 s(x/X)` with `s` tapering to make `A` constant past `X`;
    /// the throat sits at the origin.
    Laval { h: f64, x_cut: f64 },
    /// Two Laval throats at `+-X/2`, constant outside `[-X, X]`.
    WindTunnel { h: f64, x_cut: f64 },
    /// Clamped cubic spline through user samples, flat outside the table.
    Tabulated(ClampedSpline),
}

impl Geometry {
    fn check(&self) -> Result<()> {
        match self {
            Geometry::Constant => Ok(()),
            Geometry::Laval { h, x_cut } | Geometry::WindTunnel { h, x_cut } => {
                if !(x_cut.is_finite() && *x_cut > 0.0 && h.is_finite()) {
                    return Err(Error::domain("nozzle needs finite h and X > 0"));
                }
                let amp = match self {
                    Geometry::Laval { .. } => h * x_cut * x_cut,
                    _ => h * 0.25 * x_cut * x_cut,
                };
                if 1.0 + amp.min(0.0) <= 0.0 {
                    return Err(Error::domain(format!("cross section not positive (h = {h})")));
                }
                Ok(())
            }
            Geometry::Tabulated(s) => {
                let (lo, hi) = s.range();
                let n = 20_000;
                for k in 0..=n {
                    let x = lo + (hi - lo) * k as f64 / n as f64;
                    if !(s.eval(x).0 > 0.0) {
                        return Err(Error::domain(format!("tabulated A not positive near x = {x}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// `(A(x), A'(x))`.
    pub fn area(&self, x: f64) -> (f64, f64) {
        match *self {
            Geometry::Constant => (1.0, 0.0),
            Geometry::Laval { h, x_cut } => {
                let (q, dq) = taper(x / x_cut);
                (1.0 + h * x_cut * x_cut * q, h * x_cut * dq)
            }
            Geometry::WindTunnel { h, x_cut } => {
                let l = 0.5 * x_cut;
                let (q1, d1) = taper((x + l) / l);
                let (q2, d2) = taper((x - l) / l);
                (1.0 + h * l * l * (q1 + q2 - 1.0), h * l * (d1 + d2))
            }
            Geometry::Tabulated(ref s) => s.eval(x),
        }
    }

    /// Radius outside of which `A` is constant.
    pub fn x_cut(&self) -> f64 {
        match *self {
            Geometry::Constant => 0.0,
            Geometry::Laval { x_cut, .. } | Geometry::WindTunnel { x_cut, .. } => x_cut,
            Geometry::Tabulated(ref s) => {
                let (lo, hi) = s.range();
                lo.abs().max(hi.abs())
            }
        }
    }
}

/// Parse a two-column whitespace separated table (`#` starts a comment).
/// At least four rows, strictly increasing first column.
pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        if cols.len() != 2 {
            return Err(Error::domain(format!("line {}: expected two columns", ln + 1)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::domain(format!("line {}: bad number '{s}'", ln + 1)))
        };
        let (x, y) = (parse(cols[0])?, parse(cols[1])?);
        if let Some(&prev) = xs.last() {
            if !(x > prev) {
                return Err(Error::domain(format!("line {}: x not strictly increasing", ln + 1)));
            }
        }
        xs.push(x);
        ys.push(y);
    }
    if xs.len() < 4 {
        return Err(Error::domain(format!("table has {} rows, need at least 4", xs.len())));
    }
    Ok((xs, ys))
}

pub fn tabulated_geometry(x: Vec<f64>, area: Vec<f64>) -> Result<Geometry> {
    if area.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::domain("tabulated cross section must be positive"));
    }
    let g = Geometry::Tabulated(ClampedSpline::new(x, area, 0.0, 0.0)?);
    g.check()?;
    Ok(g)
}

type BFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Majorant given as a closure supported in `[lo, hi]`. `B` is built by
/// adaptive Simpson from cached knot values.
#[derive(Clone)]
pub struct FnMajorant {
    f: BFn,
    knots: Vec<f64>,
    cum: Vec<f64>,
}

impl fmt::Debug for FnMajorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMajorant").field("knots", &self.knots.len()).finish()
    }
}

const SIMPSON_TOL: f64 = 1e-12;

impl FnMajorant {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, lo: f64, hi: f64, pieces: usize) -> Result<Self> {
        if !(hi > lo) || pieces == 0 {
            return Err(Error::domain("majorant support must be a nonempty interval"));
        }
        let f: BFn = Arc::new(f);
        let knots: Vec<f64> = (0..=pieces).map(|k| lo + (hi - lo) * k as f64 / pieces as f64).collect();
        let mut cum = vec![0.0];
        for w in knots.windows(2) {
            let last = *cum.last().unwrap();
            cum.push(last + adaptive_simpson(&|x| f(x), w[0], w[1], SIMPSON_TOL / pieces as f64));
        }
        Ok(Self { f, knots, cum })
    }

    fn integral_from_start(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if x <= self.knots[0] {
            return 0.0;
        }
        if x >= self.knots[n - 1] {
            return self.cum[n - 1];
        }
        let h = self.knots[1] - self.knots[0];
        let i = (((x - self.knots[0]) / h) as usize).min(n - 2);
        self.cum[i] + adaptive_simpson(&|t| (self.f)(t), self.knots[i], x, SIMPSON_TOL / n as f64)
    }
}

#[derive(Debug, Clone)]
pub enum Majorant {
    Zero,
    /// Monotone cubic Hermite spline; `B` is integrated in closed form.
    Spline(Pchip),
    Function(FnMajorant),
}

impl Majorant {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Majorant::Zero => 0.0,
            Majorant::Spline(p) => p.eval(x),
            Majorant::Function(f) => {
                if x < f.knots[0] || x > *f.knots.last().unwrap() {
                    0.0
                } else {
                    (f.f)(x)
                }
            }
        }
    }

    fn integral_from_start(&self, x: f64) -> f64 {
        match self {
            Majorant::Zero => 0.0,
            Majorant::Spline(p) => p.integral_from_start(x),
            Majorant::Function(f) => f.integral_from_start(x),
        }
    }

    /// Support bounds, if finite.
    fn support(&self) -> Option<(f64, f64)> {
        match self {
            Majorant::Zero => None,
            Majorant::Spline(p) => {
                let k = p.knots();
                Some((k[0], k[k.len() - 1]))
            }
            Majorant::Function(f) => Some((f.knots[0], *f.knots.last().unwrap())),
        }
    }

    /// Multiply `b` by `k >= 0`.
    pub fn scaled(&self, k: f64) -> Result<Majorant> {
        Ok(match self {
            Majorant::Zero => Majorant::Zero,
            Majorant::Spline(p) => Majorant::Spline(Pchip::new(
                p.knots().to_vec(),
                p.values().iter().map(|v| v * k).collect(),
            )?),
            Majorant::Function(f) => {
                let g = f.f.clone();
                let (lo, hi) = (f.knots[0], *f.knots.last().unwrap());
                Majorant::Function(FnMajorant::new(move |x| k * g(x), lo, hi, f.knots.len() - 1)?)
            }
        })
    }

    /// Majorant from tabulated values; must be nonnegative.
    pub fn from_table(x: Vec<f64>, b: Vec<f64>) -> Result<Majorant> {
        if b.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::domain("majorant values must be nonnegative"));
        }
        Ok(Majorant::Spline(Pchip::new(x, b)?))
    }
}

/// Build `b >= |a| / mu` on a fine grid: a max filter over a window of
/// half-width `dx + 2h`, a local-variation pad, a bump-kernel mollifier of
/// half-width `dx`, then a monotone cubic through the result.
pub fn derive_b(a: impl Fn(f64) -> f64, x_cut: f64, mu: f64, dx: f64) -> Result<Majorant> {
    if !(mu > 0.0 && dx > 0.0) {
        return Err(Error::domain("derive_b needs mu > 0 and dx > 0"));
    }
    if x_cut <= 0.0 {
        return Ok(Majorant::Zero);
    }
    let hf = (0.25 * dx).min(x_cut / 2000.0);
    let k2 = (dx / hf).round().max(1.0) as usize;
    let k1 = k2 + 2;
    let reach = (k1 + k2 + 4) as f64 * hf;
    let x0 = -x_cut - reach;
    let n = ((2.0 * (x_cut + reach)) / hf).ceil() as usize + 1;
    let xs: Vec<f64> = (0..n).map(|i| x0 + i as f64 * hf).collect();
    let s: Vec<f64> = xs.iter().map(|&x| a(x).abs()).collect();
    if s.iter().all(|&v| v == 0.0) {
        return Ok(Majorant::Zero);
    }
    let t: Vec<f64> = (0..n)
        .map(|i| {
            let l = if i > 0 { (s[i] - s[i - 1]).abs() } else { 0.0 };
            let r = if i + 1 < n { (s[i + 1] - s[i]).abs() } else { 0.0 };
            s[i] + l.max(r)
        })
        .collect();
    let m: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(k1);
            let hi = (i + k1).min(n - 1);
            t[lo..=hi].iter().fold(0.0f64, |acc, &v| acc.max(v))
        })
        .collect();
    let kernel: Vec<f64> = (0..=2 * k2)
        .map(|k| {
            let y = (k as f64 - k2 as f64) / (k2 as f64 + 1.0);
            (-1.0 / (1.0 - y * y)).exp()
        })
        .collect();
    let ksum: f64 = kernel.iter().sum();
    let mut vals: Vec<f64> = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let idx = i as isize + k as isize - k2 as isize;
                if idx >= 0 && (idx as usize) < n {
                    acc += w * m[idx as usize];
                }
            }
            acc / ksum / mu
        })
        .collect();
    vals[0] = 0.0;
    vals[n - 1] = 0.0;
    Ok(Majorant::Spline(Pchip::new(xs, vals)?))
}

#[derive(Debug, Clone)]
pub struct NozzleProfile {
    geometry: Geometry,
    majorant: Majorant,
    a_scale: f64,
    b_right: f64,
    b_left: f64,
    b_origin: f64,
}

impl NozzleProfile {
    /// Profile with an explicit majorant.
    pub fn new(geometry: Geometry, majorant: Majorant) -> Result<Self> {
        geometry.check()?;
        let b_origin = majorant.integral_from_start(0.0);
        let (b_right, b_left) = match majorant.support() {
            None => (0.0, 0.0),
            Some((lo, hi)) => {
                let tail = |x: f64| majorant.eval(x) > 0.0;
                let right = if tail(hi) {
                    f64::INFINITY
                } else {
                    majorant.integral_from_start(hi.max(0.0)) - b_origin
                };
                let left = if tail(lo) {
                    f64::INFINITY
                } else {
                    b_origin - majorant.integral_from_start(lo.min(0.0))
                };
                (right, left)
            }
        };
        Ok(Self {
            geometry,
            majorant,
            a_scale: 1.0,
            b_right,
            b_left,
            b_origin,
        })
    }

    /// Profile with the default majorant derived from `a` at mesh size `dx`.
    pub fn with_derived_b(geometry: Geometry, mu: f64, dx: f64) -> Result<Self> {
        geometry.check()?;
        let g = geometry.clone();
        let maj = derive_b(move |x| source_coefficient(&g, x), geometry.x_cut(), mu, dx)?;
        Self::new(geometry, maj)
    }

    pub fn constant() -> Self {
        Self::new(Geometry::Constant, Majorant::Zero).expect("constant nozzle")
    }

    /// Multiply the source coefficient `a` by `k`, keeping `b`.
    pub fn with_source_scale(mut self, k: f64) -> Self {
        self.a_scale = k;
        self
    }

    pub fn with_majorant(self, majorant: Majorant) -> Result<Self> {
        let mut p = Self::new(self.geometry, majorant)?;
        p.a_scale = self.a_scale;
        Ok(p)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn majorant(&self) -> &Majorant {
        &self.majorant
    }

    pub fn x_cut(&self) -> f64 {
        self.geometry.x_cut()
    }

    pub fn area(&self, x: f64) -> f64 {
        self.geometry.area(x).0
    }

    /// `a(x) = -A'(x) / A(x)`.
    pub fn a(&self, x: f64) -> f64 {
        self.a_scale * source_coefficient(&self.geometry, x)
    }

    pub fn b(&self, x: f64) -> f64 {
        self.majorant.eval(x)
    }

    /// `B(x) = int_0^x b`.
    pub fn big_b(&self, x: f64) -> f64 {
        if matches!(self.majorant, Majorant::Zero) {
            return 0.0;
        }
        self.majorant.integral_from_start(x) - self.b_origin
    }

    /// `int_0^inf b`.
    pub fn b_right(&self) -> f64 {
        self.b_right
    }

    /// `int_-inf^0 b`.
    pub fn b_left(&self) -> f64 {
        self.b_left
    }

    pub fn max_one_sided(&self) -> f64 {
        self.b_right.max(self.b_left)
    }

    /// True when `a` and `b` vanish identically.
    pub fn is_homogeneous(&self) -> bool {
        matches!(self.majorant, Majorant::Zero) && (matches!(self.geometry, Geometry::Constant) || self.a_scale == 0.0)
    }
}

fn source_coefficient(g: &Geometry, x: f64) -> f64 {
    let (a, da) = g.area(x);
    -da / a
}

/// Relative slack allowed in the admissibility comparisons.
const COMPARE_SLACK: f64 = 1e-12;
const GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub consts: AdmissibilityConstants,
    /// `min (mu b - |a|) / |a|` over grid points with `a != 0`.
    pub pointwise_margin: f64,
    pub worst_x: f64,
    pub integral_right: f64,
    pub integral_left: f64,
    pub bound: f64,
    /// `bound - max(integral_right, integral_left)`.
    pub integral_margin: f64,
    pub pointwise_ok: bool,
    pub integral_ok: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.pointwise_ok && self.integral_ok
    }

    pub fn violated_clause(&self) -> Option<&'static str> {
        if !self.pointwise_ok {
            Some("(i) |a| <= mu b")
        } else if !self.integral_ok {
            Some("(ii) one-sided integral of b <= log(1/sigma)/2")
        } else {
            None
        }
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mu = {:.10}", self.consts.mu)?;
        writeln!(f, "sigma = {:.10}", self.consts.sigma)?;
        writeln!(f, "epsilon = {}", self.consts.epsilon)?;
        writeln!(f, "pointwise margin = {:e} (worst at x = {})", self.pointwise_margin, self.worst_x)?;
        writeln!(f, "int_0^inf b = {:.12}", self.integral_right)?;
        writeln!(f, "int_-inf^0 b = {:.12}", self.integral_left)?;
        writeln!(f, "bound = {:.12}, integral margin = {:e}", self.bound, self.integral_margin)?;
        match self.violated_clause() {
            None => write!(f, "condition: PASS"),
            Some(c) => write!(f, "condition: FAIL on clause {c}"),
        }
    }
}

pub fn validate_condition_m(profile: &NozzleProfile, consts: &AdmissibilityConstants) -> ConditionReport {
    let x_cut = profile.x_cut();
    let mut margin = f64::INFINITY;
    let mut worst_x = 0.0;
    if x_cut > 0.0 {
        for k in 0..GRID_POINTS {
            let x = -x_cut + 2.0 * x_cut * k as f64 / (GRID_POINTS - 1) as f64;
            let a = profile.a(x).abs();
            if a == 0.0 {
                continue;
            }
            let r = (consts.mu * profile.b(x) - a) / a;
            if r < margin {
                margin = r;
                worst_x = x;
            }
        }
    }
    let bound = consts.integral_bound();
    let worst = profile.b_right().max(profile.b_left());
    ConditionReport {
        consts: *consts,
        pointwise_margin: margin,
        worst_x,
        integral_right: profile.b_right(),
        integral_left: profile.b_left(),
        bound,
        integral_margin: bound - worst,
        pointwise_ok: margin >= -COMPARE_SLACK,
        integral_ok: worst <= bound * (1.0 + COMPARE_SLACK),
    }
}
