//! One-dimensional interpolants: a monotone piecewise-cubic Hermite (PCHIP)
//! with an exact running integral, and a clamped cubic spline.

use crate::error::{Error, Result};

fn check_knots(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() || x.len() < min {
        return Err(Error::domain(format!("need at least {min} knots with matching values")));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("knot abscissae must be strictly increasing"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite knot data"));
    }
    Ok(())
}

fn locate(x: &[f64], t: f64) -> usize {
    // index i with x[i] <= t < x[i+1], clamped to a valid segment
    match x.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => i.min(x.len() - 2),
        Err(i) => i.saturating_sub(1).min(x.len() - 2),
    }
}

/// Fritsch-Carlson monotone cubic Hermite interpolant, extended by constants.
///
/// On every knot interval the interpolant is monotone, so it never leaves
/// `[min(y_i, y_i+1), max(y_i, y_i+1)]`.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    /// `cum[i]` = integral from `x[0]` to `x[i]`.
    cum: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_knots(&x, &y, 2)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
        } else {
            for i in 1..n - 1 {
                if del[i - 1] * del[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], del[0], del[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        let mut cum = vec![0.0; n];
        for i in 0..n - 1 {
            cum[i + 1] = cum[i] + 0.5 * h[i] * (y[i] + y[i + 1]) + h[i] * h[i] * (d[i] - d[i + 1]) / 12.0;
        }
        Ok(Self { x, y, d, cum })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = locate(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[i]
            + (s3 - 2.0 * s2 + s) * h * self.d[i]
            + (-2.0 * s3 + 3.0 * s2) * self.y[i + 1]
            + (s3 - s2) * h * self.d[i + 1]
    }

    /// Integral from `x[0]` to `t` (constant extension outside the knots).
    pub fn integral_from_start(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return (t - self.x[0]) * self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.cum[n - 1] + (t - self.x[n - 1]) * self.y[n - 1];
        }
        let i = locate(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s2 * s2;
        let i00 = 0.5 * s4 - s3 + s;
        let i10 = 0.25 * s4 - 2.0 * s3 / 3.0 + 0.5 * s2;
        let i01 = -0.5 * s4 + s3;
        let i11 = 0.25 * s4 - s3 / 3.0;
        self.cum[i]
            + h * (self.y[i] * i00 + h * self.d[i] * i10 + self.y[i + 1] * i01 + h * self.d[i + 1] * i11)
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Cubic spline with prescribed end slopes, extended linearly with those
/// slopes outside the knot range.
#[derive(Debug, Clone)]
pub struct ClampedSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
    d0: f64,
    dn: f64,
}

impl ClampedSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, d0: f64, dn: f64) -> Result<Self> {
        check_knots(&x, &y, 2)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        // tridiagonal system for second derivatives
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - d0);
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        sub[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / h[n - 2]);
        for i in 1..n {
            let f = sub[i] / diag[i - 1];
            diag[i] -= f * sup[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(Self { x, y, m, d0, dn })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value and first derivative.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            return (self.y[0] + self.d0 * (t - self.x[0]), self.d0);
        }
        if t >= self.x[n - 1] {
            return (self.y[n - 1] + self.dn * (t - self.x[n - 1]), self.dn);
        }
        let i = locate(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let val = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let der = (self.y[i + 1] - self.y[i]) / h
            + (-(3.0 * a * a - 1.0) * mi + (3.0 * b * b - 1.0) * mj) * h / 6.0;
        (val, der)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pchip_reproduces_linear_data_and_integral() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let p = Pchip::new(x, y).unwrap();
        assert!((p.eval(1.234) - 3.468).abs() < 1e-13);
        let exact = 1.234f64 * 1.234 + 1.234;
        assert!((p.integral_from_start(1.234) - exact).abs() < 1e-13);
    }

    #[test]
    fn pchip_integral_matches_quadrature() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin() + i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 0.7).cos().abs()).collect();
        let p = Pchip::new(x, y).unwrap();
        for &(a, b) in &[(0.3, 5.1), (2.2, 2.25), (7.7, 18.0)] {
            let q = crate::quadrature::adaptive_simpson(&|t| p.eval(t), a, b, 1e-13);
            let e = p.integral_from_start(b) - p.integral_from_start(a);
            assert!((q - e).abs() < 1e-11, "{q} vs {e}");
        }
    }

    #[test]
    fn pchip_stays_within_neighbouring_values() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![0.0, 0.0, 1.0, 0.2, 0.2, 0.0];
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        for k in 0..500 {
            let t = 5.0 * k as f64 / 499.0;
            let i = locate(&x, t);
            let v = p.eval(t);
            assert!(v >= y[i].min(y[i + 1]) - 1e-15 && v <= y[i].max(y[i + 1]) + 1e-15);
        }
    }

    #[test]
    fn clamped_spline_reproduces_cubic() {
        let f = |t: f64| t * t * t - 2.0 * t;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let x: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = ClampedSpline::new(x, y, df(-1.0), df(1.0)).unwrap();
        for &t in &[-0.9, -0.1, 0.33, 0.97] {
            let (v, d) = s.eval(t);
            assert!((v - f(t)).abs() < 1e-12 && (d - df(t)).abs() < 1e-11);
        }
    }
}
