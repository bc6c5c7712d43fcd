//! Small dense Newton solver with a finite-difference Jacobian and
//! backtracking, for the 2- and 4-unknown jump systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
        }
    }
}

fn norm_inf<const N: usize>(r: &[f64; N]) -> f64 {
    r.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut s = b[row];
        for k in row + 1..N {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Solve `F(x) = 0` starting from `x0`. `F` may return `None` for points
/// outside its domain; the line search then backs off.
pub fn newton<const N: usize>(
    context: &'static str,
    x0: [f64; N],
    opts: NewtonOptions,
    f: impl Fn(&[f64; N]) -> Option<[f64; N]>,
) -> Result<[f64; N]> {
    let fail = |x: [f64; N], r: f64, it: usize| Error::Newton {
        context,
        residual: r,
        iterations: it,
        last: x.to_vec(),
    };
    let mut x = x0;
    let mut r = f(&x).ok_or_else(|| fail(x, f64::INFINITY, 0))?;
    let mut rn = norm_inf(&r);
    let mut polish = 0;
    for it in 0..opts.max_iter + 2 {
        if rn <= opts.tol {
            // a couple of extra steps push the residual to round-off
            if polish == 2 || rn == 0.0 {
                return Ok(x);
            }
            polish += 1;
        } else if it >= opts.max_iter {
            break;
        }
        let mut jac = [[0.0; N]; N];
        for k in 0..N {
            let h = 1e-7 * x[k].abs().max(1e-3);
            let mut xp = x;
            xp[k] += h;
            let mut xm = x;
            xm[k] -= h;
            let (rp, rm, span) = match (f(&xp), f(&xm)) {
                (Some(p), Some(m)) => (p, m, 2.0 * h),
                (Some(p), None) => (p, r, h),
                (None, Some(m)) => (r, m, h),
                (None, None) => return Err(fail(x, rn, it)),
            };
            for i in 0..N {
                jac[i][k] = (rp[i] - rm[i]) / span;
            }
        }
        let mut neg = r;
        for v in neg.iter_mut() {
            *v = -*v;
        }
        let dx = solve_dense(jac, neg).ok_or_else(|| fail(x, rn, it))?;
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut xt = x;
            for i in 0..N {
                xt[i] += lam * dx[i];
            }
            if let Some(rt) = f(&xt) {
                let rtn = norm_inf(&rt);
                if rtn.is_finite() && (rtn < rn || (rn > opts.tol && rtn <= opts.tol)) {
                    x = xt;
                    r = rt;
                    rn = rtn;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            return if rn <= opts.tol { Ok(x) } else { Err(fail(x, rn, it)) };
        }
    }
    if rn <= opts.tol {
        Ok(x)
    } else {
        Err(fail(x, rn, opts.max_iter))
    }
}
