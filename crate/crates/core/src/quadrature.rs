//! Fixed Gauss-Legendre rule and adaptive Simpson.

/// 16-point Gauss-Legendre nodes on [-1, 1] (positive half).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_1,
];

/// Integral of a vector-valued `f` over `[a, b]`.
pub fn gauss16<const N: usize>(a: f64, b: f64, f: impl Fn(f64) -> [f64; N]) -> [f64; N] {
    let mut acc = [0.0; N];
    if b <= a {
        return acc;
    }
    let h = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for k in 0..8 {
        let fp = f(mid + h * GL16_X[k]);
        let fm = f(mid - h * GL16_X[k]);
        for i in 0..N {
            acc[i] += GL16_W[k] * (fp[i] + fm[i]);
        }
    }
    for v in acc.iter_mut() {
        *v *= h;
    }
    acc
}

/// Gauss nodes and weights mapped onto `[a, b]`.
pub fn gauss16_nodes(a: f64, b: f64) -> [(f64, f64); 16] {
    let h = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0); 16];
    for k in 0..8 {
        out[2 * k] = (mid - h * GL16_X[k], h * GL16_W[k]);
        out[2 * k + 1] = (mid + h * GL16_X[k], h * GL16_W[k]);
    }
    out
}

/// Adaptive Simpson with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exact_for_degree_31() {
        let [v] = gauss16(-1.0, 2.0, |x| [x.powi(31) + 3.0 * x.powi(4)]);
        let exact = (2f64.powi(32) - 1.0) / 32.0 + 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = GL16_W.iter().sum::<f64>() * 2.0;
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_matches_exp_integral() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
    }
}
