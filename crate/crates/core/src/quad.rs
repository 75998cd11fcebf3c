//! Scalar quadrature and root bracketing used by the Musielak kernels.

use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half; index 7 is the centre).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the 7-point rule, attached to XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = r * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`, bisecting the
/// interval with the largest error estimate until the total estimate drops
/// below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    const MAX_SEGMENTS: usize = 2000;
    let (v, e) = gk15(&f, a, b);
    let mut segs = vec![(a, b, v, e)];
    loop {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if !total.is_finite() {
            return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) || segs.len() >= MAX_SEGMENTS {
            return Ok(total);
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = segs.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval exhausted at machine resolution.
            return Ok(total);
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
}

/// Solves `f(x) = target` for a continuous nondecreasing `f` on `[0, inf)` with
/// `f(0) <= target`. The upper bracket starts at 1 and doubles until it
/// covers the target, then plain bisection runs to relative width `1e-15`.
pub fn invert_increasing(f: impl Fn(f64) -> f64, target: f64) -> Result<f64> {
    if target.is_nan() || target < 0.0 {
        return Err(Error::Domain(format!("cannot invert at {target}")));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0_f64;
    let mut grow = 0;
    while f(hi) < target {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::Numerical(format!("no bracket found for target {target}")));
        }
    }
    let mut lo = 0.0_f64;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
