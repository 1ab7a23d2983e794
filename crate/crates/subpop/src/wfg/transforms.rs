//! Transformation and shape functions for the WFG problem family.
//!
//! Every function maps normalized parameters in `[0, 1]` back into `[0, 1]`;
//! tiny floating-point excursions outside the unit interval are snapped back
//! so that downstream `powf`/division calls never see `-1e-17`-style inputs.

/// Snap tolerance for unit-interval excursions.
const EPS: f64 = 1e-10;

/// Clamps values within `EPS` of the unit interval onto it.
pub(crate) fn correct01(v: f64) -> f64 {
    if v < 0.0 && v >= -EPS {
        0.0
    } else if v > 1.0 && v <= 1.0 + EPS {
        1.0
    } else {
        v
    }
}

/// Polynomial bias: pushes values toward 0 (`a > 1`) or 1 (`a < 1`).
pub(crate) fn b_poly(y: f64, a: f64) -> f64 {
    correct01(y.powf(a))
}

/// Flat-region bias: values between `b` and `c` collapse onto `a`.
pub(crate) fn b_flat(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let v = a + (0.0f64).min((y - b).floor()) * a * (b - y) / b
        - (0.0f64).min((c - y).floor()) * (1.0 - a) * (y - c) / (1.0 - c);
    correct01(v)
}

/// Parameter-dependent bias: the effective exponent on `y` is steered by the
/// secondary value `u` (itself a reduction of other parameters).
pub(crate) fn b_param(y: f64, u: f64, a: f64, b: f64, c: f64) -> f64 {
    let v = b + (c - b) * (a - (1.0 - 2.0 * u) * ((0.5 - u).floor() + a).abs());
    correct01(y.powf(v))
}

/// Linear shift: moves the optimum from 0 to `a`.
pub(crate) fn s_linear(y: f64, a: f64) -> f64 {
    correct01((y - a).abs() / ((a - y).floor() + a).abs())
}

/// Deceptive shift: a global optimum at `a` inside an aperture of width `b`,
/// flanked by deceptive minima of depth `c`.
pub(crate) fn s_decept(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - a + b).floor() * (1.0 - c + (a - b) / b) / (a - b);
    let t2 = (a + b - y).floor() * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b);
    correct01(1.0 + ((y - a).abs() - b) * (t1 + t2 + 1.0 / b))
}

/// Multi-modal shift: `a` local minima with well depth controlled by `b`,
/// global optimum at `c`.
pub(crate) fn s_multi(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - c).abs() / (2.0 * ((c - y).floor() + c));
    let t2 = (4.0 * a + 2.0) * std::f64::consts::PI * (0.5 - t1);
    correct01((1.0 + t2.cos() + 4.0 * b * t1 * t1) / (b + 2.0))
}

/// Weighted-sum reduction.
pub(crate) fn r_sum(ys: &[f64], ws: &[f64]) -> f64 {
    debug_assert_eq!(ys.len(), ws.len());
    let num: f64 = ys.iter().zip(ws).map(|(y, w)| y * w).sum();
    let den: f64 = ws.iter().sum();
    correct01(num / den)
}

/// Non-separable reduction of degree `a`: each value is coupled with its
/// `a − 1` cyclic successors through absolute differences.
pub(crate) fn r_nonsep(ys: &[f64], a: usize) -> f64 {
    let n = ys.len();
    debug_assert!(a >= 1 && a <= n);
    let mut num = 0.0;
    for j in 0..n {
        num += ys[j];
        for k in 0..a - 1 {
            num += (ys[j] - ys[(j + k + 1) % n]).abs();
        }
    }
    let af = a as f64;
    let half = (af / 2.0).ceil();
    let den = (n as f64 / af) * half * (1.0 + 2.0 * af - 2.0 * half);
    correct01(num / den)
}

/// Linear degeneracy-capable shape; `m` is 1-based, `x` has length `M − 1`.
pub(crate) fn shape_linear(x: &[f64], m: usize) -> f64 {
    let big_m = x.len() + 1;
    let mut v: f64 = x[..big_m - m].iter().product();
    if m >= 2 {
        v *= 1.0 - x[big_m - m];
    }
    correct01(v)
}

/// Convex shape.
pub(crate) fn shape_convex(x: &[f64], m: usize) -> f64 {
    let big_m = x.len() + 1;
    let mut v: f64 = x[..big_m - m]
        .iter()
        .map(|&t| 1.0 - (t * std::f64::consts::FRAC_PI_2).cos())
        .product();
    if m >= 2 {
        v *= 1.0 - (x[big_m - m] * std::f64::consts::FRAC_PI_2).sin();
    }
    correct01(v)
}

/// Concave shape; fronts built from it lie on the unit hypersphere.
pub(crate) fn shape_concave(x: &[f64], m: usize) -> f64 {
    let big_m = x.len() + 1;
    let mut v: f64 = x[..big_m - m]
        .iter()
        .map(|&t| (t * std::f64::consts::FRAC_PI_2).sin())
        .product();
    if m >= 2 {
        v *= (x[big_m - m] * std::f64::consts::FRAC_PI_2).cos();
    }
    correct01(v)
}

/// Mixed convex/concave shape with `a` segments, applied to `x₁` only.
pub(crate) fn shape_mixed(x1: f64, a: f64, alpha: f64) -> f64 {
    let two_a_pi = 2.0 * a * std::f64::consts::PI;
    let v = 1.0 - x1 - (two_a_pi * x1 + std::f64::consts::FRAC_PI_2).cos() / two_a_pi;
    correct01(v.powf(alpha))
}

/// Disconnected shape with `a` regions, applied to `x₁` only.
pub(crate) fn shape_disc(x1: f64, a: f64, alpha: f64, beta: f64) -> f64 {
    let c = (a * x1.powf(beta) * std::f64::consts::PI).cos();
    correct01(1.0 - x1.powf(alpha) * c * c)
}
