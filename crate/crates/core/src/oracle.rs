//! Reference solutions that take closed-form inputs only and share no code
//! with the schemes.

use crate::error::{Error, Result};
use std::f64::consts::PI;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
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
        let (l, r) = (0.5 * (a + m), 0.5 * (m + b));
        let (fl, fr) = (f(l), f(r));
        let left = (m - a) * (fa + 4.0 * fl + fm) / 6.0;
        let right = (b - m) * (fm + 4.0 * fr + fb) / 6.0;
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            left + right + err / 15.0
        } else {
            rec(f, a, m, fa, fl, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, fr, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a >= b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) * (fa + 4.0 * fm + fb) / 6.0,
        tol,
        40,
    )
}

/// Solution of the linear problem `d_t n + d_s n + p(s, N(t)) n = 0`,
/// `n(t, 0) = N(t)` with prescribed `N`, at `(t, s)`:
/// `n0(s - t) exp(-int_0^t p(s - t + u, N(u)) du)` for `s > t`, and
/// `N(t - s) exp(-int_0^s p(v, N(t - s + v)) dv)` otherwise.
pub fn characteristics_density(
    n0: &dyn Fn(f64) -> f64,
    flux: &dyn Fn(f64) -> f64,
    p: &dyn Fn(f64, f64) -> f64,
    t: f64,
    s: f64,
) -> f64 {
    let tol = 1e-10;
    if s > t {
        let base = s - t;
        let exponent = simpson(&|u| p(base + u, flux(u)), 0.0, t, tol);
        n0(base) * (-exponent).exp()
    } else {
        let birth = t - s;
        let exponent = simpson(&|v| p(v, flux(birth + v)), 0.0, s, tol);
        flux(birth) * (-exponent).exp()
    }
}

/// Time at which `X' = X^2 - X + 1`, `X(0) = 0` blows up: `4 pi / (3 sqrt 3)`.
pub fn blowup_time() -> f64 {
    4.0 * PI / (3.0 * 3f64.sqrt())
}

/// `X(t) = 1/2 + (sqrt3/2) tan((sqrt3/2) t - pi/6)`, the activity of the
/// delayed model with `p = X^2 + 1`, `alpha(t) = e^{-t}` and unit mass.
pub fn blowup_activity(t: f64) -> Result<f64> {
    let t_star = blowup_time();
    if t >= t_star {
        return Err(Error::BeyondBlowUp { t, t_star });
    }
    let r = 3f64.sqrt() / 2.0;
    Ok(0.5 + r * (r * t - PI / 6.0).tan())
}

/// Sign-change intervals of `g` sampled at `resolution + 1` uniform points.
/// Exact zeros at sample points give degenerate intervals.
pub fn root_scan_oracle(
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    resolution: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(lo < hi) || resolution < 1000 {
        return Err(Error::invalid(
            "root scan needs lo < hi and at least 1000 points",
        ));
    }
    let x = |i: usize| lo + (hi - lo) * i as f64 / resolution as f64;
    let mut out = Vec::new();
    let mut prev = g(lo);
    if prev == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..=resolution {
        let cur = g(x(i));
        if cur == 0.0 {
            out.push((x(i), x(i)));
        } else if prev != 0.0 && (prev < 0.0) != (cur < 0.0) {
            out.push((x(i - 1), x(i)));
        }
        prev = cur;
    }
    Ok(out)
}
