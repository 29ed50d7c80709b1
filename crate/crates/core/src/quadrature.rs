//! Singular parameter integrals.
//!
//! Every mass formula in this crate reduces to the integral
//!
//! ```text
//! I(x) = ∫_x^1 (1 − s²)^e ds,        e = (4 − p)/(p − 2),
//! ```
//!
//! together with a log-weighted variant that shows up when differentiating
//! with respect to the exponent `p`. For `p > 4` the integrand blows up at
//! `s = 1` (the exponent stays in `(−1/2, 0]` for `p ≤ 6`, so the integral is
//! finite). Substituting `s = 1 − u²` turns the integrand into
//! `2 u^{2e+1} (2 − u²)^e`, which is bounded on the whole window for every
//! admissible `p`; both integrals are evaluated in that variable by an
//! adaptive Gauss–Kronrod 7-15 rule.

use crate::error::{Error, Result};

/// Exponent of the integrand singularity, `(4 − p)/(p − 2)`.
pub fn singular_exponent(p: f64) -> f64 {
    (4.0 - p) / (p - 2.0)
}

/// Parameters of the integral `I(lower) = ∫_lower^1 (1 − s²)^e ds`.
///
/// `p = 6` is admitted here (and only here) so the boundary identities of the
/// balanced-regime analysis can be reproduced exactly.
#[derive(Clone, Copy, Debug)]
pub struct IntegralParams {
    pub p: f64,
    pub lower: f64,
    pub abs_tol: f64,
}

pub const DEFAULT_ABS_TOL: f64 = 1e-12;

impl IntegralParams {
    /// Integral parameters with the default absolute tolerance `1e-12`.
    pub fn new(p: f64, lower: f64) -> Result<Self> {
        Self::with_tol(p, lower, DEFAULT_ABS_TOL)
    }

    pub fn with_tol(p: f64, lower: f64, abs_tol: f64) -> Result<Self> {
        if !(p > 2.0 && p <= 6.0) || !p.is_finite() {
            return Err(Error::domain(format!(
                "integral exponent p = {p} must lie in (2, 6]"
            )));
        }
        if !(0.0..=1.0).contains(&lower) {
            return Err(Error::domain(format!(
                "integral lower bound {lower} must lie in [0, 1]"
            )));
        }
        if !(abs_tol > 0.0) {
            return Err(Error::domain(format!(
                "quadrature tolerance {abs_tol} must be positive"
            )));
        }
        Ok(IntegralParams { p, lower, abs_tol })
    }
}

/// Substituted integrand `2 u^{2e+1} (2 − u²)^e`.
///
/// For exponents beyond ~500 the two power factors underflow and overflow
/// separately (their product stays moderate), so the evaluation switches to
/// log space there.
fn weight(u: f64, e: f64) -> f64 {
    let c = 2.0 * e + 1.0;
    if u <= 0.0 {
        // c = 0 only at p = 6, where the u-factor is identically 1.
        return if c > 0.0 { 0.0 } else { 2.0 * 2f64.powf(e) };
    }
    if e.abs() <= 500.0 {
        2.0 * u.powf(c) * (2.0 - u * u).powf(e)
    } else {
        2.0 * (c * u.ln() + e * (2.0 - u * u).ln()).exp()
    }
}

/// `I(lower) = ∫_lower^1 (1 − s²)^{(4−p)/(p−2)} ds`.
///
/// Nonnegative, strictly decreasing in `lower`, with `I(1) = 0`.
pub fn integral_i(params: &IntegralParams) -> Result<f64> {
    IntegralParams::with_tol(params.p, params.lower, params.abs_tol)?;
    let e = singular_exponent(params.p);
    let ub = (1.0 - params.lower).max(0.0).sqrt();
    if ub == 0.0 {
        return Ok(0.0);
    }
    let value = adaptive_gk(|u| weight(u, e), 0.0, ub, params.abs_tol);
    if !value.is_finite() {
        return Err(Error::SearchFailure(format!(
            "parameter integral failed at p = {}, lower = {}",
            params.p, params.lower
        )));
    }
    Ok(value.max(0.0))
}

/// `∫_lower^upper (1 − s²)^{(4−p)/(p−2)} ln(1 − s²) ds`, nonpositive on its domain.
pub fn integral_i_log(p: f64, lower: f64, upper: f64) -> Result<f64> {
    integral_i_log_tol(p, lower, upper, DEFAULT_ABS_TOL)
}

pub fn integral_i_log_tol(p: f64, lower: f64, upper: f64, abs_tol: f64) -> Result<f64> {
    if !(p > 2.0 && p <= 6.0) || !p.is_finite() {
        return Err(Error::domain(format!(
            "integral exponent p = {p} must lie in (2, 6]"
        )));
    }
    if !(0.0 <= lower && lower <= upper && upper <= 1.0) {
        return Err(Error::domain(format!(
            "log-integral bounds ({lower}, {upper}) must satisfy 0 <= lower <= upper <= 1"
        )));
    }
    if !(abs_tol > 0.0) {
        return Err(Error::domain(format!(
            "quadrature tolerance {abs_tol} must be positive"
        )));
    }
    if lower == upper {
        return Ok(0.0);
    }
    let e = singular_exponent(p);
    // s = 1 - u^2 maps [lower, upper] to [sqrt(1-upper), sqrt(1-lower)].
    let ua = (1.0 - upper).max(0.0).sqrt();
    let ub = (1.0 - lower).max(0.0).sqrt();
    let value = adaptive_gk(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            weight(u, e) * (2.0 * u.ln() + (2.0 - u * u).ln())
        },
        ua,
        ub,
        abs_tol,
    );
    if !value.is_finite() {
        return Err(Error::SearchFailure(format!(
            "log-weighted integral failed at p = {p}, bounds ({lower}, {upper})"
        )));
    }
    Ok(value.min(0.0))
}

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK values).
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
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 7-15 panel: returns (estimate, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Adaptive quadrature by repeated bisection of the panel with the largest
/// error estimate. Panels narrower than ~1e-15 of the span are frozen, which
/// bounds the refinement depth near integrable endpoint singularities.
pub(crate) fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let span = (b - a).abs();
    let min_width = span * 1e-15;
    let (value, err) = gk15(&f, a, b);
    // Refining below the rounding floor of the running estimate is hopeless.
    let abs_tol = abs_tol.max(value.abs() * 5e-16);
    let mut panels = vec![Panel { a, b, value, err }];
    let mut total_err = err;
    const MAX_PANELS: usize = 8192;
    while total_err > abs_tol && panels.len() < MAX_PANELS {
        // Split the worst panel.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty panel list");
        let worst = panels.swap_remove(idx);
        total_err -= worst.err;
        if (worst.b - worst.a).abs() <= min_width {
            // Frozen: keep its value, drop its error from the budget.
            panels.push(Panel { err: 0.0, ..worst });
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(&f, lo, hi);
            total_err += err;
            panels.push(Panel {
                a: lo,
                b: hi,
                value,
                err,
            });
        }
    }
    panels.iter().map(|p| p.value).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn i_of(p: f64, lower: f64) -> f64 {
        integral_i(&IntegralParams::new(p, lower).unwrap()).unwrap()
    }

    /// Closed forms for p = 3, 4, 6.
    fn i_closed(p: f64, x: f64) -> f64 {
        if p == 3.0 {
            2.0 / 3.0 - x + x * x * x / 3.0
        } else if p == 4.0 {
            1.0 - x
        } else if p == 6.0 {
            std::f64::consts::FRAC_PI_2 - x.asin()
        } else {
            unreachable!()
        }
    }

    #[test]
    fn integral_i_examples() {
        assert_abs_diff_eq!(i_of(4.0, 0.25), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(
            i_of(6.0, 0.5),
            std::f64::consts::PI / 3.0,
            epsilon = 1e-11
        );
        assert_abs_diff_eq!(i_of(3.0, 0.0), 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(i_of(4.5, 1.0), 0.0);
    }

    #[test]
    fn integral_i_matches_closed_forms_on_grid() {
        for &p in &[3.0, 4.0, 6.0] {
            for k in 0..100 {
                let x = k as f64 / 99.0;
                assert_abs_diff_eq!(i_of(p, x), i_closed(p, x), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn integral_i_log_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert_abs_diff_eq!(
            integral_i_log(6.0, 0.0, 1.0).unwrap(),
            -std::f64::consts::PI * ln2,
            epsilon = 1e-9
        );
        assert_eq!(integral_i_log(3.3, 0.4, 0.4).unwrap(), 0.0);
        // Antiderivative of ln(1-s^2): s ln(1-s^2) - 2s + ln((1+s)/(1-s)).
        assert_abs_diff_eq!(
            integral_i_log(4.0, 0.0, 1.0).unwrap(),
            2.0 * ln2 - 2.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(IntegralParams::new(2.0, 0.0).is_err());
        assert!(IntegralParams::new(6.5, 0.0).is_err());
        assert!(IntegralParams::new(4.0, -0.1).is_err());
        assert!(IntegralParams::new(4.0, 1.5).is_err());
        assert!(IntegralParams::with_tol(4.0, 0.5, 0.0).is_err());
        assert!(integral_i_log(4.0, 0.7, 0.3).is_err());
        assert!(integral_i_log(7.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn halving_tolerance_is_consistent() {
        for &p in &[2.5, 3.7, 4.9, 5.8] {
            for &lower in &[0.0, 0.3, 0.9] {
                let mut tol = 1e-6;
                let mut prev = integral_i(&IntegralParams::with_tol(p, lower, tol).unwrap())
                    .unwrap();
                for _ in 0..8 {
                    tol *= 0.5;
                    let next = integral_i(&IntegralParams::with_tol(p, lower, tol).unwrap())
                        .unwrap();
                    assert!(
                        (next - prev).abs() <= 2.0 * tol,
                        "p={p} lower={lower} tol={tol}: jump {}",
                        (next - prev).abs()
                    );
                    prev = next;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn integral_i_monotone_in_lower(p in 2.01f64..6.0, x in 0.0f64..0.99, d in 0.005f64..0.2) {
            let y = (x + d).min(0.999);
            let ix = i_of(p, x);
            let iy = i_of(p, y);
            prop_assert!(ix > iy, "I({x}) = {ix} should exceed I({y}) = {iy} at p = {p}");
        }

        #[test]
        fn integral_i_log_nonpositive(p in 2.01f64..6.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let v = integral_i_log(p, lo, hi).unwrap();
            prop_assert!(v <= 0.0);
        }
    }
}
