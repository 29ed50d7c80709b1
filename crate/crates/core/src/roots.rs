//! Scalar root finding: safeguarded Newton with a bisection fallback.
//!
//! Every equation solved in this crate is strictly monotone on an analytic
//! bracket, so robustness matters more than iteration counts. The scheme
//! below follows the classic `rtsafe` hybrid: take the Newton step whenever
//! it stays inside the current bracket and halves it fast enough, otherwise
//! bisect. The bracket never widens, so convergence is guaranteed.

/// Find the root of `f` in `[lo, hi]`, where `func` returns `(f(x), f'(x))`.
///
/// Requires a sign change over the initial bracket. Stops when the step (or
/// the bracket) shrinks below `rel_tol * |x|` in relative terms, with an
/// absolute floor for roots near zero.
pub(crate) fn newton_bisect<F>(mut func: F, lo: f64, hi: f64, rel_tol: f64) -> f64
where
    F: FnMut(f64) -> (f64, f64),
{
    let (flo, _) = func(lo);
    if flo == 0.0 {
        return lo;
    }
    let (fhi, _) = func(hi);
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(
        flo * fhi < 0.0,
        "newton_bisect requires a sign change: f({lo}) = {flo}, f({hi}) = {fhi}"
    );
    // Orient so that f(xl) < 0 < f(xh).
    let (mut xl, mut xh) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };

    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = func(x);
    for _ in 0..200 {
        let newton_escapes =
            ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0 || 2.0 * f.abs() > (dx_old * df).abs();
        if newton_escapes || df == 0.0 {
            dx_old = dx;
            dx = 0.5 * (xh - xl);
            x = xl + dx;
            if x == xl {
                return x;
            }
        } else {
            dx_old = dx;
            dx = f / df;
            let prev = x;
            x -= dx;
            if prev == x {
                return x;
            }
        }
        if dx.abs() <= rel_tol * x.abs().max(1e-300) {
            return x;
        }
        let out = func(x);
        f = out.0;
        df = out.1;
        if f < 0.0 {
            xl = x;
        } else {
            xh = x;
        }
    }
    x
}

/// Plain bisection for functions without a cheap derivative.
pub(crate) fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(1e-300) || mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisect_finds_cubic_root() {
        let root = newton_bisect(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-14);
        assert!((root - 2f64.powf(1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn newton_bisect_survives_flat_derivative() {
        // f'(0) = 0 forces bisection steps near the left end.
        let root = newton_bisect(|x| (x * x * x - 1e-6, 3.0 * x * x), 0.0, 1.0, 1e-14);
        assert!((root - 0.01).abs() < 1e-12);
    }

    #[test]
    fn bisect_matches_known_root() {
        let root = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-13);
        assert!((root - 0.739_085_133_215_160_6).abs() < 1e-12);
    }
}
