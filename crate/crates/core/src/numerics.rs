//! Scalar root finding shared by the section and hinge laws.

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must have opposite signs.
pub(crate) fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Some(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Newton iteration kept inside a sign-changing bracket; falls back to bisection
/// whenever the Newton step leaves the bracket or stalls. `f` returns the value
/// and the derivative.
pub(crate) fn safeguarded_newton(f: impl FnMut(f64) -> (f64, f64), lo: f64, hi: f64, tol: f64) -> Option<f64> {
    safeguarded_newton_from(f, lo, hi, 0.5 * (lo + hi), tol)
}

/// [`safeguarded_newton`] started from `guess` (clamped into the bracket).
pub(crate) fn safeguarded_newton_from(
    mut f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    guess: f64,
    tol: f64,
) -> Option<f64> {
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return None;
    }
    Some(newton_in_bracket(f, lo, hi, f_hi > 0.0, guess, tol))
}

/// Safeguarded Newton on a bracket already known to change sign; `rising`
/// tells whether `f(hi) > 0`.
pub(crate) fn newton_in_bracket(
    mut f: impl FnMut(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    rising: bool,
    guess: f64,
    tol: f64,
) -> f64 {
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut last_step = hi - lo;
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == rising {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= tol {
            return 0.5 * (lo + hi);
        }
        let newton = if dfx != 0.0 && dfx.is_finite() { x - fx / dfx } else { f64::NAN };
        let next =
            if newton > lo && newton < hi && (newton - x).abs() < 0.5 * last_step { newton } else { 0.5 * (lo + hi) };
        last_step = (next - x).abs();
        if last_step <= 0.25 * tol {
            return next;
        }
        x = next;
    }
    x
}
