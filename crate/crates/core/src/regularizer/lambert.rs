//! Principal branch of the Lambert W function on `[0, inf)`.

use crate::error::{Error, Result};

const MAX_ITER: usize = 50;
const REL_TOL: f64 = 1e-14;

/// Principal Lambert W, the inverse of `w -> w e^w` on `[0, inf)`.
///
/// Halley iteration seeded with `ln(1 + x)`, which is an upper bound of
/// `W(x)` on the whole domain.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("lambert_w0 needs finite x >= 0, got {x}")));
    }
    Ok(lambert_w0_unchecked(x))
}

/// Same as [`lambert_w0`] for callers that already know `x` is valid.
pub(crate) fn lambert_w0_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x > 1e100 {
        return w0_log_form(x.ln());
    }
    let mut w = x.ln_1p();
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        // Halley: w - f / (e^w (w+1) - (w+2) f / (2(w+1)))
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= REL_TOL * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    w.max(0.0)
}

// Newton on w + ln w = ln x, for arguments where w e^w would overflow.
fn w0_log_form(lx: f64) -> f64 {
    let mut w = lx - lx.ln();
    for _ in 0..MAX_ITER {
        let step = (w + w.ln() - lx) * w / (w + 1.0);
        w -= step;
        if step.abs() <= REL_TOL * w {
            break;
        }
    }
    w
}
