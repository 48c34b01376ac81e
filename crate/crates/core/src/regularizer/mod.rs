//! The linearithmic regularizer pair `psi` / `psi_star` and their radial lifts.
//!
//! `psi_star(theta; S, Q)` is the potential
//!
//! ```text
//! exp(theta^2 / (4 S^2) - Q)          |theta| <= S^2
//! exp(|theta| / 2 - S^2 / 4 - Q)      |theta| >  S^2
//! ```
//!
//! and `psi` is its Fenchel conjugate, available in closed form through the
//! Lambert W function. Both are even in their first argument; the derivative
//! maps `psi_prime` and `psi_star_prime` are odd increasing bijections of the
//! real line and inverses of each other.
//!
//! Branch points are evaluated with the first (quadratic / Lambert) branch.
//! All scalar functions accept any `S > 0`, `Q >= 0`; direct evaluation is
//! valid for `S^2 <= 600`.

mod lambert;

pub use lambert::lambert_w0;
use lambert::lambert_w0_unchecked;

use crate::error::{Error, Result};
use crate::vector::norm;

/// Largest `S^2` for which direct (non log-space) evaluation is supported.
pub const MAX_S2: f64 = 600.0;

/// The pair `(S, Q)` parameterizing `psi` and `psi_star`.
///
/// `S^2` is stored directly because the optimizer accumulates `S^2`, and
/// rounding through `sqrt` would break bit-exact replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerParams {
    s2: f64,
    q: f64,
}

impl RegularizerParams {
    pub fn new(s: f64, q: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Domain(format!("S must be finite and positive, got {s}")));
        }
        Self::from_s2(s * s, q)
    }

    pub fn from_s2(s2: f64, q: f64) -> Result<Self> {
        if !(s2.is_finite() && s2 > 0.0 && s2 <= MAX_S2) {
            return Err(Error::Domain(format!("S^2 must lie in (0, {MAX_S2}], got {s2}")));
        }
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::Domain(format!("Q must be finite and >= 0, got {q}")));
        }
        Ok(Self { s2, q })
    }

    pub fn s(&self) -> f64 {
        self.s2.sqrt()
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Branch point `x0 = exp(S^2/4 - Q) / 2` of `psi`; its image under
    /// `psi_prime` is `S^2`.
    pub fn branch_x(&self) -> f64 {
        0.5 * (0.25 * self.s2 - self.q).exp()
    }

    /// `W(2 e^{2Q} S^2 x^2)`, the Lambert term shared by the inner branch.
    fn lambert_term(&self, x: f64) -> f64 {
        let arg = 2.0 * (2.0 * self.q).exp() * self.s2 * x * x;
        lambert_w0_unchecked(arg)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The potential `psi_star(theta; S, Q)`. Positive and even in `theta`.
pub fn psi_star(theta: f64, p: &RegularizerParams) -> f64 {
    let a = theta.abs();
    if a <= p.s2 {
        (theta * theta / (4.0 * p.s2) - p.q).exp()
    } else {
        (0.5 * a - 0.25 * p.s2 - p.q).exp()
    }
}

/// Derivative of [`psi_star`] in `theta`.
pub fn psi_star_prime(theta: f64, p: &RegularizerParams) -> f64 {
    let a = theta.abs();
    if a <= p.s2 {
        theta / (2.0 * p.s2) * (theta * theta / (4.0 * p.s2) - p.q).exp()
    } else {
        0.5 * sign(theta) * (0.5 * a - 0.25 * p.s2 - p.q).exp()
    }
}

/// The linearithmic regularizer `psi(x; S, Q)`, conjugate of [`psi_star`].
///
/// The inner branch `S|x|sqrt(2)(W-1)/sqrt(W)` is evaluated through the
/// identity `sqrt(2) S |x| / sqrt(W) = exp(W/2 - Q)`, which follows from
/// `W e^W = 2 e^{2Q} S^2 x^2` and stays exact as `x -> 0`.
pub fn psi(x: f64, p: &RegularizerParams) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return -(-p.q).exp();
    }
    if a <= p.branch_x() {
        let w = p.lambert_term(a).max(1e-300);
        (w - 1.0) * (0.5 * w - p.q).exp()
    } else {
        2.0 * a * (2.0 * a).ln() + a * (0.5 * p.s2 + 2.0 * p.q - 2.0)
    }
}

/// Derivative of [`psi`] in `x`; the functional inverse of [`psi_star_prime`].
pub fn psi_prime(x: f64, p: &RegularizerParams) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    if a <= p.branch_x() {
        sign(x) * (2.0 * p.s2 * p.lambert_term(a)).sqrt()
    } else {
        sign(x) * (2.0 * (2.0 * a).ln() + 0.5 * p.s2 + 2.0 * p.q)
    }
}

/// Second derivative of [`psi`]. Undefined at `0` and at `+-x0`.
pub fn psi_second(x: f64, p: &RegularizerParams) -> Result<f64> {
    let a = x.abs();
    let x0 = p.branch_x();
    if !a.is_finite() || a == 0.0 || a == x0 {
        return Err(Error::Domain(format!(
            "psi_second undefined at x = {x} (branch point {x0})"
        )));
    }
    if a < x0 {
        // sqrt(2 S^2 W) / (|x| (W + 1)) with sqrt(W)/|x| = sqrt(2) S e^{Q - W/2}
        let w = p.lambert_term(a);
        Ok(2.0 * p.s2 * (p.q - 0.5 * w).exp() / (w + 1.0))
    } else {
        Ok(2.0 / a)
    }
}

/// Radial lift `phi(x) = psi(||x||; S, Q)`.
pub fn phi(x: &[f64], p: &RegularizerParams) -> f64 {
    psi(norm(x), p)
}

/// Radial lift `phi_star(theta) = psi_star(||theta||; S, Q)`.
pub fn phi_star(theta: &[f64], p: &RegularizerParams) -> f64 {
    psi_star(norm(theta), p)
}

/// Gradient of [`phi`]: `psi_prime(||x||) x / ||x||`, and `0` at the origin.
pub fn grad_phi(x: &[f64], p: &RegularizerParams) -> Vec<f64> {
    let n = norm(x);
    if n == 0.0 {
        return vec![0.0; x.len()];
    }
    let c = psi_prime(n, p) / n;
    x.iter().map(|v| c * v).collect()
}

/// Gradient of [`phi_star`], written as `beta * phi_star(theta)` with
/// `beta = theta / (2 S^2)` inside the quadratic region and
/// `beta = theta / (2 ||theta||)` outside it.
pub fn grad_phi_star(theta: &[f64], p: &RegularizerParams) -> Vec<f64> {
    let n = norm(theta);
    if n == 0.0 {
        return vec![0.0; theta.len()];
    }
    let denom = if n <= p.s2 { 2.0 * p.s2 } else { 2.0 * n };
    let value = psi_star(n, p);
    theta.iter().map(|t| t / denom * value).collect()
}
