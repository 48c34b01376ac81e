use nalgebra::{DMatrix, SymmetricEigen};

use super::CheckReport;
use crate::error::{Error, Result};
use crate::regularizer::{grad_phi, phi, psi_prime, psi_second, psi_star, RegularizerParams};
use crate::vector::{dot, norm, norm_sq, sub};

/// Finite-difference step for Hessians.
pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-4;

/// Solves `psi_prime(r) = theta_norm` for `r >= 0` by bisection.
pub fn argmin_radial(theta_norm: f64, p: &RegularizerParams) -> f64 {
    if theta_norm <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while psi_prime(hi, p) < theta_norm {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = psi_prime(mid, p);
        if (v - theta_norm).abs() <= 1e-12 * theta_norm.max(1.0) {
            return mid;
        }
        if v < theta_norm {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `sup_theta theta x - psi_star(theta)` by a coarse grid followed by
/// golden-section refinement. Independent of the closed form of `psi`.
pub fn conjugate_by_maximization(x: f64, p: &RegularizerParams) -> f64 {
    let f = |th: f64| th * x - psi_star(th, p);
    if x == 0.0 {
        return f(0.0);
    }
    let dir = x.signum();
    let mut hi = 1.0;
    while f(dir * 2.0 * hi) > f(dir * hi) {
        hi *= 2.0;
    }
    let hi = 2.0 * hi;
    const N: usize = 256;
    let h = hi / N as f64;
    let best = (0..=N).max_by(|&i, &j| f(dir * i as f64 * h).total_cmp(&f(dir * j as f64 * h))).unwrap();
    let (mut a, mut b) = ((best as f64 - 1.0).max(0.0) * h, (best as f64 + 1.0) * h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(dir * c) > f(dir * d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(dir * 0.5 * (a + b))
}

/// Bregman divergence `phi(a) - phi(b) - <grad phi(b), a - b>`.
pub fn bregman(a: &[f64], b: &[f64], p: &RegularizerParams) -> f64 {
    phi(a, p) - phi(b, p) - dot(&grad_phi(b, p), &sub(a, b))
}

/// Two-sided bounds on `B_phi(x*, x)`:
/// `||d||^2/(S+2) min{1, 1/max(||x*||, ||x||)} <= B <= 2 ||d||^2 (S^2 + Q) e^Q`.
pub fn check_bregman_bounds(x_star: &[f64], x: &[f64], p: &RegularizerParams) -> Result<CheckReport> {
    if x_star.len() != x.len() {
        return Err(Error::Contract("dimension mismatch".into()));
    }
    if p.s() < 1.0 {
        return Err(Error::Contract(format!("Bregman bounds need S >= 1, got {}", p.s())));
    }
    let b = bregman(x_star, x, p);
    let d2 = norm_sq(&sub(x_star, x));
    let upper = 2.0 * d2 * (p.s2() + p.q()) * p.q().exp();
    let m = norm(x_star).max(norm(x));
    let lower = d2 / (p.s() + 2.0) * if m > 1.0 { 1.0 / m } else { 1.0 };
    let v = (b - upper).max(lower - b);
    let mut rep = CheckReport::new("bregman_bounds", super::trace_checks::INEQUALITY_TOL);
    rep.record(v, || format!("B={b:.6e} lower={lower:.6e} upper={upper:.6e} S2={} Q={}", p.s2(), p.q()));
    Ok(rep)
}

/// Central differences of the analytic gradient of `phi`, symmetrized.
pub fn fd_hessian(z: &[f64], p: &RegularizerParams, step: f64) -> DMatrix<f64> {
    let d = z.len();
    let mut h = DMatrix::zeros(d, d);
    let mut zp = z.to_vec();
    for j in 0..d {
        zp[j] = z[j] + step;
        let gp = grad_phi(&zp, p);
        zp[j] = z[j] - step;
        let gm = grad_phi(&zp, p);
        zp[j] = z[j];
        for i in 0..d {
            h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    (&h + h.transpose()) * 0.5
}

/// Eigenvalues of the Hessian of `phi` at `z` lie between `psi''(||z||)`
/// and `psi'(||z||)/||z||`, up to `1e-4` relative.
///
/// Radii at the origin or within the stencil of the branch point are
/// rejected, since the second derivative jumps there.
pub fn check_hessian_sandwich(z: &[f64], p: &RegularizerParams) -> Result<CheckReport> {
    let r = norm(z);
    let reach = 4.0 * FD_STEP;
    if r <= reach || (r - p.branch_x()).abs() <= reach {
        return Err(Error::Domain(format!(
            "radius {r} is too close to 0 or the branch point {}",
            p.branch_x()
        )));
    }
    let a = psi_second(r, p)?;
    let b = psi_prime(r, p) / r;
    let (lo, hi) = (a.min(b), a.max(b));
    let scale = lo.abs().max(hi.abs());
    let eig = SymmetricEigen::new(fd_hessian(z, p, FD_STEP)).eigenvalues;
    let mut rep = CheckReport::new("hessian_sandwich", FD_TOL);
    for (k, &lam) in eig.iter().enumerate() {
        let v = (lo - lam).max(lam - hi) / scale;
        rep.record(v, || format!("r={r:.6e} eig[{k}]={lam:.9e} range=[{lo:.9e}, {hi:.9e}]"));
    }
    Ok(rep)
}
