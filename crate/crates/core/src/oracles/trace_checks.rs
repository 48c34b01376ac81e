use super::numeric::bregman;
use super::{CheckReport, TraceWindow};
use crate::error::{Error, Result};
use crate::regularizer::{phi, phi_star, grad_phi_star, RegularizerParams};
use crate::vector::{dot, norm, sub};

pub const INEQUALITY_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-8;

/// `H(x) = phi(x) - <theta, x>` in centered coordinates.
fn h(x: &[f64], theta: &[f64], p: &RegularizerParams) -> f64 {
    phi(x, p) - dot(theta, x)
}

fn zeros(d: usize) -> Vec<f64> {
    vec![0.0; d]
}

fn theta(w: &TraceWindow, t: usize) -> Vec<f64> {
    if t == 0 {
        zeros(w.dim())
    } else {
        w.records[t - 1].theta.clone()
    }
}

/// Per-step terms `H_t(x_t) - H_{t+1}(x_{t+1}) + <l_t, x_t>` for `t = 1..=T`.
///
/// The iterates are the recorded ones; the regularizers are those of the
/// analysis (`Q` recomputed with the squared rule). For a genuine trace
/// this equals the dual form up to rounding.
pub fn key_inequality_terms(w: &TraceWindow) -> Vec<f64> {
    let xs = w.centered_iterates();
    let ps = w.canonical_params();
    let mut th_prev = zeros(w.dim());
    let mut out = Vec::with_capacity(w.len());
    for (i, r) in w.records.iter().enumerate() {
        let k = h(&xs[i], &th_prev, &ps[i]) - h(&xs[i + 1], &r.theta, &ps[i + 1]) + dot(&r.ell, &xs[i]);
        out.push(k);
        th_prev.clone_from(&r.theta);
    }
    out
}

/// Dual form `-phi*_t(theta_{t-1}) + phi*_{t+1}(theta_t) + <l_t, grad phi*_t(theta_{t-1})>`
/// of one key-inequality term. Cheap enough to evaluate inline during a run.
pub fn key_inequality_dual(
    theta_prev: &[f64],
    p_prev: &RegularizerParams,
    ell: &[f64],
    theta: &[f64],
    p: &RegularizerParams,
) -> f64 {
    -phi_star(theta_prev, p_prev) + phi_star(theta, p) + dot(ell, &grad_phi_star(theta_prev, p_prev))
}

pub fn check_key_inequality(w: &TraceWindow) -> Result<CheckReport> {
    w.validate()?;
    let mut rep = CheckReport::new("key_inequality", INEQUALITY_TOL);
    for (i, k) in key_inequality_terms(w).into_iter().enumerate() {
        rep.record(k, || format!("t={} term={k:.6e} rule={}", i + 1, w.q_update.as_str()));
    }
    Ok(rep)
}

/// Checks the FTRL regret equality against the comparator `u` (absolute
/// coordinates), using `x_{T+1}` in the final `H_{T+1}` terms.
pub fn check_regret_identity(w: &TraceWindow, u: &[f64]) -> Result<CheckReport> {
    w.validate()?;
    if u.len() != w.dim() {
        return Err(Error::Contract("comparator dimension differs from trace".into()));
    }
    let v = sub(u, &w.x0);
    let xs = w.centered_iterates();
    let ps = w.canonical_params();
    let n = w.len();
    let lhs: f64 = w.records.iter().zip(&xs).map(|(r, x)| dot(&r.ell, &sub(x, &v))).sum();
    let keys: f64 = key_inequality_terms(w).iter().sum();
    let th = theta(w, n);
    let min_phi1 = -1.0;
    let rhs = phi(&v, &ps[n]) - min_phi1 + h(&xs[n], &th, &ps[n]) - h(&v, &th, &ps[n]) + keys;
    let scale = 1.0 + lhs.abs().max(rhs.abs());
    let mut rep = CheckReport::new("regret_identity", IDENTITY_TOL);
    rep.record((lhs - rhs).abs() / scale, || format!("T={n} lhs={lhs:.12e} rhs={rhs:.12e}"));
    Ok(rep)
}

fn check_a(a: usize, max: usize) -> Result<()> {
    if a == 0 || a > max {
        return Err(Error::Contract(format!("A = {a} outside 1..={max}")));
    }
    Ok(())
}

/// `sum_{t=A}^T <l_t, x_t - x_A> <= phi_{T+1}(x_A) - phi_A(x_A)`.
pub fn check_partial_regret(w: &TraceWindow, a: usize) -> Result<CheckReport> {
    w.validate()?;
    check_a(a, w.len())?;
    let xs = w.centered_iterates();
    let ps = w.canonical_params();
    let xa = &xs[a - 1];
    let lhs: f64 = (a..=w.len()).map(|t| dot(&w.records[t - 1].ell, &sub(&xs[t - 1], xa))).sum();
    let rhs = phi(xa, &ps[w.len()]) - phi(xa, &ps[a - 1]);
    let mut rep = CheckReport::new("partial_regret", INEQUALITY_TOL);
    rep.record(lhs - rhs, || format!("A={a} T={} lhs={lhs:.6e} rhs={rhs:.6e}", w.len()));
    Ok(rep)
}

/// `phi_{T+1}(x_A) - phi_A(x_A) <= max{exp(S_T^2/4 - Q_T)/2, ||x_A||} (S_T^2 - S_{A-1}^2)`
/// for `1 <= A <= T + 1`.
pub fn check_diff_regularizers(w: &TraceWindow, a: usize) -> Result<CheckReport> {
    w.validate()?;
    check_a(a, w.len() + 1)?;
    let xs = w.centered_iterates();
    let ps = w.canonical_params();
    let (pt, pa) = (&ps[w.len()], &ps[a - 1]);
    let xa = &xs[a - 1];
    let lhs = phi(xa, pt) - phi(xa, pa);
    let rhs = pt.branch_x().max(norm(xa)) * (pt.s2() - pa.s2());
    let mut rep = CheckReport::new("diff_regularizers", INEQUALITY_TOL);
    rep.record(lhs - rhs, || format!("A={a} T={} lhs={lhs:.6e} rhs={rhs:.6e}", w.len()));
    Ok(rep)
}

/// `||x_t|| <= max{||x*|| + sqrt((S_{t-1}+2) B), 2||x*||, 4 (S_{t-1}+2) B}` with
/// `B = B_{phi_t}(x*, x_t)`, for every `t = 1..=T+1`.
pub fn check_iterate_bound(w: &TraceWindow) -> Result<CheckReport> {
    w.validate()?;
    let xs_abs = w
        .x_star
        .as_ref()
        .ok_or_else(|| Error::Contract("iterate bound needs x_star".into()))?;
    let xs = sub(xs_abs, &w.x0);
    let nxs = norm(&xs);
    let ps = w.canonical_params();
    let mut rep = CheckReport::new("iterate_bound", INEQUALITY_TOL);
    for (i, x) in w.centered_iterates().iter().enumerate() {
        let p = &ps[i];
        let b = bregman(&xs, x, p);
        let c = p.s() + 2.0;
        let bound = (nxs + (c * b).sqrt()).max(2.0 * nxs).max(4.0 * c * b);
        let nx = norm(x);
        rep.record((nx - bound) / bound.max(1.0), || format!("t={} |x_t|={nx:.6e} bound={bound:.6e}", i + 1));
    }
    Ok(rep)
}
