//! Closed-form guarantees of the optimizer, evaluated for a configuration.

use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::ftrl::check_alpha;
use crate::regularizer::{psi, RegularizerParams};

fn alpha_ok(alpha: f64) -> Result<f64> {
    check_alpha(alpha).map_err(|e| Error::Config(e.to_string()))?;
    Ok(1.0 / (2.0 * alpha - 1.0))
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn horizon_ok(t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::Config("T must be >= 1".into()));
    }
    Ok(t as f64)
}

/// Bound on `S_T` under the power schedule: `sqrt(5 + 1/(2 alpha - 1))`.
pub fn power_s_bound(alpha: f64) -> Result<f64> {
    Ok((5.0 + alpha_ok(alpha)?).sqrt())
}

/// Bound on `Q_T` under the power schedule: `ln(5 + 1/(2 alpha - 1))`.
pub fn power_q_bound(alpha: f64) -> Result<f64> {
    Ok((5.0 + alpha_ok(alpha)?).ln())
}

/// Bound on `S_T` under the adaptive schedule: `sqrt(4 + 1/(2 alpha - 1))`.
pub fn adaptive_s_bound(alpha: f64) -> Result<f64> {
    Ok((4.0 + alpha_ok(alpha)?).sqrt())
}

fn distance_term(s: f64, r: f64) -> f64 {
    s * r * (2.0 * (1.0 + 2.0 * r).ln() + 9.0 * s)
}

/// Running-average bound for convex objectives:
/// `G / T^{1-alpha} (1 + S r (2 ln(1 + 2r) + 9 S))`.
pub fn theorem2_bound(t: u64, alpha: f64, g: f64, r: f64) -> Result<f64> {
    let s = power_s_bound(alpha)?;
    let tf = horizon_ok(t)?;
    nonneg("G", g)?;
    nonneg("r", r)?;
    Ok(g / tf.powf(1.0 - alpha) * (1.0 + distance_term(s, r)))
}

/// Last-iterate bound for convex objectives.
pub fn theorem3_bound(t: u64, alpha: f64, g: f64, r: f64) -> Result<f64> {
    let s = power_s_bound(alpha)?;
    let tf = horizon_ok(t)?;
    nonneg("G", g)?;
    nonneg("r", r)?;
    let lead = 2.0 + 1.0 / (E * (2.0 * alpha - 1.0));
    let inner = s.exp() + 3.0 * r + 6.0 * (s + 2.0) * (2.0 + distance_term(s, r));
    Ok(g / tf.powf(1.0 - alpha) * lead * inner)
}

/// `psi(r; sqrt(4 + 1/(2 alpha - 1)), ln(4 + 1/(2 alpha - 1)))`, the limit of
/// `phi_T(u)` used by the adaptive-rate bound.
pub fn phi_inf_worst(r: f64, alpha: f64) -> Result<f64> {
    let c = 4.0 + alpha_ok(alpha)?;
    nonneg("r", r)?;
    let p = RegularizerParams::from_s2(c, c.ln()).map_err(|e| Error::Config(e.to_string()))?;
    Ok(psi(r, &p))
}

/// Adaptive-rate bound on `E[(F(avg x_T) - F*)^{1-alpha}]` for an
/// `L`-smooth objective with gradient-noise variance at most `sigma^2`.
pub fn theorem_f_bound(t: u64, alpha: f64, g: f64, sigma: f64, l: f64, phi_inf: f64) -> Result<f64> {
    alpha_ok(alpha)?;
    let tf = horizon_ok(t)?;
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::Config(format!("G must be positive, got {g}")));
    }
    nonneg("sigma", sigma)?;
    nonneg("L", l)?;
    if !phi_inf.is_finite() {
        return Err(Error::Config("phi_inf must be finite".into()));
    }
    let a = alpha;
    let one_phi = 1.0 + phi_inf;
    let noise = 2.0 * g * g + 2.0 * (tf - 1.0) * sigma * sigma;
    let first = 2f64.powf(a)
        * g.powf((1.0 - 2.0 * a) * (1.0 - a))
        * one_phi.powf(1.0 - a)
        * noise.powf(a * (1.0 - a));
    let second = g.powf(1.0 - 2.0 * a) * 2f64.powf(a / (1.0 - a)) * one_phi * (4.0 * l).powf(a);
    Ok(first.max(second) / tf.powf(1.0 - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed independently with mpmath at 30 digits.
    const T2_FIXTURE: f64 = 37.944_234_561_801_87;
    const T3_FIXTURE: f64 = 2_909.134_095_839_75;

    #[test]
    fn theorem2_examples() {
        assert_eq!(theorem2_bound(1, 0.75, 1.0, 0.0).unwrap(), 1.0);
        let s = 7f64.sqrt();
        let hand = (1.0 + s * 5.0 * (2.0 * 11f64.ln() + 9.0 * s)) / 10.0;
        let v = theorem2_bound(10_000, 0.75, 1.0, 5.0).unwrap();
        assert!((v - hand).abs() < 1e-12 * hand);
        assert!((v - T2_FIXTURE).abs() < 1e-10 * T2_FIXTURE, "{v}");
        let v2 = theorem2_bound(10_000, 0.75, 2.0, 5.0).unwrap();
        assert!((v2 - 2.0 * v).abs() < 1e-12 * v2);
    }

    #[test]
    fn theorem3_examples() {
        let s = 7f64.sqrt();
        let lead = 2.0 + 1.0 / (E * 0.5);
        let want = lead * (s.exp() + 12.0 * (s + 2.0));
        assert!((theorem3_bound(1, 0.75, 1.0, 0.0).unwrap() - want).abs() < 1e-12 * want);
        let v = theorem3_bound(10_000, 0.75, 1.0, 5.0).unwrap();
        assert!((v - T3_FIXTURE).abs() < 1e-10 * T3_FIXTURE, "{v}");
        for t in [1u64, 10, 1000, 1_000_000] {
            for a in [0.55, 0.6, 0.75, 0.9, 0.99] {
                for r in [0.0, 0.1, 1.0, 10.0, 100.0] {
                    for g in [0.1, 1.0, 3.0] {
                        assert!(theorem3_bound(t, a, g, r).unwrap() >= theorem2_bound(t, a, g, r).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_range_is_a_config_error() {
        for a in [0.5, 1.0, 0.2, f64::NAN] {
            assert!(matches!(theorem2_bound(10, a, 1.0, 1.0), Err(Error::Config(_))));
            assert!(matches!(theorem3_bound(10, a, 1.0, 1.0), Err(Error::Config(_))));
            assert!(matches!(theorem_f_bound(10, a, 1.0, 0.0, 1.0, 0.0), Err(Error::Config(_))));
        }
    }

    #[test]
    fn theorem_f_examples() {
        let (a, g, l, ph): (f64, f64, f64, f64) = (0.75, 1.0, 2.0, 3.0);
        let first = 2f64.powf(a) * (1.0 + ph).powf(1.0 - a) * 2f64.powf(a * (1.0 - a));
        let second = 2f64.powf(a / (1.0 - a)) * (1.0 + ph) * 8f64.powf(a);
        let v = theorem_f_bound(1, a, g, 0.0, l, ph).unwrap();
        assert!((v - first.max(second)).abs() < 1e-12 * v);
        for a in [0.6, 0.75, 0.9] {
            for sigma in [0.0, 0.5, 2.0] {
                let mut prev = f64::INFINITY;
                for t in [1u64, 2, 10, 100, 10_000, 1_000_000] {
                    let v = theorem_f_bound(t, a, 1.5, sigma, 1.0, 4.0).unwrap();
                    assert!(v <= prev * (1.0 + 1e-12));
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn trace_bounds_and_phi_inf() {
        assert!((power_s_bound(0.75).unwrap() - 7f64.sqrt()).abs() < 1e-15);
        assert!((power_q_bound(0.75).unwrap() - 7f64.ln()).abs() < 1e-15);
        assert!((adaptive_s_bound(0.75).unwrap() - 6f64.sqrt()).abs() < 1e-15);
        let p = RegularizerParams::from_s2(6.0, 6f64.ln()).unwrap();
        assert_eq!(phi_inf_worst(5.0, 0.75).unwrap(), psi(5.0, &p));
        assert!(phi_inf_worst(0.0, 0.75).unwrap() < 0.0);
    }
}
