use super::CheckReport;
use crate::error::{Error, Result};
use std::f64::consts::E;

/// `sum_{k=1}^{T-1} 1/(k(k+1)) sum_{t=T-k}^{T} t^{-2 alpha}`, in O(T).
pub fn sum_k_value(t_max: u64, alpha: f64) -> f64 {
    let tf = t_max as f64;
    let mut inner = tf.powf(-2.0 * alpha);
    let mut total = 0.0;
    for k in 1..t_max {
        inner += ((t_max - k) as f64).powf(-2.0 * alpha);
        let kf = k as f64;
        total += inner / (kf * (kf + 1.0));
    }
    total
}

/// `1/T + T^{-2 alpha} + 1/(e (2 alpha - 1) T)`.
pub fn sum_k_bound(t_max: u64, alpha: f64) -> f64 {
    let tf = t_max as f64;
    1.0 / tf + tf.powf(-2.0 * alpha) + 1.0 / (E * (2.0 * alpha - 1.0) * tf)
}

pub fn check_sum_k(t_max: u64, alpha: f64) -> Result<CheckReport> {
    if t_max < 2 || !(alpha > 0.5 && alpha.is_finite()) {
        return Err(Error::Contract(format!("need T >= 2 and alpha > 1/2, got T={t_max} alpha={alpha}")));
    }
    let (v, b) = (sum_k_value(t_max, alpha), sum_k_bound(t_max, alpha));
    let mut rep = CheckReport::new("sum_k", 0.0);
    rep.record(v - b, || format!("T={t_max} alpha={alpha} sum={v:.12e} bound={b:.12e}"));
    Ok(rep)
}

/// Last-iterate-to-average inequality for a non-increasing non-negative
/// `etas` and non-negative `qs`:
/// `eta_T q_T <= (1/T) sum eta_t q_t + sum_{k=1}^{T-1} 1/(k(k+1)) sum_{t=T-k}^T eta_t (q_t - q_{T-k})`.
pub fn check_last_average(etas: &[f64], qs: &[f64]) -> Result<CheckReport> {
    if etas.len() != qs.len() {
        return Err(Error::Contract(format!("length mismatch: {} etas, {} qs", etas.len(), qs.len())));
    }
    if etas.is_empty() {
        return Err(Error::Contract("empty sequences".into()));
    }
    if etas.iter().chain(qs).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Contract("sequences must be finite and non-negative".into()));
    }
    if etas.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Contract("etas must be non-increasing".into()));
    }
    let n = etas.len();
    let lhs = etas[n - 1] * qs[n - 1];
    let avg = etas.iter().zip(qs).map(|(e, q)| e * q).sum::<f64>() / n as f64;
    let mut corr = 0.0;
    for k in 1..n {
        // 1-based start index T-k is 0-based n-1-k
        let start = n - 1 - k;
        let base = qs[start];
        let inner: f64 = (start..n).map(|i| etas[i] * (qs[i] - base)).sum();
        let kf = k as f64;
        corr += inner / (kf * (kf + 1.0));
    }
    let rhs = avg + corr;
    let mut rep = CheckReport::new("last_average", 1e-10);
    rep.record(lhs - rhs, || format!("T={n} lhs={lhs:.12e} rhs={rhs:.12e}"));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sum_k_hand_example() {
        let v = sum_k_value(2, 0.75);
        assert!((v - 0.5 * (1.0 + 2f64.powf(-1.5))).abs() < 1e-15);
        assert!((v - 0.676_776_695_296_636_9).abs() < 1e-12);
        assert!((sum_k_bound(2, 0.75) - (0.5 + 2f64.powf(-1.5) + 1.0 / E)).abs() < 1e-15);
        assert!(check_sum_k(2, 0.75).unwrap().passed());
    }

    #[test]
    fn sum_k_matches_naive_double_sum() {
        for (t, a) in [(7u64, 0.6), (30, 0.9)] {
            let mut naive = 0.0;
            for k in 1..t {
                let inner: f64 = (t - k..=t).map(|s| (s as f64).powf(-2.0 * a)).sum();
                naive += inner / (k * (k + 1)) as f64;
            }
            assert!((naive - sum_k_value(t, a)).abs() < 1e-13);
        }
    }

    #[test]
    fn sum_k_grid_and_large_alpha() {
        for a in [0.55, 0.6, 0.75, 0.9] {
            for t in 2..=2000 {
                assert!(check_sum_k(t, a).unwrap().passed(), "T={t} a={a}");
            }
        }
        assert!(check_sum_k(100, 5.0).unwrap().passed());
        assert!(check_sum_k(1, 0.75).is_err());
        assert!(check_sum_k(10, 0.5).is_err());
    }

    #[test]
    fn last_average_cases() {
        let r = check_last_average(&[0.3; 50], &[2.0; 50]).unwrap();
        assert!(r.max_violation.abs() < 1e-14);
        let mut qs = vec![1.0; 20];
        qs[19] = 0.0;
        assert!(check_last_average(&[1.0; 20], &qs).unwrap().passed());
        assert!(check_last_average(&[1.0; 3], &[1.0; 2]).is_err());
        assert!(check_last_average(&[1.0, 2.0], &[1.0; 2]).is_err());
    }

    #[test]
    fn last_average_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let n = rng.random_range(1..=200);
            let mut etas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            etas.sort_by(|a, b| b.total_cmp(a));
            let qs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let rep = check_last_average(&etas, &qs).unwrap();
            assert!(rep.passed(), "{rep}");
        }
    }
}
