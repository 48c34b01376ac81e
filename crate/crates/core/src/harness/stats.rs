use log::warn;

use crate::error::{Error, Result};

/// Mean, median and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation over `sqrt(n)`; zero for a single value.
    pub stderr: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract("statistics of an empty sample".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 { sorted[m] } else { 0.5 * (sorted[m - 1] + sorted[m]) };
        let stderr = if values.len() < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        Ok(Self { mean, median, stderr })
    }
}

/// Least-squares slope of `ln gap` against `ln T`.
///
/// Points with a non-positive gap are dropped with a warning; at least
/// three must remain.
pub fn rate_slope(points: &[(f64, f64)]) -> Result<f64> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(t, g)| {
            let ok = t > 0.0 && g > 0.0 && g.is_finite();
            if !ok {
                warn!("rate_slope: dropping point (T={t}, gap={g})");
            }
            ok
        })
        .map(|&(t, g)| (t.ln(), g.ln()))
        .collect();
    if kept.len() < 3 {
        return Err(Error::Contract(format!("rate_slope needs >= 3 positive points, got {}", kept.len())));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Contract("rate_slope needs distinct horizons".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_basics() {
        let s = Stats::of(&[3.0]).unwrap();
        assert_eq!((s.mean, s.median, s.stderr), (3.0, 3.0, 0.0));
        let s = Stats::of(&[1.0, 2.0, 3.0, 10.0]).unwrap();
        assert_eq!(s.mean, 4.0);
        assert_eq!(s.median, 2.5);
        // sample variance 50/3, n = 4
        assert!((s.stderr - (50.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let s = Stats::of(&[2.0; 7]).unwrap();
        assert_eq!(s.stderr, 0.0);
        assert!(Stats::of(&[]).is_err());
    }

    #[test]
    fn exact_power_laws() {
        for p in [0.25f64, 0.4] {
            let pts: Vec<(f64, f64)> = [1e2f64, 1e3, 1e4, 1e5].iter().map(|&t| (t, 3.0 * t.powf(-p))).collect();
            assert!((rate_slope(&pts).unwrap() + p).abs() < 1e-12);
        }
    }

    #[test]
    fn nonpositive_points_are_dropped() {
        let pts = [(1e2, 1e-1), (1e3, 0.0), (1e4, 1e-2), (1e5, -1.0), (1e6, 1e-3)];
        assert!((rate_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
        assert!(rate_slope(&pts[..3]).is_err());
    }
}
