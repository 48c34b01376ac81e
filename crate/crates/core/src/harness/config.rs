use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ftrl::{check_alpha, QUpdate, Schedule, ScheduleKind};
use crate::problems::{Problem, ProblemKind};

/// Which steps produce CSV rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stride {
    /// Powers of two, plus the final step.
    #[default]
    Geometric,
    /// Every `n`-th step, plus the final step.
    Every(u64),
}

impl Stride {
    pub fn records(self, t: u64, horizon: u64) -> bool {
        t == horizon
            || match self {
                Stride::Geometric => t.is_power_of_two(),
                Stride::Every(n) => t.is_multiple_of(n),
            }
    }
}

impl fmt::Display for Stride {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stride::Geometric => f.write_str("geometric"),
            Stride::Every(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Stride {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "geometric" {
            return Ok(Stride::Geometric);
        }
        match s.parse::<u64>() {
            Ok(n) if n >= 1 => Ok(Stride::Every(n)),
            _ => Err(Error::Config(format!("stride must be `geometric` or a positive integer, got `{s}`"))),
        }
    }
}

/// Checks evaluated inline while a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checks {
    /// Abort the run when a key-inequality term exceeds the tolerance.
    pub key_inequality: bool,
    /// Count steps where `S_t` or `Q_t` leave their schedule's bounds.
    pub trace_bounds: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self { key_inequality: true, trace_bounds: true }
    }
}

impl fmt::Display for Checks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.key_inequality {
            names.push("key_inequality");
        }
        if self.trace_bounds {
            names.push("trace_bounds");
        }
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

impl FromStr for Checks {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Checks { key_inequality: false, trace_bounds: false };
        if s == "none" {
            return Ok(c);
        }
        for part in s.split(',').map(str::trim) {
            match part {
                "key_inequality" => c.key_inequality = true,
                "trace_bounds" => c.trace_bounds = true,
                other => return Err(Error::Config(format!("unknown check `{other}`"))),
            }
        }
        Ok(c)
    }
}

/// Parses `a..b` (inclusive), a single integer, or a comma list of either.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad seed list `{s}` (expected e.g. 1..100 or 1,2,5)"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

/// Inverse of [`parse_seeds`], collapsing consecutive runs into `a..b`.
pub fn format_seeds(seeds: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < seeds.len() {
        let mut j = i;
        while j + 1 < seeds.len() && seeds[j + 1] == seeds[j] + 1 {
            j += 1;
        }
        parts.push(if j > i { format!("{}..{}", seeds[i], seeds[j]) } else { seeds[i].to_string() });
        i = j + 1;
    }
    parts.join(",")
}

/// One experiment: a problem, a schedule, a horizon and a set of seeds.
///
/// The start point is the origin and the minimizer sits at distance `r`
/// along the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub problem: ProblemKind,
    pub dim: usize,
    pub r: f64,
    pub schedule: ScheduleKind,
    /// Gradient bound fed to the schedule; defaults to the problem's bound.
    pub g: Option<f64>,
    pub alpha: f64,
    pub sigma: f64,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub stride: Stride,
    pub checks: Checks,
    pub q_update: QUpdate,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, dim: usize, r: f64, alpha: f64, sigma: f64, horizon: u64) -> Self {
        Self {
            experiment_id: "exp".into(),
            problem,
            dim,
            r,
            schedule: ScheduleKind::Power,
            g: None,
            alpha,
            sigma,
            horizon,
            seeds: vec![1],
            stride: Stride::Geometric,
            checks: Checks::default(),
            q_update: QUpdate::Squared,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha).map_err(|e| Error::Config(e.to_string()))?;
        if self.horizon < 1 {
            return Err(Error::Config("T must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return Err(Error::Config("seeds must be distinct".into()));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::Config(format!("r must be finite and >= 0, got {}", self.r)));
        }
        if self.experiment_id.is_empty() || self.experiment_id.contains([',', '\n', '"']) {
            return Err(Error::Config("experiment_id must be non-empty without commas or quotes".into()));
        }
        if let Some(g) = self.g {
            if g < self.problem()?.g_bound() {
                return Err(Error::Config(format!(
                    "G = {g} is below the problem's gradient bound {}",
                    self.problem()?.g_bound()
                )));
            }
        }
        self.schedule()?;
        Ok(())
    }

    pub fn x0(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    pub fn x_star(&self) -> Vec<f64> {
        let c = self.r / (self.dim as f64).sqrt();
        vec![c; self.dim]
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::new(self.problem, self.dim, self.x_star(), self.sigma)
    }

    pub fn g_bound(&self) -> Result<f64> {
        match self.g {
            Some(g) => Ok(g),
            None => Ok(self.problem()?.g_bound()),
        }
    }

    pub fn schedule(&self) -> Result<Schedule> {
        Schedule::new(self.schedule, self.g_bound()?, self.alpha)
    }

    /// Everything except the seeds; summaries with equal keys can be pooled.
    pub fn key(&self) -> String {
        let mut c = self.clone();
        c.seeds.clear();
        c.to_kv().replace('\n', ";")
    }

    /// Serializes to the `key=value` file format, one pair per line.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        put("experiment_id", self.experiment_id.clone());
        put("problem", self.problem.name().into());
        put("dim", self.dim.to_string());
        put("r", self.r.to_string());
        put("schedule", self.schedule.as_str().into());
        put("G", self.g.map_or_else(|| "auto".into(), |g| g.to_string()));
        put("alpha", self.alpha.to_string());
        put("sigma", self.sigma.to_string());
        put("T", self.horizon.to_string());
        put("seeds", format_seeds(&self.seeds));
        put("stride", self.stride.to_string());
        put("checks", self.checks.to_string());
        put("q_update", self.q_update.as_str().into());
        s
    }

    /// Applies `key=value` pairs on top of `self`. Unknown keys are errors.
    pub fn apply_kv(&mut self, pairs: &BTreeMap<String, String>) -> Result<()> {
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("bad value for {k}: `{v}`")))
        }
        for (k, v) in pairs {
            let v = v.as_str();
            match k.as_str() {
                "experiment_id" => self.experiment_id = v.to_string(),
                "problem" => self.problem = v.parse()?,
                "dim" => self.dim = num(k, v)?,
                "r" => self.r = num(k, v)?,
                "schedule" => self.schedule = v.parse()?,
                "G" => self.g = if v == "auto" { None } else { Some(num(k, v)?) },
                "alpha" => self.alpha = num(k, v)?,
                "sigma" => self.sigma = num(k, v)?,
                "T" => self.horizon = num(k, v)?,
                "seeds" => self.seeds = parse_seeds(v)?,
                "stride" => self.stride = v.parse()?,
                "checks" => self.checks = v.parse()?,
                "q_update" => self.q_update = v.parse()?,
                other => return Err(Error::Config(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }
}

/// Parses the `key=value` format. Blank lines and `#` comments are skipped;
/// repeated keys are errors.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value", i + 1)))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{}`", i + 1, k.trim())));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse_and_format() {
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1..2,5,9..10").unwrap(), vec![1, 2, 5, 9, 10]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("x").is_err());
        assert_eq!(format_seeds(&[1, 2, 5, 9, 10]), "1..2,5,9..10");
    }

    #[test]
    fn kv_round_trip_is_identity() {
        let mut c = ExperimentConfig::new(ProblemKind::LogCoherent, 3, 2.5, 0.6, 0.1, 500);
        c.seeds = vec![3, 4, 5, 8];
        c.g = Some(2.0);
        c.stride = Stride::Every(10);
        c.checks = Checks { key_inequality: false, trace_bounds: true };
        c.q_update = QUpdate::Printed;
        c.schedule = ScheduleKind::Adaptive;
        let text = c.to_kv();
        let mut d = ExperimentConfig::new(ProblemKind::PseudoHuber, 1, 0.0, 0.75, 0.0, 1);
        d.apply_kv(&parse_kv(&text).unwrap()).unwrap();
        assert_eq!(c, d);
        assert_eq!(d.to_kv(), text);
    }

    #[test]
    fn unknown_and_duplicate_keys_fail() {
        let mut c = ExperimentConfig::new(ProblemKind::PseudoHuber, 1, 0.0, 0.75, 0.0, 1);
        assert!(c.apply_kv(&parse_kv("bogus=1").unwrap()).is_err());
        assert!(parse_kv("T=1\nT=2").is_err());
        assert!(parse_kv("novalue").is_err());
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::new(ProblemKind::PseudoHuber, 2, 1.0, 0.75, 0.1, 10);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.alpha = 0.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ok.clone();
        c.seeds = vec![1, 1];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.horizon = 0;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.g = Some(0.5);
        assert!(c.validate().is_err());
    }

    #[test]
    fn minimizer_at_distance_r() {
        let c = ExperimentConfig::new(ProblemKind::PseudoHuber, 5, 5.0, 0.75, 0.5, 10);
        let n: f64 = c.x_star().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n - 5.0).abs() < 1e-14);
    }

    #[test]
    fn stride_rows() {
        let rows: Vec<u64> = (1..=10).filter(|&t| Stride::Geometric.records(t, 10)).collect();
        assert_eq!(rows, vec![1, 2, 4, 8, 10]);
        let rows: Vec<u64> = (1..=10).filter(|&t| Stride::Every(3).records(t, 10)).collect();
        assert_eq!(rows, vec![3, 6, 9, 10]);
    }
}
