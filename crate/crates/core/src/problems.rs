//! Test objectives with known minimizers and bounded stochastic gradients.
//!
//! Every registered objective is globally Lipschitz, and noise is drawn
//! uniformly from a ball of radius `sigma`, so `G = sup ||grad F|| + sigma`
//! bounds every stochastic gradient surely and no clipping is needed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::vector::{norm_sq, sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// `sqrt(1 + ||x - x*||^2) - 1`
    PseudoHuber,
    /// `ln(1 + ||x - x*||^2)`: not convex, but variationally coherent.
    LogCoherent,
    /// `sum_i huber(x_i - x*_i)` with unit slope and knee at 1.
    SmoothedLinear,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] =
        [ProblemKind::PseudoHuber, ProblemKind::LogCoherent, ProblemKind::SmoothedLinear];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PseudoHuber => "pseudo_huber",
            ProblemKind::LogCoherent => "log_coherent",
            ProblemKind::SmoothedLinear => "smoothed_linear",
        }
    }

    pub fn class(self) -> FunctionClass {
        match self {
            ProblemKind::LogCoherent => FunctionClass::VariationallyCoherent,
            _ => FunctionClass::Convex,
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown problem `{s}` (expected pseudo_huber|log_coherent|smoothed_linear)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionClass {
    Convex,
    VariationallyCoherent,
}

/// Zero-mean noise uniform on the closed ball of radius `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Config(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    /// Draws one noise vector. Always consumes `2 * ceil(dim / 2) + 1`
    /// uniforms, so a generator positioned per step stays aligned.
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        let mut z = Vec::with_capacity(dim + 1);
        while z.len() < dim {
            // Box-Muller on (0, 1] x [0, 1)
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random::<f64>();
            let r = (-2.0 * u1.ln()).sqrt();
            let a = std::f64::consts::TAU * u2;
            z.push(r * a.cos());
            z.push(r * a.sin());
        }
        z.truncate(dim);
        let u: f64 = rng.random::<f64>();
        if self.sigma == 0.0 {
            return vec![0.0; dim];
        }
        let n = norm_sq(&z).sqrt();
        if n == 0.0 {
            return vec![0.0; dim];
        }
        let radius = self.sigma * u.powf(1.0 / dim as f64);
        z.iter().map(|v| v * radius / n).collect()
    }
}

/// An objective with its gradient, minimizer and gradient bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    kind: ProblemKind,
    x_star: Vec<f64>,
    noise: NoiseModel,
    grad_sup: f64,
}

/// Builds a registered problem by name.
pub fn make_problem(name: &str, dim: usize, x_star: Vec<f64>, sigma: f64) -> Result<Problem> {
    let kind: ProblemKind = name.parse()?;
    Problem::new(kind, dim, x_star, sigma)
}

impl Problem {
    pub fn new(kind: ProblemKind, dim: usize, x_star: Vec<f64>, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if x_star.len() != dim {
            return Err(Error::Config(format!(
                "minimizer has dimension {}, expected {dim}",
                x_star.len()
            )));
        }
        if x_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("minimizer must be finite".into()));
        }
        let noise = NoiseModel::new(sigma)?;
        let grad_sup = match kind {
            ProblemKind::PseudoHuber | ProblemKind::LogCoherent => 1.0,
            ProblemKind::SmoothedLinear => (dim as f64).sqrt(),
        };
        Ok(Self { kind, x_star, noise, grad_sup })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.x_star.len()
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.x_star
    }

    pub fn optimum(&self) -> f64 {
        0.0
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn sigma(&self) -> f64 {
        self.noise.sigma
    }

    /// Supremum of `||grad F||` over the whole space.
    pub fn grad_sup(&self) -> f64 {
        self.grad_sup
    }

    /// Bound `G` on every stochastic gradient.
    pub fn g_bound(&self) -> f64 {
        self.grad_sup + self.noise.sigma
    }

    /// Lipschitz constant of the gradient.
    pub fn smoothness(&self) -> f64 {
        match self.kind {
            ProblemKind::PseudoHuber | ProblemKind::SmoothedLinear => 1.0,
            ProblemKind::LogCoherent => 2.0,
        }
    }

    pub fn class(&self) -> FunctionClass {
        self.kind.class()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let d = sub(x, &self.x_star);
        match self.kind {
            ProblemKind::PseudoHuber => {
                let r2 = norm_sq(&d);
                // sqrt(1 + r2) - 1 without cancellation near the minimizer
                r2 / ((1.0 + r2).sqrt() + 1.0)
            }
            ProblemKind::LogCoherent => norm_sq(&d).ln_1p(),
            ProblemKind::SmoothedLinear => d.iter().map(|&z| huber(z)).sum(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = sub(x, &self.x_star);
        match self.kind {
            ProblemKind::PseudoHuber => {
                let c = 1.0 / (1.0 + norm_sq(&d)).sqrt();
                d.iter().map(|v| c * v).collect()
            }
            ProblemKind::LogCoherent => {
                let c = 2.0 / (1.0 + norm_sq(&d));
                d.iter().map(|v| c * v).collect()
            }
            ProblemKind::SmoothedLinear => d.iter().map(|v| v.clamp(-1.0, 1.0)).collect(),
        }
    }

    /// Suboptimality `F(x) - F(x*)`.
    pub fn gap(&self, x: &[f64]) -> f64 {
        self.objective(x) - self.optimum()
    }

    /// One stochastic gradient `grad F(x) + xi`, `xi` uniform on the sigma-ball.
    pub fn sample_gradient<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Vec<f64> {
        let mut g = self.gradient(x);
        let xi = self.noise.sample(self.dim(), rng);
        for (gi, e) in g.iter_mut().zip(xi) {
            *gi += e;
        }
        g
    }
}

fn huber(z: f64) -> f64 {
    let a = z.abs();
    if a <= 1.0 {
        0.5 * z * z
    } else {
        a - 0.5
    }
}
