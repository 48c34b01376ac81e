//! FTRL with rescaled gradients.
//!
//! [`OptimizerState`] is the closed-form optimizer: it keeps the running sum
//! of negative rescaled gradients `theta`, the accumulated `S^2` and `Q`, and
//! outputs `x0 + grad phi_star(theta)`. [`ftrl_generic_step`] is the same loop
//! for an arbitrary [`GenericRegularizer`].

use crate::error::{Error, Result};
use crate::regularizer::{self, RegularizerParams, MAX_S2};
use crate::vector::{add, norm_sq, scale, sub};

/// Initial value of `S^2`.
pub const INITIAL_S2: f64 = 4.0;

/// How `Q` grows after each step.
///
/// `Squared` adds `||l_t||^2 / S_t^2`, which is what the regret analysis
/// needs. `Printed` adds `||l_t||^2 / S_t` and exists only so the checkers
/// can demonstrate that it breaks the per-step inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QUpdate {
    #[default]
    Squared,
    Printed,
}

impl QUpdate {
    pub fn increment(self, ell_sq: f64, s2_new: f64) -> f64 {
        match self {
            QUpdate::Squared => ell_sq / s2_new,
            QUpdate::Printed => ell_sq / s2_new.sqrt(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QUpdate::Squared => "squared",
            QUpdate::Printed => "printed",
        }
    }
}

impl std::str::FromStr for QUpdate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(QUpdate::Squared),
            "printed" => Ok(QUpdate::Printed),
            other => Err(Error::Config(format!(
                "unknown q-update rule `{other}` (expected squared|printed)"
            ))),
        }
    }
}

/// Full state of the linearithmic optimizer after `t` steps.
///
/// Invariants: `s2 = 4 + sum ||l_i||^2`, `q = sum ||l_i||^2 / S_i^2` and
/// `theta = -sum l_i`, all over the steps taken so far.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    x0: Vec<f64>,
    theta: Vec<f64>,
    s2: f64,
    q: f64,
    t: u64,
    q_update: QUpdate,
}

impl OptimizerState {
    pub fn new(x0: Vec<f64>) -> Self {
        let d = x0.len();
        Self {
            x0,
            theta: vec![0.0; d],
            s2: INITIAL_S2,
            q: 0.0,
            t: 0,
            q_update: QUpdate::Squared,
        }
    }

    pub fn with_q_update(mut self, rule: QUpdate) -> Self {
        self.q_update = rule;
        self
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn q_update(&self) -> QUpdate {
        self.q_update
    }

    /// Parameters of the regularizer used for the next prediction.
    pub fn params(&self) -> RegularizerParams {
        // s2 in [4, MAX_S2] and q >= 0 are maintained by `step`.
        RegularizerParams::from_s2(self.s2, self.q).expect("optimizer state keeps valid params")
    }

    /// The prediction `x_{t+1} = x0 + grad phi_star(theta_t)`.
    pub fn next_iterate(&self) -> Vec<f64> {
        add(&self.x0, &regularizer::grad_phi_star(&self.theta, &self.params()))
    }

    /// Feeds the gradient `g` observed at the last prediction, rescaled by `eta`.
    ///
    /// Rejects steps with `||eta g|| > 1`; the per-step inequality behind all
    /// the guarantees requires `||l_t|| <= 1`.
    pub fn step(&self, g: &[f64], eta: f64) -> Result<Self> {
        if g.len() != self.dim() {
            return Err(Error::Contract(format!(
                "gradient has dimension {}, state has {}",
                g.len(),
                self.dim()
            )));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Contract(format!("learning rate must be finite and >= 0, got {eta}")));
        }
        let ell = scale(g, eta);
        let ell_sq = norm_sq(&ell);
        if !ell_sq.is_finite() {
            return Err(Error::Contract("non-finite rescaled gradient".into()));
        }
        if ell_sq > 1.0 {
            return Err(Error::Contract(format!(
                "rescaled gradient norm {} exceeds 1 (eta = {eta})",
                ell_sq.sqrt()
            )));
        }
        let s2 = self.s2 + ell_sq;
        if s2 > MAX_S2 {
            return Err(Error::Contract(format!("S^2 = {s2} leaves the supported range")));
        }
        Ok(Self {
            x0: self.x0.clone(),
            theta: sub(&self.theta, &ell),
            s2,
            q: self.q + self.q_update.increment(ell_sq, s2),
            t: self.t + 1,
            q_update: self.q_update,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `eta_t = 1 / (G t^alpha)`
    Power,
    /// `eta_t = G^{2 alpha - 1} / (2 G^2 + sum_{i<t} ||g_i||^2)^alpha`
    Adaptive,
}

impl ScheduleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleKind::Power => "power",
            ScheduleKind::Adaptive => "adaptive",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(ScheduleKind::Power),
            "adaptive" => Ok(ScheduleKind::Adaptive),
            other => Err(Error::Config(format!(
                "unknown schedule `{other}` (expected power|adaptive)"
            ))),
        }
    }
}

/// Learning-rate schedule with gradient bound `G` and exponent `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    kind: ScheduleKind,
    g: f64,
    alpha: f64,
}

impl Schedule {
    pub fn new(kind: ScheduleKind, g: f64, alpha: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::Config(format!("G must be positive, got {g}")));
        }
        check_alpha(alpha)?;
        Ok(Self { kind, g, alpha })
    }

    pub fn power(g: f64, alpha: f64) -> Result<Self> {
        Self::new(ScheduleKind::Power, g, alpha)
    }

    pub fn adaptive(g: f64, alpha: f64) -> Result<Self> {
        Self::new(ScheduleKind::Adaptive, g, alpha)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Learning rate for step `t >= 1`.
    ///
    /// `grad_norm_history` holds `||g_1||, ..., ||g_{t-1}||`. It is ignored by
    /// the power schedule and must have exactly `t - 1` entries for the
    /// adaptive one, so `eta_t` never sees `g_t`.
    pub fn lr(&self, t: u64, grad_norm_history: &[f64]) -> Result<f64> {
        if t == 0 {
            return Err(Error::Contract("learning rates are indexed from t = 1".into()));
        }
        match self.kind {
            ScheduleKind::Power => Ok(self.lr_with_sum(t, 0.0)),
            ScheduleKind::Adaptive => {
                if grad_norm_history.len() as u64 != t - 1 {
                    return Err(Error::Contract(format!(
                        "adaptive rate at t = {t} needs {} past gradient norms, got {}",
                        t - 1,
                        grad_norm_history.len()
                    )));
                }
                let sum_sq = grad_norm_history.iter().map(|n| n * n).sum();
                Ok(self.lr_with_sum(t, sum_sq))
            }
        }
    }

    /// Learning rate given `sum_{i<t} ||g_i||^2` directly.
    pub fn lr_with_sum(&self, t: u64, past_grad_sq_sum: f64) -> f64 {
        match self.kind {
            ScheduleKind::Power => 1.0 / (self.g * (t as f64).powf(self.alpha)),
            ScheduleKind::Adaptive => {
                self.g.powf(2.0 * self.alpha - 1.0)
                    / (2.0 * self.g * self.g + past_grad_sq_sum).powf(self.alpha)
            }
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.5 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("alpha must lie in (0.5, 1), got {alpha}")))
    }
}

/// A sequence of regularizers `phi_1, phi_2, ...` for generic FTRL.
///
/// Implementations hold the parameters of the current `phi_t` (centered
/// coordinates) and advance to `phi_{t+1}` in [`GenericRegularizer::update`].
pub trait GenericRegularizer {
    fn value(&self, x: &[f64]) -> f64;

    fn conjugate(&self, theta: &[f64]) -> f64;

    /// `grad phi_t^*`, the inverse of `grad phi_t`.
    fn grad_conjugate(&self, theta: &[f64]) -> Vec<f64>;

    fn update(&mut self, ell: &[f64]);
}

/// The linearithmic sequence `phi_t(x) = psi(||x||; S_{t-1}, Q_{t-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearithmic {
    s2: f64,
    q: f64,
    q_update: QUpdate,
}

impl Linearithmic {
    pub fn new() -> Self {
        Self { s2: INITIAL_S2, q: 0.0, q_update: QUpdate::Squared }
    }

    pub fn with_q_update(mut self, rule: QUpdate) -> Self {
        self.q_update = rule;
        self
    }

    pub fn params(&self) -> RegularizerParams {
        RegularizerParams::from_s2(self.s2, self.q).expect("valid linearithmic params")
    }
}

impl Default for Linearithmic {
    fn default() -> Self {
        Self::new()
    }
}

impl GenericRegularizer for Linearithmic {
    fn value(&self, x: &[f64]) -> f64 {
        regularizer::phi(x, &self.params())
    }

    fn conjugate(&self, theta: &[f64]) -> f64 {
        regularizer::phi_star(theta, &self.params())
    }

    fn grad_conjugate(&self, theta: &[f64]) -> Vec<f64> {
        regularizer::grad_phi_star(theta, &self.params())
    }

    fn update(&mut self, ell: &[f64]) {
        let ell_sq = norm_sq(ell);
        self.s2 += ell_sq;
        self.q += self.q_update.increment(ell_sq, self.s2);
    }
}

/// The fixed regularizer `||x||^2 / 2`; generic FTRL then reduces to SGD.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quadratic;

impl GenericRegularizer for Quadratic {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * norm_sq(x)
    }

    fn conjugate(&self, theta: &[f64]) -> f64 {
        0.5 * norm_sq(theta)
    }

    fn grad_conjugate(&self, theta: &[f64]) -> Vec<f64> {
        theta.to_vec()
    }

    fn update(&mut self, _ell: &[f64]) {}
}

/// One round of generic FTRL with rescaled gradients.
///
/// Returns the prediction `x0 + grad phi_t^*(theta)` made before `g` is seen,
/// and the updated `theta - eta g`. The regularizer is advanced to `phi_{t+1}`.
pub fn ftrl_generic_step<R: GenericRegularizer + ?Sized>(
    regularizer: &mut R,
    x0: &[f64],
    theta: &[f64],
    g: &[f64],
    eta: f64,
) -> (Vec<f64>, Vec<f64>) {
    let iterate = add(x0, &regularizer.grad_conjugate(theta));
    let ell = scale(g, eta);
    regularizer.update(&ell);
    (iterate, sub(theta, &ell))
}
