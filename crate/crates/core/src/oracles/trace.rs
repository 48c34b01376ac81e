use crate::error::{Error, Result};
use crate::ftrl::{OptimizerState, QUpdate, INITIAL_S2};
use crate::regularizer::{grad_phi_star, RegularizerParams};
use crate::vector::{add, norm_sq, scale, sub};

/// One optimizer step: the prediction `x` at which `g` was observed, the
/// rescaled gradient `ell = eta g`, and the state after the update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub eta: f64,
    pub ell: Vec<f64>,
    pub theta: Vec<f64>,
    pub s2: f64,
    pub q: f64,
}

/// A complete run `t = 1..=T` of the linearithmic optimizer.
///
/// `q_update` names the rule that produced the stored `Q` values; the
/// checkers always evaluate the regularizers of the analysis (squared rule)
/// so a doctored trace shows up as a violation instead of being excused.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceWindow {
    pub x0: Vec<f64>,
    pub q_update: QUpdate,
    pub records: Vec<StepRecord>,
    pub x_star: Option<Vec<f64>>,
    pub g_bound: Option<f64>,
    pub alpha: Option<f64>,
}

impl TraceWindow {
    pub fn new(x0: Vec<f64>, q_update: QUpdate) -> Self {
        Self { x0, q_update, records: Vec::new(), x_star: None, g_bound: None, alpha: None }
    }

    pub fn with_x_star(mut self, x_star: Vec<f64>) -> Self {
        self.x_star = Some(x_star);
        self
    }

    /// Builds a trace by feeding `(g_t, eta_t)` pairs to a fresh optimizer.
    pub fn from_steps<'a, I>(x0: Vec<f64>, q_update: QUpdate, steps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let mut state = OptimizerState::new(x0.clone()).with_q_update(q_update);
        let mut w = Self::new(x0, q_update);
        for (g, eta) in steps {
            let x = state.next_iterate();
            state = state.step(g, eta)?;
            w.push_state(x, g.to_vec(), eta, &state);
        }
        Ok(w)
    }

    /// Appends the step that produced `after` from the gradient `g` at `x`.
    pub fn push_state(&mut self, x: Vec<f64>, g: Vec<f64>, eta: f64, after: &OptimizerState) {
        let ell = scale(&g, eta);
        self.records.push(StepRecord {
            t: after.t(),
            x,
            g,
            eta,
            ell,
            theta: after.theta().to_vec(),
            s2: after.s2(),
            q: after.q(),
        });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// `(theta_t, S_t^2, Q_t)` as stored, with `t = 0` the initial state.
    pub fn stored_state(&self, t: usize) -> (&[f64], f64, f64) {
        if t == 0 {
            (&[], INITIAL_S2, 0.0)
        } else {
            let r = &self.records[t - 1];
            (&r.theta, r.s2, r.q)
        }
    }

    fn theta_at(&self, t: usize) -> Vec<f64> {
        if t == 0 {
            vec![0.0; self.dim()]
        } else {
            self.records[t - 1].theta.clone()
        }
    }

    /// Parameters of `phi_{t+1}` for `t = 0..=T`, recomputed with the
    /// squared rule from the stored rescaled gradients.
    pub fn canonical_params(&self) -> Vec<RegularizerParams> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let (mut s2, mut q) = (INITIAL_S2, 0.0);
        out.push(RegularizerParams::from_s2(s2, q).expect("initial params"));
        for r in &self.records {
            let l2 = norm_sq(&r.ell);
            s2 += l2;
            q += QUpdate::Squared.increment(l2, s2);
            out.push(RegularizerParams::from_s2(s2, q).expect("bounded by consistency"));
        }
        out
    }

    /// Predictions `x_1..=x_{T+1}` in centered coordinates (`x - x0`), taken
    /// straight from the dual state; the last one is what the optimizer would
    /// play after the final record.
    pub fn centered_iterates(&self) -> Vec<Vec<f64>> {
        (0..=self.len())
            .map(|t| {
                let (_, s2, q) = self.stored_state(t);
                let p = RegularizerParams::from_s2(s2, q).expect("bounded by consistency");
                grad_phi_star(&self.theta_at(t), &p)
            })
            .collect()
    }

    /// Checks that every record is exactly what the update equations produce
    /// from its predecessor.
    pub fn validate(&self) -> Result<()> {
        let bad = |t: u64, what: &str| Err(Error::Contract(format!("trace inconsistent at t={t}: {what}")));
        let d = self.dim();
        if let Some(xs) = &self.x_star {
            if xs.len() != d {
                return Err(Error::Contract("x_star dimension differs from x0".into()));
            }
        }
        for (i, r) in self.records.iter().enumerate() {
            let t = i as u64 + 1;
            if r.t != t {
                return bad(r.t, "records must be contiguous from t=1");
            }
            if r.x.len() != d || r.g.len() != d || r.ell.len() != d || r.theta.len() != d {
                return bad(t, "dimension mismatch");
            }
            let theta_prev = self.theta_at(i);
            let (_, s2_prev, q_prev) = self.stored_state(i);
            let p = RegularizerParams::from_s2(s2_prev, q_prev)
                .map_err(|e| Error::Contract(format!("trace inconsistent at t={t}: {e}")))?;
            if r.x != add(&self.x0, &grad_phi_star(&theta_prev, &p)) {
                return bad(t, "x_t is not x0 + grad phi_star(theta_{t-1})");
            }
            if r.ell != scale(&r.g, r.eta) {
                return bad(t, "ell_t != eta_t g_t");
            }
            let l2 = norm_sq(&r.ell);
            if l2 > 1.0 {
                return bad(t, "||ell_t|| > 1");
            }
            if r.theta != sub(&theta_prev, &r.ell) {
                return bad(t, "theta_t != theta_{t-1} - ell_t");
            }
            if r.s2 != s2_prev + l2 {
                return bad(t, "S_t^2 != S_{t-1}^2 + ||ell_t||^2");
            }
            if r.q != q_prev + self.q_update.increment(l2, r.s2) {
                return bad(t, "Q_t does not follow the declared update rule");
            }
        }
        Ok(())
    }
}
