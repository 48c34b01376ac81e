//! Plain SGD sharing the problems and schedules of the main optimizer.

use crate::vector::norm;

#[derive(Debug, Clone, PartialEq)]
pub struct SgdState {
    x: Vec<f64>,
    t: u64,
}

impl SgdState {
    pub fn new(x0: Vec<f64>) -> Self {
        Self { x: x0, t: 0 }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn is_finite(&self) -> bool {
        norm(&self.x).is_finite()
    }
}

/// `x <- x - eta g`.
pub fn sgd_step(state: &SgdState, g: &[f64], eta: f64) -> SgdState {
    SgdState {
        x: state.x.iter().zip(g).map(|(x, gi)| x - eta * gi).collect(),
        t: state.t + 1,
    }
}
