//! Generic FTRL with rescaled gradients: the same loop driven by different
//! regularizer sequences, including one defined here.

use cohere_opt::ftrl::{ftrl_generic_step, GenericRegularizer, Linearithmic, Quadratic};
use cohere_opt::vector::{norm, norm_sq};

/// `phi_t(x) = ||x||^2 / (2 c_t)` with `c_t = sqrt(1 + sum ||l||^2)`: an
/// AdaGrad-norm style quadratic.
struct AdaptiveQuadratic {
    c: f64,
    sum: f64,
}

impl GenericRegularizer for AdaptiveQuadratic {
    fn value(&self, x: &[f64]) -> f64 {
        norm_sq(x) / (2.0 * self.c)
    }

    fn conjugate(&self, theta: &[f64]) -> f64 {
        self.c * norm_sq(theta) / 2.0
    }

    fn grad_conjugate(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|t| t * self.c).collect()
    }

    fn update(&mut self, ell: &[f64]) {
        self.sum += norm_sq(ell);
        self.c = (1.0 + self.sum).sqrt();
    }
}

fn run(name: &str, reg: &mut dyn GenericRegularizer) {
    // linear losses pulling towards x = (30, -30): g = sign(x - target)
    let target = [30.0f64, -30.0];
    let x0 = [0.0, 0.0];
    let mut theta = vec![0.0, 0.0];
    let mut x = x0.to_vec();
    for t in 1..=5000u64 {
        let g: Vec<f64> = x.iter().zip(&target).map(|(a, b)| 0.5 * (a - b).signum()).collect();
        let (xt, th) = ftrl_generic_step(reg, &x0, &theta, &g, 1.0 / (t as f64).powf(0.6));
        x = xt;
        theta = th;
    }
    let d: Vec<f64> = x.iter().zip(&target).map(|(a, b)| a - b).collect();
    println!("{name:<20} x_T = ({:>8.3}, {:>8.3})  |x_T - target| = {:.3}", x[0], x[1], norm(&d));
}

fn main() {
    run("quadratic (SGD)", &mut Quadratic);
    run("adaptive quadratic", &mut AdaptiveQuadratic { c: 1.0, sum: 0.0 });
    run("linearithmic", &mut Linearithmic::new());
}
