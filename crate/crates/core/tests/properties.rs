use cohere_opt::ftrl::{ftrl_generic_step, Linearithmic, OptimizerState, QUpdate};
use cohere_opt::oracles::{
    check_diff_regularizers, check_iterate_bound, check_key_inequality, check_partial_regret,
    check_regret_identity, TraceWindow,
};
use cohere_opt::regularizer::{psi, psi_prime, psi_star, psi_star_prime, RegularizerParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = RegularizerParams> {
    (1.0f64..3.0, 0.0f64..1.0).prop_map(|(s, frac)| {
        let q = frac * 2.0 * s.ln().max(0.25);
        RegularizerParams::new(s, q).unwrap()
    })
}

fn signed_mag() -> impl Strategy<Value = f64> {
    (-4.0f64..3.0, any::<bool>()).prop_map(|(e, neg)| if neg { -(10f64.powf(e)) } else { 10f64.powf(e) })
}

/// Up to 60 steps of rescaled gradients with `||l|| <= 1`, including unit norms.
fn losses(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        (prop::collection::vec(-1.0f64..1.0, d), 0.0f64..=1.0, any::<bool>()).prop_map(|(v, r, unit)| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                return v;
            }
            let target = if unit { 1.0 } else { r };
            v.iter().map(|x| x / n * target * (1.0 - 1e-15)).collect()
        }),
        0..60,
    )
}

fn trace(x0: Vec<f64>, ls: &[Vec<f64>]) -> TraceWindow {
    TraceWindow::from_steps(x0, QUpdate::Squared, ls.iter().map(|l| (l.as_slice(), 1.0))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derivative_maps_are_inverse(p in params(), x in signed_mag()) {
        let back = psi_star_prime(psi_prime(x, &p), &p);
        prop_assert!((back - x).abs() <= 1e-9 * x.abs());
    }

    #[test]
    fn psi_prime_is_odd_and_increasing(p in params(), x in signed_mag(), f in 1.001f64..3.0) {
        prop_assert_eq!(psi_prime(-x, &p), -psi_prime(x, &p));
        prop_assert!(psi_prime(x.abs() * f, &p) > psi_prime(x.abs(), &p));
    }

    #[test]
    fn fenchel_young(p in params(), x in signed_mag(), th in -50.0f64..50.0) {
        let gap = psi(x, &p) + psi_star(th, &p) - th * x;
        prop_assert!(gap >= -1e-9 * (1.0 + (th * x).abs()));
        let tight = psi_prime(x, &p);
        let eq = psi(x, &p) + psi_star(tight, &p) - tight * x;
        prop_assert!(eq.abs() <= 1e-9 * (1.0 + (tight * x).abs()));
    }

    #[test]
    fn adversarial_losses_keep_every_lemma(ls in losses(2), x0 in prop::collection::vec(-5.0f64..5.0, 2)) {
        let w = trace(x0.clone(), &ls).with_x_star(vec![x0[0] + 3.0, x0[1] - 1.0]);
        prop_assert!(check_key_inequality(&w).unwrap().passed());
        prop_assert!(check_regret_identity(&w, &[0.0, 0.0]).unwrap().passed());
        prop_assert!(check_iterate_bound(&w).unwrap().passed());
        for a in 1..=w.len() {
            prop_assert!(check_partial_regret(&w, a).unwrap().passed());
            prop_assert!(check_diff_regularizers(&w, a).unwrap().passed());
        }
        if let Some(r) = w.records.last() {
            prop_assert!(r.q <= 2.0 * r.s2.sqrt().ln() + 1e-12);
        }
    }

    #[test]
    fn generic_ftrl_replays_closed_form_exactly(ls in losses(3)) {
        let x0 = vec![0.5, -1.0, 2.0];
        let mut reg = Linearithmic::new();
        let mut theta = vec![0.0; 3];
        let mut st = OptimizerState::new(x0.clone());
        for l in &ls {
            let (x, th) = ftrl_generic_step(&mut reg, &x0, &theta, l, 1.0);
            prop_assert_eq!(x, st.next_iterate());
            st = st.step(l, 1.0).unwrap();
            theta = th;
            prop_assert_eq!(theta.as_slice(), st.theta());
        }
    }
}
