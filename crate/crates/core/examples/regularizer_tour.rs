//! The linearithmic pair psi / psi_star: values, slopes, the branch point,
//! and a brute-force check that psi really is the conjugate of psi_star.

use cohere_opt::oracles::conjugate_by_maximization;
use cohere_opt::regularizer::{lambert_w0, psi, psi_prime, psi_second, psi_star, psi_star_prime, RegularizerParams};

fn main() -> cohere_opt::Result<()> {
    let p = RegularizerParams::new(2.0, 0.0)?;
    println!("S = {}, Q = {}, branch point x0 = {:.6}", p.s(), p.q(), p.branch_x());

    println!("\n{:>8} {:>14} {:>14} {:>14} {:>14}", "x", "psi", "sup oracle", "psi'", "psi''");
    for x in [0.01, 0.5, p.branch_x(), 2.0, 10.0, 100.0] {
        let second = psi_second(x, &p).map_or("-".to_string(), |v| format!("{v:.6}"));
        println!(
            "{x:>8.4} {:>14.8} {:>14.8} {:>14.8} {:>14}",
            psi(x, &p),
            conjugate_by_maximization(x, &p),
            psi_prime(x, &p),
            second
        );
    }

    // psi' and psi_star' undo each other
    for th in [0.3, 4.0, 12.0] {
        let x = psi_star_prime(th, &p);
        println!("theta = {th:>5}: psi_star = {:.6}, x = psi_star'(theta) = {x:.6}, psi'(x) = {:.6}", psi_star(th, &p), psi_prime(x, &p));
    }

    // growth: psi(x) ~ 2 x ln x for large x
    let big = 1e6;
    println!("\npsi(1e6) / (2 x ln 2x) = {:.6}", psi(big, &p) / (2.0 * big * (2.0 * big).ln()));
    println!("W(1) = {:.15} (omega constant)", lambert_w0(1.0)?);
    Ok(())
}
