//! Exact Clifford relations on the spinor module for m = 1..6, plus the
//! matrix of Θ for m = 2.

use crspin::clifford::{clifford_suite, theta_matrix};

fn main() -> crspin::Result<()> {
    for m in 1..=6 {
        let s = clifford_suite(m)?;
        println!(
            "m={m} anticommutators={} real={} adjoint={} theta={} blocks={}",
            s.anticommutators, s.real_relations, s.adjointness, s.theta_eigenvalues, s.block_dimensions
        );
    }
    let theta = theta_matrix(2)?;
    let diag: Vec<f64> = theta.diagonal().iter().map(|z| z.re).collect();
    println!("diag(Theta) for m=2: {diag:?}");
    Ok(())
}
