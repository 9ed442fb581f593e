//! The flat circle bundle over a 2-torus of complex dimension 2 carries
//! Kohn-Rossi cohomology in degree q̂ = 1, so its CR structure admits no
//! pseudo-Hermitian form of positive Webster scalar curvature.

use crspin::cohomology::{shift_table, Method};
use crspin::models::{cr_alpha_bundle_with, TorusLattice, TruncationSpec};
use crspin::vanishing::{obstruction_check, qhat};

fn main() -> crspin::Result<()> {
    let model = cr_alpha_bundle_with(TorusLattice::square(2), 1, 0, TruncationSpec::new(1, 6))?;
    println!("qhat = {}", qhat(2, 0));
    let table = shift_table(&model, &[0, 1, 2], &[0], 1e-8)?;
    for q in 0..=2 {
        let e = table.get(q, 0, Method::Spectral).expect("entry present");
        println!("h^{q} = {} ({})", e.dim, e.status.as_str());
    }
    println!("{}", obstruction_check(&model, 0, &table)?);
    Ok(())
}
