//! Kohn-Rossi cohomology per characteristic sector of a torus bundle,
//! computed spectrally and from the line-bundle cohomology of the base.

use crspin::cohomology::{shift_table, Method};
use crspin::models::{cr_alpha_bundle_with, TorusLattice, TruncationSpec};

fn main() -> crspin::Result<()> {
    let model = cr_alpha_bundle_with(TorusLattice::square(2), 1, 0, TruncationSpec::new(1, 6))?;
    let table = shift_table(&model, &[0, 1, 2], &[-2, -1, 0, 1, 2], 1e-8)?;
    print!("{}", table.to_csv());
    println!("disagreements between methods: {:?}", table.disagreements());
    println!("max identity defect: {:e}", table.max_identity_defect());
    for (q, s, d) in table.dims(Method::Spectral) {
        if d > 0 {
            println!("h^{q} in sector {s} = {d}");
        }
    }
    Ok(())
}
