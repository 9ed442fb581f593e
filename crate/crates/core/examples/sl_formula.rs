//! Weitzenboeck residuals on a torus bundle: the full formula, the
//! weight-ℓ components and D_θ² = 2□.

use crspin::cohomology::{dirac_kohn_defect, sector_identity_defect};
use crspin::models::{cr_alpha_bundle_with, TorusLattice, TruncationSpec};
use crspin::operators::SectionSpace;
use crspin::weitzenboeck::{admissible_weights, dl_residual, sl_residual};

fn main() -> crspin::Result<()> {
    for s in -1..=1 {
        let model = cr_alpha_bundle_with(TorusLattice::square(2), 1, s, TruncationSpec::new(1, 6))?;
        let space = SectionSpace::new(&model)?;
        println!("sector {s}: dim {}", space.dim());
        println!("  SL residual        {:e}", sl_residual(&space)?);
        for ell in admissible_weights(2) {
            let r = dl_residual(&space, ell)?;
            println!("  l={:<3} q={} residual {:e}", r.ell, r.q, r.residual);
        }
        println!("  |D^2 - 2 Box|      {:?}", dirac_kohn_defect(&space)?);
        println!("  |Box - Boxbar - (m-q)N| {:?}", sector_identity_defect(&space));
    }
    Ok(())
}
