//! Lowest eigenvalues of D_θ² per degree on a Heisenberg nilmanifold sector.

use crspin::io::spectrum_csv;
use crspin::models::{heisenberg_model, TruncationSpec};
use crspin::operators::{assemble_dirac_squared, block_spectrum, SectionSpace};

fn main() -> crspin::Result<()> {
    for k in 0..=2 {
        let model = heisenberg_model(1, k, TruncationSpec::new(2, 8))?;
        let space = SectionSpace::new(&model)?;
        let d2 = assemble_dirac_squared(&space)?;
        let rows = block_spectrum(&d2, 4)?;
        println!("# k={k}, dim={}", space.dim());
        print!("{}", spectrum_csv(&rows));
    }
    Ok(())
}
