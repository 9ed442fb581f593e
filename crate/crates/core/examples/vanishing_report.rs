//! Vanishing verdicts for sphere data and for a flat model.

use crspin::io::to_json;
use crspin::models::{heisenberg_model, sphere_model, TruncationSpec};
use crspin::vanishing::{qhat, vanishing_verdicts};

fn main() -> crspin::Result<()> {
    let sphere = sphere_model(3)?;
    for ell in [-5, 0, 5] {
        print!("{}", vanishing_verdicts(&sphere, ell)?.to_table());
    }
    let flat = heisenberg_model(2, 0, TruncationSpec::default())?;
    let report = vanishing_verdicts(&flat, 0)?;
    print!("{}", report.to_table());
    println!("qhat(4, -3) = {}", qhat(4, -3));
    println!("{}", to_json(&vanishing_verdicts(&sphere, 1)?.rows[1])?);
    Ok(())
}
