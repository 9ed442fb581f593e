//! Conformal covariance of D± and the twistor parts under θ̃ = e^{2f}θ,
//! with the exponent scan that rejects perturbed weights.

use crspin::models::{heisenberg_model, TruncationSpec};
use crspin::weitzenboeck::{conformal_check, ConformalScale};

fn main() -> crspin::Result<()> {
    let model = heisenberg_model(2, 0, TruncationSpec::new(1, 6))?;
    let f = ConformalScale::parse(2, "0.3*cos(x1) + 0.2*sin(x2 - y1)")?;
    for ell in [-2, 0, 2] {
        let r = conformal_check(&model, ell, &f, 20, 7)?;
        println!("l={ell}: compare defect {:?}, max defect {:e}, passes {}", r.compare_defect, r.max_defect(), r.passes(1e-9));
        for s in &r.scans {
            println!(
                "  {:<3} q={} p={:+} defect {:e} nearest perturbed {:e}{}",
                s.law,
                s.q,
                s.predicted,
                s.defect_at_predicted,
                s.min_perturbed_defect,
                if s.sensitive { "" } else { " (insensitive)" }
            );
        }
    }
    Ok(())
}
