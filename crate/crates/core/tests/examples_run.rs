//! Every shipped example runs to completion.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 8] = [
    "clifford_relations",
    "heisenberg_spectrum",
    "sl_formula",
    "kohn_rossi_shift",
    "conformal_covariance",
    "vanishing_report",
    "obstruction_demo",
    "matrix_export",
];

fn example_path(name: &str) -> PathBuf {
    // test binaries live in target/<profile>/deps, examples next to it
    let exe = std::env::current_exe().unwrap();
    let profile = exe.parent().and_then(|p| p.parent()).unwrap();
    profile.join("examples").join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

#[test]
fn all_examples_succeed() {
    for name in EXAMPLES {
        let path = example_path(name);
        assert!(path.exists(), "{} not built; run the whole test suite so cargo builds examples", path.display());
        let status = Command::new(&path).output().unwrap();
        assert!(status.status.success(), "{name}: {}", String::from_utf8_lossy(&status.stderr));
        assert!(!status.stdout.is_empty(), "{name} printed nothing");
    }
}
