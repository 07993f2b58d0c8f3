//! Acceptance criterion for the validation command, exercised through the
//! installed binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_algent"))
}

#[test]
fn criterion_10_validation_command() {
    let out = bin().args(["validate", "--n-max", "4"]).output().expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let pass = out.status.success();
    let suites = [
        "basis.dimension-formula",
        "basis.index-round-trip",
        "basis.projection-multiset",
        "operators.hermitian-labels",
        "operators.adjoint-pairing",
        "operators.oracle-intertwining",
        "oracle.embedding-isometry",
        "pyramid.gram-identity",
        "pyramid.casimir-eigenvalues",
        "pyramid.ladder-consistency",
        "pyramid.counting-identities",
        "entropy.pure-symmetry",
        "entropy.multiplicity-accounting",
        "entropy.exact-small-cases",
        "entropy.oracle-pure",
        "entropy.oracle-mixed",
        "dynamics.trace-preservation",
        "dynamics.hermiticity",
        "dynamics.conserved-charge-drift",
        "dynamics.strong-symmetry-commutators",
    ];
    let all_reported = suites.iter().all(|s| stdout.contains(s));
    let no_fail = !stdout.contains("FAIL");
    let residuals_shown = stdout.matches("residual").count() >= suites.len();
    let ok = pass && all_reported && no_fail && residuals_shown;
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!(
        "criterion 10 (validate --n-max 4): {verdict} (exit ok={pass}, suites reported={all_reported})"
    );
    assert!(ok, "validate output:\n{stdout}");
}

#[test]
fn validate_refuses_oracle_beyond_cap() {
    let out = bin().args(["validate", "--n-max", "7"]).output().expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "symmetric-space checks still run and pass");
    assert!(stdout.contains("refused above N = 6"));
    assert!(stdout.contains("pyramid.gram-identity"));
}

#[test]
fn validate_detects_corrupted_pyramid_cache() {
    let dir = std::env::temp_dir().join(format!("algent-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pyramid.bin");
    let path_str = path.to_str().unwrap();

    // First run creates the cache and validates it.
    let out = bin()
        .args(["validate", "--n-max", "3", "--pyramid-cache", path_str])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("cache.gram-identity"));

    // Flip an exponent bit in a trailing coefficient and re-validate.
    let mut bytes = std::fs::read(&path).unwrap();
    let at = bytes.len() - 33;
    bytes[at] ^= 0x40;
    std::fs::write(&path, &bytes).unwrap();
    let out = bin()
        .args(["validate", "--n-max", "3", "--pyramid-cache", path_str])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"));

    std::fs::remove_dir_all(&dir).ok();
}
