//! Acceptance suite: runs every verification criterion at its stated size
//! and tolerance, printing one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! for passing criteria too.

use tcs_core::verify::{run_criterion, VerifyConfig};

fn run(id: usize) {
    let cfg = VerifyConfig::default();
    let outcome = run_criterion(id, &cfg);
    println!(
        "criterion {:2} ({}): {} [{:.2?}]",
        outcome.id,
        outcome.name,
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.elapsed
    );
    if !outcome.passed {
        for line in &outcome.details {
            println!("    {line}");
        }
    }
    assert!(outcome.passed, "criterion {id} failed; details above");
}

#[test]
fn criterion_01_counting_identities() {
    run(1);
}

#[test]
fn criterion_02_basis_cardinality_and_orthogonality() {
    run(2);
}

#[test]
fn criterion_03_named_vector_norm_identities() {
    run(3);
}

#[test]
fn criterion_04_low_norm_projection() {
    run(4);
}

#[test]
fn criterion_05_lower_bound_certificate() {
    run(5);
}

#[test]
fn criterion_06_sign_and_inner_product_structure() {
    run(6);
}

#[test]
fn criterion_07_quotient_equals_transport_oracle() {
    run(7);
}

#[test]
fn criterion_08_gn_transport_norm_and_biorthogonality() {
    run(8);
}

#[test]
fn criterion_09_diamond_projection_constants() {
    run(9);
}

#[test]
fn criterion_10_cube_embeddings() {
    run(10);
}

#[test]
fn criterion_11_tree_characterization() {
    run(11);
}

#[test]
fn criterion_12_derived_bounds_report() {
    run(12);
}
