//! Numerical acceptance suite: one pass/fail line per criterion.

use magnus_torus::acceptance;

fn report(c: &acceptance::Criterion) {
    println!(
        "[{}] {} ({:.2}s): {}",
        c.id,
        if c.pass { "PASS" } else { "FAIL" },
        c.seconds,
        c.detail
    );
}

#[test]
fn acceptance_a5_expansion() {
    let c = acceptance::a5_expansion(256);
    report(&c);
    assert!(c.pass, "{}", c.detail);
    assert!(c.seconds < 600.0, "A5 exceeded 10 min: {:.1}s", c.seconds);
}

#[test]
fn acceptance_a6_integrability() {
    let c = acceptance::a6_integrability();
    report(&c);
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn acceptance_a7_quaddiff() {
    let c = acceptance::a7_quaddiff();
    report(&c);
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn acceptance_a8_variation() {
    let c = acceptance::a8_variation(512);
    report(&c);
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn acceptance_a9_kernel() {
    let c = acceptance::a9_kernel();
    report(&c);
    assert!(c.pass, "{}", c.detail);
}
