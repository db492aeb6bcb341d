//! The twelve acceptance checks, one PASS/FAIL line each.
//!
//! Three checks are known to fail on these instances; each is listed with
//! the reason. The target fails if any other check fails, if a listed one
//! starts passing (the list is then stale), or if a check overruns its
//! time limit.

use vgeom::suite::{Context, Suite, CRITERIA};

const KNOWN_FAILURES: [(usize, &str); 3] = [
    (
        2,
        "every block of V(2,PG(1,3)) is a hyperplane, so the scan finds 5, not only 2S",
    ),
    (
        6,
        "at q = 3 no proper net completes through a deleted point; the witness exists from q = 5",
    ),
    (
        10,
        "W(3,3) contains no planes, so gamma-classes are undefined",
    ),
];

#[test]
fn acceptance() {
    let ctx = Context::default();
    let mut problems = Vec::new();
    for c in Suite::All.criteria() {
        let v = c.run(&ctx);
        let ms = v.runtime_ms.unwrap_or(0);
        let known = KNOWN_FAILURES.iter().find(|(n, _)| *n == c.number);
        let note = match known {
            Some((_, why)) if !v.passed() => format!("  [known: {why}]"),
            _ => String::new(),
        };
        println!(
            "{:>2} {:<16} {} ({ms} ms){note}",
            c.number,
            c.claim,
            v.status.as_str()
        );
        if !v.passed() {
            println!("   detail: {}", v.detail);
            if let Some(w) = &v.witness {
                println!("   witness: {w}");
            }
        }
        match (v.passed(), known) {
            (false, None) => problems.push(format!("{} failed: {}", c.claim, v.detail)),
            (true, Some(_)) => {
                problems.push(format!("{} now passes; update KNOWN_FAILURES", c.claim))
            }
            _ => {}
        }
        if ms > c.limit.as_millis() as u64 {
            problems.push(format!(
                "{} took {ms} ms, limit {} ms",
                c.claim,
                c.limit.as_millis()
            ));
        }
    }
    assert_eq!(CRITERIA.len(), 12);
    assert!(problems.is_empty(), "{problems:#?}");
}
