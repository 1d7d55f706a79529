//! One line per acceptance criterion; every criterion must pass.

use dmp_core::selftest::{run_all, SelftestConfig};

#[test]
fn acceptance() {
    let cfg = SelftestConfig::default();
    assert_eq!((cfg.q, cfg.k, cfg.k_gl3, cfg.seed), (5, 2, 1, 0));
    let results = run_all(&cfg);
    for r in &results {
        println!("{}", r.line());
    }
    assert_eq!(results.len(), 9);
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
