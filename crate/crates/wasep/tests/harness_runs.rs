use wasep::harness::{self, HarnessError, Verdict};

fn run(id: &str, seed: u64, pairs: &[(&str, &str)]) -> harness::Report {
    let s = harness::resolve_pairs(id, seed, pairs).unwrap();
    harness::run(&s).unwrap()
}

#[test]
fn exact_invariance_single_model() {
    let r = run("invariance", 7, &[("n", "4"), ("rho", "0.5"), ("E", "1"), ("gamma", "0.5")]);
    assert_eq!(r.verdict(), Verdict::Pass);
    assert_eq!(r.table.rows.len(), 1);
}

#[test]
fn sampled_invariance() {
    let r = run(
        "invariance",
        3,
        &[("mode", "mc"), ("n", "10"), ("rho", "0.5"), ("E", "1"), ("gamma", "0.5"), ("replicas", "300"), ("t", "0.3")],
    );
    assert_eq!(r.verdict(), Verdict::Pass, "{}", r.verdict_text());
}

#[test]
fn mc_mode_takes_single_values() {
    let err = harness::resolve_pairs("invariance", 1, &[("mode", "mc")]).unwrap_err();
    assert!(matches!(err, HarnessError::BadValue { .. }));
}

#[test]
fn zero_tolerance_fails() {
    let r = run(
        "martingale",
        5,
        &[("n", "32"), ("replicas", "8"), ("times", "0.2"), ("tol", "0")],
    );
    assert_eq!(r.verdict(), Verdict::Fail);
    let c = r
        .criterion("empirical QV within tol of predictable QV (exact rates)")
        .unwrap();
    assert_eq!(c.pass, Some(false));
}

#[test]
fn tables_do_not_depend_on_thread_count() {
    let s = harness::resolve_pairs("martingale", 9, &[("n", "32"), ("replicas", "12"), ("times", "0.05,0.1")]).unwrap();
    let table = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| harness::run(&s).unwrap()).table.to_csv()
    };
    let one = table(1);
    assert_eq!(one, table(3));
    assert_eq!(one, table(1));
}

#[test]
fn window_rule_is_checked() {
    let err = harness::resolve_pairs("bg_principle", 1, &[("n", "64"), ("ells", "4,16")]).unwrap_err();
    assert!(err.to_string().contains("l < n/4"), "{err}");
}

#[test]
fn symmetric_cole_hopf_is_trivial() {
    let r = run(
        "cole_hopf",
        2,
        &[("E", "0"), ("n", "32"), ("replicas", "4"), ("t", "0.05")],
    );
    let j = r.table.get("J_0 n=32").unwrap();
    assert_eq!(j.estimate, 1.0);
    assert_eq!(j.stderr, 0.0);
}

#[test]
fn small_boundary_runs_complete() {
    for (id, pairs) in [
        ("height_boundary", vec![("n_list", "16,32"), ("replicas", "4"), ("grid", "50")]),
        ("boundary_field", vec![("n", "64"), ("eps", "0.25,0.125"), ("replicas", "4"), ("grid", "50")]),
        ("bg_principle", vec![("n", "64"), ("ells", "2,4,8"), ("replicas", "4"), ("t", "0.1")]),
        ("stationary_covariance", vec![("n", "64"), ("replicas", "4"), ("snapshots", "10")]),
        ("ou_limit", vec![("n", "64"), ("replicas", "4"), ("ou_replicas", "4")]),
        (
            "sbe_match",
            vec![("n", "32"), ("replicas", "3"), ("spde_replicas", "3"), ("t", "0.2"), ("spde_t", "0.2"), ("modes", "4"), ("eps", "0.125")],
        ),
    ] {
        let r = run(id, 4, &pairs);
        assert!(!r.table.rows.is_empty(), "{id}");
        assert!(!r.criteria.is_empty(), "{id}");
    }
}
