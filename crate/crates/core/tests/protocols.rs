use wmlab::designs::{identity, paley_two, sylvester, w43_power};
use wmlab::protocols::{
    bv_recover, classical_bounds, corollary_family, matrix_family, optimal_tree, sls_bounds,
    sls_classical, sls_classical_all, sls_family, sls_quantum, wm_recover, RunMode,
    SlsQuantumSolver,
};
use wmlab::FieldSpec;

#[test]
fn wm_examples() {
    let r = wm_recover(&w43_power(1).unwrap(), 2, RunMode::Full).unwrap();
    assert_eq!((r.recovered_s, r.query_budget), (2, 2));
    assert!(r.queries_used <= 2);

    let h = sylvester(3).unwrap();
    for s in 0..8 {
        let r = wm_recover(&h, s, RunMode::Full).unwrap();
        assert_eq!((r.recovered_s, r.queries_used), (s, 1));
    }

    let r = wm_recover(&identity(4).unwrap(), 3, RunMode::Full).unwrap();
    assert_eq!(r.recovered_s, 3);
    assert!(r.queries_used <= 3);
}

#[test]
fn wm_sampled_runs_match_full() {
    let m = paley_two(5).unwrap();
    for s in 0..m.n() {
        for seed in [0, 1, 99] {
            let r = wm_recover(&m, s, RunMode::Sample(seed)).unwrap();
            assert_eq!(r.recovered_s, s);
            assert_eq!(r.seed, Some(seed));
        }
    }
}

#[test]
fn bv_matches_sylvester_solver() {
    for n in 1..=5u32 {
        let h = sylvester(n).unwrap();
        for s in 0..1usize << n {
            let a = bv_recover(n, s, RunMode::Full).unwrap();
            let b = wm_recover(&h, s, RunMode::Full).unwrap();
            assert_eq!(
                (a.recovered_s, a.queries_used),
                (b.recovered_s, b.queries_used)
            );
        }
    }
}

#[test]
fn sls_quantum_sampled_branches() {
    let f = FieldSpec::new(5, 1).unwrap();
    let solver = SlsQuantumSolver::new(&f).unwrap();
    let mut labels = std::collections::BTreeSet::new();
    for s in 0..5 {
        for seed in 0..40 {
            let run = solver.run(s, RunMode::Sample(seed)).unwrap();
            assert_eq!(run.report.recovered_s, s);
            let b = &run.branches[0];
            assert_eq!(b.queries_used, if b.label == "early" { 1 } else { 2 });
            labels.insert(b.label.clone());
        }
    }
    assert_eq!(
        labels.len(),
        2,
        "both branches should occur over 200 samples"
    );
}

#[test]
fn sls_quantum_extension_field() {
    let f = FieldSpec::new(3, 3).unwrap();
    for s in [0, 5, 26] {
        let run = sls_quantum(&f, s, RunMode::Full).unwrap();
        assert!(run.report.is_exact());
        assert!((run.branches[0].probability - 1.0 / 28.0).abs() < 1e-12);
    }
}

#[test]
fn sls_classical_examples() {
    let f3 = FieldSpec::new(3, 1).unwrap();
    for s in 0..3 {
        let r = sls_classical(&f3, s).unwrap().report;
        assert_eq!(r.recovered_s, s);
        assert!(r.queries_used <= 2);
    }
    let f49 = FieldSpec::new(7, 2).unwrap();
    for run in sls_classical_all(&f49).unwrap() {
        assert!(run.report.queries_used <= 17);
        assert_eq!(run.report.recovered_s, run.report.hidden_s);
    }
    let f9 = FieldSpec::new(3, 2).unwrap();
    let labels: Vec<String> = sls_classical_all(&f9)
        .unwrap()
        .into_iter()
        .map(|r| r.report.branch_taken)
        .collect();
    assert!(labels.iter().any(|l| l == "zero-hit"));
}

#[test]
fn bound_examples() {
    let b = classical_bounds(4, 3, 0.0).unwrap();
    assert!((b.bound_log3 - 4f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert_eq!(b.quantum_upper, 2);
    assert!((classical_bounds(10, 1, 0.0).unwrap().bound_nk - 9.0).abs() < 1e-12);
    assert!((classical_bounds(32, 32, 0.0).unwrap().bound_log2 - 5.0).abs() < 1e-12);
    // eps shifts every bound by its own log
    let b = classical_bounds(9, 3, 0.5).unwrap();
    assert!((b.bound_log3 - (2.0 + 0.5f64.ln() / 3f64.ln())).abs() < 1e-12);
    assert!((b.bound_nk - (1.5 - 1.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn family_rows() {
    let rows = corollary_family(4, 3, 3, 0.0).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!((rows[2].n, rows[2].k, rows[2].quantum_budget), (64, 27, 3));
    let rows = corollary_family(2, 2, 5, 0.0).unwrap();
    assert!(rows.iter().all(|r| r.gamma == 0.0 && r.quantum_budget == 2));
}

#[test]
fn tree_depth_respects_bounds() {
    let mut mats = vec![w43_power(1).unwrap(), paley_two(5).unwrap()];
    for n in 2..=6 {
        mats.push(identity(n).unwrap());
    }
    for t in 1..=3 {
        mats.push(sylvester(t).unwrap());
    }
    for m in &mats {
        let fam = matrix_family(m);
        if fam.len() > 16 {
            continue;
        }
        let (tree, depth) = optimal_tree(&fam).unwrap();
        let b = classical_bounds(m.n(), m.claimed_weight().unwrap(), 0.0).unwrap();
        assert!(
            depth as u64 >= b.min_depth,
            "n={} depth {depth} < {}",
            m.n(),
            b.min_depth
        );
        for (s, row) in fam.iter().enumerate() {
            assert_eq!(tree.classify(row), Some(s));
        }
    }
}

#[test]
fn sls_trees_meet_proof_bound() {
    for q in [3u64, 5, 7, 9, 11, 13] {
        let f = FieldSpec::of_order(q).unwrap();
        let (_, depth) = optimal_tree(&sls_family(&f)).unwrap();
        let b = sls_bounds(q as usize, 0.0).unwrap();
        assert!(depth as u64 >= b.min_depth);
        assert!(depth as f64 > b.stated_lower);
        assert!(depth as f64 >= b.proof_lower - 1e-12);
    }
}
