use num_complex::Complex64;
use proptest::prelude::*;

use wmlab::designs::{
    identity, parse_matrix, serialize_matrix, sylvester, tensor, verify_weighing, w43_power,
};
use wmlab::field::FieldSpec;
use wmlab::protocols::{optimal_tree, sls_classical};
use wmlab::qsim::{
    grover_budget, grover_exact, kickback, oracle_phase, oracle_xor4, oracle_xor4_inverse,
    QueryOracle, StateVector,
};

fn small_field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![
        (3u64, 1u32),
        (5, 1),
        (7, 1),
        (3, 2),
        (11, 1),
        (5, 2),
        (3, 3),
        (13, 1),
        (7, 2),
    ])
    .prop_map(|(p, k)| FieldSpec::new(p, k).unwrap())
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(f in small_field(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let q = f.q();
        let (x, y, z) = (f.from_rank(a % q).unwrap(), f.from_rank(b % q).unwrap(), f.from_rank(c % q).unwrap());
        prop_assert_eq!(f.add(&x, &y), f.add(&y, &x));
        prop_assert_eq!(f.mul(&x, &f.add(&y, &z)), f.add(&f.mul(&x, &y), &f.mul(&x, &z)));
        prop_assert_eq!(f.sub(&f.add(&x, &y), &y), x.clone());
        if !x.is_zero() {
            prop_assert_eq!(f.mul(&x, &f.inv(&x).unwrap()), f.one());
        }
        prop_assert_eq!(f.legendre(&f.mul(&x, &y)), f.legendre(&x) * f.legendre(&y));
        prop_assert_eq!(f.rank(&f.from_rank(a % q).unwrap()), a % q);
    }

    #[test]
    fn chi_table_agrees_with_field(f in small_field(), a in any::<usize>(), b in any::<usize>()) {
        let t = f.chi_table();
        let q = f.q();
        let (i, s) = (a % q, b % q);
        let sum = f.add(&f.from_rank(i).unwrap(), &f.from_rank(s).unwrap());
        prop_assert_eq!(t.add(i, s), f.rank(&sum));
        prop_assert_eq!(t.shifted(i, s), f.legendre(&sum));
        prop_assert_eq!(t.chi_inner_shifted(i, s), if i == s { q as i64 - 1 } else { -1 });
    }

    #[test]
    fn tensor_products_stay_weighing(a in 1u32..=2, b in 1u32..=2, n in 1usize..=4) {
        let left = tensor(&w43_power(a).unwrap(), &sylvester(b).unwrap()).unwrap();
        let m = tensor(&left, &identity(n).unwrap()).unwrap();
        let cert = verify_weighing(&m).unwrap();
        prop_assert_eq!(cert.k, 3usize.pow(a) << b);
        prop_assert_eq!(m.claimed_weight(), Some(cert.k));
        prop_assert!(cert.row_nonzero.iter().all(|&c| c == cert.k));
    }

    #[test]
    fn matrix_file_round_trip(t in 1u32..=3, n in 1usize..=5) {
        let m = tensor(&w43_power(t).unwrap(), &identity(n).unwrap()).unwrap();
        let back = parse_matrix(&serialize_matrix(&m)).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn kickback_is_sign_oracle(
        amps in complex_vec(12),
        signs in prop::collection::vec(prop::bool::ANY, 12),
        split in prop::sample::select(vec![vec![12usize], vec![3, 4], vec![2, 3, 2]]),
    ) {
        let start = StateVector::normalized(&split, amps).unwrap();
        let table: Vec<i8> = signs.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let mut a = start.clone();
        let mut f = QueryOracle::new(table.clone()).unwrap();
        kickback(&mut a, &mut f).unwrap();
        let mut b = start.clone();
        let mut g = QueryOracle::new(table).unwrap();
        oracle_phase(&mut b, &mut g, std::f64::consts::PI).unwrap();
        prop_assert!(a.fidelity(&b) >= 1.0 - 1e-12);
        prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert_eq!(f.queries(), 1);
    }

    #[test]
    fn xor4_round_trip(amps in complex_vec(20), table in prop::collection::vec(-1i8..=1, 5)) {
        let start = StateVector::normalized(&[5, 4], amps).unwrap();
        let mut s = start.clone();
        let mut f = QueryOracle::new(table).unwrap();
        oracle_xor4(&mut s, &mut f, 0, 1).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        oracle_xor4_inverse(&mut s, &mut f, 0, 1).unwrap();
        prop_assert!(s.max_deviation(&start) < 1e-12);
        prop_assert_eq!(f.queries(), 2);
    }

    #[test]
    fn grover_is_exact(n in 2usize..=96, frac in 0.0f64..1.0, seed in any::<u64>()) {
        use rand::{seq::index::sample, SeedableRng};
        let k = 1 + ((n - 1) as f64 * frac) as usize;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut table = vec![0i8; n];
        for i in sample(&mut rng, n, k) {
            table[i] = if i % 3 == 0 { -1 } else { 1 };
        }
        let mut f = QueryOracle::new(table.clone()).unwrap();
        let (psi, used) = grover_exact(&mut f, n, k).unwrap();
        prop_assert!(used <= grover_budget(n, k));
        let amp = 1.0 / (k as f64).sqrt();
        for (i, a) in psi.amplitudes().iter().enumerate() {
            let want = if table[i] != 0 { amp } else { 0.0 };
            prop_assert!((a - Complex64::new(want, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn sls_classical_shrinks(f in small_field(), s in any::<usize>()) {
        let s = s % f.q();
        let run = sls_classical(&f, s).unwrap();
        prop_assert_eq!(run.report.recovered_s, s);
        prop_assert!(run.report.queries_used <= run.report.query_budget);
        for r in &run.rounds {
            prop_assert!(r.candidates >= 4);
            prop_assert!(r.answer == 0 || 4 * r.remaining < 3 * r.candidates);
        }
        prop_assert_eq!(run.report.seed, None);
    }

    #[test]
    fn tree_paths_are_consistent(
        raw in prop::collection::btree_set(prop::collection::vec(-1i8..=1, 5), 1..=10),
    ) {
        let family: Vec<Vec<i8>> = raw.into_iter().collect();
        let (tree, depth) = optimal_tree(&family).unwrap();
        prop_assert_eq!(depth, tree.depth());
        prop_assert!(depth <= 5);
        for (path, leaf) in tree.paths() {
            let mut idx: Vec<usize> = path.iter().map(|p| p.0).collect();
            idx.sort_unstable();
            idx.dedup();
            prop_assert_eq!(idx.len(), path.len());
            let consistent: Vec<usize> = (0..family.len())
                .filter(|&m| path.iter().all(|&(i, a)| family[m][i] == a))
                .collect();
            prop_assert_eq!(consistent, vec![leaf]);
        }
        // a family of size m needs depth at least log3 m
        prop_assert!(3usize.pow(depth as u32) >= family.len());
    }
}
