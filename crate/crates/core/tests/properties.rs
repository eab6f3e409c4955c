//! Seeded property suites for the engine, canonicalization, certificates,
//! finite relations and degeneracy.

mod common;

use common::{duplicate_left, duplicate_row, permute, rename};
use mclex_core::engine::{implies_lex_with, Certificate, Limits};
use mclex_core::finite_models::{interp_closed, FiniteRelation};
use mclex_core::{canonicalize, degeneracy_class, validate, Matrix};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x006d_636c_6578),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Matrices with `1..=n` rows, `1..=m` left columns and `1..=k` variables.
fn matrix(n: usize, m: usize, k: u32) -> impl Strategy<Value = Matrix> {
    (1..=n, 1..=m, 1..=k).prop_flat_map(|(n, m, k)| {
        prop::collection::vec(prop::collection::vec(1..=k, m + 1), n)
            .prop_map(|rows| validate(&rows).unwrap())
    })
}

/// A matrix with a random row order, left column order and renaming.
fn shuffled(m: Matrix) -> impl Strategy<Value = (Matrix, Matrix)> {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..m.left_count()).collect();
    let vars: Vec<usize> = (0..m.var_count()).collect();
    (
        Just(rows).prop_shuffle(),
        Just(cols).prop_shuffle(),
        Just(vars).prop_shuffle(),
    )
        .prop_map(move |(r, c, v)| (m.clone(), rename(&permute(&m, &r, &c), &v)))
}

fn holds(a: &Matrix, b: &Matrix) -> bool {
    implies_lex_with(a, b, &Limits::default()).unwrap().holds
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn reflexive(m in matrix(4, 4, 4)) {
        prop_assert!(holds(&m, &m));
    }

    #[test]
    fn transitive(a in matrix(3, 3, 2), b in matrix(3, 3, 2), c in matrix(3, 3, 2)) {
        if holds(&a, &b) && holds(&b, &c) {
            prop_assert!(holds(&a, &c));
        }
    }

    #[test]
    fn source_symmetries_preserve_verdicts(
        (a, a2) in matrix(3, 3, 3).prop_flat_map(shuffled),
        b in matrix(3, 3, 3),
        dup_row in 0usize..3,
        dup_col in 0usize..3,
    ) {
        let expected = holds(&a, &b);
        prop_assert_eq!(holds(&a2, &b), expected);
        prop_assert_eq!(holds(&duplicate_row(&a, dup_row % a.rows()), &b), expected);
        prop_assert_eq!(holds(&duplicate_left(&a, dup_col % a.left_count()), &b), expected);
    }

    #[test]
    fn target_symmetries_preserve_verdicts(
        a in matrix(3, 3, 3),
        (b, b2) in matrix(3, 3, 3).prop_flat_map(shuffled),
        dup_row in 0usize..3,
        dup_col in 0usize..3,
    ) {
        let expected = holds(&a, &b);
        prop_assert_eq!(holds(&a, &b2), expected);
        prop_assert_eq!(holds(&a, &duplicate_row(&b, dup_row % b.rows())), expected);
        prop_assert_eq!(holds(&a, &duplicate_left(&b, dup_col % b.left_count())), expected);
    }

    #[test]
    fn canonical_form_is_equivalent(m in matrix(3, 3, 3)) {
        let c = canonicalize(&m);
        prop_assert!(holds(&m, &c) && holds(&c, &m));
    }

    #[test]
    fn premises_are_monotone(a in matrix(3, 3, 2), b in matrix(3, 3, 3), extra in prop::collection::vec(1u32..=3, 3)) {
        let mut col = extra;
        col.truncate(b.rows());
        col.resize(b.rows(), 1);
        let stronger = b.with_extra_left(&col).unwrap();
        if holds(&a, &b) {
            prop_assert!(holds(&a, &stronger));
        }
    }

    #[test]
    fn certificates_replay(a in matrix(3, 3, 3), b in matrix(3, 3, 3)) {
        let limits = Limits::default();
        let v = implies_lex_with(&a, &b, &limits).unwrap();
        prop_assert!(v.certificate.replay(&a, &b, &limits).unwrap());
        match &v.certificate {
            Certificate::Derivation { steps } => {
                prop_assert!(v.holds);
                for s in steps {
                    prop_assert!(s.is_consistent(&a));
                }
            }
            Certificate::Closed { columns } => {
                prop_assert!(!v.holds);
                prop_assert!(!columns.contains(b.right()));
                let mut tampered = columns.clone();
                tampered.push(b.right().clone());
                let tampered = Certificate::Closed { columns: tampered };
                prop_assert!(!tampered.replay(&a, &b, &limits).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn canonicalize_is_idempotent(m in matrix(4, 4, 4)) {
        let c = canonicalize(&m);
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonicalize_ignores_symmetries(
        (m, m2) in matrix(4, 4, 4).prop_flat_map(shuffled),
        dup_row in 0usize..4,
        dup_col in 0usize..4,
    ) {
        let c = canonicalize(&m);
        prop_assert_eq!(canonicalize(&m2), c.clone());
        prop_assert_eq!(canonicalize(&duplicate_row(&m, dup_row % m.rows())), c.clone());
        prop_assert_eq!(canonicalize(&duplicate_left(&m, dup_col % m.left_count())), c);
    }

    #[test]
    fn degeneracy_ignores_symmetries((m, m2) in matrix(4, 4, 4).prop_flat_map(shuffled)) {
        prop_assert_eq!(degeneracy_class(&m).tag, degeneracy_class(&m2).tag);
        prop_assert_eq!(degeneracy_class(&m).tag, degeneracy_class(&canonicalize(&m)).tag);
    }

    #[test]
    fn counterexamples_replay(
        m in matrix(3, 3, 2),
        carrier in 1usize..=3,
        mask in any::<u32>(),
    ) {
        let n = m.rows();
        let tuples: Vec<Vec<usize>> = (0..carrier.pow(n as u32))
            .filter(|t| mask >> (t % 32) & 1 == 1)
            .map(|mut t| {
                let mut tuple = vec![0; n];
                for e in tuple.iter_mut().rev() {
                    *e = t % carrier;
                    t /= carrier;
                }
                tuple
            })
            .collect();
        let r = FiniteRelation::new(vec![carrier; n], tuples).unwrap();
        let report = interp_closed(&r, &m, 1 << 24).unwrap();
        prop_assert_eq!(report.closed, report.counterexample.is_none());
        if let Some(cx) = &report.counterexample {
            prop_assert!(cx.replays(&r, &m));
            let mut tampered = cx.clone();
            tampered.right = tampered.left[0].clone();
            prop_assert!(!tampered.replays(&r, &m));
        }
        prop_assert_eq!(FiniteRelation::parse(&r.render()).unwrap(), r);
    }
}
