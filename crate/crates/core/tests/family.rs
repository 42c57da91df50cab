use goeritz_core::equivariance::{exists_equivariant_embedding, find_equivariant_witness, span_restriction_test, SpanTest};
use goeritz_core::lattice::enumerate_embeddings;
use goeritz_core::rational::Fraction;
use goeritz_core::signed_perm::canonical_matrix;
use goeritz_core::{family, Matrix, SearchLimits};
use num_rational::BigRational;

fn corank(n: usize) -> usize {
    if n.is_multiple_of(2) {
        1
    } else {
        2
    }
}

fn classes(n: usize) -> Vec<Matrix> {
    let g = family::goeritz_gn(n).unwrap();
    enumerate_embeddings(&g, corank(n), -1, SearchLimits::default())
        .unwrap()
        .into_iter()
        .map(|e| e.matrix().clone())
        .collect()
}

#[test]
fn class_counts_are_frozen() {
    // 1, 2, 6, 12, 60: pairings of the summands times two choices per pair.
    for (n, count) in [(1, 1), (2, 2), (3, 6), (4, 12), (5, 60)] {
        assert_eq!(classes(n).len(), count, "K_{}", n);
    }
}

#[test]
fn classes_are_the_family_up_to_summand_permutation() {
    for n in 1..=5 {
        assert_eq!(classes(n), family::reindexed_family_classes(n).unwrap(), "K_{}", n);
    }
}

#[test]
fn family_members_are_enumerated() {
    for n in 1..=5 {
        let all = classes(n);
        for e in family::family_embeddings(n).unwrap() {
            assert!(all.contains(&canonical_matrix(e.matrix())), "K_{}", n);
        }
    }
}

#[test]
fn single_summand_has_one_class() {
    let all = classes(1);
    assert_eq!(all, vec![canonical_matrix(family::psi_block(3).unwrap().matrix())]);
}

#[test]
fn no_equivariant_embeddings() {
    for n in 2..=5 {
        let f = family::action_fn(n).unwrap();
        let g = family::goeritz_gn(n).unwrap();
        let lim = SearchLimits::default();
        assert!(exists_equivariant_embedding(&g, &f, corank(n), -1, lim).unwrap().is_none());
        assert!(exists_equivariant_embedding(&g.negated(), &f, corank(n), 1, lim).unwrap().is_none());
    }
}

fn leading_entry(n: usize, index: usize) -> BigRational {
    let f = family::action_fn(n).unwrap();
    let e = &family::family_embeddings(n).unwrap()[index];
    match span_restriction_test(e, &f).unwrap() {
        SpanTest::Fail { certificate } => {
            let c = certificate.entries.iter().find(|c| c.row == 0 && c.col == 0).expect("(0,0) is non-integral");
            c.value.0.clone()
        }
        SpanTest::Pass => panic!("K_{} member {} passed the span test", n, index),
    }
}

fn frac(a: i64, b: i64) -> BigRational {
    Fraction::new(a, b).0
}

#[test]
fn certificate_values() {
    // index 0 starts with psi_1; the last member starts with psi_2
    assert_eq!(leading_entry(2, 0), frac(2, 5));
    assert_eq!(leading_entry(2, 1), frac(-2, 5));
    for n in 3..=5 {
        let last = family::family_embeddings(n).unwrap().len() - 1;
        assert_eq!(leading_entry(n, 0), frac(1, 5), "K_{}", n);
        assert_eq!(leading_entry(n, last), frac(-1, 5), "K_{}", n);
    }
}

#[test]
fn every_family_member_is_refuted_with_denominator_five() {
    for n in 2..=5 {
        let f = family::action_fn(n).unwrap();
        for e in family::family_embeddings(n).unwrap() {
            let v = find_equivariant_witness(&e, &f).unwrap();
            assert!(v.is_refuted());
            let SpanTest::Fail { certificate } = span_restriction_test(&e, &f).unwrap() else {
                panic!("span test passed for K_{}", n);
            };
            assert!(certificate.entries.iter().all(|c| c.value.denom() == &num_bigint::BigInt::from(5)));
        }
    }
}
