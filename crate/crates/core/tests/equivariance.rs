mod common;

use goeritz_core::equivariance::{
    exhaustive_witness, find_equivariant_witness, span_restriction_test, survey_equivariant_embeddings,
};
use goeritz_core::lattice::enumerate_embeddings;
use goeritz_core::{family, LatticeEmbedding, Matrix, SearchLimits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture_pairs() -> Vec<(LatticeEmbedding, Matrix)> {
    let cert = family::fixture_12a1019();
    let f = cert.action_minus.clone();
    let mut out = vec![
        (family::phi_12a1019(1).unwrap(), f.clone()),
        (family::phi_12a1019(2).unwrap(), f.clone()),
        (family::phi_12a1019(1).unwrap(), f.mul(&f)),
    ];
    for e in family::family_embeddings(2).unwrap() {
        out.push((e, family::action_fn(2).unwrap()));
    }
    out
}

#[test]
fn witnesses_satisfy_the_intertwining_equation() {
    for (phi, f) in fixture_pairs() {
        if let Some(w) = find_equivariant_witness(&phi, &f).unwrap().witness() {
            assert_eq!(w.to_matrix().mul(phi.matrix()), phi.matrix().mul(&f));
        }
    }
}

#[test]
fn verdict_is_invariant_under_target_symmetries() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (phi, f) in fixture_pairs() {
        let base = find_equivariant_witness(&phi, &f).unwrap().is_refuted();
        for _ in 0..10 {
            let t = common::random_signed_perm(&mut rng, phi.target().rank);
            let moved = phi.transformed(&t);
            let v = find_equivariant_witness(&moved, &f).unwrap();
            assert_eq!(v.is_refuted(), base);
            if let Some(w) = v.witness() {
                assert_eq!(w.to_matrix().mul(moved.matrix()), moved.matrix().mul(&f));
            }
        }
    }
}

#[test]
fn witness_power_fixes_the_image() {
    for (phi, f) in fixture_pairs() {
        let p = (1..=12u64).find(|&k| {
            let mut g = Matrix::identity(f.nrows());
            for _ in 0..k {
                g = g.mul(&f);
            }
            g == Matrix::identity(f.nrows())
        });
        let p = p.unwrap();
        if let Some(w) = find_equivariant_witness(&phi, &f).unwrap().witness() {
            assert_eq!(w.pow(p).to_matrix().mul(phi.matrix()), *phi.matrix());
        }
    }
}

#[test]
fn failed_span_test_implies_refutation() {
    for n in 2..=4 {
        let f = family::action_fn(n).unwrap();
        let g = family::goeritz_gn(n).unwrap();
        let corank = if n % 2 == 0 { 1 } else { 2 };
        for e in enumerate_embeddings(&g, corank, -1, SearchLimits::default()).unwrap() {
            let span = span_restriction_test(&e, &f).unwrap();
            let verdict = find_equivariant_witness(&e, &f).unwrap();
            if !span.passed() {
                assert!(verdict.is_refuted());
            }
            if !verdict.is_refuted() {
                assert!(span.passed());
            }
        }
    }
}

#[test]
fn row_matching_agrees_with_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pairs = fixture_pairs();
    for _ in 0..12 {
        let (phi, f) = &pairs[rng.gen_range(0..pairs.len())];
        let t = common::random_signed_perm(&mut rng, phi.target().rank);
        let moved = phi.transformed(&t);
        let fast = find_equivariant_witness(&moved, f).unwrap();
        let slow = exhaustive_witness(&moved, f);
        assert_eq!(fast.is_refuted(), slow.is_none());
    }
}

#[test]
fn fixture_survey_is_fully_equivariant() {
    let cert = family::fixture_12a1019();
    let survey =
        survey_equivariant_embeddings(&cert.goeritz_minus, &cert.action_minus, 1, -1, SearchLimits::default())
            .unwrap();
    assert_eq!(survey.classes.len(), 2);
    assert!(survey.classes.iter().all(|(_, v)| v.witness().is_some()));
}

#[test]
fn non_isometry_is_rejected() {
    let phi = family::phi_12a1019(1).unwrap();
    let mut f = Matrix::identity(6);
    f[(0, 0)] = 0;
    f[(0, 3)] = 1;
    f[(3, 3)] = 0;
    f[(3, 0)] = 1;
    assert!(find_equivariant_witness(&phi, &f).is_err());
    assert!(span_restriction_test(&phi, &f).is_err());
}
