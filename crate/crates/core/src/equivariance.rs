//! Equivariant structures on lattice embeddings.
//!
//! Given `phi : (Z^n, G) -> (Z^m, ±Id)` and an isometry `f` of `G`, we look
//! for a signed permutation `F` of `Z^m` with `F phi = phi f`. Row `r` of
//! `F phi` is `±` row `perm(r)` of `phi`, so such an `F` exists exactly when
//! the rows of `phi f` are, up to sign, a rearrangement of the rows of
//! `phi`. The search therefore reduces to matching rows class by class.
//!
//! Before that, [`span_restriction_test`] computes the map `F` is forced to
//! induce on the saturated image lattice; a non-integral entry there is an
//! independent certificate that no `F` exists.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, GramLattice, LatticeEmbedding, SearchLimits};
use crate::matrix::Matrix;
use crate::rational::{self, Fraction};
use crate::signed_perm::SignedPermutation;

/// `f^T G f = G`.
pub fn is_isometry(f: &Matrix, l: &GramLattice) -> bool {
    let g = l.matrix();
    f.is_square() && f.nrows() == g.nrows() && &f.transpose().mul(g).mul(f) == g
}

/// One entry of the induced map on the saturated image, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub row: usize,
    pub col: usize,
    pub value: Fraction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCertificate {
    /// Hermite normal form basis of the saturation, one vector per row.
    pub saturation_basis: Vec<Vec<Fraction>>,
    /// Non-integral entries of the induced map in that basis (column `s`
    /// holds the image of basis vector `s`), in row-major order.
    pub entries: Vec<CertificateEntry>,
    /// The induced map fails to preserve the form restricted to the
    /// saturation.
    pub not_isometric: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SpanTest {
    Pass,
    Fail { certificate: RationalCertificate },
}

impl SpanTest {
    pub fn passed(&self) -> bool {
        matches!(self, SpanTest::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum EquivarianceVerdict {
    Witness {
        witness: SignedPermutation,
        matrix: Matrix,
    },
    RefutedRational {
        certificate: RationalCertificate,
    },
    RefutedSearch,
}

impl EquivarianceVerdict {
    pub fn witness(&self) -> Option<&SignedPermutation> {
        match self {
            EquivarianceVerdict::Witness { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_refuted(&self) -> bool {
        self.witness().is_none()
    }
}

fn check_action(phi: &LatticeEmbedding, f: &Matrix) -> Result<()> {
    if !is_isometry(f, phi.source()) {
        return Err(Error::input(format!(
            "action ({}x{}) is not an isometry of the {}x{} source form",
            f.nrows(),
            f.ncols(),
            phi.source().rank(),
            phi.source().rank()
        )));
    }
    Ok(())
}

fn rat(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Computes the map induced on `span(phi) ∩ Z^m` by `phi(X_i) -> phi(f X_i)`
/// and fails if it is not integral or not an isometry.
pub fn span_restriction_test(phi: &LatticeEmbedding, f: &Matrix) -> Result<SpanTest> {
    check_action(phi, f)?;
    let a = phi.matrix();
    let image_of_f = a.mul(f);
    let m = a.nrows();
    let n = a.ncols();
    let basis = rational::saturation_basis(a);
    let r = basis.len();

    let to_rat_cols = |mat: &Matrix| -> Vec<Vec<BigRational>> {
        (0..mat.ncols()).map(|j| mat.col(j).iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect()
    };
    let phi_cols = to_rat_cols(a);
    let fphi_cols = to_rat_cols(&image_of_f);
    let basis_rat: Vec<Vec<BigRational>> = basis.iter().map(|b| b.iter().map(rat).collect()).collect();

    // b_s = sum_i c[s][i] phi_i
    let coords = rational::solve_in_span(&phi_cols, &basis_rat)
        .expect("saturation lies in the rational span of the image");
    // T b_s = sum_i c[s][i] (phi f)_i
    let images: Vec<Vec<BigRational>> = coords
        .iter()
        .map(|c| {
            (0..m)
                .map(|q| (0..n).fold(BigRational::zero(), |acc, i| acc + &c[i] * &fphi_cols[i][q]))
                .collect()
        })
        .collect();
    // T b_s = sum_t M[t][s] b_t
    let in_basis = rational::solve_in_span(&basis_rat, &images)
        .expect("an isometry of the source maps the image span to itself");
    let induced: Vec<Vec<BigRational>> =
        (0..r).map(|t| (0..r).map(|s| in_basis[s][t].clone()).collect()).collect();

    let mut entries = Vec::new();
    for (t, row) in induced.iter().enumerate() {
        for (s, v) in row.iter().enumerate() {
            if !v.is_integer() {
                entries.push(CertificateEntry { row: t, col: s, value: Fraction(v.clone()) });
            }
        }
    }

    // Gram of the saturation basis and M^T S M
    let gram: Vec<Vec<BigRational>> = (0..r)
        .map(|i| (0..r).map(|j| (0..m).fold(BigRational::zero(), |acc, q| acc + &basis_rat[i][q] * &basis_rat[j][q])).collect())
        .collect();
    let sm: Vec<Vec<BigRational>> = (0..r)
        .map(|i| (0..r).map(|j| (0..r).fold(BigRational::zero(), |acc, k| acc + &gram[i][k] * &induced[k][j])).collect())
        .collect();
    let not_isometric = (0..r).any(|i| {
        (0..r).any(|j| (0..r).fold(BigRational::zero(), |acc, k| acc + &induced[k][i] * &sm[k][j]) != gram[i][j])
    });

    if entries.is_empty() && !not_isometric {
        return Ok(SpanTest::Pass);
    }
    Ok(SpanTest::Fail {
        certificate: RationalCertificate {
            saturation_basis: basis.iter().map(|b| b.iter().map(|v| Fraction(rat(v))).collect()).collect(),
            entries,
            not_isometric,
        },
    })
}

/// Sign-normalized row: first nonzero entry positive.
fn normalize(row: &[i64]) -> (Vec<i64>, i8) {
    let s: i8 = match row.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => -1,
        _ => 1,
    };
    (row.iter().map(|&v| i64::from(s) * v).collect(), s)
}

/// Row matching for `F phi = target`. Rows of `phi` are grouped by their
/// sign-normalized value; each row of `target` takes the lowest unused row
/// of its class, preferring its own index when that is available (so zero
/// rows, which span the orthogonal complement, stay fixed).
fn match_rows(phi: &Matrix, target: &Matrix) -> Option<SignedPermutation> {
    let m = phi.nrows();
    let mut classes: BTreeMap<Vec<i64>, Vec<(usize, i8)>> = BTreeMap::new();
    for q in 0..m {
        let (key, s) = normalize(phi.row(q));
        classes.entry(key).or_default().push((q, s));
    }
    let mut used = vec![false; m];
    let mut perm = vec![0; m];
    let mut signs = vec![1i8; m];
    for r in 0..m {
        let (key, s_target) = normalize(target.row(r));
        let pool = classes.get(&key)?;
        let pick = pool
            .iter()
            .find(|&&(q, _)| q == r && !used[q])
            .or_else(|| pool.iter().find(|&&(q, _)| !used[q]))?;
        let (q, s_phi) = *pick;
        used[q] = true;
        perm[r] = q;
        // target_r = s_target * key = s_target * s_phi * phi_q
        signs[r] = s_target * s_phi;
    }
    Some(SignedPermutation::new(perm, signs).expect("matching is a bijection"))
}

/// Decides whether some signed permutation `F` satisfies `F phi = phi f`.
pub fn find_equivariant_witness(phi: &LatticeEmbedding, f: &Matrix) -> Result<EquivarianceVerdict> {
    if let SpanTest::Fail { certificate } = span_restriction_test(phi, f)? {
        return Ok(EquivarianceVerdict::RefutedRational { certificate });
    }
    let target = phi.matrix().mul(f);
    Ok(match match_rows(phi.matrix(), &target) {
        Some(witness) => {
            debug_assert_eq!(witness.apply(phi.matrix()), target);
            let matrix = witness.to_matrix();
            EquivarianceVerdict::Witness { witness, matrix }
        }
        None => EquivarianceVerdict::RefutedSearch,
    })
}

/// Exhaustive reference: tries every signed permutation of the target.
/// Only for small targets (the group has `2^m m!` elements).
pub fn exhaustive_witness(phi: &LatticeEmbedding, f: &Matrix) -> Option<SignedPermutation> {
    let target = phi.matrix().mul(f);
    SignedPermutation::all(phi.target().rank).into_par_iter().find_first(|t| t.apply(phi.matrix()) == target)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantEmbedding {
    pub embedding: LatticeEmbedding,
    pub witness: SignedPermutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceSurvey {
    /// Canonical embedding classes with their verdicts, in canonical order.
    pub classes: Vec<(LatticeEmbedding, EquivarianceVerdict)>,
}

impl EquivarianceSurvey {
    /// First class (in canonical order) that admits a witness.
    pub fn first_witness(&self) -> Option<EquivariantEmbedding> {
        self.classes.iter().find_map(|(e, v)| {
            v.witness().map(|w| EquivariantEmbedding { embedding: e.clone(), witness: w.clone() })
        })
    }
}

/// Enumerates all embedding classes and tests each for an equivariant
/// structure. Testing one representative per class suffices: if
/// `F phi = phi f` then `(T F T^-1)(T phi) = (T phi) f`.
pub fn survey_equivariant_embeddings(
    l: &GramLattice,
    f: &Matrix,
    corank: usize,
    sign: i8,
    limits: SearchLimits,
) -> Result<EquivarianceSurvey> {
    if !is_isometry(f, l) {
        return Err(Error::input("action is not an isometry of the form"));
    }
    let reps = lattice::enumerate_embeddings(l, corank, sign, limits)?;
    let classes = reps
        .into_iter()
        .map(|e| {
            let v = find_equivariant_witness(&e, f)?;
            Ok((e, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivarianceSurvey { classes })
}

pub fn exists_equivariant_embedding(
    l: &GramLattice,
    f: &Matrix,
    corank: usize,
    sign: i8,
    limits: SearchLimits,
) -> Result<Option<EquivariantEmbedding>> {
    Ok(survey_equivariant_embeddings(l, f, corank, sign, limits)?.first_witness())
}

/// Largest absolute value among certificate denominators, if any.
pub fn max_denominator(cert: &RationalCertificate) -> Option<BigInt> {
    cert.entries.iter().map(|e| e.value.denom().abs()).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::StandardTarget;

    #[test]
    fn isometry_basics() {
        let g1 = GramLattice::from_rows(&[[-3, 1], [1, -2]]).unwrap();
        assert!(is_isometry(&Matrix::identity(2), &g1));
        let swap = Matrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert!(!is_isometry(&swap, &g1));
        assert!(!is_isometry(&Matrix::identity(3), &g1));
    }

    #[test]
    fn identity_action_has_identity_witness() {
        let g = GramLattice::from_rows(&[[-3, 1], [1, -2]]).unwrap();
        let t = StandardTarget::new(4, -1).unwrap();
        let phi = LatticeEmbedding::new(
            Matrix::from_rows(&[[-1, 1], [0, 1], [1, 0], [1, 0]]).unwrap(),
            t,
            g,
        )
        .unwrap();
        assert!(span_restriction_test(&phi, &Matrix::identity(2)).unwrap().passed());
        let v = find_equivariant_witness(&phi, &Matrix::identity(2)).unwrap();
        assert!(v.witness().unwrap().is_identity());
    }

    #[test]
    fn non_isometry_rejected() {
        let g = GramLattice::from_rows(&[[-3, 1], [1, -2]]).unwrap();
        let t = StandardTarget::new(4, -1).unwrap();
        let phi = LatticeEmbedding::new(
            Matrix::from_rows(&[[-1, 1], [0, 1], [1, 0], [1, 0]]).unwrap(),
            t,
            g,
        )
        .unwrap();
        let swap = Matrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert!(find_equivariant_witness(&phi, &swap).is_err());
        assert!(span_restriction_test(&phi, &swap).is_err());
    }

    #[test]
    fn swapping_orthogonal_unit_vectors() {
        // (Z^2, -Id) into (Z^3, -Id), f swaps the basis vectors: F swaps the
        // first two coordinates and fixes the third.
        let g = GramLattice::from_rows(&[[-1, 0], [0, -1]]).unwrap();
        let t = StandardTarget::new(3, -1).unwrap();
        let phi = LatticeEmbedding::new(Matrix::from_rows(&[[1, 0], [0, 1], [0, 0]]).unwrap(), t, g).unwrap();
        let f = Matrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        let v = find_equivariant_witness(&phi, &f).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.perm(), &[1, 0, 2]);
        assert_eq!(w.signs(), &[1, 1, 1]);
    }
}
