//! The hyperoctahedral group acting on the standard lattice `Z^m`.
//!
//! Every isometry of `(Z^m, ±Id)` is a signed permutation, so post-composing
//! an embedding with an automorphism of the target permutes the rows of its
//! matrix and flips some of their signs. Orbits under that action therefore
//! have an easy canonical form: flip each row so that its first nonzero entry
//! is positive, then sort the rows in descending lexicographic order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `T` with `T[(r, perm[r])] = signs[r]`, i.e. `(T x)_r = signs[r] * x[perm[r]]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let m = perm.len();
        if signs.len() != m {
            return Err(Error::input("signed permutation: perm and signs differ in length"));
        }
        let mut seen = vec![false; m];
        for &p in &perm {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::input("signed permutation: perm is not a bijection"));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::input("signed permutation: signs must be +1 or -1"));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(m: usize) -> Self {
        SignedPermutation { perm: (0..m).collect(), signs: vec![1; m] }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn to_matrix(&self) -> Matrix {
        let m = self.size();
        let mut t = Matrix::zeros(m, m);
        for r in 0..m {
            t[(r, self.perm[r])] = i64::from(self.signs[r]);
        }
        t
    }

    /// Inverse of [`Self::to_matrix`]; `None` unless the matrix is a signed
    /// permutation matrix.
    pub fn from_matrix(t: &Matrix) -> Option<Self> {
        if !t.is_square() {
            return None;
        }
        let m = t.nrows();
        let mut perm = Vec::with_capacity(m);
        let mut signs = Vec::with_capacity(m);
        for row in t.rows_iter() {
            let nz: Vec<usize> = (0..m).filter(|&j| row[j] != 0).collect();
            if nz.len() != 1 || row[nz[0]].abs() != 1 {
                return None;
            }
            perm.push(nz[0]);
            signs.push(row[nz[0]] as i8);
        }
        Self::new(perm, signs).ok()
    }

    /// `self * other` as matrices.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.size(), other.size());
        // (S O x)_r = s_r (O x)_{p(r)} = s_r o_{p(r)} x_{q(p(r))}
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let signs = self.perm.iter().zip(&self.signs).map(|(&p, &s)| s * other.signs[p]).collect();
        SignedPermutation { perm, signs }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let m = self.size();
        let mut perm = vec![0; m];
        let mut signs = vec![1; m];
        for r in 0..m {
            perm[self.perm[r]] = r;
            signs[self.perm[r]] = self.signs[r];
        }
        SignedPermutation { perm, signs }
    }

    pub fn pow(&self, k: u64) -> SignedPermutation {
        let mut acc = SignedPermutation::identity(self.size());
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    /// `T * phi`, computed by moving rows.
    pub fn apply(&self, phi: &Matrix) -> Matrix {
        assert_eq!(self.size(), phi.nrows(), "signed permutation size mismatch");
        let rows: Vec<Vec<i64>> = (0..self.size())
            .map(|r| {
                let s = i64::from(self.signs[r]);
                phi.row(self.perm[r]).iter().map(|v| s * v).collect()
            })
            .collect();
        let mut out = Matrix::zeros(phi.nrows(), phi.ncols());
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                out[(r, c)] = v;
            }
        }
        out
    }

    /// Every element of the hyperoctahedral group of rank `m`
    /// (`2^m * m!` of them). Only meant for small `m`.
    pub fn all(m: usize) -> Vec<SignedPermutation> {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..m).collect();
        permutations(&mut current, 0, &mut perms);
        let mut out = Vec::with_capacity(perms.len() << m);
        for p in perms {
            for mask in 0u64..(1u64 << m) {
                let signs = (0..m).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                out.push(SignedPermutation { perm: p.clone(), signs });
            }
        }
        out
    }
}

fn permutations(current: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == current.len() {
        out.push(current.clone());
        return;
    }
    for i in k..current.len() {
        current.swap(k, i);
        permutations(current, k + 1, out);
        current.swap(k, i);
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedPermutation[")?;
        for r in 0..self.size() {
            if r > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", if self.signs[r] < 0 { "-" } else { "+" }, self.perm[r])?;
        }
        write!(f, "]")
    }
}

/// Sign that makes the first nonzero entry positive (1 for the zero row).
fn row_sign(row: &[i64]) -> i64 {
    match row.iter().find(|&&v| v != 0) {
        Some(&v) if v < 0 => -1,
        _ => 1,
    }
}

fn cmp_rows_desc(a: &[i64], b: &[i64]) -> Ordering {
    b.cmp(a)
}

/// Canonical representative of the orbit of `phi` under left multiplication
/// by signed permutations, together with the element `T` with
/// `T * phi = canonical`.
///
/// Rule: every row is multiplied by the sign of its first nonzero entry, and
/// rows are then sorted in descending lexicographic order (ties broken by
/// original row index, which does not affect the result). The representative
/// is the maximum of the orbit in row-major lexicographic order.
pub fn canonical_form_with_transform(phi: &Matrix) -> (Matrix, SignedPermutation) {
    let m = phi.nrows();
    let normalized: Vec<(Vec<i64>, i64)> = phi
        .rows_iter()
        .map(|row| {
            let s = row_sign(row);
            (row.iter().map(|v| s * v).collect(), s)
        })
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| cmp_rows_desc(&normalized[a].0, &normalized[b].0).then(a.cmp(&b)));
    let mut out = Matrix::zeros(m, phi.ncols());
    for (r, &src) in order.iter().enumerate() {
        for (c, &v) in normalized[src].0.iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    let signs = order.iter().map(|&src| normalized[src].1 as i8).collect();
    (out, SignedPermutation { perm: order, signs })
}

pub fn canonical_matrix(phi: &Matrix) -> Matrix {
    canonical_form_with_transform(phi).0
}

/// Finds `T` with `T * a = b`, if any.
pub fn matrices_equivalent(a: &Matrix, b: &Matrix) -> Result<Option<SignedPermutation>> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::input(format!(
            "cannot compare a {}x{} embedding with a {}x{} one",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let (ca, ta) = canonical_form_with_transform(a);
    let (cb, tb) = canonical_form_with_transform(b);
    if ca != cb {
        return Ok(None);
    }
    Ok(Some(tb.inverse().compose(&ta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_signed_perm(m: usize, rng: &mut impl Rng) -> SignedPermutation {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(rng);
        let signs = (0..m).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        SignedPermutation::new(perm, signs).unwrap()
    }

    #[test]
    fn matrix_round_trip_and_group_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_signed_perm(5, &mut rng);
            let b = random_signed_perm(5, &mut rng);
            assert_eq!(SignedPermutation::from_matrix(&a.to_matrix()).unwrap(), a);
            assert_eq!(a.compose(&b).to_matrix(), a.to_matrix().mul(&b.to_matrix()));
            assert!(a.compose(&a.inverse()).is_identity());
            let phi = Matrix::from_rows(&[[1, 2], [3, 4], [5, 6], [7, 8], [9, 10]]).unwrap();
            assert_eq!(a.apply(&phi), a.to_matrix().mul(&phi));
        }
    }

    #[test]
    fn group_order() {
        assert_eq!(SignedPermutation::all(3).len(), 48);
        assert_eq!(SignedPermutation::all(4).len(), 384);
    }

    /// Automorphisms of `(Z^m, Id)` are exactly signed permutations: every
    /// integer matrix with entries in [-1, 1] satisfying `T^T T = I` for
    /// m <= 3 is one (larger entries are ruled out by the column norms).
    #[test]
    fn orthogonal_integer_matrices_are_signed_permutations() {
        for m in 1..=3usize {
            let cells = m * m;
            let mut count = 0;
            for code in 0..3usize.pow(cells as u32) {
                let mut t = Matrix::zeros(m, m);
                let mut c = code;
                for k in 0..cells {
                    t[(k / m, k % m)] = (c % 3) as i64 - 1;
                    c /= 3;
                }
                if t.transpose().mul(&t) == Matrix::identity(m) {
                    count += 1;
                    assert!(SignedPermutation::from_matrix(&t).is_some());
                }
            }
            let factorial: usize = (1..=m).product();
            assert_eq!(count, factorial << m);
        }
    }

    #[test]
    fn canonical_form_is_idempotent_and_orbit_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let phi = Matrix::from_rows(&[[0, 1, -1], [2, 0, 0], [-1, -1, 0], [0, 0, 0], [1, -1, 0]]).unwrap();
        let canon = canonical_matrix(&phi);
        assert_eq!(canonical_matrix(&canon), canon);
        for _ in 0..100 {
            let t = random_signed_perm(5, &mut rng);
            let moved = t.apply(&phi);
            let (c, w) = canonical_form_with_transform(&moved);
            assert_eq!(c, canon);
            assert_eq!(w.apply(&moved), c);
            let back = matrices_equivalent(&moved, &phi).unwrap().unwrap();
            assert_eq!(back.apply(&moved), phi);
        }
    }

    #[test]
    fn equivalence_dimension_mismatch() {
        let a = Matrix::zeros(3, 2);
        let b = Matrix::zeros(4, 2);
        assert!(matrices_equivalent(&a, &b).is_err());
        assert!(matrices_equivalent(&a, &a).unwrap().unwrap().is_identity());
    }
}
