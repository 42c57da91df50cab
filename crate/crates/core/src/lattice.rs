//! Integral lattices and their embeddings into the standard definite lattices
//! `(Z^m, ±Id)`.
//!
//! [`enumerate_embeddings`] finds every embedding up to post-composition by a
//! signed permutation. It places the images of the basis vectors one column
//! at a time; within a column the entries are chosen coordinate by
//! coordinate under norm and inner-product bounds. Coordinates that the
//! columns placed so far cannot tell apart (equal rows up to sign) are
//! interchangeable, so the new entries on each such class are required to be
//! non-increasing (and non-negative on coordinates not yet touched). Whatever
//! duplicates survive are removed by the canonical form of
//! [`crate::signed_perm`].

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rational;
use crate::signed_perm::{self, SignedPermutation};

/// A symmetric integer matrix on a labelled basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    matrix: Matrix,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    basis_labels: Vec<String>,
}

impl GramLattice {
    /// Wraps a symmetric matrix, labelling the basis `X_1..X_n`.
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.nrows() == 0 || !matrix.is_square() {
            return Err(Error::input(format!(
                "Gram matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !matrix.is_symmetric() {
            return Err(Error::input("Gram matrix is not symmetric"));
        }
        let basis_labels = (1..=matrix.nrows()).map(|i| format!("X_{}", i)).collect();
        Ok(GramLattice { matrix, basis_labels })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn negated(&self) -> GramLattice {
        GramLattice { matrix: self.matrix.neg(), basis_labels: self.basis_labels.clone() }
    }

    pub fn is_definite(&self, sign: i8) -> bool {
        is_definite(self, sign)
    }
}

/// `(Z^rank, sign * Id)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandardTarget {
    pub rank: usize,
    pub sign: i8,
}

impl StandardTarget {
    pub fn new(rank: usize, sign: i8) -> Result<Self> {
        if rank == 0 {
            return Err(Error::input("target rank must be positive"));
        }
        check_sign(sign)?;
        Ok(StandardTarget { rank, sign })
    }
}

pub(crate) fn check_sign(sign: i8) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(Error::input(format!("sign must be +1 or -1, got {}", sign)))
    }
}

/// An embedding `phi : (Z^n, G) -> (Z^m, ±Id)`; column `j` is the image of
/// the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEmbedding {
    matrix: Matrix,
    target: StandardTarget,
    source: GramLattice,
    /// Whether `matrix` is the canonical representative of its orbit.
    canonical: bool,
}

impl LatticeEmbedding {
    /// Checks `sign * phi^T phi = G` exactly.
    pub fn new(matrix: Matrix, target: StandardTarget, source: GramLattice) -> Result<Self> {
        if matrix.nrows() != target.rank || matrix.ncols() != source.rank() {
            return Err(Error::input(format!(
                "embedding matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.rank,
                source.rank()
            )));
        }
        if &gram_of(&matrix, target) != source.matrix() {
            return Err(Error::input("embedding does not preserve the form"));
        }
        let canonical = signed_perm::canonical_matrix(&matrix) == matrix;
        Ok(LatticeEmbedding { matrix, target, source, canonical })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn target(&self) -> StandardTarget {
        self.target
    }

    pub fn source(&self) -> &GramLattice {
        &self.source
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Image under a signed permutation of the target.
    pub fn transformed(&self, t: &SignedPermutation) -> LatticeEmbedding {
        let matrix = t.apply(&self.matrix);
        let canonical = signed_perm::canonical_matrix(&matrix) == matrix;
        LatticeEmbedding { matrix, target: self.target, source: self.source.clone(), canonical }
    }
}

/// Exact test via the signs of the leading principal minors.
pub fn is_definite(l: &GramLattice, sign: i8) -> bool {
    if check_sign(sign).is_err() {
        return false;
    }
    rational::leading_principal_minors(l.matrix())
        .into_iter()
        .enumerate()
        .all(|(k, d)| {
            // sign^(k+1) * D_{k+1} > 0
            let positive = d > num_bigint::BigInt::from(0);
            let negative = d < num_bigint::BigInt::from(0);
            if sign == 1 || k % 2 == 1 {
                positive
            } else {
                negative
            }
        })
}

/// `sign * phi^T phi`.
pub fn gram_of(phi: &Matrix, target: StandardTarget) -> Matrix {
    phi.transpose().mul(phi).scale(i64::from(target.sign))
}

pub fn canonicalize(phi: &LatticeEmbedding) -> LatticeEmbedding {
    let matrix = signed_perm::canonical_matrix(&phi.matrix);
    LatticeEmbedding { matrix, target: phi.target, source: phi.source.clone(), canonical: true }
}

/// A witness `T` with `T * a = b`, if one exists.
pub fn embeddings_equivalent(
    a: &LatticeEmbedding,
    b: &LatticeEmbedding,
) -> Result<Option<SignedPermutation>> {
    if a.target != b.target || a.source.matrix() != b.source.matrix() {
        return Err(Error::input("embeddings have different sources or targets"));
    }
    signed_perm::matrices_equivalent(&a.matrix, &b.matrix)
}

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of search nodes (coordinate assignments) to visit.
    pub budget: u64,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            budget: DEFAULT_BUDGET,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SearchLimits {
    pub fn with_budget(budget: u64) -> Self {
        SearchLimits { budget, ..Default::default() }
    }

    pub fn single_threaded(budget: u64) -> Self {
        SearchLimits { budget, jobs: 1 }
    }
}

struct Counter<'a> {
    shared: &'a AtomicU64,
    aborted: &'a AtomicBool,
    budget: u64,
    local: u64,
}

impl Counter<'_> {
    const BATCH: u64 = 4096;

    #[inline]
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local >= Self::BATCH {
            return self.flush();
        }
        true
    }

    fn flush(&mut self) -> bool {
        let total = self.shared.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        !self.aborted.load(Ordering::Relaxed)
    }
}

/// Fixed data of one embedding problem.
struct Problem {
    m: usize,
    n: usize,
    /// `|g_jj|`
    norms: Vec<i64>,
    /// `sign * g_ij`: the required plain dot products.
    dots: Matrix,
}

/// Per-column symmetry data: for each coordinate, its orientation and the
/// previous coordinate in the same class.
struct ColumnClasses {
    orient: Vec<i64>,
    prev: Vec<Option<usize>>,
    fresh: Vec<bool>,
}

impl ColumnClasses {
    fn new(m: usize, cols: &[Vec<i64>]) -> Self {
        let mut orient = vec![1; m];
        let mut keys: Vec<Vec<i64>> = Vec::with_capacity(m);
        for q in 0..m {
            let row: Vec<i64> = cols.iter().map(|c| c[q]).collect();
            let s = match row.iter().find(|&&v| v != 0) {
                Some(&v) if v < 0 => -1,
                _ => 1,
            };
            orient[q] = s;
            keys.push(row.into_iter().map(|v| s * v).collect());
        }
        let fresh = keys.iter().map(|k| k.iter().all(|&v| v == 0)).collect();
        let prev = (0..m).map(|q| (0..q).rev().find(|&p| keys[p] == keys[q])).collect();
        ColumnClasses { orient, prev, fresh }
    }
}

struct ColumnSearch<'a> {
    problem: &'a Problem,
    cols: &'a [Vec<i64>],
    classes: ColumnClasses,
    /// suffix_sq[i][q] = sum of cols[i][q..]^2
    suffix_sq: Vec<Vec<i64>>,
    targets: Vec<i64>,
}

impl<'a> ColumnSearch<'a> {
    fn new(problem: &'a Problem, cols: &'a [Vec<i64>]) -> Self {
        let j = cols.len();
        let m = problem.m;
        let suffix_sq = cols
            .iter()
            .map(|c| {
                let mut s = vec![0; m + 1];
                for q in (0..m).rev() {
                    s[q] = s[q + 1] + c[q] * c[q];
                }
                s
            })
            .collect();
        let targets = (0..j).map(|i| problem.dots[(i, j)]).collect();
        ColumnSearch { problem, cols, classes: ColumnClasses::new(m, cols), suffix_sq, targets }
    }

    /// Calls `emit` for every admissible next column; returns false if the
    /// budget ran out.
    fn run(&self, counter: &mut Counter<'_>, emit: &mut dyn FnMut(&[i64], &mut Counter<'_>) -> bool) -> bool {
        let norm = self.problem.norms[self.cols.len()];
        let mut v = vec![0i64; self.problem.m];
        let mut partial = vec![0i64; self.cols.len()];
        self.step(0, norm, &mut v, &mut partial, counter, emit)
    }

    fn step(
        &self,
        q: usize,
        rem: i64,
        v: &mut Vec<i64>,
        partial: &mut Vec<i64>,
        counter: &mut Counter<'_>,
        emit: &mut dyn FnMut(&[i64], &mut Counter<'_>) -> bool,
    ) -> bool {
        if !counter.tick() {
            return false;
        }
        let m = self.problem.m;
        if q == m {
            if rem == 0 && partial.iter().zip(&self.targets).all(|(a, b)| a == b) {
                return emit(v, counter);
            }
            return true;
        }
        // Cauchy-Schwarz: the remaining coordinates must be able to close
        // every inner-product gap.
        for (i, (&s, &t)) in partial.iter().zip(&self.targets).enumerate() {
            let gap = t - s;
            if gap * gap > rem * self.suffix_sq[i][q] {
                return true;
            }
        }
        let bound = isqrt(rem);
        let orient = self.classes.orient[q];
        // Oriented value w = orient * v must not exceed the previous one in
        // the class.
        let upper = match self.classes.prev[q] {
            Some(p) => (self.classes.orient[p] * v[p]).min(bound),
            None => bound,
        };
        let lower = if self.classes.fresh[q] { 0 } else { -bound };
        let mut w = upper;
        while w >= lower {
            let x = orient * w;
            v[q] = x;
            for (i, c) in self.cols.iter().enumerate() {
                partial[i] += x * c[q];
            }
            let ok = self.step(q + 1, rem - x * x, v, partial, counter, emit);
            for (i, c) in self.cols.iter().enumerate() {
                partial[i] -= x * c[q];
            }
            if !ok {
                v[q] = 0;
                return false;
            }
            w -= 1;
        }
        v[q] = 0;
        true
    }
}

fn isqrt(x: i64) -> i64 {
    if x <= 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn complete(
    problem: &Problem,
    cols: &mut Vec<Vec<i64>>,
    counter: &mut Counter<'_>,
    out: &mut BTreeSet<Matrix>,
) -> bool {
    if cols.len() == problem.n {
        let phi = Matrix::from_cols(problem.m, cols);
        out.insert(signed_perm::canonical_matrix(&phi));
        return true;
    }
    let snapshot = cols.clone();
    let search = ColumnSearch::new(problem, &snapshot);
    search.run(counter, &mut |v, counter| {
        cols.push(v.to_vec());
        let ok = complete(problem, cols, counter, out);
        cols.pop();
        ok
    })
}

/// Partial solutions with `depth` columns placed, used to split the search.
fn prefixes(
    problem: &Problem,
    depth: usize,
    counter: &mut Counter<'_>,
) -> Option<Vec<Vec<Vec<i64>>>> {
    let mut frontier: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for cols in &frontier {
            let search = ColumnSearch::new(problem, cols);
            let ok = search.run(counter, &mut |v, _| {
                let mut c = cols.clone();
                c.push(v.to_vec());
                next.push(c);
                true
            });
            if !ok {
                return None;
            }
        }
        frontier = next;
    }
    Some(frontier)
}

/// All embeddings of `(Z^n, G)` into `(Z^{n+corank}, sign * Id)` up to
/// signed permutations of the target, one canonical representative per
/// class, sorted by canonical matrix.
///
/// Returns an empty list when `G` is not definite of the requested sign, and
/// [`Error::Incomplete`] if the node budget runs out.
pub fn enumerate_embeddings(
    l: &GramLattice,
    corank: usize,
    sign: i8,
    limits: SearchLimits,
) -> Result<Vec<LatticeEmbedding>> {
    check_sign(sign)?;
    if limits.budget == 0 {
        return Err(Error::input("search budget must be positive"));
    }
    if !is_definite(l, sign) {
        return Ok(Vec::new());
    }
    let n = l.rank();
    let m = n + corank;
    let target = StandardTarget::new(m, sign)?;
    let g = l.matrix();
    let problem = Problem {
        m,
        n,
        norms: (0..n).map(|j| g[(j, j)].abs()).collect(),
        dots: g.scale(i64::from(sign)),
    };

    let shared = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    let new_counter = || Counter { shared: &shared, aborted: &aborted, budget: limits.budget, local: 0 };

    let classes: BTreeSet<Matrix> = if limits.jobs <= 1 {
        let mut counter = new_counter();
        let mut out = BTreeSet::new();
        let ok = complete(&problem, &mut Vec::new(), &mut counter, &mut out) && counter.flush();
        if !ok {
            return Err(Error::Incomplete { budget: limits.budget });
        }
        out
    } else {
        let mut counter = new_counter();
        let depth = n.min(2);
        let roots = prefixes(&problem, depth, &mut counter)
            .filter(|_| counter.flush())
            .ok_or(Error::Incomplete { budget: limits.budget })?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(limits.jobs)
            .build()
            .map_err(|e| Error::input(format!("cannot start worker pool: {}", e)))?;
        let parts: Vec<Option<BTreeSet<Matrix>>> = pool.install(|| {
            roots
                .into_par_iter()
                .map(|mut cols| {
                    let mut counter = new_counter();
                    let mut out = BTreeSet::new();
                    let ok = complete(&problem, &mut cols, &mut counter, &mut out) && counter.flush();
                    ok.then_some(out)
                })
                .collect()
        });
        let mut merged = BTreeSet::new();
        for part in parts {
            merged.extend(part.ok_or(Error::Incomplete { budget: limits.budget })?);
        }
        merged
    };

    Ok(classes
        .into_iter()
        .map(|matrix| LatticeEmbedding { matrix, target, source: l.clone(), canonical: true })
        .collect())
}

/// Exhaustive oracle for [`enumerate_embeddings`]: tries every tuple of
/// columns from the box `|a| <= floor(sqrt|g_jj|)` with no symmetry
/// reduction, then groups the solutions by canonical form.
///
/// Refuses `n + corank > 8` or `max |g_ii| > 4`.
pub fn brute_force_embeddings(l: &GramLattice, corank: usize, sign: i8) -> Result<Vec<LatticeEmbedding>> {
    check_sign(sign)?;
    let n = l.rank();
    let m = n + corank;
    let g = l.matrix();
    let max_diag = (0..n).map(|i| g[(i, i)].abs()).max().unwrap_or(0);
    if m > 8 {
        return Err(Error::GuardExceeded(format!("n + corank = {} exceeds 8", m)));
    }
    if max_diag > 4 {
        return Err(Error::GuardExceeded(format!("max |g_ii| = {} exceeds 4", max_diag)));
    }
    let target = StandardTarget::new(m, sign)?;
    let s = i64::from(sign);

    let candidates: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|j| {
            let b = isqrt(g[(j, j)].abs());
            box_vectors(m, b).into_iter().filter(|v| s * dot(v, v) == g[(j, j)]).collect()
        })
        .collect();

    fn extend(
        j: usize,
        cols: &mut Vec<Vec<i64>>,
        candidates: &[Vec<Vec<i64>>],
        g: &Matrix,
        s: i64,
        out: &mut BTreeSet<Matrix>,
    ) {
        let m = cols.first().map_or(0, Vec::len);
        if j == candidates.len() {
            out.insert(signed_perm::canonical_matrix(&Matrix::from_cols(m, cols)));
            return;
        }
        for v in &candidates[j] {
            if cols.iter().enumerate().all(|(i, c)| s * dot(c, v) == g[(i, j)]) {
                cols.push(v.clone());
                extend(j + 1, cols, candidates, g, s, out);
                cols.pop();
            }
        }
    }

    let classes: BTreeSet<Matrix> = if n == 0 || candidates[0].is_empty() {
        BTreeSet::new()
    } else {
        candidates[0]
            .par_iter()
            .map(|v0| {
                let mut out = BTreeSet::new();
                extend(1, &mut vec![v0.clone()], &candidates, g, s, &mut out);
                out
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    };
    Ok(classes
        .into_iter()
        .map(|matrix| LatticeEmbedding { matrix, target, source: l.clone(), canonical: true })
        .collect())
}

fn box_vectors(m: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(m)];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-b..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_rows(rows).unwrap()
    }

    #[test]
    fn definiteness() {
        let g1 = single(&[&[-3, 1], &[1, -2]]);
        assert!(g1.is_definite(-1));
        assert!(!g1.is_definite(1));
        assert!(g1.negated().is_definite(1));
        assert!(!single(&[&[-1]]).is_definite(1));
        assert!(single(&[&[-1]]).is_definite(-1));
        // indefinite and semidefinite forms
        assert!(!single(&[&[1, 0], &[0, -1]]).is_definite(1));
        assert!(!single(&[&[1, 1], &[1, 1]]).is_definite(1));
        assert!(!single(&[&[0]]).is_definite(-1));
    }

    #[test]
    fn rejects_non_symmetric() {
        assert!(GramLattice::from_rows(&[[1, 2], [3, 4]]).is_err());
        assert!(GramLattice::new(Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn gram_of_zero() {
        let t = StandardTarget::new(3, -1).unwrap();
        assert_eq!(gram_of(&Matrix::zeros(3, 2), t), Matrix::zeros(2, 2));
    }

    #[test]
    fn norm_minus_one_lattice() {
        let l = single(&[&[-1]]);
        let found = enumerate_embeddings(&l, 1, -1, SearchLimits::single_threaded(1000)).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].matrix(), &Matrix::from_rows(&[[1], [0]]).unwrap());
    }

    #[test]
    fn norm_minus_two_lattice() {
        let l = single(&[&[-2]]);
        let found = enumerate_embeddings(&l, 1, -1, SearchLimits::single_threaded(1000)).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].matrix(), &Matrix::from_rows(&[[1], [1]]).unwrap());
        let oracle = brute_force_embeddings(&l, 1, -1).unwrap();
        assert_eq!(oracle, found);
    }

    #[test]
    fn wrong_sign_gives_nothing() {
        let l = single(&[&[-3, 1], &[1, -2]]);
        assert!(enumerate_embeddings(&l, 2, 1, SearchLimits::default()).unwrap().is_empty());
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let l = single(&[&[-3, 1], &[1, -2]]);
        for jobs in [1, 4] {
            let limits = SearchLimits { budget: 5, jobs };
            assert_eq!(
                enumerate_embeddings(&l, 2, -1, limits),
                Err(Error::Incomplete { budget: 5 })
            );
        }
    }

    #[test]
    fn brute_force_guard() {
        let big = GramLattice::new(Matrix::identity(7).scale(-1)).unwrap();
        assert!(matches!(brute_force_embeddings(&big, 2, -1), Err(Error::GuardExceeded(_))));
        let wide = single(&[&[-5]]);
        assert!(matches!(brute_force_embeddings(&wide, 1, -1), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn embedding_constructor_checks_form() {
        let l = single(&[&[-2]]);
        let t = StandardTarget::new(2, -1).unwrap();
        assert!(LatticeEmbedding::new(Matrix::from_rows(&[[1], [1]]).unwrap(), t, l.clone()).is_ok());
        assert!(LatticeEmbedding::new(Matrix::from_rows(&[[1], [0]]).unwrap(), t, l).is_err());
    }

    #[test]
    fn isqrt_exact() {
        for x in 0..200i64 {
            let r = isqrt(x);
            assert!(r * r <= x && (r + 1) * (r + 1) > x);
        }
    }
}
