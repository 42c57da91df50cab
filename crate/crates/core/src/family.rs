//! Built-in examples: the connected sums `K_n` of `n` figure-eight knots with
//! their rotational symmetry, and the 3-periodic slice knot 12a_1019.

use serde::{Deserialize, Serialize};

use crate::diagram::{CheckerboardDiagram, RegionAction};
use crate::error::{Error, Result};
use crate::lattice::{GramLattice, LatticeEmbedding, StandardTarget};
use crate::matrix::Matrix;
use crate::obstruction::KnotCertificate;

/// The Goeritz form of one figure-eight summand.
pub const FIGURE_EIGHT_BLOCK: [[i64; 2]; 2] = [[-3, 1], [1, -2]];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub n: usize,
    pub certificate: KnotCertificate,
    pub closed_form_embeddings: Vec<LatticeEmbedding>,
}

/// Block sum of `n` copies of [`FIGURE_EIGHT_BLOCK`].
pub fn goeritz_gn(n: usize) -> Result<GramLattice> {
    if n < 1 {
        return Err(Error::input("K_n needs at least one summand"));
    }
    let block = Matrix::from_rows(&FIGURE_EIGHT_BLOCK)?;
    let mut g = block.clone();
    for _ in 1..n {
        g = g.direct_sum(&block);
    }
    GramLattice::new(g)
}

/// The rotation `X_i -> X_{i+2}` (indices mod `2n`), as a matrix whose
/// column `i` is the image of `X_{i+1}`.
pub fn action_fn(n: usize) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::input("K_n has no rotational symmetry for n < 2"));
    }
    let size = 2 * n;
    let mut f = Matrix::zeros(size, size);
    for l in 0..size {
        f[((l + 2) % size, l)] = 1;
    }
    Ok(f)
}

/// Region-level form of [`action_fn`]; the unbounded region 0 is fixed.
pub fn region_action_kn(n: usize) -> Result<RegionAction> {
    if n < 2 {
        return Err(Error::input("K_n has no rotational symmetry for n < 2"));
    }
    let size = 2 * n;
    let perm = std::iter::once(0).chain((1..=size).map(|i| (i + 1) % size + 1)).collect();
    Ok(RegionAction::new(perm, n as u32))
}

/// A crossing encoding of the symmetric checkerboard diagram of `K_n`.
/// Region 0 is the unbounded region; summand `k` contributes regions
/// `2k-1, 2k`.
pub fn diagram_kn(n: usize) -> Result<CheckerboardDiagram> {
    if n < 1 {
        return Err(Error::input("K_n needs at least one summand"));
    }
    let mut triples = Vec::with_capacity(4 * n);
    for k in 1..=n {
        let (a, b) = (2 * k - 1, 2 * k);
        triples.extend([(0, a, -1), (0, a, -1), (a, b, -1), (b, 0, -1)]);
    }
    Ok(CheckerboardDiagram::from_triples(2 * n + 1, &triples)?.with_label(format!("K_{}", n)))
}

/// Columns of the closed-form embeddings, as `(Y_1..Y_4)` coordinates.
fn psi_columns(which: u8) -> Option<[[i64; 4]; 4]> {
    match which {
        1 => Some([[-1, 0, 1, -1], [1, 1, 0, 0], [-1, 1, -1, 0], [0, 0, 1, 1]]),
        2 => Some([[-1, 0, 1, -1], [1, 1, 0, 0], [1, -1, 0, -1], [0, 0, 1, 1]]),
        _ => None,
    }
}

/// `psi_1`, `psi_2 : (Z^4, G_2) -> (Z^4, -Id)` and
/// `psi_3 : (Z^2, G_1) -> (Z^4, -Id)`.
pub fn psi_block(which: u8) -> Result<LatticeEmbedding> {
    let target = StandardTarget::new(4, -1)?;
    match which {
        1 | 2 => {
            let cols = psi_columns(which).expect("checked");
            LatticeEmbedding::new(Matrix::from_cols(4, &cols), target, goeritz_gn(2)?)
        }
        3 => LatticeEmbedding::new(
            Matrix::from_cols(4, &[[-1, 0, 1, 1], [1, 1, 0, 0]]),
            target,
            goeritz_gn(1)?,
        ),
        _ => Err(Error::input(format!("no closed-form block psi_{}", which))),
    }
}

/// Every block sum from the closed-form families, as raw matrices. Even `n`:
/// `psi_{i_1} + ... + psi_{i_{n/2}}` padded by one zero row; odd `n`: sums
/// ending in `psi_3`. Index tuples are listed in lexicographic order.
pub fn family_embeddings(n: usize) -> Result<Vec<LatticeEmbedding>> {
    let source = goeritz_gn(n)?;
    let pairs = n / 2;
    let (rank, tail) = if n.is_multiple_of(2) { (2 * n + 1, None) } else { (2 * n + 2, Some(psi_block(3)?)) };
    let target = StandardTarget::new(rank, -1)?;
    let blocks = [psi_block(1)?, psi_block(2)?];
    let mut out = Vec::with_capacity(1 << pairs);
    for mask in 0..(1usize << pairs) {
        let mut phi: Option<Matrix> = None;
        for p in 0..pairs {
            // first index varies slowest
            let choice = (mask >> (pairs - 1 - p)) & 1;
            let b = blocks[choice].matrix();
            phi = Some(match phi {
                None => b.clone(),
                Some(acc) => acc.direct_sum(b),
            });
        }
        if let Some(t) = &tail {
            phi = Some(match phi {
                None => t.matrix().clone(),
                Some(acc) => acc.direct_sum(t.matrix()),
            });
        }
        let mut phi = phi.expect("n >= 1");
        if phi.nrows() < rank {
            phi = phi.pad_rows(rank - phi.nrows());
        }
        out.push(LatticeEmbedding::new(phi, target, source.clone())?);
    }
    Ok(out)
}

/// Matrix of the automorphism of `G_n` sending summand `k` to summand
/// `sigma[k]`.
pub fn block_permutation(sigma: &[usize]) -> Result<Matrix> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut q = Matrix::zeros(2 * n, 2 * n);
    for (k, &s) in sigma.iter().enumerate() {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::input(format!("{:?} is not a permutation", sigma)));
        }
        q[(2 * s, 2 * k)] = 1;
        q[(2 * s + 1, 2 * k + 1)] = 1;
    }
    Ok(q)
}

/// Canonical classes of `phi . Q` over every family member `phi` and every
/// summand permutation `Q`, sorted.
pub fn reindexed_family_classes(n: usize) -> Result<Vec<Matrix>> {
    let fam = family_embeddings(n)?;
    let mut out = std::collections::BTreeSet::new();
    let mut sigma: Vec<usize> = (0..n).collect();
    loop {
        let q = block_permutation(&sigma)?;
        for e in &fam {
            out.insert(crate::signed_perm::canonical_matrix(&e.matrix().mul(&q)));
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).expect("pivot exists");
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Certificate for `K_n`: `sigma = 0`, `Arf = n mod 2`, `G_+ = -G_-`, both
/// forms acted on by [`action_fn`], and the known value of the
/// non-equivariant genus (2 for odd `n`, 1 for even `n`).
pub fn make_certificate_kn(n: usize) -> Result<KnotCertificate> {
    if n < 2 {
        return Err(Error::input("K_n is periodic only for n >= 2"));
    }
    let g = goeritz_gn(n)?;
    let f = action_fn(n)?;
    KnotCertificate::new(
        format!("K_{}", n),
        g.clone(),
        g.negated(),
        f.clone(),
        f,
        n as u32,
        0,
        (n % 2) as u8,
        Some(if n % 2 == 1 { 2 } else { 1 }),
    )
}

pub fn instance_kn(n: usize) -> Result<FamilyInstance> {
    Ok(FamilyInstance { n, certificate: make_certificate_kn(n)?, closed_form_embeddings: family_embeddings(n)? })
}

/// `G_-` of the checkerboard coloring with twelve weight -1 crossings.
pub fn goeritz_minus_12a1019() -> GramLattice {
    GramLattice::from_rows(&[
        [-4, 1, 1, 1, 0, 0],
        [1, -4, 1, 0, 1, 0],
        [1, 1, -4, 0, 0, 1],
        [1, 0, 0, -3, 1, 1],
        [0, 1, 0, 1, -3, 1],
        [0, 0, 1, 1, 1, -3],
    ])
    .expect("fixture is symmetric")
}

/// `(X_1 X_2 X_3)(X_4 X_5 X_6)` on the regions of [`diagram_12a1019`].
pub fn action_12a1019() -> RegionAction {
    RegionAction::new(vec![0, 2, 3, 1, 5, 6, 4], 3)
}

/// A crossing encoding consistent with the fixture's `G_-`: three crossings
/// from the outer region to `X_1, X_2, X_3`, one crossing for each unit
/// off-diagonal entry, all of weight -1.
pub fn diagram_12a1019() -> CheckerboardDiagram {
    CheckerboardDiagram::from_triples(
        7,
        &[
            (0, 1, -1),
            (0, 2, -1),
            (0, 3, -1),
            (1, 2, -1),
            (1, 3, -1),
            (2, 3, -1),
            (1, 4, -1),
            (2, 5, -1),
            (3, 6, -1),
            (4, 5, -1),
            (4, 6, -1),
            (5, 6, -1),
        ],
    )
    .expect("fixture is well formed")
    .with_label("12a_1019")
}

/// The two embeddings `(Z^6, G_-) -> (Z^7, -Id)` found by hand for 12a_1019.
pub fn phi_12a1019(which: u8) -> Result<LatticeEmbedding> {
    // columns X_1..X_6 in Y_1..Y_7 coordinates
    let cols: [[i64; 7]; 6] = match which {
        1 => [
            [0, 0, -1, -1, 1, -1, 0],
            [0, 1, -1, 0, -1, 1, 0],
            [-1, 0, 1, 0, -1, -1, 0],
            [1, 1, 1, 0, 0, 0, 0],
            [-1, 0, 0, 1, 1, 0, 0],
            [0, -1, 0, -1, 0, 1, 0],
        ],
        2 => [
            [0, 0, -1, 1, -1, 1, 0],
            [0, -1, 1, 0, -1, -1, 0],
            [1, 0, -1, 0, 1, -1, 0],
            [1, 1, 1, 0, 0, 0, 0],
            [-1, 0, 0, 1, 1, 0, 0],
            [0, -1, 0, -1, 0, 1, 0],
        ],
        _ => return Err(Error::input(format!("no embedding phi_{} for 12a_1019", which))),
    };
    LatticeEmbedding::new(Matrix::from_cols(7, &cols), StandardTarget::new(7, -1)?, goeritz_minus_12a1019())
}

/// Certificate for 12a_1019. The knot is slice, which forces `sigma = 0`
/// and `Arf = 0`.
pub fn fixture_12a1019() -> KnotCertificate {
    let g = goeritz_minus_12a1019();
    let f = crate::diagram::induced_action_matrix(&diagram_12a1019(), &action_12a1019())
        .expect("fixture action fixes region 0");
    KnotCertificate::new("12a_1019".into(), g.clone(), g.negated(), f.clone(), f, 3, 0, 0, None)
        .expect("fixture is valid")
}
