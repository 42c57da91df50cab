#![allow(dead_code)]

use goeritz_core::{GramLattice, Matrix, SignedPermutation};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_signed_perm<R: Rng>(rng: &mut R, m: usize) -> SignedPermutation {
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let signs = (0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    SignedPermutation::new(perm, signs).unwrap()
}

/// Negative definite form of the given rank with diagonal in `[-4, -1]`.
pub fn random_negative_definite<R: Rng>(rng: &mut R, rank: usize) -> GramLattice {
    loop {
        let mut g = Matrix::zeros(rank, rank);
        for i in 0..rank {
            g[(i, i)] = rng.gen_range(-4..=-1);
            for j in 0..i {
                let v = rng.gen_range(-2..=2);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        let l = GramLattice::new(g).unwrap();
        if l.is_definite(-1) {
            return l;
        }
    }
}
