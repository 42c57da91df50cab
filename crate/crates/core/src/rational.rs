//! Exact linear algebra over `Z` and `Q`: principal minors, integer kernels,
//! Hermite normal form, saturation of sublattices, and solving in a column
//! span.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

pub type BigMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &Matrix) -> BigMatrix {
    m.rows_iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

/// Leading principal minors `D_1, ..., D_n` by fraction-free (Bareiss)
/// elimination. Stops early at the first vanishing minor, which is then the
/// last element returned.
pub fn leading_principal_minors(m: &Matrix) -> Vec<BigInt> {
    let n = m.nrows();
    let mut a = to_big(m);
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &pivot - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = pivot;
    }
    minors
}

/// A `Z`-basis (as vectors) of `{x in Z^cols : a x = 0}`.
pub fn integer_kernel(a: &BigMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    // Work on columns: c[j] is column j of `a`, u[j] the matching column of
    // the unimodular transform.
    let mut c: Vec<Vec<BigInt>> = (0..cols).map(|j| (0..rows).map(|i| a[i][j].clone()).collect()).collect();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot = 0;
    for i in 0..rows {
        if pivot == cols {
            break;
        }
        loop {
            // smallest nonzero |entry| in row i among columns pivot..
            let best = (pivot..cols).filter(|&j| !c[j][i].is_zero()).min_by(|&x, &y| c[x][i].abs().cmp(&c[y][i].abs()));
            let Some(b) = best else { break };
            c.swap(pivot, b);
            u.swap(pivot, b);
            let mut done = true;
            for j in pivot + 1..cols {
                if c[j][i].is_zero() {
                    continue;
                }
                let q = c[j][i].div_floor(&c[pivot][i]);
                for r in 0..rows {
                    let t = &q * &c[pivot][r];
                    c[j][r] -= t;
                }
                for r in 0..cols {
                    let t = &q * &u[pivot][r];
                    u[j][r] -= t;
                }
                if !c[j][i].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot < cols && !c[pivot][i].is_zero() {
            pivot += 1;
        }
    }
    (pivot..cols).map(|j| u[j].clone()).collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`, zero rows
/// dropped. Pivots are positive and entries above a pivot lie in
/// `[0, pivot)`. Unique for a given lattice.
pub fn hermite_normal_form(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        if r == a.len() {
            break;
        }
        loop {
            let best = (r..a.len()).filter(|&i| !a[i][col].is_zero()).min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                for k in 0..ncols {
                    let t = &q * &a[r][k];
                    a[i][k] -= t;
                }
                if !a[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][col].is_zero() {
            if a[r][col].is_negative() {
                for v in a[r].iter_mut() {
                    *v = -v.clone();
                }
            }
            for i in 0..r {
                let q = a[i][col].div_floor(&a[r][col]);
                if !q.is_zero() {
                    for k in 0..ncols {
                        let t = &q * &a[r][k];
                        a[i][k] -= t;
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// HNF basis (as rows) of the saturation `span_Q(columns of phi) ∩ Z^m`.
pub fn saturation_basis(phi: &Matrix) -> Vec<Vec<BigInt>> {
    let m = phi.nrows();
    let phi_t = to_big(&phi.transpose());
    let perp = integer_kernel(&phi_t, m);
    let basis = if perp.is_empty() {
        (0..m)
            .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    } else {
        integer_kernel(&perp, m)
    };
    hermite_normal_form(&basis, m)
}

/// Solves `A x = w` for each right-hand side, where `A` has the given columns
/// and full column rank. `None` if some `w` is outside the span.
pub fn solve_in_span(
    columns: &[Vec<BigRational>],
    rhs: &[Vec<BigRational>],
) -> Option<Vec<Vec<BigRational>>> {
    let r = columns.len();
    let m = columns.first().map_or(0, Vec::len);
    let k = rhs.len();
    // augmented m x (r + k)
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|i| columns.iter().map(|c| c[i].clone()).chain(rhs.iter().map(|w| w[i].clone())).collect())
        .collect();
    let mut row = 0;
    let mut pivots = Vec::with_capacity(r);
    for col in 0..r {
        let p = (row..m).find(|&i| !a[i][col].is_zero())?;
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..r + k {
                    let t = &f * &a[row][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    // consistency: leftover rows must vanish on the right-hand sides
    if a[row..].iter().any(|rw| rw[r..].iter().any(|v| !v.is_zero())) {
        return None;
    }
    Some((0..k).map(|s| (0..r).map(|t| a[pivots[t]][r + s].clone()).collect()).collect())
}

/// Exact rational number that serializes as `[numerator, denominator]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub BigRational);

impl Fraction {
    pub fn new(num: i64, den: i64) -> Self {
        Fraction(BigRational::new(num.into(), den.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match (self.numer().to_i64(), self.denom().to_i64()) {
            (Some(n), Some(d)) => (n, d).serialize(s),
            _ => (self.numer().to_string(), self.denom().to_string()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Part {
            Int(i64),
            Text(String),
        }
        let parse = |p: Part| -> Result<BigInt, D::Error> {
            match p {
                Part::Int(v) => Ok(BigInt::from(v)),
                Part::Text(t) => t.parse().map_err(serde::de::Error::custom),
            }
        };
        let (n, dd) = <(Part, Part)>::deserialize(d)?;
        let den = parse(dd)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Fraction(BigRational::new(parse(n)?, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn minors_of_figure_eight_block() {
        let m = Matrix::from_rows(&[[-3, 1], [1, -2]]).unwrap();
        assert_eq!(leading_principal_minors(&m), vec![BigInt::from(-3), BigInt::from(5)]);
    }

    #[test]
    fn minors_match_cofactor_expansion() {
        let m = Matrix::from_rows(&[[2, -1, 0], [-1, 2, -1], [0, -1, 2]]).unwrap();
        assert_eq!(
            leading_principal_minors(&m),
            vec![BigInt::from(2), BigInt::from(3), BigInt::from(4)]
        );
    }

    #[test]
    fn kernel_of_simple_row() {
        let a = big(&[&[1, 1, 0]]);
        let k = integer_kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&v[0] + &v[1]).is_zero());
        }
        // the kernel is saturated: it contains (1,-1,0) and (0,0,1)
        let hnf = hermite_normal_form(&k, 3);
        assert_eq!(hnf, big(&[&[1, -1, 0], &[0, 0, 1]]));
    }

    #[test]
    fn saturation_of_index_two_sublattice() {
        // span{(2, 0)} saturates to span{(1, 0)}
        let phi = Matrix::from_rows(&[[2], [0]]).unwrap();
        assert_eq!(saturation_basis(&phi), big(&[&[1, 0]]));
        // span{(1,1,0),(1,-1,0)} has index 2 in Z^2 x 0
        let phi = Matrix::from_rows(&[[1, 1], [1, -1], [0, 0]]).unwrap();
        assert_eq!(saturation_basis(&phi), big(&[&[1, 0, 0], &[0, 1, 0]]));
    }

    #[test]
    fn hnf_is_basis_independent() {
        let a = big(&[&[3, 1, 4], &[1, 5, 9]]);
        let b = big(&[&[4, 6, 13], &[-1, -5, -9]]);
        assert_eq!(hermite_normal_form(&a, 3), hermite_normal_form(&b, 3));
    }

    #[test]
    fn solve_rejects_outside_span() {
        let q = |v: i64| BigRational::from_integer(BigInt::from(v));
        let cols = vec![vec![q(1), q(0), q(0)]];
        assert!(solve_in_span(&cols, &[vec![q(0), q(1), q(0)]]).is_none());
        assert_eq!(solve_in_span(&cols, &[vec![q(3), q(0), q(0)]]).unwrap(), vec![vec![q(3)]]);
    }

    #[test]
    fn fraction_json() {
        let f = Fraction::new(-2, 5);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[-2,5]");
        assert_eq!(serde_json::from_str::<Fraction>("[-2,5]").unwrap(), f);
        assert_eq!(f.to_string(), "-2/5");
    }
}
