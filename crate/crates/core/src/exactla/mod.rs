//! Exact integer linear algebra: Smith normal form with optional unimodular
//! transforms, fraction-free determinants, cokernels and kernel ranks.

mod matrix;
mod snf;

pub use matrix::IntMatrix;
pub use snf::{snf, snf_with, SnfOptions, SnfResult};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::abelian::FinAbGroup;
use crate::error::{Error, Result};

/// `ℤ^rows / M·ℤ^cols`.
pub fn cokernel(m: &IntMatrix) -> FinAbGroup {
    let r = snf(m, false);
    cokernel_from_diagonal(&r.d, m.rows())
}

/// Cokernel of a matrix with `rows` rows whose Smith form diagonal is `d`.
pub fn cokernel_from_diagonal(d: &[BigInt], rows: usize) -> FinAbGroup {
    let mut diag = d.to_vec();
    diag.resize(rows.max(d.len()), BigInt::zero());
    FinAbGroup::from_diagonal(&diag).expect("Smith form entries are nonnegative")
}

/// `dim ker M = cols − rank M`.
pub fn kernel_rank(m: &IntMatrix) -> usize {
    m.cols() - snf(m, false).rank()
}

/// Exact determinant by Bareiss fraction-free elimination with row pivoting.
pub fn det_signed(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let a = a.data_mut();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            for j in 0..n {
                a.swap(k * n + j, i * n + j);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            let lead = a[i * n + k].clone();
            for j in k + 1..n {
                let mut x = &a[i * n + j] * &pivot;
                if !lead.is_zero() {
                    x -= &lead * &a[k * n + j];
                }
                a[i * n + j] = if prev.is_one() { x } else { x / &prev };
            }
        }
        prev = pivot;
    }
    let det = a[n * n - 1].clone();
    Ok(if negate { -det } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn determinants() {
        assert_eq!(det_signed(&m(&[vec![-1]])).unwrap(), BigInt::from(-1));
        assert_eq!(det_signed(&m(&[vec![-2, -1], vec![-1, -2]])).unwrap(), BigInt::from(3));
        assert_eq!(det_signed(&m(&[vec![0, 1], vec![1, 0]])).unwrap(), BigInt::from(-1));
        assert_eq!(
            det_signed(&m(&[vec![0, 0, 1], vec![0, 2, 0], vec![3, 0, 0]])).unwrap(),
            BigInt::from(-6)
        );
        assert_eq!(det_signed(&m(&[vec![1, 2], vec![2, 4]])).unwrap(), BigInt::zero());
        assert!(det_signed(&m(&[vec![1, 2]])).is_err());
    }

    #[test]
    fn cokernels() {
        let c = cokernel(&m(&[vec![3]]));
        assert_eq!(c.to_string(), "Z/3");
        let z = cokernel(&IntMatrix::zeros(2, 2));
        assert_eq!(z.free_rank(), 2);
        assert!(z.invariant_factors().is_empty());
        assert_eq!(cokernel(&m(&[vec![1, -2], vec![-2, 1]])).to_string(), "Z/3");
    }

    #[test]
    fn kernel_ranks() {
        assert_eq!(kernel_rank(&IntMatrix::identity(4)), 0);
        assert_eq!(kernel_rank(&IntMatrix::zeros(3, 3)), 3);
        assert_eq!(kernel_rank(&m(&[vec![1, 1], vec![1, 1]])), 1);
    }
}
