//! Segre embeddings of a product of two projective spaces.
//!
//! States are pairs `(i, j)` in row-major order. When the scaling matrix
//! has rank one the likelihood equations collapse to those of the unscaled
//! independence model, whose MLE is the outer product of the margins.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::model::{DataVector, ProbabilityVector, ToricModel};

/// The scaled Segre model on an `m x n` state grid: indicator rows for the
/// row and column groups (first value of each group dropped to keep the
/// matrix full rank) plus the homogenizing row.
pub fn segre_model(m: usize, n: usize, c: Vec<f64>) -> Result<ToricModel> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidConfig("segre shape must be positive".into()));
    }
    if c.len() != m * n {
        return Err(Error::DimensionMismatch {
            what: "segre scaling length",
            expected: m * n,
            got: c.len(),
        });
    }
    let mut a: Vec<Vec<i64>> = Vec::with_capacity(m + n - 2);
    for r in 1..m {
        let mut row = vec![0i64; m * n];
        for j in 0..n {
            row[r * n + j] = 1;
        }
        a.push(row);
    }
    for s in 1..n {
        let mut row = vec![0i64; m * n];
        for i in 0..m {
            row[i * n + s] = 1;
        }
        a.push(row);
    }
    ToricModel::new(a, c)
}

/// Exact rank-one test: do all 2x2 minors of the scaling matrix vanish?
pub fn segre_rank1_test(c: &[Vec<BigRational>]) -> bool {
    let m = c.len();
    if m == 0 {
        return true;
    }
    let n = c[0].len();
    for i in 0..m {
        for k in i + 1..m {
            for j in 0..n {
                for l in j + 1..n {
                    if &c[i][j] * &c[k][l] != &c[i][l] * &c[k][j] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// MLE of the unscaled (or rank-one scaled) Segre model: the outer product
/// of the data margins, `p_ij = (u_{i+} / u_{++}) (u_{+j} / u_{++})`.
pub fn segre_rank1_mle(m: usize, n: usize, data: &DataVector) -> Result<ProbabilityVector> {
    if data.len() != m * n {
        return Err(Error::DimensionMismatch {
            what: "data length",
            expected: m * n,
            got: data.len(),
        });
    }
    let total = data.total() as f64;
    let mut row_sum = vec![0.0; m];
    let mut col_sum = vec![0.0; n];
    for (state, &u) in data.counts().iter().enumerate() {
        row_sum[state / n] += u as f64;
        col_sum[state % n] += u as f64;
    }
    let mut p = Vec::with_capacity(m * n);
    for &r in &row_sum {
        for &c in &col_sum {
            p.push(r / total * (c / total));
        }
    }
    Ok(ProbabilityVector::new(p))
}
