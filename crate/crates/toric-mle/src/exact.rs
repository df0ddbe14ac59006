//! Exact linear algebra over the rationals and integers.
//!
//! Everything here exists because "is zero" must be decidable: ranks and
//! row spaces of exponent matrices, integer kernel vectors, and the
//! determinants behind discriminant evaluations are all computed without
//! floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn ratio_from_i64(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn rows_from_i64(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| ratio_from_i64(v)).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the rank.
pub fn rref(rows: &mut Vec<Vec<BigRational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(src) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].clone();
        for v in rows[pivot_row].iter_mut() {
            *v = &*v / &inv;
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (value, pv) in row.iter_mut().zip(&pivot).skip(col) {
                    let sub = pv * &factor;
                    *value = &*value - sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    pivot_row
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work)
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    rank(&rows_from_i64(rows))
}

/// Row-space equality over the rationals, by rank of the stacked matrix.
pub fn row_space_equal(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> bool {
    if a.is_empty() || b.is_empty() {
        return a.is_empty() == b.is_empty();
    }
    if a[0].len() != b[0].len() {
        return false;
    }
    let ra = rank(a);
    let rb = rank(b);
    if ra != rb {
        return false;
    }
    let mut stacked = a.to_vec();
    stacked.extend_from_slice(b);
    rank(&stacked) == ra
}

pub fn row_space_equal_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    row_space_equal(&rows_from_i64(a), &rows_from_i64(b))
}

/// Fraction-free Bareiss determinant of a square integer matrix.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                // Exact division is the Bareiss invariant.
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Primitive integer kernel vector of a d x (d+1) integer matrix of rank d,
/// computed from signed maximal minors (each via Bareiss elimination).
/// The sign is normalized so the first nonzero entry is positive.
pub fn kernel_vector(rows: &[Vec<i64>]) -> Result<Vec<BigInt>> {
    let d = rows.len();
    let n = d + 1;
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            what: "kernel matrix columns",
            expected: n,
            got: rows.iter().map(|r| r.len()).find(|&l| l != n).unwrap_or(n),
        });
    }
    let mut w: Vec<BigInt> = Vec::with_capacity(n);
    for skip in 0..n {
        let minor: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| BigInt::from(v))
                    .collect()
            })
            .collect();
        let det = bareiss_det(minor);
        w.push(if skip % 2 == 0 { det } else { -det });
    }
    if w.iter().all(|v| v.is_zero()) {
        return Err(Error::KernelDimension);
    }
    let mut g = BigInt::zero();
    for v in &w {
        g = g.gcd(v);
    }
    for v in w.iter_mut() {
        *v = &*v / &g;
    }
    if let Some(first) = w.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            for v in w.iter_mut() {
                *v = -v.clone();
            }
        }
    }
    Ok(w)
}

/// Full-rank integer row basis of the rational row space of `rows`:
/// rational echelon form with denominators cleared and content removed.
pub fn integer_row_basis(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let mut work = rows_from_i64(rows);
    rref(&mut work);
    work.into_iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for v in &row {
                lcm = lcm.lcm(v.denom());
            }
            let mut ints: Vec<BigInt> = row.iter().map(|v| (v * &lcm).to_integer()).collect();
            let mut content = BigInt::zero();
            for v in &ints {
                content = content.gcd(v);
            }
            if !content.is_zero() && !content.is_one() {
                for v in ints.iter_mut() {
                    *v = &*v / &content;
                }
            }
            ints
        })
        .collect()
}

/// Determinant of a square rational matrix (denominators cleared row by row,
/// then Bareiss on the integer part).
pub fn rational_det(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigRational::one();
    let mut ints: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in rows {
        let mut lcm = BigInt::one();
        for v in row {
            lcm = lcm.lcm(v.denom());
        }
        scale *= BigRational::from_integer(lcm.clone());
        ints.push(row.iter().map(|v| (v * &lcm).to_integer()).collect());
    }
    BigRational::from_integer(bareiss_det(ints)) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> BigRational {
        ratio_from_i64(v)
    }

    #[test]
    fn rank_of_identity_like() {
        assert_eq!(rank_i64(&[vec![1, 0, 0], vec![0, 1, 0]]), 2);
        assert_eq!(rank_i64(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_i64(&[vec![0, 0], vec![0, 0]]), 0);
    }

    #[test]
    fn row_space_comparisons() {
        let a = vec![vec![1, 1, 0, 0], vec![0, 1, 0, 1], vec![1, 1, 1, 1]];
        let b = vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 1, 1, 1]];
        assert!(row_space_equal_i64(&a, &b));
        let c = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]];
        assert!(!row_space_equal_i64(&a, &c));
    }

    #[test]
    fn bareiss_small_determinants() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(7), BigInt::from(4)],
        ];
        assert_eq!(bareiss_det(m), BigInt::from(1));
        let m3 = vec![
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(2)],
        ];
        assert_eq!(bareiss_det(m3), BigInt::from(-8));
        let singular = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        assert_eq!(bareiss_det(singular), BigInt::zero());
    }

    #[test]
    fn bareiss_agrees_with_cofactor_expansion() {
        // Cofactor expansion as an independent route.
        fn cofactor_det(m: &[Vec<i64>]) -> i64 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut acc = 0i64;
            for j in 0..n {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let term = m[0][j] * cofactor_det(&minor);
                acc += if j % 2 == 0 { term } else { -term };
            }
            acc
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        for _ in 0..30 {
            let m: Vec<Vec<i64>> = (0..4).map(|_| (0..4).map(|_| next()).collect()).collect();
            let big: Vec<Vec<BigInt>> = m
                .iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect();
            assert_eq!(bareiss_det(big), BigInt::from(cofactor_det(&m)));
        }
    }

    #[test]
    fn kernel_of_twisted_cubic_segment() {
        // rows: (0 1 2) with a homogenizing row
        let w = kernel_vector(&[vec![0, 1, 2], vec![1, 1, 1]]).unwrap();
        assert_eq!(w, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn kernel_is_primitive_and_sign_normalized() {
        // Doubling every row must not change the normalized kernel vector.
        let w = kernel_vector(&[vec![0, 2, 4], vec![2, 2, 2]]).unwrap();
        assert_eq!(w, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn kernel_vectors_annihilate_their_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut found = 0;
        while found < 20 {
            let d = rng.gen_range(2..5);
            let rows: Vec<Vec<i64>> = (0..d)
                .map(|_| (0..d + 1).map(|_| rng.gen_range(-4..5)).collect())
                .collect();
            if rank_i64(&rows) < d {
                continue;
            }
            found += 1;
            let w = kernel_vector(&rows).unwrap();
            let mut g = BigInt::zero();
            for v in &w {
                g = g.gcd(v);
            }
            assert!(g.is_one());
            for row in &rows {
                let dot: BigInt = row.iter().zip(&w).map(|(&a, b)| BigInt::from(a) * b).sum();
                assert!(dot.is_zero(), "A w != 0");
            }
        }
    }

    #[test]
    fn integer_basis_spans_same_space() {
        let rows = vec![vec![2, 4, 6], vec![1, 2, 3], vec![0, 1, 1]];
        let basis = integer_row_basis(&rows);
        assert_eq!(basis.len(), 2);
        let basis_i64: Vec<Vec<i64>> = basis
            .iter()
            .map(|r| r.iter().map(|v| i64::try_from(v).unwrap()).collect())
            .collect();
        assert!(row_space_equal_i64(&rows, &basis_i64));
    }

    #[test]
    fn rational_det_with_fractions() {
        let m = vec![
            vec![r(1) / r(2), r(1) / r(3)],
            vec![r(1) / r(4), r(1) / r(5)],
        ];
        // 1/10 - 1/12 = 1/60
        assert_eq!(rational_det(&m), r(1) / r(60));
    }
}
