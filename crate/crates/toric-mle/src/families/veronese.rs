//! Veronese embeddings.
//!
//! `Ver(m, k)` has one state per monomial of degree at most `k` in `m`
//! variables. Two exact computations live here: the rank-one criterion
//! (when the scaling is the coefficient expansion of `L^k` for a linear
//! form `L`, the MLE is a single linear solve) and, for `k = 2`, the
//! principal-minor membership test for the discriminant locus.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::model::{DataVector, ProbabilityVector, ThetaPoint, ToricModel};

/// Exponent columns of `Ver(m, k)`: all nonnegative integer vectors with
/// coordinate sum at most `k`, ordered with the last coordinate slowest
/// (for `m = 2, k = 2`: 00, 10, 20, 01, 11, 02).
pub fn veronese_exponents(m: usize, k: usize) -> Vec<Vec<i64>> {
    fn walk(m: usize, budget: usize, out: &mut Vec<Vec<i64>>, prefix: &mut Vec<i64>) {
        if m == 0 {
            let mut col = prefix.clone();
            col.reverse();
            out.push(col);
            return;
        }
        for v in 0..=budget {
            prefix.push(v as i64);
            walk(m - 1, budget - v, out, prefix);
            prefix.pop();
        }
    }
    // Build with the last coordinate outermost, then flip each column.
    let mut out = Vec::new();
    walk(m, k, &mut out, &mut Vec::new());
    out
}

/// The scaled Veronese model `Ver(m, k)^c`.
pub fn veronese_model(m: usize, k: usize, c: Vec<f64>) -> Result<ToricModel> {
    let cols = veronese_exponents(m, k);
    if c.len() != cols.len() {
        return Err(Error::DimensionMismatch {
            what: "veronese scaling length",
            expected: cols.len(),
            got: c.len(),
        });
    }
    let a: Vec<Vec<i64>> = (0..m)
        .map(|i| cols.iter().map(|col| col[i]).collect())
        .collect();
    ToricModel::new(a, c)
}

/// Coefficients of `(b_0 + b_1 x_1 + ... + b_m x_m)^k`, aligned to the
/// column order of [`veronese_exponents`]. With this scaling the model has
/// ML degree one.
pub fn veronese_rank1_scaling(m: usize, k: usize, b: &[BigRational]) -> Result<Vec<BigRational>> {
    if b.len() != m + 1 {
        return Err(Error::DimensionMismatch {
            what: "linear form coefficients",
            expected: m + 1,
            got: b.len(),
        });
    }
    if let Some(i) = b.iter().position(|v| v.is_zero()) {
        return Err(Error::ZeroScaling(i));
    }
    let cols = veronese_exponents(m, k);
    let mut out = Vec::with_capacity(cols.len());
    for col in &cols {
        let total: i64 = col.iter().sum();
        let alpha0 = k as i64 - total;
        let mut coeff = BigRational::from_integer(multinomial(k, alpha0, col));
        coeff *= rational_pow(&b[0], alpha0);
        for (i, &e) in col.iter().enumerate() {
            coeff *= rational_pow(&b[i + 1], e);
        }
        out.push(coeff);
    }
    Ok(out)
}

fn multinomial(k: usize, alpha0: i64, col: &[i64]) -> BigInt {
    let mut result = factorial(k as u64);
    result /= factorial(alpha0 as u64);
    for &e in col {
        result /= factorial(e as u64);
    }
    result
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

fn rational_pow(base: &BigRational, exp: i64) -> BigRational {
    match exp.cmp(&0) {
        std::cmp::Ordering::Equal => BigRational::one(),
        std::cmp::Ordering::Greater => num_traits::Pow::pow(base, exp as u64 as u32),
        std::cmp::Ordering::Less => {
            BigRational::one() / num_traits::Pow::pow(base, (-exp) as u64 as u32)
        }
    }
}

/// MLE of `Ver(m, k)` scaled by the expansion of `L^k`,
/// `L = b_0 + b_1 x_1 + ... + b_m x_m`: the power of `L` cancels from the
/// likelihood equations, leaving one `m x m` linear solve.
pub fn veronese_rank1_mle(
    m: usize,
    k: usize,
    b: &[f64],
    data: &DataVector,
) -> Result<(ThetaPoint, ProbabilityVector)> {
    if b.len() != m + 1 {
        return Err(Error::DimensionMismatch {
            what: "linear form coefficients",
            expected: m + 1,
            got: b.len(),
        });
    }
    let b_exact: Vec<BigRational> = b
        .iter()
        .map(|&v| BigRational::from_float(v).ok_or(Error::Parse("non-finite coefficient".into())))
        .collect::<Result<_>>()?;
    let c_exact = veronese_rank1_scaling(m, k, &b_exact)?;
    let c: Vec<f64> = c_exact.iter().map(|v| v.to_f64().unwrap()).collect();
    let model = veronese_model(m, k, c)?;
    if data.len() != model.n() {
        return Err(Error::DimensionMismatch {
            what: "data length",
            expected: model.n(),
            got: data.len(),
        });
    }
    // (A u)_i for the m coordinate rows.
    let au: Vec<f64> = model.a_bar()[..m]
        .iter()
        .map(|row| {
            row.iter()
                .zip(data.counts())
                .map(|(&a, &u)| a as f64 * u as f64)
                .sum()
        })
        .collect();
    let u_plus = data.total() as f64;
    // (A u)_i (b_0 + sum_j b_j t_j) = u_+ k b_i t_i, linear in t.
    let mut mat = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for i in 0..m {
        for j in 0..m {
            mat[(i, j)] = -au[i] * b[j + 1];
        }
        mat[(i, i)] += u_plus * k as f64 * b[i + 1];
        rhs[i] = au[i] * b[0];
    }
    let t = mat
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularJacobian(f64::NAN))?;
    let linear_form = b[0] + (0..m).map(|i| b[i + 1] * t[i]).sum::<f64>();
    let s = linear_form.powi(-(k as i32));
    let mut coords: Vec<f64> = t.iter().copied().collect();
    coords.push(s);
    let theta = ThetaPoint::new(coords);
    let p = model.evaluate(&theta)?;
    Ok((theta, p))
}

/// One face minor of the quadratic-Veronese test: the vertex subset and the
/// exact determinant of the corresponding principal submatrix.
#[derive(Debug, Clone)]
pub struct FaceMinor {
    pub vertices: Vec<usize>,
    pub value: BigRational,
}

impl FaceMinor {
    pub fn vanishes(&self) -> bool {
        self.value.is_zero()
    }
}

/// Outcome of [`ver2_sigma_test`]: whether the scaling sits inside the
/// principal-determinant locus, with one entry per face of dimension at
/// least one.
#[derive(Debug, Clone)]
pub struct Ver2Sigma {
    pub in_sigma: bool,
    pub faces: Vec<FaceMinor>,
}

impl Ver2Sigma {
    /// Vanishing pattern in face order: `true` where the minor is zero.
    pub fn pattern(&self) -> Vec<bool> {
        self.faces.iter().map(FaceMinor::vanishes).collect()
    }
}

/// Membership test for the discriminant locus of `Ver(m, 2)^c`.
///
/// The quadric `f = sum c_alpha x^alpha` has the symmetric coefficient
/// matrix `C` with `2 c` on the diagonal; the discriminant of every face of
/// the underlying simplex is the corresponding principal minor of `C`, so
/// the scaling lies in the locus exactly when some principal minor of size
/// at least two vanishes. Faces are emitted largest first, subsets of
/// `{0..m}` in decreasing size then lexicographic order.
pub fn ver2_sigma_test(m: usize, c: &[BigRational]) -> Result<Ver2Sigma> {
    let cols = veronese_exponents(m, 2);
    if c.len() != cols.len() {
        return Err(Error::DimensionMismatch {
            what: "veronese scaling length",
            expected: cols.len(),
            got: c.len(),
        });
    }
    if let Some(i) = c.iter().position(|v| v.is_zero()) {
        return Err(Error::ZeroScaling(i));
    }
    // Symmetric matrix of the quadric in (1, x_1, ..., x_m).
    let size = m + 1;
    let mut cmat = vec![vec![BigRational::zero(); size]; size];
    for (col, value) in cols.iter().zip(c) {
        let support: Vec<usize> = (0..m).filter(|&i| col[i] != 0).collect();
        match support.len() {
            0 => cmat[0][0] = value * exact::ratio_from_i64(2),
            1 => {
                let i = support[0] + 1;
                if col[support[0]] == 2 {
                    cmat[i][i] = value * exact::ratio_from_i64(2);
                } else {
                    cmat[0][i] = value.clone();
                    cmat[i][0] = value.clone();
                }
            }
            2 => {
                let (i, j) = (support[0] + 1, support[1] + 1);
                cmat[i][j] = value.clone();
                cmat[j][i] = value.clone();
            }
            _ => unreachable!("degree-2 monomials touch at most two variables"),
        }
    }
    let mut faces = Vec::new();
    let mut in_sigma = false;
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << size))
        .map(|mask| (0..size).filter(|&i| mask & (1 << i) != 0).collect())
        .filter(|s: &Vec<usize>| s.len() >= 2)
        .collect();
    subsets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    for subset in subsets {
        let sub: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| cmat[i][j].clone()).collect())
            .collect();
        let det = exact::rational_det(&sub);
        in_sigma |= det.is_zero();
        faces.push(FaceMinor {
            vertices: subset,
            value: det,
        });
    }
    Ok(Ver2Sigma { in_sigma, faces })
}
