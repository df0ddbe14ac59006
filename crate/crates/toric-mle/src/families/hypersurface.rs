//! Codimension-one toric models.
//!
//! When `n = d + 1` the model is cut out by a single binomial read off the
//! integer kernel vector `w` of the exponent matrix. If `w` has full
//! support ("general position"), the discriminant of the defining
//! polynomial is itself a binomial in the scaling, so membership in the
//! degenerate locus is one exact evaluation:
//!
//! ```text
//! delta(c) = (prod_{w_i < 0} w_i^{-w_i}) prod_{w_i > 0} c_i^{w_i}
//!          - (prod_{w_i > 0} w_i^{w_i}) prod_{w_i < 0} c_i^{-w_i}
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::model::ToricModel;

/// Primitive integer kernel vector of the homogenized exponent matrix,
/// sign-normalized so the first nonzero entry is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelVector {
    w: Vec<BigInt>,
}

impl KernelVector {
    pub fn w(&self) -> &[BigInt] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn positive_support(&self) -> Vec<usize> {
        (0..self.w.len())
            .filter(|&i| self.w[i].is_positive())
            .collect()
    }

    pub fn negative_support(&self) -> Vec<usize> {
        (0..self.w.len())
            .filter(|&i| self.w[i].is_negative())
            .collect()
    }

    /// True when no entry vanishes; the discriminant formula needs this.
    pub fn full_support(&self) -> bool {
        self.w.iter().all(|v| !v.is_zero())
    }
}

/// Kernel vector of a codimension-one model (`n = d + 1`).
pub fn hypersurface_kernel(model: &ToricModel) -> Result<KernelVector> {
    if model.n() != model.d() + 1 {
        return Err(Error::NotHypersurface {
            n: model.n(),
            d_plus_1: model.d() + 1,
        });
    }
    let w = exact::kernel_vector(model.a_bar())?;
    Ok(KernelVector { w })
}

/// Exponent vectors of the two monomials of the defining binomial
/// `prod p_i^{w_i} - prod p_i^{-w_i}` (positive part, negative part).
pub fn hypersurface_generator(model: &ToricModel) -> Result<(Vec<u64>, Vec<u64>)> {
    let kernel = hypersurface_kernel(model)?;
    let pos = kernel
        .w()
        .iter()
        .map(|v| {
            if v.is_positive() {
                v.to_u64().unwrap()
            } else {
                0
            }
        })
        .collect();
    let neg = kernel
        .w()
        .iter()
        .map(|v| {
            if v.is_negative() {
                (-v).to_u64().unwrap()
            } else {
                0
            }
        })
        .collect();
    Ok((pos, neg))
}

/// Result of the hypersurface discriminant test.
#[derive(Debug, Clone)]
pub struct SigmaTest {
    pub kernel: KernelVector,
    /// Exact value of the discriminant binomial at the scaling.
    pub discriminant: BigRational,
    /// True exactly when the discriminant vanishes, i.e. the ML degree
    /// drops below the degree of the model.
    pub in_sigma: bool,
}

/// Evaluates the discriminant binomial at the model's exact scaling.
///
/// Requires full kernel support (general position) and an exact scaling;
/// both conditions are reported as errors rather than guessed around.
pub fn hypersurface_sigma_test(model: &ToricModel) -> Result<SigmaTest> {
    let kernel = hypersurface_kernel(model)?;
    if !kernel.full_support() {
        return Err(Error::NotGeneralPosition);
    }
    let c = model.require_exact_scaling()?;
    let mut pos_coeff = BigInt::one(); // prod over negative part of w_i^{-w_i}
    let mut neg_coeff = BigInt::one(); // prod over positive part of w_i^{w_i}
    let mut pos_monomial = BigRational::one();
    let mut neg_monomial = BigRational::one();
    for (wi, ci) in kernel.w().iter().zip(c) {
        let e = wi.to_i64().expect("kernel entries fit i64 for these sizes");
        if e > 0 {
            neg_coeff *= num_traits::Pow::pow(wi, e as u32);
            pos_monomial *= num_traits::Pow::pow(ci, e as u32);
        } else {
            let k = (-e) as u32;
            pos_coeff *= num_traits::Pow::pow(wi, k);
            neg_monomial *= num_traits::Pow::pow(ci, k);
        }
    }
    let discriminant = BigRational::from_integer(pos_coeff) * pos_monomial
        - BigRational::from_integer(neg_coeff) * neg_monomial;
    let in_sigma = discriminant.is_zero();
    Ok(SigmaTest {
        kernel,
        discriminant,
        in_sigma,
    })
}
