//! Ready-made example models and data.
//!
//! The worker data is the classic coronary-heart-disease study of 1841
//! Czech automotive workers, restricted to four binary factors: smoking
//! `S`, systolic blood pressure below 140 mm `B`, family history of heart
//! disease `H`, and a beta-to-alpha lipoprotein ratio below 3 `L`. The
//! graphical model is the four-cycle `S - B - H - L - S`, the smallest
//! non-decomposable graphical model.

use num_rational::BigRational;

use crate::error::Result;
use crate::families::hierarchical_model;
use crate::model::{DataVector, ToricModel};

/// Binary no-three-way-interaction model on three variables (the 3-cycle);
/// a toric hypersurface in eight states.
pub fn binary_three_cycle() -> ToricModel {
    hierarchical_model(&[vec![0, 1], vec![1, 2], vec![0, 2]], &[2, 2, 2])
        .expect("fixture is well formed")
        .named("binary-3-cycle")
}

/// The 3-cycle with an exact scaling, for the discriminant tests.
pub fn binary_three_cycle_exact(c: Vec<BigRational>) -> Result<ToricModel> {
    let base = binary_three_cycle();
    let a: Vec<Vec<i64>> = base.a_bar()[..base.d() - 1].to_vec();
    Ok(ToricModel::with_exact_scaling(a, c)?.named("binary-3-cycle"))
}

/// Binary graphical model of the four-cycle `S - B - H - L - S` on sixteen
/// states, ordered `p_0000, p_0001, ..., p_1111` with the variable order
/// `(S, B, H, L)`.
pub fn binary_four_cycle() -> ToricModel {
    hierarchical_model(
        &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        &[2, 2, 2, 2],
    )
    .expect("fixture is well formed")
    .named("binary-4-cycle")
}

/// Observed counts of the worker study in the state order of
/// [`binary_four_cycle`]: `S` = smoker, `B` = pressure < 140, `H` = family
/// history, `L` = lipoprotein ratio < 3, each coded 1 = yes except `H`
/// where 1 = positive history; index order `(S, B, H, L)`.
pub fn worker_counts() -> DataVector {
    DataVector::new(vec![
        297, 150, 36, 32, 231, 155, 34, 26, //  S = 0
        275, 191, 37, 36, 121, 161, 30, 29, //  S = 1
    ])
    .expect("counts are positive")
}
