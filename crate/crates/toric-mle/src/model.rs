//! Scaled toric models and their likelihood machinery.
//!
//! A model is the image of the monomial map
//! `p_j = c_j * theta_1^{A_1j} * ... * theta_d^{A_dj}` where the exponent
//! matrix carries a final row of ones, so the overall scale `s` lives in the
//! last coordinate of `theta`. In this homogenized form the critical
//! equations of the likelihood are Birch's conditions
//! `A p = A u / u_+`, and the residual, Jacobian, and solvers below all work
//! with square `d x d` systems.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact;

/// A toric model scaled by a vector of nonzero constants.
///
/// `a_bar` is the integer exponent matrix with the homogenizing row of ones
/// appended as its last row; it has full row rank `d`. The scaling is kept
/// as floats for the solvers and, when the model was built from exact input,
/// as rationals for the discriminant and ML-degree computations.
#[derive(Debug, Clone)]
pub struct ToricModel {
    a_bar: Vec<Vec<i64>>,
    a_bar_f64: DMatrix<f64>,
    c: Vec<f64>,
    c_exact: Option<Vec<BigRational>>,
    name: Option<String>,
}

impl ToricModel {
    /// Builds a model from the raw exponent matrix (without the homogenizing
    /// row) and a float scaling vector.
    ///
    /// Rejects rank-deficient exponent matrices and zero scalings.
    pub fn new(a: Vec<Vec<i64>>, c: Vec<f64>) -> Result<Self> {
        Self::build(a, c, None, None)
    }

    /// Builds a model with an exact rational scaling. The float view is
    /// derived from the rationals.
    pub fn with_exact_scaling(a: Vec<Vec<i64>>, c: Vec<BigRational>) -> Result<Self> {
        let c_f64: Vec<f64> = c.iter().map(rational_to_f64).collect();
        Self::build(a, c_f64, Some(c), None)
    }

    pub fn named(self, name: impl Into<String>) -> Self {
        Self {
            name: Some(name.into()),
            ..self
        }
    }

    fn build(
        a: Vec<Vec<i64>>,
        c: Vec<f64>,
        c_exact: Option<Vec<BigRational>>,
        name: Option<String>,
    ) -> Result<Self> {
        let n = match a.first() {
            Some(row) => row.len(),
            None => c.len(),
        };
        if n == 0 {
            return Err(Error::DimensionMismatch {
                what: "model states",
                expected: 1,
                got: 0,
            });
        }
        for row in &a {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "exponent matrix row length",
                    expected: n,
                    got: row.len(),
                });
            }
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                what: "scaling length",
                expected: n,
                got: c.len(),
            });
        }
        if let Some(exact) = &c_exact {
            if let Some(i) = exact.iter().position(|v| v.is_zero()) {
                return Err(Error::ZeroScaling(i));
            }
        }
        if let Some(i) = c.iter().position(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::ZeroScaling(i));
        }

        let mut a_bar = a;
        a_bar.push(vec![1; n]);
        let d = a_bar.len();
        let r = exact::rank_i64(&a_bar);
        if r < d {
            return Err(Error::RankDeficient { rank: r, rows: d });
        }
        let a_bar_f64 = DMatrix::from_fn(d, n, |i, j| a_bar[i][j] as f64);
        Ok(Self {
            a_bar,
            a_bar_f64,
            c,
            c_exact,
            name,
        })
    }

    /// Number of states (columns of the exponent matrix).
    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Number of parameters, homogenizing coordinate included.
    pub fn d(&self) -> usize {
        self.a_bar.len()
    }

    /// The exponent matrix including the final row of ones.
    pub fn a_bar(&self) -> &[Vec<i64>] {
        &self.a_bar
    }

    pub(crate) fn a_bar_f64(&self) -> &DMatrix<f64> {
        &self.a_bar_f64
    }

    pub fn scaling(&self) -> &[f64] {
        &self.c
    }

    pub fn exact_scaling(&self) -> Option<&[BigRational]> {
        self.c_exact.as_deref()
    }

    /// Exact scaling, or the error the exact-arithmetic operations share.
    pub fn require_exact_scaling(&self) -> Result<&[BigRational]> {
        self.exact_scaling().ok_or(Error::ExactScalingRequired)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn has_positive_scaling(&self) -> bool {
        self.c.iter().all(|&v| v > 0.0)
    }

    pub(crate) fn check_positive_scaling(&self) -> Result<()> {
        match self.c.iter().position(|&v| v <= 0.0) {
            Some(i) => Err(Error::InvalidScaling(i)),
            None => Ok(()),
        }
    }

    /// The monomial part of the parameterization: `m_j = theta^{a_j}`
    /// without the scaling.
    pub fn monomials(&self, theta: &ThetaPoint) -> Result<Vec<f64>> {
        if theta.len() != self.d() {
            return Err(Error::DimensionMismatch {
                what: "theta length",
                expected: self.d(),
                got: theta.len(),
            });
        }
        let mut out = vec![1.0; self.n()];
        for (i, row) in self.a_bar.iter().enumerate() {
            let t = theta.coords()[i];
            for (j, &e) in row.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if t == 0.0 && e < 0 {
                    return Err(Error::ZeroTheta(i));
                }
                out[j] *= t.powi(e as i32);
            }
        }
        Ok(out)
    }

    /// Evaluates the monomial map `p_j = c_j * theta^{a_j}`. No
    /// normalization is applied.
    pub fn evaluate(&self, theta: &ThetaPoint) -> Result<ProbabilityVector> {
        let mut p = self.monomials(theta)?;
        for (v, &cj) in p.iter_mut().zip(&self.c) {
            *v *= cj;
        }
        Ok(ProbabilityVector::new(p))
    }

    /// Same exponent matrix, different scaling.
    pub fn with_scaling(&self, c: Vec<f64>) -> Result<Self> {
        let a: Vec<Vec<i64>> = self.a_bar[..self.d() - 1].to_vec();
        Self::build(a, c, None, self.name.clone())
    }
}

/// Observed counts, one per model state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataVector {
    counts: Vec<u64>,
    total: u64,
}

impl DataVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::ZeroDataSum);
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// The sample size `u_+`.
    pub fn total(&self) -> u64 {
        self.total
    }
}

/// A parameter point `(theta_1, ..., theta_{d-1}, s)`; the homogenizing
/// scale sits in the last coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPoint {
    coords: Vec<f64>,
}

impl ThetaPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.coords.iter().all(|&v| v > 0.0)
    }
}

/// A vector of state weights; an MLE output is strictly positive and sums
/// to one within solver tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Self {
        Self { p }
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.p.iter().all(|&v| v > 0.0)
    }
}

/// Output of a solver run: the estimate plus diagnostics.
#[derive(Debug, Clone)]
pub struct MleResult {
    pub p_hat: ProbabilityVector,
    pub theta_hat: Option<ThetaPoint>,
    pub birch_residual: f64,
    pub iterations_or_steps: usize,
    pub log_likelihood: f64,
}

/// Exact sufficient statistics `b = A u / u_+`; the last coordinate is
/// exactly one.
pub fn sufficient_statistics(model: &ToricModel, data: &DataVector) -> Result<Vec<BigRational>> {
    check_data_len(model, data)?;
    let total = BigInt::from(data.total());
    Ok(model
        .a_bar()
        .iter()
        .map(|row| {
            let mut acc = BigInt::zero();
            for (&a, &u) in row.iter().zip(data.counts()) {
                acc += BigInt::from(a) * BigInt::from(u);
            }
            BigRational::new(acc, total.clone())
        })
        .collect())
}

fn check_data_len(model: &ToricModel, data: &DataVector) -> Result<()> {
    if data.len() != model.n() {
        return Err(Error::DimensionMismatch {
            what: "data length",
            expected: model.n(),
            got: data.len(),
        });
    }
    Ok(())
}

fn check_p_len(model: &ToricModel, p: &ProbabilityVector) -> Result<()> {
    if p.len() != model.n() {
        return Err(Error::DimensionMismatch {
            what: "probability vector length",
            expected: model.n(),
            got: p.len(),
        });
    }
    Ok(())
}

/// Sup-norm distance from Birch's conditions, `||A p - A u / u_+||_inf`.
/// The homogenizing row is included, so a defect in `sum(p) = 1` shows up
/// here too.
pub fn birch_residual(model: &ToricModel, data: &DataVector, p: &ProbabilityVector) -> Result<f64> {
    check_data_len(model, data)?;
    check_p_len(model, p)?;
    let u_plus = data.total() as f64;
    let mut worst: f64 = 0.0;
    for row in model.a_bar() {
        let mut ap = 0.0f64;
        let mut au = 0i128;
        for ((&a, &pv), &uv) in row.iter().zip(p.values()).zip(data.counts()) {
            ap += a as f64 * pv;
            au += a as i128 * uv as i128;
        }
        worst = worst.max((ap - au as f64 / u_plus).abs());
    }
    Ok(worst)
}

/// Log-likelihood `sum u_j log p_j - u_+ log sum p_j`; invariant under
/// positive rescaling of `p`.
pub fn log_likelihood(data: &DataVector, p: &ProbabilityVector) -> Result<f64> {
    if data.len() != p.len() {
        return Err(Error::DimensionMismatch {
            what: "probability vector length",
            expected: data.len(),
            got: p.len(),
        });
    }
    if let Some(i) = p.values().iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::NonPositiveP(i));
    }
    let mut acc = 0.0;
    for (&u, &pv) in data.counts().iter().zip(p.values()) {
        if u > 0 {
            acc += u as f64 * pv.ln();
        }
    }
    Ok(acc - data.total() as f64 * p.sum().ln())
}

/// The square likelihood system `F(theta) = u_+ * A p(theta) - A u` for a
/// fixed model and data vector, with its factored Jacobian.
///
/// A zero of `F` is exactly a point satisfying Birch's conditions; the
/// `u_+` scaling keeps all coefficients integral for integer data.
pub struct LikelihoodSystem<'a> {
    model: &'a ToricModel,
    data: &'a DataVector,
    au: DVector<f64>,
    u_plus: f64,
}

impl<'a> LikelihoodSystem<'a> {
    pub fn new(model: &'a ToricModel, data: &'a DataVector) -> Result<Self> {
        check_data_len(model, data)?;
        let au = DVector::from_iterator(
            model.d(),
            model.a_bar().iter().map(|row| {
                row.iter()
                    .zip(data.counts())
                    .map(|(&a, &u)| a as i128 * u as i128)
                    .sum::<i128>() as f64
            }),
        );
        Ok(Self {
            model,
            data,
            au,
            u_plus: data.total() as f64,
        })
    }

    pub fn model(&self) -> &ToricModel {
        self.model
    }

    pub fn data(&self) -> &DataVector {
        self.data
    }

    pub fn u_plus(&self) -> f64 {
        self.u_plus
    }

    /// `F_i(theta) = u_+ (A p(theta))_i - (A u)_i`.
    pub fn residual(&self, theta: &ThetaPoint) -> Result<DVector<f64>> {
        let p = self.model.evaluate(theta)?;
        Ok(self.residual_at_p(&p))
    }

    pub(crate) fn residual_at_p(&self, p: &ProbabilityVector) -> DVector<f64> {
        let pv = DVector::from_column_slice(p.values());
        self.model.a_bar_f64() * pv * self.u_plus - &self.au
    }

    /// Factored Jacobian `u_+ * A diag(p) A^T diag(1/theta)`.
    pub fn jacobian(&self, theta: &ThetaPoint) -> Result<DMatrix<f64>> {
        let p = self.model.evaluate(theta)?;
        let d = self.model.d();
        let a = self.model.a_bar_f64();
        let mut weighted = a.clone();
        for (j, &pj) in p.values().iter().enumerate() {
            for i in 0..d {
                weighted[(i, j)] *= pj;
            }
        }
        let mut jac = &weighted * a.transpose();
        for k in 0..d {
            let t = theta.coords()[k];
            if t == 0.0 {
                return Err(Error::ZeroTheta(k));
            }
            let scale = self.u_plus / t;
            for i in 0..d {
                jac[(i, k)] *= scale;
            }
        }
        Ok(jac)
    }

    /// Birch residual of a probability vector against this data.
    pub fn birch_residual(&self, p: &ProbabilityVector) -> Result<f64> {
        birch_residual(self.model, self.data, p)
    }
}

pub(crate) fn rational_to_f64(v: &BigRational) -> f64 {
    // Good enough for the magnitudes seen here; exact paths never use this.
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn curve_model() -> ToricModel {
        ToricModel::new(vec![vec![0, 1, 2, 3, 4]], vec![1.0; 5]).unwrap()
    }

    fn veronese_example_model(c: Vec<f64>) -> ToricModel {
        // Columns (0,0),(1,0),(2,0),(0,1),(1,1),(0,2).
        ToricModel::new(vec![vec![0, 1, 2, 0, 1, 0], vec![0, 0, 0, 1, 1, 2]], c).unwrap()
    }

    #[test]
    fn validates_rational_normal_curve() {
        let m = curve_model();
        assert_eq!(m.d(), 2);
        assert_eq!(m.n(), 5);
        assert_eq!(m.a_bar()[1], vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn rejects_rank_deficient_matrix() {
        let err = ToricModel::new(vec![vec![1, 2, 3], vec![1, 2, 3]], vec![1.0; 3]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 2, rows: 3 }));
    }

    #[test]
    fn rejects_zero_scaling() {
        let err = ToricModel::new(vec![vec![0, 1, 2]], vec![1.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::ZeroScaling(1)));
    }

    #[test]
    fn evaluate_at_ones_returns_scaling() {
        let m = veronese_example_model(vec![1.0, 2.0, 1.0, 2.0, 2.0, 1.0]);
        let p = m.evaluate(&ThetaPoint::new(vec![1.0, 1.0, 1.0])).unwrap();
        assert_eq!(p.values(), &[1.0, 2.0, 1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn evaluate_monomials_by_hand() {
        // p_j = s * t^j on the quadric curve: theta = (t, s) = (3, 2).
        let m = ToricModel::new(vec![vec![0, 1, 2]], vec![1.0; 3]).unwrap();
        let p = m.evaluate(&ThetaPoint::new(vec![3.0, 2.0])).unwrap();
        assert_eq!(p.values(), &[2.0, 6.0, 18.0]);
    }

    #[test]
    fn negative_exponent_at_zero_theta_is_rejected() {
        let m = ToricModel::new(vec![vec![-1, 1]], vec![1.0, 1.0]).unwrap();
        let err = m.evaluate(&ThetaPoint::new(vec![0.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::ZeroTheta(0)));
    }

    #[test]
    fn sufficient_statistics_last_coordinate_is_one() {
        let m = veronese_example_model(vec![1.0; 6]);
        let u = DataVector::new(vec![1, 3, 5, 7, 9, 2]).unwrap();
        let b = sufficient_statistics(&m, &u).unwrap();
        let twenty_seven = exact::ratio_from_i64(27);
        assert_eq!(b[0], exact::ratio_from_i64(22) / twenty_seven.clone());
        assert_eq!(b[1], exact::ratio_from_i64(20) / twenty_seven);
        assert_eq!(b[2], exact::ratio_from_i64(1));
    }

    #[test]
    fn data_vector_rejects_zero_sum() {
        assert!(matches!(
            DataVector::new(vec![0, 0, 0]).unwrap_err(),
            Error::ZeroDataSum
        ));
    }

    #[test]
    fn birch_residual_zero_for_saturated_model_at_empirical_distribution() {
        // Full simplex on 4 states: columns 0, e1, e2, e3.
        let a = vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]];
        let m = ToricModel::new(a, vec![1.0; 4]).unwrap();
        let u = DataVector::new(vec![3, 1, 4, 2]).unwrap();
        let p = ProbabilityVector::new(vec![0.3, 0.1, 0.4, 0.2]);
        assert!(birch_residual(&m, &u, &p).unwrap() < 1e-15);
    }

    #[test]
    fn birch_residual_sees_normalization_defect() {
        let m = curve_model();
        let u = DataVector::new(vec![1, 1, 1, 1, 1]).unwrap();
        let p = ProbabilityVector::new(vec![0.3; 5]);
        let r = birch_residual(&m, &u, &p).unwrap();
        assert!(r >= (1.5f64 - 1.0).abs() - 1e-12);
    }

    #[test]
    fn likelihood_residual_matches_displayed_polynomials() {
        // c = ones: F = (54 t1 t2^2 + 27 t1 t2 t3 + 27 t1 t2 - 22,
        //                27 t1 t2 t3 + 54 t1 t3^2 + 27 t1 t3 - 20,
        //                27 t1 (1 + t2 + t2^2 + t3 + t2 t3 + t3^2) - 27)
        // in the (s, theta_1, theta_2) reading; our row order puts the
        // homogenizing row last.
        let m = veronese_example_model(vec![1.0; 6]);
        let u = DataVector::new(vec![1, 3, 5, 7, 9, 2]).unwrap();
        let sys = LikelihoodSystem::new(&m, &u).unwrap();
        let (t2, t3, t1) = (0.7, 1.3, 0.4); // ours: (theta_1, theta_2, s)
        let f = sys.residual(&ThetaPoint::new(vec![t2, t3, t1])).unwrap();
        let row_s = 27.0 * t1 * (t2 * t2 + t2 * t3 + t3 * t3 + t2 + t3 + 1.0) - 27.0;
        let row_1 = 54.0 * t1 * t2 * t2 + 27.0 * t1 * t2 * t3 + 27.0 * t1 * t2 - 22.0;
        let row_2 = 27.0 * t1 * t2 * t3 + 54.0 * t1 * t3 * t3 + 27.0 * t1 * t3 - 20.0;
        assert_relative_eq!(f[0], row_1, max_relative = 1e-14);
        assert_relative_eq!(f[1], row_2, max_relative = 1e-14);
        assert_relative_eq!(f[2], row_s, max_relative = 1e-14);
    }

    #[test]
    fn likelihood_residual_matches_independent_evaluation() {
        // Second implementation: per-entry loops, no shared code path.
        let m = veronese_example_model(vec![1.0, 2.0, 1.0, 2.0, 2.0, 1.0]);
        let u = DataVector::new(vec![4, 1, 2, 8, 5, 7]).unwrap();
        let sys = LikelihoodSystem::new(&m, &u).unwrap();
        let theta = ThetaPoint::new(vec![0.9, 1.7, 0.2]);
        let f = sys.residual(&theta).unwrap();
        let u_plus: f64 = 27.0;
        for i in 0..m.d() {
            let mut ap = 0.0;
            let mut au = 0.0;
            for j in 0..m.n() {
                let mut mono = m.scaling()[j];
                for (k, row) in m.a_bar().iter().enumerate() {
                    mono *= theta.coords()[k].powi(row[j] as i32);
                }
                ap += m.a_bar()[i][j] as f64 * mono;
                au += m.a_bar()[i][j] as f64 * u.counts()[j] as f64;
            }
            assert_relative_eq!(f[i], u_plus * ap - au, max_relative = 1e-13);
        }
    }

    #[test]
    fn residual_vanishes_at_the_saturated_mle() {
        // Full simplex: the MLE is the empirical distribution, reached at
        // theta = (u_2/u_1, u_3/u_1, u_1/u_plus) for A = (0 e1 e2).
        let a = vec![vec![0, 1, 0], vec![0, 0, 1]];
        let m = ToricModel::new(a, vec![1.0; 3]).unwrap();
        let u = DataVector::new(vec![2, 5, 3]).unwrap();
        let sys = LikelihoodSystem::new(&m, &u).unwrap();
        let theta = ThetaPoint::new(vec![5.0 / 2.0, 3.0 / 2.0, 0.2]);
        let f = sys.residual(&theta).unwrap();
        assert!(f.amax() < 1e-12, "{f}");
        // F = 0 forces normalization (the ones row) and the Birch residual.
        let p = m.evaluate(&theta).unwrap();
        assert!((p.sum() - 1.0).abs() < 1e-15);
        assert!(birch_residual(&m, &u, &p).unwrap() < 1e-15);
    }

    #[test]
    fn sufficient_statistics_of_uniform_segre_data_are_half() {
        // 2x2 independence model, uniform counts: both margins are 1/2.
        let a = vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]];
        let m = ToricModel::new(a, vec![1.0; 4]).unwrap();
        let u = DataVector::new(vec![1, 1, 1, 1]).unwrap();
        let b = sufficient_statistics(&m, &u).unwrap();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(b[0], half);
        assert_eq!(b[1], half);
        assert_eq!(b[2], exact::ratio_from_i64(1));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = veronese_example_model(vec![1.0, 2.0, 1.0, 2.0, 2.0, 1.0]);
        let u = DataVector::new(vec![1, 3, 5, 7, 9, 2]).unwrap();
        let sys = LikelihoodSystem::new(&m, &u).unwrap();
        let h = 1e-6;
        for _ in 0..20 {
            let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.2..2.5)).collect();
            let jac = sys.jacobian(&ThetaPoint::new(theta.clone())).unwrap();
            let scale = jac.amax();
            for k in 0..3 {
                let mut plus = theta.clone();
                let mut minus = theta.clone();
                plus[k] += h;
                minus[k] -= h;
                let fp = sys.residual(&ThetaPoint::new(plus)).unwrap();
                let fm = sys.residual(&ThetaPoint::new(minus)).unwrap();
                for i in 0..3 {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!(
                        (jac[(i, k)] - fd).abs() <= 1e-5 * scale,
                        "J[{i},{k}] = {} vs fd {fd}",
                        jac[(i, k)]
                    );
                }
            }
        }
    }

    #[test]
    fn jacobian_on_two_state_model_by_hand() {
        // A = (0 1): p = (c1 s, c2 s t), theta = (t, s).
        // F = u+ * (p2 - b1*u+..., ...) -- check J against the hand expansion
        // J = u+ * [[c2 s, c2 t], [c2 s, c1 + c2 t]].
        let m = ToricModel::new(vec![vec![0, 1]], vec![2.0, 3.0]).unwrap();
        let u = DataVector::new(vec![4, 6]).unwrap();
        let sys = LikelihoodSystem::new(&m, &u).unwrap();
        let (t, s) = (1.4, 0.6);
        let jac = sys.jacobian(&ThetaPoint::new(vec![t, s])).unwrap();
        let u_plus = 10.0;
        let (c1, c2) = (2.0, 3.0);
        assert_relative_eq!(jac[(0, 0)], u_plus * c2 * s, max_relative = 1e-14);
        assert_relative_eq!(jac[(0, 1)], u_plus * c2 * t, max_relative = 1e-14);
        assert_relative_eq!(jac[(1, 0)], u_plus * c2 * s, max_relative = 1e-14);
        assert_relative_eq!(jac[(1, 1)], u_plus * (c1 + c2 * t), max_relative = 1e-14);
    }

    #[test]
    fn jacobian_is_positive_definite_at_positive_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let c: Vec<f64> = (0..6).map(|_| rng.gen_range(0.2..3.0)).collect();
            let m = veronese_example_model(c);
            let u = DataVector::new(vec![1, 1, 1, 1, 1, 1]).unwrap();
            let sys = LikelihoodSystem::new(&m, &u).unwrap();
            let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.3..2.0)).collect();
            let jac = sys.jacobian(&ThetaPoint::new(theta.clone())).unwrap();
            // Symmetrize out the diag(1/theta) factor: M = J diag(theta) is
            // u+ A diag(p) A^T, which must be symmetric positive definite.
            let mut sym = jac.clone();
            for k in 0..3 {
                for i in 0..3 {
                    sym[(i, k)] *= theta[k];
                }
            }
            let eig = sym.symmetric_eigen();
            assert!(
                eig.eigenvalues.iter().all(|&l| l > 0.0),
                "{:?}",
                eig.eigenvalues
            );
        }
    }

    #[test]
    fn log_likelihood_is_scale_invariant_and_maximized_at_mle() {
        let a = vec![vec![0, 1, 0], vec![0, 0, 1]];
        let m = ToricModel::new(a, vec![1.0; 3]).unwrap();
        let u = DataVector::new(vec![2, 5, 3]).unwrap();
        let p_hat = ProbabilityVector::new(vec![0.2, 0.5, 0.3]);
        let best = log_likelihood(&u, &p_hat).unwrap();
        let scaled = ProbabilityVector::new(vec![0.4, 1.0, 0.6]);
        assert_relative_eq!(
            log_likelihood(&u, &scaled).unwrap(),
            best,
            max_relative = 1e-12
        );
        for other in [
            ProbabilityVector::new(vec![1.0 / 3.0; 3]),
            ProbabilityVector::new(vec![0.25, 0.45, 0.3]),
        ] {
            assert!(log_likelihood(&u, &other).unwrap() < best);
        }
        let _ = m;
    }

    #[test]
    fn log_likelihood_rejects_nonpositive_p() {
        let u = DataVector::new(vec![1, 1]).unwrap();
        let p = ProbabilityVector::new(vec![0.5, 0.0]);
        assert!(matches!(
            log_likelihood(&u, &p).unwrap_err(),
            Error::NonPositiveP(1)
        ));
    }
}
