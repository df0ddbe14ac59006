//! Generalized iterative proportional scaling.
//!
//! The update rule is Darroch-Ratcliff generalized iterative scaling: on a
//! nonnegative feature matrix whose columns each sum to one, the iteration
//!
//! ```text
//! p_j <- p_j * prod_i (b_i / (A' p)_i)^{A'_ij},    b = A' u / u_+
//! ```
//!
//! increases the log-likelihood monotonically and converges to the unique
//! positive point matching the data margins (Birch's theorem). Exponent
//! matrices of toric models rarely arrive in that shape, so
//! [`gis_precondition`] first shifts each row by its minimum, rescales, and
//! appends a slack row; this preserves the rational row space and therefore
//! the model and its Birch conditions.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact;
use crate::model::{
    log_likelihood, sufficient_statistics, DataVector, LikelihoodSystem, MleResult,
    ProbabilityVector, ThetaPoint, ToricModel,
};

/// Tolerance on the log-system residual in [`recover_theta`].
pub const RECOVER_THETA_TOL: f64 = 1e-6;

/// Convergence threshold and iteration budget for [`ips_solve`].
#[derive(Debug, Clone)]
pub struct IpsConfig {
    /// Stop once the Birch residual of the iterate drops below this.
    pub epsilon: f64,
    pub max_iterations: usize,
}

impl Default for IpsConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-11,
            max_iterations: 1_000_000,
        }
    }
}

impl IpsConfig {
    fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// The rescaled feature system produced by [`gis_precondition`], together
/// with the record needed to map sufficient statistics between the original
/// and preconditioned coordinates.
#[derive(Debug, Clone)]
pub struct PreconditionedSystem {
    /// Shifted integer rows (original row minus its minimum), kept rows only.
    shifted: Vec<Vec<i64>>,
    /// Indices into the original exponent matrix for each shifted row.
    kept: Vec<usize>,
    /// Row minima of the original matrix, one per original row.
    row_min: Vec<i64>,
    /// Common denominator: the largest column sum of the shifted rows.
    total: i64,
    /// Feature matrix (shifted rows / total, plus the slack row), floats.
    features: DMatrix<f64>,
}

impl PreconditionedSystem {
    /// Number of feature rows, slack included.
    pub fn feature_count(&self) -> usize {
        self.features.nrows()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn kept_rows(&self) -> &[usize] {
        &self.kept
    }

    pub fn row_min(&self) -> &[i64] {
        &self.row_min
    }

    /// Exact feature rows, slack row last. All entries lie in `[0, 1]` and
    /// every column sums to exactly one.
    pub fn exact_feature_rows(&self) -> Vec<Vec<BigRational>> {
        let n = self.features.ncols();
        let t = exact::ratio_from_i64(self.total);
        let mut rows: Vec<Vec<BigRational>> = self
            .shifted
            .iter()
            .map(|row| row.iter().map(|&v| exact::ratio_from_i64(v) / &t).collect())
            .collect();
        let mut slack = vec![BigRational::one(); n];
        for row in &rows {
            for (s, v) in slack.iter_mut().zip(row) {
                *s -= v;
            }
        }
        rows.push(slack);
        rows
    }

    /// Maps exact sufficient statistics of the original system (length `d`,
    /// last coordinate one) to the preconditioned margins (slack last).
    pub fn map_sufficient_statistics(&self, b: &[BigRational]) -> Vec<BigRational> {
        let t = exact::ratio_from_i64(self.total);
        let mut out: Vec<BigRational> = self
            .kept
            .iter()
            .map(|&r| (&b[r] - exact::ratio_from_i64(self.row_min[r])) / &t)
            .collect();
        let mut slack = BigRational::one();
        for v in &out {
            slack -= v;
        }
        out.push(slack);
        out
    }
}

/// Rewrites the exponent matrix into generalized-iterative-scaling shape:
/// entries nonnegative, every column summing to one, same rational row
/// space (the slack row restores the homogenizing direction).
pub fn gis_precondition(model: &ToricModel) -> PreconditionedSystem {
    let n = model.n();
    let mut shifted: Vec<Vec<i64>> = Vec::new();
    let mut kept = Vec::new();
    let mut row_min = Vec::new();
    for (i, row) in model.a_bar().iter().enumerate() {
        let m = row.iter().copied().min().unwrap();
        row_min.push(m);
        let s: Vec<i64> = row.iter().map(|&v| v - m).collect();
        if s.iter().any(|&v| v != 0) {
            shifted.push(s);
            kept.push(i);
        }
    }
    let mut total = 0i64;
    for j in 0..n {
        total = total.max(shifted.iter().map(|r| r[j]).sum());
    }
    if total == 0 {
        total = 1;
    }
    let mut features = DMatrix::zeros(shifted.len() + 1, n);
    for (r, row) in shifted.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            features[(r, j)] = v as f64 / total as f64;
        }
    }
    for j in 0..n {
        let colsum: i64 = shifted.iter().map(|r| r[j]).sum();
        features[(shifted.len(), j)] = (total - colsum) as f64 / total as f64;
    }
    PreconditionedSystem {
        shifted,
        kept,
        row_min,
        total,
        features,
    }
}

/// One generalized-iterative-scaling run, exposed step by step so callers
/// can watch the iterates (the acceptance suite asserts the log-likelihood
/// climbs on every step).
pub struct IpsIteration<'a> {
    system: LikelihoodSystem<'a>,
    features: DMatrix<f64>,
    log_target: DVector<f64>,
    log_p: Vec<f64>,
    p: Vec<f64>,
    iterations: usize,
}

impl<'a> IpsIteration<'a> {
    pub fn new(model: &'a ToricModel, data: &'a DataVector) -> Result<Self> {
        model.check_positive_scaling()?;
        let system = LikelihoodSystem::new(model, data)?;
        let pre = gis_precondition(model);
        let b = pre.map_sufficient_statistics(&sufficient_statistics(model, data)?);
        if b.iter().any(|v| v.is_zero()) {
            // A zero preconditioned margin certifies that no strictly
            // positive point can match the data: the MLE lies on the
            // boundary of the marginal cone.
            return Err(Error::NotConverged {
                iterations: 0,
                epsilon: f64::NAN,
                residual: f64::INFINITY,
            });
        }
        let log_target = DVector::from_iterator(
            b.len(),
            b.iter().map(|v| crate::model::rational_to_f64(v).ln()),
        );
        let sum_c: f64 = model.scaling().iter().sum();
        let log_p: Vec<f64> = model.scaling().iter().map(|&c| (c / sum_c).ln()).collect();
        let p = log_p.iter().map(|&v| v.exp()).collect();
        Ok(Self {
            system,
            features: pre.features,
            log_target,
            log_p,
            p,
            iterations: 0,
        })
    }

    pub fn current(&self) -> &[f64] {
        &self.p
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn birch_residual(&self) -> f64 {
        self.system
            .birch_residual(&ProbabilityVector::new(self.p.clone()))
            .expect("dimensions checked at construction")
    }

    pub fn log_likelihood(&self) -> f64 {
        log_likelihood(self.system.data(), &ProbabilityVector::new(self.p.clone()))
            .expect("iterates stay positive")
    }

    /// One multiplicative update, in log space.
    pub fn step(&mut self) {
        let pv = DVector::from_column_slice(&self.p);
        let margins = &self.features * pv;
        let mut gain = DVector::zeros(margins.len());
        for i in 0..margins.len() {
            gain[i] = self.log_target[i] - margins[i].ln();
        }
        let adjust = self.features.transpose() * gain;
        for (lp, a) in self.log_p.iter_mut().zip(adjust.iter()) {
            *lp += a;
        }
        for (pj, &lp) in self.p.iter_mut().zip(&self.log_p) {
            *pj = lp.exp();
        }
        self.iterations += 1;
    }
}

/// Computes the unique positive MLE of a positively scaled toric model by
/// iterative proportional scaling, starting from `p = c / sum(c)`.
pub fn ips_solve(model: &ToricModel, data: &DataVector, cfg: &IpsConfig) -> Result<MleResult> {
    cfg.validate()?;
    let mut it = IpsIteration::new(model, data)?;
    let mut last_ll = it.log_likelihood();
    loop {
        let residual = it.birch_residual();
        if residual <= cfg.epsilon {
            let p = ProbabilityVector::new(it.current().to_vec());
            let theta = recover_theta(model, &p).ok().map(|(t, _)| t);
            return Ok(MleResult {
                log_likelihood: log_likelihood(data, &p)?,
                birch_residual: residual,
                iterations_or_steps: it.iterations(),
                theta_hat: theta,
                p_hat: p,
            });
        }
        if it.iterations() >= cfg.max_iterations {
            return Err(Error::NotConverged {
                iterations: it.iterations(),
                epsilon: cfg.epsilon,
                residual,
            });
        }
        it.step();
        let ll = it.log_likelihood();
        // Monotone ascent is a theorem for this update; tolerate only
        // rounding-level wobble near the fixed point.
        assert!(
            ll >= last_ll - 1e-9 * (1.0 + last_ll.abs()),
            "log-likelihood decreased: {last_ll} -> {ll}"
        );
        last_ll = ll;
    }
}

/// Recovers a parameter point from a strictly positive `p` that lies on the
/// model: solves `A^T log(theta) = log(p) - log(c)` in the least-squares
/// sense and reports the sup-norm residual of the log system. Fails with
/// `OffModel` when the residual exceeds [`RECOVER_THETA_TOL`].
pub fn recover_theta(model: &ToricModel, p: &ProbabilityVector) -> Result<(ThetaPoint, f64)> {
    model.check_positive_scaling()?;
    if p.len() != model.n() {
        return Err(Error::DimensionMismatch {
            what: "probability vector length",
            expected: model.n(),
            got: p.len(),
        });
    }
    if let Some(i) = p.values().iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::NonPositiveP(i));
    }
    let d = model.d();
    let a = model.a_bar_f64();
    let rhs_full = DVector::from_iterator(
        model.n(),
        p.values()
            .iter()
            .zip(model.scaling())
            .map(|(&pv, &cv)| pv.ln() - cv.ln()),
    );
    let gram = a * a.transpose();
    let rhs = a * &rhs_full;
    let x = gram
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularJacobian(f64::NAN))?;
    let fitted = a.transpose() * &x;
    let log_residual = (&fitted - &rhs_full).amax();
    if log_residual > RECOVER_THETA_TOL {
        return Err(Error::OffModel(log_residual, RECOVER_THETA_TOL));
    }
    let theta = ThetaPoint::new((0..d).map(|i| x[i].exp()).collect());
    Ok((theta, log_residual))
}
