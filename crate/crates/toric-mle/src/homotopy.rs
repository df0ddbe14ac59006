//! Scaling-to-scaling parameter homotopy.
//!
//! For two positive scalings of one exponent matrix, the straight line
//! `H(theta, t) = t F_easy(theta) + (1 - t) F_stat(theta)` between the two
//! likelihood systems equals the likelihood system of the blended scaling
//! `c(t) = t c_easy + (1 - t) c_stat`. Birch's theorem applies at every
//! `t` in `[0, 1]`: there is exactly one positive solution, and the
//! Jacobian `u_+ A diag(p) A^T diag(1/theta)` is a product of full-rank
//! matrices there, so the positive path from the easy MLE at `t = 1` runs
//! without turning points straight to the target MLE at `t = 0`.
//!
//! The tracker is a plain Euler predictor on the Davidenko equation
//! `J theta' = -(F_easy - F_stat)` with a Newton corrector and doubling /
//! halving step control. Everything stays in real arithmetic: path safety
//! is a theorem here, not a hope.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    log_likelihood, DataVector, LikelihoodSystem, MleResult, ProbabilityVector, ThetaPoint,
    ToricModel,
};

/// Step-control and tolerance knobs for [`ScalingHomotopy::track`].
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub initial_step: f64,
    pub min_step: f64,
    /// Corrector target on `||H||_inf / u_+`.
    pub corrector_tol: f64,
    pub max_newton_iters: usize,
    pub step_expand: f64,
    pub step_contract: f64,
    /// Endpoint target on the Birch residual at `t = 0`.
    pub endgame_tol: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_step: 1e-9,
            corrector_tol: 1e-12,
            max_newton_iters: 6,
            step_expand: 2.0,
            step_contract: 0.5,
            endgame_tol: 1e-13,
        }
    }
}

impl TrackerConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= 1.0
            && self.corrector_tol > 0.0
            && self.endgame_tol > 0.0
            && self.max_newton_iters >= 1
            && self.step_expand > 1.0
            && self.step_contract > 0.0
            && self.step_contract < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// One accepted point of a tracked path.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub t: f64,
    pub theta: Vec<f64>,
    /// `||H(theta, t)||_inf` after correction.
    pub residual: f64,
}

/// Diagnostics of a full tracker run.
#[derive(Debug, Clone, Default)]
pub struct PathTrace {
    pub samples: Vec<PathSample>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// The homotopy between the likelihood systems of two scalings of the same
/// exponent matrix, for a fixed data vector.
pub struct ScalingHomotopy<'a> {
    system: LikelihoodSystem<'a>,
    c_easy: Vec<f64>,
    c_stat: Vec<f64>,
}

impl<'a> ScalingHomotopy<'a> {
    /// Pairs an easy and a target scaling. Both models must share the
    /// exponent matrix; both scalings must be strictly positive.
    pub fn new(easy: &ToricModel, stat: &'a ToricModel, data: &'a DataVector) -> Result<Self> {
        if easy.a_bar() != stat.a_bar() {
            return Err(Error::ModelMismatch);
        }
        easy.check_positive_scaling()?;
        stat.check_positive_scaling()?;
        Ok(Self {
            system: LikelihoodSystem::new(stat, data)?,
            c_easy: easy.scaling().to_vec(),
            c_stat: stat.scaling().to_vec(),
        })
    }

    pub fn data(&self) -> &DataVector {
        self.system.data()
    }

    fn model(&self) -> &ToricModel {
        self.system.model()
    }

    /// The blended scaling `c(t) = t c_easy + (1 - t) c_stat`.
    pub fn scaling_at(&self, t: f64) -> Vec<f64> {
        self.c_easy
            .iter()
            .zip(&self.c_stat)
            .map(|(&e, &s)| t * e + (1.0 - t) * s)
            .collect()
    }

    /// Scaled monomials `c(t) . theta^A` and the bare monomials.
    fn blended_p(&self, theta: &ThetaPoint, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let monomials = self.model().monomials(theta)?;
        let p = monomials
            .iter()
            .zip(self.scaling_at(t))
            .map(|(&m, c)| c * m)
            .collect();
        Ok((p, monomials))
    }

    /// `H(theta, t) = t F_easy + (1 - t) F_stat`, which is the likelihood
    /// residual of the blended scaling.
    pub fn residual(&self, theta: &ThetaPoint, t: f64) -> Result<DVector<f64>> {
        let (p, _) = self.blended_p(theta, t)?;
        Ok(self.system.residual_at_p(&ProbabilityVector::new(p)))
    }

    fn jacobian_at_p(&self, theta: &ThetaPoint, p: &[f64]) -> DMatrix<f64> {
        let d = self.model().d();
        let a = self.model().a_bar_f64();
        let mut weighted = a.clone();
        for (j, &pj) in p.iter().enumerate() {
            for i in 0..d {
                weighted[(i, j)] *= pj;
            }
        }
        let mut jac = &weighted * a.transpose();
        let u_plus = self.system.u_plus();
        for k in 0..d {
            let scale = u_plus / theta.coords()[k];
            for i in 0..d {
                jac[(i, k)] *= scale;
            }
        }
        jac
    }

    /// Davidenko tangent `d theta / d t`: solves
    /// `J_theta theta' = -(F_easy - F_stat)`.
    pub fn tangent(&self, theta: &ThetaPoint, t: f64) -> Result<DVector<f64>> {
        let (p, monomials) = self.blended_p(theta, t)?;
        let jac = self.jacobian_at_p(theta, &p);
        // dH/dt = u_+ A ((c_easy - c_stat) . theta^A), constant in t.
        let dc_p: Vec<f64> = monomials
            .iter()
            .zip(self.c_easy.iter().zip(&self.c_stat))
            .map(|(&m, (&e, &s))| (e - s) * m)
            .collect();
        let dh_dt = self.system.u_plus() * (self.model().a_bar_f64() * DVector::from_vec(dc_p));
        jac.lu().solve(&(-dh_dt)).ok_or(Error::SingularJacobian(t))
    }

    /// Newton iterations on `H(., t)` from `guess`; returns the corrected
    /// point once `||H||_inf / u_+ <= tol`.
    pub fn newton_correct(
        &self,
        guess: &ThetaPoint,
        t: f64,
        tol: f64,
        max_iters: usize,
    ) -> Result<ThetaPoint> {
        let u_plus = self.system.u_plus();
        let mut theta = guess.clone();
        let mut residual = f64::INFINITY;
        for _ in 0..max_iters {
            let (p, _) = self.blended_p(&theta, t)?;
            let h = self
                .system
                .residual_at_p(&ProbabilityVector::new(p.clone()));
            residual = h.amax() / u_plus;
            if residual <= tol {
                return Ok(theta);
            }
            let jac = self.jacobian_at_p(&theta, &p);
            let step = jac.lu().solve(&(-h)).ok_or(Error::SingularJacobian(t))?;
            let coords: Vec<f64> = theta
                .coords()
                .iter()
                .zip(step.iter())
                .map(|(&v, &dv)| v + dv)
                .collect();
            if coords.iter().any(|v| !v.is_finite()) {
                return Err(Error::CorrectorDiverged {
                    t,
                    iterations: max_iters,
                    residual,
                });
            }
            theta = ThetaPoint::new(coords);
        }
        // One last residual check: the loop may have converged on the final
        // update.
        let (p, _) = self.blended_p(&theta, t)?;
        let h = self.system.residual_at_p(&ProbabilityVector::new(p));
        residual = residual.min(h.amax() / u_plus);
        if residual <= tol {
            Ok(theta)
        } else {
            Err(Error::CorrectorDiverged {
                t,
                iterations: max_iters,
                residual,
            })
        }
    }

    /// Tracks the positive MLE from `t = 1` (scaling `c_easy`) to `t = 0`
    /// (scaling `c_stat`). `start` must be (close to) the positive MLE of
    /// the easy scaling; it is corrected at `t = 1` before stepping.
    pub fn track(&self, start: &ThetaPoint, cfg: &TrackerConfig) -> Result<(MleResult, PathTrace)> {
        cfg.validate()?;
        let mut trace = PathTrace::default();
        let mut theta = self.newton_correct(start, 1.0, cfg.corrector_tol, cfg.max_newton_iters)?;
        if !theta.is_strictly_positive() {
            return Err(Error::PositivityLost(1.0));
        }
        let mut t = 1.0;
        let mut det_sign_ref: Option<bool> = None;
        self.record(&mut trace, t, &theta)?;

        // Identical scalings make H independent of t; one full-length step
        // lands on the endpoint.
        let mut step = if self.c_easy == self.c_stat {
            1.0
        } else {
            cfg.initial_step
        };
        let mut successes = 0usize;
        while t > 0.0 {
            let h = step.min(t);
            let tangent = self.tangent(&theta, t)?;
            let predicted = ThetaPoint::new(
                theta
                    .coords()
                    .iter()
                    .zip(tangent.iter())
                    .map(|(&v, &dv)| v - h * dv)
                    .collect(),
            );
            let t_next = (t - h).max(0.0);
            match self.newton_correct(&predicted, t_next, cfg.corrector_tol, cfg.max_newton_iters) {
                Ok(corrected) => {
                    if !corrected.is_strictly_positive() {
                        return Err(Error::PositivityLost(t_next));
                    }
                    // Birch path safety also forbids sign flips of det J.
                    let (p, _) = self.blended_p(&corrected, t_next)?;
                    let det = self.jacobian_at_p(&corrected, &p).lu().determinant();
                    let sign = det > 0.0;
                    if det == 0.0 || det_sign_ref.is_some_and(|s| s != sign) {
                        return Err(Error::SingularJacobian(t_next));
                    }
                    det_sign_ref = Some(sign);
                    theta = corrected;
                    t = t_next;
                    trace.accepted_steps += 1;
                    self.record(&mut trace, t, &theta)?;
                    successes += 1;
                    if successes >= 3 {
                        step = (step * cfg.step_expand).min(1.0);
                        successes = 0;
                    }
                }
                Err(Error::CorrectorDiverged { .. }) => {
                    trace.rejected_steps += 1;
                    successes = 0;
                    step *= cfg.step_contract;
                    if step < cfg.min_step {
                        return Err(Error::StepUnderflow {
                            t,
                            min_step: cfg.min_step,
                        });
                    }
                }
                Err(other) => return Err(other),
            }
        }

        // Endgame: polish at t = 0 until the Birch residual meets the
        // endpoint tolerance (t = 0 is a regular point, so plain Newton).
        let endgame_h_tol = cfg.endgame_tol; // residual is already / u_+
        theta = self.newton_correct(&theta, 0.0, endgame_h_tol, 3 * cfg.max_newton_iters)?;
        if !theta.is_strictly_positive() {
            return Err(Error::PositivityLost(0.0));
        }
        let p = ProbabilityVector::new(self.blended_p(&theta, 0.0)?.0);
        let birch = self.system.birch_residual(&p)?;
        let result = MleResult {
            log_likelihood: log_likelihood(self.data(), &p)?,
            birch_residual: birch,
            iterations_or_steps: trace.accepted_steps,
            theta_hat: Some(theta),
            p_hat: p,
        };
        Ok((result, trace))
    }

    fn record(&self, trace: &mut PathTrace, t: f64, theta: &ThetaPoint) -> Result<()> {
        let h = self.residual(theta, t)?;
        trace.samples.push(PathSample {
            t,
            theta: theta.coords().to_vec(),
            residual: h.amax(),
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn veronese_pair() -> (ToricModel, ToricModel, DataVector) {
        let a = vec![vec![0, 1, 2, 0, 1, 0], vec![0, 0, 0, 1, 1, 2]];
        let easy = ToricModel::new(a.clone(), vec![1.0, 2.0, 1.0, 2.0, 2.0, 1.0]).unwrap();
        let stat = ToricModel::new(a, vec![1.0; 6]).unwrap();
        let data = DataVector::new(vec![1, 3, 5, 7, 9, 2]).unwrap();
        (easy, stat, data)
    }

    // Hand-computed MLE of the easy scaling: theta = (11/6, 5/3),
    // s = 4/81 in our (theta_1, theta_2, s) order.
    fn easy_mle() -> ThetaPoint {
        ThetaPoint::new(vec![11.0 / 6.0, 5.0 / 3.0, 4.0 / 81.0])
    }

    #[test]
    fn rejects_mismatched_exponent_matrices() {
        let (easy, _, data) = veronese_pair();
        let other = ToricModel::new(vec![vec![0, 1, 2]], vec![1.0; 3]).unwrap();
        let Err(err) = ScalingHomotopy::new(&easy, &other, &data) else {
            panic!("mismatched matrices must be rejected");
        };
        assert!(matches!(err, Error::ModelMismatch));
    }

    #[test]
    fn residual_at_endpoints_matches_the_standalone_systems() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let theta = ThetaPoint::new(vec![0.7, 1.3, 0.4]);
        let sys_easy = LikelihoodSystem::new(&easy, &data).unwrap();
        let sys_stat = LikelihoodSystem::new(&stat, &data).unwrap();
        let h1 = hom.residual(&theta, 1.0).unwrap();
        let h0 = hom.residual(&theta, 0.0).unwrap();
        let f_easy = sys_easy.residual(&theta).unwrap();
        let f_stat = sys_stat.residual(&theta).unwrap();
        for i in 0..3 {
            assert_relative_eq!(h1[i], f_easy[i], max_relative = 1e-14);
            assert_relative_eq!(h0[i], f_stat[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn residual_at_t1_matches_the_displayed_easy_bracket() {
        // Hand expansion of the easy system with c = (1,2,1,2,2,1),
        // written in the homogenized reading (t1 = scale):
        //   54 t1 t2^2 + 54 t1 t2 t3 + 54 t1 t2 - 22
        //   54 t1 t2 t3 + 54 t1 t3^2 + 54 t1 t3 - 20
        //   27 t1 t2^2 + 54 t1 t2 t3 + 27 t1 t3^2 + 54 t1 t2 + 54 t1 t3 + 27 t1 - 27
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let (t2, t3, t1) = (0.7, 1.3, 0.4);
        let h = hom
            .residual(&ThetaPoint::new(vec![t2, t3, t1]), 1.0)
            .unwrap();
        let row_1 = 54.0 * t1 * t2 * t2 + 54.0 * t1 * t2 * t3 + 54.0 * t1 * t2 - 22.0;
        let row_2 = 54.0 * t1 * t2 * t3 + 54.0 * t1 * t3 * t3 + 54.0 * t1 * t3 - 20.0;
        let row_s = 27.0 * t1 * t2 * t2
            + 54.0 * t1 * t2 * t3
            + 27.0 * t1 * t3 * t3
            + 54.0 * t1 * t2
            + 54.0 * t1 * t3
            + 27.0 * t1
            - 27.0;
        assert_relative_eq!(h[0], row_1, max_relative = 1e-13);
        assert_relative_eq!(h[1], row_2, max_relative = 1e-13);
        assert_relative_eq!(h[2], row_s, max_relative = 1e-13);
    }

    #[test]
    fn residual_is_linear_in_t() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let theta = ThetaPoint::new(vec![0.9, 0.4, 1.7]);
        let h1 = hom.residual(&theta, 1.0).unwrap();
        let h0 = hom.residual(&theta, 0.0).unwrap();
        let hmid = hom.residual(&theta, 0.5).unwrap();
        for i in 0..3 {
            assert_relative_eq!(hmid[i], 0.5 * h1[i] + 0.5 * h0[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn mixed_monomial_coefficient_blends_as_27_plus_27t() {
        // In the running example the theta_1 theta_2 theta_3 coefficient of
        // every row is 27 + 27 t (homogenized reading: rows s, t1, t2).
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        for t in [0.0, 0.25, 0.5, 1.0] {
            // c(t) for the mixed column (1,1): index 4.
            let c = hom.scaling_at(t)[4];
            assert_relative_eq!(27.0 * c, 27.0 + 27.0 * t, max_relative = 1e-14);
        }
    }

    #[test]
    fn tangent_vanishes_for_identical_scalings() {
        let (_, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&stat, &stat, &data).unwrap();
        let tangent = hom
            .tangent(&ThetaPoint::new(vec![1.1, 0.8, 0.2]), 0.7)
            .unwrap();
        assert!(tangent.amax() < 1e-14);
    }

    #[test]
    fn tangent_matches_finite_differences_along_the_path() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let cfg = TrackerConfig::default();
        let t = 1.0;
        let theta = hom
            .newton_correct(&easy_mle(), t, cfg.corrector_tol, 8)
            .unwrap();
        let tangent = hom.tangent(&theta, t).unwrap();
        let h = 1e-5;
        let theta_behind = hom
            .newton_correct(&theta, t - h, cfg.corrector_tol, 8)
            .unwrap();
        for i in 0..3 {
            let fd = (theta.coords()[i] - theta_behind.coords()[i]) / h;
            assert_relative_eq!(tangent[i], fd, max_relative = 1e-4);
        }
    }

    #[test]
    fn corrector_leaves_exact_solutions_alone() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let exact = hom.newton_correct(&easy_mle(), 1.0, 1e-14, 10).unwrap();
        let again = hom.newton_correct(&exact, 1.0, 1e-12, 1).unwrap();
        for (a, b) in exact.coords().iter().zip(again.coords()) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn corrector_reconverges_from_a_perturbed_start() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let exact = hom.newton_correct(&easy_mle(), 1.0, 1e-14, 10).unwrap();
        let perturbed = ThetaPoint::new(exact.coords().iter().map(|&v| v * (1.0 + 1e-3)).collect());
        let back = hom.newton_correct(&perturbed, 1.0, 1e-12, 10).unwrap();
        for (a, b) in exact.coords().iter().zip(back.coords()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn corrector_converges_quadratically() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        let exact = hom.newton_correct(&easy_mle(), 1.0, 1e-14, 10).unwrap();
        let mut theta = ThetaPoint::new(exact.coords().iter().map(|&v| v * (1.0 + 5e-3)).collect());
        let mut residuals = Vec::new();
        for _ in 0..4 {
            let h = hom.residual(&theta, 1.0).unwrap();
            residuals.push(h.amax() / 27.0);
            theta = hom.newton_correct(&theta, 1.0, 1e-16, 1).unwrap_or(theta);
        }
        // r_{k+1} <= C r_k^2 with a generous constant, until roundoff.
        for k in 0..residuals.len() - 1 {
            if residuals[k] > 1e-7 {
                assert!(
                    residuals[k + 1] <= 1e3 * residuals[k] * residuals[k],
                    "{residuals:?}"
                );
            }
        }
    }

    #[test]
    fn constant_path_finishes_immediately() {
        let (_, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&stat, &stat, &data).unwrap();
        let ips = crate::ips::ips_solve(&stat, &data, &crate::ips::IpsConfig::default()).unwrap();
        let start = ips.theta_hat.unwrap();
        let (result, trace) = hom.track(&start, &TrackerConfig::default()).unwrap();
        for (a, b) in result
            .theta_hat
            .unwrap()
            .coords()
            .iter()
            .zip(start.coords())
        {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
        // A constant path is recognized and finished in one step.
        assert_eq!(trace.rejected_steps, 0);
        assert!(trace.accepted_steps <= 2, "{} steps", trace.accepted_steps);
    }

    #[test]
    fn tracks_the_running_example_to_the_printed_endpoint() {
        let (easy, stat, data) = veronese_pair();
        let hom = ScalingHomotopy::new(&easy, &stat, &data).unwrap();
        // Rounded start, as printed: (s, t1, t2) = (0.0493, 1.8333, 1.6667).
        let start = ThetaPoint::new(vec![1.8333, 1.6667, 0.0493]);
        let (result, trace) = hom.track(&start, &TrackerConfig::default()).unwrap();
        let theta = result.theta_hat.unwrap();
        assert_relative_eq!(theta.coords()[0], 1.6326, epsilon = 5e-4);
        assert_relative_eq!(theta.coords()[1], 1.5150, epsilon = 5e-4);
        assert_relative_eq!(theta.coords()[2], 0.0863, epsilon = 5e-4);
        let expected_p = [0.09, 0.14, 0.23, 0.13, 0.21, 0.20];
        for (computed, printed) in result.p_hat.values().iter().zip(expected_p) {
            assert!((computed - printed).abs() < 5e-3);
        }
        assert!(result.birch_residual <= 1e-13 * 27.0);
        // Path diagnostics: t decreasing, all samples positive.
        for pair in trace.samples.windows(2) {
            assert!(pair[1].t < pair[0].t);
        }
        assert!(trace
            .samples
            .iter()
            .all(|s| s.theta.iter().all(|&v| v > 0.0)));
    }

    #[test]
    fn endpoint_agrees_with_ips_on_a_random_scroll() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(301);
        let spec = crate::families::ScrollSpec::new(vec![4, 4, 4, 4, 4]).unwrap();
        let u =
            DataVector::new((0..spec.states()).map(|_| rng.gen_range(1..=100)).collect()).unwrap();
        let c_easy: Vec<f64> = crate::families::binomial_scroll_scaling(&spec)
            .iter()
            .map(|v| num_traits::ToPrimitive::to_f64(v).unwrap())
            .collect();
        let easy = crate::families::scroll_model(&spec, c_easy).unwrap();
        let stat = crate::families::scroll_model(&spec, vec![1.0; spec.states()]).unwrap();
        let start = crate::families::scroll_closed_form_start(&spec, &u).unwrap();
        let hom = ScalingHomotopy::new(&easy, &stat, &u).unwrap();
        let (tracked, _) = hom.track(&start, &TrackerConfig::default()).unwrap();
        let ips = crate::ips::ips_solve(&stat, &u, &crate::ips::IpsConfig::default()).unwrap();
        for (a, b) in tracked.p_hat.values().iter().zip(ips.p_hat.values()) {
            assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
    }
}
