//! IPS versus homotopy timing harness.
//!
//! The grid fixes rational normal scrolls with constant block size
//! (`n_i = k` for all blocks), draws positive integer data, and times the
//! two solvers against each other: iterative proportional scaling at the
//! all-ones scaling, and path tracking from the binomially scaled closed
//! form to the all-ones scaling. The two estimates must agree to `1e-8` in
//! every cell before a timing is recorded; absolute times are reported but
//! never gated, since they depend on the machine.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::{
    binomial_scroll_scaling, scroll_closed_form_start, scroll_model, ScrollSpec,
};
use crate::homotopy::{ScalingHomotopy, TrackerConfig};
use crate::ips::{ips_solve, IpsConfig};
use crate::model::DataVector;

/// Environment variable read by [`run_bench`] for the number of worker
/// threads (default 1; each cell is timed on its own thread either way).
pub const THREADS_ENV: &str = "TORIC_MLE_BENCH_THREADS";

pub const CSV_HEADER: &str = "family,d,k,solver,mean_seconds,agreement_residual";

/// Grid description for [`run_bench`].
#[derive(Debug, Clone)]
pub struct BenchSpec {
    /// Numbers of scroll blocks (the `d - 1` axis).
    pub d_minus_1: Vec<usize>,
    /// Constant block sizes (the `k` axis).
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// IPS convergence target.
    pub epsilon: f64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            d_minus_1: vec![5, 10, 15],
            k_values: (4..=13).collect(),
            trials: 7,
            seed: 2016,
            epsilon: 1e-11,
        }
    }
}

impl BenchSpec {
    fn validate(&self) -> Result<()> {
        if self.d_minus_1.is_empty() || self.k_values.is_empty() {
            return Err(Error::InvalidConfig("empty benchmark grid".into()));
        }
        if self.d_minus_1.contains(&0) || self.k_values.contains(&0) {
            return Err(Error::InvalidConfig("grid values must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// One output row; every cell produces one row per solver.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub family: String,
    pub d: usize,
    pub k: usize,
    pub solver: String,
    pub mean_seconds: f64,
    pub agreement_residual: f64,
}

fn run_cell(spec: &BenchSpec, d_minus_1: usize, k: usize) -> Result<[BenchRow; 2]> {
    let scroll = ScrollSpec::new(vec![k; d_minus_1])?;
    let n = scroll.states();
    let c_stat = vec![1.0; n];
    let stat = scroll_model(&scroll, c_stat)?;
    let c_easy: Vec<f64> = binomial_scroll_scaling(&scroll)
        .iter()
        .map(|v| num_traits::ToPrimitive::to_f64(v).unwrap())
        .collect();
    let easy = scroll_model(&scroll, c_easy)?;
    let ips_cfg = IpsConfig {
        epsilon: spec.epsilon,
        ..IpsConfig::default()
    };
    let tracker_cfg = TrackerConfig::default();

    // One deterministic stream per cell, so cells can run in any order.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ ((d_minus_1 as u64) << 32) ^ (k as u64));
    let mut ips_total = 0.0;
    let mut hom_total = 0.0;
    let mut worst_agreement = 0.0f64;
    for _ in 0..spec.trials {
        let u = DataVector::new((0..n).map(|_| rng.gen_range(1..=1000)).collect())
            .expect("positive counts");

        let started = Instant::now();
        let ips_result = ips_solve(&stat, &u, &ips_cfg)?;
        ips_total += started.elapsed().as_secs_f64();

        let started = Instant::now();
        let start = match scroll_closed_form_start(&scroll, &u) {
            Ok(theta) => theta,
            // Degenerate data for the closed form: fall back to IPS at the
            // easy scaling.
            Err(Error::StartInvalid(_)) => ips_solve(&easy, &u, &ips_cfg)?
                .theta_hat
                .ok_or(Error::StartInvalid(f64::NAN))?,
            Err(e) => return Err(e),
        };
        let homotopy = ScalingHomotopy::new(&easy, &stat, &u)?;
        let (tracked, _) = homotopy.track(&start, &tracker_cfg)?;
        hom_total += started.elapsed().as_secs_f64();

        let agreement = ips_result
            .p_hat
            .values()
            .iter()
            .zip(tracked.p_hat.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if agreement > 1e-8 {
            return Err(Error::SolverDisagreement {
                d_minus_1,
                k,
                residual: agreement,
            });
        }
        worst_agreement = worst_agreement.max(agreement);
    }
    let mk_row = |solver: &str, total: f64| BenchRow {
        family: "scroll".to_string(),
        d: d_minus_1,
        k,
        solver: solver.to_string(),
        mean_seconds: total / spec.trials as f64,
        agreement_residual: worst_agreement,
    };
    Ok([mk_row("ips", ips_total), mk_row("homotopy", hom_total)])
}

/// Runs the whole grid. Each cell is timed on a dedicated thread;
/// [`THREADS_ENV`] controls how many cells run concurrently (keep it at the
/// default of 1 when the timings themselves matter).
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let cells: Vec<(usize, usize)> = spec
        .d_minus_1
        .iter()
        .flat_map(|&d| spec.k_values.iter().map(move |&k| (d, k)))
        .collect();
    let workers = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<[BenchRow; 2]>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..workers.min(cells.len()) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(d, k)) = cells.get(idx) else {
                    break;
                };
                let outcome = run_cell(spec, d, k);
                results.lock().unwrap().push((idx, outcome));
            });
        }
    });
    let mut collected = results.into_inner().unwrap();
    collected.sort_by_key(|(idx, _)| *idx);
    let mut rows = Vec::with_capacity(2 * cells.len());
    for (_, outcome) in collected {
        let [ips_row, hom_row] = outcome?;
        rows.push(ips_row);
        rows.push(hom_row);
    }
    Ok(rows)
}

/// Writes rows in the stable CSV schema.
pub fn write_csv(rows: &[BenchRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6e},{:.3e}",
            row.family, row.d, row.k, row.solver, row.mean_seconds, row.agreement_residual
        )?;
    }
    Ok(())
}
