//! Rational normal scrolls.
//!
//! A scroll on block sizes `(n_1, ..., n_{d-1})` is the toric model of the
//! block matrix whose first `d-2` rows are block indicators and whose last
//! row runs `0, 1, ..., n_i` inside each block. Its ML degree is the number
//! of distinct complex roots of the product of the block polynomials
//! `g_i = c_{i0} + c_{i1} x + ... + c_{i n_i} x^{n_i}`, so it is computable
//! exactly by a gcd.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use crate::model::{DataVector, LikelihoodSystem, ThetaPoint, ToricModel};
use crate::poly::RationalPoly;

/// Block sizes of a scroll; every block length must be at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrollSpec {
    n_list: Vec<usize>,
}

impl ScrollSpec {
    pub fn new(n_list: Vec<usize>) -> Result<Self> {
        if n_list.is_empty() {
            return Err(Error::InvalidConfig(
                "scroll needs at least one block".into(),
            ));
        }
        if n_list.contains(&0) {
            return Err(Error::InvalidConfig(
                "scroll block sizes must be at least 1".into(),
            ));
        }
        Ok(Self { n_list })
    }

    pub fn n_list(&self) -> &[usize] {
        &self.n_list
    }

    /// Number of blocks, which is `d - 1`.
    pub fn blocks(&self) -> usize {
        self.n_list.len()
    }

    /// Number of states: `d - 1 + sum(n_i)`.
    pub fn states(&self) -> usize {
        self.blocks() + self.n_list.iter().sum::<usize>()
    }

    /// Column ranges of each block.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.blocks());
        let mut start = 0;
        for &ni in &self.n_list {
            ranges.push(start..start + ni + 1);
            start += ni + 1;
        }
        ranges
    }
}

/// Builds the scroll exponent matrix: `d - 2` block indicator rows followed
/// by the per-block power row (the last block carries no indicator).
pub fn scroll_model(spec: &ScrollSpec, c: Vec<f64>) -> Result<ToricModel> {
    let n = spec.states();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            what: "scroll scaling length",
            expected: n,
            got: c.len(),
        });
    }
    let blocks = spec.blocks();
    let ranges = spec.block_ranges();
    let mut a: Vec<Vec<i64>> = Vec::with_capacity(blocks);
    for range in ranges.iter().take(blocks.saturating_sub(1)) {
        let mut row = vec![0i64; n];
        for j in range.clone() {
            row[j] = 1;
        }
        a.push(row);
    }
    let mut powers = vec![0i64; n];
    for range in &ranges {
        for (off, j) in range.clone().enumerate() {
            powers[j] = off as i64;
        }
    }
    a.push(powers);
    ToricModel::new(a, c)
}

/// The block polynomials `g_i` of an exact scaling.
pub fn block_polynomials(spec: &ScrollSpec, c: &[BigRational]) -> Result<Vec<RationalPoly>> {
    if c.len() != spec.states() {
        return Err(Error::DimensionMismatch {
            what: "scroll scaling length",
            expected: spec.states(),
            got: c.len(),
        });
    }
    if let Some(i) = c.iter().position(|v| v.is_zero()) {
        return Err(Error::ZeroScaling(i));
    }
    Ok(spec
        .block_ranges()
        .iter()
        .map(|r| RationalPoly::new(c[r.clone()].to_vec()))
        .collect())
}

/// ML degree of the scroll scaled by `c`: the number of distinct complex
/// roots of `g_1 g_2 ... g_{d-1}`, computed by exact gcd.
pub fn scroll_mldegree(spec: &ScrollSpec, c: &[BigRational]) -> Result<usize> {
    let gs = block_polynomials(spec, c)?;
    let mut product = RationalPoly::one();
    for g in &gs {
        product = product.mul(g);
    }
    product.distinct_root_count()
}

/// ML degree of the Hirzebruch surface under the all-ones scaling:
/// `n_1 + n_2 - gcd(n_1 + 1, n_2 + 1) + 1`. Cross-checked against the
/// root-counting route on every call.
pub fn hirzebruch_mldegree(n1: usize, n2: usize) -> usize {
    assert!(n1 >= 1 && n2 >= 1, "block sizes must be at least 1");
    let formula = n1 + n2 - gcd(n1 + 1, n2 + 1) + 1;
    let spec = ScrollSpec::new(vec![n1, n2]).expect("positive blocks");
    let ones = vec![BigRational::one(); spec.states()];
    let counted = scroll_mldegree(&spec, &ones).expect("ones scaling is nonzero");
    assert_eq!(formula, counted, "formula and root count disagree");
    formula
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The scaling `c_{ij} = binomial(n_i, j)`, which turns every block
/// polynomial into `(1 + x)^{n_i}` and drops the ML degree to one.
pub fn binomial_scroll_scaling(spec: &ScrollSpec) -> Vec<BigRational> {
    let mut c = Vec::with_capacity(spec.states());
    for &ni in spec.n_list() {
        let mut value = BigInt::one();
        for j in 0..=ni {
            c.push(BigRational::from_integer(value.clone()));
            // binomial(n, j+1) = binomial(n, j) * (n - j) / (j + 1)
            value = value * BigInt::from((ni - j) as i64) / BigInt::from((j + 1) as i64);
        }
    }
    c
}

/// Closed-form MLE of the binomially scaled scroll, Newton-polished.
///
/// At the binomial scaling the likelihood system uncouples: with
/// `w = sum_{b,j} j u_{bj}` the last variable solves the linear equation
/// `w (1 + x) = x * sum_i n_i u_{i+}`, after which each block variable and
/// the homogenizing scale are rational in the data:
///
/// ```text
/// theta_b = (u_{b+} / u_{last+}) * (1 + x)^{n_last - n_b}
/// s       = u_{last+} / (u_+ (1 + x)^{n_last})
/// ```
///
/// The polish step guards against data for which the closed form is
/// degenerate; the result always satisfies a Birch residual of `1e-10` or
/// the call fails with `StartInvalid`.
pub fn scroll_closed_form_start(spec: &ScrollSpec, data: &DataVector) -> Result<ThetaPoint> {
    if data.len() != spec.states() {
        return Err(Error::DimensionMismatch {
            what: "data length",
            expected: spec.states(),
            got: data.len(),
        });
    }
    let ranges = spec.block_ranges();
    let blocks = spec.blocks();
    let block_sums: Vec<f64> = ranges
        .iter()
        .map(|r| data.counts()[r.clone()].iter().sum::<u64>() as f64)
        .collect();
    let weighted: f64 = ranges
        .iter()
        .map(|r| {
            data.counts()[r.clone()]
                .iter()
                .enumerate()
                .map(|(j, &u)| (j as u64 * u) as f64)
                .sum::<f64>()
        })
        .sum();
    let weight_cap: f64 = spec
        .n_list()
        .iter()
        .zip(&block_sums)
        .map(|(&ni, &s)| ni as f64 * s)
        .sum();
    let denom = weight_cap - weighted;
    let last_sum = block_sums[blocks - 1];
    if denom <= 0.0 || weighted <= 0.0 || last_sum <= 0.0 {
        return Err(Error::StartInvalid(f64::INFINITY));
    }
    let x = weighted / denom;
    let n_last = spec.n_list()[blocks - 1] as f64;
    let u_plus = data.total() as f64;
    let mut coords = Vec::with_capacity(blocks + 1);
    for (&nb, &sum_b) in spec.n_list().iter().zip(&block_sums).take(blocks - 1) {
        coords.push(sum_b / last_sum * (1.0 + x).powf(n_last - nb as f64));
    }
    coords.push(x);
    coords.push(last_sum / (u_plus * (1.0 + x).powf(n_last)));

    // Newton polish on the full likelihood system.
    let c_f64: Vec<f64> = binomial_scroll_scaling(spec)
        .iter()
        .map(|v| num_traits::ToPrimitive::to_f64(v).unwrap())
        .collect();
    let model = scroll_model(spec, c_f64)?;
    let sys = LikelihoodSystem::new(&model, data)?;
    let mut theta = ThetaPoint::new(coords);
    for _ in 0..25 {
        let residual = sys.birch_residual(&model.evaluate(&theta)?)?;
        if residual <= 1e-10 {
            return Ok(theta);
        }
        let f = sys.residual(&theta)?;
        let jac = sys.jacobian(&theta)?;
        let Some(step) = jac.lu().solve(&(-&f)) else {
            return Err(Error::StartInvalid(residual));
        };
        let coords: Vec<f64> = theta
            .coords()
            .iter()
            .zip(step.iter())
            .map(|(&t, &dt)| t + dt)
            .collect();
        if coords.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::StartInvalid(residual));
        }
        theta = ThetaPoint::new(coords);
    }
    let residual = sys.birch_residual(&model.evaluate(&theta)?)?;
    if residual <= 1e-10 {
        Ok(theta)
    } else {
        Err(Error::StartInvalid(residual))
    }
}
