//! Model and data files.
//!
//! A model file is a JSON object `{ "A": [[int]], "c": [...], "name"?: str }`
//! where `A` excludes the homogenizing row and each scaling entry is a JSON
//! number or a rational string like `"3/4"`. Integer and string entries are
//! kept exact, so files written with exact scalings round-trip into models
//! that support the discriminant tests. Data files are a JSON array of
//! counts or a single-column CSV.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::PathTrace;
use crate::model::{DataVector, MleResult, ToricModel};

/// One scaling entry: exact integer, exact rational string, or float.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalingEntry {
    Int(i64),
    Float(f64),
    Rational(String),
}

impl ScalingEntry {
    pub fn to_exact(&self) -> Option<BigRational> {
        match self {
            ScalingEntry::Int(v) => Some(BigRational::from_integer(BigInt::from(*v))),
            ScalingEntry::Rational(s) => parse_rational(s).ok(),
            ScalingEntry::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalingEntry::Int(v) => *v as f64,
            ScalingEntry::Float(v) => *v,
            ScalingEntry::Rational(s) => parse_rational(s)
                .map(|r| r.to_f64().unwrap_or(f64::NAN))
                .unwrap_or(f64::NAN),
        }
    }
}

/// Parses `"p/q"`, `"p"`, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let p = BigInt::from_str(num.trim()).map_err(|_| Error::Parse(s.to_string()))?;
        let q = BigInt::from_str(den.trim()).map_err(|_| Error::Parse(s.to_string()))?;
        if q == BigInt::from(0) {
            return Err(Error::Parse(format!("zero denominator in {s}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(p) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(p));
    }
    Err(Error::Parse(s.to_string()))
}

/// On-disk model schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub c: Vec<ScalingEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl ModelFile {
    pub fn to_model(&self) -> Result<ToricModel> {
        let exact: Option<Vec<BigRational>> = self.c.iter().map(ScalingEntry::to_exact).collect();
        let model = match exact {
            Some(c) => ToricModel::with_exact_scaling(self.a.clone(), c)?,
            None => {
                let c: Vec<f64> = self.c.iter().map(ScalingEntry::to_f64).collect();
                ToricModel::new(self.a.clone(), c)?
            }
        };
        Ok(match &self.name {
            Some(n) => model.named(n.clone()),
            None => model,
        })
    }

    pub fn from_model(model: &ToricModel) -> Self {
        let a = model.a_bar()[..model.d() - 1].to_vec();
        let c = match model.exact_scaling() {
            Some(exact) => exact.iter().map(rational_entry).collect(),
            None => model
                .scaling()
                .iter()
                .map(|&v| ScalingEntry::Float(v))
                .collect(),
        };
        Self {
            a,
            c,
            name: model.name().map(str::to_string),
        }
    }
}

fn rational_entry(v: &BigRational) -> ScalingEntry {
    if v.denom().abs() == BigInt::from(1) {
        if let Some(i) = v.numer().to_i64() {
            return ScalingEntry::Int(i);
        }
    }
    ScalingEntry::Rational(format!("{}/{}", v.numer(), v.denom()))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ToricModel> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text)?;
    file.to_model()
}

pub fn write_model(model: &ToricModel, path: impl AsRef<Path>) -> Result<()> {
    let file = ModelFile::from_model(model);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Reads counts from a JSON array file or a single-column CSV.
pub fn read_data(path: impl AsRef<Path>) -> Result<DataVector> {
    let text = std::fs::read_to_string(path)?;
    parse_data(&text)
}

pub fn parse_data(text: &str) -> Result<DataVector> {
    let trimmed = text.trim_start();
    let counts: Vec<u64> = if trimmed.starts_with('[') {
        serde_json::from_str(text)?
    } else {
        let mut counts = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            counts.push(
                line.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("count `{line}`")))?,
            );
        }
        counts
    };
    DataVector::new(counts)
}

/// JSON shape of a solver result, shared by the CLI subcommands.
#[derive(Debug, Serialize)]
pub struct MleOutput {
    pub solver: String,
    pub p_hat: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hat: Option<Vec<f64>>,
    pub birch_residual: f64,
    pub iterations_or_steps: usize,
    pub log_likelihood: f64,
}

impl MleOutput {
    pub fn new(solver: &str, result: &MleResult) -> Self {
        Self {
            solver: solver.to_string(),
            p_hat: result.p_hat.values().to_vec(),
            theta_hat: result.theta_hat.as_ref().map(|t| t.coords().to_vec()),
            birch_residual: result.birch_residual,
            iterations_or_steps: result.iterations_or_steps,
            log_likelihood: result.log_likelihood,
        }
    }
}

/// Writes a tracked path as CSV with columns `t,theta_1..theta_d,residual`.
pub fn write_trace(trace: &PathTrace, d: usize, mut out: impl Write) -> Result<()> {
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=d).map(|i| format!("theta_{i}")))
        .chain(std::iter::once("residual".to_string()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for sample in &trace.samples {
        let mut fields = Vec::with_capacity(d + 2);
        fields.push(format!("{:.17e}", sample.t));
        for v in &sample.theta {
            fields.push(format!("{v:.17e}"));
        }
        fields.push(format!("{:.17e}", sample.residual));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn model_file_round_trips_exact_scalings() {
        let text = r#"{ "A": [[0, 1, 2]], "c": [1, "1/2", 3], "name": "curve" }"#;
        let file: ModelFile = serde_json::from_str(text).unwrap();
        let model = file.to_model().unwrap();
        assert_eq!(model.name(), Some("curve"));
        let exact = model.exact_scaling().unwrap();
        assert_eq!(exact[1], BigRational::new(1.into(), 2.into()));
        let back = ModelFile::from_model(&model);
        let json = serde_json::to_string(&back).unwrap();
        let reread: ModelFile = serde_json::from_str(&json).unwrap();
        let model2 = reread.to_model().unwrap();
        assert_eq!(model2.exact_scaling().unwrap(), exact);
        assert_eq!(model.a_bar(), model2.a_bar());
    }

    #[test]
    fn float_scalings_lose_exactness_but_still_load() {
        let text = r#"{ "A": [[0, 1]], "c": [1.5, 2.5] }"#;
        let file: ModelFile = serde_json::from_str(text).unwrap();
        let model = file.to_model().unwrap();
        assert!(model.exact_scaling().is_none());
        assert_eq!(model.scaling(), &[1.5, 2.5]);
    }

    #[test]
    fn data_accepts_json_and_csv() {
        let from_json = parse_data("[1, 2, 3]").unwrap();
        let from_csv = parse_data("1\n2\n3\n").unwrap();
        assert_eq!(from_json, from_csv);
        assert_eq!(from_json.total(), 6);
        assert!(parse_data("1\nx\n").is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(
            parse_rational("3/4").unwrap(),
            BigRational::new(3.into(), 4.into())
        );
        assert_eq!(
            parse_rational("5").unwrap(),
            BigRational::from_integer(5.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(BigRational::one() == parse_rational(" 1 ").unwrap());
    }

    #[test]
    fn trace_csv_has_the_documented_header() {
        let trace = PathTrace {
            samples: vec![crate::homotopy::PathSample {
                t: 1.0,
                theta: vec![0.5, 2.0],
                residual: 1e-13,
            }],
            accepted_steps: 1,
            rejected_steps: 0,
        };
        let mut buf = Vec::new();
        write_trace(&trace, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,theta_1,theta_2,residual");
        assert_eq!(lines.next().unwrap().split(',').count(), 4);
    }
}
