//! JSON plant-family configuration.
//!
//! Each factor is either `{"factored": {"zeros": [...], "poles": [...], "gain": g}}`
//! or `{"coefficients": {"num": [...], "den": [...]}}` (highest power first).
//! Numbers may be JSON numbers or strings holding a decimal or a rational
//! such as `"3169/165"`. A complex root `{"re": a, "im": b}` with `b != 0`
//! brings its conjugate along.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::interp::NormalizationNode;
use crate::pipeline::{PipelineOptions, SigmaSpec};
use crate::poly::{RatFun, RealPoly};
use crate::problem::PlantPair;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64> {
        match self {
            Number::Float(x) => Ok(*x),
            Number::Text(t) => parse_number(t),
        }
    }
}

/// Decimal or `p/q` rational; the quotient is formed only here.
pub fn parse_number(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || Error::Input(format!("cannot parse number {text:?}"));
    let v = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(Error::Input(format!("zero denominator in {text:?}")));
            }
            p / q
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// Comma-separated list of numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_number)
        .collect()
}

/// `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => parse_list(text),
        3 => {
            let (a, h, b) = (
                parse_number(parts[0])?,
                parse_number(parts[1])?,
                parse_number(parts[2])?,
            );
            if !(h > 0.0) || b < a {
                return Err(Error::Input(format!("bad grid {text:?}")));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| a + i as f64 * h).collect())
        }
        _ => Err(Error::Input(format!("bad grid {text:?}"))),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RootSpec {
    Real(Number),
    Complex { re: Number, im: Number },
}

fn expand_roots(roots: &[RootSpec]) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for r in roots {
        match r {
            RootSpec::Real(x) => out.push(Complex64::new(x.value()?, 0.0)),
            RootSpec::Complex { re, im } => {
                let z = Complex64::new(re.value()?, im.value()?);
                out.push(z);
                if z.im != 0.0 {
                    out.push(z.conj());
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factored {
    #[serde(default)]
    pub zeros: Vec<RootSpec>,
    #[serde(default)]
    pub poles: Vec<RootSpec>,
    #[serde(default = "unit_gain")]
    pub gain: Number,
}

fn unit_gain() -> Number {
    Number::Float(1.0)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub num: Vec<Number>,
    #[serde(default)]
    pub den: Option<Vec<Number>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RatSpec {
    Factored(Factored),
    Coefficients(Coefficients),
}

fn values(v: &[Number]) -> Result<Vec<f64>> {
    v.iter().map(Number::value).collect()
}

impl RatSpec {
    pub fn to_ratfun(&self) -> Result<RatFun> {
        let r = match self {
            RatSpec::Factored(f) => {
                RatFun::from_zpk(&expand_roots(&f.zeros)?, &expand_roots(&f.poles)?, f.gain.value()?)
            }
            RatSpec::Coefficients(c) => {
                let den = match &c.den {
                    Some(d) => RealPoly::new(values(d)?),
                    None => RealPoly::one(),
                };
                RatFun::new(RealPoly::new(values(&c.num)?), den)
            }
        };
        r.map_err(|e| Error::Input(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantsSpec {
    pub x0: RatSpec,
    pub y0: RatSpec,
    pub x1: RatSpec,
    pub y1: RatSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SigmaConfig {
    Coefficients(Vec<Number>),
    Zeros(Vec<RootSpec>),
}

impl SigmaConfig {
    pub fn to_spec(&self) -> Result<SigmaSpec> {
        Ok(match self {
            SigmaConfig::Coefficients(c) => SigmaSpec::Coefficients(values(c)?),
            SigmaConfig::Zeros(z) => SigmaSpec::Zeros(expand_roots(z)?),
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub coprime: Option<f64>,
    pub boundary: Option<f64>,
    pub zero: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    pub plants: PlantsSpec,
    #[serde(default)]
    pub sigma: Option<SigmaConfig>,
    #[serde(default)]
    pub lambda_grid: Option<Vec<Number>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Index of the real node moved to the origin.
    #[serde(default)]
    pub normalization_node: Option<usize>,
}

impl PlantConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        PlantConfig::from_json(&text)
    }

    pub fn plant_pair(&self) -> Result<PlantPair> {
        let p = &self.plants;
        PlantPair::new(
            p.x0.to_ratfun()?,
            p.y0.to_ratfun()?,
            p.x1.to_ratfun()?,
            p.y1.to_ratfun()?,
        )
    }

    pub fn sigma_spec(&self) -> Result<SigmaSpec> {
        self.sigma
            .as_ref()
            .map_or(Ok(SigmaSpec::Default), SigmaConfig::to_spec)
    }

    pub fn options(&self) -> Result<PipelineOptions> {
        let mut opts = PipelineOptions::default();
        if let Some(g) = &self.lambda_grid {
            opts.lambda_grid = values(g)?;
        }
        let t = &self.tolerances;
        if let Some(x) = t.coprime {
            opts.problem.coprime_tol = x;
        }
        if let Some(x) = t.boundary {
            opts.problem.boundary_tol = x;
        }
        if let Some(x) = t.zero {
            opts.problem.zero_tol = x;
        }
        if let Some(i) = self.normalization_node {
            opts.normalization = NormalizationNode::Index(i);
        }
        Ok(opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_rationals() {
        assert_eq!(parse_number("3169/165").unwrap(), 3169.0 / 165.0);
        assert_eq!(parse_number(" -0.5 ").unwrap(), -0.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
        assert_eq!(parse_grid("0:0.25:1").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.1:1").unwrap().len(), 11);
        assert_eq!(parse_grid("0, 1/2,1").unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn both_encodings() {
        let text = r#"{
            "plants": {
                "x0": {"factored": {"zeros": [15, "6"], "poles": [-0.5, "-6/5"]}},
                "y0": {"coefficients": {"num": [1, -21, 54], "den": [1, 1.8, 0.45]}},
                "x1": {"factored": {"zeros": [-9, 2], "poles": [{"re": -0.9, "im": 0.5}], "gain": 1}},
                "y1": {"factored": {"zeros": [11, -1], "poles": [-0.9, -0.4]}}
            },
            "sigma": {"zeros": [0.9]},
            "lambda_grid": [0, "1/2", 1]
        }"#;
        let cfg = PlantConfig::from_json(text).unwrap();
        let p = cfg.plant_pair().unwrap();
        assert_eq!(p.x1.den().degree(), 2);
        assert_eq!(p.y0.num().coeffs(), &[1.0, -21.0, 54.0]);
        assert_eq!(cfg.options().unwrap().lambda_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(
            cfg.sigma_spec().unwrap(),
            SigmaSpec::Zeros(vec![Complex64::new(0.9, 0.0)])
        );
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"plants": {}, "extra": 1}"#;
        assert!(matches!(PlantConfig::from_json(text), Err(Error::Input(_))));
    }
}
