//! Run configuration: a single JSON document.

use std::path::{Path, PathBuf};

use bivar_core::approx::RemainderMode;
use bivar_core::{parse, EvalPoint, MidpointVariant, Rectangle, SignVariant};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest supported `n`: the Lebesgue remainder and the `L∞`/`L_p`
/// bounds need `D^(n+1,n+1) f`, whose total order `2n + 2` must stay
/// within the ceiling of 12.
pub const MAX_N: u32 = 5;

/// One entry of `points`: a pair, `"midpoint"` or `"grid:K"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Pair([f64; 2]),
    Keyword(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VariantConfig {
    #[serde(default)]
    pub sign_variant: SignVariant,
    #[serde(default)]
    pub midpoint_variant: MidpointVariant,
    #[serde(default)]
    pub remainder_mode: RemainderMode,
}

fn default_rectangle() -> [f64; 4] {
    [0.0, 1.0, 0.0, 1.0]
}

fn default_points() -> Vec<PointSpec> {
    vec![PointSpec::Keyword("midpoint".into())]
}

fn default_p() -> f64 {
    2.0
}

fn default_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub function: String,
    #[serde(default = "default_rectangle")]
    pub rectangle: [f64; 4],
    #[serde(alias = "n")]
    pub n_values: Vec<u32>,
    #[serde(default = "default_points")]
    pub points: Vec<PointSpec>,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub variants: VariantConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(CliError::Json)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        RunConfig::from_json(&text)
    }

    pub fn rect(&self) -> Result<Rectangle, CliError> {
        let [a, b, c, d] = self.rectangle;
        Ok(Rectangle::new(a, b, c, d)?)
    }

    /// Checks everything that does not need numerics and expands the
    /// point list.
    pub fn validate(&self) -> Result<Plan, CliError> {
        parse(&self.function).map_err(|error| CliError::Function {
            source_text: self.function.clone(),
            error,
        })?;
        let rect = self.rect()?;
        if self.n_values.is_empty() {
            return Err(CliError::Invalid("n_values must not be empty".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n > MAX_N) {
            return Err(CliError::Invalid(format!(
                "n = {n} exceeds the maximum of {MAX_N} (D^(n+1,n+1) f must have total order at most 12)"
            )));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(CliError::Invalid(format!(
                "p must be a finite number greater than 1 (got {})",
                self.p
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Invalid(format!("tol must be positive (got {})", self.tol)));
        }
        let mut points = Vec::new();
        for spec in &self.points {
            expand(spec, &rect, &mut points)?;
        }
        if points.is_empty() {
            return Err(CliError::Invalid("points must not be empty".into()));
        }
        let mut n_values = self.n_values.clone();
        n_values.sort_unstable();
        n_values.dedup();
        Ok(Plan { rect, points, n_values })
    }
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub rect: Rectangle,
    /// Points in input order; lattices are expanded x-major.
    pub points: Vec<EvalPoint>,
    /// Sorted, without duplicates.
    pub n_values: Vec<u32>,
}

fn expand(spec: &PointSpec, rect: &Rectangle, out: &mut Vec<EvalPoint>) -> Result<(), CliError> {
    match spec {
        PointSpec::Pair([x, y]) => {
            let p = EvalPoint::new(*x, *y);
            rect.ensure_contains(p)?;
            out.push(p);
        }
        PointSpec::Keyword(word) if word == "midpoint" => out.push(rect.midpoint()),
        PointSpec::Keyword(word) => {
            let k = word
                .strip_prefix("grid:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| {
                    CliError::Invalid(format!(
                        "unknown point spec {word:?}; expected [x, y], \"midpoint\" or \"grid:K\""
                    ))
                })?;
            let node = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i + 1) as f64 / (k + 1) as f64;
            for i in 0..k {
                for j in 0..k {
                    out.push(EvalPoint::new(node(rect.a(), rect.b(), i), node(rect.c(), rect.d(), j)));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_aliases() {
        let c = RunConfig::from_json(r#"{"function": "t*s", "n": [2, 0, 2]}"#).unwrap();
        assert_eq!(c.rectangle, [0.0, 1.0, 0.0, 1.0]);
        assert_eq!(c.p, 2.0);
        assert_eq!(c.tol, 1e-6);
        assert_eq!(c.variants.sign_variant, SignVariant::ProofConsistent);
        let plan = c.validate().unwrap();
        assert_eq!(plan.n_values, vec![0, 2]);
        assert_eq!(plan.points, vec![EvalPoint::new(0.5, 0.5)]);
    }

    #[test]
    fn variant_names() {
        let c = RunConfig::from_json(
            r#"{"function": "t", "n_values": [1],
                "variants": {"sign_variant": "theorem-literal", "midpoint_variant": "section3"}}"#,
        )
        .unwrap();
        assert_eq!(c.variants.sign_variant, SignVariant::TheoremLiteral);
        assert_eq!(c.variants.midpoint_variant, MidpointVariant::Section3);
    }

    #[test]
    fn grid_points_are_interior_and_x_major() {
        let c =
            RunConfig::from_json(r#"{"function": "t", "n_values": [0], "points": ["grid:3", [0.1, 0.2]]}"#).unwrap();
        let plan = c.validate().unwrap();
        assert_eq!(plan.points.len(), 10);
        assert_eq!(plan.points[0], EvalPoint::new(0.25, 0.25));
        assert_eq!(plan.points[1], EvalPoint::new(0.25, 0.5));
        assert_eq!(plan.points[3], EvalPoint::new(0.5, 0.25));
        assert_eq!(plan.points[9], EvalPoint::new(0.1, 0.2));
    }

    #[test]
    fn rejections() {
        let bad = [
            r#"{"function": "t**", "n_values": [0]}"#,
            r#"{"function": "t", "n_values": [6]}"#,
            r#"{"function": "t", "n_values": []}"#,
            r#"{"function": "t", "n_values": [0], "rectangle": [1, 0, 0, 1]}"#,
            r#"{"function": "t", "n_values": [0], "points": [[2, 0.5]]}"#,
            r#"{"function": "t", "n_values": [0], "points": ["grid:0"]}"#,
            r#"{"function": "t", "n_values": [0], "p": 1}"#,
            r#"{"function": "t", "n_values": [0], "tol": 0}"#,
        ];
        for src in bad {
            assert!(RunConfig::from_json(src).unwrap().validate().is_err(), "{src}");
        }
        assert!(RunConfig::from_json(r#"{"function": "t", "n_values": [0], "extra": 1}"#).is_err());
    }

    #[test]
    fn parse_errors_carry_position() {
        let c = RunConfig::from_json(r#"{"function": "t**", "n_values": [0]}"#).unwrap();
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("at byte 2"), "{msg}");
    }
}
