//! Experiment descriptions. One JSON document per run; unknown keys are
//! rejected so a typo in a sweep definition fails before any cell runs.

use gslab_core::bounds::BoundConstants;
use gslab_core::relu::recursive::Regime;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    BoundsSweep,
    RiskCurve,
    ReluVerify,
    LipschitzVerify,
    PackingVerify,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::BoundsSweep => "bounds_sweep",
            Kind::RiskCurve => "risk_curve",
            Kind::ReluVerify => "relu_verify",
            Kind::LipschitzVerify => "lipschitz_verify",
            Kind::PackingVerify => "packing_verify",
        }
    }
}

/// Parameter grid for one experiment. Which axes matter depends on `kind`;
/// `validate` enforces that the relevant ones are non-empty and in range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub k: Vec<usize>,
    /// measurement counts; real-valued so bound sweeps can probe fractional
    /// thresholds, risk curves require integers
    #[serde(default)]
    pub m: Vec<f64>,
    /// total noise energy per observation (per-coordinate variance alpha/m)
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub r: Vec<f64>,
    #[serde(default)]
    pub x_max: Vec<f64>,
    /// alternative to `x_max` for lipschitz cells: target slope bound,
    /// from which x_max = l*k*r/(2n) is derived
    #[serde(default)]
    pub l: Vec<f64>,
    /// signal amplitudes; empty means "derive from the noise level"
    #[serde(default)]
    pub xi: Vec<f64>,
    #[serde(default)]
    pub k0: Vec<usize>,
    #[serde(default)]
    pub n0: Vec<usize>,
    /// "wide" | "deep" | "mixed:<depth>"
    #[serde(default)]
    pub regimes: Vec<String>,
    #[serde(default)]
    pub sawtooth_teeth: Vec<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    pub seed: u64,
    /// worst-case risk over a sampled panel of this size; absent = averaged
    #[serde(default)]
    pub panel: Option<usize>,
    /// relaxed floor on n0/k0 for the recursive construction
    #[serde(default)]
    pub min_ratio: Option<usize>,
    #[serde(default)]
    pub c1: Option<f64>,
    #[serde(default)]
    pub c_a: Option<f64>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub field: String,
    pub problem: String,
}

/// All spec problems at once, so one round trip fixes them all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationError {
    pub issues: Vec<Issue>,
}

impl ValidationError {
    pub fn one(field: &str, problem: impl Into<String>) -> Self {
        ValidationError {
            issues: vec![Issue {
                field: field.to_string(),
                problem: problem.into(),
            }],
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid spec:")?;
        for issue in &self.issues {
            write!(f, "\n  field `{}`: {}", issue.field, issue.problem)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

pub fn parse_regime(s: &str) -> Result<Regime, String> {
    match s {
        "wide" => Ok(Regime::Wide),
        "deep" => Ok(Regime::Deep),
        _ => match s.strip_prefix("mixed:") {
            Some(d) => match d.parse::<usize>() {
                Ok(depth) if depth >= 1 => Ok(Regime::Mixed { depth }),
                _ => Err(format!("bad mixed depth in `{s}`")),
            },
            None => Err(format!(
                "unknown regime `{s}` (expected wide, deep, or mixed:<depth>)"
            )),
        },
    }
}

fn check_positive(issues: &mut Vec<Issue>, field: &str, values: &[f64]) {
    for v in values {
        if !(v.is_finite() && *v > 0.0) {
            issues.push(Issue {
                field: field.to_string(),
                problem: format!("{v} is not a positive finite number"),
            });
            return;
        }
    }
}

fn check_nonzero(issues: &mut Vec<Issue>, field: &str, values: &[usize]) {
    if values.contains(&0) {
        issues.push(Issue {
            field: field.to_string(),
            problem: "zero is out of range".to_string(),
        });
    }
}

fn require_nonempty<T>(issues: &mut Vec<Issue>, field: &str, values: &[T]) {
    if values.is_empty() {
        issues.push(Issue {
            field: field.to_string(),
            problem: "grid axis must be non-empty for this kind".to_string(),
        });
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, ValidationError> {
        let spec: ExperimentSpec = serde_json::from_str(text)
            .map_err(|e| ValidationError::one("(document)", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn constants(&self) -> BoundConstants {
        let mut c = BoundConstants::default();
        if let Some(c1) = self.c1 {
            c.c1 = c1;
        }
        if let Some(ca) = self.c_a {
            c.c_a = ca;
        }
        c
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut issues = Vec::new();
        check_nonzero(&mut issues, "n", &self.n);
        check_nonzero(&mut issues, "k", &self.k);
        check_nonzero(&mut issues, "k0", &self.k0);
        check_nonzero(&mut issues, "n0", &self.n0);
        check_positive(&mut issues, "m", &self.m);
        check_positive(&mut issues, "alpha", &self.alpha);
        check_positive(&mut issues, "r", &self.r);
        check_positive(&mut issues, "x_max", &self.x_max);
        check_positive(&mut issues, "l", &self.l);
        check_positive(&mut issues, "xi", &self.xi);
        if let Some(t) = self.trials {
            if t == 0 {
                issues.push(Issue {
                    field: "trials".into(),
                    problem: "need at least one trial".into(),
                });
            }
        }
        if let Some(p) = self.panel {
            if p == 0 {
                issues.push(Issue {
                    field: "panel".into(),
                    problem: "panel must be non-empty".into(),
                });
            }
        }
        for (field, v) in [("c1", self.c1), ("c_a", self.c_a)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    issues.push(Issue {
                        field: field.into(),
                        problem: format!("{v} is not a positive finite number"),
                    });
                }
            }
        }
        for s in &self.regimes {
            if let Err(problem) = parse_regime(s) {
                issues.push(Issue {
                    field: "regimes".into(),
                    problem,
                });
            }
        }
        match self.kind {
            Kind::BoundsSweep => {
                require_nonempty(&mut issues, "n", &self.n);
                require_nonempty(&mut issues, "k", &self.k);
                require_nonempty(&mut issues, "m", &self.m);
                require_nonempty(&mut issues, "alpha", &self.alpha);
            }
            Kind::RiskCurve => {
                require_nonempty(&mut issues, "n", &self.n);
                require_nonempty(&mut issues, "k", &self.k);
                require_nonempty(&mut issues, "m", &self.m);
                require_nonempty(&mut issues, "alpha", &self.alpha);
                for m in &self.m {
                    if m.fract() != 0.0 || *m > 1e7 {
                        issues.push(Issue {
                            field: "m".into(),
                            problem: format!("risk curves need small integer m, got {m}"),
                        });
                        break;
                    }
                }
            }
            Kind::ReluVerify => {
                let deep_cells = !self.n.is_empty() && !self.k.is_empty();
                let sawtooth_cells = !self.sawtooth_teeth.is_empty();
                let recursive_cells =
                    !self.k0.is_empty() && !self.n0.is_empty() && !self.regimes.is_empty();
                if !(deep_cells || sawtooth_cells || recursive_cells) {
                    issues.push(Issue {
                        field: "kind".into(),
                        problem: "relu_verify needs n+k, sawtooth_teeth, or k0+n0+regimes"
                            .into(),
                    });
                }
            }
            Kind::LipschitzVerify => {
                require_nonempty(&mut issues, "n", &self.n);
                require_nonempty(&mut issues, "k", &self.k);
                if !self.l.is_empty() && !self.x_max.is_empty() {
                    issues.push(Issue {
                        field: "l".into(),
                        problem: "specify x_max or l, not both".into(),
                    });
                }
            }
            Kind::PackingVerify => {
                require_nonempty(&mut issues, "n", &self.n);
                require_nonempty(&mut issues, "k", &self.k);
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { issues })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_risk_spec_parses() {
        let spec = ExperimentSpec::from_json(
            r#"{"kind":"risk_curve","n":[16],"k":[2],"m":[1,2],"alpha":[1.0],"seed":7}"#,
        )
        .unwrap();
        assert_eq!(spec.kind, Kind::RiskCurve);
        assert_eq!(spec.m, vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentSpec::from_json(
            r#"{"kind":"risk_curve","n":[16],"k":[2],"m":[1],"alpha":[1.0],"seed":7,"trails":9}"#,
        )
        .unwrap_err();
        assert!(err.issues[0].problem.contains("trails"));
    }

    #[test]
    fn empty_grid_is_a_validation_error() {
        let err = ExperimentSpec::from_json(
            r#"{"kind":"bounds_sweep","n":[],"k":[2],"m":[1],"alpha":[1.0],"seed":7}"#,
        )
        .unwrap_err();
        assert!(err.issues.iter().any(|i| i.field == "n"));
    }

    #[test]
    fn offending_fields_are_all_listed() {
        let err = ExperimentSpec::from_json(
            r#"{"kind":"risk_curve","n":[0],"k":[2],"m":[1.5],"alpha":[-1.0],"seed":7}"#,
        )
        .unwrap_err();
        let fields: Vec<&str> = err.issues.iter().map(|i| i.field.as_str()).collect();
        assert!(fields.contains(&"n"));
        assert!(fields.contains(&"m"));
        assert!(fields.contains(&"alpha"));
    }

    #[test]
    fn regime_strings_parse() {
        assert_eq!(parse_regime("wide").unwrap(), Regime::Wide);
        assert_eq!(parse_regime("deep").unwrap(), Regime::Deep);
        assert_eq!(
            parse_regime("mixed:3").unwrap(),
            Regime::Mixed { depth: 3 }
        );
        assert!(parse_regime("broad").is_err());
        assert!(parse_regime("mixed:0").is_err());
    }
}
