//! Registered stability experiments: many sampled paths, aggregated curves
//! and a pass/fail verdict against the registered claim.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::model::{derive_seed, simulate, Distribution, HmmModel};
use crate::report::fmt_f64;
use crate::stability::stability_curve;

const REGISTRY: &str = include_str!("../scenarios.toml");

/// A prior given as explicit weights or by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Weights(Vec<f64>),
    /// `"stationary"`, `"uniform"` or `"delta:K"`.
    Named(String),
}

impl PriorSpec {
    pub fn resolve(&self, model: &HmmModel) -> Result<Distribution> {
        let law = match self {
            PriorSpec::Weights(w) => Distribution::new(w.clone())?,
            PriorSpec::Named(name) => match name.as_str() {
                "stationary" => model.stationary.clone(),
                "uniform" => Distribution::uniform(model.dim()),
                other => {
                    let state = other
                        .strip_prefix("delta:")
                        .and_then(|k| k.parse::<usize>().ok())
                        .ok_or_else(|| Error::Config(format!("unknown prior `{other}`")))?;
                    if state >= model.dim() {
                        return Err(Error::IndexOutOfRange {
                            index: state,
                            limit: model.dim(),
                        });
                    }
                    Distribution::point(model.dim(), state)
                }
            },
        };
        model.check_prior(&law)?;
        Ok(law)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tv,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    /// Fixture label.
    pub model: String,
    pub mu: PriorSpec,
    pub nu: PriorSpec,
    /// Law of `X_0` for the simulated observation paths.
    pub path_start: PriorSpec,
    /// Last time index; paths have `horizon + 1` observations.
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    pub claim: Claim,
    pub metric: Metric,
    pub threshold: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    scenario: Vec<ScenarioSpec>,
}

pub fn parse_registry(text: &str) -> Result<Vec<ScenarioSpec>> {
    let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(file.scenario)
}

/// The built-in scenarios.
pub fn registry() -> Vec<ScenarioSpec> {
    parse_registry(REGISTRY).expect("built-in registry parses")
}

pub fn find_scenario(name: &str) -> Result<ScenarioSpec> {
    registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

/// Aggregates over trials at one time index.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub n: usize,
    pub tv_mean: f64,
    pub tv_median: f64,
    pub tv_max: f64,
    pub entropy_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub metric: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    /// Rows for `n = 1..=horizon`.
    pub rows: Vec<ScenarioRow>,
    /// Trials whose curve ended early on a degenerate filter.
    pub truncated_trials: usize,
    pub verdict: Verdict,
}

impl ScenarioOutcome {
    /// `n,tv_mean,tv_median,tv_max,entropy_mean` rows followed by
    /// `VERDICT,PASS|FAIL,<metric>,<threshold>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,tv_mean,tv_median,tv_max,entropy_mean\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                fmt_f64(r.tv_mean),
                fmt_f64(r.tv_median),
                fmt_f64(r.tv_max),
                fmt_f64(r.entropy_mean)
            ));
        }
        out.push_str(&format!(
            "VERDICT,{},{},{}\n",
            if self.verdict.pass { "PASS" } else { "FAIL" },
            fmt_f64(self.verdict.metric),
            fmt_f64(self.verdict.threshold)
        ));
        out
    }
}

/// Runs a scenario on its registered fixture.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioOutcome> {
    let model = fixtures::by_label(&spec.model)?;
    run_scenario_on(spec, &model)
}

/// Runs a scenario on an explicit model. Trial `t` samples its path with
/// seed `derive_seed(spec.seed, t)`, so the outcome does not depend on
/// scheduling.
pub fn run_scenario_on(spec: &ScenarioSpec, model: &HmmModel) -> Result<ScenarioOutcome> {
    if spec.horizon == 0 || spec.trials == 0 {
        return Err(Error::Config("horizon and trials must be positive".into()));
    }
    let mu = spec.mu.resolve(model)?;
    let nu = spec.nu.resolve(model)?;
    let start = spec.path_start.resolve(model)?;
    let curves = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let path = simulate(model, &start, spec.horizon + 1, derive_seed(spec.seed, t as u64))?;
            stability_curve(model, &mu, &nu, &path.observations)
        })
        .collect::<Result<Vec<_>>>()?;
    let truncated_trials = curves.iter().filter(|c| c.truncated_at.is_some()).count();

    let rows: Vec<ScenarioRow> = (1..=spec.horizon)
        .map(|n| {
            let mut tv: Vec<f64> = curves.iter().filter_map(|c| c.tv.get(n).copied()).collect();
            let mut entropy: Vec<f64> = curves.iter().filter_map(|c| c.entropy.get(n).copied()).collect();
            tv.sort_by(f64::total_cmp);
            entropy.sort_by(f64::total_cmp);
            ScenarioRow {
                n,
                tv_mean: mean(&tv),
                tv_median: median(&tv),
                tv_max: tv.last().copied().unwrap_or(f64::NAN),
                entropy_mean: mean(&entropy),
            }
        })
        .collect();

    let last = rows.last().expect("horizon is positive");
    let metric = match spec.metric {
        Metric::Tv => last.tv_mean,
        Metric::Entropy => last.entropy_mean,
    };
    let pass = match spec.claim {
        Claim::Stable => metric < spec.threshold,
        Claim::Unstable => metric >= spec.threshold,
    };
    Ok(ScenarioOutcome {
        rows,
        truncated_trials,
        verdict: Verdict {
            pass,
            metric,
            threshold: spec.threshold,
        },
    })
}

fn mean(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    sorted.iter().sum::<f64>() / sorted.len() as f64
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    match k {
        0 => f64::NAN,
        _ if k % 2 == 1 => sorted[k / 2],
        _ => 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_parses_and_resolves() {
        let all = registry();
        assert_eq!(all.len(), 4);
        for spec in &all {
            let model = fixtures::by_label(&spec.model).unwrap();
            spec.mu.resolve(&model).unwrap();
            spec.nu.resolve(&model).unwrap();
            spec.path_start.resolve(&model).unwrap();
        }
        assert_eq!(
            find_scenario("nope").unwrap_err(),
            Error::UnknownScenario("nope".into())
        );
    }

    #[test]
    fn prior_names() {
        let m2 = fixtures::m2();
        assert_eq!(
            PriorSpec::Named("delta:3".into()).resolve(&m2).unwrap(),
            Distribution::point(4, 3)
        );
        assert!(PriorSpec::Named("delta:4".into()).resolve(&m2).is_err());
        assert!(PriorSpec::Named("other".into()).resolve(&m2).is_err());
        assert!(PriorSpec::Weights(vec![0.5, 0.5]).resolve(&m2).is_err());
    }

    #[test]
    fn registered_verdicts() {
        for name in ["M1-stable", "M2-unstable", "M3-detectable", "M1-entropy"] {
            let outcome = run_scenario(&find_scenario(name).unwrap()).unwrap();
            assert!(outcome.verdict.pass, "{name}: {:?}", outcome.verdict);
            assert_eq!(outcome.truncated_trials, 0);
        }
    }

    #[test]
    fn shape_and_determinism() {
        let mut spec = find_scenario("M1-stable").unwrap();
        spec.trials = 1;
        spec.horizon = 10;
        let a = run_scenario(&spec).unwrap();
        assert_eq!(a.rows.len(), 10);
        let csv = a.to_csv();
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.lines().last().unwrap().starts_with("VERDICT,"));
        assert_eq!(csv, run_scenario(&spec).unwrap().to_csv());
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&[1.0, 2.0, 4.0, 8.0]), 3.0);
        assert_eq!(median(&[1.0, 2.0, 4.0]), 2.0);
    }
}
