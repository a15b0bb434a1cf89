//! Experiment configuration: one self-describing JSON document per experiment.
//!
//! Utility matrices are row-major `[action][state]`. Instances are given inline or
//! by generator name:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "instance": { "generator": { "name": "example_basic" } },
//!   "learners": [ { "name": "alg5" }, { "name": "alg3", "params": { "epsilon_exponent": 4 } } ],
//!   "T": 10000,
//!   "seeds": { "count": 10, "base": 0 }
//! }
//! ```

use std::collections::BTreeSet;

use persuade_core::learners::LearnerKind;
use persuade_core::sim::{
    gen_example_basic, gen_lower_bound_binary, gen_lower_bound_general, gen_random, RandomConstraints, RandomShape,
};
use persuade_core::{Belief, Instance, PublicModel, ReceiverNormalization, TieRule, UtilityMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub instance: InstanceSource,
    pub learners: Vec<LearnerSpec>,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub seeds: Seeds,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default = "default_tie_rule")]
    pub tie_rule: String,
    #[serde(default)]
    pub flags: Flags,
}

fn default_tie_rule() -> String {
    TieRule::default().name().to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    Inline(InlineInstance),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineInstance {
    /// Sender utility, `[action][state]`.
    pub u: Vec<Vec<f64>>,
    /// Receiver utility, `[action][state]`.
    pub v: Vec<Vec<f64>>,
    pub prior: Vec<f64>,
    pub p0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

/// Affine map applied to raw receiver utilities to bring them into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Normalization {
    pub scale: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    ExampleBasic,
    Random {
        states: usize,
        actions: usize,
        seed: u64,
        #[serde(default)]
        binary_mode: bool,
        #[serde(default)]
        min_prior: f64,
        #[serde(default)]
        min_g: f64,
        #[serde(default)]
        min_d: f64,
    },
    LowerBoundGeneral {
        kappa: f64,
        prior_index: usize,
    },
    LowerBoundBinary {
        horizon: u64,
        v_star: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub name: String,
    /// Column value in the CSVs; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "LearnerParams::is_empty")]
    pub params: LearnerParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_exponent: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cadence: Option<u64>,
}

impl LearnerParams {
    fn is_empty(&self) -> bool {
        *self == LearnerParams::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Count {
        count: u64,
        #[serde(default)]
        base: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_results")]
    pub results: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_results() -> String {
    "results.csv".into()
}

fn default_summary() -> String {
    "summary.csv".into()
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { results: default_results(), summary: default_summary() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Reveal realized states to learners after each period.
    #[serde(default)]
    pub state_observing: bool,
    /// After each alg3 episode, verify the final scheme over the whole ball with an LP.
    #[serde(default)]
    pub exact_ball_check: bool,
    /// Overrides `epsilon_exponent` for every alg3 entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_exponent: Option<i32>,
}

/// Standalone instance document for `optimal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub instance: InstanceSource,
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line of the first occurrence of `needle`, for diagnostics.
fn find_line(text: &str, needle: &str) -> Option<usize> {
    text.find(needle).map(|i| line_of(text, i))
}

fn located(text: &str, field: &str, needle: Option<&str>, message: impl Into<String>) -> CliError {
    let key = field.rsplit('.').next().unwrap_or(field);
    let key = key.split('[').next().unwrap_or(key);
    let line = needle.and_then(|n| find_line(text, n)).or_else(|| find_line(text, &format!("\"{key}\"")));
    let location = match line {
        Some(l) => format!("line {l}, field `{field}`"),
        None => format!("field `{field}`"),
    };
    CliError::config(location, message)
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let location = if path.is_empty() || path == "." {
            format!("line {}, column {}", inner.line(), inner.column())
        } else {
            format!("line {}, column {}, field `{path}`", inner.line(), inner.column())
        };
        CliError::config(location, inner.to_string())
    })
}

impl ExperimentConfig {
    /// Parses and validates a config document.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = parse_json(text)?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn validate(&self, text: &str) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(located(
                text,
                "schema_version",
                None,
                format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.horizon < 1 {
            return Err(located(text, "T", None, "T must be at least 1"));
        }
        match &self.seeds {
            Seeds::List(list) if list.is_empty() => return Err(located(text, "seeds", None, "seed list is empty")),
            Seeds::Count { count: 0, .. } => return Err(located(text, "seeds", None, "seed count must be positive")),
            Seeds::List(list) => {
                let mut seen = BTreeSet::new();
                if let Some(dup) = list.iter().find(|&&s| !seen.insert(s)) {
                    return Err(located(text, "seeds", None, format!("seed {dup} listed twice")));
                }
            }
            _ => {}
        }
        if TieRule::from_name(&self.tie_rule).is_none() {
            let names: Vec<&str> = TieRule::ALL.iter().map(|t| t.name()).collect();
            return Err(located(
                text,
                "tie_rule",
                Some(&format!("\"{}\"", self.tie_rule)),
                format!("unknown tie rule `{}` (expected one of {})", self.tie_rule, names.join(", ")),
            ));
        }
        if self.learners.is_empty() {
            return Err(located(text, "learners", None, "no learners listed"));
        }
        let mut labels = BTreeSet::new();
        for (i, spec) in self.learners.iter().enumerate() {
            let field = format!("learners[{i}].name");
            let needle = format!("\"{}\"", spec.name);
            let Some(kind) = LearnerKind::from_name(&spec.name) else {
                return Err(located(
                    text,
                    &field,
                    Some(&needle),
                    format!("unknown learner `{}` (expected one of {})", spec.name, LearnerKind::NAMES.join(", ")),
                ));
            };
            if kind.observes_state() && !self.flags.state_observing {
                return Err(located(
                    text,
                    &field,
                    Some(&needle),
                    format!("`{}` observes states; set flags.state_observing to true", spec.name),
                ));
            }
            let p = &spec.params;
            if p.epsilon_exponent.is_some() && !matches!(kind, LearnerKind::LearnAndRobustify { .. }) {
                return Err(located(text, &format!("learners[{i}].params.epsilon_exponent"), None, "only alg3 takes epsilon_exponent"));
            }
            if let Some(e) = p.epsilon_exponent.or(self.flags.epsilon_exponent) {
                if e < 1 {
                    return Err(located(text, &format!("learners[{i}].params.epsilon_exponent"), None, "epsilon_exponent must be at least 1"));
                }
            }
            match p.cadence {
                Some(_) if !matches!(kind, LearnerKind::EmpiricalBaseline { .. }) => {
                    return Err(located(text, &format!("learners[{i}].params.cadence"), None, "only baseline_empirical takes cadence"));
                }
                Some(0) => return Err(located(text, &format!("learners[{i}].params.cadence"), None, "cadence must be positive")),
                _ => {}
            }
            let label = spec.label.clone().unwrap_or_else(|| spec.name.clone());
            if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
                return Err(located(text, &format!("learners[{i}].label"), None, "label must be nonempty and CSV-safe"));
            }
            if !labels.insert(label.clone()) {
                return Err(located(
                    text,
                    &format!("learners[{i}]"),
                    Some(&needle),
                    format!("duplicate learner label `{label}`; set distinct `label`s"),
                ));
            }
        }
        for (field, name) in [("outputs.results", &self.outputs.results), ("outputs.summary", &self.outputs.summary)] {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(located(text, field, None, "output names must be plain file names"));
            }
        }
        if self.outputs.results == self.outputs.summary {
            return Err(located(text, "outputs", None, "results and summary must be different files"));
        }
        Ok(())
    }

    pub fn tie(&self) -> TieRule {
        TieRule::from_name(&self.tie_rule).unwrap_or_default()
    }

    /// `(label, kind)` per learner entry, with parameters applied.
    pub fn learner_kinds(&self) -> Vec<(String, LearnerKind)> {
        self.learners
            .iter()
            .map(|spec| {
                let mut kind = LearnerKind::from_name(&spec.name).expect("validated");
                match &mut kind {
                    LearnerKind::LearnAndRobustify { epsilon_exponent } => {
                        if let Some(e) = spec.params.epsilon_exponent.or(self.flags.epsilon_exponent) {
                            *epsilon_exponent = e;
                        }
                    }
                    LearnerKind::EmpiricalBaseline { cadence } => {
                        if let Some(c) = spec.params.cadence {
                            *cadence = c;
                        }
                    }
                    _ => {}
                }
                (spec.label.clone().unwrap_or_else(|| spec.name.clone()), kind)
            })
            .collect()
    }

    /// Seeds in run order. `base_override` (from `PERSUADE_SEED`) replaces the base of a
    /// counted range; an explicit list becomes that many consecutive seeds from it.
    pub fn seed_list(&self, base_override: Option<u64>) -> Vec<u64> {
        let (count, base) = match (&self.seeds, base_override) {
            (Seeds::List(list), None) => return list.clone(),
            (Seeds::List(list), Some(b)) => (list.len() as u64, b),
            (Seeds::Count { count, base }, o) => (*count, o.unwrap_or(*base)),
        };
        (0..count).map(|i| base.wrapping_add(i)).collect()
    }
}

impl InstanceFile {
    /// Accepts a standalone instance document or a full experiment config.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: InstanceFile = parse_json(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(located(
                text,
                "schema_version",
                None,
                format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", file.schema_version),
            ));
        }
        Ok(file)
    }
}

impl InstanceSource {
    /// Builds the instance. Malformed data is a config error; a well-formed instance
    /// that breaks a model assumption surfaces as such.
    pub fn build(&self) -> Result<Instance, CliError> {
        let malformed = |e: persuade_core::Error| match e.assumption() {
            Some(_) => CliError::from(e),
            None => CliError::config("field `instance`", e.to_string()),
        };
        match self {
            InstanceSource::Inline(def) => {
                let u = UtilityMatrix::from_rows(&def.u).map_err(malformed)?;
                let v = UtilityMatrix::from_rows(&def.v).map_err(malformed)?;
                let mut model = PublicModel::new(u, v, def.p0).map_err(malformed)?;
                if let Some(n) = def.normalization {
                    model = model.with_normalization(ReceiverNormalization { scale: n.scale, shift: n.shift });
                }
                let prior = Belief::new(def.prior.clone()).map_err(malformed)?;
                Instance::new(model, prior).map_err(malformed)
            }
            InstanceSource::Generator(spec) => match *spec {
                GeneratorSpec::ExampleBasic => Ok(gen_example_basic()),
                GeneratorSpec::Random { states, actions, seed, binary_mode, min_prior, min_g, min_d } => {
                    let constraints = RandomConstraints { binary_mode, min_prior, min_g, min_d };
                    gen_random(RandomShape { states, actions }, seed, &constraints)
                        .map(|r| r.instance)
                        .map_err(malformed)
                }
                GeneratorSpec::LowerBoundGeneral { kappa, prior_index } => {
                    gen_lower_bound_general(kappa, prior_index).map(|h| h.instance).map_err(malformed)
                }
                GeneratorSpec::LowerBoundBinary { horizon, v_star } => {
                    gen_lower_bound_binary(horizon, v_star).map(|h| h.instance).map_err(malformed)
                }
            },
        }
    }
}
