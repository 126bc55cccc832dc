//! Scenario files, schema version 1.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "field": "Q",
//!   "instance": {"kind": "support", "poset": {"elements": ["c", "o"], "relations": [["c", "o"]], "levels": [0, 1]}},
//!   "objects": {"K": {"lo": 0, "terms": [{"dims": {"c": 1, "o": 1}, "maps": {"c<o": [["1"]]}}]}},
//!   "tasks": [{"op": "suite", "suite": "all"}, {"op": "truncate", "object": "K", "w": 0}]
//! }
//! ```
//!
//! `instance.kind` is `support` (levels on a poset, optional `perversity`),
//! `graded` (`window`) or `exceptional` (`poset`, `nabla` and `delta` naming
//! objects, `null` for a missing partner). Objects use the complex format of
//! `baric_core::serial`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::Value;

use baric_core::baric::{BaricRealization, ExceptionalSet, LevelRealization};
use baric_core::derivedcat::Complex;
use baric_core::exactlinalg::Field;
use baric_core::posetrep::StratPoset;
use baric_core::serial::complex_from_json;
use baric_core::verify::Instance;

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub field: Option<String>,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub objects: BTreeMap<String, Value>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSpec {
    pub elements: Vec<String>,
    #[serde(default)]
    pub relations: Vec<(String, String)>,
    #[serde(default)]
    pub levels: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    Support {
        poset: PosetSpec,
        #[serde(default)]
        perversity: Option<Vec<i64>>,
    },
    Graded {
        window: i64,
    },
    Exceptional {
        poset: PosetSpec,
        nabla: Vec<String>,
        delta: Vec<Option<String>>,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    All,
    BaricAxioms,
    TruncationIdentities,
    Predicates,
    ExceptionalAxioms,
    Compat,
    StagDecompose,
    Heart,
    Perverse,
    Gluing,
    MultDuality,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub max_dim: usize,
    pub lo_degree: i64,
    pub hi_degree: i64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// A suite on named objects (all of them when `objects` is absent).
    Suite {
        suite: SuiteName,
        #[serde(default)]
        objects: Option<Vec<String>>,
    },
    /// A suite on random objects of the instance.
    Fuzz {
        seed: u64,
        count: usize,
        #[serde(default)]
        bounds: Option<BoundsSpec>,
        #[serde(default)]
        suite: Option<SuiteName>,
    },
    Truncate {
        object: String,
        w: i64,
    },
    Stagger {
        object: String,
    },
    /// Intermediate extension of `object`, given on the open subposet `open`,
    /// compared with the named object `expect`.
    IntermediateExtension {
        open: Vec<String>,
        object: Value,
        expect: String,
    },
    /// The two named objects are isomorphic in the derived category.
    Isomorphic {
        left: String,
        right: String,
    },
}

/// A scenario with every reference resolved.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub instance: Instance,
    pub objects: BTreeMap<String, Complex>,
    pub tasks: Vec<Task>,
}

impl Scenario {
    pub fn object(&self, name: &str) -> Result<&Complex, CliError> {
        self.objects.get(name).ok_or_else(|| CliError::Schema(format!("unknown object \"{name}\"")))
    }
}

pub fn parse_field(s: &str) -> Result<Field, CliError> {
    match s.trim() {
        "Q" => Ok(Field::Rational),
        t => {
            let p = t
                .strip_prefix("Fp:")
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| CliError::Usage(format!("field must be Q or Fp:<p>, got {s}")))?;
            Field::prime(p).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

/// Parses scenario text. Syntax errors carry line and column, schema errors
/// the path of the offending field.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() || path == "." {
            CliError::Parse(inner.to_string())
        } else {
            CliError::Schema(format!("{path}: {inner}"))
        }
    })?;
    if file.schema != SCHEMA {
        return Err(CliError::Schema(format!("schema: unsupported version {}", file.schema)));
    }
    Ok(file)
}

fn build_poset(p: &PosetSpec) -> Result<StratPoset, CliError> {
    let names: Vec<&str> = p.elements.iter().map(String::as_str).collect();
    let rels: Vec<(&str, &str)> = p.relations.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let levels = p.levels.clone().unwrap_or_else(|| vec![0; names.len()]);
    if levels.len() != names.len() {
        return Err(CliError::Schema(format!(
            "instance.poset.levels: {} levels for {} elements",
            levels.len(),
            names.len()
        )));
    }
    StratPoset::from_names(&names, &rels, &levels).map_err(|e| CliError::Schema(format!("instance.poset: {e}")))
}

fn parse_objects(
    objects: &BTreeMap<String, Value>,
    poset: &Arc<StratPoset>,
    field: Field,
) -> Result<BTreeMap<String, Complex>, CliError> {
    objects
        .iter()
        .map(|(k, v)| {
            let x = complex_from_json(v, poset, field, &format!("objects.{k}"))
                .map_err(|e| CliError::Schema(e.to_string()))?;
            Ok((k.clone(), x))
        })
        .collect()
}

/// Resolves a parsed file; `field` overrides the field named in the file.
pub fn resolve_scenario(file: &ScenarioFile, field: Option<Field>) -> Result<Scenario, CliError> {
    let field = match (field, &file.field) {
        (Some(f), _) => f,
        (None, Some(s)) => parse_field(s).map_err(|e| CliError::Schema(format!("field: {e}")))?,
        (None, None) => Field::Rational,
    };
    let name = file.name.clone().unwrap_or_else(|| "scenario".into());
    let (poset, baric, objects) = match &file.instance {
        InstanceSpec::Support { poset, perversity } => {
            if poset.levels.is_none() {
                return Err(CliError::Schema("instance.poset.levels: required for a support instance".into()));
            }
            let p = Arc::new(build_poset(poset)?);
            let mut l = LevelRealization::support(p.clone()).map_err(|e| CliError::Schema(format!("instance: {e}")))?;
            if let Some(q) = perversity {
                if q.len() != p.len() {
                    return Err(CliError::Schema("instance.perversity: one value per element".into()));
                }
                l = l.with_perversity(q);
            }
            let objects = parse_objects(&file.objects, &p, field)?;
            (p, BaricRealization::Level(l), objects)
        }
        InstanceSpec::Graded { window } => {
            if *window < 0 {
                return Err(CliError::Schema("instance.window: must be nonnegative".into()));
            }
            let l = LevelRealization::graded(*window);
            let p = l.poset().clone();
            let objects = parse_objects(&file.objects, &p, field)?;
            (p, BaricRealization::Level(l), objects)
        }
        InstanceSpec::Exceptional { poset, nabla, delta } => {
            let p = Arc::new(build_poset(poset)?);
            let objects = parse_objects(&file.objects, &p, field)?;
            let get = |k: &str, path: &str| {
                objects.get(k).cloned().ok_or_else(|| CliError::Schema(format!("{path}: unknown object \"{k}\"")))
            };
            let nab = nabla
                .iter()
                .enumerate()
                .map(|(i, k)| get(k, &format!("instance.nabla[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let del = delta
                .iter()
                .enumerate()
                .map(|(i, k)| k.as_deref().map(|k| get(k, &format!("instance.delta[{i}]"))).transpose())
                .collect::<Result<Vec<_>, _>>()?;
            let e = ExceptionalSet::new(nab, del).map_err(|e| CliError::Schema(format!("instance: {e}")))?;
            (p, BaricRealization::Exceptional(e), objects)
        }
    };
    for (i, t) in file.tasks.iter().enumerate() {
        let named: Vec<&String> = match t {
            Task::Suite { objects: Some(os), .. } => os.iter().collect(),
            Task::Truncate { object, .. } | Task::Stagger { object } => vec![object],
            Task::IntermediateExtension { expect, .. } => vec![expect],
            Task::Isomorphic { left, right } => vec![left, right],
            _ => vec![],
        };
        for k in named {
            if !objects.contains_key(k) {
                return Err(CliError::Schema(format!("tasks[{i}]: unknown object \"{k}\"")));
            }
        }
    }
    Ok(Scenario {
        name: name.clone(),
        instance: Instance { name, poset, field, baric },
        objects,
        tasks: file.tasks.clone(),
    })
}
