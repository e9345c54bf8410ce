//! Named groupoid constructions for JSON input.
//!
//! `{"construction": "pair", "n": 3}`, `{"construction": "group_bundle",
//! "groups": [{"cyclic": 2}, {"cyclic": 3}]}` and so on. Groups are given
//! as a multiplication table or as `{"cyclic": n}` / `{"symmetric": k}`.

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::groupoid::{self, FiniteGroupoid};
use crate::registry::Registry;

pub trait GroupoidConstruction: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, params: &Map<String, Value>) -> Result<FiniteGroupoid>;
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Table(Vec<Vec<usize>>),
    Cyclic { cyclic: usize },
    Symmetric { symmetric: usize },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Table(t) => FiniteGroup::from_table(t),
            GroupSpec::Cyclic { cyclic: 0 } | GroupSpec::Symmetric { symmetric: 0 } => {
                Err(Error::Spec("group of order 0".into()))
            }
            GroupSpec::Cyclic { cyclic } => Ok(FiniteGroup::cyclic(*cyclic)),
            GroupSpec::Symmetric { symmetric } => Ok(FiniteGroup::symmetric(*symmetric)),
        }
    }
}

fn params<T: serde::de::DeserializeOwned>(name: &str, m: &Map<String, Value>) -> Result<T> {
    serde_json::from_value(Value::Object(m.clone())).map_err(|e| Error::Spec(format!("{name}: {e}")))
}

struct Trivial;
struct Pair;
struct Bundle;
struct Transformation;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrivialParams {
    units: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairParams {
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleParams {
    groups: Vec<GroupSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionParams {
    group: GroupSpec,
    /// `action[g][x] = g·x`.
    action: Vec<Vec<usize>>,
}

impl GroupoidConstruction for Trivial {
    fn name(&self) -> &'static str {
        "trivial"
    }

    fn build(&self, m: &Map<String, Value>) -> Result<FiniteGroupoid> {
        let p: TrivialParams = params("trivial", m)?;
        Ok(groupoid::trivial(p.units))
    }
}

impl GroupoidConstruction for Pair {
    fn name(&self) -> &'static str {
        "pair"
    }

    fn build(&self, m: &Map<String, Value>) -> Result<FiniteGroupoid> {
        let p: PairParams = params("pair", m)?;
        Ok(groupoid::pair(p.n))
    }
}

impl GroupoidConstruction for Bundle {
    fn name(&self) -> &'static str {
        "group_bundle"
    }

    fn build(&self, m: &Map<String, Value>) -> Result<FiniteGroupoid> {
        let p: BundleParams = params("group_bundle", m)?;
        let groups = p.groups.iter().map(GroupSpec::build).collect::<Result<Vec<_>>>()?;
        Ok(groupoid::group_bundle(&groups))
    }
}

impl GroupoidConstruction for Transformation {
    fn name(&self) -> &'static str {
        "from_group_action"
    }

    fn build(&self, m: &Map<String, Value>) -> Result<FiniteGroupoid> {
        let p: ActionParams = params("from_group_action", m)?;
        groupoid::from_group_action(&p.group.build()?, &p.action)
    }
}

pub fn builtin_constructions() -> Registry<dyn GroupoidConstruction> {
    let mut r: Registry<dyn GroupoidConstruction> = Registry::new("construction");
    for c in [
        Box::new(Trivial) as Box<dyn GroupoidConstruction>,
        Box::new(Pair),
        Box::new(Bundle),
        Box::new(Transformation),
    ] {
        r.register(c.name(), c);
    }
    r
}

/// Builds `{"construction": name, ...params}`.
pub fn build_construction(v: &Value) -> Result<FiniteGroupoid> {
    let mut m = v
        .as_object()
        .cloned()
        .ok_or_else(|| Error::Spec("construction must be a JSON object".into()))?;
    let name = match m.shift_remove("construction") {
        Some(Value::String(s)) => s,
        _ => return Err(Error::Spec("missing string field `construction`".into())),
    };
    builtin_constructions().get(&name)?.build(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn named_constructions() {
        let g = build_construction(&json!({"construction": "pair", "n": 3})).unwrap();
        assert_eq!(g.len(), 9);
        let b = build_construction(&json!({
            "construction": "group_bundle",
            "groups": [{"cyclic": 2}, [[0, 1, 2], [1, 2, 0], [2, 0, 1]]]
        }))
        .unwrap();
        assert_eq!(b.len(), 5);
        let t = build_construction(&json!({
            "construction": "from_group_action",
            "group": {"cyclic": 4},
            "action": [[0, 1], [1, 0], [0, 1], [1, 0]]
        }))
        .unwrap();
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn bad_group_table_reports_axiom() {
        let err = build_construction(&json!({
            "construction": "group_bundle",
            "groups": [[[0, 1], [1, 1]]]
        }))
        .unwrap_err();
        assert!(matches!(err, Error::NotAGroup { axiom: "inverse", .. }));
        assert!(matches!(
            build_construction(&json!({"construction": "moebius"})),
            Err(Error::UnknownKind { .. })
        ));
    }
}
