//! JSON formats and the canonical writer.
//!
//! Reports are written with a fixed key order (insertion order of the
//! builder) and floats in scientific notation with 17 significant digits, so
//! equal inputs give byte-identical output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::action::{FiberedSpace, Metric};
use crate::constructions::build_construction;
use crate::discretize::{BuiltSystem, SystemSpec};
use crate::envelope::{Envelope, FiberMap};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, FiniteGroupoid, GroupoidTable};
use crate::measures::{rational_string, Rim};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidDoc {
    pub elements: Vec<String>,
    pub units: Vec<ElementId>,
    pub src: Vec<ElementId>,
    pub rng: Vec<ElementId>,
    /// `[g, h, gh]` for every defined product.
    pub product: Vec<[ElementId; 3]>,
    pub inverse: Vec<ElementId>,
}

impl GroupoidDoc {
    pub fn to_table(&self) -> Result<GroupoidTable> {
        let n = self.elements.len();
        let mut product = vec![None; n * n];
        for &[g, h, k] in &self.product {
            if g >= n || h >= n {
                return Err(Error::Structural(format!("product entry [{g},{h},{k}] names a non-element")));
            }
            if product[g * n + h].replace(k).is_some() {
                return Err(Error::Structural(format!("product ({g},{h}) given twice")));
            }
        }
        let table = GroupoidTable {
            labels: self.elements.clone(),
            units: self.units.clone(),
            src: self.src.clone(),
            rng: self.rng.clone(),
            product,
            inverse: self.inverse.clone(),
        };
        table.check_structure()?;
        Ok(table)
    }

    pub fn from_table(t: &GroupoidTable) -> Self {
        let n = t.len();
        let mut product = Vec::new();
        for g in 0..n {
            for h in 0..n {
                if let Some(k) = t.get(g, h) {
                    product.push([g, h, k]);
                }
            }
        }
        GroupoidDoc {
            elements: t.labels.clone(),
            units: t.units.clone(),
            src: t.src.clone(),
            rng: t.rng.clone(),
            product,
            inverse: t.inverse.clone(),
        }
    }

    pub fn from_groupoid(g: &FiniteGroupoid) -> Self {
        Self::from_table(g.table())
    }
}

/// Groupoid document plus a fibered space and the action table. The units
/// of the groupoid, in the listed order, are the base points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub elements: Vec<String>,
    pub units: Vec<ElementId>,
    pub src: Vec<ElementId>,
    pub rng: Vec<ElementId>,
    pub product: Vec<[ElementId; 3]>,
    pub inverse: Vec<ElementId>,
    pub base: Vec<String>,
    pub points: Vec<String>,
    pub q: Vec<usize>,
    /// `[g, x, g·x]`.
    pub action: Vec<[usize; 3]>,
    #[serde(rename = "d_K")]
    pub d_k: Vec<Vec<f64>>,
    #[serde(rename = "d_L")]
    pub d_l: Vec<Vec<f64>>,
}

impl ActionDoc {
    pub fn groupoid_doc(&self) -> GroupoidDoc {
        GroupoidDoc {
            elements: self.elements.clone(),
            units: self.units.clone(),
            src: self.src.clone(),
            rng: self.rng.clone(),
            product: self.product.clone(),
            inverse: self.inverse.clone(),
        }
    }

    pub fn space(&self, tol: f64) -> Result<FiberedSpace> {
        Ok(FiberedSpace::new(
            self.base.clone(),
            self.points.clone(),
            self.q.clone(),
            Metric::from_rows(&self.d_k)?,
            Metric::from_rows(&self.d_l)?,
        )?
        .with_tolerance(tol))
    }

    pub fn entries(&self) -> Vec<(ElementId, usize, usize)> {
        self.action.iter().map(|&[g, x, y]| (g, x, y)).collect()
    }

    pub fn from_parts(g: &FiniteGroupoid, space: &FiberedSpace, entries: &[(ElementId, usize, usize)]) -> Self {
        let gd = GroupoidDoc::from_groupoid(g);
        ActionDoc {
            elements: gd.elements,
            units: gd.units,
            src: gd.src,
            rng: gd.rng,
            product: gd.product,
            inverse: gd.inverse,
            base: space.base_labels().to_vec(),
            points: space.point_labels().to_vec(),
            q: space.q_map().to_vec(),
            action: entries.iter().map(|&(g, x, y)| [g, x, y]).collect(),
            d_k: space.metric_k().rows(),
            d_l: space.metric_l().rows(),
        }
    }
}

/// What a CLI input file holds, told apart by its keys.
#[derive(Debug, Clone)]
pub enum Input {
    Groupoid(GroupoidDoc),
    Construction(Value),
    Action(Box<ActionDoc>),
    System(SystemSpec),
}

impl Input {
    pub fn from_value(v: Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("input must be a JSON object".into()))?;
        if obj.contains_key("kind") {
            Ok(Input::System(SystemSpec::from_value(&v)?))
        } else if obj.contains_key("construction") {
            Ok(Input::Construction(v))
        } else if obj.contains_key("action") {
            Ok(Input::Action(Box::new(serde_json::from_value(v)?)))
        } else if obj.contains_key("product") {
            Ok(Input::Groupoid(serde_json::from_value(v)?))
        } else {
            Err(Error::Parse(
                "cannot tell the input type: expected `kind`, `construction`, `action` or `product`".into(),
            ))
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text)?)
    }

    pub fn construction(v: &Value) -> Result<FiniteGroupoid> {
        build_construction(v)
    }
}

pub fn map_json(m: &FiberMap) -> Value {
    json!({"src": m.src(), "dst": m.dst(), "image": m.image()})
}

/// A compiled system in the fibered-space format, with its generators.
pub fn system_json(sys: &BuiltSystem) -> Value {
    let s = &sys.space;
    json!({
        "kind": sys.kind,
        "base": s.base_labels(),
        "points": s.point_labels(),
        "q": s.q_map(),
        "d_K": s.metric_k().rows(),
        "d_L": s.metric_l().rows(),
        "generators": sys.generators.iter().map(map_json).collect::<Vec<_>>(),
        "invertible": sys.extension.is_some(),
        "metadata": Value::Object(sys.metadata.clone()),
    })
}

pub fn envelope_json(env: &Envelope) -> Value {
    let c = env.classification();
    json!({
        "size": env.len(),
        "generators": env.generators().iter().map(map_json).collect::<Vec<_>>(),
        "epsilon": env.epsilon(),
        "flags": {
            "is_groupoid": c.is_groupoid,
            "is_transitive": c.is_transitive,
            "is_fiberwise_transitive": c.is_fiberwise_transitive,
            "all_injective": c.all_injective,
        },
        "orbit_classes": c.orbit_classes,
        "witness": env.non_injective_witness().map(map_json),
    })
}

pub fn rim_json(rim: &Rim) -> Value {
    let mut weights = Map::new();
    for (u, w) in &rim.weights {
        let inner: Map<String, Value> = w
            .iter()
            .map(|(x, p)| (x.to_string(), Value::from(rational_string(p))))
            .collect();
        weights.insert(u.to_string(), Value::Object(inner));
    }
    json!({"class": rim.class, "weights": weights})
}

/// Pretty JSON with two-space indentation and floats as `{:.16e}`.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| {
        for _ in 0..d {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().expect("f64 number");
                let _ = write!(out, "{f:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, depth + 1);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, depth + 1);
                    write_value(out, item, depth + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

pub const SCHEMA_NAMES: &[&str] = &["groupoid", "action", "system", "envelope", "rim", "fourier", "report"];

pub fn schema(name: &str) -> Option<&'static str> {
    Some(match name {
        "groupoid" => include_str!("schemas/groupoid.json"),
        "action" => include_str!("schemas/action.json"),
        "system" => include_str!("schemas/system.json"),
        "envelope" => include_str!("schemas/envelope.json"),
        "rim" => include_str!("schemas/rim.json"),
        "fourier" => include_str!("schemas/fourier.json"),
        "report" => include_str!("schemas/report.json"),
        _ => return None,
    })
}
