use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{build_space, circle, fiber_restrictions, inverse_permutation, parse_params, require};
use super::{with_resolution, BuiltSystem, SystemKind};
use crate::action::ExtensionGenerator;
use crate::error::Result;

/// Skew rotation on `Z_q × Z_m`: `(l, y) ↦ (l + 1, y + c(l))` over the base
/// rotation `l ↦ l + 1`. The cocycle defaults to `c(l) = l`.
pub struct Skew;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    q: usize,
    m: usize,
    #[serde(default)]
    cocycle: Option<Vec<i64>>,
}

impl SystemKind for Skew {
    fn name(&self) -> &'static str {
        "skew"
    }

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem> {
        let p: Params = parse_params("skew", params)?;
        let (q, m) = (p.q, p.m);
        require(q >= 1 && m >= 1, || "skew: q and m must be positive".into())?;
        let cocycle: Vec<usize> = match p.cocycle {
            Some(c) => {
                require(c.len() == q, || format!("skew: cocycle needs {q} values"))?;
                c.iter().map(|&v| v.rem_euclid(m as i64) as usize).collect()
            }
            None => (0..q).map(|l| l % m).collect(),
        };
        let space = build_space(
            (0..q).map(|l| l.to_string()).collect(),
            (0..q * m).map(|x| format!("({},{})", x / m, x % m)).collect(),
            (0..q * m).map(|x| x / m).collect(),
            |x, y| circle(x / m, y / m, q) + circle(x % m, y % m, m),
            |a, b| circle(a, b, q),
        )?;
        let phi: Vec<usize> = (0..q * m)
            .map(|x| {
                let (l, y) = (x / m, x % m);
                ((l + 1) % q) * m + (y + cocycle[l]) % m
            })
            .collect();
        let mut generators = fiber_restrictions(&space, &phi)?;
        generators.extend(fiber_restrictions(&space, &inverse_permutation(&phi))?);
        let total: usize = cocycle.iter().sum::<usize>() % m;
        Ok(BuiltSystem {
            kind: "skew",
            extension: Some(vec![ExtensionGenerator {
                phi,
                psi: (0..q).map(|l| (l + 1) % q).collect(),
            }]),
            space,
            generators,
            metadata: json!({"q": q, "m": m, "cocycle": cocycle, "cycle_sum": total})
                .as_object()
                .cloned()
                .unwrap_or_default(),
        })
    }

    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>> {
        let mut out = with_resolution(params, &["q", "m"], resolution)?;
        out.remove("cocycle");
        Ok(out)
    }

    fn default_resolutions(&self, params: &Map<String, Value>) -> Vec<Vec<usize>> {
        let get = |k: &str| params.get(k).and_then(Value::as_u64).unwrap_or(4) as usize;
        let (q, m) = (get("q"), get("m"));
        vec![vec![q, m], vec![q, 2 * m]]
    }
}
