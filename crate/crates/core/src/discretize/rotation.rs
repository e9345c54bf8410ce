use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{build_space, circle, fiber_restrictions, parse_params, require, with_resolution};
use super::{BuiltSystem, SystemKind};
use crate::action::ExtensionGenerator;
use crate::error::Result;

/// Rotation of `Z_q` by `p` steps over a one-point base.
pub struct Rotation;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    q: usize,
    #[serde(default = "one")]
    p: usize,
}

fn one() -> usize {
    1
}

impl SystemKind for Rotation {
    fn name(&self) -> &'static str {
        "rotation"
    }

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem> {
        let Params { q, p } = parse_params("rotation", params)?;
        require(q >= 1, || "rotation: q must be positive".into())?;
        let space = build_space(
            vec!["*".into()],
            (0..q).map(|x| x.to_string()).collect(),
            vec![0; q],
            |x, y| circle(x, y, q),
            |_, _| 0.0,
        )?;
        let phi: Vec<usize> = (0..q).map(|x| (x + p) % q).collect();
        let back: Vec<usize> = (0..q).map(|x| (x + q - p % q) % q).collect();
        let mut generators = fiber_restrictions(&space, &phi)?;
        generators.extend(fiber_restrictions(&space, &back)?);
        Ok(BuiltSystem {
            kind: "rotation",
            extension: Some(vec![ExtensionGenerator { phi, psi: vec![0] }]),
            space,
            generators,
            metadata: json!({"q": q, "p": p}).as_object().cloned().unwrap_or_default(),
        })
    }

    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>> {
        with_resolution(params, &["q"], resolution)
    }

    fn default_resolutions(&self, _: &Map<String, Value>) -> Vec<Vec<usize>> {
        vec![vec![8], vec![16], vec![32]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{close, CloseOptions};

    #[test]
    fn envelope_is_the_generated_subgroup() {
        let sys = Rotation.build(json!({"q": 6, "p": 2}).as_object().unwrap()).unwrap();
        let env = close(&sys.generators, &sys.space, CloseOptions::default()).unwrap();
        assert_eq!(env.len(), 3);
        assert!(env.classification().is_groupoid);
    }
}
