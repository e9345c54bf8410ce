use std::f64::consts::TAU;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{build_space, fiber_restrictions, inverse_permutation, parse_params, require, with_resolution};
use super::{rotation_subgroup_closure, BuiltSystem, SystemKind};
use crate::action::ExtensionGenerator;
use crate::error::Result;

/// Concentric circles rotated at a per-radius speed. The base is the set of
/// radii; the fiber over radius `r` is `n` equally spaced angles (a single
/// point at `r = 0`), and the generator rotates it by `steps[j]` angles.
pub struct Disc;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    steps: Vec<usize>,
    n: usize,
    #[serde(default)]
    radii: Option<Vec<f64>>,
}

impl SystemKind for Disc {
    fn name(&self) -> &'static str {
        "disc"
    }

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem> {
        let p: Params = parse_params("disc", params)?;
        require(p.n >= 1, || "disc: n must be positive".into())?;
        require(!p.steps.is_empty(), || "disc: steps must be nonempty".into())?;
        let radii = p
            .radii
            .unwrap_or_else(|| (0..p.steps.len()).map(|j| j as f64).collect());
        require(radii.len() == p.steps.len(), || "disc: radii and steps differ in length".into())?;
        require(radii.iter().all(|r| r.is_finite() && *r >= 0.0), || {
            "disc: radii must be finite and nonnegative".into()
        })?;
        let mut coords = Vec::new();
        let mut q = Vec::new();
        let mut labels = Vec::new();
        let mut sizes = Vec::new();
        for (j, &r) in radii.iter().enumerate() {
            let size = if r == 0.0 { 1 } else { p.n };
            for a in 0..size {
                let t = TAU * a as f64 / p.n as f64;
                coords.push((r * t.cos(), r * t.sin(), j, a));
                q.push(j);
                labels.push(format!("r{j}:{a}"));
            }
            sizes.push(size);
        }
        let phi: Vec<usize> = coords
            .iter()
            .enumerate()
            .map(|(x, &(_, _, j, a))| x - a + (a + p.steps[j]) % sizes[j])
            .collect();
        let space = build_space(
            radii.iter().map(|r| format!("{r}")).collect(),
            labels,
            q,
            |x, y| (coords[x].0 - coords[y].0).hypot(coords[x].1 - coords[y].1),
            |a, b| (radii[a] - radii[b]).abs(),
        )?;
        let mut generators = fiber_restrictions(&space, &phi)?;
        generators.extend(fiber_restrictions(&space, &inverse_permutation(&phi))?);
        let subgroups: Vec<usize> = p
            .steps
            .iter()
            .zip(&sizes)
            .map(|(&k, &n)| rotation_subgroup_closure(k, n).len())
            .collect();
        let metadata = json!({
            "fiber_sizes": sizes,
            "steps": p.steps,
            "subgroup_orders": subgroups,
        });
        Ok(BuiltSystem {
            kind: "disc",
            extension: Some(vec![ExtensionGenerator {
                psi: (0..space.base_count()).collect(),
                phi,
            }]),
            space,
            generators,
            metadata: metadata.as_object().cloned().unwrap_or_default(),
        })
    }

    /// `[radius count R, angular points n]`: radii `j/R` turning `j` steps.
    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>> {
        let mut out = with_resolution(params, &["radius_count", "n"], resolution)?;
        let r = resolution[0];
        out.remove("radius_count");
        out.insert("steps".into(), json!((0..r).collect::<Vec<_>>()));
        out.insert("radii".into(), json!((0..r).map(|j| j as f64 / r as f64).collect::<Vec<_>>()));
        Ok(out)
    }

    fn default_resolutions(&self, _: &Map<String, Value>) -> Vec<Vec<usize>> {
        vec![vec![4, 8], vec![8, 16]]
    }
}
