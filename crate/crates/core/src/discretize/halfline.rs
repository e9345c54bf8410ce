use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{build_space, fiber_restrictions, parse_params, require, snap, with_resolution};
use super::{BuiltSystem, SystemKind};
use crate::error::Result;

/// The half line `[0, ∞)` cut into unit blocks, compactified by a point at
/// infinity, with the fiber `Z_2` over every finite point and a single point
/// over infinity.
///
/// A point `x = n + t` sits at `(r, r·t)` in the sup-norm plane, where
/// `r = 1/(1+x)`, and infinity at the origin. So `d(x, ∞) = 1/(1+x)` and
/// far blocks crowd together near infinity. Fiber points at equal parity
/// are at base distance; at opposite parity they are `r(x) + r(y)` apart,
/// which is their distance through infinity.
///
/// The generators square the in-block coordinate `t` (and take its square
/// root), snapped to the block grid, and flip the fiber.
pub struct Halfline;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    blocks: usize,
    grid: usize,
}

impl SystemKind for Halfline {
    fn name(&self) -> &'static str {
        "halfline"
    }

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem> {
        let Params { blocks, grid } = parse_params("halfline", params)?;
        require(blocks >= 1 && grid >= 1, || "halfline: blocks and grid must be positive".into())?;
        let nb = blocks * grid;
        let ts: Vec<f64> = (0..grid).map(|j| (j + 1) as f64 / (grid + 1) as f64).collect();
        let x_of = |b: usize| (b / grid) as f64 + ts[b % grid];
        // embedding of base points; index nb is infinity
        let embed: Vec<(f64, f64)> = (0..nb)
            .map(|b| {
                let r = 1.0 / (1.0 + x_of(b));
                (r, r * ts[b % grid])
            })
            .chain(std::iter::once((0.0, 0.0)))
            .collect();
        let d_l = |a: usize, b: usize| (embed[a].0 - embed[b].0).abs().max((embed[a].1 - embed[b].1).abs());
        let inf = nb;
        let point_base = |x: usize| (x / 2).min(inf);
        let d_k = |x: usize, y: usize| {
            let (a, b) = (point_base(x), point_base(y));
            if a == inf || b == inf || x % 2 == y % 2 {
                d_l(a, b)
            } else {
                embed[a].0 + embed[b].0
            }
        };
        let mut base_labels: Vec<String> = (0..nb).map(|b| format!("{}", x_of(b))).collect();
        base_labels.push("inf".into());
        let mut point_labels: Vec<String> = (0..2 * nb).map(|x| format!("({},{})", base_labels[x / 2], x % 2)).collect();
        point_labels.push("inf".into());
        let space = build_space(base_labels, point_labels, (0..=2 * nb).map(point_base).collect(), d_k, d_l)?;

        let within = |f: &dyn Fn(f64) -> f64| -> Vec<usize> {
            (0..=2 * nb)
                .map(|x| {
                    if x == 2 * nb {
                        return x;
                    }
                    let b = x / 2;
                    let target = (b / grid) * grid + snap(f(ts[b % grid]), &ts);
                    2 * target + (1 - x % 2)
                })
                .collect()
        };
        let mut generators = fiber_restrictions(&space, &within(&|t| t * t))?;
        generators.extend(fiber_restrictions(&space, &within(&f64::sqrt))?);
        let last = d_l(nb - 1, inf);
        Ok(BuiltSystem {
            kind: "halfline",
            extension: None,
            space,
            generators,
            metadata: json!({
                "blocks": blocks,
                "grid": grid,
                "last_to_infinity": last,
            })
            .as_object()
            .cloned()
            .unwrap_or_default(),
        })
    }

    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>> {
        with_resolution(params, &["blocks", "grid"], resolution)
    }

    fn default_resolutions(&self, params: &Map<String, Value>) -> Vec<Vec<usize>> {
        let blocks = params.get("blocks").and_then(Value::as_u64).unwrap_or(8) as usize;
        vec![vec![blocks, 4], vec![blocks, 8]]
    }
}
