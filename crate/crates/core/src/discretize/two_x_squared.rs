use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{build_space, fiber_restrictions, parse_params, require, snap, with_resolution};
use super::{BuiltSystem, SystemKind};
use crate::error::Result;

/// `x ↦ sign(x)·x²` on a grid in `[-1, 1]`, extended by the flip on `Z_2`.
/// Snapping makes the base map collapse grid points near zero, so the
/// system only has raw generators: the snapped map and the snapped inverse
/// `x ↦ sign(x)·√|x|`, each flipping the fiber.
pub struct TwoXSquared;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    points: usize,
}

impl SystemKind for TwoXSquared {
    fn name(&self) -> &'static str {
        "two_x_squared"
    }

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem> {
        let Params { points: n } = parse_params("two_x_squared", params)?;
        require(n >= 2, || "two_x_squared: need at least 2 grid points".into())?;
        let grid: Vec<f64> = (0..n).map(|j| -1.0 + 2.0 * j as f64 / (n - 1) as f64).collect();
        let space = build_space(
            grid.iter().map(|x| format!("{x}")).collect(),
            (0..2 * n).map(|x| format!("({},{})", grid[x / 2], x % 2)).collect(),
            (0..2 * n).map(|x| x / 2).collect(),
            |x, y| (grid[x / 2] - grid[y / 2]).abs() + if x % 2 == y % 2 { 0.0 } else { 1.0 },
            |a, b| (grid[a] - grid[b]).abs(),
        )?;
        let square: Vec<usize> = grid.iter().map(|&x| snap(x.signum() * x * x, &grid)).collect();
        let root: Vec<usize> = grid.iter().map(|&x| snap(x.signum() * x.abs().sqrt(), &grid)).collect();
        let lift = |base: &[usize]| -> Vec<usize> { (0..2 * n).map(|x| 2 * base[x / 2] + (1 - x % 2)).collect() };
        let mut generators = fiber_restrictions(&space, &lift(&square))?;
        generators.extend(fiber_restrictions(&space, &lift(&root))?);
        Ok(BuiltSystem {
            kind: "two_x_squared",
            extension: None,
            space,
            generators,
            metadata: json!({
                "points": n,
                "spacing": 2.0 / (n - 1) as f64,
                "square": square,
                "root": root,
            })
            .as_object()
            .cloned()
            .unwrap_or_default(),
        })
    }

    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>> {
        with_resolution(params, &["points"], resolution)
    }

    fn default_resolutions(&self, _: &Map<String, Value>) -> Vec<Vec<usize>> {
        vec![vec![5], vec![9], vec![17]]
    }
}
