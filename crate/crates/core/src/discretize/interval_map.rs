use num::{Rational64, Zero};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{build_space, circle, fiber_restrictions, parse_params, require, snap, with_resolution};
use super::{BuiltSystem, SystemKind};
use crate::error::{Error, Result};

/// A piecewise affine self-map of `[0, 1]` (or of the circle `[0, 1)`),
/// evaluated exactly on the grid and snapped back onto it. The base is a
/// single point, so the whole grid is one fiber and the map is a single raw
/// generator.
pub struct IntervalMap;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Piece {
    from: String,
    to: String,
    slope: String,
    intercept: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    n: usize,
    #[serde(default)]
    circle: Option<bool>,
    #[serde(default)]
    pieces: Option<Vec<Piece>>,
    #[serde(default)]
    preset: Option<String>,
}

struct Affine {
    from: Rational64,
    to: Rational64,
    slope: Rational64,
    intercept: Rational64,
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Spec(format!("`{s}` is not a rational p/q"));
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q): (i64, i64) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn preset(name: &str) -> Result<(Vec<Affine>, bool)> {
    let r = |p: i64, q: i64| Rational64::new(p, q);
    match name {
        "doubling" => Ok((
            vec![
                Affine { from: r(0, 1), to: r(1, 2), slope: r(2, 1), intercept: r(0, 1) },
                Affine { from: r(1, 2), to: r(1, 1), slope: r(2, 1), intercept: r(-1, 1) },
            ],
            true,
        )),
        "tent" => Ok((
            vec![
                Affine { from: r(0, 1), to: r(1, 2), slope: r(2, 1), intercept: r(0, 1) },
                Affine { from: r(1, 2), to: r(1, 1), slope: r(-2, 1), intercept: r(2, 1) },
            ],
            false,
        )),
        other => Err(Error::Spec(format!("interval_map: unknown preset `{other}`"))),
    }
}

fn check_cover(pieces: &[Affine]) -> Result<()> {
    require(!pieces.is_empty(), || "interval_map: no pieces".into())?;
    require(pieces[0].from.is_zero(), || "interval_map: pieces must start at 0".into())?;
    require(pieces.last().map(|p| p.to) == Some(Rational64::from_integer(1)), || {
        "interval_map: pieces must end at 1".into()
    })?;
    for (i, p) in pieces.iter().enumerate() {
        require(p.from < p.to, || format!("interval_map: piece {i} is empty"))?;
        if i + 1 < pieces.len() {
            require(p.to == pieces[i + 1].from, || format!("interval_map: gap or overlap after piece {i}"))?;
        }
    }
    Ok(())
}

impl SystemKind for IntervalMap {
    fn name(&self) -> &'static str {
        "interval_map"
    }

    fn build(&self, params: &Map<String, Value>) -> Result<BuiltSystem> {
        let p: Params = parse_params("interval_map", params)?;
        let (pieces, preset_circle) = match (&p.pieces, &p.preset) {
            (Some(list), None) => (
                list.iter()
                    .map(|pc| {
                        Ok(Affine {
                            from: parse_rational(&pc.from)?,
                            to: parse_rational(&pc.to)?,
                            slope: parse_rational(&pc.slope)?,
                            intercept: parse_rational(&pc.intercept)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
                false,
            ),
            (None, Some(name)) => preset(name)?,
            _ => return Err(Error::Spec("interval_map: give exactly one of `pieces` or `preset`".into())),
        };
        check_cover(&pieces)?;
        let on_circle = p.circle.unwrap_or(preset_circle);
        let n = p.n;
        require(n >= if on_circle { 1 } else { 2 }, || "interval_map: grid too small".into())?;
        let denom = if on_circle { n } else { n - 1 } as i64;
        let one = Rational64::from_integer(1);
        let mut image = Vec::with_capacity(n);
        // grid with 1 appended on the circle, so values near 1 wrap to 0
        let grid: Vec<f64> = (0..=denom).map(|j| j as f64 / denom as f64).collect();
        for j in 0..n {
            let x = Rational64::new(j as i64, denom);
            let piece = pieces
                .iter()
                .find(|pc| pc.from <= x && (x < pc.to || pc.to == one))
                .expect("pieces cover [0, 1]");
            let mut y = piece.slope * x + piece.intercept;
            if on_circle {
                y = y - y.floor();
            } else {
                require(y >= Rational64::zero() && y <= one, || {
                    format!("interval_map: f({x}) = {y} leaves [0, 1]")
                })?;
            }
            let yf = *y.numer() as f64 / *y.denom() as f64;
            image.push(snap(yf, &grid) % n);
        }
        let space = build_space(
            vec!["*".into()],
            (0..n).map(|j| Rational64::new(j as i64, denom).to_string()).collect(),
            vec![0; n],
            |a, b| {
                if on_circle {
                    circle(a, b, n)
                } else {
                    a.abs_diff(b) as f64 / denom as f64
                }
            },
            |_, _| 0.0,
        )?;
        let generators = fiber_restrictions(&space, &image)?;
        Ok(BuiltSystem {
            kind: "interval_map",
            extension: None,
            space,
            generators,
            metadata: json!({"n": n, "circle": on_circle, "image": image})
                .as_object()
                .cloned()
                .unwrap_or_default(),
        })
    }

    fn at_resolution(&self, params: &Map<String, Value>, resolution: &[usize]) -> Result<Map<String, Value>> {
        with_resolution(params, &["n"], resolution)
    }

    fn default_resolutions(&self, _: &Map<String, Value>) -> Vec<Vec<usize>> {
        vec![vec![8], vec![16], vec![32]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(v: Value) -> Vec<usize> {
        let sys = IntervalMap.build(v.as_object().unwrap()).unwrap();
        sys.generators[0].image().to_vec()
    }

    #[test]
    fn presets_on_the_grid() {
        assert_eq!(image(json!({"preset": "doubling", "n": 8})), vec![0, 2, 4, 6, 0, 2, 4, 6]);
        assert_eq!(image(json!({"preset": "tent", "n": 5})), vec![0, 2, 4, 2, 0]);
        let pieces = json!([{"from": "0", "to": "1", "slope": "-1", "intercept": "1"}]);
        assert_eq!(image(json!({"pieces": pieces, "n": 3})), vec![2, 1, 0]);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational(" 3/4 ").unwrap(), Rational64::new(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), Rational64::from_integer(-2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }
}
