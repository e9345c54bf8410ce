//! Relatively invariant measures on finite envelopes.
//!
//! Haar measure on a finite isotropy group is uniform counting measure, so
//! the measure over `u` built from a point `x_u` is the distribution of
//! `θ(x_u)` for `θ` uniform in the isotropy group `Iso_u`. All weights are
//! exact rationals.

use std::collections::BTreeMap;

use num::{Rational64, Zero};
use serde::Serialize;

use crate::action::FiberedSpace;
use crate::envelope::{Envelope, FiberMap};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Probability vectors `μ_u` for the base points `u` under one orbit class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rim {
    /// The orbit class on `K` the measure lives on.
    pub class: Vec<usize>,
    /// `weights[u][x] = μ_u({x})`; zero weights are omitted.
    pub weights: BTreeMap<usize, BTreeMap<usize, Rational64>>,
}

impl Rim {
    pub fn weight(&self, base: usize, x: usize) -> Rational64 {
        self.weights
            .get(&base)
            .and_then(|w| w.get(&x))
            .copied()
            .unwrap_or_else(Rational64::zero)
    }

    pub fn bases(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.keys().copied()
    }

    pub fn support(&self, base: usize) -> Vec<usize> {
        self.weights
            .get(&base)
            .map(|w| w.iter().filter(|(_, p)| !p.is_zero()).map(|(&x, _)| x).collect())
            .unwrap_or_default()
    }

    pub fn weight_f64(&self, base: usize, x: usize) -> f64 {
        let w = self.weight(base, x);
        *w.numer() as f64 / *w.denom() as f64
    }
}

pub fn rational_string(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Maps `u → u` of the envelope, per base point.
fn isotropy_maps(env: &Envelope, nb: usize) -> Vec<Vec<&FiberMap>> {
    let mut iso = vec![Vec::new(); nb];
    for m in env.maps() {
        if m.src() == m.dst() {
            iso[m.src()].push(m);
        }
    }
    iso
}

fn require_groupoid(env: &Envelope) -> Result<()> {
    if env.classification().is_groupoid {
        Ok(())
    } else {
        Err(Error::NotGroupoid(
            "the envelope is not a groupoid (some map is not bijective or lacks an inverse); \
             the Haar construction needs isotropy groups"
                .into(),
        ))
    }
}

/// The RIM on the orbit class `class_index` (index into the envelope's
/// orbit classes), pushed forward from the least class point of each fiber.
pub fn construct_rim(env: &Envelope, space: &FiberedSpace, class_index: usize) -> Result<Rim> {
    construct_rim_from(env, space, class_index, |points| points[0])
}

/// As [`construct_rim`], with `choose` picking `x_u` from the class points
/// over `u` (given in increasing order).
pub fn construct_rim_from(
    env: &Envelope,
    space: &FiberedSpace,
    class_index: usize,
    mut choose: impl FnMut(&[usize]) -> usize,
) -> Result<Rim> {
    require_groupoid(env)?;
    let class = env
        .classification()
        .orbit_classes
        .get(class_index)
        .ok_or_else(|| Error::Mismatch(format!("no orbit class {class_index}")))?
        .clone();
    let iso = isotropy_maps(env, space.base_count());
    let mut over: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &x in &class {
        over.entry(space.q(x)).or_default().push(x);
    }
    let mut weights = BTreeMap::new();
    for (u, points) in over {
        let x = choose(&points);
        if !points.contains(&x) {
            return Err(Error::Mismatch(format!("chosen point {x} is not in the class over {u}")));
        }
        let n = iso[u].len() as i64;
        let mut w: BTreeMap<usize, Rational64> = BTreeMap::new();
        for m in &iso[u] {
            *w.entry(m.apply(space, x)).or_insert_with(Rational64::zero) += Rational64::new(1, n);
        }
        weights.insert(u, w);
    }
    Ok(Rim { class, weights })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum RimViolation {
    /// A weight sits on a point outside the fiber of its base point.
    OutsideFiber { base: usize, point: usize },
    Negative { base: usize, point: usize },
    /// `q_*μ_u ≠ δ_u`: total mass over `u` is not one.
    Mass { base: usize, total: String },
    GeneratorInvariance { map: String },
    EnvelopeInvariance { map: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RimReport {
    pub violations: Vec<RimViolation>,
    /// `supp μ_u` equals the class points over `u` for every `u`.
    pub full_support: bool,
}

impl RimReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pushforward(m: &FiberMap, rim: &Rim, space: &FiberedSpace) -> BTreeMap<usize, Rational64> {
    let mut out: BTreeMap<usize, Rational64> = BTreeMap::new();
    for (x, y) in m.graph(space) {
        let w = rim.weight(m.src(), x);
        if !w.is_zero() {
            *out.entry(y).or_insert_with(Rational64::zero) += w;
        }
    }
    out
}

fn invariant_under(m: &FiberMap, rim: &Rim, space: &FiberedSpace) -> bool {
    if !rim.weights.contains_key(&m.src()) {
        return true;
    }
    let pushed = pushforward(m, rim, space);
    let target: BTreeMap<usize, Rational64> = rim
        .weights
        .get(&m.dst())
        .map(|w| w.iter().filter(|(_, p)| !p.is_zero()).map(|(&x, &p)| (x, p)).collect())
        .unwrap_or_default();
    pushed == target
}

/// Checks `q_*μ_u = δ_u`, `θ_*μ_{src θ} = μ_{dst θ}` for the generators and
/// for every envelope map, and full support on the class.
pub fn validate_rim(rim: &Rim, env: &Envelope, space: &FiberedSpace) -> RimReport {
    let mut violations = Vec::new();
    for (&u, w) in &rim.weights {
        let mut total = Rational64::zero();
        for (&x, &p) in w {
            if u >= space.base_count() || x >= space.point_count() || space.q(x) != u {
                violations.push(RimViolation::OutsideFiber { base: u, point: x });
            }
            if p < Rational64::zero() {
                violations.push(RimViolation::Negative { base: u, point: x });
            }
            total += p;
        }
        if total != Rational64::new(1, 1) {
            violations.push(RimViolation::Mass {
                base: u,
                total: rational_string(&total),
            });
        }
    }
    if !violations.is_empty() {
        return RimReport {
            violations,
            full_support: false,
        };
    }
    for g in env.generators() {
        if !invariant_under(g, rim, space) {
            violations.push(RimViolation::GeneratorInvariance { map: g.to_string() });
        }
    }
    for m in env.maps() {
        if !invariant_under(m, rim, space) {
            violations.push(RimViolation::EnvelopeInvariance { map: m.to_string() });
        }
    }
    let full_support = rim.weights.keys().all(|&u| {
        let trace: Vec<usize> = rim.class.iter().copied().filter(|&x| space.q(x) == u).collect();
        rim.support(u) == trace
    });
    RimReport {
        violations,
        full_support,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub unique: bool,
    /// Number of extremal RIMs: one choice of orbit class above each base class.
    pub extremal_count: usize,
    pub base_classes: Vec<Vec<usize>>,
    /// Orbit classes on `K` grouped by the base class they lie over.
    pub classes_per_base_class: Vec<usize>,
    pub note: String,
}

/// A RIM is a family over all base points, so it is unique iff every base
/// class carries a single orbit class. Otherwise the extremal ones pick one
/// class above each base class, and mixtures whose coefficients are constant
/// on base classes are RIMs too.
pub fn uniqueness_report(env: &Envelope, space: &FiberedSpace) -> UniquenessReport {
    let mut uf = UnionFind::new(space.base_count());
    for m in env.maps() {
        uf.union(m.src(), m.dst());
    }
    let base_classes = uf.classes();
    let mut per = vec![0usize; base_classes.len()];
    let label_of: Vec<usize> = uf.labels();
    for class in &env.classification().orbit_classes {
        per[label_of[space.q(class[0])]] += 1;
    }
    let extremal_count = per.iter().product();
    let unique = per.iter().all(|&c| c == 1);
    let note = if unique {
        "unique and fully supported".to_string()
    } else {
        format!(
            "{extremal_count} extremal RIMs; convex combinations with coefficients constant on \
             base classes are RIMs as well"
        )
    };
    UniquenessReport {
        unique,
        extremal_count,
        base_classes,
        classes_per_base_class: per,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Metric;
    use crate::envelope::{close, CloseOptions};

    fn cycle_over_point(n: usize) -> FiberedSpace {
        FiberedSpace::new(
            vec!["*".into()],
            (0..n).map(|i| i.to_string()).collect(),
            vec![0; n],
            Metric::from_fn(n, |a, b| {
                let d = a.abs_diff(b);
                d.min(n - d) as f64
            }),
            Metric::from_fn(1, |_, _| 0.0),
        )
        .unwrap()
    }

    fn rotation(space: &FiberedSpace, n: usize, k: usize) -> FiberMap {
        FiberMap::from_fn(space, 0, 0, |x| (x + k) % n).unwrap()
    }

    #[test]
    fn full_rotation_is_uniform() {
        let space = cycle_over_point(5);
        let env = close(&[rotation(&space, 5, 1)], &space, CloseOptions::default()).unwrap();
        let rim = construct_rim(&env, &space, 0).unwrap();
        for x in 0..5 {
            assert_eq!(rim.weight(0, x), Rational64::new(1, 5));
        }
        let report = validate_rim(&rim, &env, &space);
        assert!(report.is_valid() && report.full_support);
        assert!(uniqueness_report(&env, &space).unique);
    }

    #[test]
    fn non_orbit_uniform_weights_break_invariance() {
        let space = cycle_over_point(4);
        let env = close(&[rotation(&space, 4, 2)], &space, CloseOptions::default()).unwrap();
        assert_eq!(env.classification().orbit_classes, vec![vec![0, 2], vec![1, 3]]);
        let mut weights = BTreeMap::new();
        weights.insert(
            0,
            BTreeMap::from([(0, Rational64::new(1, 3)), (2, Rational64::new(2, 3))]),
        );
        let rim = Rim {
            class: vec![0, 2],
            weights,
        };
        let report = validate_rim(&rim, &env, &space);
        assert!(matches!(
            report.violations[0],
            RimViolation::GeneratorInvariance { .. }
        ));
        let u = uniqueness_report(&env, &space);
        assert!(!u.unique);
        assert_eq!(u.extremal_count, 2);
    }

    #[test]
    fn weight_outside_fiber_is_structural() {
        let space = FiberedSpace::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![0, 1],
            Metric::from_fn(2, |_, _| 1.0),
            Metric::from_fn(2, |_, _| 1.0),
        )
        .unwrap();
        let env = close(&[FiberMap::identity(&space, 0)], &space, CloseOptions::default()).unwrap();
        let rim = Rim {
            class: vec![0],
            weights: BTreeMap::from([(0, BTreeMap::from([(1, Rational64::new(1, 1))]))]),
        };
        let report = validate_rim(&rim, &env, &space);
        assert_eq!(
            report.violations,
            vec![RimViolation::OutsideFiber { base: 0, point: 1 }]
        );
    }

    #[test]
    fn non_groupoid_is_rejected() {
        let space = cycle_over_point(3);
        let collapse = FiberMap::new(&space, 0, 0, vec![0, 0, 0]).unwrap();
        let env = close(&[collapse], &space, CloseOptions::default()).unwrap();
        assert!(matches!(construct_rim(&env, &space, 0), Err(Error::NotGroupoid(_))));
    }
}
