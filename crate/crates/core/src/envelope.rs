//! Enveloping semigroupoids of fiber maps.
//!
//! [`close`] computes the least set of fiber maps that contains the
//! generators and is closed under two monotone rules:
//!
//! - composition: `θ₂ ∘ θ₁` whenever `dst(θ₁) = src(θ₂)`;
//! - the ε-limit rule (only for `ε > 0`): for `θ` and a base point `b` with
//!   `d_L(dst(θ), b) ≤ ε`, add the map `θ*: K_{src(θ)} → K_b` sending each `x`
//!   to the point of `K_b` nearest to `θ(x)`, provided that point lies within
//!   `ε`. Distance ties go to the least point index.
//!
//! On a finite space there are no nontrivial limits, so the ε-limit rule is a
//! deterministic over-approximation of topological closure. Selecting the
//! nearest point (rather than any point within ε) makes the result monotone
//! in ε: a witness that exists at ε₁ is the same map at every ε₂ ≥ ε₁.
//!
//! Maps are identified by their graphs. The result is sorted, so it does not
//! depend on the order in which candidates were found.

use std::collections::HashMap;
use std::fmt;

use indexmap::{Equivalent, IndexSet};
use serde::Serialize;

use crate::action::{FiberedSpace, GroupoidAction};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// A map between two fibers, `K_src → K_dst`, stored as the images of the
/// source fiber's points in fiber order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberMap {
    src: usize,
    dst: usize,
    image: Vec<usize>,
}

impl FiberMap {
    pub fn new(space: &FiberedSpace, src: usize, dst: usize, image: Vec<usize>) -> Result<Self> {
        if src >= space.base_count() || dst >= space.base_count() {
            return Err(Error::Structural(format!("fiber map {src}->{dst}: base out of range")));
        }
        if image.len() != space.fiber(src).len() {
            return Err(Error::Structural(format!(
                "fiber map {src}->{dst} has {} images for a fiber of size {}",
                image.len(),
                space.fiber(src).len()
            )));
        }
        if let Some(&y) = image
            .iter()
            .find(|&&y| y >= space.point_count() || space.q(y) != dst)
        {
            return Err(Error::Structural(format!(
                "fiber map {src}->{dst} sends a point to {y}, outside the target fiber"
            )));
        }
        Ok(FiberMap { src, dst, image })
    }

    pub(crate) fn new_unchecked(src: usize, dst: usize, image: Vec<usize>) -> Self {
        FiberMap { src, dst, image }
    }

    /// Restriction of a global point map to the fiber over `b`. The map must
    /// send the whole fiber into a single fiber.
    pub fn from_point_map(space: &FiberedSpace, b: usize, f: &[usize]) -> Self {
        let image: Vec<usize> = space.fiber(b).iter().map(|&x| f[x]).collect();
        let dst = space.q(image[0]);
        debug_assert!(image.iter().all(|&y| space.q(y) == dst));
        FiberMap { src: b, dst, image }
    }

    pub fn from_fn(
        space: &FiberedSpace,
        src: usize,
        dst: usize,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let image = space.fiber(src).iter().map(|&x| f(x)).collect();
        Self::new(space, src, dst, image)
    }

    pub fn identity(space: &FiberedSpace, b: usize) -> Self {
        FiberMap {
            src: b,
            dst: b,
            image: space.fiber(b).to_vec(),
        }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `θ(x)` for `x` in the source fiber.
    pub fn apply(&self, space: &FiberedSpace, x: usize) -> usize {
        debug_assert_eq!(space.q(x), self.src);
        self.image[space.local_index(x)]
    }

    /// The graph `{(x, θ(x))}`.
    pub fn graph<'a>(&'a self, space: &'a FiberedSpace) -> impl Iterator<Item = (usize, usize)> + 'a {
        space.fiber(self.src).iter().copied().zip(self.image.iter().copied())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FiberMap, space: &FiberedSpace) -> FiberMap {
        debug_assert_eq!(first.dst, self.src);
        FiberMap {
            src: first.src,
            dst: self.dst,
            image: first.image.iter().map(|&y| self.image[space.local_index(y)]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.image.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_bijective(&self, space: &FiberedSpace) -> bool {
        self.is_injective() && self.image.len() == space.fiber(self.dst).len()
    }

    pub fn inverse(&self, space: &FiberedSpace) -> Option<FiberMap> {
        if !self.is_bijective(space) {
            return None;
        }
        let mut image = vec![0; self.image.len()];
        for (&x, &y) in space.fiber(self.src).iter().zip(&self.image) {
            image[space.local_index(y)] = x;
        }
        Some(FiberMap {
            src: self.dst,
            dst: self.src,
            image,
        })
    }

    pub fn is_identity(&self, space: &FiberedSpace) -> bool {
        self.src == self.dst && self.image == space.fiber(self.src)
    }
}

impl fmt::Display for FiberMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}:{:?}", self.src, self.dst, self.image)
    }
}

/// Borrowed form of a [`FiberMap`] with the same hash.
#[derive(Hash)]
struct MapView<'a> {
    src: usize,
    dst: usize,
    image: &'a [usize],
}

impl Equivalent<FiberMap> for MapView<'_> {
    fn equivalent(&self, key: &FiberMap) -> bool {
        self.src == key.src && self.dst == key.dst && self.image == key.image.as_slice()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloseOptions {
    pub epsilon: f64,
    /// Maximum number of maps before giving up with [`Error::CapExceeded`].
    pub cap: usize,
}

impl Default for CloseOptions {
    fn default() -> Self {
        CloseOptions {
            epsilon: 0.0,
            cap: 1_000_000,
        }
    }
}

impl CloseOptions {
    pub fn with_epsilon(epsilon: f64) -> Self {
        CloseOptions {
            epsilon,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnvelopeClass {
    pub is_groupoid: bool,
    pub is_transitive: bool,
    pub is_fiberwise_transitive: bool,
    pub all_injective: bool,
    pub orbit_classes: Vec<Vec<usize>>,
}

/// A composition-closed (and, for `ε > 0`, ε-closed) set of fiber maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    maps: Vec<FiberMap>,
    generators: Vec<FiberMap>,
    epsilon: f64,
    classification: EnvelopeClass,
}

impl Envelope {
    pub fn maps(&self) -> &[FiberMap] {
        &self.maps
    }

    pub fn generators(&self) -> &[FiberMap] {
        &self.generators
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn classification(&self) -> &EnvelopeClass {
        &self.classification
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn contains(&self, m: &FiberMap) -> bool {
        self.maps.binary_search(m).is_ok()
    }

    pub fn maps_from(&self, b: usize) -> impl Iterator<Item = &FiberMap> {
        self.maps.iter().filter(move |m| m.src == b)
    }

    /// First map that is not injective.
    pub fn non_injective_witness(&self) -> Option<&FiberMap> {
        self.maps.iter().find(|m| !m.is_injective())
    }

    pub fn is_subset_of(&self, other: &Envelope) -> bool {
        self.maps.iter().all(|m| other.contains(m))
    }
}

/// Nearest point of `K_b` to each `θ(x)`, within `eps`.
fn epsilon_witness(space: &FiberedSpace, theta: &FiberMap, b: usize, eps: f64) -> Option<FiberMap> {
    let tol = space.tol();
    let mut image = Vec::with_capacity(theta.image.len());
    for &y in &theta.image {
        let mut best: Option<(f64, usize)> = None;
        for &z in space.fiber(b) {
            let d = space.d_k(y, z);
            if d > eps + tol {
                continue;
            }
            match best {
                Some((bd, _)) if d >= bd - tol => {}
                _ => best = Some((d, z)),
            }
        }
        image.push(best?.1);
    }
    Some(FiberMap {
        src: theta.src,
        dst: b,
        image,
    })
}

/// Least fixpoint of the composition and ε-limit rules above the generators.
pub fn close(generators: &[FiberMap], space: &FiberedSpace, opts: CloseOptions) -> Result<Envelope> {
    if opts.epsilon.is_nan() || opts.epsilon < 0.0 {
        return Err(Error::Spec(format!("epsilon must be nonnegative, got {}", opts.epsilon)));
    }
    for g in generators {
        FiberMap::new(space, g.src, g.dst, g.image.clone())?;
    }
    let nb = space.base_count();
    let near: Vec<Vec<usize>> = if opts.epsilon > 0.0 {
        (0..nb)
            .map(|a| {
                (0..nb)
                    .filter(|&b| b != a && space.d_l(a, b) <= opts.epsilon + space.tol())
                    .collect()
            })
            .collect()
    } else {
        vec![Vec::new(); nb]
    };

    let mut set: IndexSet<FiberMap> = IndexSet::new();
    let mut by_src: Vec<Vec<usize>> = vec![Vec::new(); nb];
    let mut by_dst: Vec<Vec<usize>> = vec![Vec::new(); nb];
    let insert = |m: FiberMap,
                      set: &mut IndexSet<FiberMap>,
                      by_src: &mut Vec<Vec<usize>>,
                      by_dst: &mut Vec<Vec<usize>>|
     -> Result<()> {
        let (s, d) = (m.src, m.dst);
        let (idx, fresh) = set.insert_full(m);
        if fresh {
            by_src[s].push(idx);
            by_dst[d].push(idx);
            if set.len() > opts.cap {
                return Err(Error::CapExceeded {
                    cap: opts.cap,
                    partial: set.len(),
                });
            }
        }
        Ok(())
    };
    for g in generators {
        insert(g.clone(), &mut set, &mut by_src, &mut by_dst)?;
    }

    let mut next = 0;
    let mut fresh = Vec::new();
    let mut scratch = Vec::new();
    // composites are probed through a borrowed view; only new ones allocate
    let mut compose = |second: &FiberMap, first: &FiberMap, set: &IndexSet<FiberMap>, fresh: &mut Vec<FiberMap>| {
        scratch.clear();
        scratch.extend(first.image.iter().map(|&y| second.image[space.local_index(y)]));
        let view = MapView {
            src: first.src,
            dst: second.dst,
            image: &scratch,
        };
        if !set.contains(&view) {
            fresh.push(FiberMap::new_unchecked(first.src, second.dst, scratch.clone()));
        }
    };
    while next < set.len() {
        let theta = set[next].clone();
        for &j in &by_src[theta.dst] {
            compose(&set[j], &theta, &set, &mut fresh);
        }
        for &j in &by_dst[theta.src] {
            compose(&theta, &set[j], &set, &mut fresh);
        }
        for &b in &near[theta.dst] {
            if let Some(w) = epsilon_witness(space, &theta, b, opts.epsilon) {
                fresh.push(w);
            }
        }
        for m in fresh.drain(..) {
            insert(m, &mut set, &mut by_src, &mut by_dst)?;
        }
        next += 1;
    }

    let mut maps: Vec<FiberMap> = set.into_iter().collect();
    maps.sort();
    let mut generators = generators.to_vec();
    generators.sort();
    generators.dedup();
    let classification = classify_maps(&maps, space);
    Ok(Envelope {
        maps,
        generators,
        epsilon: opts.epsilon,
        classification,
    })
}

fn classify_maps(maps: &[FiberMap], space: &FiberedSpace) -> EnvelopeClass {
    let nb = space.base_count();
    let sorted_lookup = |m: &FiberMap| maps.binary_search(m).is_ok();
    let all_injective = maps.iter().all(FiberMap::is_injective);
    let is_groupoid = maps.iter().all(|m| m.inverse(space).is_some_and(|inv| sorted_lookup(&inv)));
    let mut arrows = vec![false; nb * nb];
    for m in maps {
        arrows[m.src * nb + m.dst] = true;
    }
    let is_transitive = arrows.iter().all(|&a| a);
    let mut reach: Vec<Vec<bool>> = (0..nb)
        .map(|b| {
            let n = space.fiber(b).len();
            let mut r = vec![false; n * n];
            for i in 0..n {
                r[i * n + i] = true;
            }
            r
        })
        .collect();
    let mut uf = UnionFind::new(space.point_count());
    for m in maps {
        let n = space.fiber(m.src).len();
        for (&x, &y) in space.fiber(m.src).iter().zip(&m.image) {
            uf.union(x, y);
            if m.src == m.dst {
                reach[m.src][space.local_index(x) * n + space.local_index(y)] = true;
            }
        }
    }
    let is_fiberwise_transitive = reach.iter().all(|r| r.iter().all(|&v| v));
    EnvelopeClass {
        is_groupoid,
        is_transitive,
        is_fiberwise_transitive,
        all_injective,
        orbit_classes: uf.classes(),
    }
}

/// Recomputes the classification flags of an envelope.
pub fn classify_envelope(env: &Envelope, space: &FiberedSpace) -> EnvelopeClass {
    classify_maps(&env.maps, space)
}

/// `{φ_g|_{K_{src(g)}}}` with duplicate graphs merged, sorted.
pub fn transition_maps(a: &GroupoidAction) -> Vec<FiberMap> {
    let mut maps: Vec<FiberMap> = a.groupoid().elements().map(|g| a.fiber_map(g)).collect();
    maps.sort();
    maps.dedup();
    maps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricConstruction {
    /// `p'(x, y) = max_θ d(θx, θy)` over envelope maps leaving `q(x)` and
    /// the identity. Invariant whenever the envelope is a groupoid.
    Sup,
    /// `p'(x, y) = [x ≠ y]`. Invariant under any family of injective maps;
    /// used when the sup form is not.
    Discrete,
}

/// An invariant fiberwise metric, or a non-injective map showing that none
/// exists (no metric survives a map that identifies two points).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoisometryCertificate {
    pub verdict: bool,
    pub construction: Option<MetricConstruction>,
    /// Per base point: the `|K_b| × |K_b|` table of `p'` in fiber order.
    pub table: Vec<Vec<Vec<f64>>>,
    /// A non-injective map.
    pub witness: Option<String>,
    /// A map under which the sup form is not invariant, if any.
    pub sup_breaker: Option<String>,
}

impl PseudoisometryCertificate {
    pub fn value(&self, space: &FiberedSpace, x: usize, y: usize) -> f64 {
        self.table[space.q(x)][space.local_index(x)][space.local_index(y)]
    }
}

fn invariance_breaker(env: &Envelope, space: &FiberedSpace, table: &[Vec<Vec<f64>>]) -> Option<String> {
    for m in env.maps() {
        let n = space.fiber(m.src).len();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (m.image[i], m.image[j]);
                if table[m.dst][space.local_index(x)][space.local_index(y)] != table[m.src][i][j] {
                    return Some(m.to_string());
                }
            }
        }
    }
    None
}

pub fn pseudoisometry_certificate(env: &Envelope, space: &FiberedSpace) -> PseudoisometryCertificate {
    if let Some(w) = env.non_injective_witness() {
        return PseudoisometryCertificate {
            verdict: false,
            construction: None,
            table: Vec::new(),
            witness: Some(w.to_string()),
            sup_breaker: None,
        };
    }
    let mut table: Vec<Vec<Vec<f64>>> = (0..space.base_count())
        .map(|b| {
            let f = space.fiber(b);
            f.iter().map(|&x| f.iter().map(|&y| space.d_k(x, y)).collect()).collect()
        })
        .collect();
    for m in env.maps() {
        let n = space.fiber(m.src).len();
        for i in 0..n {
            for j in 0..n {
                let d = space.d_k(m.image[i], m.image[j]);
                let cell = &mut table[m.src][i][j];
                if d > *cell {
                    *cell = d;
                }
            }
        }
    }
    let sup_breaker = invariance_breaker(env, space, &table);
    let construction = if sup_breaker.is_none() {
        MetricConstruction::Sup
    } else {
        table = (0..space.base_count())
            .map(|b| {
                let n = space.fiber(b).len();
                (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect()
            })
            .collect();
        debug_assert!(invariance_breaker(env, space, &table).is_none());
        MetricConstruction::Discrete
    };
    PseudoisometryCertificate {
        verdict: true,
        construction: Some(construction),
        table,
        witness: None,
        sup_breaker,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equicontinuity {
    Stable,
    Degrading,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusRow {
    pub resolution: Vec<usize>,
    /// Realized same-fiber distances, increasing.
    pub deltas: Vec<f64>,
    /// `ω(δ)` for each realized `δ`.
    pub omega: Vec<f64>,
    /// `ω(δ₁) / δ₁` at the finest realized distance.
    pub finest_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusTable {
    pub rows: Vec<ModulusRow>,
    /// Largest finest-scale ratio relative to the first resolution.
    pub growth: f64,
    pub verdict: Equicontinuity,
}

/// Modulus of continuity of the envelope (plus the identity) on the realized
/// same-fiber distances.
pub fn modulus_profile(env: &Envelope, space: &FiberedSpace) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut spread: Vec<(f64, f64)> = Vec::new();
    let mut from: Vec<Vec<&FiberMap>> = vec![Vec::new(); space.base_count()];
    for m in env.maps() {
        from[m.src].push(m);
    }
    for b in 0..space.base_count() {
        let f = space.fiber(b);
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                let delta = space.d_k(f[i], f[j]);
                let s = from[b]
                    .iter()
                    .map(|m| space.d_k(m.image[i], m.image[j]))
                    .fold(delta, f64::max);
                spread.push((delta, s));
            }
        }
    }
    if spread.is_empty() {
        return Err(Error::Spec("every fiber is a single point; no modulus to tabulate".into()));
    }
    spread.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let tol = space.tol();
    let (mut deltas, mut omega): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut running = 0.0f64;
    for (delta, s) in spread {
        running = running.max(s);
        match deltas.last() {
            Some(&last) if delta - last <= tol * last.max(1.0) => {
                *omega.last_mut().expect("paired") = running;
            }
            _ => {
                deltas.push(delta);
                omega.push(running);
            }
        }
    }
    Ok((deltas, omega))
}

/// Cross-resolution equicontinuity diagnostic. `build` produces the space
/// and envelope at one resolution. The verdict compares `ω(δ₁)/δ₁` at the
/// finest realized distance: stable if it never exceeds twice its value at
/// the first resolution.
pub fn modulus_table<F>(resolutions: &[Vec<usize>], mut build: F) -> Result<ModulusTable>
where
    F: FnMut(&[usize]) -> Result<(FiberedSpace, Envelope)>,
{
    if resolutions.len() < 2 {
        return Err(Error::Spec("modulus table needs at least two resolutions".into()));
    }
    let mut rows = Vec::with_capacity(resolutions.len());
    for res in resolutions {
        let (space, env) = build(res)?;
        let (deltas, omega) = modulus_profile(&env, &space)?;
        rows.push(ModulusRow {
            resolution: res.clone(),
            finest_ratio: omega[0] / deltas[0],
            deltas,
            omega,
        });
    }
    let first = rows[0].finest_ratio;
    let growth = rows.iter().map(|r| r.finest_ratio / first).fold(0.0, f64::max);
    Ok(ModulusTable {
        rows,
        growth,
        verdict: if growth <= 2.0 + 1e-9 {
            Equicontinuity::Stable
        } else {
            Equicontinuity::Degrading
        },
    })
}

/// A morphism of fibered spaces: a point map and the base map it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorMap {
    pub points: Vec<usize>,
    pub base: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pushforward {
    pub envelope: Envelope,
    /// The images `Φ_p(θ)` were already closed.
    pub fixpoint: bool,
    pub units_bijective: bool,
}

/// `Φ_p(θ) : p(x) ↦ p(θx)` for every envelope map.
pub fn pushforward_envelope(
    env: &Envelope,
    from: &FiberedSpace,
    to: &FiberedSpace,
    p: &FactorMap,
) -> Result<Pushforward> {
    if p.points.len() != from.point_count() || p.base.len() != from.base_count() {
        return Err(Error::Mismatch("factor map sizes do not match the source space".into()));
    }
    if p.points.iter().any(|&z| z >= to.point_count()) || p.base.iter().any(|&b| b >= to.base_count()) {
        return Err(Error::Mismatch("factor map leaves the target space".into()));
    }
    if let Some(x) = (0..from.point_count()).find(|&x| to.q(p.points[x]) != p.base[from.q(x)]) {
        return Err(Error::Mismatch(format!("factor map does not cover the base map at point {x}")));
    }
    for u in 0..from.base_count() {
        let covered = to
            .fiber(p.base[u])
            .iter()
            .all(|z| from.fiber(u).iter().any(|&x| p.points[x] == *z));
        if !covered {
            return Err(Error::Mismatch(format!("fiber over base {u} does not cover its image fiber")));
        }
    }
    let mut images = Vec::with_capacity(env.len());
    for m in env.maps() {
        let (src, dst) = (p.base[m.src], p.base[m.dst]);
        let mut assigned: HashMap<usize, usize> = HashMap::new();
        for (x, y) in m.graph(from) {
            let (px, py) = (p.points[x], p.points[y]);
            if let Some(prev) = assigned.insert(px, py) {
                if prev != py {
                    return Err(Error::NonDescending(format!("{m} at point {x}")));
                }
            }
        }
        let image = to.fiber(src).iter().map(|z| assigned[z]).collect();
        images.push(FiberMap::new(to, src, dst, image)?);
    }
    images.sort();
    images.dedup();
    let envelope = close(&images, to, CloseOptions::default())?;
    let mut seen = vec![false; to.base_count()];
    let units_bijective = from.base_count() == to.base_count()
        && p.base.iter().all(|&b| !std::mem::replace(&mut seen[b], true));
    Ok(Pushforward {
        fixpoint: envelope.maps() == images.as_slice(),
        envelope,
        units_bijective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Metric;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn line_over_point(n: usize) -> FiberedSpace {
        FiberedSpace::new(
            labels(1),
            labels(n),
            vec![0; n],
            Metric::from_fn(n, |a, b| a.abs_diff(b) as f64),
            Metric::from_fn(1, |_, _| 0.0),
        )
        .unwrap()
    }

    #[test]
    fn idempotent_self_map() {
        let space = line_over_point(4);
        let f = FiberMap::new(&space, 0, 0, vec![0, 0, 1, 1]).unwrap();
        let env = close(std::slice::from_ref(&f), &space, CloseOptions::default()).unwrap();
        // f∘f = (0,0,0,0), f∘f∘f = f∘f
        let ff = f.after(&f, &space);
        assert_eq!(ff.image(), &[0, 0, 0, 0]);
        assert!(env.contains(&f) && env.contains(&ff));
        assert_eq!(env.len(), 2);
        assert!(!env.classification().all_injective);
        assert!(!env.classification().is_groupoid);
    }

    #[test]
    fn idempotent_projection_closes_to_itself() {
        let space = line_over_point(4);
        let f = FiberMap::new(&space, 0, 0, vec![0, 0, 2, 2]).unwrap();
        assert_eq!(f.after(&f, &space), f);
        let env = close(std::slice::from_ref(&f), &space, CloseOptions::default()).unwrap();
        assert_eq!(env.maps(), std::slice::from_ref(&f));
    }

    #[test]
    fn rejects_map_outside_target_fiber() {
        let space = FiberedSpace::new(
            labels(2),
            labels(2),
            vec![0, 1],
            Metric::from_fn(2, |_, _| 1.0),
            Metric::from_fn(2, |_, _| 1.0),
        )
        .unwrap();
        assert!(FiberMap::new(&space, 0, 1, vec![0]).is_err());
        assert!(FiberMap::new(&space, 0, 1, vec![1]).is_ok());
    }

    #[test]
    fn cap_is_enforced() {
        let space = line_over_point(6);
        let shift = FiberMap::new(&space, 0, 0, vec![1, 2, 3, 4, 5, 0]).unwrap();
        let err = close(
            &[shift],
            &space,
            CloseOptions {
                epsilon: 0.0,
                cap: 3,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 3, .. }));
    }

    #[test]
    fn identity_only_certificate_is_the_metric() {
        let space = line_over_point(3);
        let env = close(&[FiberMap::identity(&space, 0)], &space, CloseOptions::default()).unwrap();
        let cert = pseudoisometry_certificate(&env, &space);
        assert!(cert.verdict);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(cert.value(&space, x, y), space.d_k(x, y));
            }
        }
    }

    #[test]
    fn epsilon_rule_picks_nearest_with_least_index_ties() {
        // base {a, b} at distance 1; fiber over b has two points equidistant
        // from the single point over a
        let space = FiberedSpace::new(
            labels(2),
            labels(3),
            vec![0, 1, 1],
            Metric::from_rows(&[
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 2.0],
                vec![1.0, 2.0, 0.0],
            ])
            .unwrap(),
            Metric::from_fn(2, |_, _| 1.0),
        )
        .unwrap();
        let id = FiberMap::identity(&space, 0);
        let env = close(std::slice::from_ref(&id), &space, CloseOptions::with_epsilon(1.0)).unwrap();
        let w = FiberMap::new(&space, 0, 1, vec![1]).unwrap();
        assert!(env.contains(&w));
        assert!(!env.contains(&FiberMap::new(&space, 0, 1, vec![2]).unwrap()));
        let small = close(&[id], &space, CloseOptions::with_epsilon(0.5)).unwrap();
        assert_eq!(small.len(), 1);
    }
}
