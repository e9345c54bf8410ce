//! Finite groupoids as dense composition tables.
//!
//! Elements are dense integer ids; the partial product is a dense
//! `|G| × |G|` table where `None` marks an undefined product. A candidate
//! table ([`GroupoidTable`]) is only structurally checked; [`validate_groupoid`]
//! checks the axioms and [`FiniteGroupoid`] is the validated form.
//!
//! Units are kept in a fixed order. The position of a unit in that order is its
//! *base index*, which is how groupoid units get identified with base points of
//! a fibered space.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::unionfind::UnionFind;

pub type ElementId = usize;

/// An unvalidated groupoid table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidTable {
    pub labels: Vec<String>,
    pub units: Vec<ElementId>,
    pub src: Vec<ElementId>,
    pub rng: Vec<ElementId>,
    pub product: Vec<Option<ElementId>>,
    pub inverse: Vec<ElementId>,
}

impl GroupoidTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, g: ElementId, h: ElementId) -> Option<ElementId> {
        self.product[g * self.len() + h]
    }

    pub fn set(&mut self, g: ElementId, h: ElementId, value: Option<ElementId>) {
        let n = self.len();
        self.product[g * n + h] = value;
    }

    /// Structural checks only: lengths and index ranges.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.len();
        let expect = |name: &str, len: usize| {
            if len != n {
                Err(Error::Structural(format!(
                    "`{name}` has length {len}, expected {n}"
                )))
            } else {
                Ok(())
            }
        };
        expect("src", self.src.len())?;
        expect("rng", self.rng.len())?;
        expect("inverse", self.inverse.len())?;
        if self.product.len() != n * n {
            return Err(Error::Structural("product table has the wrong size".into()));
        }
        for (name, col) in [("src", &self.src), ("rng", &self.rng), ("inverse", &self.inverse)] {
            if let Some((g, &v)) = col.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(Error::Structural(format!(
                    "{name}({g}) = {v} is not an element"
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for &u in &self.units {
            if u >= n {
                return Err(Error::Structural(format!("unit {u} is not an element")));
            }
            if !seen.insert(u) {
                return Err(Error::Structural(format!("unit {u} listed twice")));
            }
        }
        for (i, entry) in self.product.iter().enumerate() {
            if let Some(k) = *entry {
                if k >= n {
                    return Err(Error::Structural(format!(
                        "product ({}, {}) = {k} is not an element",
                        i / n,
                        i % n
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One failed axiom with its witnessing elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    /// `src(g)` or `rng(g)` is not a unit.
    EndpointNotUnit { element: ElementId },
    /// A unit whose source or range is not itself.
    UnitEndpoints { unit: ElementId },
    /// Product defined on a pair that is not composable.
    ProductDomain { g: ElementId, h: ElementId },
    /// Composable pair without a product.
    MissingProduct { g: ElementId, h: ElementId },
    /// `src(gh) != src(h)` or `rng(gh) != rng(g)`.
    ProductEndpoints { g: ElementId, h: ElementId },
    Associativity { g: ElementId, h: ElementId, k: ElementId },
    UnitLaw { element: ElementId },
    Inverse { element: ElementId },
    /// The declared units differ from `{g⁻¹g}` at this element.
    UnitSet { element: ElementId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every groupoid axiom on a candidate table. Structural problems
/// are returned as `Err`, axiom failures as report entries.
pub fn validate_groupoid(t: &GroupoidTable) -> Result<ValidationReport> {
    t.check_structure()?;
    let n = t.len();
    let units: BTreeSet<ElementId> = t.units.iter().copied().collect();
    let mut v = Vec::new();

    for g in 0..n {
        if !units.contains(&t.src[g]) || !units.contains(&t.rng[g]) {
            v.push(Violation::EndpointNotUnit { element: g });
        }
    }
    for &u in &t.units {
        if t.src[u] != u || t.rng[u] != u {
            v.push(Violation::UnitEndpoints { unit: u });
        }
    }
    for g in 0..n {
        for h in 0..n {
            let composable = t.src[g] == t.rng[h];
            match (composable, t.get(g, h)) {
                (false, Some(_)) => v.push(Violation::ProductDomain { g, h }),
                (true, None) => v.push(Violation::MissingProduct { g, h }),
                (true, Some(gh)) => {
                    if t.src[gh] != t.src[h] || t.rng[gh] != t.rng[g] {
                        v.push(Violation::ProductEndpoints { g, h });
                    }
                }
                (false, None) => {}
            }
        }
    }
    for g in 0..n {
        for h in 0..n {
            if t.src[g] != t.rng[h] {
                continue;
            }
            for k in 0..n {
                if t.src[h] != t.rng[k] {
                    continue;
                }
                let left = t.get(g, h).and_then(|gh| t.get(gh, k));
                let right = t.get(h, k).and_then(|hk| t.get(g, hk));
                if let (Some(a), Some(b)) = (left, right) {
                    if a != b {
                        v.push(Violation::Associativity { g, h, k });
                    }
                }
            }
        }
    }
    for g in 0..n {
        if t.get(t.rng[g], g) != Some(g) || t.get(g, t.src[g]) != Some(g) {
            v.push(Violation::UnitLaw { element: g });
        }
        let gi = t.inverse[g];
        if t.get(gi, g) != Some(t.src[g]) || t.get(g, gi) != Some(t.rng[g]) {
            v.push(Violation::Inverse { element: g });
        }
    }
    let generated: BTreeSet<ElementId> = (0..n).filter_map(|g| t.get(t.inverse[g], g)).collect();
    for &x in units.symmetric_difference(&generated) {
        v.push(Violation::UnitSet { element: x });
    }
    Ok(ValidationReport { violations: v })
}

/// A validated finite groupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    table: GroupoidTable,
    unit_pos: Vec<Option<usize>>,
}

impl FiniteGroupoid {
    pub fn new(table: GroupoidTable) -> Result<Self> {
        let report = validate_groupoid(&table)?;
        if let Some(first) = report.violations.first() {
            return Err(Error::Invalid {
                what: "groupoid",
                count: report.violations.len(),
                first: format!("{first:?}"),
            });
        }
        let mut unit_pos = vec![None; table.len()];
        for (i, &u) in table.units.iter().enumerate() {
            unit_pos[u] = Some(i);
        }
        Ok(FiniteGroupoid { table, unit_pos })
    }

    pub fn table(&self) -> &GroupoidTable {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn label(&self, g: ElementId) -> &str {
        &self.table.labels[g]
    }

    pub fn units(&self) -> &[ElementId] {
        &self.table.units
    }

    pub fn unit_count(&self) -> usize {
        self.table.units.len()
    }

    pub fn src(&self, g: ElementId) -> ElementId {
        self.table.src[g]
    }

    pub fn rng(&self, g: ElementId) -> ElementId {
        self.table.rng[g]
    }

    /// Base index of `src(g)`.
    pub fn src_base(&self, g: ElementId) -> usize {
        self.unit_pos[self.table.src[g]].expect("validated")
    }

    /// Base index of `rng(g)`.
    pub fn rng_base(&self, g: ElementId) -> usize {
        self.unit_pos[self.table.rng[g]].expect("validated")
    }

    pub fn unit_at(&self, base: usize) -> ElementId {
        self.table.units[base]
    }

    pub fn base_of_unit(&self, u: ElementId) -> Option<usize> {
        self.unit_pos[u]
    }

    pub fn product(&self, g: ElementId, h: ElementId) -> Option<ElementId> {
        self.table.get(g, h)
    }

    pub fn inverse(&self, g: ElementId) -> ElementId {
        self.table.inverse[g]
    }

    pub fn elements(&self) -> std::ops::Range<ElementId> {
        0..self.len()
    }

    /// The isotropy group `𝒢ᵤᵘ` at a base index, with its element ids in
    /// increasing order; group element `i` is `ids[i]`.
    pub fn isotropy_group(&self, base: usize) -> (FiniteGroup, Vec<ElementId>) {
        let u = self.unit_at(base);
        let ids: Vec<ElementId> = self
            .elements()
            .filter(|&g| self.src(g) == u && self.rng(g) == u)
            .collect();
        let pos = |g: ElementId| ids.iter().position(|&x| x == g).expect("closed");
        let table: Vec<Vec<usize>> = ids
            .iter()
            .map(|&a| {
                ids.iter()
                    .map(|&b| pos(self.product(a, b).expect("composable")))
                    .collect()
            })
            .collect();
        let group = FiniteGroup::from_table(&table).expect("isotropy of a groupoid is a group");
        (group, ids)
    }
}

/// Sub-bundle `{g : src(g) = rng(g)}` with the original id of each element.
#[derive(Debug, Clone)]
pub struct IsotropyBundle {
    pub groupoid: FiniteGroupoid,
    pub original: Vec<ElementId>,
}

pub fn isotropy(g: &FiniteGroupoid) -> IsotropyBundle {
    let original: Vec<ElementId> = g.elements().filter(|&x| g.src(x) == g.rng(x)).collect();
    let mut new_id = vec![usize::MAX; g.len()];
    for (i, &x) in original.iter().enumerate() {
        new_id[x] = i;
    }
    let m = original.len();
    let mut product = vec![None; m * m];
    for (i, &a) in original.iter().enumerate() {
        for (j, &b) in original.iter().enumerate() {
            product[i * m + j] = g.product(a, b).map(|c| new_id[c]);
        }
    }
    let table = GroupoidTable {
        labels: original.iter().map(|&x| g.label(x).to_string()).collect(),
        units: g.units().iter().map(|&u| new_id[u]).collect(),
        src: original.iter().map(|&x| new_id[g.src(x)]).collect(),
        rng: original.iter().map(|&x| new_id[g.rng(x)]).collect(),
        product,
        inverse: original.iter().map(|&x| new_id[g.inverse(x)]).collect(),
    };
    IsotropyBundle {
        groupoid: FiniteGroupoid::new(table).expect("isotropy bundle is a groupoid"),
        original,
    }
}

/// The orbit relation on base indices, closed to an equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRelation {
    /// Number of base points.
    pub base: usize,
    pub classes: Vec<Vec<usize>>,
    /// Class index per base point.
    pub labels: Vec<usize>,
    pub closed: bool,
}

impl OrbitRelation {
    pub fn from_pairs(base: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::new(base);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        OrbitRelation {
            base,
            classes: uf.classes(),
            labels: uf.labels(),
            closed: true,
        }
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

pub fn orbit_relation(g: &FiniteGroupoid) -> OrbitRelation {
    OrbitRelation::from_pairs(
        g.unit_count(),
        g.elements().map(|x| (g.rng_base(x), g.src_base(x))),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupoidClass {
    pub is_transitive: bool,
    pub is_group_bundle: bool,
    pub is_abelian: bool,
}

pub fn classify(g: &FiniteGroupoid) -> GroupoidClass {
    let u = g.unit_count();
    let mut arrows = vec![false; u * u];
    for x in g.elements() {
        arrows[g.rng_base(x) * u + g.src_base(x)] = true;
    }
    let is_abelian = (0..u).all(|b| g.isotropy_group(b).0.is_abelian());
    GroupoidClass {
        is_transitive: arrows.iter().all(|&a| a),
        is_group_bundle: g.elements().all(|x| g.src(x) == g.rng(x)),
        is_abelian,
    }
}

// ---------------------------------------------------------------------------
// Constructions

/// Every point is a unit; the only products are `u·u = u`.
pub fn trivial(k: usize) -> FiniteGroupoid {
    let mut product = vec![None; k * k];
    for u in 0..k {
        product[u * k + u] = Some(u);
    }
    let table = GroupoidTable {
        labels: (0..k).map(|u| u.to_string()).collect(),
        units: (0..k).collect(),
        src: (0..k).collect(),
        rng: (0..k).collect(),
        product,
        inverse: (0..k).collect(),
    };
    FiniteGroupoid::new(table).expect("trivial groupoid")
}

/// Pair groupoid on `n` points: element `(i, j)` is the arrow `j → i`.
pub fn pair(n: usize) -> FiniteGroupoid {
    transitive(n, &FiniteGroup::cyclic(1))
}

/// `n × n` pair groupoid times a group: arrows `(i, j, a)` from `j` to `i`,
/// with `(i, j, a)(j, k, b) = (i, k, ab)`. Every finite transitive groupoid
/// is isomorphic to one of these.
pub fn transitive(n: usize, group: &FiniteGroup) -> FiniteGroupoid {
    let m = group.order();
    let size = n * n * m;
    let id = |i: usize, j: usize, a: usize| (i * n + j) * m + a;
    let mut labels = Vec::with_capacity(size);
    let mut src = Vec::with_capacity(size);
    let mut rng = Vec::with_capacity(size);
    let mut inverse = Vec::with_capacity(size);
    let mut product = vec![None; size * size];
    let e = group.identity();
    for i in 0..n {
        for j in 0..n {
            for a in 0..m {
                labels.push(if m == 1 {
                    format!("({i},{j})")
                } else {
                    format!("({i},{j};{a})")
                });
                src.push(id(j, j, e));
                rng.push(id(i, i, e));
                inverse.push(id(j, i, group.inv(a)));
                for k in 0..n {
                    for b in 0..m {
                        product[id(i, j, a) * size + id(j, k, b)] = Some(id(i, k, group.mul(a, b)));
                    }
                }
            }
        }
    }
    let table = GroupoidTable {
        labels,
        units: (0..n).map(|i| id(i, i, e)).collect(),
        src,
        rng,
        product,
        inverse,
    };
    FiniteGroupoid::new(table).expect("pair groupoid times group")
}

/// Disjoint union of groupoid tables; units concatenated in order.
pub fn disjoint_union(parts: &[FiniteGroupoid]) -> FiniteGroupoid {
    let size: usize = parts.iter().map(|p| p.len()).sum();
    let mut table = GroupoidTable {
        labels: Vec::with_capacity(size),
        units: Vec::new(),
        src: Vec::with_capacity(size),
        rng: Vec::with_capacity(size),
        product: vec![None; size * size],
        inverse: Vec::with_capacity(size),
    };
    let mut offset = 0;
    for (p, part) in parts.iter().enumerate() {
        for g in part.elements() {
            table.labels.push(if parts.len() > 1 {
                format!("{p}:{}", part.label(g))
            } else {
                part.label(g).to_string()
            });
            table.src.push(part.src(g) + offset);
            table.rng.push(part.rng(g) + offset);
            table.inverse.push(part.inverse(g) + offset);
            for h in part.elements() {
                if let Some(k) = part.product(g, h) {
                    table.product[(g + offset) * size + h + offset] = Some(k + offset);
                }
            }
        }
        table.units.extend(part.units().iter().map(|&u| u + offset));
        offset += part.len();
    }
    FiniteGroupoid::new(table).expect("disjoint union of groupoids")
}

/// One group per unit, no arrows between distinct units.
pub fn group_bundle(groups: &[FiniteGroup]) -> FiniteGroupoid {
    let parts: Vec<FiniteGroupoid> = groups.iter().map(|g| transitive(1, g)).collect();
    let mut table = disjoint_union(&parts).table;
    let labels = groups
        .iter()
        .enumerate()
        .flat_map(|(u, g)| (0..g.order()).map(move |a| format!("{u}:{a}")));
    for (slot, label) in table.labels.iter_mut().zip(labels) {
        *slot = label;
    }
    FiniteGroupoid::new(table).expect("group bundle")
}

/// Transformation groupoid `G ⋉ X` of a group acting by permutations, where
/// `action[g][x] = g·x`. Element `(g, x)` has id `g·|X| + x`, source `x`
/// and range `g·x`; `((g₂, g₁x), (g₁, x)) ↦ (g₂g₁, x)`.
pub fn from_group_action(group: &FiniteGroup, action: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    if action.len() != group.order() {
        return Err(Error::Structural(format!(
            "action lists {} permutations for a group of order {}",
            action.len(),
            group.order()
        )));
    }
    let nx = action.first().map_or(0, |p| p.len());
    for (g, perm) in action.iter().enumerate() {
        let mut seen = vec![false; nx];
        if perm.len() != nx || perm.iter().any(|&y| y >= nx || std::mem::replace(&mut seen[y], true)) {
            return Err(Error::NotPermutation(format!("action of group element {g}")));
        }
    }
    if action[group.identity()].iter().enumerate().any(|(x, &y)| x != y) {
        return Err(Error::Invalid {
            what: "group action",
            count: 1,
            first: "identity does not act trivially".into(),
        });
    }
    for a in 0..group.order() {
        for b in 0..group.order() {
            let ab = group.mul(a, b);
            if let Some(x) = (0..nx).find(|&x| action[ab][x] != action[a][action[b][x]]) {
                return Err(Error::Invalid {
                    what: "group action",
                    count: 1,
                    first: format!("({a}·{b})·{x} != {a}·({b}·{x})"),
                });
            }
        }
    }
    let ng = group.order();
    let size = ng * nx;
    let id = |g: usize, x: usize| g * nx + x;
    let e = group.identity();
    let mut table = GroupoidTable {
        labels: Vec::with_capacity(size),
        units: (0..nx).map(|x| id(e, x)).collect(),
        src: Vec::with_capacity(size),
        rng: Vec::with_capacity(size),
        product: vec![None; size * size],
        inverse: Vec::with_capacity(size),
    };
    for g in 0..ng {
        for x in 0..nx {
            let gx = action[g][x];
            table.labels.push(format!("({g},{x})"));
            table.src.push(id(e, x));
            table.rng.push(id(e, gx));
            table.inverse.push(id(group.inv(g), gx));
            for g2 in 0..ng {
                table.product[id(g2, gx) * size + id(g, x)] = Some(id(group.mul(g2, g), x));
            }
        }
    }
    FiniteGroupoid::new(table)
}
