//! Groupoid actions on finite fibered spaces.
//!
//! A [`FiberedSpace`] is a finite metric space `K` with a surjection `q` onto a
//! finite metric base `L`. Openness of `q` is automatic for finite discrete
//! spaces and is not checked. A [`GroupoidAction`] lets each groupoid element
//! `g` act as a bijection `K_{src(g)} → K_{rng(g)}`; base point `b` is
//! identified with the groupoid unit at base index `b`.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num::Complex;
use serde::Serialize;

use crate::envelope::{close, CloseOptions, FiberMap};
use crate::error::{Error, Result};
use crate::groupoid::{ElementId, FiniteGroupoid, GroupoidTable};
use crate::linalg::symmetric_rank;
use crate::unionfind::UnionFind;

/// Default tolerance for float comparisons against metric values.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A finite metric as a dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    n: usize,
    d: Vec<f64>,
}

impl Metric {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!("metric row {i} has length {}", row.len())));
            }
            d.extend_from_slice(row);
        }
        Ok(Metric { n, d })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = if i == j { 0.0 } else { f(i, j) };
            }
        }
        Metric { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.d.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    /// First failing metric axiom, checked up to `tol`.
    pub fn violation(&self, tol: f64) -> Option<String> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Some(format!("d({i},{j}) = {v} is not a finite nonnegative number"));
                }
                if (v - self.get(j, i)).abs() > tol {
                    return Some(format!("d({i},{j}) != d({j},{i})"));
                }
                if (i == j) != (v <= tol) {
                    return Some(format!("d({i},{j}) = {v} breaks identity of indiscernibles"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) + tol {
                        return Some(format!("triangle inequality fails at ({i},{j},{k})"));
                    }
                }
            }
        }
        None
    }
}

/// Finite fibered metric space `q : K → L`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedSpace {
    base_labels: Vec<String>,
    point_labels: Vec<String>,
    q: Vec<usize>,
    d_k: Metric,
    d_l: Metric,
    fibers: Vec<Vec<usize>>,
    local: Vec<usize>,
    tol: f64,
}

impl FiberedSpace {
    pub fn new(
        base_labels: Vec<String>,
        point_labels: Vec<String>,
        q: Vec<usize>,
        d_k: Metric,
        d_l: Metric,
    ) -> Result<Self> {
        let (nb, nk) = (base_labels.len(), point_labels.len());
        if q.len() != nk {
            return Err(Error::Structural(format!("q has length {}, expected {nk}", q.len())));
        }
        if d_k.len() != nk || d_l.len() != nb {
            return Err(Error::Structural("metric size does not match point count".into()));
        }
        let mut fibers = vec![Vec::new(); nb];
        let mut local = vec![0; nk];
        for (x, &b) in q.iter().enumerate() {
            if b >= nb {
                return Err(Error::Structural(format!("q({x}) = {b} is not a base point")));
            }
            local[x] = fibers[b].len();
            fibers[b].push(x);
        }
        if let Some(b) = fibers.iter().position(|f| f.is_empty()) {
            return Err(Error::Structural(format!("q is not surjective: fiber over base {b} is empty")));
        }
        let space = FiberedSpace {
            base_labels,
            point_labels,
            q,
            d_k,
            d_l,
            fibers,
            local,
            tol: DEFAULT_TOL,
        };
        for (name, m) in [("d_K", &space.d_k), ("d_L", &space.d_l)] {
            if let Some(msg) = m.violation(space.tol) {
                return Err(Error::Invalid {
                    what: if name == "d_K" { "d_K" } else { "d_L" },
                    count: 1,
                    first: msg,
                });
            }
        }
        Ok(space)
    }

    /// Base identical to the space itself (`q = id`).
    pub fn identity_over(labels: Vec<String>, d: Metric) -> Result<Self> {
        let n = labels.len();
        Self::new(labels.clone(), labels, (0..n).collect(), d.clone(), d)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn base_count(&self) -> usize {
        self.base_labels.len()
    }

    pub fn point_count(&self) -> usize {
        self.point_labels.len()
    }

    pub fn base_labels(&self) -> &[String] {
        &self.base_labels
    }

    pub fn point_labels(&self) -> &[String] {
        &self.point_labels
    }

    pub fn q(&self, x: usize) -> usize {
        self.q[x]
    }

    pub fn q_map(&self) -> &[usize] {
        &self.q
    }

    pub fn fiber(&self, b: usize) -> &[usize] {
        &self.fibers[b]
    }

    /// Position of `x` inside its fiber.
    pub fn local_index(&self, x: usize) -> usize {
        self.local[x]
    }

    pub fn d_k(&self, x: usize, y: usize) -> f64 {
        self.d_k.get(x, y)
    }

    pub fn d_l(&self, a: usize, b: usize) -> f64 {
        self.d_l.get(a, b)
    }

    pub fn metric_k(&self) -> &Metric {
        &self.d_k
    }

    pub fn metric_l(&self) -> &Metric {
        &self.d_l
    }

    /// `q` is open for finite discrete spaces.
    pub fn is_open(&self) -> bool {
        true
    }
}

/// One complex value per point of `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedFunction {
    pub values: Vec<Complex<f64>>,
}

impl FiberedFunction {
    pub fn new(values: Vec<Complex<f64>>) -> Self {
        FiberedFunction { values }
    }

    pub fn zeros(n: usize) -> Self {
        FiberedFunction {
            values: vec![Complex::new(0.0, 0.0); n],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        FiberedFunction {
            values: values.iter().map(|&v| Complex::new(v, 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values on the points of one fiber, in fiber order.
    pub fn restrict(&self, space: &FiberedSpace, b: usize) -> Vec<Complex<f64>> {
        space.fiber(b).iter().map(|&x| self.values[x]).collect()
    }

    pub fn sup_distance(&self, other: &FiberedFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum ActionViolation {
    /// Entry defined although `q(x) != src(g)`.
    Domain { g: ElementId, x: usize },
    /// No entry although `q(x) = src(g)`.
    Missing { g: ElementId, x: usize },
    /// `q(gx) != rng(g)`.
    Fibering { g: ElementId, x: usize },
    /// `(gh)x != g(hx)`.
    Compatibility { g: ElementId, h: ElementId, x: usize },
    /// `ux != x` for a unit.
    UnitAction { unit: ElementId, x: usize },
    /// `φ_g` is not a bijection `K_{src(g)} → K_{rng(g)}`.
    NotBijective { g: ElementId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub violations: Vec<ActionViolation>,
}

impl ActionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn action_table(
    groupoid: &FiniteGroupoid,
    space: &FiberedSpace,
    entries: &[(ElementId, usize, usize)],
) -> Result<Vec<Option<usize>>> {
    if groupoid.unit_count() != space.base_count() {
        return Err(Error::Structural(format!(
            "groupoid has {} units but the base has {} points",
            groupoid.unit_count(),
            space.base_count()
        )));
    }
    let nk = space.point_count();
    let mut table = vec![None; groupoid.len() * nk];
    for &(g, x, y) in entries {
        if g >= groupoid.len() || x >= nk || y >= nk {
            return Err(Error::Structural(format!("action entry ({g},{x},{y}) out of range")));
        }
        if table[g * nk + x].replace(y).is_some() {
            return Err(Error::Structural(format!("action entry ({g},{x}) given twice")));
        }
    }
    Ok(table)
}

/// Checks the three action axioms and fiberwise bijectivity.
pub fn validate_action(
    groupoid: &FiniteGroupoid,
    space: &FiberedSpace,
    entries: &[(ElementId, usize, usize)],
) -> Result<ActionReport> {
    let table = action_table(groupoid, space, entries)?;
    let nk = space.point_count();
    let act = |g: usize, x: usize| table[g * nk + x];
    let mut v = Vec::new();
    for g in groupoid.elements() {
        let s = groupoid.src_base(g);
        for x in 0..nk {
            match (space.q(x) == s, act(g, x)) {
                (false, Some(_)) => v.push(ActionViolation::Domain { g, x }),
                (true, None) => v.push(ActionViolation::Missing { g, x }),
                (true, Some(y)) if space.q(y) != groupoid.rng_base(g) => {
                    v.push(ActionViolation::Fibering { g, x })
                }
                _ => {}
            }
        }
        let image: BTreeSet<usize> = space.fiber(s).iter().filter_map(|&x| act(g, x)).collect();
        let target = space.fiber(groupoid.rng_base(g));
        if image.len() != space.fiber(s).len()
            || image.len() != target.len()
            || !target.iter().all(|y| image.contains(y))
        {
            v.push(ActionViolation::NotBijective { g });
        }
    }
    for g in groupoid.elements() {
        for h in groupoid.elements() {
            let Some(gh) = groupoid.product(g, h) else { continue };
            for &x in space.fiber(groupoid.src_base(h)) {
                let left = act(gh, x);
                let right = act(h, x).and_then(|hx| act(g, hx));
                if let (Some(a), Some(b)) = (left, right) {
                    if a != b {
                        v.push(ActionViolation::Compatibility { g, h, x });
                    }
                }
            }
        }
    }
    for (b, &u) in groupoid.units().iter().enumerate() {
        for &x in space.fiber(b) {
            if act(u, x) != Some(x) {
                v.push(ActionViolation::UnitAction { unit: u, x });
            }
        }
    }
    Ok(ActionReport { violations: v })
}

/// A validated groupoid action.
#[derive(Debug, Clone)]
pub struct GroupoidAction {
    groupoid: FiniteGroupoid,
    space: FiberedSpace,
    table: Vec<Option<usize>>,
}

impl GroupoidAction {
    pub fn new(
        groupoid: FiniteGroupoid,
        space: FiberedSpace,
        entries: &[(ElementId, usize, usize)],
    ) -> Result<Self> {
        let report = validate_action(&groupoid, &space, entries)?;
        if let Some(first) = report.violations.first() {
            return Err(Error::Invalid {
                what: "groupoid action",
                count: report.violations.len(),
                first: format!("{first:?}"),
            });
        }
        let table = action_table(&groupoid, &space, entries)?;
        Ok(GroupoidAction { groupoid, space, table })
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn space(&self) -> &FiberedSpace {
        &self.space
    }

    pub fn act(&self, g: ElementId, x: usize) -> Option<usize> {
        self.table[g * self.space.point_count() + x]
    }

    pub fn entries(&self) -> Vec<(ElementId, usize, usize)> {
        let nk = self.space.point_count();
        self.table
            .iter()
            .enumerate()
            .filter_map(|(i, y)| y.map(|y| (i / nk, i % nk, y)))
            .collect()
    }

    /// `φ_g` restricted to `K_{src(g)}`.
    pub fn fiber_map(&self, g: ElementId) -> FiberMap {
        let src = self.groupoid.src_base(g);
        let image = self
            .space
            .fiber(src)
            .iter()
            .map(|&x| self.act(g, x).expect("total on source fiber"))
            .collect();
        FiberMap::new_unchecked(src, self.groupoid.rng_base(g), image)
    }
}

/// An invertible generator of an extension: `φ` on `K` covering `ψ` on `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionGenerator {
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&y| y < n && !std::mem::replace(&mut seen[y], true))
}

/// Builds the transition groupoid of an invertible extension: the fiber
/// restrictions of the generators and their inverses, closed under
/// composition, with identities on every fiber. The action is evaluation.
pub fn from_extension(space: &FiberedSpace, generators: &[ExtensionGenerator]) -> Result<GroupoidAction> {
    let (nk, nl) = (space.point_count(), space.base_count());
    let mut seeds = Vec::new();
    for (i, gen) in generators.iter().enumerate() {
        if !is_permutation(&gen.phi, nk) {
            return Err(Error::NotPermutation(format!("phi of generator {i}")));
        }
        if !is_permutation(&gen.psi, nl) {
            return Err(Error::NotPermutation(format!("psi of generator {i}")));
        }
        if let Some(x) = (0..nk).find(|&x| space.q(gen.phi[x]) != gen.psi[space.q(x)]) {
            return Err(Error::Intertwining { point: x });
        }
        let mut inv = vec![0; nk];
        for (x, &y) in gen.phi.iter().enumerate() {
            inv[y] = x;
        }
        for b in 0..nl {
            seeds.push(FiberMap::from_point_map(space, b, &gen.phi));
            seeds.push(FiberMap::from_point_map(space, b, &inv));
        }
    }
    for b in 0..nl {
        seeds.push(FiberMap::identity(space, b));
    }
    let env = close(&seeds, space, CloseOptions::default())?;
    groupoid_of_maps(space, env.maps())
}

/// Turns a composition-closed set of fiber bijections that contains all
/// inverses and every fiber identity into a groupoid acting by evaluation.
pub fn groupoid_of_maps(space: &FiberedSpace, maps: &[FiberMap]) -> Result<GroupoidAction> {
    let index: HashMap<&FiberMap, usize> = maps.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let n = maps.len();
    let mut units = Vec::with_capacity(space.base_count());
    for b in 0..space.base_count() {
        let id = FiberMap::identity(space, b);
        units.push(*index.get(&id).ok_or_else(|| {
            Error::NotGroupoid(format!("identity on fiber {b} is missing"))
        })?);
    }
    let mut inverse = Vec::with_capacity(n);
    for m in maps {
        let inv = m
            .inverse(space)
            .ok_or_else(|| Error::NotGroupoid(format!("map {m} is not bijective")))?;
        inverse.push(*index.get(&inv).ok_or_else(|| {
            Error::NotGroupoid(format!("inverse of {m} is not in the set"))
        })?);
    }
    let mut product = vec![None; n * n];
    for (i, g) in maps.iter().enumerate() {
        for (j, h) in maps.iter().enumerate() {
            if h.dst() == g.src() {
                let gh = g.after(h, space);
                product[i * n + j] = Some(*index.get(&gh).ok_or_else(|| {
                    Error::NotGroupoid(format!("composite {gh} is not in the set"))
                })?);
            }
        }
    }
    let table = GroupoidTable {
        labels: maps.iter().map(|m| m.to_string()).collect(),
        units: units.clone(),
        src: maps.iter().map(|m| units[m.src()]).collect(),
        rng: maps.iter().map(|m| units[m.dst()]).collect(),
        product,
        inverse,
    };
    let groupoid = FiniteGroupoid::new(table)?;
    let mut entries = Vec::new();
    for (g, m) in maps.iter().enumerate() {
        for (&x, &y) in space.fiber(m.src()).iter().zip(m.image()) {
            entries.push((g, x, y));
        }
    }
    GroupoidAction::new(groupoid, space.clone(), &entries)
}

/// Matrix of `T_g f = f ∘ φ_{g⁻¹}` from functions on `K_{src(g)}` to
/// functions on `K_{rng(g)}`, both indexed by position within the fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoopmanBlock {
    pub src_base: usize,
    pub dst_base: usize,
    pub matrix: DMatrix<i64>,
}

pub fn koopman(a: &GroupoidAction, g: ElementId) -> KoopmanBlock {
    let grpd = a.groupoid();
    let space = a.space();
    let (s, r) = (grpd.src_base(g), grpd.rng_base(g));
    let mut matrix = DMatrix::<i64>::zeros(space.fiber(r).len(), space.fiber(s).len());
    for &x in space.fiber(s) {
        let y = a.act(g, x).expect("total");
        matrix[(space.local_index(y), space.local_index(x))] = 1;
    }
    KoopmanBlock {
        src_base: s,
        dst_base: r,
        matrix,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErgodicityReport {
    pub fixed_space_dim: usize,
    pub point_classes: Vec<Vec<usize>>,
    pub base_classes: Vec<Vec<usize>>,
    /// Quotient map of the maximal trivial factor: point → class index.
    pub trivial_factor: Vec<usize>,
    pub topologically_ergodic: bool,
    pub relatively_topologically_ergodic: bool,
}

impl ErgodicityReport {
    /// Indicator functions of the point classes; a basis of the fixed space.
    pub fn fixed_space_basis(&self) -> Vec<Vec<f64>> {
        self.point_classes
            .iter()
            .map(|class| {
                let mut v = vec![0.0; self.trivial_factor.len()];
                for &x in class {
                    v[x] = 1.0;
                }
                v
            })
            .collect()
    }
}

/// Ergodicity data from `(x, y)` pairs meaning "`x` is moved to `y`", with
/// the fixed-space dimension computed as the corank of the constraints
/// `f(y) = f(x)`.
fn ergodicity_from_pairs(
    space: &FiberedSpace,
    pairs: &BTreeSet<(usize, usize)>,
    base_pairs: impl IntoIterator<Item = (usize, usize)>,
) -> ErgodicityReport {
    let nk = space.point_count();
    // Gram matrix of the constraint rows e_y - e_x, accumulated directly
    let mut gram = DMatrix::<f64>::zeros(nk, nk);
    for &(x, y) in pairs.iter().filter(|(x, y)| x != y) {
        gram[(x, x)] += 1.0;
        gram[(y, y)] += 1.0;
        gram[(x, y)] -= 1.0;
        gram[(y, x)] -= 1.0;
    }
    let fixed_space_dim = nk - symmetric_rank(&gram, 1e-9);

    let mut uf = UnionFind::new(nk);
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    let point_classes = uf.classes();
    let trivial_factor = uf.labels();
    let mut base_uf = UnionFind::new(space.base_count());
    for (a, b) in base_pairs {
        base_uf.union(a, b);
    }
    let base_classes = base_uf.classes();
    ErgodicityReport {
        fixed_space_dim,
        topologically_ergodic: fixed_space_dim == 1,
        relatively_topologically_ergodic: point_classes.len() == base_classes.len(),
        point_classes,
        base_classes,
        trivial_factor,
    }
}

/// Fixed space, orbit-closure classes and the maximal trivial factor of an
/// action. The fixed space is computed from the Koopman blocks.
pub fn ergodicity_report(a: &GroupoidAction) -> ErgodicityReport {
    let space = a.space();
    let grpd = a.groupoid();
    let mut pairs = BTreeSet::new();
    for g in grpd.elements() {
        let block = koopman(a, g);
        let src = space.fiber(block.src_base);
        let dst = space.fiber(block.dst_base);
        for (i, &y) in dst.iter().enumerate() {
            for (j, &x) in src.iter().enumerate() {
                if block.matrix[(i, j)] != 0 {
                    pairs.insert((x, y));
                }
            }
        }
    }
    ergodicity_from_pairs(
        space,
        &pairs,
        grpd.elements().map(|g| (grpd.src_base(g), grpd.rng_base(g))),
    )
}

/// Same report for an arbitrary set of fiber maps (invariance meaning
/// `f ∘ θ = f` on the source fiber).
pub fn ergodicity_of_maps(space: &FiberedSpace, maps: &[FiberMap]) -> ErgodicityReport {
    let mut pairs = BTreeSet::new();
    for m in maps {
        for (&x, &y) in space.fiber(m.src()).iter().zip(m.image()) {
            pairs.insert((x, y));
        }
    }
    ergodicity_from_pairs(space, &pairs, maps.iter().map(|m| (m.src(), m.dst())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::groupoid::{self, pair, transitive};

    fn discrete(n: usize) -> Metric {
        Metric::from_fn(n, |_, _| 1.0)
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    /// pair(2) acting on L × {0,1} by identity on the second coordinate.
    fn pair_on_product() -> (FiniteGroupoid, FiberedSpace, Vec<(usize, usize, usize)>) {
        let g = pair(2);
        let space = FiberedSpace::new(labels(2), labels(4), vec![0, 0, 1, 1], discrete(4), discrete(2)).unwrap();
        let mut entries = Vec::new();
        for e in g.elements() {
            let (s, r) = (g.src_base(e), g.rng_base(e));
            for c in 0..2 {
                entries.push((e, 2 * s + c, 2 * r + c));
            }
        }
        (g, space, entries)
    }

    fn rotation_over_point(n: usize) -> FiberedSpace {
        FiberedSpace::new(
            labels(1),
            labels(n),
            vec![0; n],
            Metric::from_fn(n, |a, b| {
                let d = a.abs_diff(b);
                d.min(n - d) as f64
            }),
            discrete(1),
        )
        .unwrap()
    }

    #[test]
    fn valid_action_has_empty_report() {
        let (g, space, entries) = pair_on_product();
        assert!(validate_action(&g, &space, &entries).unwrap().is_valid());
    }

    #[test]
    fn redirected_entry_breaks_fibering() {
        let (g, space, mut entries) = pair_on_product();
        // a unit acting on a point of fiber 0 is sent into fiber 1
        let pos = entries.iter().position(|&(e, x, _)| e == g.unit_at(0) && x == 0).unwrap();
        entries[pos].2 = 2;
        let report = validate_action(&g, &space, &entries).unwrap();
        assert!(report
            .violations
            .contains(&ActionViolation::Fibering { g: g.unit_at(0), x: 0 }));
    }

    #[test]
    fn unit_acting_nontrivially() {
        let (g, space, mut entries) = pair_on_product();
        let u = g.unit_at(0);
        for e in entries.iter_mut().filter(|e| e.0 == u) {
            e.2 = if e.1 == 0 { 1 } else { 0 };
        }
        let report = validate_action(&g, &space, &entries).unwrap();
        assert!(report.violations.iter().any(|v| matches!(v, ActionViolation::UnitAction { .. })));
    }

    #[test]
    fn non_surjective_q_is_structural() {
        let r = FiberedSpace::new(labels(2), labels(2), vec![0, 0], discrete(2), discrete(2));
        assert!(matches!(r, Err(Error::Structural(_))));
    }

    #[test]
    fn extension_over_point_gives_cyclic_group() {
        let space = rotation_over_point(5);
        let gen = ExtensionGenerator {
            phi: (0..5).map(|x| (x + 1) % 5).collect(),
            psi: vec![0],
        };
        let a = from_extension(&space, &[gen]).unwrap();
        assert_eq!(a.groupoid().len(), 5);
        let (grp, _) = a.groupoid().isotropy_group(0);
        assert!(grp.is_abelian());
        assert!((0..5).any(|x| grp.element_order(x) == 5));
        let rep = ergodicity_report(&a);
        assert_eq!(rep.fixed_space_dim, 1);
        assert!(rep.topologically_ergodic);
    }

    #[test]
    fn non_intertwining_generator_rejected() {
        let space = FiberedSpace::new(labels(2), labels(4), vec![0, 0, 1, 1], discrete(4), discrete(2)).unwrap();
        let gen = ExtensionGenerator {
            phi: vec![2, 1, 0, 3],
            psi: vec![1, 0],
        };
        assert!(matches!(from_extension(&space, &[gen]), Err(Error::Intertwining { .. })));
    }

    #[test]
    fn koopman_of_rotation_is_cyclic_shift() {
        let space = rotation_over_point(4);
        let g = groupoid::from_group_action(
            &FiniteGroup::cyclic(4),
            &vec![vec![0]; 4],
        )
        .unwrap();
        let entries: Vec<_> = (0..4)
            .flat_map(|e| (0..4).map(move |x| (e, x, (x + e) % 4)))
            .collect();
        let a = GroupoidAction::new(g, space, &entries).unwrap();
        let t1 = koopman(&a, 1).matrix;
        // T_1 f = f(· - 1): row y has its one at column y - 1
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(t1[(y, x)], i64::from(x == (y + 3) % 4));
            }
        }
        assert_eq!(koopman(&a, 0).matrix, DMatrix::identity(4, 4));
    }

    #[test]
    fn koopman_is_multiplicative() {
        let g = transitive(2, &FiniteGroup::cyclic(3));
        let space = FiberedSpace::new(
            labels(2),
            labels(6),
            vec![0, 0, 0, 1, 1, 1],
            discrete(6),
            discrete(2),
        )
        .unwrap();
        // (i, j; a) sends (j, c) to (i, c + a)
        let mut entries = Vec::new();
        for e in g.elements() {
            let a = e % 3;
            let (s, r) = (g.src_base(e), g.rng_base(e));
            for c in 0..3 {
                entries.push((e, 3 * s + c, 3 * r + (c + a) % 3));
            }
        }
        let act = GroupoidAction::new(g.clone(), space, &entries).unwrap();
        for x in g.elements() {
            for y in g.elements() {
                if let Some(xy) = g.product(x, y) {
                    assert_eq!(koopman(&act, xy).matrix, koopman(&act, x).matrix * koopman(&act, y).matrix);
                }
            }
        }
    }
}
