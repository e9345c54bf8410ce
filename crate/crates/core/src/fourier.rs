//! Fourier decomposition along invariant sections.
//!
//! On a transitive component of a groupoid envelope the isotropy groups are
//! all conjugate. An irreducible class of the isotropy at the least base
//! point of the component, carried to the other base points by conjugation
//! along transporting maps, is an invariant section; each invariant section
//! `γ` gives the projection
//!
//! ```text
//! (P_γ σ)(x) = dim γ / |Iso_u| · Σ_{g ∈ Iso_u} χ_{γ(u)}(g) σ(g⁻¹ x),   u = q(x).
//! ```
//!
//! Characters are computed for abelian isotropy only. Nonabelian isotropy
//! needs a supplied table, checked by [`verify_table`].

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num::{Complex, Rational64, Zero};
use serde::Serialize;

use crate::action::{FiberedFunction, FiberedSpace};
use crate::envelope::{Envelope, FiberMap};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::complex_rank;
use crate::measures::Rim;

pub type C64 = Complex<f64>;

pub const TABLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    ComputedAbelian,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub dim: usize,
    /// Character value at each group element.
    pub values: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub order: usize,
    pub irreps: Vec<Irrep>,
    pub source: TableSource,
}

impl CharacterTable {
    pub fn supplied(order: usize, irreps: Vec<Irrep>) -> Self {
        CharacterTable {
            order,
            irreps,
            source: TableSource::UserSupplied,
        }
    }
}

fn unit_root(angle: Rational64) -> C64 {
    let t = *angle.numer() as f64 / *angle.denom() as f64;
    C64::from_polar(1.0, TAU * t)
}

fn frac(r: Rational64) -> Rational64 {
    r - r.floor()
}

/// Characters of an abelian group, as exact angles in `[0, 1)`.
///
/// Built by extending along a chain of subgroups `H ⊂ H·⟨g⟩`: if `g^k` is
/// the first power of `g` in `H`, each character of `H` has exactly `k`
/// extensions, fixed by the value at `g`, a `k`-th root of its value at `g^k`.
pub fn character_angles(group: &FiniteGroup) -> Result<Vec<Vec<Rational64>>> {
    if let Some((a, b)) = group.commutator_witness() {
        return Err(Error::NonAbelian(a, b));
    }
    let n = group.order();
    let e = group.identity();
    let mut members = vec![e];
    let mut inside = vec![false; n];
    inside[e] = true;
    let mut chars: Vec<HashMap<usize, Rational64>> = vec![HashMap::from([(e, Rational64::zero())])];
    while members.len() < n {
        let g = (0..n).find(|&x| !inside[x]).expect("proper subgroup");
        let mut k = 1;
        let mut gk = g;
        while !inside[gk] {
            gk = group.mul(gk, g);
            k += 1;
        }
        let mut grown = members.clone();
        let mut powers = vec![e];
        for j in 1..k {
            let p = group.mul(powers[j - 1], g);
            powers.push(p);
            for &h in &members {
                grown.push(group.mul(h, p));
            }
        }
        let mut next = Vec::with_capacity(chars.len() * k);
        for chi in &chars {
            let at_gk = chi[&gk];
            for t in 0..k as i64 {
                let at_g = (at_gk + Rational64::from_integer(t)) / Rational64::from_integer(k as i64);
                let mut ext = HashMap::with_capacity(grown.len());
                for (j, &p) in powers.iter().enumerate() {
                    let shift = at_g * Rational64::from_integer(j as i64);
                    for &h in &members {
                        ext.insert(group.mul(h, p), frac(chi[&h] + shift));
                    }
                }
                next.push(ext);
            }
        }
        for &x in &grown[members.len()..] {
            inside[x] = true;
        }
        members = grown;
        chars = next;
    }
    Ok(chars.into_iter().map(|c| (0..n).map(|x| c[&x]).collect()).collect())
}

/// Character table of an abelian group. For `Z_n` the `k`-th character is
/// `j ↦ exp(2πi·jk/n)`.
pub fn characters(group: &FiniteGroup) -> Result<CharacterTable> {
    let angles = character_angles(group)?;
    Ok(CharacterTable {
        order: group.order(),
        irreps: angles
            .into_iter()
            .map(|row| Irrep {
                dim: 1,
                values: row.into_iter().map(unit_root).collect(),
            })
            .collect(),
        source: TableSource::ComputedAbelian,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum TableViolation {
    Shape { irrep: usize },
    IdentityValue { irrep: usize },
    DimensionSum { total: usize, order: usize },
    ClassFunction { irrep: usize, element: usize, conjugator: usize },
    Orthogonality { first: usize, second: usize, residual: f64 },
}

/// Row orthogonality, `Σ dim² = |G|`, `χ(e) = dim` and the class-function
/// property. Empty iff consistent.
pub fn verify_table(group: &FiniteGroup, table: &CharacterTable) -> Vec<TableViolation> {
    let n = group.order();
    let mut out = Vec::new();
    for (i, ir) in table.irreps.iter().enumerate() {
        if ir.values.len() != n || ir.dim == 0 {
            out.push(TableViolation::Shape { irrep: i });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (i, ir) in table.irreps.iter().enumerate() {
        if (ir.values[group.identity()] - C64::new(ir.dim as f64, 0.0)).norm() > TABLE_TOL {
            out.push(TableViolation::IdentityValue { irrep: i });
        }
    }
    let total: usize = table.irreps.iter().map(|ir| ir.dim * ir.dim).sum();
    if total != n {
        out.push(TableViolation::DimensionSum { total, order: n });
    }
    'irreps: for (i, ir) in table.irreps.iter().enumerate() {
        for g in 0..n {
            for h in 0..n {
                if (ir.values[group.conjugate(h, g)] - ir.values[g]).norm() > TABLE_TOL {
                    out.push(TableViolation::ClassFunction {
                        irrep: i,
                        element: g,
                        conjugator: h,
                    });
                    continue 'irreps;
                }
            }
        }
    }
    for (i, a) in table.irreps.iter().enumerate() {
        for (j, b) in table.irreps.iter().enumerate().skip(i) {
            let inner: C64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y.conj()).sum();
            let expected = if i == j { n as f64 } else { 0.0 };
            let residual = (inner - C64::new(expected, 0.0)).norm();
            if residual > TABLE_TOL * n as f64 {
                out.push(TableViolation::Orthogonality {
                    first: i,
                    second: j,
                    residual,
                });
            }
        }
    }
    out
}

/// A transitive component of a groupoid envelope: one orbit class on `K`,
/// the base points under it, and the maps among them.
#[derive(Debug, Clone)]
pub struct Component {
    class: Vec<usize>,
    bases: Vec<usize>,
    /// Class points over each base, in increasing order.
    trace: Vec<Vec<usize>>,
    /// Isotropy maps per base, in envelope order.
    isotropy: Vec<Vec<FiberMap>>,
    /// A map from the first base to each base.
    transport: Vec<FiberMap>,
    arrows: Vec<FiberMap>,
    /// `inverse_image[b][i][x_local] = local index of iso_i⁻¹(x)`.
    inverse_image: Vec<Vec<Vec<usize>>>,
    group: FiniteGroup,
}

impl Component {
    pub fn new(env: &Envelope, space: &FiberedSpace, class_index: usize) -> Result<Self> {
        if !env.classification().is_groupoid {
            return Err(Error::NotGroupoid(
                "Fourier decomposition needs a groupoid envelope".into(),
            ));
        }
        let class = env
            .classification()
            .orbit_classes
            .get(class_index)
            .ok_or_else(|| Error::Mismatch(format!("no orbit class {class_index}")))?
            .clone();
        let mut bases: Vec<usize> = class.iter().map(|&x| space.q(x)).collect();
        bases.sort_unstable();
        bases.dedup();
        let slot = |b: usize| bases.binary_search(&b).ok();
        let trace = bases
            .iter()
            .map(|&b| class.iter().copied().filter(|&x| space.q(x) == b).collect())
            .collect();
        let arrows: Vec<FiberMap> = env
            .maps()
            .iter()
            .filter(|m| slot(m.src()).is_some())
            .cloned()
            .collect();
        let mut isotropy = vec![Vec::new(); bases.len()];
        let mut transport: Vec<Option<FiberMap>> = vec![None; bases.len()];
        for m in &arrows {
            let d = slot(m.dst()).ok_or_else(|| {
                Error::Transport(format!("{m} leaves the component"))
            })?;
            if m.src() == m.dst() {
                isotropy[d].push(m.clone());
            }
            if m.src() == bases[0] && transport[d].is_none() {
                transport[d] = Some(m.clone());
            }
        }
        let transport = transport
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| Error::Transport(format!("no map reaches base {}", bases[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        let local = |m: &FiberMap| -> Vec<usize> {
            m.image().iter().map(|&y| space.local_index(y)).collect()
        };
        let group = FiniteGroup::from_permutations(&isotropy[0].iter().map(local).collect::<Vec<_>>())?;
        let inverse_image = isotropy
            .iter()
            .map(|maps| {
                maps.iter()
                    .map(|m| {
                        let mut inv = vec![0; m.image().len()];
                        for (i, &j) in local(m).iter().enumerate() {
                            inv[j] = i;
                        }
                        inv
                    })
                    .collect()
            })
            .collect();
        Ok(Component {
            class,
            bases,
            trace,
            isotropy,
            transport,
            arrows,
            inverse_image,
            group,
        })
    }

    pub fn class(&self) -> &[usize] {
        &self.class
    }

    pub fn bases(&self) -> &[usize] {
        &self.bases
    }

    pub fn trace(&self, slot: usize) -> &[usize] {
        &self.trace[slot]
    }

    /// Isotropy group at the first base, numbered by its maps in envelope order.
    pub fn isotropy_group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn isotropy_maps(&self, slot: usize) -> &[FiberMap] {
        &self.isotropy[slot]
    }

    pub fn arrows(&self) -> &[FiberMap] {
        &self.arrows
    }

    fn slot(&self, b: usize) -> usize {
        self.bases.binary_search(&b).expect("base in component")
    }

    fn iso_index(&self, m: &FiberMap) -> Option<usize> {
        let s = self.slot(m.src());
        self.isotropy[s].iter().position(|g| g == m)
    }
}

/// An irreducible class of the isotropy at each base of a component, given by
/// its character on that base's isotropy maps.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSection {
    pub id: usize,
    pub dim: usize,
    /// `characters[slot][i]` is the character at the `i`-th isotropy map.
    pub characters: Vec<Vec<C64>>,
}

/// Transports each irreducible class of the first base's isotropy along the
/// component and checks the result is independent of the transporting map.
pub fn invariant_sections(
    comp: &Component,
    space: &FiberedSpace,
    table: Option<&CharacterTable>,
) -> Result<Vec<InvariantSection>> {
    let computed;
    let table = match table {
        Some(t) => {
            let bad = verify_table(&comp.group, t);
            if let Some(first) = bad.first() {
                return Err(Error::Invalid {
                    what: "character table",
                    count: bad.len(),
                    first: format!("{first:?}"),
                });
            }
            t
        }
        None => {
            computed = characters(&comp.group)?;
            &computed
        }
    };
    let conj_index = |t: &FiberMap, g: &FiberMap| -> Result<usize> {
        // t⁻¹ g t, an isotropy map at the source of t
        let t_inv = t.inverse(space).ok_or_else(|| Error::Transport(format!("{t} is not invertible")))?;
        let c = t_inv.after(&g.after(t, space), space);
        comp.iso_index(&c)
            .ok_or_else(|| Error::Transport(format!("conjugate of {g} by {t} is not an isotropy map")))
    };
    let mut sections = Vec::with_capacity(table.irreps.len());
    for (id, ir) in table.irreps.iter().enumerate() {
        let mut chars = Vec::with_capacity(comp.bases.len());
        for (s, t) in comp.transport.iter().enumerate() {
            let row = comp.isotropy[s]
                .iter()
                .map(|g| conj_index(t, g).map(|i| ir.values[i]))
                .collect::<Result<Vec<_>>>()?;
            chars.push(row);
        }
        sections.push(InvariantSection {
            id,
            dim: ir.dim,
            characters: chars,
        });
    }
    for a in &comp.arrows {
        let (s, d) = (comp.slot(a.src()), comp.slot(a.dst()));
        for (i, g) in comp.isotropy[d].iter().enumerate() {
            let j = conj_index(a, g)?;
            for sec in &sections {
                if (sec.characters[s][j] - sec.characters[d][i]).norm() > TABLE_TOL {
                    return Err(Error::Transport(format!(
                        "section {} disagrees along {a} at {g}",
                        sec.id
                    )));
                }
            }
        }
    }
    Ok(sections)
}

/// `P_γ σ` on the component; zero off the component.
pub fn project(
    comp: &Component,
    section: &InvariantSection,
    space: &FiberedSpace,
    sigma: &FiberedFunction,
) -> Result<FiberedFunction> {
    if sigma.len() != space.point_count() || section.characters.len() != comp.bases.len() {
        return Err(Error::Mismatch("section or function does not match the component".into()));
    }
    let mut out = FiberedFunction::zeros(space.point_count());
    for (s, &b) in comp.bases.iter().enumerate() {
        let fiber = space.fiber(b);
        let scale = section.dim as f64 / comp.isotropy[s].len() as f64;
        for &x in &comp.trace[s] {
            let lx = space.local_index(x);
            let mut acc = C64::zero();
            for (i, chi) in section.characters[s].iter().enumerate() {
                acc += chi * sigma.values[fiber[comp.inverse_image[s][i][lx]]];
            }
            out.values[x] = acc * scale;
        }
    }
    Ok(out)
}

/// Matrix of `P_γ` on the class points over one base, columns = inputs.
pub fn projection_matrix(
    comp: &Component,
    section: &InvariantSection,
    space: &FiberedSpace,
    slot: usize,
) -> DMatrix<C64> {
    let trace = &comp.trace[slot];
    let fiber = space.fiber(comp.bases[slot]);
    let pos: HashMap<usize, usize> = trace.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let scale = section.dim as f64 / comp.isotropy[slot].len() as f64;
    let mut m = DMatrix::from_element(trace.len(), trace.len(), C64::zero());
    for (r, &x) in trace.iter().enumerate() {
        let lx = space.local_index(x);
        for (i, chi) in section.characters[slot].iter().enumerate() {
            let y = fiber[comp.inverse_image[slot][i][lx]];
            m[(r, pos[&y])] += chi * scale;
        }
    }
    m
}

fn inner(rim: &Rim, base: usize, points: &[usize], f: &FiberedFunction, g: &FiberedFunction) -> C64 {
    points
        .iter()
        .map(|&x| f.values[x] * g.values[x].conj() * rim.weight_f64(base, x))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    pub idempotence: f64,
    pub orthogonality: f64,
    pub parseval: f64,
    pub reconstruction: f64,
    /// Least `dim γ · ‖σ‖_{L²(μ_u)} − sup |P_γσ|` over sections and bases;
    /// nonnegative when the bound holds.
    pub supnorm: f64,
}

impl Residuals {
    pub fn within(&self, tol: f64) -> bool {
        self.idempotence < tol
            && self.orthogonality < tol
            && self.parseval < tol
            && self.reconstruction < tol
            && self.supnorm >= -tol
    }
}

pub fn decompose_report(
    comp: &Component,
    sections: &[InvariantSection],
    space: &FiberedSpace,
    rim: &Rim,
    sigma: &FiberedFunction,
) -> Result<Residuals> {
    let projections = sections
        .iter()
        .map(|s| project(comp, s, space, sigma))
        .collect::<Result<Vec<_>>>()?;
    let mut r = Residuals {
        idempotence: 0.0,
        orthogonality: 0.0,
        parseval: 0.0,
        reconstruction: 0.0,
        supnorm: f64::INFINITY,
    };
    for (s, p) in sections.iter().zip(&projections) {
        let pp = project(comp, s, space, p)?;
        r.idempotence = r.idempotence.max(pp.sup_distance(p));
    }
    for (slot, &b) in comp.bases.iter().enumerate() {
        let pts = &comp.trace[slot];
        let norm2 = inner(rim, b, pts, sigma, sigma).re;
        let mut parts = 0.0;
        for (i, p) in projections.iter().enumerate() {
            parts += inner(rim, b, pts, p, p).re;
            for q in &projections[i + 1..] {
                r.orthogonality = r.orthogonality.max(inner(rim, b, pts, p, q).norm());
            }
            let sup = pts.iter().map(|&x| p.values[x].norm()).fold(0.0, f64::max);
            let bound = sections[i].dim as f64 * norm2.sqrt();
            r.supnorm = r.supnorm.min(bound - sup);
        }
        r.parseval = r.parseval.max((norm2 - parts).abs());
        for &x in pts {
            let sum: C64 = projections.iter().map(|p| p.values[x]).sum();
            r.reconstruction = r.reconstruction.max((sigma.values[x] - sum).norm());
        }
    }
    if r.supnorm == f64::INFINITY {
        r.supnorm = 0.0;
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionRank {
    pub id: usize,
    pub dim: usize,
    /// Rank of `P_γ` on the class points over the first base.
    pub rank: usize,
    /// Rank is the same over every base of the component.
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubmoduleReport {
    pub sections: Vec<SectionRank>,
    /// `Σ_γ rank_u = |class ∩ K_u|` for every base `u`.
    pub complete: bool,
}

pub fn submodule_report(
    comp: &Component,
    sections: &[InvariantSection],
    space: &FiberedSpace,
) -> SubmoduleReport {
    let ranks: Vec<Vec<usize>> = sections
        .iter()
        .map(|s| {
            (0..comp.bases.len())
                .map(|slot| complex_rank(&projection_matrix(comp, s, space, slot), TABLE_TOL))
                .collect()
        })
        .collect();
    let complete = (0..comp.bases.len())
        .all(|slot| ranks.iter().map(|r| r[slot]).sum::<usize>() == comp.trace[slot].len());
    SubmoduleReport {
        sections: sections
            .iter()
            .zip(&ranks)
            .map(|(s, r)| SectionRank {
                id: s.id,
                dim: s.dim,
                rank: r[0],
                constant: r.iter().all(|&k| k == r[0]),
            })
            .collect(),
        complete,
    }
}

/// The standard character table of the symmetric group on three letters,
/// in the element order of [`FiniteGroup::symmetric`].
pub fn s3_table() -> CharacterTable {
    let real = |v: [f64; 6]| v.iter().map(|&x| C64::new(x, 0.0)).collect();
    // elements: 012, 021, 102, 120, 201, 210
    CharacterTable::supplied(
        6,
        vec![
            Irrep { dim: 1, values: real([1.0, 1.0, 1.0, 1.0, 1.0, 1.0]) },
            Irrep { dim: 1, values: real([1.0, -1.0, -1.0, 1.0, 1.0, -1.0]) },
            Irrep { dim: 2, values: real([2.0, 0.0, 0.0, -1.0, -1.0, 0.0]) },
        ],
    )
}
