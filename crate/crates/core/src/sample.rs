//! Random valid instances for property tests and fuzzing.
//!
//! Every finite groupoid is a disjoint union of transitive ones, each a pair
//! groupoid times a group, so that is how random groupoids are drawn. Element
//! ids are then shuffled. Actions let each component act on copies of a
//! coset space of its group, one copy per unit.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::{FiberedSpace, Metric};
use crate::group::FiniteGroup;
use crate::groupoid::{disjoint_union, transitive, ElementId, FiniteGroupoid, GroupoidTable};

pub fn random_group<R: Rng>(rng: &mut R, max_order: usize) -> FiniteGroup {
    let mut pool: Vec<FiniteGroup> = (1..=6.min(max_order)).map(FiniteGroup::cyclic).collect();
    if max_order >= 4 {
        pool.push(FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(2)));
    }
    if max_order >= 6 {
        pool.push(FiniteGroup::symmetric(3));
    }
    if max_order >= 8 {
        pool.push(FiniteGroup::cyclic(2).direct_product(&FiniteGroup::cyclic(4)));
    }
    pool.swap_remove(rng.random_range(0..pool.len()))
}

/// Renumbers elements: old id `g` becomes `perm[g]`. Units keep their order.
pub fn relabel(g: &FiniteGroupoid, perm: &[ElementId]) -> FiniteGroupoid {
    let t = g.table();
    let n = t.len();
    let mut inv = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    let mut product = vec![None; n * n];
    for a in 0..n {
        for b in 0..n {
            product[perm[a] * n + perm[b]] = t.get(a, b).map(|c| perm[c]);
        }
    }
    let table = GroupoidTable {
        labels: (0..n).map(|new| t.labels[inv[new]].clone()).collect(),
        units: t.units.iter().map(|&u| perm[u]).collect(),
        src: (0..n).map(|new| perm[t.src[inv[new]]]).collect(),
        rng: (0..n).map(|new| perm[t.rng[inv[new]]]).collect(),
        product,
        inverse: (0..n).map(|new| perm[t.inverse[inv[new]]]).collect(),
    };
    FiniteGroupoid::new(table).expect("relabelled groupoid")
}

fn shuffled<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A groupoid with exactly `size` elements.
pub fn random_groupoid<R: Rng>(rng: &mut R, size: usize) -> FiniteGroupoid {
    let mut parts = Vec::new();
    let mut left = size;
    while left > 0 {
        let n = rng.random_range(1..=3usize);
        let fits = left / (n * n);
        let part = if fits == 0 {
            transitive(1, &FiniteGroup::cyclic(1))
        } else {
            transitive(n, &random_group(rng, fits))
        };
        left -= part.len();
        parts.push(part);
    }
    let g = disjoint_union(&parts);
    let perm = shuffled(rng, g.len());
    relabel(&g, &perm)
}

/// Replaces one defined product with a different element. Returns the
/// mutated table and the position changed.
pub fn mutate_product<R: Rng>(rng: &mut R, g: &FiniteGroupoid) -> (GroupoidTable, (ElementId, ElementId)) {
    let mut t = g.table().clone();
    let n = t.len();
    let defined: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| t.get(a, b).is_some())
        .collect();
    let (a, b) = defined[rng.random_range(0..defined.len())];
    let old = t.get(a, b).expect("defined");
    let mut new = rng.random_range(0..n - 1);
    if new >= old {
        new += 1;
    }
    t.set(a, b, Some(new));
    (t, (a, b))
}

/// Shortest-path metric of a complete graph with integer weights in `1..=10`.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> Metric {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.random_range(1..=10) as f64;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    Metric::from_rows(&d).expect("square")
}

/// Left multiplication on the cosets `gH` of `H = ⟨h⟩`: `perm[a][c]` is the
/// coset of `a·g` for `g` in coset `c`.
fn coset_action(group: &FiniteGroup, h: usize) -> Vec<Vec<usize>> {
    let n = group.order();
    let mut sub = vec![group.identity()];
    let mut x = h;
    while x != group.identity() {
        sub.push(x);
        x = group.mul(x, h);
    }
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for g in 0..n {
        if coset_of[g] == usize::MAX {
            for &s in &sub {
                coset_of[group.mul(g, s)] = reps.len();
            }
            reps.push(g);
        }
    }
    (0..n)
        .map(|a| reps.iter().map(|&g| coset_of[group.mul(a, g)]).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct RandomAction {
    pub groupoid: FiniteGroupoid,
    pub space: FiberedSpace,
    pub entries: Vec<(ElementId, usize, usize)>,
}

/// A valid action with at most `max_points` points and at most
/// `max_elements` groupoid elements.
pub fn random_action<R: Rng>(rng: &mut R, max_points: usize, max_elements: usize) -> RandomAction {
    struct Part {
        n: usize,
        group: FiniteGroup,
        /// One permutation of the fiber per group element.
        perms: Vec<Vec<usize>>,
    }
    let mut parts: Vec<Part> = Vec::new();
    let (mut points, mut elements) = (0, 0);
    loop {
        let n = rng.random_range(1..=3usize);
        let room = max_elements.saturating_sub(elements) / (n * n);
        if room == 0 {
            break;
        }
        let group = random_group(rng, room);
        let mut perms: Vec<Vec<usize>> = vec![Vec::new(); group.order()];
        for _ in 0..rng.random_range(1..=2) {
            let orbit = coset_action(&group, rng.random_range(0..group.order()));
            for (p, o) in perms.iter_mut().zip(&orbit) {
                let off = p.len();
                p.extend(o.iter().map(|&c| c + off));
            }
        }
        let fiber = perms[0].len();
        if points + n * fiber > max_points {
            if parts.is_empty() {
                continue;
            }
            break;
        }
        points += n * fiber;
        elements += n * n * group.order();
        parts.push(Part { n, group, perms });
        if rng.random_bool(0.4) {
            break;
        }
    }

    let groupoid = disjoint_union(&parts.iter().map(|p| transitive(p.n, &p.group)).collect::<Vec<_>>());
    let mut q = Vec::new();
    let mut entries = Vec::new();
    let (mut elem_off, mut point_off, mut base_off) = (0, 0, 0);
    for p in &parts {
        let m = p.group.order();
        let fiber = p.perms[0].len();
        for u in 0..p.n {
            q.extend(std::iter::repeat_n(base_off + u, fiber));
        }
        for i in 0..p.n {
            for j in 0..p.n {
                for a in 0..m {
                    let g = elem_off + (i * p.n + j) * m + a;
                    for x in 0..fiber {
                        entries.push((g, point_off + j * fiber + x, point_off + i * fiber + p.perms[a][x]));
                    }
                }
            }
        }
        elem_off += p.n * p.n * m;
        point_off += p.n * fiber;
        base_off += p.n;
    }
    let perm = shuffled(rng, groupoid.len());
    let groupoid = relabel(&groupoid, &perm);
    for e in &mut entries {
        e.0 = perm[e.0];
    }
    let nk = q.len();
    let space = FiberedSpace::new(
        (0..base_off).map(|b| format!("u{b}")).collect(),
        (0..nk).map(|x| format!("x{x}")).collect(),
        q,
        random_metric(rng, nk),
        random_metric(rng, base_off),
    )
    .expect("random fibered space");
    RandomAction {
        groupoid,
        space,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::GroupoidAction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let size = rng.random_range(3..=30);
            assert_eq!(random_groupoid(&mut rng, size).len(), size);
            let a = random_action(&mut rng, 20, 40);
            assert!(a.space.point_count() <= 20);
            GroupoidAction::new(a.groupoid, a.space, &a.entries).unwrap();
        }
    }
}
