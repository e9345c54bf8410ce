#![allow(dead_code)]

use std::collections::VecDeque;

use genv::envelope::FiberMap;
use genv::sample::random_action;
use genv::{FiberedSpace, GroupoidAction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn action(seed: u64, max_points: usize, max_elements: usize) -> GroupoidAction {
    let a = random_action(&mut rng(seed), max_points, max_elements);
    GroupoidAction::new(a.groupoid, a.space, &a.entries).expect("sampled actions are valid")
}

/// Connected components of an undirected graph, by breadth-first search.
/// Returns a component label per vertex.
pub fn components(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn count(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

/// Point pairs `(x, θx)` of a set of fiber maps.
pub fn point_edges<'a>(space: &'a FiberedSpace, maps: &'a [FiberMap]) -> impl Iterator<Item = (usize, usize)> + 'a {
    maps.iter()
        .flat_map(move |m| space.fiber(m.src()).iter().copied().zip(m.image().iter().copied()))
}

/// Orbit classes as sorted lists of points, sorted.
pub fn classes_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); count(labels)];
    for (x, &l) in labels.iter().enumerate() {
        out[l].push(x);
    }
    out.sort();
    out
}
