//! Valley-free path enumeration over an AS graph.
//!
//! A path is valid when its hops read as zero or more customer-to-provider
//! steps, at most one peering step, then zero or more provider-to-customer
//! steps, and no AS repeats.

use std::collections::BTreeMap;

use super::graph::{AsGraph, AsId, Link};

pub type Adjacency = BTreeMap<AsId, Vec<(AsId, Link)>>;

fn link(adj: &Adjacency, from: AsId, to: AsId) -> Option<Link> {
    adj.get(&from)?
        .iter()
        .find(|(n, _)| *n == to)
        .map(|&(_, l)| l)
}

/// True once the path may only descend further.
fn next_phase(descending: bool, step: Link) -> Option<bool> {
    match (descending, step) {
        (false, Link::Up) => Some(false),
        (false, Link::Peer) | (false, Link::Down) | (true, Link::Down) => Some(true),
        (true, _) => None,
    }
}

/// Standalone validity predicate: simple, adjacent hops, valley-free.
pub fn is_valley_free(adj: &Adjacency, path: &[AsId]) -> bool {
    if path.is_empty() {
        return false;
    }
    for (i, a) in path.iter().enumerate() {
        if path[i + 1..].contains(a) {
            return false;
        }
    }
    let mut descending = false;
    for w in path.windows(2) {
        let Some(step) = link(adj, w[0], w[1]) else {
            return false;
        };
        match next_phase(descending, step) {
            Some(d) => descending = d,
            None => return false,
        }
    }
    true
}

fn extend(
    adj: &Adjacency,
    dst: AsId,
    max_hops: usize,
    descending: bool,
    path: &mut Vec<AsId>,
    out: &mut Vec<Vec<AsId>>,
) {
    let here = *path.last().expect("path starts at the source");
    if here == dst {
        out.push(path.clone());
        return;
    }
    if path.len() >= max_hops {
        return;
    }
    let Some(neighbors) = adj.get(&here) else {
        return;
    };
    for &(next, step) in neighbors {
        if path.contains(&next) {
            continue;
        }
        if let Some(d) = next_phase(descending, step) {
            path.push(next);
            extend(adj, dst, max_hops, d, path, out);
            path.pop();
        }
    }
}

/// All valid paths from `src` to `dst` with at most `max_hops` ASes, sorted
/// by length then lexicographically by AS sequence.
pub fn all_valley_free_paths(
    adj: &Adjacency,
    src: AsId,
    dst: AsId,
    max_hops: usize,
) -> Vec<Vec<AsId>> {
    let mut out = Vec::new();
    if src == dst || max_hops < 2 || !adj.contains_key(&src) {
        return out;
    }
    extend(adj, dst, max_hops, false, &mut vec![src], &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// The `k` shortest valid paths (fewer if not that many exist).
pub fn enumerate_paths(
    graph: &AsGraph,
    src: AsId,
    dst: AsId,
    k: usize,
    max_hops: usize,
) -> Vec<Vec<AsId>> {
    enumerate_paths_in(&graph.adjacency(), src, dst, k, max_hops)
}

/// Same as [`enumerate_paths`] over a precomputed adjacency.
pub fn enumerate_paths_in(
    adj: &Adjacency,
    src: AsId,
    dst: AsId,
    k: usize,
    max_hops: usize,
) -> Vec<Vec<AsId>> {
    let mut paths = all_valley_free_paths(adj, src, dst, max_hops);
    paths.truncate(k);
    paths
}
