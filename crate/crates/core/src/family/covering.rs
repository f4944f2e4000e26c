//! Exact covering number by iterative deepening.

use super::{matching_number, Cover, Family};
use crate::mask::Mask;
use crate::Vertex;

/// `τ(F)` with a minimum cover as witness. `τ(∅) = 0`. A family holding the
/// empty edge (a degenerate link) has no cover; its size is `usize::MAX`.
///
/// Depth `d` runs upward from the size of a greedy matching (a lower bound)
/// until a cover is found; the union of that greedy matching is a cover of size
/// `k·|M|`, which caps the search.
pub fn covering_number(f: &Family) -> (usize, Cover) {
    if f.k() == 0 && !f.is_empty() {
        return (usize::MAX, Cover::default());
    }
    let live: Vec<usize> = (0..f.len()).collect();
    let greedy = disjoint_lower_bound(f, &live);
    let cap = f.k() as usize * greedy.len();
    for depth in greedy.len()..cap {
        if let Some(c) = cover_within(f, depth) {
            return (c.vertices.len(), c);
        }
    }
    let mut vertices: Vec<Vertex> = greedy
        .iter()
        .flat_map(|&i| f.edge(i).iter().copied())
        .collect();
    vertices.sort_unstable();
    (vertices.len(), Cover { vertices })
}

/// A cover with at most `depth` vertices, if one exists.
pub fn cover_within(f: &Family, depth: usize) -> Option<Cover> {
    if f.k() == 0 {
        // the empty edge cannot be met
        return f.is_empty().then(Cover::default);
    }
    let live: Vec<usize> = (0..f.len()).collect();
    let mut chosen = Vec::new();
    if search(f, &live, depth, &mut chosen) {
        chosen.sort_unstable();
        Some(Cover { vertices: chosen })
    } else {
        None
    }
}

/// `F` is trivial when `ν(F) = τ(F)`. Since `ν ≤ τ` always, this only has to
/// test for a cover of size `ν`.
pub fn is_trivial(f: &Family) -> bool {
    let (nu, _) = matching_number(f);
    cover_within(f, nu).is_some()
}

/// Indices of a greedy set of pairwise disjoint edges among `live`.
fn disjoint_lower_bound(f: &Family, live: &[usize]) -> Vec<usize> {
    let mut used = Mask::empty(f.n());
    let mut out = Vec::new();
    for &i in live {
        let m = &f.masks()[i];
        if m.is_disjoint(&used) {
            used.union_with(m);
            out.push(i);
        }
    }
    out
}

fn search(f: &Family, uncovered: &[usize], depth: usize, chosen: &mut Vec<Vertex>) -> bool {
    let Some(&first) = uncovered.first() else {
        return true;
    };
    if depth == 0 || disjoint_lower_bound(f, uncovered).len() > depth {
        return false;
    }
    // branch on the first uncovered edge, high residual degree first
    let mut order: Vec<(usize, Vertex)> = f
        .edge(first)
        .iter()
        .map(|&v| {
            let deg = uncovered.iter().filter(|&&i| f.masks()[i].contains(v)).count();
            (deg, v)
        })
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, v) in order {
        let rest: Vec<usize> = uncovered
            .iter()
            .copied()
            .filter(|&i| !f.masks()[i].contains(v))
            .collect();
        chosen.push(v);
        if search(f, &rest, depth - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}
