//! Exact matching number by branch and bound.
//!
//! Edges are kept in lexicographic order, so the smallest vertex still covered
//! by the live edges is the first vertex of the first live edge, and the live
//! edges through it form a prefix of the live list. The search branches on
//! that vertex: match it through one of the prefix edges, or leave it
//! unmatched and drop the prefix.

use super::{Family, Matching};
use crate::mask::Mask;

/// Greedy maximal matching taking edges in lexicographic order.
pub fn greedy_matching(f: &Family) -> Matching {
    let mut used = Mask::empty(f.n());
    let mut edges = Vec::new();
    for (e, m) in f.edges().iter().zip(f.masks()) {
        if m.is_disjoint(&used) {
            used.union_with(m);
            edges.push(e.clone());
        }
    }
    Matching { edges }
}

/// `ν(F)` with a maximum matching as witness.
pub fn matching_number(f: &Family) -> (usize, Matching) {
    let mut s = Search::new(f, None);
    s.run();
    let size = s.best.len();
    (size, s.witness())
}

/// Whether `F` has a matching with `size` edges; stops at the first one found.
pub fn has_matching_of_size(f: &Family, size: usize) -> Option<Matching> {
    if size == 0 {
        return Some(Matching::default());
    }
    let mut s = Search::new(f, Some(size));
    s.run();
    (s.best.len() >= size).then(|| s.witness())
}

struct Search<'a> {
    f: &'a Family,
    k: usize,
    best: Vec<usize>,
    current: Vec<usize>,
    /// Stop once `best` reaches this size.
    target: usize,
}

impl<'a> Search<'a> {
    fn new(f: &'a Family, target: Option<usize>) -> Self {
        let k = f.k() as usize;
        let ceiling = if k == 0 {
            f.len()
        } else {
            (f.support().count() / k).min(f.len())
        };
        Search {
            f,
            k,
            best: Vec::new(),
            current: Vec::new(),
            target: target.unwrap_or(ceiling).min(ceiling),
        }
    }

    fn witness(&self) -> Matching {
        Matching {
            edges: self.best.iter().map(|&i| self.f.edge(i).to_vec()).collect(),
        }
    }

    fn run(&mut self) {
        if self.k == 0 {
            // only the empty edge can be present; it is disjoint from itself
            self.best = (0..self.f.len()).collect();
            return;
        }
        let masks = self.f.masks();
        let mut used = Mask::empty(self.f.n());
        for (i, m) in masks.iter().enumerate() {
            if m.is_disjoint(&used) {
                used.union_with(m);
                self.best.push(i);
            }
        }
        if self.best.len() >= self.target {
            return;
        }
        let live: Vec<usize> = (0..self.f.len()).collect();
        self.branch(&live);
    }

    /// Returns `true` once the target size is reached.
    fn branch(&mut self, live: &[usize]) -> bool {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
            if self.best.len() >= self.target {
                return true;
            }
        }
        if live.is_empty() || self.current.len() + self.upper_bound(live) <= self.best.len() {
            return false;
        }
        let masks = self.f.masks();
        let lead = self.f.edge(live[0])[0];
        let prefix = live
            .iter()
            .take_while(|&&i| self.f.edge(i)[0] == lead)
            .count();
        for &e in &live[..prefix] {
            let rest: Vec<usize> = live[prefix..]
                .iter()
                .copied()
                .filter(|&j| masks[j].is_disjoint(&masks[e]))
                .collect();
            self.current.push(e);
            let done = self.branch(&rest);
            self.current.pop();
            if done {
                return true;
            }
        }
        self.branch(&live[prefix..])
    }

    /// `min(|V(live)| / k, number of distinct leading vertices)`. Edges sharing
    /// a leading vertex pairwise intersect, so each such star contributes at
    /// most one matching edge.
    fn upper_bound(&self, live: &[usize]) -> usize {
        let masks = self.f.masks();
        let mut support = Mask::empty(self.f.n());
        let mut leaders = 0;
        let mut last = 0;
        for &i in live {
            support.union_with(&masks[i]);
            let lead = self.f.edge(i)[0];
            if lead != last {
                leaders += 1;
                last = lead;
            }
        }
        (support.count() / self.k).min(leaders)
    }
}
