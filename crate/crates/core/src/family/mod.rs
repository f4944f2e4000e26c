//! Immutable k-uniform hypergraphs on `[n]` and the family operators used
//! throughout the crate: restriction `F(R̄, Q̂)`, link `F(Q)`, and the
//! generated family `⟨B⟩`.

mod covering;
mod format;
mod matching;

pub use covering::{cover_within, covering_number, is_trivial};
pub use format::{parse_edge_list, read_edge_list, write_edge_list};
pub use matching::{greedy_matching, has_matching_of_size, matching_number};

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, Combinations};
use crate::mask::{Mask, MAX_VERTICES};
use crate::{Error, Result, Vertex};

/// A k-uniform hypergraph on the vertex set `[n]` (1-based).
///
/// Edges are stored sorted, deduplicated, and in lexicographic order, each
/// with a precomputed bit mask for constant-time disjointness tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct Family {
    n: u32,
    k: u32,
    edges: Vec<Vec<Vertex>>,
    masks: Vec<Mask>,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    n: u32,
    k: u32,
    edges: Vec<Vec<Vertex>>,
}

impl TryFrom<FamilyRepr> for Family {
    type Error = Error;

    fn try_from(r: FamilyRepr) -> Result<Self> {
        Family::new(r.n, r.k, r.edges)
    }
}

impl From<Family> for FamilyRepr {
    fn from(f: Family) -> Self {
        FamilyRepr {
            n: f.n,
            k: f.k,
            edges: f.edges,
        }
    }
}

/// A set of pairwise disjoint edges; the certificate for `ν`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<Vec<Vertex>>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Union of the matched edges.
    pub fn vertices(&self) -> Vec<Vertex> {
        let set: BTreeSet<Vertex> = self.edges.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn is_pairwise_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().flatten().all(|v| seen.insert(*v))
    }
}

/// A vertex set meeting every edge; the certificate for `τ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub vertices: Vec<Vertex>,
}

/// Sorts and deduplicates a vertex list.
pub fn canonical_set(vertices: &[Vertex]) -> Vec<Vertex> {
    let mut v = vertices.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl Family {
    /// Builds a family, canonicalizing edge order and dropping duplicates.
    pub fn new(n: u32, k: u32, edges: Vec<Vec<Vertex>>) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::Capacity(format!(
                "n = {n} exceeds the supported maximum of {MAX_VERTICES}"
            )));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            let len_before = e.len();
            e.dedup();
            if e.len() != len_before || e.len() != k as usize {
                return Err(Error::Parse(format!(
                    "edge {e:?} does not have exactly {k} distinct vertices"
                )));
            }
            if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::Parse(format!("vertex {v} outside [1, {n}]")));
            }
            canon.push(e);
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self::from_canonical(n, k, canon))
    }

    /// Builds a family from edges already sorted, distinct, and in range.
    pub(crate) fn from_canonical(n: u32, k: u32, edges: Vec<Vec<Vertex>>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let masks = edges.iter().map(|e| Mask::from_vertices(n, e)).collect();
        Family { n, k, edges, masks }
    }

    pub fn empty(n: u32, k: u32) -> Self {
        Self::from_canonical(n, k, Vec::new())
    }

    /// The complete k-graph `C([n], k)`.
    pub fn complete(n: u32, k: u32) -> Self {
        let edges = Combinations::new((1..=n).collect(), k as usize).collect();
        Self::from_canonical(n, k, edges)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Vec<Vertex>] {
        &self.edges
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.edges[i]
    }

    pub fn contains_edge(&self, edge: &[Vertex]) -> bool {
        self.edges.binary_search_by(|e| e.as_slice().cmp(edge)).is_ok()
    }

    /// Vertices lying in at least one edge.
    pub fn support(&self) -> Mask {
        let mut m = Mask::empty(self.n);
        for e in &self.masks {
            m.union_with(e);
        }
        m
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// Degrees indexed by vertex (index 0 unused).
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n as usize + 1];
        for v in self.edges.iter().flatten() {
            d[*v as usize] += 1;
        }
        d
    }

    pub fn mask_of(&self, vertices: &[Vertex]) -> Mask {
        Mask::from_vertices(self.n, vertices)
    }

    /// Sub-family made of the edges at `indices` (any order).
    pub fn select(&self, indices: impl IntoIterator<Item = usize>) -> Family {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        Family {
            n: self.n,
            k: self.k,
            edges: idx.iter().map(|&i| self.edges[i].clone()).collect(),
            masks: idx.iter().map(|&i| self.masks[i].clone()).collect(),
        }
    }

    fn retain(&self, mut keep: impl FnMut(&Mask) -> bool) -> Family {
        self.select((0..self.len()).filter(|&i| keep(&self.masks[i])))
    }

    /// `F(R̄, Q̂)`: edges disjoint from `avoid` that meet `meet`. `meet = None`
    /// drops the meet condition, giving `F(R̄)`.
    pub fn filter(&self, avoid: &[Vertex], meet: Option<&[Vertex]>) -> Result<Family> {
        let r = self.mask_of(avoid);
        match meet {
            None => Ok(self.retain(|m| m.is_disjoint(&r))),
            Some(q) => {
                if let Some(&v) = q.iter().find(|v| avoid.contains(v)) {
                    return Err(Error::Overlap(v));
                }
                let q = self.mask_of(q);
                Ok(self.retain(|m| m.is_disjoint(&r) && m.intersects(&q)))
            }
        }
    }

    /// `F − T`: delete the vertices of `t` and every edge touching them.
    pub fn remove_vertices(&self, t: &[Vertex]) -> Family {
        let r = self.mask_of(t);
        self.retain(|m| m.is_disjoint(&r))
    }

    /// Edges meeting the vertex set `q` (`F(Q̂)`).
    pub fn meeting(&self, q: &[Vertex]) -> Family {
        let q = self.mask_of(q);
        self.retain(|m| m.intersects(&q))
    }

    /// `F(Q) = {F ∖ Q : Q ⊆ F ∈ F}`, a `(k − |Q|)`-uniform family.
    pub fn link(&self, q: &[Vertex]) -> Result<Family> {
        let q = canonical_set(q);
        if q.len() > self.k as usize {
            return Err(Error::Size(format!(
                "link set of size {} exceeds uniformity {}",
                q.len(),
                self.k
            )));
        }
        let qm = self.mask_of(&q);
        let edges: Vec<Vec<Vertex>> = self
            .edges
            .iter()
            .zip(&self.masks)
            .filter(|(_, m)| qm.is_subset(m))
            .map(|(e, _)| e.iter().copied().filter(|v| !q.contains(v)).collect())
            .collect();
        // removing a common subset keeps lexicographic order
        Ok(Family::from_canonical(self.n, self.k - q.len() as u32, edges))
    }

    /// Number of edges containing every vertex of `q` (`|F(Q)|`).
    pub fn link_size(&self, q: &[Vertex]) -> usize {
        let qm = self.mask_of(q);
        self.masks.iter().filter(|m| qm.is_subset(m)).count()
    }

    /// Every edge contains some member of `basis`, i.e. `F ⊆ ⟨B⟩`.
    pub fn is_generated_by(&self, basis: &[Vec<Vertex>]) -> bool {
        let bm: Vec<Mask> = basis.iter().map(|b| self.mask_of(b)).collect();
        self.masks
            .iter()
            .all(|m| bm.iter().any(|b| b.is_subset(m)))
    }

    /// `|F ∩ ⟨B⟩|`, counted by filtering.
    pub fn count_generated_by(&self, basis: &[Vec<Vertex>]) -> usize {
        let bm: Vec<Mask> = basis.iter().map(|b| self.mask_of(b)).collect();
        self.masks
            .iter()
            .filter(|m| bm.iter().any(|b| b.is_subset(m)))
            .count()
    }

    /// Some vertex lies in every edge (the family is a star). The empty family
    /// has no center.
    pub fn common_vertex(&self) -> Option<Vertex> {
        let mut it = self.masks.iter();
        let mut acc = it.next()?.clone();
        for m in it {
            acc.intersect_with(m);
        }
        acc.first()
    }

    pub fn is_intersecting(&self) -> bool {
        (0..self.len()).all(|i| (i + 1..self.len()).all(|j| self.masks[i].intersects(&self.masks[j])))
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.edges.iter().all(|e| other.contains_edge(e))
    }

    /// Edges of `self` not in `other`.
    pub fn difference(&self, other: &Family) -> Family {
        self.select((0..self.len()).filter(|&i| !other.contains_edge(&self.edges[i])))
    }
}

/// `⟨B⟩`: all k-subsets of `[n]` containing some member of `basis`.
pub fn generated(basis: &[Vec<Vertex>], n: u32, k: u32) -> Result<Family> {
    let mut out: BTreeSet<Vec<Vertex>> = BTreeSet::new();
    for member in basis {
        let g = check_member(member, n, k)?;
        let rest: Vec<Vertex> = (1..=n).filter(|v| !g.contains(v)).collect();
        for extra in Combinations::new(rest, k as usize - g.len()) {
            let mut e = g.clone();
            e.extend(extra);
            e.sort_unstable();
            out.insert(e);
        }
    }
    Ok(Family::from_canonical(n, k, out.into_iter().collect()))
}

/// `|⟨B⟩|` by inclusion–exclusion over the members of `basis` (at most 20).
pub fn generated_count(basis: &[Vec<Vertex>], n: u32, k: u32) -> Result<BigUint> {
    const MAX_MEMBERS: usize = 20;
    if basis.len() > MAX_MEMBERS {
        return Err(Error::Capacity(format!(
            "inclusion–exclusion supports at most {MAX_MEMBERS} members, got {}",
            basis.len()
        )));
    }
    let members: Vec<Mask> = basis
        .iter()
        .map(|b| check_member(b, n, k).map(|g| Mask::from_vertices(n, &g)))
        .collect::<Result<_>>()?;
    let mut total = BigInt::from(0);
    for pick in 1u32..(1u32 << members.len()) {
        let mut union = Mask::empty(n);
        for (i, m) in members.iter().enumerate() {
            if pick & (1 << i) != 0 {
                union.union_with(m);
            }
        }
        let u = union.count() as u64;
        let term = BigInt::from(if u <= k as u64 {
            binomial(n as u64 - u, k as u64 - u)
        } else {
            BigUint::from(0u32)
        });
        if pick.count_ones() % 2 == 1 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total.to_biguint().expect("inclusion–exclusion count is non-negative"))
}

fn check_member(member: &[Vertex], n: u32, k: u32) -> Result<Vec<Vertex>> {
    let g = canonical_set(member);
    if g.len() > k as usize {
        return Err(Error::Size(format!(
            "basis member {g:?} is larger than k = {k}"
        )));
    }
    if let Some(&v) = g.iter().find(|&&v| v == 0 || v > n) {
        return Err(Error::Range(format!("vertex {v} outside [1, {n}]")));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano_like() -> Family {
        Family::new(6, 3, vec![vec![1, 2, 3], vec![1, 4, 5], vec![2, 4, 6], vec![3, 5, 6]]).unwrap()
    }

    #[test]
    fn construction_canonicalizes() {
        let f = Family::new(4, 2, vec![vec![3, 1], vec![2, 1], vec![1, 3]]).unwrap();
        assert_eq!(f.edges(), &[vec![1, 2], vec![1, 3]]);
        assert!(Family::new(4, 2, vec![vec![1, 1]]).is_err());
        assert!(Family::new(4, 2, vec![vec![1, 5]]).is_err());
        assert!(Family::new(4, 2, vec![vec![1, 2, 3]]).is_err());
        assert!(matches!(Family::new(2000, 2, vec![]), Err(Error::Capacity(_))));
    }

    #[test]
    fn filter_examples() {
        let k4 = Family::complete(4, 2);
        let r = k4.filter(&[4], None).unwrap();
        assert_eq!(r.edges(), Family::complete(3, 2).edges());
        let star = k4.filter(&[], Some(&[1])).unwrap();
        assert_eq!(star.edges(), &[vec![1, 2], vec![1, 3], vec![1, 4]]);
        let f = fano_like().filter(&[1], Some(&[6])).unwrap();
        assert_eq!(f.edges(), &[vec![2, 4, 6], vec![3, 5, 6]]);
        assert!(matches!(k4.filter(&[1, 2], Some(&[2])), Err(Error::Overlap(2))));
    }

    #[test]
    fn link_examples() {
        let l = Family::complete(4, 2).link(&[1]).unwrap();
        assert_eq!(l.k(), 1);
        assert_eq!(l.edges(), &[vec![2], vec![3], vec![4]]);
        let l = fano_like().link(&[1, 2]).unwrap();
        assert_eq!(l.edges(), &[vec![3]]);
        let l = fano_like().link(&[1, 4, 5]).unwrap();
        assert_eq!(l.k(), 0);
        assert_eq!(l.edges(), &[Vec::<Vertex>::new()]);
        assert!(fano_like().link(&[1, 2, 3, 4]).is_err());
    }

    #[test]
    fn generated_examples() {
        let g = generated(&[vec![1]], 4, 2).unwrap();
        assert_eq!(g.edges(), &[vec![1, 2], vec![1, 3], vec![1, 4]]);
        let g = generated(&[vec![1, 2]], 5, 3).unwrap();
        assert_eq!(g.edges(), &[vec![1, 2, 3], vec![1, 2, 4], vec![1, 2, 5]]);
        let g = generated(&[vec![1], vec![2]], 4, 2).unwrap();
        assert_eq!(g.len(), 5);
        assert!(!g.contains_edge(&[3, 4]));
        assert!(matches!(generated(&[vec![1, 2, 3]], 5, 2), Err(Error::Size(_))));
    }

    #[test]
    fn generated_count_matches_materialized() {
        let basis = vec![vec![1, 2], vec![2, 3], vec![4], vec![1, 5, 6]];
        for k in 3..=5 {
            let f = generated(&basis, 8, k).unwrap();
            assert_eq!(generated_count(&basis, 8, k).unwrap(), BigUint::from(f.len()));
        }
    }

    #[test]
    fn star_and_intersecting_predicates() {
        let star = Family::new(5, 2, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![1, 5]]).unwrap();
        assert_eq!(star.common_vertex(), Some(1));
        assert!(star.is_intersecting());
        assert!(fano_like().is_intersecting());
        assert_eq!(fano_like().common_vertex(), None);
        assert!(!Family::complete(4, 2).is_intersecting());
    }
}
