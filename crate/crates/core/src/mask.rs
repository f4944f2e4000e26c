//! Fixed-width bit masks over the vertex set `[n]`.
//!
//! Vertex `v` (1-based) lives at bit `v - 1`. All masks built for the same `n`
//! have the same word count, so binary operations zip word by word.

use smallvec::SmallVec;

use crate::Vertex;

/// Largest supported vertex count.
pub const MAX_VERTICES: u32 = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mask {
    words: SmallVec<[u64; 4]>,
}

#[inline]
pub fn words_for(n: u32) -> usize {
    (n as usize).div_ceil(64).max(1)
}

impl Mask {
    pub fn empty(n: u32) -> Self {
        Mask {
            words: SmallVec::from_elem(0, words_for(n)),
        }
    }

    pub fn from_vertices(n: u32, vertices: &[Vertex]) -> Self {
        let mut m = Mask::empty(n);
        for &v in vertices {
            m.insert(v);
        }
        m
    }

    /// Mask of every vertex in `[n]`.
    pub fn full(n: u32) -> Self {
        let mut m = Mask::empty(n);
        for v in 1..=n {
            m.insert(v);
        }
        m
    }

    #[inline]
    pub fn insert(&mut self, v: Vertex) {
        let i = (v - 1) as usize;
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: Vertex) {
        let i = (v - 1) as usize;
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        let i = (v - 1) as usize;
        self.words
            .get(i / 64)
            .is_some_and(|w| w & (1u64 << (i % 64)) != 0)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn intersects(&self, other: &Mask) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Mask) -> bool {
        !self.intersects(other)
    }

    #[inline]
    pub fn intersection_count(&self, other: &Mask) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `self ⊆ other`.
    #[inline]
    pub fn is_subset(&self, other: &Mask) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn union_with(&mut self, other: &Mask) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &Mask) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
    }

    #[inline]
    pub fn difference_with(&mut self, other: &Mask) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    /// Smallest vertex in the mask.
    pub fn first(&self) -> Option<Vertex> {
        self.words.iter().enumerate().find_map(|(i, &w)| {
            (w != 0).then(|| (i * 64 + w.trailing_zeros() as usize + 1) as Vertex)
        })
    }

    /// Vertices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some((i * 64 + b + 1) as Vertex)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }
}
