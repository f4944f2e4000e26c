//! Exact extremal values inside a host family.
//!
//! Everything here rests on one reduction: `ν(G) ≤ s` exactly when `G`
//! contains no `s + 1` pairwise disjoint edges. The largest sub-family with
//! `ν ≤ s` is therefore the host minus a minimum hitting set of its
//! `(s + 1)`-matchings. The solver works on the kept side: it grows a family
//! edge by edge, counts how many edges of each `(s + 1)`-matching are already
//! kept, and forbids the last edge of any matching that has `s` kept edges.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::family::{cover_within, covering_number, has_matching_of_size, matching_number};
use crate::combinatorics::{binomial_u128, Combinations};
use crate::family::{Family, Matching};
use crate::mask::Mask;
use crate::sampler::{max_trivial, TrivialMode};
use crate::{Error, Result, Vertex};

pub const DEFAULT_MATCHING_CAP: usize = 10_000_000;

#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    /// Largest number of `(s + 1)`-matchings to enumerate.
    pub matching_cap: usize,
    /// Cooperative deadline, checked every few thousand search nodes.
    pub deadline: Option<Instant>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            matching_cap: DEFAULT_MATCHING_CAP,
            deadline: None,
        }
    }
}

/// All matchings of exactly `m` edges, each listed in edge order, the list in
/// lexicographic order.
pub fn enumerate_matchings(f: &Family, m: usize) -> Result<Vec<Matching>> {
    enumerate_matchings_capped(f, m, DEFAULT_MATCHING_CAP)
}

pub fn enumerate_matchings_capped(f: &Family, m: usize, cap: usize) -> Result<Vec<Matching>> {
    let flat = matching_indices(f, m, cap)?;
    Ok(flat
        .chunks_exact(m.max(1))
        .map(|c| Matching {
            edges: c.iter().map(|&i| f.edge(i as usize).to_vec()).collect(),
        })
        .collect())
}

/// Edge indices of every `m`-matching, flattened `m` at a time.
fn matching_indices(f: &Family, m: usize, cap: usize) -> Result<Vec<u32>> {
    if m == 0 {
        return Err(Error::Range("matching size must be at least 1".into()));
    }
    fn go(
        f: &Family,
        m: usize,
        cap: usize,
        start: usize,
        used: &mut Mask,
        stack: &mut Vec<u32>,
        out: &mut Vec<u32>,
    ) -> Result<()> {
        if stack.len() == m {
            if out.len() / m >= cap {
                return Err(Error::Explosion { cap });
            }
            out.extend_from_slice(stack);
            return Ok(());
        }
        let need = m - stack.len();
        for i in start..f.len() {
            if f.len() - i < need {
                break;
            }
            let e = &f.masks()[i];
            if e.is_disjoint(used) {
                used.union_with(e);
                stack.push(i as u32);
                go(f, m, cap, i + 1, used, stack, out)?;
                stack.pop();
                used.difference_with(e);
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    go(f, m, cap, 0, &mut Mask::empty(f.n()), &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Number of `m`-matchings, failing past `cap`.
pub fn count_matchings(f: &Family, m: usize, cap: usize) -> Result<usize> {
    Ok(matching_indices(f, m, cap)?.len() / m)
}

/// The largest sub-family of `host` with `ν ≤ s`.
pub fn max_family_nu_le(host: &Family, s: usize) -> Result<(usize, Family)> {
    max_family_nu_le_with(host, s, &OracleLimits::default())
}

pub fn max_family_nu_le_with(
    host: &Family,
    s: usize,
    limits: &OracleLimits,
) -> Result<(usize, Family)> {
    if s == 0 {
        return Ok((0, Family::empty(host.n(), host.k())));
    }
    if has_matching_of_size(host, s + 1).is_none() {
        return Ok((host.len(), host.clone()));
    }
    let incumbent = max_trivial(host, s.min(host.n() as usize) as u32, TrivialMode::Auto)?;
    let seed: Vec<usize> = {
        let m = host.mask_of(&incumbent.set);
        (0..host.len()).filter(|&i| host.masks()[i].intersects(&m)).collect()
    };
    let seed = match dense_seed(host, s) {
        Some(clique) if clique.len() > seed.len() => clique,
        _ => seed,
    };
    let mut p = Packing::new(host, s, limits, None)?;
    p.best = seed;
    p.solve()?;
    let fam = host.select(p.best.iter().copied());
    Ok((fam.len(), fam))
}

/// Work budget (vertex subsets times host edges) for [`dense_seed`].
const DENSE_SEED_BUDGET: u128 = 50_000_000;

/// Edges of the host inside the best vertex set of size `k(s + 1) − 1`.
/// Such a family has `ν ≤ s` and is the other extremal shape at `p = 1`;
/// skipped when the scan would exceed [`DENSE_SEED_BUDGET`].
fn dense_seed(host: &Family, s: usize) -> Option<Vec<usize>> {
    let m = host.k() as usize * (s + 1) - 1;
    let support = host.support().to_vec();
    if m >= support.len() {
        return None;
    }
    let subsets = binomial_u128(support.len() as u64, m as u64)?;
    if subsets.saturating_mul(host.len() as u128) > DENSE_SEED_BUDGET {
        return None;
    }
    let mut best: Vec<usize> = Vec::new();
    for set in Combinations::new(support, m) {
        let u = host.mask_of(&set);
        let inside: Vec<usize> = (0..host.len()).filter(|&i| host.masks()[i].is_subset(&u)).collect();
        if inside.len() > best.len() {
            best = inside;
        }
    }
    Some(best)
}

/// The largest non-trivial sub-family of `host` with `ν ≤ s`, if any exists.
///
/// Non-trivial with `ν ≤ s` means `ν = j` and `τ ≥ j + 1` for some
/// `1 ≤ j ≤ s`, so the answer is the best over `j` of the largest family with
/// `ν ≤ j` and `τ ≥ j + 1`. `τ ≥ j + 1` is inherited by supersets, so a
/// branch whose kept edges plus candidates have a `j`-cover is cut.
pub fn max_nontrivial_nu_le(
    host: &Family,
    s: usize,
    limits: &OracleLimits,
) -> Result<Option<(usize, Family)>> {
    let mut best: Option<Vec<usize>> = None;
    for j in 1..=s {
        let mut p = Packing::new(host, j, limits, Some(j))?;
        p.best = Vec::new();
        p.floor = best.as_ref().map_or(0, |b| b.len());
        p.solve()?;
        if p.found {
            best = Some(p.best.clone());
        }
    }
    Ok(best.map(|b| {
        let f = host.select(b);
        (f.len(), f)
    }))
}

/// Outcome of comparing the best non-trivial and best trivial sub-families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub s: usize,
    pub host_size: usize,
    pub max_trivial_size: usize,
    pub best_trivial_s: Vec<Vertex>,
    pub max_trivial_exact: bool,
    pub max_nontrivial_size: Option<usize>,
    pub nontrivial_witness: Option<Family>,
    pub optimum_size: usize,
    pub optimum: Family,
    pub optimum_nu: usize,
    pub optimum_tau: usize,
    /// Every non-trivial `F` with `ν(F) ≤ s` is strictly smaller than the
    /// best trivial family `host(Ŝ)`. Vacuous when none exists.
    pub conclusion_holds: bool,
    /// Every maximum-size family with `ν ≤ s` is trivial.
    pub all_optima_trivial: bool,
}

pub fn theorem_verdict(host: &Family, s: usize) -> Result<Verdict> {
    theorem_verdict_with(host, s, &OracleLimits::default())
}

pub fn theorem_verdict_with(host: &Family, s: usize, limits: &OracleLimits) -> Result<Verdict> {
    if s == 0 {
        return Err(Error::Range("s must be at least 1".into()));
    }
    let triv = max_trivial(host, (s as u32).min(host.n()), TrivialMode::Auto)?;
    let (optimum_size, optimum) = max_family_nu_le_with(host, s, limits)?;
    let nontrivial = max_nontrivial_nu_le(host, s, limits)?;
    let max_nontrivial_size = nontrivial.as_ref().map(|(n, _)| *n);
    let (optimum_nu, _) = matching_number(&optimum);
    let (optimum_tau, _) = covering_number(&optimum);
    Ok(Verdict {
        s,
        host_size: host.len(),
        max_trivial_size: triv.size,
        best_trivial_s: triv.set,
        max_trivial_exact: triv.exact,
        conclusion_holds: max_nontrivial_size.is_none_or(|m| m < triv.size),
        all_optima_trivial: max_nontrivial_size.is_none_or(|m| m < optimum_size),
        max_nontrivial_size,
        nontrivial_witness: nontrivial.map(|(_, f)| f),
        optimum_size,
        optimum,
        optimum_nu,
        optimum_tau,
    })
}

/// Branch and bound over kept edges, in the style of colour-bounded maximum
/// clique search. Candidates are grouped greedily into classes of pairwise
/// disjoint edges; at most `s` edges of a class can be kept together, which
/// bounds every prefix of the class-ordered candidate list.
struct Packing<'a> {
    host: &'a Family,
    s: usize,
    limits: &'a OracleLimits,
    /// Edge indices of matching `i` live at `members[i*(s+1)..][..s+1]`.
    members: Vec<u32>,
    by_edge: Vec<Vec<u32>>,
    kept_in: Vec<u16>,
    forbid: Vec<u32>,
    current: Vec<usize>,
    best: Vec<usize>,
    /// Only families strictly larger than this are recorded.
    floor: usize,
    found: bool,
    /// `Some(j)`: only record families with no cover of size `j`.
    nontrivial: Option<usize>,
    nodes: u64,
}

impl<'a> Packing<'a> {
    fn new(
        host: &'a Family,
        s: usize,
        limits: &'a OracleLimits,
        nontrivial: Option<usize>,
    ) -> Result<Self> {
        let members = matching_indices(host, s + 1, limits.matching_cap)?;
        let count = members.len() / (s + 1);
        let mut by_edge = vec![Vec::new(); host.len()];
        for (mi, chunk) in members.chunks_exact(s + 1).enumerate() {
            for &e in chunk {
                by_edge[e as usize].push(mi as u32);
            }
        }
        Ok(Packing {
            host,
            s,
            limits,
            members,
            by_edge,
            kept_in: vec![0; count],
            forbid: vec![0; host.len()],
            current: Vec::new(),
            best: Vec::new(),
            floor: 0,
            found: false,
            nontrivial,
            nodes: 0,
        })
    }

    fn target(&self) -> usize {
        self.best.len().max(self.floor)
    }

    fn solve(&mut self) -> Result<()> {
        let all: Vec<usize> = (0..self.host.len()).collect();
        self.expand(all)
    }

    fn keep(&mut self, e: usize, delta: i8) {
        let w = self.s + 1;
        for k in 0..self.by_edge[e].len() {
            let mi = self.by_edge[e][k] as usize;
            if delta > 0 {
                self.kept_in[mi] += 1;
            }
            if self.kept_in[mi] as usize == self.s {
                for &other in &self.members[mi * w..(mi + 1) * w] {
                    let o = other as usize;
                    if o != e && !self.current.contains(&o) {
                        if delta > 0 {
                            self.forbid[o] += 1;
                        } else {
                            self.forbid[o] -= 1;
                        }
                    }
                }
            }
            if delta < 0 {
                self.kept_in[mi] -= 1;
            }
        }
    }

    fn family_of(&self, idx: impl Iterator<Item = usize>) -> Family {
        self.host.select(idx)
    }

    fn expand(&mut self, cand: Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes % 4096 == 1 {
            if let Some(d) = self.limits.deadline {
                if Instant::now() >= d {
                    return Err(Error::Deadline);
                }
            }
        }
        if let Some(j) = self.nontrivial {
            let all = self.family_of(self.current.iter().chain(&cand).copied());
            if cover_within(&all, j).is_some() {
                return Ok(());
            }
        }
        if self.current.len() > self.target() {
            let accept = match self.nontrivial {
                None => true,
                Some(j) => {
                    let kept = self.family_of(self.current.iter().copied());
                    cover_within(&kept, j).is_none()
                }
            };
            if accept {
                self.best = self.current.clone();
                self.found = true;
            }
        }
        if cand.is_empty() {
            return Ok(());
        }
        let (order, bound) = if self.current.is_empty() {
            // one-off tighter bound at the root
            let (a, b) = self.colour(&cand);
            let (c, d) = self.matching_colour(&cand);
            if d.last() < b.last() {
                (c, d)
            } else {
                (a, b)
            }
        } else {
            self.colour(&cand)
        };
        for i in (0..order.len()).rev() {
            if self.current.len() + bound[i] <= self.target() {
                return Ok(());
            }
            let v = order[i];
            // current must not contain v while forbids are applied
            self.keep(v, 1);
            self.current.push(v);
            let next: Vec<usize> = order[..i]
                .iter()
                .copied()
                .filter(|&u| self.forbid[u] == 0)
                .collect();
            let r = self.expand(next);
            self.current.pop();
            self.keep(v, -1);
            r?;
        }
        Ok(())
    }

    /// Candidates reordered by class (greedy first fit), and for each prefix
    /// the bound `Σ_class min(|class ∩ prefix|, s)`.
    fn colour(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let masks = self.host.masks();
        let mut classes: Vec<(Mask, Vec<usize>)> = Vec::new();
        for &v in cand {
            match classes.iter_mut().find(|(u, _)| u.is_disjoint(&masks[v])) {
                Some((u, members)) => {
                    u.union_with(&masks[v]);
                    members.push(v);
                }
                None => classes.push((masks[v].clone(), vec![v])),
            }
        }
        self.prefix_bounds(classes.into_iter().map(|(_, m)| m), cand.len())
    }

    /// Classes made by repeatedly removing a maximum matching. Slower than
    /// first fit but much tighter on near-complete hosts.
    fn matching_colour(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut left: Vec<usize> = cand.to_vec();
        let mut classes = Vec::new();
        while !left.is_empty() {
            let (_, m) = matching_number(&self.host.select(left.iter().copied()));
            let class: Vec<usize> = m
                .edges
                .iter()
                .map(|e| self.host.edges().binary_search(e).expect("edge of the host"))
                .collect();
            left.retain(|i| !class.contains(i));
            classes.push(class);
        }
        self.prefix_bounds(classes.into_iter(), cand.len())
    }

    fn prefix_bounds(
        &self,
        classes: impl Iterator<Item = Vec<usize>>,
        len: usize,
    ) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(len);
        let mut bound = Vec::with_capacity(len);
        let mut total = 0;
        for members in classes {
            for (pos, v) in members.into_iter().enumerate() {
                if pos < self.s {
                    total += 1;
                }
                order.push(v);
                bound.push(total);
            }
        }
        (order, bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::is_trivial;

    fn family(n: u32, k: u32, edges: &[&[Vertex]]) -> Family {
        Family::new(n, k, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_matchings(&Family::complete(4, 2), 2).unwrap().len(), 3);
        let star = family(5, 2, &[&[1, 2], &[1, 3], &[1, 4], &[1, 5]]);
        assert!(enumerate_matchings(&star, 2).unwrap().is_empty());
        let all = enumerate_matchings(&Family::complete(6, 3), 2).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0].edges, vec![vec![1, 2, 3], vec![4, 5, 6]]);
        assert!(matches!(
            enumerate_matchings_capped(&Family::complete(6, 3), 2, 5),
            Err(Error::Explosion { cap: 5 })
        ));
        assert!(enumerate_matchings(&star, 0).is_err());
    }

    #[test]
    fn max_family_examples() {
        let k5 = Family::complete(5, 2);
        let (size, f) = max_family_nu_le(&k5, 1).unwrap();
        assert_eq!(size, 4);
        assert!(f.common_vertex().is_some());
        assert_eq!(max_family_nu_le(&k5, 2).unwrap().0, 10);
        let star = family(5, 2, &[&[1, 2], &[1, 3], &[1, 4], &[1, 5]]);
        assert_eq!(max_family_nu_le(&star, 1).unwrap().1, star);
        assert_eq!(max_family_nu_le(&k5, 0).unwrap().0, 0);
    }

    #[test]
    fn verdict_on_k5() {
        let v = theorem_verdict(&Family::complete(5, 2), 1).unwrap();
        assert_eq!(v.max_trivial_size, 4);
        assert_eq!(v.max_nontrivial_size, Some(3));
        assert!(v.conclusion_holds);
        assert!(v.all_optima_trivial);
        let w = v.nontrivial_witness.unwrap();
        assert_eq!(matching_number(&w).0, 1);
        assert!(!is_trivial(&w));
    }

    #[test]
    fn verdict_on_empty_host() {
        let v = theorem_verdict(&Family::empty(6, 2), 1).unwrap();
        assert!(v.conclusion_holds);
        assert_eq!(v.max_nontrivial_size, None);
        assert!(theorem_verdict(&Family::empty(6, 2), 0).is_err());
    }

    #[test]
    fn verdict_on_k9_3() {
        let v = theorem_verdict(&Family::complete(9, 3), 1).unwrap();
        assert_eq!(v.max_trivial_size, 28);
        assert_eq!(v.optimum_size, 28);
        // C(8,2) − C(5,2) + 1
        assert_eq!(v.max_nontrivial_size, Some(19));
        assert!(v.conclusion_holds);
    }

    #[test]
    fn expired_deadline_aborts() {
        let limits = OracleLimits {
            deadline: Some(Instant::now()),
            ..OracleLimits::default()
        };
        let host = Family::complete(9, 3);
        assert!(matches!(
            max_nontrivial_nu_le(&host, 2, &limits),
            Err(Error::Deadline)
        ));
    }
}
