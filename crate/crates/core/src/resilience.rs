//! Resilience tests, the greedy decomposition into resilient pieces, the fan
//! and branching cover constructions, and the proof-decomposition certificate.
//!
//! Every construction that calls for "a maximal matching of size ν" uses the
//! deterministic maximum matching returned by [`matching_number`]. A greedy
//! maximal matching can be smaller than ν, and then the cover guarantees fail.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_u128, Combinations};
use crate::family::{canonical_set, matching_number, Family};
use crate::mask::Mask;
use crate::{Error, Result, Vertex};

/// Largest number of deletion sets a resilience test will enumerate.
pub const RESILIENCE_LIMIT: u64 = 1_000_000;

/// Whether deleting any `t` vertices leaves `ν(F)` unchanged.
pub fn is_t_resilient(f: &Family, t: usize) -> Result<bool> {
    Ok(breaking_set(f, t)?.is_none())
}

/// A vertex set of size at most `t` whose deletion lowers `ν`, if any.
///
/// `ν` only drops under further deletion, so it suffices to try sets of size
/// exactly `min(t, |V(F)|)`, and only those meeting a fixed maximum matching.
pub fn breaking_set(f: &Family, t: usize) -> Result<Option<Vec<Vertex>>> {
    if t >= f.k() as usize {
        return Err(Error::Range(format!("t = {t} must be below k = {}", f.k())));
    }
    let (nu, m) = matching_number(f);
    if nu == 0 || t == 0 {
        return Ok(None);
    }
    let support = f.support().to_vec();
    let size = t.min(support.len());
    check_limit(support.len(), size)?;
    let matched = f.mask_of(&m.vertices());
    for del in Combinations::new(support, size) {
        if !del.iter().any(|&v| matched.contains(v)) {
            continue;
        }
        if matching_number(&f.remove_vertices(&del)).0 < nu {
            return Ok(Some(del));
        }
    }
    Ok(None)
}

fn check_limit(pool: usize, size: usize) -> Result<()> {
    match binomial_u128(pool as u64, size as u64) {
        Some(c) if c <= RESILIENCE_LIMIT as u128 => Ok(()),
        _ => Err(Error::Scale {
            cap: RESILIENCE_LIMIT,
        }),
    }
}

/// Output of [`greedy_decompose`]: disjoint deletion sets `T₁..T_ℓ` and the
/// resilient residual `H − (T₁ ∪ … ∪ T_ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub t: usize,
    pub sets: Vec<Vec<Vertex>>,
    pub residual: Family,
    /// `ν` before each deletion, then of the residual (`ℓ + 1` entries).
    pub nu_ladder: Vec<usize>,
}

/// Repeatedly deletes a smallest set that lowers `ν` (ties broken
/// lexicographically) until the family is `t`-resilient.
pub fn greedy_decompose(f: &Family, t: usize) -> Result<Decomposition> {
    if t >= f.k() as usize {
        return Err(Error::Range(format!("t = {t} must be below k = {}", f.k())));
    }
    let mut current = f.clone();
    let mut sets = Vec::new();
    let (nu, _) = matching_number(&current);
    let mut nu_ladder = vec![nu];
    loop {
        let Some(del) = smallest_breaking_set(&current, t)? else {
            break;
        };
        current = current.remove_vertices(&del);
        nu_ladder.push(matching_number(&current).0);
        sets.push(del);
    }
    Ok(Decomposition {
        t,
        sets,
        residual: current,
        nu_ladder,
    })
}

/// Smallest breaking set of size at most `t`, first in lexicographic order
/// among those of that size. Such a set lowers `ν` by exactly one.
fn smallest_breaking_set(f: &Family, t: usize) -> Result<Option<Vec<Vertex>>> {
    let (nu, m) = matching_number(f);
    if nu == 0 {
        return Ok(None);
    }
    let support = f.support().to_vec();
    let matched = f.mask_of(&m.vertices());
    for size in 1..=t.min(support.len()) {
        check_limit(support.len(), size)?;
        for del in Combinations::new(support.clone(), size) {
            if del.iter().any(|&v| matched.contains(v))
                && matching_number(&f.remove_vertices(&del)).0 < nu
            {
                return Ok(Some(del));
            }
        }
    }
    Ok(None)
}

/// A family of generators `B` with `F ⊆ ⟨B⟩`, together with the size bound
/// the construction guarantees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBasis {
    pub members: Vec<Vec<Vertex>>,
    pub declared_bound: u64,
}

impl CoverBasis {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn require_resilient(f: &Family, t: usize) -> Result<usize> {
    if let Some(witness) = breaking_set(f, t)? {
        return Err(Error::NotResilient { t, witness });
    }
    let nu = matching_number(f).0;
    if nu == 0 {
        return Err(Error::Range("the family has no edges to cover".into()));
    }
    Ok(nu)
}

fn saturating_pow(base: u64, exp: usize) -> u64 {
    (0..exp).fold(1u64, |acc, _| acc.saturating_mul(base))
}

/// Pairs `{y, z}` with `y` in a maximum matching of `F` and `z` in a maximum
/// matching of `F(ȳ)`. Requires `F` to be 1-resilient with `ν(F) = q ≥ 1`;
/// the result has at most `(kq)²` members.
pub fn fan_cover(f: &Family) -> Result<CoverBasis> {
    let q = require_resilient(f, 1)?;
    let y_set = matching_number(f).1.vertices();
    let mut members = BTreeSet::new();
    for &y in &y_set {
        let z_set = matching_number(&f.remove_vertices(&[y])).1.vertices();
        for z in z_set {
            assert_ne!(y, z, "F(ȳ) avoids y");
            members.insert(canonical_set(&[y, z]));
        }
    }
    Ok(CoverBasis {
        members: members.into_iter().collect(),
        declared_bound: saturating_pow(f.k() as u64 * q as u64, 2),
    })
}

/// The `(t + 1)`-stage branching process. Stage one seeds the vertices of a
/// maximum matching of `F` (or exactly the vertices of `x` when given); each
/// later stage extends a sequence `S` by every vertex of a maximum matching of
/// `F − S`. Returns the underlying sets of the full-length sequences.
///
/// Without `x`: `|B| ≤ (ks)^{t+1}` and `F ⊆ ⟨B⟩`. With `x`:
/// `|B| ≤ |x|(ks)^t` and `F(x̂) ⊆ ⟨B⟩`.
pub fn branching_cover(f: &Family, t: usize, x: Option<&[Vertex]>) -> Result<CoverBasis> {
    let s = require_resilient(f, t)?;
    let ks = f.k() as u64 * s as u64;
    let (seeds, declared_bound) = match x {
        None => (
            matching_number(f).1.vertices(),
            saturating_pow(ks, t + 1),
        ),
        Some(x) => {
            let x = canonical_set(x);
            if x.len() as u64 >= ks {
                return Err(Error::Size(format!(
                    "|X| = {} must be below ks = {ks}",
                    x.len()
                )));
            }
            if let Some(&v) = x.iter().find(|&&v| v == 0 || v > f.n()) {
                return Err(Error::Range(format!("vertex {v} outside [1, {}]", f.n())));
            }
            let bound = (x.len() as u64).saturating_mul(saturating_pow(ks, t));
            (x, bound)
        }
    };
    let mut level: Vec<Vec<Vertex>> = seeds.into_iter().map(|v| vec![v]).collect();
    for _ in 0..t {
        let mut next = Vec::new();
        for seq in &level {
            for v in matching_number(&f.remove_vertices(seq)).1.vertices() {
                let mut longer = seq.clone();
                longer.push(v);
                next.push(longer);
            }
        }
        level = next;
    }
    let members: BTreeSet<Vec<Vertex>> = level.iter().map(|s| canonical_set(s)).collect();
    Ok(CoverBasis {
        members: members.into_iter().collect(),
        declared_bound,
    })
}

/// How one part `Hᵢ` of the decomposition was classified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartClass {
    /// No edge meets `X` only inside `Hᵢ`.
    Empty,
    /// All edges contain `center`, and each meets `q_set` outside the center,
    /// so the part lies in `⟨D_{center, q_set}⟩`.
    Star { center: Vertex, q_set: Vec<Vertex> },
    /// `h_prime ∩ Hᵢ = {center}` and `center ∉ h_double`; every edge of the
    /// part meets `Hᵢ ∪ h_prime ∪ h_double` at least twice.
    NonTrivial {
        center: Vertex,
        h_prime: Vec<Vertex>,
        h_double: Vec<Vertex>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartCertificate {
    /// 1-based position of the matching edge; parts are not relabeled.
    pub index: usize,
    pub matching_edge: Vec<Vertex>,
    pub edges: Vec<Vec<Vertex>>,
    pub class: PartClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofCertificate {
    pub avoid: Vec<Vertex>,
    pub q: usize,
    pub matching: Vec<Vec<Vertex>>,
    pub x: Vec<Vertex>,
    /// Edges meeting `X` in at least two vertices.
    pub h0: Vec<Vec<Vertex>>,
    pub parts: Vec<PartCertificate>,
    /// Number of star parts (`ℓ`).
    pub star_count: usize,
    pub nontrivial_count: usize,
    /// Union of `Hᵢ ∪ Hᵢ′ ∪ Hᵢ″` over the non-trivial parts.
    pub q_union: Vec<Vertex>,
}

/// Splits `H(R̄)` along a maximum matching `H₁..H_q` and certifies each part.
/// Requires `H(R̄)` to be 1-resilient with `q ≥ 1`.
pub fn proof_decompose(h: &Family, avoid: &[Vertex]) -> Result<ProofCertificate> {
    let avoid = canonical_set(avoid);
    let g = h.filter(&avoid, None)?;
    let q = require_resilient(&g, 1)?;
    let matching = matching_number(&g).1.edges;
    let x_mask = g.mask_of(&matching.iter().flatten().copied().collect::<Vec<_>>());
    let match_masks: Vec<Mask> = matching.iter().map(|e| g.mask_of(e)).collect();

    let mut h0 = Vec::new();
    let mut part_edges: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (i, m) in g.masks().iter().enumerate() {
        match m.intersection_count(&x_mask) {
            0 => unreachable!("a maximum matching meets every edge"),
            1 => {
                let owner = match_masks
                    .iter()
                    .position(|hm| hm.intersects(m))
                    .expect("the vertex of X lies in some matching edge");
                part_edges[owner].push(i);
            }
            _ => h0.push(g.edge(i).to_vec()),
        }
    }

    let mut parts = Vec::with_capacity(q);
    let mut q_union = BTreeSet::new();
    for (i, idx) in part_edges.into_iter().enumerate() {
        let part = g.select(idx);
        let class = classify(h, &avoid, &part, &matching[i], i + 1)?;
        if let PartClass::NonTrivial {
            h_prime, h_double, ..
        } = &class
        {
            q_union.extend(matching[i].iter().chain(h_prime).chain(h_double).copied());
        }
        parts.push(PartCertificate {
            index: i + 1,
            matching_edge: matching[i].clone(),
            edges: part.edges().to_vec(),
            class,
        });
    }
    let star_count = parts
        .iter()
        .filter(|p| matches!(p.class, PartClass::Star { .. }))
        .count();
    let nontrivial_count = parts
        .iter()
        .filter(|p| matches!(p.class, PartClass::NonTrivial { .. }))
        .count();
    let q_union: Vec<Vertex> = q_union.into_iter().collect();
    if nontrivial_count > 0 && q_union.len() >= 3 * h.k() as usize * nontrivial_count {
        return Err(Error::Classification { part: 0 });
    }
    Ok(ProofCertificate {
        avoid,
        q,
        x: x_mask.to_vec(),
        matching,
        h0,
        parts,
        star_count,
        nontrivial_count,
        q_union,
    })
}

fn classify(
    h: &Family,
    avoid: &[Vertex],
    part: &Family,
    matching_edge: &[Vertex],
    index: usize,
) -> Result<PartClass> {
    let bad = Error::Classification { part: index };
    if part.is_empty() {
        return Ok(PartClass::Empty);
    }
    if !part.is_intersecting() {
        return Err(bad);
    }
    if let Some(center) = part.common_vertex() {
        let mut wider = avoid.to_vec();
        wider.push(center);
        let q_set = matching_number(&h.filter(&wider, None)?).1.vertices();
        let qm = part.mask_of(&q_set);
        if q_set.contains(&center) || !part.masks().iter().all(|m| m.intersects(&qm)) {
            return Err(bad);
        }
        return Ok(PartClass::Star { center, q_set });
    }
    let hi = part.mask_of(matching_edge);
    let h_prime = part.edge(0).to_vec();
    let center = h_prime
        .iter()
        .copied()
        .find(|&v| hi.contains(v))
        .ok_or(Error::Classification { part: index })?;
    let h_double = part
        .edges()
        .iter()
        .find(|e| !e.contains(&center))
        .ok_or(Error::Classification { part: index })?
        .clone();
    let mut union = hi.clone();
    union.union_with(&part.mask_of(&h_prime));
    union.union_with(&part.mask_of(&h_double));
    if !part.masks().iter().all(|m| m.intersection_count(&union) >= 2) {
        return Err(bad);
    }
    Ok(PartClass::NonTrivial {
        center,
        h_prime,
        h_double,
    })
}
