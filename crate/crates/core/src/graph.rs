//! Graphs (`k = 2`): s-partitions, the graphs `G(B, A₁, …, A_m)` they
//! induce, the Erdős–Gallai bound, and the exact maximum number of edges of a
//! subgraph with matching number at most `s`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::Combinations;
use crate::family::Family;
use crate::mask::Mask;
use crate::{Error, Result, Vertex};

/// Default work cap for [`max_nu_subgraph`], in search steps.
pub const DEFAULT_STEP_CAP: u64 = 2_000_000_000;

/// `(B, A₁, …, A_m)`: `B` plus odd parts partitioning `[n] ∖ B`, listed by
/// size (largest first, ties by smallest vertex). Singleton parts are kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SPartition {
    pub b: Vec<Vertex>,
    pub parts: Vec<Vec<Vertex>>,
}

impl SPartition {
    /// `b + Σ (aᵢ − 1)/2`.
    pub fn s(&self) -> usize {
        self.b.len() + self.parts.iter().map(|a| (a.len().max(1) - 1) / 2).sum::<usize>()
    }

    /// Checks that `B` and the parts partition `[n]`, parts are non-empty, odd,
    /// sorted, and listed by non-increasing size.
    pub fn validate(&self, n: u32) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPartition(msg));
        let mut seen = Mask::empty(n);
        for set in std::iter::once(&self.b).chain(&self.parts) {
            if !set.windows(2).all(|w| w[0] < w[1]) {
                return bad(format!("{set:?} is not strictly increasing"));
            }
            for &v in set {
                if v == 0 || v > n {
                    return bad(format!("vertex {v} outside [1, {n}]"));
                }
                if seen.contains(v) {
                    return bad(format!("vertex {v} appears twice"));
                }
                seen.insert(v);
            }
        }
        if seen.count() != n as usize {
            return bad(format!("only {} of {n} vertices are covered", seen.count()));
        }
        if let Some(a) = self.parts.iter().find(|a| a.len() % 2 == 0) {
            return bad(format!("part {a:?} has even size"));
        }
        if !self.parts.windows(2).all(|w| w[0].len() >= w[1].len()) {
            return bad("parts are not listed by non-increasing size".into());
        }
        Ok(())
    }

    fn canonicalize(&mut self) {
        self.b.sort_unstable();
        for a in &mut self.parts {
            a.sort_unstable();
        }
        self.parts
            .sort_by(|x, y| y.len().cmp(&x.len()).then_with(|| x.cmp(y)));
    }
}

/// `G(B, A₁, …, A_m)`: cliques on `B` and on every part, plus all `B`-to-rest
/// edges. Its matching number is `P.s()` whenever `m ≥ |B|`, which holds for
/// every s-partition of `[n]` with `n ≥ 2s`.
pub fn build_partition_graph(p: &SPartition, n: u32) -> Result<Family> {
    p.validate(n)?;
    let mut edges = Vec::new();
    let in_b = Mask::from_vertices(n, &p.b);
    for &u in &p.b {
        for v in 1..=n {
            if v != u && (!in_b.contains(v) || u < v) {
                edges.push(vec![u.min(v), u.max(v)]);
            }
        }
    }
    for a in &p.parts {
        edges.extend(Combinations::new(a.clone(), 2));
    }
    Family::new(n, 2, edges)
}

/// `C(b, 2) + Σ C(aᵢ, 2) + b Σ aᵢ`.
pub fn partition_edge_count(p: &SPartition, n: u32) -> Result<u64> {
    p.validate(n)?;
    let c2 = |x: u64| x * x.saturating_sub(1) / 2;
    let b = p.b.len() as u64;
    let rest: u64 = p.parts.iter().map(|a| a.len() as u64).sum();
    Ok(c2(b) + p.parts.iter().map(|a| c2(a.len() as u64)).sum::<u64>() + b * rest)
}

/// Number of edges of `g` inside `G(P)`.
pub fn partition_overlap(g: &Family, p: &SPartition) -> usize {
    let n = g.n();
    let in_b = Mask::from_vertices(n, &p.b);
    let mut part_of = vec![usize::MAX; n as usize + 1];
    for (i, a) in p.parts.iter().enumerate() {
        for &v in a {
            part_of[v as usize] = i;
        }
    }
    g.edges()
        .iter()
        .filter(|e| {
            let (u, v) = (e[0], e[1]);
            in_b.contains(u) || in_b.contains(v) || part_of[u as usize] == part_of[v as usize]
        })
        .count()
}

/// `f(n, s) = max{C(2s+1, 2), C(s, 2) + s(n − s)}`, the Erdős–Gallai bound.
/// Exact as a bound only for `n ≥ 2s + 2`; evaluated for any input.
pub fn f_bound(n: u64, s: u64) -> u64 {
    let clique = (2 * s + 1) * (2 * s) / 2;
    let split = s * s.saturating_sub(1) / 2 + s * n.saturating_sub(s);
    clique.max(split)
}

/// The two extremal constructions `C([2s+1], 2)` and
/// `C([s], 2) ∪ ([s] × [s+1, n])`.
pub fn extremal_graphs(n: u32, s: u32) -> Result<(Family, Family)> {
    if n < 2 * s + 1 {
        return Err(Error::Range(format!("need n >= 2s + 1, got n = {n}, s = {s}")));
    }
    let g1 = Family::new(n, 2, Combinations::new((1..=2 * s + 1).collect(), 2).collect())?;
    let mut e2: Vec<Vec<Vertex>> = Combinations::new((1..=s).collect(), 2).collect();
    for u in 1..=s {
        for v in s + 1..=n {
            e2.push(vec![u, v]);
        }
    }
    Ok((g1, Family::new(n, 2, e2)?))
}

/// The largest number of edges of a subgraph of `g` with `ν ≤ s`, with an
/// s-partition attaining it.
///
/// Every graph with `ν ≤ s` on `n ≥ 2s + 2` vertices lies inside some
/// `G(B, A₁, …, A_m)`, so the answer is the best overlap over s-partitions.
/// Refuses smaller `n`, where that structure result does not apply.
pub fn max_nu_subgraph(g: &Family, s: usize) -> Result<(usize, SPartition)> {
    max_nu_subgraph_capped(g, s, DEFAULT_STEP_CAP)
}

pub fn max_nu_subgraph_capped(g: &Family, s: usize, cap: u64) -> Result<(usize, SPartition)> {
    if g.k() != 2 {
        return Err(Error::Range(format!("expected a graph, got k = {}", g.k())));
    }
    let n = g.n();
    if (n as usize) < 2 * s + 2 {
        return Err(Error::Range(format!(
            "n = {n} is below 2s + 2 = {}; use the hitting-set oracle instead",
            2 * s + 2
        )));
    }
    let mut search = PartitionSearch::new(g, cap);
    for b in (0..=s).rev() {
        for shape in odd_shapes(s - b, n as usize - b) {
            search.shape(b, &shape)?;
        }
    }
    let (x, mut p) = search.best.expect("the all-singleton shape is always tried");
    p.canonicalize();
    Ok((x, p))
}

/// Non-increasing lists of odd sizes `≥ 3` with `Σ (a − 1)/2 = budget` and
/// `Σ a ≤ room`.
fn odd_shapes(budget: usize, room: usize) -> Vec<Vec<usize>> {
    fn go(budget: usize, room: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if budget == 0 {
            out.push(cur.clone());
            return;
        }
        for half in (1..=budget.min(max)).rev() {
            let a = 2 * half + 1;
            if a <= room {
                cur.push(a);
                go(budget - half, room - a, half, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(budget, room, budget, &mut Vec::new(), &mut out);
    out
}

struct PartitionSearch<'a> {
    g: &'a Family,
    adj: Vec<Mask>,
    deg: Vec<usize>,
    best: Option<(usize, SPartition)>,
    steps: u64,
    cap: u64,
}

impl<'a> PartitionSearch<'a> {
    fn new(g: &'a Family, cap: u64) -> Self {
        let n = g.n();
        let mut adj = vec![Mask::empty(n); n as usize + 1];
        for e in g.edges() {
            adj[e[0] as usize].insert(e[1]);
            adj[e[1] as usize].insert(e[0]);
        }
        let deg = adj.iter().map(Mask::count).collect();
        PartitionSearch {
            g,
            adj,
            deg,
            best: None,
            steps: 0,
            cap,
        }
    }

    fn best_value(&self) -> Option<usize> {
        self.best.as_ref().map(|b| b.0)
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.cap {
            return Err(Error::Scale { cap: self.cap });
        }
        Ok(())
    }

    fn shape(&mut self, b: usize, shape: &[usize]) -> Result<()> {
        let n = self.g.n();
        let room: usize = shape.iter().map(|a| a * (a - 1) / 2).sum();
        for bset in Combinations::new((1..=n).collect::<Vec<Vertex>>(), b) {
            self.tick()?;
            let bm = Mask::from_vertices(n, &bset);
            let inside: usize = bset.iter().map(|&v| self.adj[v as usize].intersection_count(&bm)).sum();
            let base = bset.iter().map(|&v| self.deg[v as usize]).sum::<usize>() - inside / 2;
            if self.best_value().is_some_and(|x| base + room <= x) {
                continue;
            }
            let mut free = Mask::full(n);
            free.difference_with(&bm);
            let mut parts = Vec::with_capacity(shape.len());
            self.pack(&bset, shape, 0, &free, base, &mut parts)?;
        }
        Ok(())
    }

    /// Chooses the parts of `shape[idx..]` from `free`.
    fn pack(
        &mut self,
        bset: &[Vertex],
        shape: &[usize],
        idx: usize,
        free: &Mask,
        value: usize,
        parts: &mut Vec<Vec<Vertex>>,
    ) -> Result<()> {
        if idx == shape.len() {
            if self.best_value().is_none_or(|x| value > x) {
                let mut all = parts.clone();
                all.extend(free.iter().map(|v| vec![v]));
                self.best = Some((
                    value,
                    SPartition {
                        b: bset.to_vec(),
                        parts: all,
                    },
                ));
            }
            return Ok(());
        }
        let a = shape[idx];
        // equal sizes are interchangeable: require increasing smallest vertices
        let after = match parts.last() {
            Some(prev) if shape[idx - 1] == a => prev[0],
            _ => 0,
        };
        let pool: Vec<Vertex> = free.iter().filter(|&v| v > after).collect();
        let later: usize = shape[idx + 1..].iter().map(|a| a * (a - 1) / 2).sum();
        let mut chosen = Vec::with_capacity(a);
        self.grow(bset, shape, idx, free, value, later, &pool, 0, &mut chosen, 0, parts)
    }

    #[allow(clippy::too_many_arguments)]
    fn grow(
        &mut self,
        bset: &[Vertex],
        shape: &[usize],
        idx: usize,
        free: &Mask,
        value: usize,
        later: usize,
        pool: &[Vertex],
        from: usize,
        chosen: &mut Vec<Vertex>,
        inner: usize,
        parts: &mut Vec<Vec<Vertex>>,
    ) -> Result<()> {
        self.tick()?;
        let a = shape[idx];
        let c = chosen.len();
        let optimistic = value + inner + (a * (a - 1) / 2 - c * c.saturating_sub(1) / 2) + later;
        if self.best_value().is_some_and(|x| optimistic <= x) {
            return Ok(());
        }
        if c == a {
            let mut rest = free.clone();
            for &v in chosen.iter() {
                rest.remove(v);
            }
            parts.push(chosen.clone());
            let r = self.pack(bset, shape, idx + 1, &rest, value + inner, parts);
            parts.pop();
            return r;
        }
        for i in from..pool.len() {
            if pool.len() - i < a - c {
                break;
            }
            let v = pool[i];
            let gain = chosen.iter().filter(|&&u| self.adj[v as usize].contains(u)).count();
            chosen.push(v);
            let r = self.grow(
                bset, shape, idx, free, value, later, pool, i + 1, chosen, inner + gain, parts,
            );
            chosen.pop();
            r?;
        }
        Ok(())
    }
}

/// Every s-partition of `[n]` in canonical form. Exponential; meant for
/// exhaustive checks at `n ≤ 10`.
pub fn enumerate_s_partitions(n: u32, s: usize) -> Vec<SPartition> {
    let mut out = Vec::new();
    for b in 0..=s.min(n as usize) {
        for bset in Combinations::new((1..=n).collect::<Vec<Vertex>>(), b) {
            let rest: Vec<Vertex> = (1..=n).filter(|v| !bset.contains(v)).collect();
            for shape in odd_shapes(s - b, rest.len()) {
                assign(&bset, &rest, &shape, 0, &mut Vec::new(), &mut out);
            }
        }
    }
    out
}

fn assign(
    bset: &[Vertex],
    free: &[Vertex],
    shape: &[usize],
    idx: usize,
    parts: &mut Vec<Vec<Vertex>>,
    out: &mut Vec<SPartition>,
) {
    if idx == shape.len() {
        let mut all = parts.clone();
        all.extend(free.iter().map(|&v| vec![v]));
        let mut p = SPartition {
            b: bset.to_vec(),
            parts: all,
        };
        p.canonicalize();
        out.push(p);
        return;
    }
    let a = shape[idx];
    let after = match parts.last() {
        Some(prev) if shape[idx - 1] == a => prev[0],
        _ => 0,
    };
    let pool: Vec<Vertex> = free.iter().copied().filter(|&v| v > after).collect();
    for part in Combinations::new(pool, a) {
        let rest: Vec<Vertex> = free.iter().copied().filter(|v| !part.contains(v)).collect();
        parts.push(part);
        assign(bset, &rest, shape, idx + 1, parts, out);
        parts.pop();
    }
}
