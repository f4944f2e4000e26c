//! Brute-force reference implementations shared by the integration suites.
//! These work on plain vectors and bit sets of edge indices, independent of
//! the library's masks and search code.

#![allow(dead_code)]

use matchlab::{Family, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn disjoint(a: &[Vertex], b: &[Vertex]) -> bool {
    a.iter().all(|v| !b.contains(v))
}

/// All subsets of `0..m` as bit sets, by increasing cardinality.
pub fn subsets_by_size(m: usize) -> Vec<u32> {
    let mut all: Vec<u32> = (0..1u32 << m).collect();
    all.sort_by_key(|s| (s.count_ones(), *s));
    all
}

fn members(set: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| set >> i & 1 == 1)
}

/// ν by checking every subset of edges for pairwise disjointness.
pub fn brute_nu(edges: &[Vec<Vertex>]) -> usize {
    assert!(edges.len() <= 20);
    let mut best = 0;
    for set in 0..1u32 << edges.len() {
        let size = set.count_ones() as usize;
        if size <= best {
            continue;
        }
        let idx: Vec<usize> = members(set).collect();
        let ok = idx
            .iter()
            .enumerate()
            .all(|(a, &i)| idx[a + 1..].iter().all(|&j| disjoint(&edges[i], &edges[j])));
        if ok {
            best = size;
        }
    }
    best
}

/// τ by scanning vertex subsets of `[n]` in order of size.
pub fn brute_tau(n: u32, edges: &[Vec<Vertex>]) -> usize {
    assert!(n <= 20);
    for set in subsets_by_size(n as usize) {
        if edges.iter().all(|e| e.iter().any(|&v| set >> (v - 1) & 1 == 1)) {
            return set.count_ones() as usize;
        }
    }
    unreachable!("[n] meets every edge")
}

/// All `m`-matchings as bit sets of edge indices.
pub fn brute_matchings(edges: &[Vec<Vertex>], m: usize) -> Vec<u32> {
    (0..1u32 << edges.len())
        .filter(|s| s.count_ones() as usize == m)
        .filter(|&s| {
            let idx: Vec<usize> = members(s).collect();
            idx.iter()
                .enumerate()
                .all(|(a, &i)| idx[a + 1..].iter().all(|&j| disjoint(&edges[i], &edges[j])))
        })
        .collect()
}

/// Minimum number of edges meeting every `(s+1)`-matching, by exhaustive
/// search over edge subsets.
pub fn brute_min_matching_hitting_set(edges: &[Vec<Vertex>], s: usize) -> usize {
    let ms = brute_matchings(edges, s + 1);
    for set in subsets_by_size(edges.len()) {
        if ms.iter().all(|m| m & set != 0) {
            return set.count_ones() as usize;
        }
    }
    unreachable!()
}

/// Binomial coefficient by the multiplicative formula in u128, saturating.
pub fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        match r.checked_mul((n - i) as u128) {
            Some(v) => r = v / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    r
}

/// All `k`-subsets of `[n]` by recursion.
pub fn all_k_sets(n: u32, k: u32) -> Vec<Vec<Vertex>> {
    fn go(start: Vertex, n: u32, k: u32, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k as usize {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random family of at most `max_edges` distinct k-sets.
pub fn random_family(rng: &mut ChaCha8Rng, n: u32, k: u32, max_edges: usize) -> Family {
    let mut pool = all_k_sets(n, k);
    pool.shuffle(rng);
    let m = rng.gen_range(0..=max_edges.min(pool.len()));
    pool.truncate(m);
    Family::new(n, k, pool).unwrap()
}

/// Each k-set kept independently with probability `p`.
pub fn bernoulli_family(rng: &mut ChaCha8Rng, n: u32, k: u32, p: f64) -> Family {
    let edges = all_k_sets(n, k).into_iter().filter(|_| rng.gen_bool(p)).collect();
    Family::new(n, k, edges).unwrap()
}

/// ν of `edges` after deleting `del`, computed by brute force.
fn nu_without(edges: &[Vec<Vertex>], del: &[Vertex]) -> usize {
    let kept: Vec<Vec<Vertex>> = edges.iter().filter(|e| disjoint(e, del)).cloned().collect();
    brute_nu_dfs(&kept)
}

/// ν by depth-first search; used where edge counts exceed `brute_nu`'s limit.
pub fn brute_nu_dfs(edges: &[Vec<Vertex>]) -> usize {
    fn go(edges: &[Vec<Vertex>], i: usize, used: &mut Vec<Vertex>, depth: usize, best: &mut usize) {
        *best = (*best).max(depth);
        for j in i..edges.len() {
            if disjoint(&edges[j], used) {
                used.extend_from_slice(&edges[j]);
                go(edges, j + 1, used, depth + 1, best);
                used.truncate(used.len() - edges[j].len());
            }
        }
    }
    let mut best = 0;
    go(edges, 0, &mut Vec::new(), 0, &mut best);
    best
}

/// Whether deleting any set of at most `t` vertices keeps ν unchanged.
pub fn brute_resilient(f: &Family, t: usize) -> bool {
    let edges = f.edges();
    let nu = brute_nu_dfs(edges);
    let n = f.n();
    (1..=t).all(|size| all_k_sets(n, size as u32).iter().all(|del| nu_without(edges, del) == nu))
}

/// Rejection-samples a `t`-resilient family with `ν ≥ 1` on at most 10
/// vertices. The edges live on a random support whose size admits
/// resilience; vertices in `reserved` are never used.
pub fn resilient_family(rng: &mut ChaCha8Rng, t: usize, reserved: &[Vertex]) -> Family {
    assert!((1..=2).contains(&t));
    loop {
        let k: u32 = if t == 2 { 3 } else { rng.gen_range(2..=3) };
        let sizes: &[u32] = match (k, t) {
            (2, _) => &[3, 5, 7, 9],
            (3, 1) => &[4, 5, 7, 8],
            _ => &[5, 8],
        };
        let u = *sizes.choose(rng).unwrap();
        let n = rng.gen_range(u + reserved.len() as u32..=10.max(u + reserved.len() as u32));
        let mut free: Vec<Vertex> = (1..=n).filter(|v| !reserved.contains(v)).collect();
        free.shuffle(rng);
        free.truncate(u as usize);
        free.sort_unstable();
        let p = rng.gen_range(0.5..0.95);
        let edges: Vec<Vec<Vertex>> = all_k_sets(u, k)
            .into_iter()
            .filter(|_| rng.gen_bool(p))
            .map(|e| e.iter().map(|&i| free[i as usize - 1]).collect())
            .collect();
        let f = Family::new(n, k, edges).unwrap();
        if !f.is_empty() && matchlab::resilience::is_t_resilient(&f, t).unwrap() {
            return f;
        }
    }
}
