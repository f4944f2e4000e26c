//! Seeded sampling of the random k-graph `K_p(n, k)` and the trivial-family
//! counts that the verdicts compare against.
//!
//! # Random stream
//!
//! Every sample is driven by a counter-based generator: ChaCha with 8 rounds,
//! keyed by 32 bytes expanded from the 64-bit `seed` with SplitMix64, using
//! `trial_index` as the 64-bit stream id. Draw `i` of a trial is therefore a
//! pure function of `(seed, trial_index, i)` and parallel trials share no
//! state. Uniform reals are `rand`'s 53-bit `[0, 1)` conversion.
//!
//! Edges are visited in lexicographic rank order and chosen by geometric skip
//! sampling: the gap to the next kept rank is `⌊ln U / ln(1 − p)⌋` with
//! `U = 1 − u`, `u` uniform in `[0, 1)`. Runtime is proportional to the number
//! of edges kept, not to `C(n, k)`.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, BinomialTable};
use crate::family::Family;
use crate::mask::{Mask, MAX_VERTICES};
use crate::{Error, Result, Vertex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n: u32,
    pub k: u32,
    pub p: f64,
    pub seed: u64,
    pub trial_index: u64,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > self.n {
            return Err(Error::Range(format!(
                "need 1 <= k <= n, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Range(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.n > MAX_VERTICES {
            return Err(Error::Capacity(format!("n = {} exceeds {MAX_VERTICES}", self.n)));
        }
        Ok(())
    }
}

/// SplitMix64 step; also used to derive per-cell seeds in campaigns.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines two seeds into one, order-sensitively.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut st = a ^ splitmix64(&mut b.clone());
    splitmix64(&mut st)
}

/// The generator for `(seed, trial_index)`.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut st = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut st).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial_index);
    rng
}

/// Samples `K_p(n, k)`.
pub fn sample_kp(spec: &SampleSpec) -> Result<Family> {
    spec.validate()?;
    let SampleSpec { n, k, p, .. } = *spec;
    let table = BinomialTable::new(n, k);
    let total = table.get(n, k);
    if total == u64::MAX || BigUint::from(total) != binomial(n as u64, k as u64) {
        return Err(Error::Capacity(format!(
            "C({n}, {k}) does not fit the 64-bit rank space"
        )));
    }
    if p == 0.0 {
        return Ok(Family::empty(n, k));
    }
    let mut rng = trial_rng(spec.seed, spec.trial_index);
    let ln_q = (-p).ln_1p();
    let mut gap = || -> u64 {
        if p >= 1.0 {
            return 0;
        }
        let u: f64 = 1.0 - rng.gen::<f64>();
        let g = (u.ln() / ln_q).floor();
        if g >= u64::MAX as f64 {
            u64::MAX
        } else {
            g as u64
        }
    };
    let mut edges = Vec::new();
    let mut rank = gap();
    while rank < total {
        edges.push(crate::combinatorics::unrank_subset(&table, n, k, rank));
        rank = rank.saturating_add(1).saturating_add(gap());
    }
    Ok(Family::from_canonical(n, k, edges))
}

/// `C(n, k) − C(n − s, k)`: the number of k-sets meeting a fixed s-set.
pub fn trivial_count(n: u32, k: u32, s: u32) -> Result<BigUint> {
    if s > n || k > n {
        return Err(Error::Range(format!(
            "need s <= n and k <= n, got n = {n}, k = {k}, s = {s}"
        )));
    }
    Ok(binomial(n as u64, k as u64) - binomial((n - s) as u64, k as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrivialMode {
    /// Exact when `n <= 40` or `s <= 3`, greedy otherwise.
    #[default]
    Auto,
    Exact,
    Greedy,
}

/// The largest trivial family `F(Ŝ)` over s-sets `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialMax {
    pub set: Vec<Vertex>,
    pub size: usize,
    /// `false` when the greedy lower bound was used.
    pub exact: bool,
}

/// `max{|F(Ŝ)| : S ∈ C([n], s)}` and a lexicographically first maximizer.
pub fn max_trivial(f: &Family, s: u32, mode: TrivialMode) -> Result<TrivialMax> {
    if s > f.n() {
        return Err(Error::Range(format!("s = {s} exceeds n = {}", f.n())));
    }
    let exact = match mode {
        TrivialMode::Exact => true,
        TrivialMode::Greedy => false,
        TrivialMode::Auto => f.n() <= 40 || s <= 3,
    };
    if exact {
        Ok(exact_max_trivial(f, s as usize))
    } else {
        Ok(greedy_max_trivial(f, s as usize))
    }
}

fn exact_max_trivial(f: &Family, s: usize) -> TrivialMax {
    struct State<'a> {
        masks: &'a [Mask],
        n: u32,
        s: usize,
        chosen: Vec<Vertex>,
        best_residual: usize,
        best: Vec<Vertex>,
    }

    fn go(st: &mut State, residual: &[usize], next: Vertex) {
        if st.chosen.len() == st.s {
            if residual.len() < st.best_residual {
                st.best_residual = residual.len();
                st.best = st.chosen.clone();
            }
            return;
        }
        let need = (st.s - st.chosen.len()) as u32;
        for v in next..=st.n + 1 - need {
            let rest: Vec<usize> = residual
                .iter()
                .copied()
                .filter(|&i| !st.masks[i].contains(v))
                .collect();
            st.chosen.push(v);
            go(st, &rest, v + 1);
            st.chosen.pop();
        }
    }

    let all: Vec<usize> = (0..f.len()).collect();
    let mut st = State {
        masks: f.masks(),
        n: f.n(),
        s,
        chosen: Vec::new(),
        best_residual: usize::MAX,
        best: Vec::new(),
    };
    go(&mut st, &all, 1);
    TrivialMax {
        size: f.len() - st.best_residual,
        set: st.best,
        exact: true,
    }
}

fn greedy_max_trivial(f: &Family, s: usize) -> TrivialMax {
    let mut residual: Vec<usize> = (0..f.len()).collect();
    let mut set: Vec<Vertex> = Vec::new();
    for _ in 0..s {
        let mut deg = vec![0usize; f.n() as usize + 1];
        for &i in &residual {
            for &v in f.edge(i) {
                deg[v as usize] += 1;
            }
        }
        let v = (1..=f.n())
            .filter(|v| !set.contains(v))
            .max_by(|a, b| deg[*a as usize].cmp(&deg[*b as usize]).then(b.cmp(a)))
            .expect("s <= n leaves a free vertex");
        residual.retain(|&i| !f.masks()[i].contains(v));
        set.push(v);
    }
    set.sort_unstable();
    TrivialMax {
        size: f.len() - residual.len(),
        set,
        exact: false,
    }
}
