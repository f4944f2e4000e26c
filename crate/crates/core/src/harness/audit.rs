//! Randomized spot checks of the degree-type conditions a sampled host must
//! satisfy for the stability argument to go through.
//!
//! The conditions quantify over exponentially many sets, so each one is
//! checked on `budget` random instances. Counts come from an [`EdgeCounter`]:
//! either a materialized family (bit-mask filtering) or the complete k-graph
//! in closed form, which makes `p = 1` audits feasible at large `n`.

use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::family::Family;
use crate::sampler::trial_rng;
use crate::{Error, Result, Vertex};

/// Edge counts needed by the audit.
pub trait EdgeCounter {
    fn n(&self) -> u32;
    fn k(&self) -> u32;
    /// `|F(R̄, Q̂)|`.
    fn avoid_meet(&self, r: &[Vertex], q: &[Vertex]) -> u64;
    /// Edges with at least two vertices in `q`, i.e. `|F ∩ ⟨C(Q, 2)⟩|`.
    fn meet_twice(&self, q: &[Vertex]) -> u64;
    /// Edges through `x` meeting `q`, i.e. `|F ∩ ⟨D_{x,Q}⟩|`.
    fn fan(&self, x: Vertex, q: &[Vertex]) -> u64;
    /// Edges containing all of `r`.
    fn link_size(&self, r: &[Vertex]) -> u64;
}

impl EdgeCounter for Family {
    fn n(&self) -> u32 {
        Family::n(self)
    }

    fn k(&self) -> u32 {
        Family::k(self)
    }

    fn avoid_meet(&self, r: &[Vertex], q: &[Vertex]) -> u64 {
        let (rm, qm) = (self.mask_of(r), self.mask_of(q));
        self.masks()
            .iter()
            .filter(|m| m.is_disjoint(&rm) && m.intersects(&qm))
            .count() as u64
    }

    fn meet_twice(&self, q: &[Vertex]) -> u64 {
        let qm = self.mask_of(q);
        self.masks()
            .iter()
            .filter(|m| m.intersection_count(&qm) >= 2)
            .count() as u64
    }

    fn fan(&self, x: Vertex, q: &[Vertex]) -> u64 {
        let qm = self.mask_of(q);
        self.masks()
            .iter()
            .filter(|m| m.contains(x) && m.intersects(&qm))
            .count() as u64
    }

    fn link_size(&self, r: &[Vertex]) -> u64 {
        Family::link_size(self, r) as u64
    }
}

/// The complete k-graph on `[n]`, counted without materializing it.
#[derive(Clone, Copy, Debug)]
pub struct CompleteHost {
    pub n: u32,
    pub k: u32,
}

fn c(n: u64, k: u64) -> u64 {
    binomial(n, k).to_u64().unwrap_or(u64::MAX)
}

impl EdgeCounter for CompleteHost {
    fn n(&self) -> u32 {
        self.n
    }

    fn k(&self) -> u32 {
        self.k
    }

    fn avoid_meet(&self, r: &[Vertex], q: &[Vertex]) -> u64 {
        let (n, k) = (self.n as u64, self.k as u64);
        let left = n - r.len() as u64;
        c(left, k) - c(left - q.len() as u64, k)
    }

    fn meet_twice(&self, q: &[Vertex]) -> u64 {
        let (n, k, m) = (self.n as u64, self.k as u64, q.len() as u64);
        let none = c(n - m, k);
        let once = if k >= 1 { m * c(n - m, k - 1) } else { 0 };
        c(n, k) - none - once
    }

    fn fan(&self, _x: Vertex, q: &[Vertex]) -> u64 {
        let (n, k, m) = (self.n as u64, self.k as u64, q.len() as u64);
        if k == 0 {
            return 0;
        }
        c(n - 1, k - 1) - c(n - 1 - m, k - 1)
    }

    fn link_size(&self, r: &[Vertex]) -> u64 {
        let (n, k, m) = (self.n as u64, self.k as u64, r.len() as u64);
        if m > k {
            0
        } else {
            c(n - m, k - m)
        }
    }
}

/// Which condition a check covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `|F(R̄, Q̂)| > ½pq·C(n−1, k−1)` for disjoint `|R| = s − q`, `|Q| = q`.
    AvoidMeetLower,
    /// `|F ∩ ⟨C(Q, 2)⟩| < ¼pq·C(n−1, k−1)` for `|Q| < 3kq`.
    PairGeneratedUpper,
    /// `|F ∩ ⟨D_{x,Q}⟩| < ¼p·C(n−1, k−1)` for `|Q| = kq`, `x ∉ Q`.
    FanUpper,
    /// `|F(R)| ≤ p·C(n−1, k−1) / (4|R|(ks)^{|R|−1})` for `2 ≤ |R| ≤ t`.
    LinkUpper,
    /// `|F(T)| ≤ p·C(n−1, k−1) / (4k^{t+1}s^t)` for `|T| = t + 1`.
    DeepLinkUpper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditWitness {
    pub r: Vec<Vertex>,
    pub q: Vec<Vertex>,
    pub x: Option<Vertex>,
    pub count: u64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub condition: Condition,
    /// `q` for the conditions indexed by it; the set size otherwise.
    pub q: usize,
    pub samples: usize,
    pub violations: usize,
    pub first_witness: Option<AuditWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub n: u32,
    pub k: u32,
    pub p: f64,
    pub s: usize,
    pub t: usize,
    pub budget: usize,
    pub seed: u64,
    pub checks: Vec<AuditCheck>,
    pub all_pass: bool,
}

/// Spot-checks every condition with `budget` random instances each. `t = 0`
/// skips the link conditions.
///
/// For the upper-bound conditions over `|Q| < 3kq` the largest allowed `|Q|`
/// is drawn, since the counts only grow with `Q`.
pub fn lemma_audit<C: EdgeCounter + ?Sized>(
    f: &C,
    p: f64,
    s: usize,
    t: usize,
    budget: usize,
    seed: u64,
) -> Result<AuditRecord> {
    if budget == 0 {
        return Err(Error::Range("audit budget must be at least 1".into()));
    }
    if s == 0 {
        return Err(Error::Range("s must be at least 1".into()));
    }
    let (n, k) = (f.n(), f.k());
    let nn = n as usize;
    let deg = binomial(n as u64 - 1, k as u64 - 1).to_f64().unwrap_or(f64::INFINITY);
    let mut rng = trial_rng(seed, 0);
    let draw = |size: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vertex> {
        let mut v: Vec<Vertex> = sample(rng, nn, size).into_iter().map(|i| i as Vertex + 1).collect();
        v.sort_unstable();
        v
    };
    let mut checks = Vec::new();
    for q in 1..=s {
        let qf = q as f64;
        if s <= nn {
            let threshold = 0.5 * p * qf * deg;
            checks.push(run(Condition::AvoidMeetLower, q, budget, |rng| {
                let both = draw(s, rng);
                let (r, qs) = split(&both, s - q, rng);
                let count = f.avoid_meet(&r, &qs);
                (count as f64 <= threshold).then_some(AuditWitness {
                    r,
                    q: qs,
                    x: None,
                    count,
                    threshold,
                })
            }, &mut rng));
        }
        let size = (3 * k as usize * q - 1).min(nn);
        let threshold = 0.25 * p * qf * deg;
        checks.push(run(Condition::PairGeneratedUpper, q, budget, |rng| {
            let qs = draw(size, rng);
            let count = f.meet_twice(&qs);
            (count as f64 >= threshold).then_some(AuditWitness {
                r: Vec::new(),
                q: qs,
                x: None,
                count,
                threshold,
            })
        }, &mut rng));
        let size = k as usize * q;
        if size < nn {
            let threshold = 0.25 * p * deg;
            checks.push(run(Condition::FanUpper, q, budget, |rng| {
                let all = draw(size + 1, rng);
                let pick = rng.gen_range(0..all.len());
                let x = all[pick];
                let qs: Vec<Vertex> = all.into_iter().filter(|&v| v != x).collect();
                let count = f.fan(x, &qs);
                (count as f64 >= threshold).then_some(AuditWitness {
                    r: Vec::new(),
                    q: qs,
                    x: Some(x),
                    count,
                    threshold,
                })
            }, &mut rng));
        }
    }
    let ks = (k as usize * s) as f64;
    for size in 2..=t.min(nn) {
        let threshold = p * deg / (4.0 * size as f64 * ks.powi(size as i32 - 1));
        checks.push(run(Condition::LinkUpper, size, budget, |rng| {
            let r = draw(size, rng);
            let count = f.link_size(&r);
            (count as f64 > threshold).then_some(AuditWitness {
                r,
                q: Vec::new(),
                x: None,
                count,
                threshold,
            })
        }, &mut rng));
    }
    if t >= 1 && t < nn {
        let threshold = p * deg / (4.0 * (k as f64).powi(t as i32 + 1) * (s as f64).powi(t as i32));
        checks.push(run(Condition::DeepLinkUpper, t + 1, budget, |rng| {
            let r = draw(t + 1, rng);
            let count = f.link_size(&r);
            (count as f64 > threshold).then_some(AuditWitness {
                r,
                q: Vec::new(),
                x: None,
                count,
                threshold,
            })
        }, &mut rng));
    }
    let all_pass = checks.iter().all(|c| c.violations == 0);
    Ok(AuditRecord {
        n,
        k,
        p,
        s,
        t,
        budget,
        seed,
        checks,
        all_pass,
    })
}

/// Splits a sorted set into a random part of `size` and the rest.
fn split(
    set: &[Vertex],
    size: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (Vec<Vertex>, Vec<Vertex>) {
    let chosen = sample(rng, set.len(), size).into_vec();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, &v) in set.iter().enumerate() {
        if chosen.contains(&i) {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    (a, b)
}

fn run(
    condition: Condition,
    q: usize,
    budget: usize,
    mut one: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> Option<AuditWitness>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> AuditCheck {
    let mut violations = 0;
    let mut first_witness = None;
    for _ in 0..budget {
        if let Some(w) = one(rng) {
            violations += 1;
            first_witness.get_or_insert(w);
        }
    }
    AuditCheck {
        condition,
        q,
        samples: budget,
        violations,
        first_witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_filtering() {
        let (n, k) = (9, 3);
        let full = Family::complete(n, k);
        let host = CompleteHost { n, k };
        let (r, q) = (vec![1, 2], vec![3, 5, 7]);
        assert_eq!(host.avoid_meet(&r, &q), full.avoid_meet(&r, &q));
        assert_eq!(host.meet_twice(&q), full.meet_twice(&q));
        assert_eq!(host.fan(4, &q), full.fan(4, &q));
        assert_eq!(host.link_size(&r), EdgeCounter::link_size(&full, &r));
        assert_eq!(host.link_size(&[1, 2, 3, 4]), 0);
    }

    #[test]
    fn complete_host_at_large_n_passes() {
        let host = CompleteHost { n: 1600, k: 2 };
        let rec = lemma_audit(&host, 1.0, 1, 1, 100, 7).unwrap();
        assert!(rec.all_pass, "{rec:?}");
        assert!(rec.checks.iter().all(|c| c.samples == 100));
    }

    #[test]
    fn zero_budget_is_rejected() {
        let host = CompleteHost { n: 20, k: 2 };
        assert!(matches!(lemma_audit(&host, 1.0, 1, 1, 0, 1), Err(Error::Range(_))));
    }

    #[test]
    fn violations_carry_witnesses() {
        // an empty host fails the lower bound everywhere
        let f = Family::empty(12, 2);
        let rec = lemma_audit(&f, 0.5, 1, 1, 5, 3).unwrap();
        let lower = &rec.checks[0];
        assert_eq!(lower.condition, Condition::AvoidMeetLower);
        assert_eq!(lower.violations, 5);
        assert_eq!(lower.first_witness.as_ref().unwrap().count, 0);
        assert!(!rec.all_pass);
    }
}
