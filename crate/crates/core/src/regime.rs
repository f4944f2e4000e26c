//! Closed-form thresholds, tail bounds, and counting formulas.
//!
//! `log` in every threshold is the natural logarithm. Binomials are exact big
//! integers and only converted to floating point for the final comparison.

use std::f64::consts::E;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::combinatorics::{binomial, factorial};
use crate::{Error, Result};

/// Argument bundle for [`chernoff_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Chernoff {
    /// `Pr(|X − μ| > εμ) ≤ 2e^{−ε²μ/3}` for `0 < ε ≤ 3/2`.
    Small { eps: f64, mu: f64 },
    /// `Pr(X > x) ≤ e^{−x}` for `x ≥ 7μ`.
    Large { x: f64, mu: f64 },
}

pub fn chernoff_bound(args: Chernoff) -> Result<f64> {
    match args {
        Chernoff::Small { eps, mu } => {
            if !(eps > 0.0 && eps <= 1.5) || !(mu >= 0.0) {
                return Err(Error::Range(format!(
                    "small-deviation bound needs 0 < eps <= 3/2 and mu >= 0, got eps = {eps}, mu = {mu}"
                )));
            }
            Ok(2.0 * (-eps * eps * mu / 3.0).exp())
        }
        Chernoff::Large { x, mu } => {
            if !(mu >= 0.0) || !(x >= 7.0 * mu) {
                return Err(Error::Range(format!(
                    "large-deviation bound needs x >= 7 mu, got x = {x}, mu = {mu}"
                )));
            }
            Ok((-x).exp())
        }
    }
}

/// Natural log of a big integer, `-inf` for zero.
pub fn big_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    match x.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => {
            let shift = x.bits() - 60;
            (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

fn binom_f64(n: u64, k: u64) -> f64 {
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeInputs {
    pub n: u32,
    pub k: u32,
    pub s: u32,
    pub t: Option<u32>,
    pub eps: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm1Conditions {
    /// `64ks log n / C(n−1, k−1)`.
    pub p_min: f64,
    /// `200k³s`.
    pub n_min: u64,
    pub n_ok: bool,
    /// `None` without an input `p`.
    pub p_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Conditions {
    pub t: u32,
    /// `8(t+1)k^{t+1}s^t log n / C(n−1, k−1)`.
    pub p_min: f64,
    /// `56k^{2+1/t}s`.
    pub n_low: f64,
    /// `56k^{2+1/(t−1)}s`, infinite for `t = 1`.
    pub n_high: f64,
    pub n_window_ok: bool,
    pub p_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorConditions {
    pub eps: f64,
    /// `⌈k^ε⌉`.
    pub t: u32,
    /// `56e^{1/(eε)}k²s`.
    pub n_min: f64,
    /// `10(ks)^{k^ε}k^{1+ε} / C(n−1, k−1)`.
    pub p_min: f64,
    pub n_ok: bool,
    pub p_ok: Option<bool>,
    /// The conditions evaluated at the real `t = k^ε` and at the
    /// rounded `t` disagree.
    pub rounding_changes_conditions: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropWindow {
    /// `s log n / C(n−s, k)`.
    pub p_low: f64,
    /// `e^{k²s/2n} / C(n, k)`.
    pub p_high: f64,
    pub nonempty: bool,
    /// Geometric mean of the endpoints when the window is non-empty. This is a
    /// chosen test point, not part of the asymptotic statement.
    pub test_point: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub inputs: RegimeInputs,
    pub thm1: Thm1Conditions,
    pub thm2: Option<Thm2Conditions>,
    pub cor: Option<CorConditions>,
    pub prop_window: PropWindow,
}

pub fn regime_report(inputs: RegimeInputs) -> Result<RegimeReport> {
    let RegimeInputs { n, k, s, t, eps, p } = inputs;
    if k < 2 || n < k || s < 1 {
        return Err(Error::Range(format!(
            "need n >= k >= 2 and s >= 1, got n = {n}, k = {k}, s = {s}"
        )));
    }
    if t == Some(0) {
        return Err(Error::Range("t must be at least 1".into()));
    }
    if let Some(e) = eps {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Range(format!("eps = {e} outside (0, 1)")));
        }
    }
    if let Some(p) = p {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Range(format!("p = {p} outside [0, 1]")));
        }
    }
    let (nf, kf, sf) = (n as f64, k as f64, s as f64);
    let ln_n = nf.ln();
    let deg = binom_f64(n as u64 - 1, k as u64 - 1);
    let p_ok = |min: f64| p.map(|p| p >= min);

    let thm1_p = 64.0 * kf * sf * ln_n / deg;
    let thm1_n = 200 * (k as u64).pow(3) * s as u64;
    let thm1 = Thm1Conditions {
        p_min: thm1_p,
        n_min: thm1_n,
        n_ok: n as u64 >= thm1_n,
        p_ok: p_ok(thm1_p),
    };

    let thm2_at = |t: f64| -> (f64, f64, f64) {
        let p_min = 8.0 * (t + 1.0) * kf.powf(t + 1.0) * sf.powf(t) * ln_n / deg;
        let n_low = 56.0 * kf.powf(2.0 + 1.0 / t) * sf;
        let n_high = if t <= 1.0 {
            f64::INFINITY
        } else {
            56.0 * kf.powf(2.0 + 1.0 / (t - 1.0)) * sf
        };
        (p_min, n_low, n_high)
    };
    let thm2 = t.map(|t| {
        let (p_min, n_low, n_high) = thm2_at(t as f64);
        Thm2Conditions {
            t,
            p_min,
            n_low,
            n_high,
            n_window_ok: nf >= n_low && nf <= n_high,
            p_ok: p_ok(p_min),
        }
    });

    let cor = eps.map(|e| {
        let t_real = kf.powf(e);
        let t_round = t_real.ceil();
        let n_min = 56.0 * (1.0 / (E * e)).exp() * kf * kf * sf;
        let p_min = 10.0 * (kf * sf).powf(t_real) * kf.powf(1.0 + e) / deg;
        let holds = |t: f64| {
            let (pm, lo, hi) = thm2_at(t);
            (p.is_none_or(|p| p >= pm), nf >= lo && nf <= hi)
        };
        CorConditions {
            eps: e,
            t: t_round as u32,
            n_min,
            p_min,
            n_ok: nf >= n_min,
            p_ok: p_ok(p_min),
            rounding_changes_conditions: holds(t_real) != holds(t_round),
        }
    });

    let p_low = sf * ln_n / binom_f64((n - s.min(n)) as u64, k as u64);
    let p_high = (kf * kf * sf / (2.0 * nf)).exp() / binom_f64(n as u64, k as u64);
    let nonempty = p_low < p_high;
    let prop_window = PropWindow {
        p_low,
        p_high,
        nonempty,
        test_point: nonempty.then(|| (p_low * p_high).sqrt()),
    };

    Ok(RegimeReport {
        inputs,
        thm1,
        thm2,
        cor,
        prop_window,
    })
}

fn decimal<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

/// Counts and bounds from the window argument for `K_p` itself to have
/// `ν ≤ s` and be non-trivial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop23Diagnostics {
    pub n: u32,
    pub k: u32,
    pub s: u32,
    pub p: f64,
    /// `C(n, (s+1)k)·((s+1)k)! / k!^{s+1}`: ordered `(s+1)`-tuples of
    /// disjoint edges.
    #[serde(serialize_with = "decimal")]
    pub ordered_count: BigUint,
    /// `ordered_count / (s+1)!`: the number of `(s+1)`-matchings in `C([n], k)`.
    #[serde(serialize_with = "decimal")]
    pub matching_count: BigUint,
    /// `matching_count · p^{s+1}`, clamped to `[0, 1]`.
    pub matching_union_bound: f64,
    /// `ordered_count · p^{s+1}`, clamped to `[0, 1]`.
    pub ordered_union_bound: f64,
    /// The unclamped `matching_count · p^{s+1}`.
    pub matching_union_raw: f64,
    /// `C(n, s)(1 − p)^{C(n−s, k)}`, clamped to `[0, 1]`.
    pub trivial_bound: f64,
}

pub fn prop23_diagnostics(n: u32, k: u32, s: u32, p: f64) -> Result<Prop23Diagnostics> {
    if k < 1 || (s as u64 + 1) * k as u64 > n as u64 {
        return Err(Error::Range(format!(
            "need k >= 1 and (s + 1)k <= n, got n = {n}, k = {k}, s = {s}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Range(format!("p = {p} outside [0, 1]")));
    }
    let block = (s as u64 + 1) * k as u64;
    let ordered = binomial(n as u64, block) * factorial(block)
        / factorial(k as u64).pow(s + 1);
    let matchings = &ordered / factorial(s as u64 + 1);
    let scaled = |count: &BigUint| -> f64 {
        if p == 0.0 || count.is_zero() {
            0.0
        } else {
            (big_ln(count) + (s as f64 + 1.0) * p.ln()).exp()
        }
    };
    let raw = scaled(&matchings);
    let edges_left = binomial((n - s) as u64, k as u64);
    let trivial = if p == 1.0 {
        if edges_left.is_zero() {
            1.0
        } else {
            0.0
        }
    } else {
        (big_ln(&binomial(n as u64, s as u64)) + big_ln(&edges_left).exp() * (-p).ln_1p()).exp()
    };
    Ok(Prop23Diagnostics {
        n,
        k,
        s,
        p,
        matching_union_bound: raw.min(1.0),
        ordered_union_bound: scaled(&ordered).min(1.0),
        matching_union_raw: raw,
        trivial_bound: trivial.clamp(0.0, 1.0),
        ordered_count: ordered,
        matching_count: matchings,
    })
}

/// `f(x) = ln x / x^ε` at `x = k` against its maximum `1/(eε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cor15Constant {
    pub eps: f64,
    pub k: u32,
    /// `⌈k^ε⌉`.
    pub t: u32,
    pub f_k: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn cor15_constant(eps: f64, k: u32) -> Result<Cor15Constant> {
    if !(eps > 0.0 && eps < 1.0) || k < 2 {
        return Err(Error::Range(format!(
            "need 0 < eps < 1 and k >= 2, got eps = {eps}, k = {k}"
        )));
    }
    let kf = k as f64;
    let f_k = kf.ln() / kf.powf(eps);
    let bound = 1.0 / (E * eps);
    Ok(Cor15Constant {
        eps,
        k,
        t: kf.powf(eps).ceil() as u32,
        f_k,
        bound,
        holds: f_k <= bound * (1.0 + 1e-12),
    })
}
