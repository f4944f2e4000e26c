//! Binomial coefficients, the lexicographic combinatorial number system, and
//! k-subset enumeration.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::Vertex;

/// `C(n, k)` in 128-bit arithmetic, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        let g = gcd(acc, (i + 1) as u128);
        let (a, d) = (acc / g, (i + 1) as u128 / g);
        acc = a.checked_mul(num / d)?;
        debug_assert_eq!(num % d, 0);
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `C(n, k)` as `f64` (may be `inf` for very large values).
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    use num_traits::ToPrimitive;
    binomial(n, k).to_f64().unwrap_or(f64::INFINITY)
}

/// Saturating Pascal table `C(m, j)` for `m <= n`, `j <= k`.
#[derive(Clone, Debug)]
pub struct BinomialTable {
    k: usize,
    rows: Vec<u64>,
}

impl BinomialTable {
    pub fn new(n: u32, k: u32) -> Self {
        let (n, k) = (n as usize, k as usize);
        let w = k + 1;
        let mut rows = vec![0u64; (n + 1) * w];
        for m in 0..=n {
            rows[m * w] = 1;
            for j in 1..=k.min(m) {
                let above = if j < m { rows[(m - 1) * w + j] } else { 0 };
                rows[m * w + j] = rows[(m - 1) * w + j - 1].saturating_add(above);
            }
        }
        BinomialTable { k, rows }
    }

    #[inline]
    pub fn get(&self, m: u32, j: u32) -> u64 {
        let (m, j) = (m as usize, j as usize);
        if j > self.k || j > m {
            return 0;
        }
        self.rows[m * (self.k + 1) + j]
    }
}

/// Lexicographic rank of the sorted k-subset `subset` of `[n]`.
pub fn rank_subset(table: &BinomialTable, n: u32, subset: &[Vertex]) -> u64 {
    let k = subset.len() as u32;
    let mut rank = 0u64;
    let mut prev = 0;
    for (i, &v) in subset.iter().enumerate() {
        let rest = k - i as u32 - 1;
        for x in prev + 1..v {
            rank += table.get(n - x, rest);
        }
        prev = v;
    }
    rank
}

/// Inverse of [`rank_subset`]: the k-subset of `[n]` with lexicographic rank
/// `rank`.
pub fn unrank_subset(table: &BinomialTable, n: u32, k: u32, mut rank: u64) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(k as usize);
    let mut x: Vertex = 1;
    for i in 0..k {
        let rest = k - i - 1;
        loop {
            let c = table.get(n - x, rest);
            if rank < c {
                out.push(x);
                x += 1;
                break;
            }
            rank -= c;
            x += 1;
        }
    }
    out
}

/// Lexicographic iterator over the `k`-subsets of a sorted pool.
pub struct Combinations<T> {
    pool: Vec<T>,
    idx: Vec<usize>,
    done: bool,
}

impl<T: Copy> Combinations<T> {
    pub fn new(pool: Vec<T>, k: usize) -> Self {
        let done = k > pool.len();
        Combinations {
            pool,
            idx: (0..k).collect(),
            done,
        }
    }
}

impl<T: Copy> Iterator for Combinations<T> {
    type Item = Vec<T>;

    fn next(&mut self) -> Option<Vec<T>> {
        if self.done {
            return None;
        }
        let item = self.idx.iter().map(|&i| self.pool[i]).collect();
        let (n, k) = (self.pool.len(), self.idx.len());
        match (0..k).rev().find(|&i| self.idx[i] != i + n - k) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(item)
    }
}

/// All k-subsets of `[n]` in lexicographic order.
pub fn k_subsets(n: u32, k: u32) -> Combinations<Vertex> {
    Combinations::new((1..=n).collect(), k as usize)
}
