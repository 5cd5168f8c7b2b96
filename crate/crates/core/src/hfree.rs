//! h-free sets: forbidden differences, checking, greedy construction and
//! exact maximum h-free subsets of `[1, N]`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// Default largest `N` accepted by [`max_h_free_exact`].
pub const DEFAULT_EXACT_LIMIT: u64 = 60;
/// Bitset width of the exact solver.
pub const HARD_EXACT_LIMIT: u64 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HFreeInstance {
    h: IntPoly,
    n: u64,
    /// Sorted `(value, least n >= 1 with h(n) = value)` for values in `[1, N-1]`.
    forbidden: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HFreeCheck {
    Ok,
    /// `a > b`, both in `A`, with `a - b = h(n)`.
    Violation { a: i64, b: i64, n: u64 },
}

impl HFreeCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, HFreeCheck::Ok)
    }
}

/// `1 + max |c_i / c_k|` over the coefficients of `p`: every real root of
/// `p` lies below it in absolute value.
fn cauchy_bound(p: &IntPoly) -> BigInt {
    match p.leading() {
        None => BigInt::from(0),
        Some(lead) => {
            let lead = lead.abs();
            let m = p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
            1 + (m + &lead - 1) / lead
        }
    }
}

impl HFreeInstance {
    pub fn new(h: &IntPoly, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("N must be positive".into()));
        }
        if h.is_zero() {
            return Err(Error::Domain("zero polynomial".into()));
        }
        let top = BigInt::from(n) - 1;
        let mut found: Vec<(u64, u64)> = Vec::new();
        let mut record = |v: &BigInt, x: u64| {
            if v.is_positive() && v <= &top {
                found.push((v.to_u64().expect("bounded"), x));
            }
        };
        if h.degree() == Some(0) {
            record(&h.coeff(0), 1);
        } else {
            let settled = cauchy_bound(&h.derivative());
            let increasing = h.leading().is_some_and(Signed::is_positive);
            let mut x = 1u64;
            loop {
                let xb = BigInt::from(x);
                let v = h.evaluate(&xb);
                record(&v, x);
                if xb >= settled && ((increasing && v > top) || (!increasing && !v.is_positive())) {
                    break;
                }
                x += 1;
            }
        }
        found.sort_unstable();
        found.dedup_by_key(|e| e.0);
        Ok(HFreeInstance { h: h.clone(), n, forbidden: found })
    }

    pub fn h(&self) -> &IntPoly {
        &self.h
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn forbidden(&self) -> Vec<u64> {
        self.forbidden.iter().map(|e| e.0).collect()
    }

    /// Least `n` with `h(n) = value`, if `value` is forbidden.
    pub fn witness(&self, value: u64) -> Option<u64> {
        self.forbidden.binary_search_by_key(&value, |e| e.0).ok().map(|i| self.forbidden[i].1)
    }

    fn membership(&self, set: &[i64]) -> Result<Vec<bool>> {
        let mut mem = vec![false; self.n as usize + 1];
        for &v in set {
            if v < 1 || v as u64 > self.n {
                return Err(Error::SetOutOfRange { value: v, n: self.n });
            }
            mem[v as usize] = true;
        }
        Ok(mem)
    }
}

/// `Ok` iff no two elements of `A` differ by some `h(n)`, `n >= 1`;
/// otherwise the lexicographically least violating `(a, b)`.
pub fn is_h_free(set: &[i64], inst: &HFreeInstance) -> Result<HFreeCheck> {
    let mem = inst.membership(set)?;
    for a in 1..=inst.n {
        if !mem[a as usize] {
            continue;
        }
        // largest forbidden difference first gives the smallest b
        for &(f, w) in inst.forbidden.iter().rev() {
            if f < a && mem[(a - f) as usize] {
                return Ok(HFreeCheck::Violation { a: a as i64, b: (a - f) as i64, n: w });
            }
        }
    }
    Ok(HFreeCheck::Ok)
}

/// Scan `1..=N`, keeping each element compatible with those already kept.
pub fn greedy_h_free(inst: &HFreeInstance) -> Vec<i64> {
    let mut chosen = vec![false; inst.n as usize + 1];
    let mut out = Vec::new();
    for v in 1..=inst.n {
        let clash = inst.forbidden.iter().take_while(|e| e.0 < v).any(|e| chosen[(v - e.0) as usize]);
        if !clash {
            chosen[v as usize] = true;
            out.push(v as i64);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxSet {
    pub size: usize,
    pub witness: Vec<i64>,
    pub nodes: u64,
}

struct Mis {
    adj: Vec<u128>,
    best: u128,
    best_size: u32,
    nodes: u64,
}

#[inline]
fn bits(x: u128) -> impl Iterator<Item = usize> {
    let mut x = x;
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i)
        }
    })
}

impl Mis {
    /// Number of cliques in a greedy clique cover of `cand`.
    fn clique_cover(&self, mut cand: u128) -> u32 {
        let mut k = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut common = self.adj[v] & cand;
            cand &= !(1u128 << v);
            while common != 0 {
                let u = common.trailing_zeros() as usize;
                cand &= !(1u128 << u);
                common &= self.adj[u] & !(1u128 << u);
            }
            k += 1;
        }
        k
    }

    fn search(&mut self, mut cand: u128, mut cur: u128) {
        self.nodes += 1;
        // vertices of degree <= 1 belong to some maximum independent set
        loop {
            let pick = bits(cand).find(|&v| (self.adj[v] & cand).count_ones() <= 1);
            match pick {
                Some(v) => {
                    cur |= 1u128 << v;
                    cand &= !(self.adj[v] | (1u128 << v));
                }
                None => break,
            }
        }
        let size = cur.count_ones();
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = cur;
            }
            return;
        }
        if size + self.clique_cover(cand) <= self.best_size {
            return;
        }
        let v = bits(cand).max_by_key(|&v| ((self.adj[v] & cand).count_ones(), std::cmp::Reverse(v))).expect("nonempty");
        self.search(cand & !(self.adj[v] | (1u128 << v)), cur | (1u128 << v));
        self.search(cand & !(1u128 << v), cur);
    }
}

/// Maximum independent set of the difference graph on `[1, N]` by
/// branch and bound over `u128` bitsets.
pub fn max_h_free_exact(inst: &HFreeInstance, limit: u64) -> Result<MaxSet> {
    let limit = limit.min(HARD_EXACT_LIMIT);
    if inst.n > limit {
        return Err(Error::TooLarge { what: "N for exact search", size: inst.n as u128, limit: limit as u128 });
    }
    let n = inst.n as usize;
    let mut adj = vec![0u128; n];
    for (f, _) in &inst.forbidden {
        let f = *f as usize;
        for u in 0..n.saturating_sub(f) {
            adj[u] |= 1u128 << (u + f);
            adj[u + f] |= 1u128 << u;
        }
    }
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let greedy = greedy_h_free(inst);
    let best = greedy.iter().fold(0u128, |m, &v| m | 1u128 << (v - 1));
    let mut mis = Mis { adj, best, best_size: best.count_ones(), nodes: 0 };
    mis.search(full, 0);
    let witness: Vec<i64> = bits(mis.best).map(|i| i as i64 + 1).collect();
    Ok(MaxSet { size: witness.len(), witness, nodes: mis.nodes })
}

/// Exhaustive maximum over all `2^N` subsets (oracle for small `N`).
pub fn max_h_free_brute(inst: &HFreeInstance) -> Result<usize> {
    if inst.n > 26 {
        return Err(Error::TooLarge { what: "N for brute force", size: inst.n as u128, limit: 26 });
    }
    let diffs = inst.forbidden();
    let best = (0u64..1 << inst.n)
        .filter(|&m| diffs.iter().all(|&f| m & (m >> f) == 0))
        .map(|m| m.count_ones())
        .max()
        .unwrap_or(0);
    Ok(best as usize)
}
