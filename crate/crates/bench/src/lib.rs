//! Shared fixtures for the kernel benchmarks.

use intersective_core::hfree::greedy_h_free;
use intersective_core::{AuxFamily, Delta, FreqSet, HFreeInstance, IntPoly};

pub fn squares() -> IntPoly {
    IntPoly::from_coeffs([0i64, 0, 1])
}

pub fn cubes() -> IntPoly {
    IntPoly::from_coeffs([0i64, 0, 0, 1])
}

pub fn cubic_family() -> IntPoly {
    IntPoly::from_coeffs([0i64, -2, 1, 1])
}

pub fn family(h: IntPoly, bound: u64) -> AuxFamily {
    AuxFamily::new(h, bound).expect("intersective")
}

/// Greedy `h`-free subset of `[1, N]`.
pub fn greedy_set(h: &IntPoly, n: u64) -> Vec<i64> {
    greedy_h_free(&HFreeInstance::new(h, n).expect("instance"))
}

/// `{a/q : 1 <= a < q, 2 <= q <= q_max}` truncated to `size` points, all distinct.
pub fn farey_points(q_max: u64, size: usize, m: u32) -> FreqSet {
    let mut seen = std::collections::BTreeSet::new();
    let mut fracs = Vec::new();
    for q in 2..=q_max {
        for a in 1..q {
            if num_gcd(a, q) == 1 && seen.insert((a, q)) && fracs.len() < size {
                fracs.push((a as i64, q));
            }
        }
    }
    FreqSet::rational(&fracs, m, Delta::Zero).expect("distinct")
}

fn num_gcd(a: u64, b: u64) -> u64 {
    intersective_core::arith::gcd_u64(a, b)
}
