//! Small integer helpers: primes, factorisation, modular inverses, CRT.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// All primes `p <= n`, by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Primes `p <= y` for a real cutoff `y`. Empty for `y < 2`.
pub fn primes_below_cutoff(y: f64) -> Vec<u64> {
    if !(y >= 2.0) {
        return Vec::new();
    }
    primes_up_to(y.floor() as u64)
}

/// Prime factorisation by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factorize(n).len() as u32
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `p^e`, or `None` on overflow.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}

/// Largest `e` with `p^e <= 2^63`; the digit budget stored for p-adic roots.
pub fn u64_precision(p: u64) -> u32 {
    let limit = 1u128 << 63;
    let mut e = 0;
    let mut acc = 1u128;
    while acc * p as u128 <= limit {
        acc *= p as u128;
        e += 1;
    }
    e
}

/// Inverse of `a` modulo `m` (m >= 1), if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let ext = a.extended_gcd(m);
    if !ext.gcd.is_one() {
        return None;
    }
    Some(ext.x.mod_floor(m))
}

/// `p`-adic valuation; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// Solve `x = r_i (mod m_i)` for pairwise coprime moduli. Returns the
/// residue in `[0, prod m_i)`.
pub fn crt(congruences: &[(u128, u128)]) -> u128 {
    let mut x = BigInt::zero();
    let mut modulus = BigInt::one();
    for &(r, m) in congruences {
        let m = BigInt::from(m);
        let r = BigInt::from(r);
        // x + modulus * t = r (mod m)
        let inv = mod_inverse(&modulus, &m).expect("CRT moduli must be coprime");
        let t = ((&r - &x) * inv).mod_floor(&m);
        x += &modulus * t;
        modulus *= m;
    }
    u128::try_from(x).expect("CRT result fits u128")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_below_cutoff(1.9).len(), 0);
        assert_eq!(primes_below_cutoff(3.5), vec![2, 3]);
    }

    #[test]
    fn factor_and_friends() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert_eq!(omega(30), 3);
        assert!(is_squarefree(30));
        assert!(!is_squarefree(12));
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
    }

    #[test]
    fn valuations_and_inverses() {
        assert_eq!(valuation(&BigInt::from(48), 2), Some(4));
        assert_eq!(valuation(&BigInt::from(-27), 3), Some(3));
        assert_eq!(valuation(&BigInt::zero(), 5), None);
        assert_eq!(mod_inverse(&BigInt::from(3), &BigInt::from(256)), Some(BigInt::from(171)));
        assert_eq!(mod_inverse(&BigInt::from(4), &BigInt::from(8)), None);
        assert_eq!(crt(&[(1, 2), (2, 3), (3, 5)]), 23);
        assert_eq!(u64_precision(2), 63);
    }
}
