//! Residue sieve on the derivative: `gamma(g;p)`, `j(g;p)`, the admissible
//! sets `W(g;Y)` and `W_q(g;Y)`, and the expected density `w(Y)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{self, valuation};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// Largest `p^gamma` for which the bad-residue mask is materialised.
const MAX_PRIME_MODULUS: u64 = 1 << 26;
/// Largest wheel modulus built in memory.
pub const MAX_WHEEL: u64 = 100_000_000;
const BLOCK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSieveData {
    pub p: u64,
    pub gamma: u32,
    /// `p^gamma`
    pub modulus: u64,
    /// Sorted residues `s mod p^gamma` with `g'(s) = 0 (mod p^gamma)`.
    pub bad: Vec<u64>,
    mask: Vec<bool>,
}

impl PrimeSieveData {
    pub fn new(g: &IntPoly, p: u64) -> Result<Self> {
        let gamma = gamma_exponent(g, p)?;
        let modulus = arith::checked_pow(p, gamma)
            .filter(|&m| m <= MAX_PRIME_MODULUS)
            .ok_or(Error::TooLarge { what: "p^gamma", size: (p as u128).pow(gamma), limit: MAX_PRIME_MODULUS as u128 })?;
        let dmod = g.derivative().reduce_mod(modulus);
        let mask: Vec<bool> = (0..modulus).map(|s| dmod.eval(s) == 0).collect();
        let bad = (0..modulus).filter(|&s| mask[s as usize]).collect();
        Ok(PrimeSieveData { p, gamma, modulus, bad, mask })
    }

    pub fn j(&self) -> u64 {
        self.bad.len() as u64
    }

    #[inline]
    pub fn is_bad(&self, n: i64) -> bool {
        self.mask[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// `1 - j / p^gamma`
    pub fn factor(&self) -> f64 {
        1.0 - self.j() as f64 / self.modulus as f64
    }
}

/// Minimal `gamma >= 1` with `g'` not identically zero modulo `p^gamma`.
///
/// An integer polynomial vanishes identically mod `m` iff `m` divides all
/// of its forward differences at 0.
pub fn gamma_exponent(g: &IntPoly, p: u64) -> Result<u32> {
    let dg = g.derivative();
    let deg = match dg.degree() {
        Some(k) if !dg.is_zero() => k,
        _ => return Err(Error::ZeroDerivative),
    };
    let mut vals: Vec<BigInt> = (0..=deg as i64).map(|x| dg.eval_i64(x)).collect();
    let mut best = u32::MAX;
    for _ in 0..=deg {
        if let Some(v) = valuation(&vals[0], p) {
            best = best.min(v);
        }
        vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
        if vals.is_empty() {
            break;
        }
    }
    Ok(best + 1)
}

/// `(j(g;p), bad residues mod p^gamma)` by exhaustive count.
pub fn root_count(g: &IntPoly, p: u64) -> Result<(u64, Vec<u64>)> {
    let d = PrimeSieveData::new(g, p)?;
    Ok((d.j(), d.bad))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SieveMethod {
    Wheel,
    Blocks,
    Direct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SieveCount {
    pub count: u64,
    pub main_term: f64,
    pub rel_error: f64,
    pub method: SieveMethod,
    /// Whether `log X >= log Y log log Y`.
    pub regime_ok: bool,
}

#[derive(Clone, Debug)]
pub struct SieveProfile {
    g: IntPoly,
    y: f64,
    per_prime: Vec<PrimeSieveData>,
}

impl SieveProfile {
    pub fn new(g: &IntPoly, y: f64) -> Result<Self> {
        if g.derivative().is_zero() {
            return Err(Error::ZeroDerivative);
        }
        let per_prime = arith::primes_below_cutoff(y)
            .into_iter()
            .map(|p| PrimeSieveData::new(g, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SieveProfile { g: g.clone(), y, per_prime })
    }

    pub fn g(&self) -> &IntPoly {
        &self.g
    }

    pub fn cutoff(&self) -> f64 {
        self.y
    }

    pub fn per_prime(&self) -> &[PrimeSieveData] {
        &self.per_prime
    }

    pub fn prime(&self, p: u64) -> Option<&PrimeSieveData> {
        self.per_prime.iter().find(|d| d.p == p)
    }

    /// Membership in `W(g;Y)`.
    pub fn in_w(&self, n: i64) -> bool {
        self.per_prime.iter().all(|d| !d.is_bad(n))
    }

    /// Membership in `W_q(g;Y)`: only primes with `p^gamma | q` constrain.
    pub fn in_wq(&self, q: u64, n: i64) -> bool {
        self.per_prime
            .iter()
            .filter(|d| q.is_multiple_of(d.modulus))
            .all(|d| !d.is_bad(n))
    }

    /// `w(Y) = prod_{p <= Y} (1 - j_p / p^gamma_p)`
    pub fn expected_density(&self) -> f64 {
        self.per_prime.iter().map(PrimeSieveData::factor).product()
    }

    pub fn expected_density_exact(&self) -> BigRational {
        self.per_prime.iter().fold(BigRational::one(), |acc, d| {
            acc * BigRational::new(BigInt::from(d.modulus - d.j()), BigInt::from(d.modulus))
        })
    }

    /// Product over primes `p <= Y` with `p^gamma` not dividing `q`.
    pub fn complement_density(&self, q: u64) -> f64 {
        self.per_prime
            .iter()
            .filter(|d| !q.is_multiple_of(d.modulus))
            .map(PrimeSieveData::factor)
            .product()
    }

    /// `w(Y) (log Y)^{k-1}`, the quantity bounded below for auxiliary families.
    pub fn log_normalised_density(&self) -> f64 {
        let k = self.g.degree().unwrap_or(1) as i32;
        self.expected_density() * self.y.max(1.0).ln().powi(k - 1)
    }

    /// `prod p^gamma_p`, or `None` on `u64` overflow.
    pub fn wheel_modulus(&self) -> Option<u64> {
        self.per_prime.iter().try_fold(1u64, |l, d| l.checked_mul(d.modulus))
    }

    /// Count `[1, X] ∩ W` with a wheel or by per-prime residue marking.
    pub fn sieve_count(&self, x: u64) -> SieveCount {
        let wheel = self.wheel_modulus().filter(|&l| l <= x.min(MAX_WHEEL));
        let (count, method) = match wheel {
            Some(l) => (self.wheel_count(l, x), SieveMethod::Wheel),
            None => (self.block_count(x), SieveMethod::Blocks),
        };
        self.finish(count, x, method)
    }

    /// Independent oracle: membership test for every `n` in `[1, X]`.
    pub fn direct_count(&self, x: u64) -> SieveCount {
        let count = (1..x + 1)
            .into_par_iter()
            .filter(|&n| self.in_w(n as i64))
            .count() as u64;
        self.finish(count, x, SieveMethod::Direct)
    }

    fn finish(&self, count: u64, x: u64, method: SieveMethod) -> SieveCount {
        let main_term = x as f64 * self.expected_density();
        let rel_error = if main_term == 0.0 {
            f64::INFINITY
        } else {
            (count as f64 - main_term).abs() / main_term
        };
        let ly = self.y.max(2.0).ln();
        let regime_ok = (x.max(1) as f64).ln() >= ly * ly.ln().max(0.0);
        SieveCount { count, main_term, rel_error, method, regime_ok }
    }

    fn wheel_count(&self, l: u64, x: u64) -> u64 {
        let mut ok = vec![true; l as usize];
        for d in &self.per_prime {
            for &b in &d.bad {
                let mut s = b;
                while s < l {
                    ok[s as usize] = false;
                    s += d.modulus;
                }
            }
        }
        let full = ok.iter().filter(|&&b| b).count() as u64;
        let rem = x % l;
        // residues 1..=rem of the final partial period
        let tail = ok[1..=rem as usize].iter().filter(|&&b| b).count() as u64;
        (x / l) * full + tail
    }

    fn block_count(&self, x: u64) -> u64 {
        let blocks = x.div_ceil(BLOCK);
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let lo = 1 + b * BLOCK;
                let hi = (lo + BLOCK - 1).min(x);
                let len = (hi - lo + 1) as usize;
                let mut ok = vec![true; len];
                for d in &self.per_prime {
                    let m = d.modulus;
                    let base = lo % m;
                    for &r in &d.bad {
                        let mut i = ((r + m - base) % m) as usize;
                        while i < len {
                            ok[i] = false;
                            i += m as usize;
                        }
                    }
                }
                ok.iter().filter(|&&v| v).count() as u64
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    }
}

/// Convert an exact density to `f64`.
pub fn density_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(c.iter().copied())
    }

    fn brute_gamma(g: &IntPoly, p: u64) -> u32 {
        let dg = g.derivative();
        (1..)
            .find(|&e| {
                let m = p.pow(e);
                let dm = dg.reduce_mod(m);
                (0..m).any(|s| dm.eval(s) != 0)
            })
            .unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_exponent(&p(&[0, 0, 0, 1]), 2).unwrap(), 1);
        assert_eq!(gamma_exponent(&p(&[0, 0, 1]), 2).unwrap(), 2);
        assert_eq!(gamma_exponent(&p(&[0, 0, 0, 1]), 3).unwrap(), 2);
        assert_eq!(gamma_exponent(&p(&[5]), 3), Err(Error::ZeroDerivative));
    }

    #[test]
    fn gamma_matches_enumeration() {
        let polys = [
            p(&[0, 0, 1]),
            p(&[0, 0, 0, 1]),
            p(&[0, 0, 0, 0, 0, 1]),
            p(&[3, 0, 4, 0, 6]),
            p(&[0, 12, 18, 24]),
            p(&[0, 0, 2, 0, 0, 0, 0, 1]),
        ];
        for g in &polys {
            for q in [2, 3, 5, 7] {
                assert_eq!(gamma_exponent(g, q).unwrap(), brute_gamma(g, q), "{g} at {q}");
            }
        }
    }

    #[test]
    fn root_count_examples() {
        assert_eq!(root_count(&p(&[0, 0, 1]), 2).unwrap(), (2, vec![0, 2]));
        assert_eq!(root_count(&p(&[0, 0, 0, 1]), 3).unwrap(), (3, vec![0, 3, 6]));
        assert_eq!(root_count(&p(&[-1, 0, 1]), 5).unwrap(), (1, vec![0]));
    }

    #[test]
    fn membership_examples() {
        let sq = SieveProfile::new(&p(&[0, 0, 1]), 3.0).unwrap();
        assert!(sq.in_w(1));
        assert!(!sq.in_w(2));
        assert!(!sq.in_wq(4, 2));
        assert!(sq.in_wq(2, 2));
        assert!(sq.in_wq(1, 2));
        let cube = SieveProfile::new(&p(&[0, 0, 0, 1]), 3.0).unwrap();
        assert!(!cube.in_wq(9, 3));
        let empty = SieveProfile::new(&p(&[0, 0, 1]), 1.5).unwrap();
        assert!((0..100).all(|n| empty.in_w(n)));
    }

    #[test]
    fn density_examples() {
        let sq = SieveProfile::new(&p(&[0, 0, 1]), 3.0).unwrap();
        assert_eq!(sq.expected_density_exact(), BigRational::new(1.into(), 3.into()));
        assert!((sq.expected_density() - 1.0 / 3.0).abs() < 1e-15);
        let h = SieveProfile::new(&p(&[-1, 0, 1]), 5.0).unwrap();
        assert_eq!(h.expected_density_exact(), BigRational::new(4.into(), 15.into()));
        let e = SieveProfile::new(&p(&[0, 0, 1]), 1.0).unwrap();
        assert_eq!(e.expected_density(), 1.0);
    }

    #[test]
    fn count_examples() {
        let sq = SieveProfile::new(&p(&[0, 0, 1]), 3.0).unwrap();
        let c = sq.sieve_count(12);
        assert_eq!(c.count, 4);
        assert_eq!(c.method, SieveMethod::Wheel);
        assert!((c.main_term - 4.0).abs() < 1e-12);
        assert!(c.rel_error < 1e-12);
        let e = SieveProfile::new(&p(&[0, 0, 1]), 1.0).unwrap();
        assert_eq!(e.sieve_count(100).count, 100);
    }

    #[test]
    fn wheel_blocks_direct_agree() {
        let g = p(&[0, 0, 0, 1]);
        let prof = SieveProfile::new(&g, 10.0).unwrap();
        let x = 1_000_000;
        let w = prof.sieve_count(x);
        assert_eq!(w.method, SieveMethod::Wheel);
        assert_eq!(w.count, prof.block_count(x));
        assert_eq!(w.count, prof.direct_count(x).count);
        assert!(w.rel_error < 0.05);
    }

    #[test]
    fn full_period_is_exact() {
        let prof = SieveProfile::new(&p(&[-1, 0, 1]), 7.0).unwrap();
        let l = prof.wheel_modulus().unwrap();
        let c = prof.direct_count(l).count;
        let w = prof.expected_density_exact();
        assert_eq!(BigRational::from_integer(BigInt::from(c)), w * BigRational::from_integer(BigInt::from(l)));
    }
}
