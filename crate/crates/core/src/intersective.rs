//! p-adic root data, intersectivity testing, and the auxiliary family
//! `h_d(x) = h(r_d + d x) / lambda(d)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, mod_inverse, valuation};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// Lifting depth past which an unresolved branch is reported as ambiguous.
const MAX_LIFT_DEPTH: u32 = 512;
/// Node budget for the exhaustive solution-tree walk.
const MAX_TREE_NODES: usize = 1 << 20;

/// A `Z_p` root of `h`, truncated modulo `p^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicRootData {
    pub p: u64,
    pub residue: BigInt,
    pub prec: u32,
    pub multiplicity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite(u64),
    /// Certified for every prime by an integer root.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntersectivityVerdict {
    /// `h` has no root modulo `witness_q`.
    NotIntersective { witness_q: u64 },
    IntersectiveUpTo {
        bound: Bound,
        integer_root: Option<BigInt>,
        /// All `Z_p` roots for primes up to the requested bound.
        roots: BTreeMap<u64, Vec<PAdicRootData>>,
    },
}

// --- rational polynomial helpers (squarefree decomposition only) ---

type QPoly = Vec<BigRational>;

fn q_trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn q_from_int(p: &IntPoly) -> QPoly {
    p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn q_deriv(p: &QPoly) -> QPoly {
    q_trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn q_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut rem = a.clone();
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() > db && !rem.is_empty() {
        let shift = rem.len() - 1 - db;
        let c = rem.last().unwrap() / &lead;
        for (i, bc) in b.iter().enumerate() {
            rem[shift + i] -= &c * bc;
        }
        quot[shift] = c;
        rem.pop();
        rem = q_trim(rem);
    }
    (q_trim(quot), rem)
}

fn q_monic(p: QPoly) -> QPoly {
    match p.last().cloned() {
        Some(l) => p.into_iter().map(|c| c / &l).collect(),
        None => p,
    }
}

fn q_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = q_divrem(&a, &b);
        a = b;
        b = r;
    }
    q_monic(a)
}

fn q_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    q_trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - b.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect(),
    )
}

/// Clear denominators and divide out the full content.
fn q_to_primitive(p: &QPoly) -> IntPoly {
    let den = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let mut ints: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
    if ints.last().is_some_and(Signed::is_negative) {
        ints.iter_mut().for_each(|c| *c = -c.clone());
    }
    IntPoly::new(ints)
}

/// Yun's squarefree decomposition over `Q`: primitive, pairwise coprime,
/// squarefree integer polynomials `f_i` with `h = c * prod f_i^i`.
pub fn squarefree_factors(h: &IntPoly) -> Vec<(IntPoly, u32)> {
    let f = q_from_int(h);
    if f.len() < 2 {
        return Vec::new();
    }
    let fd = q_deriv(&f);
    let a0 = q_gcd(&f, &fd);
    let mut b = q_divrem(&f, &a0).0;
    let c = q_divrem(&fd, &a0).0;
    let mut d = q_sub(&c, &q_deriv(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = q_gcd(&b, &d);
        let nb = q_divrem(&b, &a).0;
        let nc = q_divrem(&d, &a).0;
        if a.len() > 1 {
            out.push((q_to_primitive(&a), i));
        }
        d = q_sub(&nc, &q_deriv(&nb));
        b = nb;
        i += 1;
    }
    out
}

fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Newton iteration from a certified start `x` (with `v(f'(x)) = s` and
/// `v(f(x)) > 2s`) to the unique nearby root, truncated mod `p^prec`.
fn newton_to_precision(f: &IntPoly, fd: &IntPoly, x: BigInt, p: u64, s: u32, prec: u32) -> Result<BigInt> {
    let work = big_pow(p, prec + 2 * s + 2);
    let ps = big_pow(p, s);
    let mut x = x.mod_floor(&work);
    for _ in 0..200 {
        let fx = f.evaluate(&x);
        match valuation(&fx, p) {
            None => break,
            Some(v) if v >= prec + s => break,
            Some(_) => {}
        }
        let fdx = fd.evaluate(&x);
        let unit = &fdx / &ps;
        let inv = mod_inverse(&unit, &work).ok_or(Error::LiftAmbiguous { p, depth: prec })?;
        let step = ((&fx / &ps) * inv).mod_floor(&work);
        x = (x - step).mod_floor(&work);
    }
    let fx = f.evaluate(&x);
    if valuation(&fx, p).is_some_and(|v| v < prec + s) {
        return Err(Error::LiftAmbiguous { p, depth: prec });
    }
    Ok(x.mod_floor(&big_pow(p, prec)))
}

/// Truncations mod `p^prec` of the `Z_p` roots of a squarefree primitive `f`.
fn roots_of_squarefree(f: &IntPoly, p: u64, prec: u32) -> Result<Vec<BigInt>> {
    let fd = f.derivative();
    let modp = f.reduce_mod(p);
    let mut stack: Vec<(BigInt, u32)> = (0..p)
        .filter(|&r| modp.eval(r) == 0)
        .map(|r| (BigInt::from(r), 1))
        .collect();
    let mut out = Vec::new();
    let mut visited = 0usize;
    let pb = BigInt::from(p);
    while let Some((r, e)) = stack.pop() {
        visited += 1;
        if visited > MAX_TREE_NODES {
            return Err(Error::LiftAmbiguous { p, depth: e });
        }
        let fr = f.evaluate(&r);
        let fdr = fd.evaluate(&r);
        let s = valuation(&fdr, p);
        let vf = valuation(&fr, p);
        if let Some(s) = s {
            // The node {x = r mod p^e} sits inside the Hensel uniqueness disc.
            if e > s && vf.is_none_or(|v| v > 2 * s) {
                let z = if fr.is_zero() {
                    r.mod_floor(&big_pow(p, prec))
                } else {
                    newton_to_precision(f, &fd, r, p, s, prec)?
                };
                out.push(z);
                continue;
            }
        }
        if e >= MAX_LIFT_DEPTH {
            return Err(Error::LiftAmbiguous { p, depth: e });
        }
        // f(r + t p^e) = f(r) + t p^e f'(r)  (mod p^{e+1})
        let pe = big_pow(p, e);
        let lhs = (&fr / &pe).mod_floor(&pb);
        let slope = fdr.mod_floor(&pb);
        if slope.is_zero() {
            if lhs.is_zero() {
                for t in 0..p {
                    stack.push((&r + &pe * t, e + 1));
                }
            }
        } else {
            let inv = mod_inverse(&slope, &pb).expect("p prime");
            let t = (-lhs * inv).mod_floor(&pb);
            stack.push((&r + &pe * t, e + 1));
        }
    }
    Ok(out)
}

fn roots_from_factors(factors: &[(IntPoly, u32)], p: u64, prec: u32) -> Result<Vec<PAdicRootData>> {
    let mut found: BTreeMap<BigInt, u32> = BTreeMap::new();
    for (f, mult) in factors {
        for z in roots_of_squarefree(f, p, prec)? {
            let m = found.entry(z).or_insert(0);
            *m = (*m).max(*mult);
        }
    }
    Ok(found
        .into_iter()
        .map(|(residue, multiplicity)| PAdicRootData { p, residue, prec, multiplicity })
        .collect())
}

/// Truncations modulo `p^prec` of the `Z_p` roots of `h`, each tagged with
/// its multiplicity as a root of `h`.
pub fn hensel_roots(h: &IntPoly, p: u64, prec: u32) -> Result<Vec<PAdicRootData>> {
    if h.is_zero() {
        return Err(Error::Domain("zero polynomial".into()));
    }
    if prec == 0 {
        return Err(Error::Domain("precision must be positive".into()));
    }
    roots_from_factors(&squarefree_factors(h), p, prec)
}

/// Smallest `e` such that `h(x) = 0 (mod p^e)` has no solution, found by
/// walking the full solution tree level by level. `None` if the walk hits
/// the depth guard (which happens when a `Z_p` root exists).
pub fn min_unsolvable_exponent(h: &IntPoly, p: u64, max_depth: u32) -> Result<Option<u32>> {
    let hd = h.derivative();
    let pb = BigInt::from(p);
    let modp = h.reduce_mod(p);
    let mut level: Vec<BigInt> = (0..p).filter(|&r| modp.eval(r) == 0).map(BigInt::from).collect();
    let mut e = 1;
    while !level.is_empty() {
        if e >= max_depth {
            return Ok(None);
        }
        let pe = big_pow(p, e);
        let mut next = Vec::new();
        for r in &level {
            let lhs = (h.evaluate(r) / &pe).mod_floor(&pb);
            let slope = hd.evaluate(r).mod_floor(&pb);
            if slope.is_zero() {
                if lhs.is_zero() {
                    next.extend((0..p).map(|t| r + &pe * t));
                }
            } else {
                let t = (-lhs * mod_inverse(&slope, &pb).expect("p prime")).mod_floor(&pb);
                next.push(r + &pe * t);
            }
            if next.len() > MAX_TREE_NODES {
                return Err(Error::LiftAmbiguous { p, depth: e });
            }
        }
        level = next;
        e += 1;
    }
    Ok(Some(e))
}

/// An integer root of `h`, if one exists and the constant term is small
/// enough to enumerate its divisors.
pub fn integer_root(h: &IntPoly) -> Option<BigInt> {
    let a0 = h.coeff(0);
    if a0.is_zero() {
        return Some(BigInt::zero());
    }
    let n = a0.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut divisors = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            divisors.push(i);
            divisors.push(n / i);
        }
        i += 1;
    }
    divisors.sort_unstable();
    divisors.dedup();
    divisors.into_iter().find_map(|dv| {
        [-(dv as i64), dv as i64]
            .into_iter()
            .find(|&x| h.eval_i64(x).is_zero())
            .map(BigInt::from)
    })
}

/// Decide intersectivity for all primes up to `bound`. The returned
/// witness, if any, is the smallest prime power modulo which `h` has no
/// root among the primes inspected.
pub fn check_intersective(h: &IntPoly, bound: u64) -> Result<IntersectivityVerdict> {
    if h.degree().unwrap_or(0) < 1 {
        return Err(Error::Domain("polynomial must be nonconstant".into()));
    }
    let factors = squarefree_factors(h);
    let root = integer_root(h);
    let mut roots = BTreeMap::new();
    let mut best: Option<u64> = None;
    for p in arith::primes_up_to(bound) {
        if best.is_some_and(|w| p > w) {
            break;
        }
        let found = roots_from_factors(&factors, p, arith::u64_precision(p))?;
        if found.is_empty() {
            let e = min_unsolvable_exponent(h, p, MAX_LIFT_DEPTH)?
                .ok_or(Error::LiftAmbiguous { p, depth: MAX_LIFT_DEPTH })?;
            if let Some(w) = arith::checked_pow(p, e) {
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        } else {
            roots.insert(p, found);
        }
    }
    if let Some(witness_q) = best {
        return Ok(IntersectivityVerdict::NotIntersective { witness_q });
    }
    Ok(IntersectivityVerdict::IntersectiveUpTo {
        bound: if root.is_some() { Bound::Unbounded } else { Bound::Finite(bound) },
        integer_root: root,
        roots,
    })
}

/// Memoised data for one `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxEntry {
    pub d: u64,
    pub r: BigInt,
    pub lambda: BigInt,
    pub poly: IntPoly,
    /// Leading coefficient `b_d`.
    pub leading: BigInt,
    /// Sum of absolute coefficients `J_d`.
    pub abs_sum: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingReport {
    pub d: u64,
    pub q: u64,
    pub s: BigInt,
    pub checked: u64,
}

/// An intersective `h` (positive leading coefficient) with a chosen
/// `Z_p` root for every prime up to `bound`.
#[derive(Debug)]
pub struct AuxFamily {
    h: IntPoly,
    negated: bool,
    bound: u64,
    roots: BTreeMap<u64, PAdicRootData>,
    memo: RwLock<HashMap<u64, Arc<AuxEntry>>>,
}

impl AuxFamily {
    /// Build the family, choosing for each prime the root of largest
    /// multiplicity (ties: smallest residue mod p, then mod p^prec).
    pub fn new(h: IntPoly, bound: u64) -> Result<Self> {
        let (h, negated) = Self::normalise(h)?;
        let factors = squarefree_factors(&h);
        let mut roots = BTreeMap::new();
        for p in arith::primes_up_to(bound) {
            let mut found = roots_from_factors(&factors, p, arith::u64_precision(p))?;
            if found.is_empty() {
                let e = min_unsolvable_exponent(&h, p, MAX_LIFT_DEPTH)?
                    .ok_or(Error::LiftAmbiguous { p, depth: MAX_LIFT_DEPTH })?;
                let witness = arith::checked_pow(p, e).unwrap_or(u64::MAX);
                return Err(Error::NotIntersective { witness });
            }
            let pb = BigInt::from(p);
            found.sort_by(|a, b| {
                b.multiplicity
                    .cmp(&a.multiplicity)
                    .then_with(|| a.residue.mod_floor(&pb).cmp(&b.residue.mod_floor(&pb)))
                    .then_with(|| a.residue.cmp(&b.residue))
            });
            roots.insert(p, found.swap_remove(0));
        }
        Ok(Self::from_parts(h, negated, bound, roots))
    }

    /// Build the family from an explicit root choice (one root per prime up
    /// to `bound`), for comparing how downstream data depend on the choice.
    pub fn with_roots(h: IntPoly, bound: u64, chosen: BTreeMap<u64, PAdicRootData>) -> Result<Self> {
        let (h, negated) = Self::normalise(h)?;
        for p in arith::primes_up_to(bound) {
            let z = chosen
                .get(&p)
                .ok_or_else(|| Error::PreconditionViolated(format!("no root supplied for p = {p}")))?;
            let modulus = big_pow(p, z.prec);
            if !h.evaluate(&z.residue).mod_floor(&modulus).is_zero() {
                return Err(Error::PreconditionViolated(format!("supplied residue is not a root mod {p}^{}", z.prec)));
            }
        }
        Ok(Self::from_parts(h, negated, bound, chosen))
    }

    fn normalise(h: IntPoly) -> Result<(IntPoly, bool)> {
        if h.degree().unwrap_or(0) < 1 {
            return Err(Error::Domain("polynomial must be nonconstant".into()));
        }
        if h.leading().is_some_and(Signed::is_negative) {
            Ok((h.neg(), true))
        } else {
            Ok((h, false))
        }
    }

    fn from_parts(h: IntPoly, negated: bool, bound: u64, roots: BTreeMap<u64, PAdicRootData>) -> Self {
        AuxFamily { h, negated, bound, roots, memo: RwLock::new(HashMap::new()) }
    }

    pub fn h(&self) -> &IntPoly {
        &self.h
    }

    pub fn degree(&self) -> usize {
        self.h.degree().expect("nonconstant")
    }

    pub fn negated(&self) -> bool {
        self.negated
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn root(&self, p: u64) -> Option<&PAdicRootData> {
        self.roots.get(&p)
    }

    pub fn roots(&self) -> &BTreeMap<u64, PAdicRootData> {
        &self.roots
    }

    fn checked_factors(&self, d: u64) -> Result<Vec<(u64, u32)>> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        let fs = arith::factorize(d);
        if let Some(&(p, _)) = fs.iter().find(|(p, _)| !self.roots.contains_key(p)) {
            return Err(Error::PrimeOutOfRange { p, bound: self.bound });
        }
        Ok(fs)
    }

    /// The completely multiplicative `lambda` with `lambda(p) = p^{m_p}`.
    pub fn lambda_of(&self, d: u64) -> Result<BigInt> {
        Ok(self
            .checked_factors(d)?
            .iter()
            .map(|&(p, a)| big_pow(p, a * self.roots[&p].multiplicity))
            .product())
    }

    /// The unique `r` in `(-d, 0]` with `r = z_p (mod p^a)` for each `p^a || d`.
    pub fn r_of(&self, d: u64) -> Result<BigInt> {
        let congruences: Vec<(u128, u128)> = self
            .checked_factors(d)?
            .iter()
            .map(|&(p, a)| {
                let pa = big_pow(p, a);
                let z = self.roots[&p].residue.mod_floor(&pa);
                (z.to_u128().expect("fits"), pa.to_u128().expect("fits"))
            })
            .collect();
        let x = arith::crt(&congruences);
        Ok(if x == 0 { BigInt::zero() } else { BigInt::from(x) - BigInt::from(d) })
    }

    /// Memoised `(r_d, lambda(d), h_d, b_d, J_d)`.
    pub fn aux(&self, d: u64) -> Result<Arc<AuxEntry>> {
        if let Some(e) = self.memo.read().expect("memo lock").get(&d) {
            return Ok(Arc::clone(e));
        }
        let r = self.r_of(d)?;
        let lambda = self.lambda_of(d)?;
        let poly = self
            .h
            .shift_scale_divide(&r, &BigInt::from(d), &lambda)
            .map_err(|e| Error::InvariantViolation(format!("h_{d} is not integral: {e}")))?;
        let stats = poly.coeff_stats()?;
        if !stats.leading.is_positive() {
            return Err(Error::InvariantViolation(format!("h_{d} has nonpositive leading coefficient")));
        }
        let entry = Arc::new(AuxEntry { d, r, lambda, poly, leading: stats.leading, abs_sum: stats.abs_sum });
        let mut memo = self.memo.write().expect("memo lock");
        Ok(Arc::clone(memo.entry(d).or_insert(entry)))
    }

    pub fn aux_poly(&self, d: u64) -> Result<IntPoly> {
        Ok(self.aux(d)?.poly.clone())
    }

    /// Check `lambda(q) h_{dq}(n) = h_d(s + q n)` for `n = 1..=n_max`, with
    /// `r_{dq} = r_d + d s` and `-q < s <= 0`.
    pub fn verify_nesting(&self, d: u64, q: u64, n_max: u64) -> Result<NestingReport> {
        let dq = d.checked_mul(q).ok_or(Error::TooLarge { what: "d*q", size: d as u128 * q as u128, limit: u64::MAX as u128 })?;
        let outer = self.aux(d)?;
        let inner = self.aux(dq)?;
        let lam_q = self.lambda_of(q)?;
        let (s, rem) = (&inner.r - &outer.r).div_rem(&BigInt::from(d));
        let qb = BigInt::from(q);
        if !rem.is_zero() || s <= -qb.clone() || s.is_positive() {
            return Err(Error::NestingViolation { d, q, n: 0 });
        }
        for n in 1..=n_max {
            let nb = BigInt::from(n);
            let lhs = &lam_q * inner.poly.evaluate(&nb);
            let rhs = outer.poly.evaluate(&(&s + &qb * &nb));
            if lhs != rhs {
                return Err(Error::NestingViolation { d, q, n });
            }
        }
        Ok(NestingReport { d, q, s, checked: n_max })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(c.iter().copied())
    }

    fn residues(v: &[PAdicRootData]) -> Vec<(i64, u32)> {
        v.iter().map(|r| (r.residue.to_i64().unwrap(), r.multiplicity)).collect()
    }

    #[test]
    fn squarefree_decomposition() {
        // x^2 (x - 1)^3 (x + 2)
        let h = p(&[0, 0, 1]).mul(&p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[-1, 1]))).mul(&p(&[2, 1]));
        let f = squarefree_factors(&h);
        assert_eq!(f, vec![(p(&[2, 1]), 1), (p(&[0, 1]), 2), (p(&[-1, 1]), 3)]);
        assert_eq!(squarefree_factors(&p(&[-1, 0, 2])), vec![(p(&[-1, 0, 2]), 1)]);
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(residues(&hensel_roots(&p(&[0, 0, 1]), 5, 3).unwrap()), vec![(0, 2)]);
        assert_eq!(residues(&hensel_roots(&p(&[-1, 0, 1]), 2, 4).unwrap()), vec![(1, 1), (15, 1)]);
        assert_eq!(residues(&hensel_roots(&p(&[-1, 0, 1]), 7, 1).unwrap()), vec![(1, 1), (6, 1)]);
    }

    #[test]
    fn hensel_truncations_are_roots() {
        // oracle: brute-force solutions mod 2^10 of x^2 = 1
        let sols: Vec<i64> = (0..1024).filter(|&x| (x * x - 1) % 1024 == 0).collect();
        for z in hensel_roots(&p(&[-1, 0, 1]), 2, 10).unwrap() {
            assert!(sols.contains(&z.residue.to_i64().unwrap()));
        }
    }

    #[test]
    fn hensel_singular_and_irrational() {
        // x^2 - 17 has two roots in Z_2 (17 = 1 mod 8).
        let r = hensel_roots(&p(&[-17, 0, 1]), 2, 20).unwrap();
        assert_eq!(r.len(), 2);
        let m = BigInt::from(1u64 << 20);
        for z in &r {
            assert!((&z.residue * &z.residue - BigInt::from(17)).mod_floor(&m).is_zero());
        }
        // x^2 - 13 has no root in Z_13.
        assert!(hensel_roots(&p(&[-13, 0, 1]), 13, 5).unwrap().is_empty());
        // x^2 - 2 has no root in Z_2
        assert!(hensel_roots(&p(&[-2, 0, 1]), 2, 5).unwrap().is_empty());
    }

    #[test]
    fn x2_plus_1_not_intersective() {
        let v = check_intersective(&p(&[1, 0, 1]), 10).unwrap();
        assert_eq!(v, IntersectivityVerdict::NotIntersective { witness_q: 3 });
        for n in 0..3 {
            assert_ne!((n * n + 1) % 3, 0);
        }
        assert_eq!(min_unsolvable_exponent(&p(&[1, 0, 1]), 2, 64).unwrap(), Some(2));
    }

    #[test]
    fn squares_are_intersective() {
        match check_intersective(&p(&[0, 0, 1]), 100).unwrap() {
            IntersectivityVerdict::IntersectiveUpTo { bound, integer_root, roots } => {
                assert_eq!(bound, Bound::Unbounded);
                assert_eq!(integer_root, Some(BigInt::zero()));
                assert_eq!(roots.len(), 25);
                assert!(roots.values().all(|r| r.len() == 1 && r[0].residue.is_zero() && r[0].multiplicity == 2));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn lambda_and_r() {
        let sq = AuxFamily::new(p(&[0, 0, 1]), 100).unwrap();
        assert_eq!(sq.lambda_of(12).unwrap(), BigInt::from(144));
        assert_eq!(sq.lambda_of(4).unwrap() * sq.lambda_of(3).unwrap(), BigInt::from(144));
        assert_eq!(sq.lambda_of(1).unwrap(), BigInt::one());
        assert_eq!(sq.r_of(10).unwrap(), BigInt::zero());
        assert_eq!(sq.r_of(1).unwrap(), BigInt::zero());
        let h = AuxFamily::new(p(&[-1, 0, 1]), 100).unwrap();
        assert_eq!(h.lambda_of(6).unwrap(), BigInt::from(6));
        assert_eq!(h.r_of(6).unwrap(), BigInt::from(-5));
        assert!(matches!(h.lambda_of(101), Err(Error::PrimeOutOfRange { p: 101, bound: 100 })));
    }

    #[test]
    fn aux_poly_examples() {
        let sq = AuxFamily::new(p(&[0, 0, 1]), 50).unwrap();
        assert_eq!(sq.aux_poly(7).unwrap(), p(&[0, 0, 1]));
        let h = AuxFamily::new(p(&[-1, 0, 1]), 50).unwrap();
        assert_eq!(h.aux_poly(6).unwrap(), p(&[4, -10, 6]));
        assert_eq!(h.aux_poly(1).unwrap(), p(&[-1, 0, 1]));
        let g = AuxFamily::new(p(&[0, -2, 1, 1]), 50).unwrap();
        assert_eq!(g.aux_poly(1).unwrap(), *g.h());
    }

    #[test]
    fn negative_leading_is_flipped() {
        let f = AuxFamily::new(p(&[1, 0, -1]), 20).unwrap();
        assert!(f.negated());
        assert_eq!(f.h(), &p(&[-1, 0, 1]));
    }

    #[test]
    fn non_intersective_family_rejected() {
        assert_eq!(AuxFamily::new(p(&[1, 0, 1]), 10).unwrap_err(), Error::NotIntersective { witness: 4 });
    }

    #[test]
    fn nesting_examples() {
        let sq = AuxFamily::new(p(&[0, 0, 1]), 50).unwrap();
        assert_eq!(sq.verify_nesting(2, 3, 50).unwrap().s, BigInt::zero());
        let h = AuxFamily::new(p(&[-1, 0, 1]), 50).unwrap();
        assert_eq!(h.verify_nesting(1, 6, 50).unwrap().s, BigInt::from(-5));
        assert_eq!(h.verify_nesting(1, 1, 5).unwrap().s, BigInt::zero());
    }

    #[test]
    fn classical_intersective_example() {
        // (x^2 - 13)(x^2 - 17)(x^2 - 221)
        let h = p(&[-13, 0, 1]).mul(&p(&[-17, 0, 1])).mul(&p(&[-221, 0, 1]));
        assert_eq!(integer_root(&h), None);
        match check_intersective(&h, 1000).unwrap() {
            IntersectivityVerdict::IntersectiveUpTo { bound, roots, .. } => {
                assert_eq!(bound, Bound::Finite(1000));
                assert_eq!(roots.len(), 168);
            }
            v => panic!("unexpected {v:?}"),
        }
    }
}
