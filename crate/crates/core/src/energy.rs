//! Additive energy `E_{2m}(S; delta)` of frequency sets, and numerical
//! checks of the large-values and rational-energy inequalities.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arcs::{fourier_set, TorusPoint};
use crate::error::{Error, Result};

/// Refuse when `|S|^{2m}` exceeds this.
pub const ENERGY_GUARD: u128 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum Delta {
    Zero,
    Exact(BigRational),
    Approx(f64),
}

impl Delta {
    /// `1 / (2N)`
    pub fn half_over(n: u64) -> Self {
        Delta::Exact(BigRational::new(BigInt::one(), BigInt::from(2 * n)))
    }

    fn as_f64(&self) -> f64 {
        match self {
            Delta::Zero => 0.0,
            Delta::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Delta::Approx(x) => *x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreqSet {
    pub elems: Vec<TorusPoint>,
    pub m: u32,
    pub delta: Delta,
}

/// Exact `(a, q)` of a point without float offset.
fn exact_fraction(p: &TorusPoint) -> Option<(u64, u64)> {
    match *p {
        TorusPoint::Rational { a, q, offset } if offset == 0.0 => Some((a, q)),
        _ => None,
    }
}

impl FreqSet {
    pub fn new(elems: Vec<TorusPoint>, m: u32, delta: Delta) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("m must be positive".into()));
        }
        let mut seen: Vec<BigRational> = elems.iter().map(|p| p.exact()).collect();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::PreconditionViolated("elements must be distinct torus points".into()));
        }
        Ok(FreqSet { elems, m, delta })
    }

    /// Build from reduced-or-not fractions `a/q`.
    pub fn rational(fracs: &[(i64, u64)], m: u32, delta: Delta) -> Result<Self> {
        let elems = fracs.iter().map(|&(a, q)| TorusPoint::rational(a, q)).collect::<Result<Vec<_>>>()?;
        Self::new(elems, m, delta)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    fn is_rational(&self) -> bool {
        self.elems.iter().all(|p| exact_fraction(p).is_some())
    }

    fn work(&self) -> u128 {
        (self.elems.len() as u128).checked_pow(2 * self.m).unwrap_or(u128::MAX)
    }
}

fn guard(fs: &FreqSet) -> Result<()> {
    let w = fs.work();
    if w > ENERGY_GUARD {
        return Err(Error::TooLarge { what: "|S|^{2m}", size: w, limit: ENERGY_GUARD });
    }
    Ok(())
}

/// All `m`-fold sums of `values` modulo `modulus`, sorted.
fn m_fold_sums(values: &[BigInt], m: u32, modulus: &BigInt) -> Vec<BigInt> {
    let mut sums = vec![BigInt::zero()];
    for _ in 0..m {
        sums = sums
            .par_iter()
            .flat_map_iter(|s| values.iter().map(move |v| (s + v).mod_floor(modulus)))
            .collect();
    }
    sums.par_sort_unstable();
    sums
}

/// Number of `y` in sorted `ys` with `lo <= y <= hi`.
fn count_between<T: Ord>(ys: &[T], lo: &T, hi: &T) -> u64 {
    if lo > hi {
        return 0;
    }
    (ys.partition_point(|y| y <= hi) - ys.partition_point(|y| y < lo)) as u64
}

/// `E_{2m}(S; delta)` by meet in the middle: sort the `m`-fold sums once
/// and count pairs whose difference is within `delta` of an integer.
pub fn additive_energy(fs: &FreqSet) -> Result<u64> {
    guard(fs)?;
    if fs.is_empty() {
        return Ok(0);
    }
    if fs.is_rational() && !matches!(fs.delta, Delta::Approx(_)) {
        return Ok(energy_exact(fs));
    }
    if matches!(fs.delta, Delta::Zero) {
        return Err(Error::PreconditionViolated("delta = 0 needs exact rational elements".into()));
    }
    Ok(energy_float(fs))
}

fn energy_exact(fs: &FreqSet) -> u64 {
    let fracs: Vec<(u64, u64)> = fs.elems.iter().map(|p| exact_fraction(p).expect("rational")).collect();
    let den = fracs.iter().fold(BigInt::one(), |l, &(_, q)| l.lcm(&BigInt::from(q)));
    let values: Vec<BigInt> = fracs.iter().map(|&(a, q)| BigInt::from(a) * (&den / BigInt::from(q))).collect();
    let sums = m_fold_sums(&values, fs.m, &den);
    let total = sums.len() as u64;
    // window half-width in units of 1/den
    let t = match &fs.delta {
        Delta::Zero => BigInt::zero(),
        Delta::Exact(r) => (r * BigRational::from_integer(den.clone())).floor().to_integer(),
        Delta::Approx(_) => unreachable!("handled by caller"),
    };
    if BigInt::from(2) * &t + 1 >= den {
        return total * total;
    }
    sums.par_iter()
        .map(|x| {
            let lo = x - &t;
            let hi = x + &t;
            let mut c = count_between(&sums, &lo.clone().max(BigInt::zero()), &hi.clone().min(&den - 1));
            if lo.is_negative() {
                c += count_between(&sums, &(&lo + &den), &(&den - 1));
            }
            if hi >= den {
                c += count_between(&sums, &BigInt::zero(), &(&hi - &den));
            }
            c
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

fn energy_float(fs: &FreqSet) -> u64 {
    let values: Vec<f64> = fs.elems.iter().map(TorusPoint::value).collect();
    let mut sums = vec![0.0f64];
    for _ in 0..fs.m {
        sums = sums.iter().flat_map(|s| values.iter().map(move |v| (s + v).rem_euclid(1.0))).collect();
    }
    sums.sort_by(f64::total_cmp);
    let d = fs.delta.as_f64();
    if 2.0 * d >= 1.0 {
        return (sums.len() as u64).pow(2);
    }
    let count = |lo: f64, hi: f64| (sums.partition_point(|&y| y <= hi) - sums.partition_point(|&y| y < lo)) as u64;
    sums.iter()
        .map(|&x| {
            let mut c = count((x - d).max(0.0), (x + d).min(1.0));
            if x - d < 0.0 {
                c += count(x - d + 1.0, 1.0);
            }
            if x + d >= 1.0 {
                c += count(0.0, x + d - 1.0);
            }
            c
        })
        .sum()
}

fn torus_norm_exact(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    f.min(g)
}

/// Oracle: loop over all `2m`-tuples with exact rational arithmetic.
pub fn additive_energy_naive(fs: &FreqSet) -> Result<u64> {
    guard(fs)?;
    let vals: Vec<BigRational> = fs.elems.iter().map(TorusPoint::exact).collect();
    let delta = match &fs.delta {
        Delta::Zero => BigRational::zero(),
        Delta::Exact(r) => r.clone(),
        Delta::Approx(x) => BigRational::from_float(*x).expect("finite"),
    };
    let s = vals.len();
    let len = 2 * fs.m as usize;
    let mut idx = vec![0usize; len];
    let mut count = 0u64;
    if s == 0 {
        return Ok(0);
    }
    loop {
        let mut acc = BigRational::zero();
        for (i, &j) in idx.iter().enumerate() {
            if i < fs.m as usize {
                acc += &vals[j];
            } else {
                acc -= &vals[j];
            }
        }
        if torus_norm_exact(&acc) <= delta {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == len {
                return Ok(count);
            }
            idx[pos] += 1;
            if idx[pos] < s {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewbmReport {
    pub lhs: u64,
    /// `(Q n)^m`
    pub rhs_shape: f64,
    pub ratio: f64,
}

/// Length of the shortest arc of the circle containing every point.
fn covering_arc(points: &[BigRational]) -> BigRational {
    if points.len() <= 1 {
        return BigRational::zero();
    }
    let mut v: Vec<BigRational> = points.iter().map(|x| x - x.floor()).collect();
    v.sort();
    let mut gap = &v[0] + BigRational::one() - v.last().expect("nonempty");
    for w in v.windows(2) {
        let g = &w[1] - &w[0];
        if g > gap {
            gap = g;
        }
    }
    BigRational::one() - gap
}

/// `E_{2m}(T; 0)` against `(Q n)^m` for a rational set with denominators at
/// most `Q`, at most `n` elements per denominator, inside an arc of length
/// `1/(8m)`.
pub fn newbm_check(t: &FreqSet, q_bound: f64, n: u64) -> Result<NewbmReport> {
    let mut failures = Vec::new();
    if t.m < 2 {
        failures.push(format!("m = {} < 2", t.m));
    }
    let fracs: Option<Vec<(u64, u64)>> = t.elems.iter().map(exact_fraction).collect();
    let Some(fracs) = fracs else {
        return Err(Error::PreconditionViolated("elements must be exact rationals".into()));
    };
    if let Some(&(_, q)) = fracs.iter().find(|&&(_, q)| q as f64 > q_bound) {
        failures.push(format!("denominator {q} exceeds Q = {q_bound}"));
    }
    let mut per: std::collections::BTreeMap<u64, u64> = Default::default();
    fracs.iter().for_each(|&(_, q)| *per.entry(q).or_default() += 1);
    if let Some((q, c)) = per.iter().find(|(_, &c)| c > n) {
        failures.push(format!("{c} elements with denominator {q} exceed n = {n}"));
    }
    let exact: Vec<BigRational> = t.elems.iter().map(TorusPoint::exact).collect();
    let span = covering_arc(&exact);
    if span > BigRational::new(BigInt::one(), BigInt::from(8 * t.m as u64)) {
        failures.push(format!("elements span an arc of length {} > 1/(8m)", span.to_f64().unwrap_or(f64::NAN)));
    }
    if !failures.is_empty() {
        return Err(Error::PreconditionViolated(failures.join("; ")));
    }
    let zero = FreqSet { delta: Delta::Zero, ..t.clone() };
    let lhs = additive_energy(&zero)?;
    let rhs_shape = (q_bound * n as f64).powi(t.m as i32);
    Ok(NewbmReport { lhs, rhs_shape, ratio: lhs as f64 / rhs_shape })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub energy: u64,
}

/// `sum_{gamma in S} |1_A^(gamma)|` against
/// `|A| sigma^{-1/2m} E_{2m}(S; 1/2N)^{1/2m}`.
pub fn ch_check(set: &[i64], n: u64, s: &FreqSet) -> Result<ChReport> {
    if set.is_empty() {
        return Err(Error::PreconditionViolated("A must be nonempty".into()));
    }
    if let Some(&value) = set.iter().find(|&&v| v < 1 || v as u64 > n) {
        return Err(Error::SetOutOfRange { value, n });
    }
    let lhs: f64 = s.elems.iter().map(|g| fourier_set(set, g).norm()).sum();
    let fs = FreqSet { delta: Delta::half_over(n), ..s.clone() };
    let energy = additive_energy(&fs)?;
    let sigma = set.len() as f64 / n as f64;
    let two_m = 2.0 * s.m as f64;
    let rhs = set.len() as f64 * sigma.powf(-1.0 / two_m) * (energy as f64).powf(1.0 / two_m);
    Ok(ChReport { lhs, rhs, ratio: lhs / rhs, energy })
}
