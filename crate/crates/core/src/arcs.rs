//! Torus points, major/minor arc classification, Fourier transforms of
//! finite sets and arc-localised `L^2` mass of `g = 1_A - sigma 1_[N]`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::arith;
use crate::error::{Error, Result};
use crate::numeric::{e, e_ratio, ComplexSum};

/// A point of `R/Z`: an exact reduced fraction `a/q` (`0 <= a < q`) plus a
/// float offset, or a plain float in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorusPoint {
    Rational { a: u64, q: u64, offset: f64 },
    Float(f64),
}

impl TorusPoint {
    pub fn rational(a: i64, q: u64) -> Result<Self> {
        Self::rational_offset(a, q, 0.0)
    }

    pub fn rational_offset(a: i64, q: u64, offset: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("denominator must be positive".into()));
        }
        let r = a.rem_euclid(q as i64) as u64;
        let g = arith::gcd_u64(r, q);
        Ok(TorusPoint::Rational { a: r / g, q: q / g, offset })
    }

    pub fn float(x: f64) -> Self {
        TorusPoint::Float(x.rem_euclid(1.0))
    }

    /// Representative in `[0, 1)` as a float.
    pub fn value(&self) -> f64 {
        match *self {
            TorusPoint::Rational { a, q, offset } => (a as f64 / q as f64 + offset).rem_euclid(1.0),
            TorusPoint::Float(x) => x.rem_euclid(1.0),
        }
    }

    /// Exact rational value of the representative (floats are converted
    /// exactly from their binary expansion).
    pub fn exact(&self) -> BigRational {
        match *self {
            TorusPoint::Rational { a, q, offset } => {
                BigRational::new(BigInt::from(a), BigInt::from(q)) + exact_f64(offset)
            }
            TorusPoint::Float(x) => exact_f64(x),
        }
    }

    /// Distance to the nearest integer.
    pub fn norm(&self) -> f64 {
        let x = self.value();
        x.min(1.0 - x)
    }

    /// `gamma` shifted by a real offset.
    pub fn shifted(&self, beta: f64) -> Self {
        match *self {
            TorusPoint::Rational { a, q, offset } => TorusPoint::Rational { a, q, offset: offset + beta },
            TorusPoint::Float(x) => TorusPoint::float(x + beta),
        }
    }

    /// `e(n gamma)` with the rational part reduced exactly.
    #[inline]
    pub fn e_mul(&self, n: i64) -> Complex64 {
        match *self {
            TorusPoint::Rational { a, q, offset } => {
                let r = ((n as i128 * a as i128).rem_euclid(q as i128)) as u64;
                let base = e_ratio(r, q);
                if offset == 0.0 {
                    base
                } else {
                    base * e((n as f64 * offset).rem_euclid(1.0))
                }
            }
            TorusPoint::Float(x) => e((n as f64 * x).rem_euclid(1.0)),
        }
    }
}

fn exact_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite offset")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcSpec {
    pub n: u64,
    pub k: f64,
    pub q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcClass {
    Major { a: u64, q: u64 },
    Minor,
}

impl ArcClass {
    pub fn is_minor(&self) -> bool {
        matches!(self, ArcClass::Minor)
    }
}

/// Fraction of least denominator in the closed interval `[lo, hi]`.
fn simplest_in(lo: &BigRational, hi: &BigRational) -> (BigInt, BigInt) {
    let fl = lo.floor();
    if &fl == lo {
        return (fl.to_integer(), BigInt::one());
    }
    let next = &fl + BigRational::one();
    if &next <= hi {
        return (next.to_integer(), BigInt::one());
    }
    let (p, q) = simplest_in(&(hi - &fl).recip(), &(lo - &fl).recip());
    (fl.to_integer() * &p + q, p)
}

impl ArcSpec {
    pub fn new(n: u64, k: f64, q: f64) -> Result<Self> {
        if n == 0 || !(k >= 1.0) || !(q >= 1.0) || !k.is_finite() || !q.is_finite() {
            return Err(Error::Domain(format!("arc spec needs N >= 1, K >= 1, Q >= 1 (got {n}, {k}, {q})")));
        }
        Ok(ArcSpec { n, k, q })
    }

    /// Half-width `K/N`.
    pub fn radius(&self) -> f64 {
        self.k / self.n as f64
    }

    /// The arc `a/q` of least `q` within `K/N` of `gamma`, if `q <= Q`.
    pub fn classify(&self, gamma: &TorusPoint) -> ArcClass {
        let x = gamma.exact();
        let r = exact_f64(self.k) / BigRational::from_integer(BigInt::from(self.n));
        let (num, den) = simplest_in(&(&x - &r), &(&x + &r));
        let q = den.to_u64().unwrap_or(u64::MAX);
        if q as f64 > self.q.floor() {
            return ArcClass::Minor;
        }
        let a = num.mod_floor(&den).to_u64().expect("residue");
        if q == 1 {
            ArcClass::Major { a: 1, q: 1 }
        } else {
            ArcClass::Major { a, q }
        }
    }

    /// All reduced `a/q` with `1 <= a <= q <= Q`.
    pub fn arc_list(&self) -> Vec<(u64, u64)> {
        arc_list(self.q)
    }
}

/// All reduced `a/q` with `1 <= a <= q <= Q`, ordered by `q` then `a`.
pub fn arc_list(q_max: f64) -> Vec<(u64, u64)> {
    let qm = if q_max >= 1.0 { q_max.floor() as u64 } else { 0 };
    (1..=qm)
        .flat_map(|q| (1..=q).filter(move |&a| arith::gcd_u64(a, q) == 1).map(move |a| (a, q)))
        .collect()
}

/// `sum_{n in A} e(n gamma)`
pub fn fourier_set(set: &[i64], gamma: &TorusPoint) -> Complex64 {
    set.iter().map(|&n| gamma.e_mul(n)).collect::<ComplexSum>().value()
}

/// `sum_{n=1}^{N} e(n gamma)` in closed form.
pub fn interval_transform(n: u64, gamma: &TorusPoint) -> Complex64 {
    if let TorusPoint::Rational { a: 0, offset, .. } = *gamma {
        if offset == 0.0 {
            return Complex64::new(n as f64, 0.0);
        }
    }
    if let TorusPoint::Rational { q, offset: 0.0, .. } = *gamma {
        if n.is_multiple_of(q) {
            return Complex64::zero();
        }
    }
    let x = gamma.value();
    let t = x - x.round();
    if t == 0.0 {
        return Complex64::new(n as f64, 0.0);
    }
    let nf = n as f64;
    let ratio = (std::f64::consts::PI * nf * t).sin() / (std::f64::consts::PI * t).sin();
    gamma_phase_mid(n, gamma) * ratio
}

/// `e((N+1) gamma / 2)`, exact in the rational part where possible.
fn gamma_phase_mid(n: u64, gamma: &TorusPoint) -> Complex64 {
    match *gamma {
        TorusPoint::Rational { a, q, offset } => {
            // e((N+1) a / (2q)) e((N+1) offset / 2)
            let num = ((n as u128 + 1) * a as u128) % (2 * q as u128);
            e_ratio(num as u64, 2 * q) * e(((n as f64 + 1.0) * offset / 2.0).rem_euclid(1.0))
        }
        TorusPoint::Float(x) => e(((n as f64 + 1.0) * x / 2.0).rem_euclid(1.0)),
    }
}

fn check_range(set: &[i64], n: u64) -> Result<()> {
    match set.iter().find(|&&v| v < 1 || v as u64 > n) {
        Some(&value) => Err(Error::SetOutOfRange { value, n }),
        None => Ok(()),
    }
}

/// `g^(gamma)` for `g = 1_A - (|A|/N) 1_[N]`.
pub fn g_hat(set: &[i64], n: u64, gamma: &TorusPoint) -> Result<Complex64> {
    check_range(set, n)?;
    let sigma = set.len() as f64 / n as f64;
    Ok(fourier_set(set, gamma) - interval_transform(n, gamma) * sigma)
}

/// `g^` at `start + j step`, `j = 0..count`, by phase rotation.
pub fn g_hat_grid(set: &[i64], n: u64, start: &TorusPoint, step: f64, count: usize) -> Result<Vec<Complex64>> {
    check_range(set, n)?;
    let sigma = set.len() as f64 / n as f64;
    let mut z: Vec<Complex64> = set.iter().map(|&v| start.e_mul(v)).collect();
    let w: Vec<Complex64> = set.iter().map(|&v| e((v as f64 * step).rem_euclid(1.0))).collect();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        if j > 0 && j % 64 == 0 {
            let g = start.shifted(step * j as f64);
            z.iter_mut().zip(set).for_each(|(zi, &v)| *zi = g.e_mul(v));
        }
        let g = start.shifted(step * j as f64);
        let a: Complex64 = z.iter().sum();
        out.push(a - interval_transform(n, &g) * sigma);
        z.iter_mut().zip(&w).for_each(|(zi, wi)| *zi *= wi);
    }
    Ok(out)
}

/// Number of trapezoid nodes on an arc of half-width `K/N`.
pub fn arc_nodes(k: f64, oversample: u32) -> usize {
    oversample as usize * (2.0 * k).ceil() as usize + 1
}

/// Trapezoid quadrature of `|g^|^2` over `[a/q - K/N, a/q + K/N]`.
pub fn arc_l2_mass(set: &[i64], n: u64, a: i64, q: u64, k: f64, oversample: u32) -> Result<f64> {
    if q == 0 || arith::gcd_u64(a.rem_euclid(q as i64) as u64, q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    if oversample == 0 || !(k > 0.0) {
        return Err(Error::Domain("oversample and K must be positive".into()));
    }
    let nodes = arc_nodes(k, oversample);
    let r = k / n as f64;
    let step = 2.0 * r / (nodes - 1) as f64;
    let start = TorusPoint::rational_offset(a, q, -r)?;
    let vals = g_hat_grid(set, n, &start, step, nodes)?;
    let mut acc = crate::numeric::CompensatedSum::new();
    for (j, v) in vals.iter().enumerate() {
        let wgt = if j == 0 || j + 1 == nodes { 0.5 } else { 1.0 };
        acc.add(wgt * v.norm_sqr());
    }
    Ok(acc.value() * step)
}

/// `|g^(j/L)|^2` on the uniform grid `L = oversample N`, by one FFT.
pub fn circle_grid(set: &[i64], n: u64, oversample: u32) -> Result<Vec<f64>> {
    check_range(set, n)?;
    if oversample == 0 {
        return Err(Error::Domain("oversample must be positive".into()));
    }
    let l = oversample as usize * n as usize;
    let sigma = set.len() as f64 / n as f64;
    let mut buf = vec![Complex64::zero(); l];
    for v in 1..=n as usize {
        buf[v % l] -= sigma;
    }
    for &v in set {
        buf[v as usize % l] += 1.0;
    }
    FftPlanner::<f64>::new().plan_fft_inverse(l).process(&mut buf);
    Ok(buf.iter().map(Complex64::norm_sqr).collect())
}

/// Whole-circle quadrature of `|g^|^2`; equals `|A|(1 - sigma)`.
pub fn circle_l2_mass(set: &[i64], n: u64, oversample: u32) -> Result<f64> {
    let grid = circle_grid(set, n, oversample)?;
    let mut acc = crate::numeric::CompensatedSum::new();
    grid.iter().for_each(|&v| acc.add(v));
    Ok(acc.value() / grid.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassSplit {
    pub major: f64,
    pub minor: f64,
    pub total: f64,
    pub parseval: f64,
}

/// Split the grid quadrature of `|g^|^2` between major and minor arcs.
pub fn mass_split(set: &[i64], n: u64, spec: &ArcSpec, oversample: u32) -> Result<MassSplit> {
    let grid = circle_grid(set, n, oversample)?;
    let l = grid.len() as u64;
    let parts: Vec<(f64, f64)> = (0..l)
        .into_par_iter()
        .map(|j| {
            let g = TorusPoint::rational(j as i64, l).expect("positive");
            let v = grid[j as usize] / l as f64;
            if spec.classify(&g).is_minor() {
                (0.0, v)
            } else {
                (v, 0.0)
            }
        })
        .collect();
    let (major, minor) = parts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let sigma = set.len() as f64 / n as f64;
    Ok(MassSplit { major, minor, total: major + minor, parseval: set.len() as f64 * (1.0 - sigma) })
}

/// `max |1_A^|` over `points` evenly spaced frequencies on the arc at `a/q`,
/// with the argmax offset.
pub fn arc_peak(set: &[i64], a: i64, q: u64, radius: f64, points: usize) -> Result<(f64, TorusPoint)> {
    let centre = TorusPoint::rational(a, q)?;
    let step = if points > 1 { 2.0 * radius / (points - 1) as f64 } else { 0.0 };
    let mut best = (f64::NEG_INFINITY, centre);
    for j in 0..points.max(1) {
        let beta = if points > 1 { -radius + step * j as f64 } else { 0.0 };
        let g = centre.shifted(beta);
        let v = fourier_set(set, &g).norm();
        if v > best.0 {
            best = (v, g);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        let s = ArcSpec::new(1000, 2.0, 10.0).unwrap();
        let third = TorusPoint::rational(1, 3).unwrap();
        assert_eq!(s.classify(&third), ArcClass::Major { a: 1, q: 3 });
        let off = TorusPoint::rational_offset(1, 3, 0.004).unwrap();
        assert_eq!(s.classify(&off), ArcClass::Minor);
        // oracle: scan every fraction with q <= 10
        let x = 1.0 / 3.0 + 0.004;
        assert!(arc_list(10.0).iter().all(|&(a, q)| {
            let d = (x - a as f64 / q as f64).abs();
            d.min(1.0 - d) > 0.002
        }));
        assert_eq!(s.classify(&TorusPoint::Float(0.0)), ArcClass::Major { a: 1, q: 1 });
        assert_eq!(s.classify(&TorusPoint::Float(0.9995)), ArcClass::Major { a: 1, q: 1 });
    }

    #[test]
    fn classify_matches_scan() {
        let s = ArcSpec::new(500, 3.0, 12.0).unwrap();
        let arcs = arc_list(12.0);
        for i in 0..5000 {
            let x = i as f64 / 5000.0 + 1e-5;
            let expect = arcs
                .iter()
                .filter(|&&(a, q)| {
                    let d = (x - a as f64 / q as f64).rem_euclid(1.0);
                    d.min(1.0 - d) <= s.radius()
                })
                .min_by_key(|&&(a, q)| (q, a))
                .map_or(ArcClass::Minor, |&(a, q)| ArcClass::Major { a, q });
            assert_eq!(s.classify(&TorusPoint::Float(x)), expect, "x = {x}");
        }
    }

    #[test]
    fn arc_list_examples() {
        assert_eq!(arc_list(4.0), vec![(1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)]);
        assert_eq!(arc_list(1.0), vec![(1, 1)]);
        assert_eq!(arc_list(5.0).len(), 10);
    }

    #[test]
    fn fourier_examples() {
        let n = 37u64;
        let full: Vec<i64> = (1..=n as i64).collect();
        assert!((fourier_set(&full, &TorusPoint::Float(0.0)) - Complex64::new(n as f64, 0.0)).norm() < 1e-12);
        let half = TorusPoint::rational(1, 2).unwrap();
        assert!(fourier_set(&[1, 2, 3, 4], &half).norm() < 1e-12);
        let g = TorusPoint::Float(0.1234);
        assert!((fourier_set(&[1], &g) - e(0.1234)).norm() < 1e-12);
    }

    #[test]
    fn interval_closed_form() {
        for x in [0.0, 1e-9, 0.1, 0.5, 0.77, 1.0 - 1e-9] {
            let g = TorusPoint::Float(x);
            let direct: Complex64 = (1..=101).map(|v| e((v as f64 * x).rem_euclid(1.0))).sum();
            assert!((interval_transform(101, &g) - direct).norm() < 1e-9, "x = {x}");
        }
        for (a, q, off) in [(1, 3, 0.0), (2, 5, 1e-4), (1, 4, 0.0)] {
            let g = TorusPoint::rational_offset(a, q, off).unwrap();
            let direct: Complex64 = (1..=101).map(|v| g.e_mul(v)).sum();
            assert!((interval_transform(101, &g) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn g_hat_examples() {
        let full: Vec<i64> = (1..=20).collect();
        assert!(g_hat(&full, 20, &TorusPoint::Float(0.3)).unwrap().norm() < 1e-12);
        assert!(g_hat(&[2, 5, 7], 20, &TorusPoint::Float(0.0)).unwrap().norm() < 1e-12);
        let v = g_hat(&[1], 2, &TorusPoint::rational(1, 2).unwrap()).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(g_hat(&[0], 2, &TorusPoint::Float(0.0)), Err(Error::SetOutOfRange { value: 0, n: 2 }));
    }

    #[test]
    fn grid_matches_pointwise() {
        let set = [3, 8, 9, 15, 40, 41];
        let start = TorusPoint::rational_offset(2, 7, -0.01).unwrap();
        let grid = g_hat_grid(&set, 50, &start, 0.001, 200).unwrap();
        for (j, v) in grid.iter().enumerate() {
            let p = g_hat(&set, 50, &start.shifted(0.001 * j as f64)).unwrap();
            assert!((v - p).norm() < 1e-10);
        }
    }

    #[test]
    fn parseval() {
        let set: Vec<i64> = (1..=300).filter(|v| v % 7 == 2 || v % 11 == 0).collect();
        let n = 300;
        let expect = set.len() as f64 * (1.0 - set.len() as f64 / n as f64);
        let m = circle_l2_mass(&set, n, 32).unwrap();
        assert!((m - expect).abs() / expect < 1e-9);
        let full: Vec<i64> = (1..=n as i64).collect();
        assert!(arc_l2_mass(&full, n, 1, 3, 2.0, 32).unwrap() < 1e-20);
    }

    #[test]
    fn odd_numbers_concentrate_at_half() {
        let n = 1000;
        let odd: Vec<i64> = (1..=n as i64).filter(|v| v % 2 == 1).collect();
        let total = odd.len() as f64 * 0.5;
        let m = arc_l2_mass(&odd, n, 1, 2, 4.0, 32).unwrap();
        assert!(m / total > 0.9, "{}", m / total);
    }

    #[test]
    fn split_sums_to_parseval() {
        let set: Vec<i64> = (1..=500).filter(|v| v % 3 == 1).collect();
        let spec = ArcSpec::new(500, 4.0, 6.0).unwrap();
        let s = mass_split(&set, 500, &spec, 8).unwrap();
        assert!((s.total - s.parseval).abs() / s.parseval < 1e-9);
        assert!(s.major > 0.9 * s.total);
    }
}
