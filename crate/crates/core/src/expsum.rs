//! Complete exponential sums over admissible residues and weighted phase
//! sums `S(gamma)` along an auxiliary polynomial.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::arcs::{ArcSpec, TorusPoint};
use crate::arith;
use crate::error::{Error, Result};
use crate::intersective::AuxFamily;
use crate::intpoly::IntPoly;
use crate::numeric::{e, e_ratio, ComplexSum};
use crate::sieve::SieveProfile;

/// Sieve cutoff `Y`. `AllPrimes` sieves by every prime that can
/// constrain `W^q`, i.e. every prime up to `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    Finite(f64),
    AllPrimes,
}

impl Cutoff {
    fn resolve(self, q_max: u64) -> f64 {
        match self {
            Cutoff::Finite(y) => y,
            Cutoff::AllPrimes => q_max as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSumResult {
    pub value: Complex64,
    /// Number of admissible residues.
    pub trivial_bound: f64,
    pub ratio_sqrt: f64,
    pub ratio_weyl: f64,
    pub a: i64,
    pub q: u64,
    pub cutoff: Cutoff,
}

fn weyl_exponent(g: &IntPoly) -> f64 {
    let k = g.degree().unwrap_or(1).max(1) as f64;
    1.0 - 1.0 / k
}

fn residue(a: i64, q: u64) -> u64 {
    a.rem_euclid(q as i64) as u64
}

/// `sum_{s in [0,q) ∩ W^q(g;Y)} e(a g(s) / q)` with exact residue phases.
pub fn complete_sum(g: &IntPoly, a: i64, q: u64, cutoff: Cutoff) -> Result<ExpSumResult> {
    if q == 0 {
        return Err(Error::Domain("q must be positive".into()));
    }
    let profile = SieveProfile::new(g, cutoff.resolve(q))?;
    complete_sum_with(&profile, a, q, cutoff)
}

/// As [`complete_sum`] with a prebuilt profile whose cutoff covers `q`.
pub fn complete_sum_with(profile: &SieveProfile, a: i64, q: u64, cutoff: Cutoff) -> Result<ExpSumResult> {
    if arith::gcd_u64(residue(a, q), q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    let gq = profile.g().reduce_mod(q);
    let ar = residue(a, q) as u128;
    let mut acc = ComplexSum::new();
    let mut count = 0u64;
    for s in 0..q {
        if profile.in_wq(q, s as i64) {
            count += 1;
            acc.add(e_ratio(((ar * gq.eval(s) as u128) % q as u128) as u64, q));
        }
    }
    let value = acc.value();
    Ok(ExpSumResult {
        value,
        trivial_bound: count as f64,
        ratio_sqrt: value.norm() / (q as f64).sqrt(),
        ratio_weyl: value.norm() / (q as f64).powf(weyl_exponent(profile.g())),
        a,
        q,
        cutoff,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub q: u64,
    pub omega: u32,
    pub max_abs: f64,
    pub argmax_a: u64,
    pub ratio_sqrt: f64,
    pub ratio_weyl: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CancellationScan {
    pub rows: Vec<ScanRow>,
    /// `max over rows with omega >= 1 of (max|S| / sqrt q)^{1/omega}`
    pub fitted_c: Option<f64>,
}

/// Residue histogram of `g(s) mod q` over admissible `s`.
fn value_histogram(profile: &SieveProfile, q: u64) -> Vec<Complex64> {
    let gq = profile.g().reduce_mod(q);
    let mut hist = vec![Complex64::zero(); q as usize];
    for s in 0..q {
        if profile.in_wq(q, s as i64) {
            hist[gq.eval(s) as usize] += 1.0;
        }
    }
    hist
}

/// All `S(a, q)`, `a = 0..q`, from one inverse FFT of the value histogram.
pub fn all_complete_sums(profile: &SieveProfile, q: u64) -> Vec<Complex64> {
    let mut buf = value_histogram(profile, q);
    FftPlanner::<f64>::new().plan_fft_inverse(q as usize).process(&mut buf);
    buf
}

/// For each `q <= q_max`, the maximum over `a` coprime to `q` of
/// `|complete_sum|`.
pub fn cancellation_scan(g: &IntPoly, q_max: u64, cutoff: Cutoff, squarefree_only: bool) -> Result<CancellationScan> {
    let profile = SieveProfile::new(g, cutoff.resolve(q_max))?;
    let weyl = weyl_exponent(g);
    let qs: Vec<u64> = (1..=q_max).filter(|&q| !squarefree_only || arith::is_squarefree(q)).collect();
    let rows: Vec<ScanRow> = qs
        .par_iter()
        .map(|&q| {
            let sums = all_complete_sums(&profile, q);
            let (argmax_a, max_abs) = (0..q)
                .filter(|&a| arith::gcd_u64(a, q) == 1)
                .map(|a| (a, sums[a as usize].norm()))
                .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            ScanRow {
                q,
                omega: arith::omega(q),
                max_abs,
                argmax_a,
                ratio_sqrt: max_abs / (q as f64).sqrt(),
                ratio_weyl: max_abs / (q as f64).powf(weyl),
            }
        })
        .collect();
    let fitted_c = rows
        .iter()
        .filter(|r| r.omega >= 1)
        .map(|r| r.ratio_sqrt.powf(1.0 / r.omega as f64))
        .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c))));
    Ok(CancellationScan { rows, fitted_c })
}

/// Parameters of `S(gamma) = sum_{m <= M, m in W(Y)} g'(m) e(g(m) gamma)`.
#[derive(Clone, Debug)]
pub struct PhaseSumSpec {
    pub g: IntPoly,
    pub n: u64,
    pub m: u64,
    pub y: f64,
    pub gamma: TorusPoint,
    pub weighted: bool,
    /// `w(Y)` for the polynomial, when built from a family.
    pub density: Option<f64>,
}

/// Largest `M` with `b M^k <= N`, i.e. `floor((N/b)^{1/k})`.
pub fn family_length(n: u64, b: &BigInt, k: usize) -> u64 {
    let nb = BigInt::from(n);
    let fits = |m: u64| b * num_traits::pow(BigInt::from(m), k) <= nb;
    let (mut lo, mut hi) = (0u64, 1u64);
    while fits(hi) {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

impl PhaseSumSpec {
    /// Spec for `h_d` with `M = floor((N / b_d)^{1/k})`.
    pub fn for_family(fam: &AuxFamily, d: u64, n: u64, y: f64, gamma: TorusPoint, weighted: bool) -> Result<Self> {
        let entry = fam.aux(d)?;
        let m = family_length(n, &entry.leading, fam.degree());
        if m == 0 {
            return Err(Error::Domain(format!("N = {n} is below b_{d}")));
        }
        let density = SieveProfile::new(&entry.poly, y)?.expected_density();
        Ok(PhaseSumSpec { g: entry.poly.clone(), n, m, y, gamma, weighted, density: Some(density) })
    }

    pub fn raw(g: IntPoly, n: u64, m: u64, y: f64, gamma: TorusPoint, weighted: bool) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("M must be positive".into()));
        }
        Ok(PhaseSumSpec { g, n, m, y, gamma, weighted, density: None })
    }

    pub fn with_gamma(&self, gamma: TorusPoint) -> Self {
        PhaseSumSpec { gamma, ..self.clone() }
    }
}

/// Integer values `g(1..=M)` restricted to `W(Y)`, with weights.
struct Terms {
    values: Vec<BigInt>,
    weights: Vec<f64>,
}

fn terms(spec: &PhaseSumSpec) -> Result<Terms> {
    let profile = SieveProfile::new(&spec.g, spec.y)?;
    let dg = spec.g.derivative();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    for m in 1..=spec.m as i64 {
        if profile.in_w(m) {
            values.push(spec.g.eval_i64(m));
            weights.push(if spec.weighted { dg.eval_i64(m).to_f64().unwrap_or(f64::INFINITY) } else { 1.0 });
        }
    }
    Ok(Terms { values, weights })
}

/// `e(v gamma)` with the rational part reduced exactly.
fn phase(v: &BigInt, gamma: &TorusPoint) -> Complex64 {
    match *gamma {
        TorusPoint::Rational { a, q, offset } => {
            let r = (v * BigInt::from(a)).mod_floor(&BigInt::from(q)).to_u64().expect("residue");
            let base = e_ratio(r, q);
            if offset == 0.0 {
                base
            } else {
                base * e((v.to_f64().unwrap_or(0.0) * offset).rem_euclid(1.0))
            }
        }
        TorusPoint::Float(x) => e((v.to_f64().unwrap_or(0.0) * x).rem_euclid(1.0)),
    }
}

fn sum_terms(t: &Terms, gamma: &TorusPoint) -> Complex64 {
    t.values
        .iter()
        .zip(&t.weights)
        .map(|(v, w)| phase(v, gamma) * *w)
        .collect::<ComplexSum>()
        .value()
}

/// Direct summation of `S(gamma)`.
pub fn phase_sum(spec: &PhaseSumSpec) -> Result<Complex64> {
    Ok(sum_terms(&terms(spec)?, &spec.gamma))
}

/// `S(gamma) / (w(Y) N)`.
pub fn normalized_s(spec: &PhaseSumSpec) -> Result<Complex64> {
    let w = spec
        .density
        .ok_or_else(|| Error::PreconditionViolated("normalisation needs a family-based spec".into()))?;
    if !spec.weighted {
        return Err(Error::PreconditionViolated("normalisation needs weighted = true".into()));
    }
    Ok(phase_sum(spec)? / (w * spec.n as f64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainTermCheck {
    pub direct: Complex64,
    pub predicted: Complex64,
    pub rel_error: f64,
    pub m: u64,
    pub density: f64,
    pub complement_density: f64,
    pub complete: Complex64,
}

/// Compare `S(a/q)` with `(w'/q) S(a,q) (h_d(M) - h_d(0))`, where `w'` is
/// the sieve density over primes whose `p^gamma` does not divide `q`.
pub fn main_term_check(fam: &AuxFamily, d: u64, a: i64, q: u64, y: f64, n: u64) -> Result<MainTermCheck> {
    if q == 0 {
        return Err(Error::Domain("q must be positive".into()));
    }
    if arith::gcd_u64(residue(a, q), q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    let gamma = TorusPoint::rational(a, q)?;
    let spec = PhaseSumSpec::for_family(fam, d, n, y, gamma, true)?;
    let direct = phase_sum(&spec)?;
    let profile = SieveProfile::new(&spec.g, y)?;
    let complete = complete_sum_with(&profile, a, q, Cutoff::Finite(y))?.value;
    let wc = profile.complement_density(q);
    let span = (spec.g.eval_i64(spec.m as i64) - spec.g.coeff(0)).to_f64().unwrap_or(f64::INFINITY);
    let predicted = complete * (wc / q as f64 * span);
    let w = spec.density.expect("family spec");
    let rel_error = (direct - predicted).norm() / (w * n as f64);
    Ok(MainTermCheck { direct, predicted, rel_error, m: spec.m, density: w, complement_density: wc, complete })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinorArcScan {
    pub points: u64,
    pub minor_points: u64,
    /// Largest `|S(gamma)| / (w N)` over sampled minor-arc points.
    pub max_minor: f64,
    pub argmax: f64,
    /// Largest `|S(a/q)| / (w N)` over major-arc centres.
    pub major_peak: f64,
}

/// Sample `|normalized_S|` on a uniform grid of `points` frequencies and
/// compare minor-arc values with the major-arc centres of `arcs`.
pub fn minor_arc_scan(fam: &AuxFamily, d: u64, n: u64, y: f64, arcs: &ArcSpec, points: u64) -> Result<MinorArcScan> {
    let base = PhaseSumSpec::for_family(fam, d, n, y, TorusPoint::Float(0.0), true)?;
    let t = terms(&base)?;
    let scale = base.density.expect("family spec") * n as f64;
    let samples: Vec<(f64, f64, bool)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / points as f64;
            let g = TorusPoint::Float(x);
            let minor = arcs.classify(&g).is_minor();
            (x, sum_terms(&t, &g).norm() / scale, minor)
        })
        .collect();
    let (argmax, max_minor) = samples
        .iter()
        .filter(|s| s.2)
        .fold((0.0, 0.0), |b, s| if s.1 > b.1 { (s.0, s.1) } else { b });
    let major_peak = arcs
        .arc_list()
        .par_iter()
        .map(|&(a, q)| {
            let g = TorusPoint::rational(a as i64, q).expect("reduced");
            sum_terms(&t, &g).norm() / scale
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(MinorArcScan {
        points,
        minor_points: samples.iter().filter(|s| s.2).count() as u64,
        max_minor,
        argmax,
        major_peak,
    })
}

/// `Z = exp((log log N)^3)`
pub fn default_z(n: u64) -> f64 {
    let ll = (n.max(3) as f64).ln().ln();
    ll.powi(3).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(c.iter().copied())
    }

    #[test]
    fn complete_sum_examples() {
        let r = complete_sum(&p(&[0, 0, 1]), 1, 3, Cutoff::Finite(1.0)).unwrap();
        // oracle: 1 + 2 e(1/3) = i sqrt(3)
        let expect = Complex64::new(1.0, 0.0) + 2.0 * Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((r.value - expect).norm() < 1e-12);
        assert!((r.value - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        let one = complete_sum(&p(&[3, 1, 4]), 1, 1, Cutoff::Finite(1.0)).unwrap();
        assert!((one.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let g5 = complete_sum(&p(&[0, 0, 1]), 1, 5, Cutoff::Finite(1.0)).unwrap();
        assert!((g5.value.norm() - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(complete_sum(&p(&[0, 0, 1]), 2, 4, Cutoff::Finite(1.0)).unwrap_err(), Error::NotCoprime { a: 2, q: 4 });
    }

    #[test]
    fn fft_matches_direct() {
        let g = p(&[0, 1, 0, 1]);
        let prof = SieveProfile::new(&g, 30.0).unwrap();
        for q in [1, 2, 6, 7, 12, 25, 30] {
            let fft = all_complete_sums(&prof, q);
            for a in (0..q).filter(|&a| arith::gcd_u64(a, q) == 1) {
                let d = complete_sum_with(&prof, a as i64, q, Cutoff::Finite(30.0)).unwrap().value;
                assert!((fft[a as usize] - d).norm() < 1e-9, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn gauss_scan() {
        let s = cancellation_scan(&p(&[0, 0, 1]), 100, Cutoff::Finite(1.0), false).unwrap();
        assert!((s.rows[0].max_abs - 1.0).abs() < 1e-12);
        assert!(s.rows.iter().all(|r| r.ratio_sqrt <= 2f64.sqrt() + 1e-9));
    }

    #[test]
    fn phase_sum_examples() {
        let sq = p(&[0, 0, 1]);
        let s = phase_sum(&PhaseSumSpec::raw(sq.clone(), 16, 4, 1.0, TorusPoint::Float(0.0), false).unwrap()).unwrap();
        assert!((s - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        let half = TorusPoint::rational(1, 2).unwrap();
        let s = phase_sum(&PhaseSumSpec::raw(sq.clone(), 9, 3, 1.0, half, false).unwrap()).unwrap();
        assert!((s - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let quarter = TorusPoint::rational(1, 4).unwrap();
        let s = phase_sum(&PhaseSumSpec::raw(sq, 9, 3, 1.0, quarter, true).unwrap()).unwrap();
        assert!((s - Complex64::new(4.0, 8.0)).norm() < 1e-12);
    }

    #[test]
    fn family_length_is_floor_root() {
        for (n, b, k) in [(1_000_000u64, 1i64, 2usize), (999_999, 1, 2), (1_000_000, 6, 2), (10_000, 5, 3)] {
            let m = family_length(n, &BigInt::from(b), k);
            assert!(b as u128 * (m as u128).pow(k as u32) <= n as u128);
            assert!(b as u128 * ((m + 1) as u128).pow(k as u32) > n as u128);
        }
    }

    #[test]
    fn normalised_at_zero() {
        let fam = AuxFamily::new(p(&[0, 0, 1]), 10).unwrap();
        let n = 10_000;
        let spec = PhaseSumSpec::for_family(&fam, 1, n, 1.0, TorusPoint::Float(0.0), true).unwrap();
        assert_eq!(spec.m, 100);
        let v = normalized_s(&spec).unwrap();
        assert!((v.re - 100.0 * 101.0 / n as f64).abs() < 1e-12);
        assert!(v.im.abs() < 1e-9);
    }

    #[test]
    fn main_term_closed_form() {
        let fam = AuxFamily::new(p(&[0, 0, 1]), 10).unwrap();
        let c = main_term_check(&fam, 1, 1, 1, 1.0, 1_000_000).unwrap();
        assert!((c.predicted.re - 1e6).abs() < 1e-6);
        assert!((c.direct.re - 1000.0 * 1001.0).abs() < 1e-6);
        assert!((c.rel_error - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn main_term_squares_mod_4() {
        let fam = AuxFamily::new(p(&[0, 0, 1]), 10).unwrap();
        assert!(main_term_check(&fam, 1, 1, 4, 3.0, 1_000_000).unwrap().rel_error < 0.1);
    }
}
