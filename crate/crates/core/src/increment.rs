//! Density increment on progressions, major-arc frequency selection, the
//! fibre dichotomy and the iteration driver.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arcs::{self, TorusPoint};
use crate::error::{Error, Result};
use crate::hfree::{is_h_free, HFreeCheck, HFreeInstance};
use crate::intersective::AuxFamily;

/// Default `c0` in `N* = floor(c0 sigma N / (K lambda(q)))`.
pub const DEFAULT_C0: f64 = 0.25;
/// Grid points per arc for the peak search.
pub const PEAK_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Increment {
    pub n_star: u64,
    /// Progression `{lambda(q) n + r : 1 <= n <= N*}`.
    pub r: i64,
    pub lambda_q: u64,
    pub set: Vec<i64>,
    pub sigma: BigRational,
}

fn lambda_u64(fam: &AuxFamily, q: u64) -> Result<u64> {
    let l = fam.lambda_of(q)?;
    l.to_u64().ok_or(Error::TooLarge { what: "lambda(q)", size: u128::MAX, limit: u64::MAX as u128 })
}

fn ratio(num: usize, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Densest progression of modulus `lambda(q)` and length `N*` meeting `A`,
/// returned as an `h_{qd}`-free subset of `[N*]` when it beats `sigma`.
pub fn find_increment(set: &[i64], n: u64, fam: &AuxFamily, d: u64, q: u64, k: f64, c0: f64) -> Result<Option<Increment>> {
    if q == 0 || d == 0 {
        return Err(Error::Domain("q and d must be positive".into()));
    }
    let qd = q.checked_mul(d).ok_or(Error::TooLarge { what: "qd", size: q as u128 * d as u128, limit: u64::MAX as u128 })?;
    let inner = fam.aux(qd)?;
    let outer = fam.aux(d)?;
    let base = HFreeInstance::new(&outer.poly, n)?;
    if let HFreeCheck::Violation { a, b, .. } = is_h_free(set, &base)? {
        return Err(Error::PreconditionViolated(format!("A is not h_{d}-free: {a} - {b}")));
    }
    if set.is_empty() {
        return Ok(None);
    }
    let lam = lambda_u64(fam, q)?;
    let sigma = set.len() as f64 / n as f64;
    let n_star = (c0 * sigma * n as f64 / (k * lam as f64)).floor();
    if !(n_star >= 1.0) {
        return Ok(None);
    }
    let n_star = n_star as u64;
    let mut mem = vec![false; n as usize + 1];
    set.iter().for_each(|&v| mem[v as usize] = true);

    // For class c, positions j = 0.. hold c' + lam j where c' is the least
    // element of [1, N] in the class; windows may overhang either end.
    let best = (0..lam)
        .into_par_iter()
        .map(|c| {
            let first = if c == 0 { lam } else { c };
            if first > n {
                return None;
            }
            let len = ((n - first) / lam + 1) as usize;
            let mut prefix = vec![0u32; len + 1];
            for j in 0..len {
                prefix[j + 1] = prefix[j] + mem[(first + lam * j as u64) as usize] as u32;
            }
            let w = n_star as i64;
            let mut best: Option<(u32, i64)> = None;
            // window covers positions start..start + w
            for start in (1 - w)..len as i64 {
                let lo = start.max(0) as usize;
                let hi = ((start + w) as usize).min(len);
                let cnt = prefix[hi] - prefix[lo];
                let r = first as i64 + lam as i64 * start - lam as i64;
                if best.is_none_or(|(bc, br)| cnt > bc || (cnt == bc && r < br)) {
                    best = Some((cnt, r));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(u32, i64)>, cur| match acc {
            Some(a) if a.0 > cur.0 || (a.0 == cur.0 && a.1 <= cur.1) => Some(a),
            _ => Some(cur),
        });
    let (count, r) = best.expect("nonempty");
    // strict increase: count / N* > |A| / N
    if (count as u128) * (n as u128) <= (set.len() as u128) * (n_star as u128) {
        return Ok(None);
    }
    let star: Vec<i64> = (1..=n_star as i64)
        .filter(|&m| {
            let v = lam as i64 * m + r;
            v >= 1 && v as u64 <= n && mem[v as usize]
        })
        .collect();
    debug_assert_eq!(star.len(), count as usize);
    let inst = HFreeInstance::new(&inner.poly, n_star)?;
    if let HFreeCheck::Violation { a, b, n: w } = is_h_free(&star, &inst)? {
        return Err(Error::InvariantViolation(format!("A* not h_{qd}-free: {a} - {b} = h_{qd}({w})")));
    }
    let sigma = ratio(star.len(), n_star);
    Ok(Some(Increment { n_star, r, lambda_q: lam, set: star, sigma }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaEntry {
    pub a: u64,
    pub q: u64,
    pub gamma: TorusPoint,
    pub peak: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaSelection {
    pub b: f64,
    pub q: f64,
    pub entries: Vec<GammaEntry>,
    /// `|Omega|`
    pub omega: usize,
    pub arcs_scanned: usize,
    pub threshold: f64,
    pub arc_k: f64,
    pub q_max: f64,
    pub sum_peaks: f64,
    /// `B |A| Q^{1/2} / ((log N)^{1/4} (log 1/sigma)^2)`
    pub asymptotic_lower_bound: f64,
}

/// Score maximised over dyadic buckets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BucketRule {
    /// `sum q^{-1/2} peak mass^{1/2}`
    Contribution,
    /// `sum peak`
    PeakSum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectOptions {
    pub oversample: u32,
    pub peak_points: usize,
    /// Cap on the arc denominators scanned.
    pub q_cap: Option<u64>,
    pub rule: BucketRule,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions { oversample: 32, peak_points: PEAK_POINTS, q_cap: Some(32), rule: BucketRule::Contribution }
    }
}

/// Measure peaks and `L^2` masses on the arcs `M_{a,q}(N, kappa/sigma)`,
/// `q <= kappa/sigma^{k+1}`, keep those above `sigma^{3k+5} N / log N`, and
/// return the dyadic `(B, Q)` bucket with the largest sum of peaks.
pub fn select_gamma(set: &[i64], n: u64, fam: &AuxFamily, d: u64, kappa: f64, opts: &SelectOptions) -> Result<GammaSelection> {
    if set.is_empty() {
        return Err(Error::PreconditionViolated("A must be nonempty".into()));
    }
    fam.aux(d)?;
    let k = fam.degree() as i32;
    let sigma = set.len() as f64 / n as f64;
    let arc_k = kappa / sigma;
    let mut q_max = kappa / sigma.powi(k + 1);
    if let Some(cap) = opts.q_cap {
        q_max = q_max.min(cap as f64);
    }
    let threshold = sigma.powi(3 * k + 5) * n as f64 / (n.max(2) as f64).ln();
    let radius = arc_k / n as f64;
    let arcs = arcs::arc_list(q_max);
    let measured: Vec<GammaEntry> = arcs
        .par_iter()
        .map(|&(a, q)| {
            let mass = arcs::arc_l2_mass(set, n, a as i64, q, arc_k, opts.oversample)?;
            let (peak, gamma) = arcs::arc_peak(set, a as i64, q, radius, opts.peak_points)?;
            Ok(GammaEntry { a, q, gamma, peak, mass })
        })
        .collect::<Result<Vec<_>>>()?;
    let omega: Vec<&GammaEntry> = measured.iter().filter(|e| e.mass > threshold).collect();
    let root = sigma * (n as f64).sqrt();
    // bucket key: (log2 Q, log2 B)
    let mut buckets: BTreeMap<(i32, i32), Vec<&GammaEntry>> = BTreeMap::new();
    for e in &omega {
        let qe = (e.q as f64).log2().floor() as i32;
        let be = (root / e.mass.sqrt()).log2().ceil() as i32;
        buckets.entry((qe, be)).or_default().push(e);
    }
    let mut best: Option<((i32, i32), f64)> = None;
    for (key, es) in &buckets {
        let s: f64 = match opts.rule {
            BucketRule::Contribution => es.iter().map(|e| e.peak * e.mass.sqrt() / (e.q as f64).sqrt()).sum(),
            BucketRule::PeakSum => es.iter().map(|e| e.peak).sum(),
        };
        if best.is_none_or(|(_, bs)| s > bs) {
            best = Some((*key, s));
        }
    }
    let (b, q, entries, sum_peaks) = match best {
        Some(((qe, be), _)) => {
            let es: Vec<GammaEntry> = buckets[&(qe, be)].iter().map(|e| (*e).clone()).collect();
            let s = es.iter().map(|e| e.peak).sum();
            (2f64.powi(be), 2f64.powi(qe), es, s)
        }
        None => (1.0, 1.0, Vec::new(), 0.0),
    };
    let log_inv = (1.0 / sigma).ln();
    let asymptotic_lower_bound = b * set.len() as f64 * q.sqrt() / ((n.max(2) as f64).ln().powf(0.25) * log_inv * log_inv);
    Ok(GammaSelection {
        b,
        q,
        entries,
        omega: omega.len(),
        arcs_scanned: arcs.len(),
        threshold,
        arc_k,
        q_max,
        sum_peaks,
        asymptotic_lower_bound,
    })
}

impl GammaSelection {
    /// `min mass / (sigma |A|)` over the selection.
    pub fn measured_nu(&self, sigma: f64, size: usize) -> Option<f64> {
        self.entries
            .iter()
            .map(|e| e.mass / (sigma * size as f64))
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
    }

    /// Bucket invariants: `Q <= q < 2Q` and `sigma^2 N / B^2 <= mass < 4 sigma^2 N / B^2`.
    pub fn check_invariants(&self, sigma: f64, n: u64) -> bool {
        let lo = sigma * sigma * n as f64 / (self.b * self.b);
        self.entries.iter().all(|e| {
            let qf = e.q as f64;
            qf >= self.q && qf < 2.0 * self.q && e.mass >= lo * (1.0 - 1e-12) && e.mass <= 4.0 * lo * (1.0 + 1e-12)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cor0 {
    Increment { q: u64 },
    SmallFibers { max_fiber: usize },
}

/// Largest fibre `|{a : (a, q) in Gamma}|` against `nu B^2`.
pub fn cor0_dichotomy(sel: &GammaSelection, nu: f64) -> Cor0 {
    let mut fibres: BTreeMap<u64, usize> = BTreeMap::new();
    for e in &sel.entries {
        *fibres.entry(e.q).or_default() += 1;
    }
    let (q, max_fiber) = fibres
        .iter()
        .fold((0, 0), |(bq, bm), (&q, &m)| if m > bm { (q, m) } else { (bq, bm) });
    if max_fiber as f64 <= nu * sel.b * sel.b {
        Cor0::SmallFibers { max_fiber }
    } else {
        Cor0::Increment { q }
    }
}

/// `nu = (log N)^{-1/2} exp(-c log(1/sigma) / log log(1/sigma))`, with the
/// inner `log log` clamped below at 1.
pub fn asymptotic_nu(n: u64, sigma: f64, c: f64) -> f64 {
    let l = (1.0 / sigma).ln().max(0.0);
    let ll = l.ln().max(1.0);
    (n.max(2) as f64).ln().powf(-0.5) * (-c * l / ll).exp()
}

/// `log(1/sigma) / log(1 + nu/73)`
pub fn trajectory_bound(sigma0: f64, nu: f64) -> f64 {
    (1.0 / sigma0).ln() / (1.0 + nu / 73.0).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IncrementState {
    pub step: usize,
    pub n: u64,
    pub d: u64,
    pub set: Vec<i64>,
    pub sigma: BigRational,
    pub q_used: Option<u64>,
}

impl IncrementState {
    pub fn sigma_f64(&self) -> f64 {
        self.sigma.numer().to_f64().unwrap_or(f64::NAN) / self.sigma.denom().to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    SmallFibers,
    NoIncrement,
    MaxSteps,
    BelowSqrt,
    BeyondPrimeBound,
    EmptySet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationOptions {
    pub max_steps: usize,
    pub nu_formula: bool,
    pub kappa: f64,
    /// `K` passed to [`find_increment`].
    pub increment_k: f64,
    pub c0: f64,
    pub select: SelectOptions,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { max_steps: 8, nu_formula: false, kappa: 1.0, increment_k: 1.0, c0: DEFAULT_C0, select: SelectOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<IncrementState>,
    pub stop: StopReason,
    /// `nu` used at each completed selection.
    pub nus: Vec<f64>,
}

impl Trajectory {
    /// Strictly increasing `sigma`, `d_{i+1} = q_i d_i`, and every set
    /// `h_{d_i}`-free.
    pub fn check(&self, fam: &AuxFamily) -> Result<()> {
        for w in self.states.windows(2) {
            let (s, t) = (&w[0], &w[1]);
            if t.sigma <= s.sigma {
                return Err(Error::InvariantViolation(format!("sigma not increasing at step {}", t.step)));
            }
            if s.q_used.map(|q| q * s.d) != Some(t.d) {
                return Err(Error::InvariantViolation(format!("d_{} != q d_{}", t.step, s.step)));
            }
        }
        for s in &self.states {
            let inst = HFreeInstance::new(&fam.aux(s.d)?.poly, s.n)?;
            if !is_h_free(&s.set, &inst)?.is_ok() {
                return Err(Error::InvariantViolation(format!("state {} not h_{}-free", s.step, s.d)));
            }
        }
        Ok(())
    }

    /// Number of increments against `log(1/sigma_0) / log(1 + nu/73)`.
    pub fn within_bound(&self, nu: f64) -> bool {
        let t = self.states.len().saturating_sub(1) as f64;
        let s0 = self.states.first().map_or(1.0, IncrementState::sigma_f64);
        s0 >= 1.0 || t <= trajectory_bound(s0, nu)
    }
}

/// Iterate select, dichotomy and increment from `A_0 ⊆ [N_0]`.
pub fn run_iteration(fam: &AuxFamily, set0: &[i64], n0: u64, opts: &IterationOptions) -> Result<Trajectory> {
    let inst = HFreeInstance::new(fam.h(), n0)?;
    if let HFreeCheck::Violation { a, b, .. } = is_h_free(set0, &inst)? {
        return Err(Error::PreconditionViolated(format!("A_0 is not h-free: {a} - {b}")));
    }
    let mut set0 = set0.to_vec();
    set0.sort_unstable();
    set0.dedup();
    let sigma0 = ratio(set0.len(), n0);
    let mut states = vec![IncrementState { step: 0, n: n0, d: 1, set: set0, sigma: sigma0, q_used: None }];
    let mut nus = Vec::new();
    let floor = (n0 as f64).sqrt();
    let stop = loop {
        let cur = states.last().expect("nonempty");
        if cur.set.is_empty() {
            break StopReason::EmptySet;
        }
        if states.len() > opts.max_steps {
            break StopReason::MaxSteps;
        }
        if (cur.n as f64) < floor {
            break StopReason::BelowSqrt;
        }
        let sigma = cur.sigma_f64();
        let sel = select_gamma(&cur.set, cur.n, fam, cur.d, opts.kappa, &opts.select)?;
        let nu = if opts.nu_formula {
            asymptotic_nu(cur.n, sigma, 1.0)
        } else {
            sel.measured_nu(sigma, cur.set.len()).unwrap_or(0.0)
        };
        nus.push(nu);
        let q = match cor0_dichotomy(&sel, nu) {
            Cor0::SmallFibers { .. } => break StopReason::SmallFibers,
            Cor0::Increment { q } => q,
        };
        let qd = q * cur.d;
        if crate::arith::factorize(qd).iter().any(|&(p, _)| fam.root(p).is_none()) {
            break StopReason::BeyondPrimeBound;
        }
        let Some(inc) = find_increment(&cur.set, cur.n, fam, cur.d, q, opts.increment_k, opts.c0)? else {
            break StopReason::NoIncrement;
        };
        let step = cur.step + 1;
        states.last_mut().expect("nonempty").q_used = Some(q);
        states.push(IncrementState { step, n: inc.n_star, d: qd, set: inc.set, sigma: inc.sigma, q_used: None });
    };
    Ok(Trajectory { states, stop, nus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfree::greedy_h_free;
    use crate::intpoly::IntPoly;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(c.iter().copied())
    }

    fn squares() -> AuxFamily {
        AuxFamily::new(p(&[0, 0, 1]), 50).unwrap()
    }

    #[test]
    fn lifted_class_set_increments() {
        let fam = squares();
        let n = 900u64;
        let g = greedy_h_free(&HFreeInstance::new(&p(&[0, 0, 1]), n / 9).unwrap());
        let set: Vec<i64> = g.iter().map(|t| 1 + 9 * (t - 1)).filter(|&v| v as u64 <= n).collect();
        assert!(is_h_free(&set, &HFreeInstance::new(&p(&[0, 0, 1]), n).unwrap()).unwrap().is_ok());
        let inc = find_increment(&set, n, &fam, 1, 3, 0.1, DEFAULT_C0).unwrap().expect("increment");
        assert_eq!(inc.lambda_q, 9);
        assert!(inc.sigma > ratio(set.len(), n));
        assert!(is_h_free(&inc.set, &HFreeInstance::new(&p(&[0, 0, 1]), inc.n_star).unwrap()).unwrap().is_ok());
    }

    #[test]
    fn full_set_has_no_strict_increase() {
        let fam = squares();
        // [1, N] is only h-free for N <= 1
        let r = find_increment(&[1], 1, &fam, 1, 1, 0.25, 1.0).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn greedy_set_increment_postconditions() {
        let fam = squares();
        let n = 2000;
        let set = greedy_h_free(&HFreeInstance::new(&p(&[0, 0, 1]), n).unwrap());
        if let Some(inc) = find_increment(&set, n, &fam, 1, 2, 1.0, DEFAULT_C0).unwrap() {
            assert!(inc.sigma > ratio(set.len(), n));
            assert_eq!(inc.lambda_q, 4);
        }
    }

    #[test]
    fn rejects_non_free_input() {
        let fam = squares();
        assert!(matches!(find_increment(&[1, 2], 10, &fam, 1, 2, 1.0, 0.25), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn selection_on_full_interval_is_empty() {
        let fam = squares();
        let set: Vec<i64> = (1..=500).collect();
        let s = select_gamma(&set, 500, &fam, 1, 1.0, &SelectOptions::default()).unwrap();
        assert!(s.entries.is_empty());
        assert_eq!(cor0_dichotomy(&s, 1.0), Cor0::SmallFibers { max_fiber: 0 });
    }

    #[test]
    fn selection_concentrates_at_fifths() {
        let fam = squares();
        let n = 2000;
        let set: Vec<i64> = (1..=n as i64).filter(|v| v % 5 == 1).collect();
        let opts = SelectOptions { oversample: 8, ..SelectOptions::default() };
        let s = select_gamma(&set, n, &fam, 1, 1.0, &opts).unwrap();
        assert!(!s.entries.is_empty());
        assert!(s.entries.iter().all(|e| e.q == 5));
        assert_eq!(s.entries.iter().map(|e| e.a).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert!(s.check_invariants(0.2, n));
    }

    #[test]
    fn dichotomy_examples() {
        let entry = |a, q| GammaEntry { a, q, gamma: TorusPoint::Float(0.0), peak: 1.0, mass: 1.0 };
        let sel = |entries: Vec<GammaEntry>, b: f64| GammaSelection {
            b,
            q: 4.0,
            entries,
            omega: 0,
            arcs_scanned: 0,
            threshold: 0.0,
            arc_k: 1.0,
            q_max: 8.0,
            sum_peaks: 0.0,
            asymptotic_lower_bound: 0.0,
        };
        let five = sel((1..=4).map(|a| entry(a, 5)).collect(), 2f64.sqrt());
        assert_eq!(cor0_dichotomy(&five, 1.0), Cor0::Increment { q: 5 });
        let spread = sel(vec![entry(1, 4), entry(1, 5), entry(1, 6), entry(1, 7)], 1.0);
        assert_eq!(cor0_dichotomy(&spread, 1.0), Cor0::SmallFibers { max_fiber: 1 });
    }

    #[test]
    fn iteration_on_full_interval_stops() {
        let fam = squares();
        let t = run_iteration(&fam, &[1], 1, &IterationOptions::default()).unwrap();
        assert_eq!(t.states.len(), 1);
    }

    #[test]
    fn iteration_invariants() {
        let fam = AuxFamily::new(p(&[0, 0, 0, 1]), 50).unwrap();
        let n = 10_000;
        let set = greedy_h_free(&HFreeInstance::new(fam.h(), n).unwrap());
        let select = SelectOptions { oversample: 4, q_cap: Some(8), ..SelectOptions::default() };
        let t = run_iteration(&fam, &set, n, &IterationOptions { select, ..IterationOptions::default() }).unwrap();
        t.check(&fam).unwrap();
        assert!(t.states.len() >= 2, "{:?}", t.stop);
        let q = t.states[0].q_used.unwrap();
        assert_eq!(t.states[1].d, q);
        assert!(t.within_bound(t.nus[0]));
    }

    #[test]
    fn contribution_weighting_prefers_spikes() {
        let fam = squares();
        let n = 3000;
        let set: Vec<i64> = (1..=n as i64).filter(|v| v % 7 == 3).collect();
        let opts = SelectOptions { oversample: 4, q_cap: Some(12), ..SelectOptions::default() };
        let s = select_gamma(&set, n, &fam, 1, 1.0, &opts).unwrap();
        assert!(s.entries.iter().all(|e| e.q == 7));
    }

    #[test]
    fn asymptotic_nu_is_small() {
        let nu = asymptotic_nu(1_000_000, 0.1, 1.0);
        assert!(nu > 0.0 && nu < 1.0);
        assert!(trajectory_bound(0.1, nu) > 1.0);
    }
}
