//! Subcommand arguments and their report builders.

use crate::expr::{parse_poly, render_poly};
use crate::report::{big, cell, complex, num, rational, Table};
use crate::sets::{build, SetSource};
use clap::Args;
use intersective_core::arcs::{arc_l2_mass, arc_peak, mass_split};
use intersective_core::arith::{factorize, gcd_u64};
use intersective_core::energy::{additive_energy, additive_energy_naive, ch_check, newbm_check};
use intersective_core::expsum::{cancellation_scan, main_term_check, Cutoff};
use intersective_core::hfree::{greedy_h_free, max_h_free_exact, DEFAULT_EXACT_LIMIT};
use intersective_core::increment::{BucketRule, SelectOptions};
use intersective_core::intersective::check_intersective as verdict_of;
use intersective_core::sieve::SieveMethod;
use intersective_core::{
    ArcSpec, AuxFamily, Bound, Delta, Error, FreqSet, HFreeInstance, IntPoly, IntersectivityVerdict, IterationOptions, SieveProfile,
    StopReason,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Out = Result<Outcome, Failure>;

fn done(result: Value) -> Out {
    Ok(Outcome { result, table: None })
}

#[derive(Args, Debug, Clone)]
pub struct PolyInput {
    /// Polynomial, e.g. "x^2-1"
    #[arg(value_name = "POLY", allow_hyphen_values = true)]
    pub positional: Option<String>,
    /// Polynomial (alternative to the positional form)
    #[arg(long = "poly", value_name = "POLY", allow_hyphen_values = true, conflicts_with = "positional")]
    pub poly: Option<String>,
}

impl Serialize for PolyInput {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.poly.as_deref().or(self.positional.as_deref()).serialize(s)
    }
}

impl PolyInput {
    fn parse(&self) -> Result<IntPoly, Failure> {
        let src = self
            .poly
            .as_deref()
            .or(self.positional.as_deref())
            .ok_or_else(|| Failure::Usage("a polynomial is required".into()))?;
        let h = parse_poly(src).map_err(|e| Failure::Usage(format!("polynomial {src:?}: {e}")))?;
        if h.degree().unwrap_or(0) < 1 {
            return Err(Failure::Domain(format!("polynomial {src:?} must have degree >= 1")));
        }
        Ok(h)
    }
}

/// Root-data bound: explicit, or the larger of 1000 and every prime in `need`.
fn family(h: IntPoly, bound: Option<u64>, need: &[u64]) -> Result<AuxFamily, Failure> {
    let largest = need.iter().flat_map(|&d| factorize(d)).map(|(p, _)| p).max().unwrap_or(1);
    Ok(AuxFamily::new(h, bound.unwrap_or(largest.max(1000)))?)
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct SetInput {
    /// greedy | interval | mod:R:M | random:P | list:1,2,.. | file:PATH
    #[arg(long = "set", default_value = "greedy")]
    pub source: String,
    /// Replace t by 1 + M (t - 1)
    #[arg(long, default_value_t = 1)]
    pub dilate: u64,
    /// Seed for random sources
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl SetInput {
    fn build(&self, n: u64, h: Option<&IntPoly>) -> Result<Vec<i64>, Failure> {
        let src: SetSource = self.source.parse().map_err(Failure::Usage)?;
        build(&src, n, h, self.dilate, self.seed).map_err(Failure::Domain)
    }
}

// --- check-intersective ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct CheckArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    /// Largest prime examined
    #[arg(long, default_value_t = 100)]
    pub bound: u64,
}

pub fn check_intersective(a: &CheckArgs) -> Out {
    let h = a.poly.parse()?;
    let v = verdict_of(&h, a.bound)?;
    done(match v {
        IntersectivityVerdict::NotIntersective { witness_q } => json!({
            "poly": render_poly(&h),
            "verdict": "not_intersective",
            "witness": witness_q,
        }),
        IntersectivityVerdict::IntersectiveUpTo { bound, integer_root, roots } => {
            let roots: Vec<Value> = roots
                .values()
                .flatten()
                .map(|z| json!({"p": z.p, "residue": big(&z.residue), "precision": z.prec, "multiplicity": z.multiplicity}))
                .collect();
            json!({
                "poly": render_poly(&h),
                "verdict": "intersective_up_to",
                "bound": match bound { Bound::Finite(b) => json!(b), Bound::Unbounded => json!("unbounded") },
                "integer_root": integer_root.as_ref().map(big),
                "roots": roots,
            })
        }
    })
}

// --- aux ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct AuxArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    /// Modulus d
    #[arg(long, required_unless_present = "d_max")]
    pub d: Option<u64>,
    /// Sweep every d <= D: integrality and the J_d bound
    #[arg(long)]
    pub d_max: Option<u64>,
    /// Primes up to this bound carry root data
    #[arg(long)]
    pub bound: Option<u64>,
}

fn jd_constant(h: &IntPoly) -> BigInt {
    h.coeffs().iter().enumerate().map(|(j, c)| c.abs() << j).sum()
}

pub fn aux(a: &AuxArgs) -> Out {
    let h = a.poly.parse()?;
    if let Some(dm) = a.d_max {
        if dm == 0 {
            return Err(Failure::Usage("--d-max must be positive".into()));
        }
        let fam = family(h, a.bound.or(Some(dm.max(2))), &[])?;
        let c = jd_constant(fam.h());
        let ak = fam.h().leading().expect("degree >= 1").clone();
        let rows: Vec<(u64, Option<(bool, f64)>)> = (1..=dm)
            .into_par_iter()
            .map(|d| {
                let row = fam.aux(d).ok().map(|e| {
                    let ok = &e.abs_sum * &ak <= &c * &e.leading;
                    let ratio = (&e.abs_sum * &ak).to_f64().unwrap_or(f64::NAN) / (&c * &e.leading).to_f64().unwrap_or(f64::NAN);
                    (ok, ratio)
                });
                (d, row)
            })
            .collect();
        let mut table = Table::new(&["d", "integral", "jd_ok", "jd_ratio"]);
        let (mut integral_fail, mut jd_fail, mut worst) = (Vec::new(), Vec::new(), 0.0f64);
        for (d, row) in &rows {
            match row {
                None => {
                    integral_fail.push(*d);
                    table.push(vec![d.to_string(), "false".into(), String::new(), String::new()]);
                }
                Some((ok, r)) => {
                    if !ok {
                        jd_fail.push(*d);
                    }
                    worst = worst.max(*r);
                    table.push(vec![d.to_string(), "true".into(), ok.to_string(), cell(*r)]);
                }
            }
        }
        return Ok(Outcome {
            result: json!({
                "poly": render_poly(fam.h()),
                "d_max": dm,
                "checked": dm,
                "integrality_failures": integral_fail,
                "jd_failures": jd_fail,
                "max_jd_ratio": num(worst),
            }),
            table: Some(table),
        });
    }
    let d = a.d.expect("clap requires d");
    if d == 0 {
        return Err(Failure::Usage("--d must be positive".into()));
    }
    let fam = family(h, a.bound, &[d])?;
    let e = fam.aux(d)?;
    done(json!({
        "poly": render_poly(fam.h()),
        "negated": fam.negated(),
        "d": d,
        "r": big(&e.r),
        "lambda": big(&e.lambda),
        "h_d": render_poly(&e.poly),
        "coefficients": e.poly.coeffs().iter().map(big).collect::<Vec<_>>(),
        "b_d": big(&e.leading),
        "j_d": big(&e.abs_sum),
        "content": big(&e.poly.content()?),
    }))
}

// --- nesting ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct NestingArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    #[arg(long, required_unless_present = "max_dq")]
    pub d: Option<u64>,
    #[arg(long, required_unless_present = "max_dq")]
    pub q: Option<u64>,
    /// Check every pair with d q <= M
    #[arg(long)]
    pub max_dq: Option<u64>,
    /// Check n = 0..=n_max
    #[arg(long, default_value_t = 50)]
    pub n_max: u64,
    #[arg(long)]
    pub bound: Option<u64>,
}

pub fn nesting(a: &NestingArgs) -> Out {
    let h = a.poly.parse()?;
    if let Some(m) = a.max_dq {
        let fam = family(h, a.bound.or(Some(m.max(2))), &[])?;
        let pairs: Vec<(u64, u64)> = (1..=m).flat_map(|d| (1..=m / d).map(move |q| (d, q))).collect();
        let results: Vec<Option<String>> = pairs
            .par_iter()
            .map(|&(d, q)| match fam.verify_nesting(d, q, a.n_max) {
                Ok(r) if r.s > -BigInt::from(q) && !r.s.is_positive() => None,
                Ok(r) => Some(format!("d={d} q={q}: s={} outside (-q, 0]", r.s)),
                Err(e) => Some(format!("d={d} q={q}: {e}")),
            })
            .collect();
        let failures: Vec<String> = results.into_iter().flatten().collect();
        return done(json!({
            "poly": render_poly(fam.h()),
            "max_dq": m,
            "pairs": pairs.len(),
            "n_max": a.n_max,
            "failures": failures,
        }));
    }
    let (d, q) = (a.d.expect("clap"), a.q.expect("clap"));
    if d == 0 || q == 0 {
        return Err(Failure::Usage("--d and --q must be positive".into()));
    }
    let fam = family(h, a.bound, &[d * q])?;
    let r = fam.verify_nesting(d, q, a.n_max)?;
    done(json!({
        "poly": render_poly(fam.h()),
        "d": r.d,
        "q": r.q,
        "s": big(&r.s),
        "lambda_q": big(&fam.lambda_of(q)?),
        "checked": r.checked,
        "holds": true,
    }))
}

// --- sieve ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct SieveArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    /// Sieve h_d instead of the polynomial itself
    #[arg(long)]
    pub d: Option<u64>,
    /// Prime cutoff Y
    #[arg(long)]
    pub y: f64,
    /// Range [1, X]
    #[arg(long)]
    pub x: u64,
    /// Also run the direct membership loop
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub bound: Option<u64>,
}

fn target_poly(h: IntPoly, d: Option<u64>, bound: Option<u64>) -> Result<IntPoly, Failure> {
    match d {
        None => Ok(h),
        Some(0) => Err(Failure::Usage("--d must be positive".into())),
        Some(d) => Ok(family(h, bound, &[d])?.aux_poly(d)?),
    }
}

fn method_name(m: SieveMethod) -> &'static str {
    match m {
        SieveMethod::Wheel => "wheel",
        SieveMethod::Blocks => "blocks",
        SieveMethod::Direct => "direct",
    }
}

pub fn sieve(a: &SieveArgs) -> Out {
    let g = target_poly(a.poly.parse()?, a.d, a.bound)?;
    let prof = SieveProfile::new(&g, a.y)?;
    let c = prof.sieve_count(a.x);
    let mut result = json!({
        "g": render_poly(&g),
        "y": num(a.y),
        "x": a.x,
        "count": c.count,
        "method": method_name(c.method),
        "density": num(prof.expected_density()),
        "density_exact": rational(&prof.expected_density_exact()),
        "main_term": num(c.main_term),
        "rel_error": num(c.rel_error),
        "regime_ok": c.regime_ok,
        "wheel_modulus": prof.wheel_modulus(),
    });
    if a.verify {
        let direct = prof.direct_count(a.x).count;
        result["direct_count"] = json!(direct);
        result["exact_match"] = json!(direct == c.count);
    }
    done(result)
}

// --- expsum-scan ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct ExpsumArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    #[arg(long)]
    pub d: Option<u64>,
    /// Largest modulus q
    #[arg(long)]
    pub q_max: u64,
    /// Prime cutoff Y (omit with --all-primes; Y < 2 means no sieve)
    #[arg(long, required_unless_present = "all_primes")]
    pub y: Option<f64>,
    /// Sieve by every prime dividing q
    #[arg(long, conflicts_with = "y")]
    pub all_primes: bool,
    /// Only squarefree q
    #[arg(long)]
    pub squarefree: bool,
    #[arg(long)]
    pub bound: Option<u64>,
}

pub fn expsum_scan(a: &ExpsumArgs) -> Out {
    let g = target_poly(a.poly.parse()?, a.d, a.bound)?;
    let cutoff = match a.y {
        Some(y) => Cutoff::Finite(y),
        None => Cutoff::AllPrimes,
    };
    let scan = cancellation_scan(&g, a.q_max, cutoff, a.squarefree)?;
    let mut table = Table::new(&["q", "omega", "max_abs", "argmax_a", "ratio_sqrt", "ratio_weyl"]);
    let rows: Vec<Value> = scan
        .rows
        .iter()
        .map(|r| {
            table.push(vec![
                r.q.to_string(),
                r.omega.to_string(),
                cell(r.max_abs),
                r.argmax_a.to_string(),
                cell(r.ratio_sqrt),
                cell(r.ratio_weyl),
            ]);
            json!({"q": r.q, "omega": r.omega, "max_abs": num(r.max_abs), "argmax_a": r.argmax_a,
                   "ratio_sqrt": num(r.ratio_sqrt), "ratio_weyl": num(r.ratio_weyl)})
        })
        .collect();
    let worst = scan.rows.iter().map(|r| r.ratio_sqrt).fold(0.0, f64::max);
    Ok(Outcome {
        result: json!({
            "g": render_poly(&g),
            "q_max": a.q_max,
            "cutoff": match cutoff { Cutoff::Finite(y) => num(y), Cutoff::AllPrimes => json!("all_primes") },
            "squarefree_only": a.squarefree,
            "fitted_c": scan.fitted_c.map(num),
            "max_ratio_sqrt": num(worst),
            "rows": rows,
        }),
        table: Some(table),
    })
}

// --- main-term ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct MainTermArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    #[arg(long, default_value_t = 1)]
    pub d: u64,
    #[arg(long)]
    pub q: u64,
    /// Numerator a (default: every a coprime to q)
    #[arg(long)]
    pub a: Option<i64>,
    #[arg(long, default_value_t = 10.0)]
    pub y: f64,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long)]
    pub bound: Option<u64>,
}

pub fn main_term(a: &MainTermArgs) -> Out {
    if a.q == 0 || a.d == 0 {
        return Err(Failure::Usage("--q and --d must be positive".into()));
    }
    let fam = family(a.poly.parse()?, a.bound, &[a.d])?;
    let nums: Vec<i64> = match a.a {
        Some(x) => vec![x],
        None => (1..=a.q).filter(|&x| gcd_u64(x, a.q) == 1).map(|x| x as i64).collect(),
    };
    let checks = nums
        .par_iter()
        .map(|&x| main_term_check(&fam, a.d, x, a.q, a.y, a.n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["a", "direct_re", "direct_im", "predicted_re", "predicted_im", "rel_error"]);
    let mut rows = Vec::new();
    for (x, c) in nums.iter().zip(&checks) {
        table.push(vec![
            x.to_string(),
            cell(c.direct.re),
            cell(c.direct.im),
            cell(c.predicted.re),
            cell(c.predicted.im),
            cell(c.rel_error),
        ]);
        rows.push(json!({"a": x, "direct": complex(c.direct), "predicted": complex(c.predicted),
                         "complete_sum": complex(c.complete), "rel_error": num(c.rel_error)}));
    }
    let worst = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let first = checks.first().ok_or_else(|| Failure::Domain("no numerator coprime to q".into()))?;
    Ok(Outcome {
        result: json!({
            "poly": render_poly(fam.h()),
            "d": a.d,
            "q": a.q,
            "y": num(a.y),
            "N": a.n,
            "m": first.m,
            "density": num(first.density),
            "complement_density": num(first.complement_density),
            "max_rel_error": num(worst),
            "rows": rows,
        }),
        table: Some(table),
    })
}

// --- arcs ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct ArcsArgs {
    /// Polynomial for the greedy set source
    #[command(flatten)]
    pub poly: PolyInput,
    #[command(flatten)]
    pub set: SetInput,
    #[arg(long = "N")]
    pub n: u64,
    /// Arc half-width K/N
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Largest arc denominator Q
    #[arg(long, default_value_t = 10.0)]
    pub q_max: f64,
    #[arg(long, default_value_t = 32)]
    pub oversample: u32,
    #[arg(long, default_value_t = 64)]
    pub peak_points: usize,
}

pub fn arcs(a: &ArcsArgs) -> Out {
    let h = if a.poly.poly.is_some() || a.poly.positional.is_some() { Some(a.poly.parse()?) } else { None };
    let set = a.set.build(a.n, h.as_ref())?;
    if set.is_empty() {
        return Err(Failure::Domain("the set is empty".into()));
    }
    let spec = ArcSpec::new(a.n, a.k, a.q_max)?;
    let split = mass_split(&set, a.n, &spec, a.oversample)?;
    let list = spec.arc_list();
    let per_arc = list
        .par_iter()
        .map(|&(x, q)| {
            let mass = arc_l2_mass(&set, a.n, x as i64, q, a.k, a.oversample)?;
            let (peak, _) = arc_peak(&set, x as i64, q, spec.radius(), a.peak_points)?;
            Ok((x, q, mass, peak))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut table = Table::new(&["a", "q", "l2_mass", "peak"]);
    for &(x, q, m, p) in &per_arc {
        table.push(vec![x.to_string(), q.to_string(), cell(m), cell(p)]);
    }
    Ok(Outcome {
        result: json!({
            "N": a.n,
            "size": set.len(),
            "sigma": num(set.len() as f64 / a.n as f64),
            "major": num(split.major),
            "minor": num(split.minor),
            "total": num(split.total),
            "parseval": num(split.parseval),
            "parseval_rel_error": num((split.total - split.parseval).abs() / split.parseval),
            "arcs": per_arc.len(),
        }),
        table: Some(table),
    })
}

// --- maxset ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct MaxsetArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    #[arg(long = "N")]
    pub n: u64,
    /// Exact branch and bound instead of greedy
    #[arg(long)]
    pub exact: bool,
    /// Largest N accepted by the exact search
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub limit: u64,
}

pub fn maxset(a: &MaxsetArgs) -> Out {
    let h = a.poly.parse()?;
    let inst = HFreeInstance::new(&h, a.n)?;
    let greedy = greedy_h_free(&inst);
    if a.exact {
        let m = max_h_free_exact(&inst, a.limit)?;
        return done(json!({
            "poly": render_poly(&h), "N": a.n, "method": "exact",
            "size": m.size, "witness": m.witness, "nodes": m.nodes, "greedy_size": greedy.len(),
        }));
    }
    done(json!({
        "poly": render_poly(&h), "N": a.n, "method": "greedy",
        "size": greedy.len(), "witness": greedy, "greedy_size": greedy.len(),
    }))
}

// --- increment ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct IncrementArgs {
    #[command(flatten)]
    pub poly: PolyInput,
    #[command(flatten)]
    pub set: SetInput,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 8)]
    pub max_steps: usize,
    /// Arc constant kappa: arcs of half-width kappa/(sigma N)
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// K passed to the increment step
    #[arg(long, default_value_t = 1.0)]
    pub increment_k: f64,
    /// Progression length constant
    #[arg(long, default_value_t = 0.25)]
    pub c0: f64,
    /// Cap on arc denominators (0: none)
    #[arg(long, default_value_t = 32)]
    pub q_cap: u64,
    #[arg(long, default_value_t = 32)]
    pub oversample: u32,
    /// Bucket by the plain sum of peaks
    #[arg(long)]
    pub peak_sum: bool,
    /// Closed-form nu instead of the measured value
    #[arg(long)]
    pub nu_formula: bool,
    #[arg(long)]
    pub bound: Option<u64>,
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::SmallFibers => "small_fibers",
        StopReason::NoIncrement => "no_increment",
        StopReason::MaxSteps => "max_steps",
        StopReason::BelowSqrt => "below_sqrt",
        StopReason::BeyondPrimeBound => "beyond_prime_bound",
        StopReason::EmptySet => "empty_set",
    }
}

pub fn increment(a: &IncrementArgs) -> Out {
    let fam = family(a.poly.parse()?, a.bound, &[])?;
    let set = a.set.build(a.n, Some(fam.h()))?;
    let opts = IterationOptions {
        max_steps: a.max_steps,
        nu_formula: a.nu_formula,
        kappa: a.kappa,
        increment_k: a.increment_k,
        c0: a.c0,
        select: SelectOptions {
            oversample: a.oversample,
            q_cap: (a.q_cap > 0).then_some(a.q_cap),
            rule: if a.peak_sum { BucketRule::PeakSum } else { BucketRule::Contribution },
            ..SelectOptions::default()
        },
    };
    let traj = intersective_core::increment::run_iteration(&fam, &set, a.n, &opts)?;
    traj.check(&fam)?;
    let mut table = Table::new(&["i", "N", "d", "size", "sigma", "q_used"]);
    let states: Vec<Value> = traj
        .states
        .iter()
        .map(|s| {
            table.push(vec![
                s.step.to_string(),
                s.n.to_string(),
                s.d.to_string(),
                s.set.len().to_string(),
                cell(s.sigma_f64()),
                s.q_used.map(|q| q.to_string()).unwrap_or_default(),
            ]);
            json!({"i": s.step, "N": s.n, "d": s.d, "size": s.set.len(), "sigma": num(s.sigma_f64()),
                   "sigma_exact": rational(&s.sigma), "q_used": s.q_used})
        })
        .collect();
    let nu_min = traj.nus.iter().copied().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        result: json!({
            "poly": render_poly(fam.h()),
            "N0": a.n,
            "size0": set.len(),
            "stop": stop_name(traj.stop),
            "steps": states,
            "nus": traj.nus.iter().map(|&x| num(x)).collect::<Vec<_>>(),
            "within_bound": nu_min.is_finite().then(|| traj.within_bound(nu_min)),
            "invariants_ok": true,
        }),
        table: Some(table),
    })
}

// --- energy ---

#[derive(Args, Debug, Serialize, Clone)]
pub struct EnergyArgs {
    /// Comma-separated fractions a/q
    #[arg(long)]
    pub fracs: String,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// 0, a fraction p/q, or a decimal
    #[arg(long, default_value = "0")]
    pub delta: String,
    /// Also run the naive 2m-fold loop
    #[arg(long)]
    pub naive: bool,
    /// Rational-energy check with denominators <= Q
    #[arg(long)]
    pub newbm_q: Option<f64>,
    /// Elements per denominator for the rational-energy check
    #[arg(long, default_value_t = 1)]
    pub newbm_n: u64,
    /// Set source for the large-values inequality (needs --ch-n)
    #[arg(long, requires = "ch_n")]
    pub ch_set: Option<String>,
    /// Range [1, N] of the large-values set
    #[arg(long)]
    pub ch_n: Option<u64>,
    /// Polynomial for a greedy large-values set
    #[arg(long, allow_hyphen_values = true)]
    pub ch_poly: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_fraction(s: &str) -> Result<(i64, u64), String> {
    let (a, q) = s.split_once('/').unwrap_or((s, "1"));
    let a = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let q: u64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if q == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok((a, q))
}

fn parse_delta(s: &str) -> Result<Delta, String> {
    if s.trim() == "0" {
        return Ok(Delta::Zero);
    }
    if s.contains('/') {
        let (a, q) = parse_fraction(s)?;
        if a < 0 {
            return Err("delta must be nonnegative".into());
        }
        return Ok(Delta::Exact(BigRational::new(a.into(), q.into())));
    }
    let x: f64 = s.trim().parse().map_err(|_| format!("bad delta {s:?}"))?;
    if x.is_nan() || x < 0.0 {
        return Err("delta must be nonnegative".into());
    }
    Ok(BigRational::from_float(x).map(Delta::Exact).unwrap_or(Delta::Approx(x)))
}

pub fn energy(a: &EnergyArgs) -> Out {
    let fracs = a
        .fracs
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_fraction)
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::Usage)?;
    let delta = parse_delta(&a.delta).map_err(Failure::Usage)?;
    let fs = FreqSet::rational(&fracs, a.m, delta)?;
    let e = additive_energy(&fs)?;
    let mut result = json!({"size": fs.len(), "m": a.m, "delta": a.delta, "energy": e});
    if a.naive {
        let n = additive_energy_naive(&fs)?;
        result["naive"] = json!(n);
        result["agree"] = json!(n == e);
    }
    if let Some(q) = a.newbm_q {
        let r = newbm_check(&fs, q, a.newbm_n)?;
        result["newbm"] = json!({"lhs": r.lhs, "rhs_shape": num(r.rhs_shape), "ratio": num(r.ratio)});
    }
    if let (Some(src), Some(n)) = (&a.ch_set, a.ch_n) {
        let h = a.ch_poly.clone().map(|p| PolyInput { positional: None, poly: Some(p) }.parse()).transpose()?;
        let set = SetInput { source: src.clone(), dilate: 1, seed: a.seed }.build(n, h.as_ref())?;
        let r = ch_check(&set, n, &fs)?;
        result["ch"] = json!({"lhs": num(r.lhs), "rhs": num(r.rhs), "ratio": num(r.ratio), "energy": r.energy});
    }
    done(result)
}
