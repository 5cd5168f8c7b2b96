//! Test-set sources for the set-valued subcommands.
//!
//! ```text
//! greedy           greedy h_d-free subset of [1, N]
//! interval         [1, N]
//! mod:R:M          {n <= N : n = R mod M}
//! random:P         each n kept with probability P (needs a seed)
//! list:1,3,6       explicit elements
//! file:PATH        whitespace or comma separated integers
//! ```

use intersective_core::hfree::greedy_h_free;
use intersective_core::{HFreeInstance, IntPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub enum SetSource {
    Greedy,
    Interval,
    Residue { r: i64, m: u64 },
    Random { p: f64 },
    List(Vec<i64>),
    File(String),
}

fn ints(s: &str) -> Result<Vec<i64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|e| format!("bad integer {t:?}: {e}")))
        .collect()
}

impl std::str::FromStr for SetSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "greedy" => Ok(SetSource::Greedy),
            "interval" => Ok(SetSource::Interval),
            "mod" => {
                let (r, m) = tail.split_once(':').ok_or("expected mod:R:M")?;
                let r = r.parse().map_err(|_| "bad residue")?;
                let m: u64 = m.parse().map_err(|_| "bad modulus")?;
                if m == 0 {
                    return Err("modulus must be positive".into());
                }
                Ok(SetSource::Residue { r, m })
            }
            "random" => {
                let p: f64 = tail.parse().map_err(|_| "expected random:P")?;
                if !(0.0..=1.0).contains(&p) {
                    return Err("probability must lie in [0, 1]".into());
                }
                Ok(SetSource::Random { p })
            }
            "list" => Ok(SetSource::List(ints(tail)?)),
            "file" if !tail.is_empty() => Ok(SetSource::File(tail.into())),
            _ => Err(format!("unknown set source {s:?} (greedy, interval, mod:R:M, random:P, list:..., file:PATH)")),
        }
    }
}

/// Materialise the source inside `[1, N]`, sorted and deduplicated. `h` is
/// the polynomial the greedy source avoids. `dilate = M` maps `t` to
/// `1 + M (t - 1)` after building the base set on `[1, ceil(N / M)]`.
pub fn build(src: &SetSource, n: u64, h: Option<&IntPoly>, dilate: u64, seed: u64) -> Result<Vec<i64>, String> {
    let dilate = dilate.max(1);
    let base_n = n.div_ceil(dilate);
    let base: Vec<i64> = match src {
        SetSource::Greedy => {
            let h = h.ok_or("greedy source needs a polynomial")?;
            let inst = HFreeInstance::new(h, base_n).map_err(|e| e.to_string())?;
            greedy_h_free(&inst)
        }
        SetSource::Interval => (1..=base_n as i64).collect(),
        SetSource::Residue { r, m } => (1..=base_n as i64).filter(|v| (v - r).rem_euclid(*m as i64) == 0).collect(),
        SetSource::Random { p } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (1..=base_n as i64).filter(|_| rng.random_bool(*p)).collect()
        }
        SetSource::List(v) => v.clone(),
        SetSource::File(path) => ints(&std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?)?,
    };
    let mut out: Vec<i64> = base.into_iter().map(|t| 1 + dilate as i64 * (t - 1)).filter(|&v| v >= 1 && v as u64 <= n).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
