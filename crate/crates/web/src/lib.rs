//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use wasm_bindgen::prelude::*;

use purefields::arith::{lcm_up_to, FactorBudget};
use purefields::construction::{
    build_congruence_target, derive_params, sieve_admissible, Overrides, SieveMode,
};
use purefields::lseries::{log_L1_proxy, Tallies};
use purefields::symbols::{class_table, count_consecutive_residues, find_m0_mod_p, lemma_threshold};

/// Largest cutoff accepted by [`lambda_series`]; keeps the page responsive.
pub const MAX_CUTOFF: u32 = 2_000_000;
/// Largest prime accepted by [`residue_pattern`].
pub const MAX_PATTERN_PRIME: u32 = 20_000;
/// Largest `M` accepted by [`construct`].
pub const MAX_M: u64 = 200_000;

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("serializable"),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: BigUint = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
        let e: u32 = e.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        return Ok(b.pow(e));
    }
    s.parse().map_err(|_| format!("not a positive integer: {s:?}"))
}

#[derive(Serialize)]
pub struct LambdaSeries {
    pub a: String,
    pub l: u32,
    pub cutoff: u32,
    pub sum: f64,
    pub tallies: Tallies,
    /// `(p, λ(p), running sum)` over unramified primes.
    pub points: Vec<(u64, i32, f64)>,
}

pub fn lambda_series_data(a: &str, l: u32, cutoff: u32) -> Result<LambdaSeries, String> {
    let a = parse_big(a)?;
    purefields::purefield::check_odd_prime(l).map_err(|e| e.to_string())?;
    if cutoff > MAX_CUTOFF {
        return Err(format!("cutoff is limited to {MAX_CUTOFF} in the browser"));
    }
    let proxy = log_L1_proxy(&a, l, cutoff as u64);
    let mut acc = 0.0;
    let points = proxy
        .values
        .iter()
        .filter(|v| !v.is_skipped())
        .map(|v| {
            acc += v.value as f64 / v.p as f64;
            (v.p, v.value, acc)
        })
        .collect();
    Ok(LambdaSeries {
        a: a.to_string(),
        l,
        cutoff,
        sum: proxy.sum,
        tallies: proxy.tallies,
        points,
    })
}

/// `λ(p)` for every prime up to `cutoff`, with the running proxy sum.
#[wasm_bindgen]
pub fn lambda_series(a: &str, l: u32, cutoff: u32) -> String {
    to_json(lambda_series_data(a, l, cutoff))
}

#[derive(Serialize)]
pub struct ResiduePattern {
    pub p: u64,
    pub l: u32,
    pub k: u32,
    /// `classes[d]` = index of `d` modulo l-th powers (class 0 = residues);
    /// `classes[0]` is `null`.
    pub classes: Vec<Option<u32>>,
    pub consecutive_runs: u64,
    pub threshold: String,
    /// Least `m0` with `(m0 P)^l + j` a residue for `j = 1..k`, if any.
    pub m0: Option<u64>,
}

pub fn residue_pattern_data(p: u32, l: u32, k: u32) -> Result<ResiduePattern, String> {
    if p > MAX_PATTERN_PRIME {
        return Err(format!("p is limited to {MAX_PATTERN_PRIME} in the browser"));
    }
    let p = p as u64;
    let table = class_table(p, l).map_err(|e| e.to_string())?;
    let classes = table
        .into_iter()
        .map(|c| (c != u32::MAX).then_some(c))
        .collect();
    let consecutive_runs = count_consecutive_residues(p, l, k).map_err(|e| e.to_string())?;
    let period = BigInt::from(lcm_up_to(k as u64));
    Ok(ResiduePattern {
        p,
        l,
        k,
        classes,
        consecutive_runs,
        threshold: lemma_threshold(l, k).to_string(),
        m0: find_m0_mod_p(p, l, k, &period).ok(),
    })
}

/// l-th power residue classes mod `p` and the consecutive-residue search.
#[wasm_bindgen]
pub fn residue_pattern(p: u32, l: u32, k: u32) -> String {
    to_json(residue_pattern_data(p, l, k))
}

#[derive(Serialize)]
pub struct ConstructRow {
    pub m: u64,
    pub j: u32,
    pub radicand: String,
    pub discriminant: String,
    pub log10_discriminant: f64,
    pub bound_holds: bool,
}

#[derive(Serialize)]
pub struct ConstructSummary {
    pub m_max: u64,
    pub q: String,
    pub m0: String,
    pub override_regime: bool,
    pub warnings: Vec<String>,
    pub progression_len: u64,
    pub rows: Vec<ConstructRow>,
    pub gaps: usize,
}

/// Negative ceilings mean "use the default".
pub fn construct_data(
    l: u32,
    k: u32,
    x: &str,
    small_ceiling: i64,
    symbol_ceiling: i64,
    staged: bool,
) -> Result<ConstructSummary, String> {
    let x = parse_big(x)?;
    let overrides = Overrides {
        small_prime_ceiling: u64::try_from(small_ceiling).ok(),
        symbol_prime_ceiling: u64::try_from(symbol_ceiling).ok(),
        z: None,
    };
    let params = derive_params(l, k, 0.9, &x, &overrides).map_err(|e| e.to_string())?;
    if params.m_max > MAX_M {
        return Err(format!("M = {} exceeds the browser limit {MAX_M}", params.m_max));
    }
    let target = build_congruence_target(&params).map_err(|e| e.to_string())?;
    let mode = if staged { SieveMode::Staged } else { SieveMode::Direct };
    let out = sieve_admissible(&target, &params, mode, &FactorBudget::iterations(2_000_000), None)
        .map_err(|e| e.to_string())?;
    let rows = out
        .admissible
        .iter()
        .flat_map(|a| {
            a.per_j.iter().map(move |pj| ConstructRow {
                m: a.m,
                j: pj.j,
                radicand: pj.radicand.to_string(),
                discriminant: pj.discriminant.to_string(),
                log10_discriminant: purefields::arith::ln_big(&pj.discriminant) / std::f64::consts::LN_10,
                bound_holds: pj.bound_holds,
            })
        })
        .collect();
    Ok(ConstructSummary {
        m_max: params.m_max,
        q: target.q.to_string(),
        m0: target.m0.to_string(),
        override_regime: params.override_regime,
        warnings: target.warnings,
        progression_len: out.stats.progression_len,
        rows,
        gaps: out.gaps.len(),
    })
}

/// Admissible `m` with their discriminants `D_j`.
#[wasm_bindgen]
pub fn construct(l: u32, k: u32, x: &str, small_ceiling: i64, symbol_ceiling: i64, staged: bool) -> String {
    to_json(construct_data(l, k, x, small_ceiling, symbol_ceiling, staged))
}
