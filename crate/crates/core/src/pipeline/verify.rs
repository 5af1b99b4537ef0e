//! Named property sweeps behind `purefields verify <suite>`.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{run_analyze, run_construct, PipelineError, RunConfig};
use crate::arith::{pow_mod, primes_in, FactorBudget};
use crate::classnum::{bound_ratios, h_estimate_l3};
use crate::construction::{
    build_congruence_target, derive_params, sieve_admissible, Overrides, SieveMode,
};
use crate::lseries::{lambda, log_L1_proxy, nonresidue_partial_sum, split_density, LambdaClass};
use crate::purefield::{
    discriminant_via_dedekind, make_pure_field, reduce_unit_rank1, stender_divisors,
    stender_unit_norm, FieldError, StenderUnit,
};
use crate::symbols::{
    character_sum, count_consecutive_residues, find_m0_mod_p, is_lth_power_residue, lemma_threshold,
};

pub const SUITES: &[&str] = &[
    "residue",
    "weil",
    "threshold",
    "discriminant",
    "stender",
    "lambda",
    "density",
    "classnum",
    "ratios",
    "sieve",
    "pipeline",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub invariant: String,
    pub checked: u64,
    pub failures: u64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckOutcome>) -> Self {
        Self {
            suite: suite.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

struct Tally {
    invariant: &'static str,
    checked: u64,
    failures: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(invariant: &'static str) -> Self {
        Self {
            invariant,
            checked: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn finish(self, detail: impl Into<String>) -> CheckOutcome {
        CheckOutcome {
            invariant: self.invariant.into(),
            checked: self.checked,
            failures: self.failures,
            passed: self.failures == 0 && self.checked > 0,
            detail: match self.first_failure {
                Some(f) => format!("first failure: {f}"),
                None => detail.into(),
            },
        }
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run_suite(name: &str) -> Result<Vec<SuiteReport>, PipelineError> {
    if name == "all" {
        return Ok(SUITES.iter().map(|s| run_one(s)).collect());
    }
    if !SUITES.contains(&name) {
        return Err(PipelineError::UnknownSuite(name.into()));
    }
    Ok(vec![run_one(name)])
}

fn run_one(name: &str) -> SuiteReport {
    let checks = match name {
        "residue" => vec![residue()],
        "weil" => vec![weil()],
        "threshold" => threshold(),
        "discriminant" => vec![discriminant()],
        "stender" => vec![stender()],
        "lambda" => lambda_suite(),
        "density" => vec![density()],
        "classnum" => vec![classnum()],
        "ratios" => ratios(),
        "sieve" => vec![sieve()],
        "pipeline" => pipeline(),
        _ => unreachable!("suite names are checked by run_suite"),
    };
    SuiteReport::new(name, checks)
}

fn residue() -> CheckOutcome {
    let mut t = Tally::new("l-th power residue test matches enumeration of x^l mod p");
    for l in [3u32, 5] {
        for p in primes_in(0, 200, Some((1, l as u64))) {
            let powers: BTreeSet<u64> = (1..p).map(|x| pow_mod(x, l as u64, p)).collect();
            for d in 1..p {
                let got = is_lth_power_residue(&BigInt::from(d), p, l).unwrap_or(!powers.contains(&d));
                t.check(got == powers.contains(&d), || format!("l={l} p={p} d={d}"));
            }
        }
    }
    t.finish("l ∈ {3,5}, p ≡ 1 (mod l) ≤ 200, all d")
}

fn weil() -> CheckOutcome {
    let mut t = Tally::new("|S| ≤ k√p for nontrivial exponent tuples");
    for k in 1..=2usize {
        let tuples: Vec<Vec<u32>> = (1..3u32.pow(k as u32 + 1))
            .map(|mut c| {
                (0..=k)
                    .map(|_| {
                        let r = c % 3;
                        c /= 3;
                        r
                    })
                    .collect()
            })
            .collect();
        for p in primes_in(6, 499, Some((1, 3))) {
            for r in &tuples {
                let ok = character_sum(r, p, 3).map(|s| s.within_weil_bound()).unwrap_or(false);
                t.check(ok, || format!("p={p} r={r:?}"));
            }
        }
    }
    t.finish("l = 3, k ∈ {1,2}, p ≡ 1 (mod 3) in [7, 499]")
}

fn threshold() -> Vec<CheckOutcome> {
    let th = lemma_threshold(3, 1) as u64;
    let mut exists = Tally::new("m0 exists above the existence threshold");
    let mut count = Tally::new("consecutive-residue count ≥ p/9 - (8/9)√p - 2");
    for p in primes_in(th, 2000, Some((1, 3))) {
        exists.check(find_m0_mod_p(p, 3, 1, &BigInt::one()).is_ok(), || format!("p={p}"));
        let n = count_consecutive_residues(p, 3, 1).unwrap_or(0) as f64;
        let pf = p as f64;
        count.check(n >= pf / 9.0 - 8.0 / 9.0 * pf.sqrt() - 2.0, || format!("p={p} count={n}"));
    }
    let d = format!("l = 3, k = 1, p ≡ 1 (mod 3) in ({th}, 2000]");
    vec![exists.finish(d.clone()), count.finish(d)]
}

fn discriminant() -> CheckOutcome {
    let mut t = Tally::new("discriminant formula agrees with the Dedekind-criterion oracle");
    let budget = FactorBudget::default();
    for a in 2u64..=500 {
        let ab = BigUint::from(a);
        let field = match make_pure_field(&ab, 3) {
            Ok(f) if f.stripped_power.is_one() => f,
            Ok(_) | Err(FieldError::Degenerate { .. }) => continue,
            Err(e) => {
                t.check(false, || format!("a={a}: {e}"));
                continue;
            }
        };
        let oracle = discriminant_via_dedekind(&ab, 3, &budget).map(|(d, _)| d);
        t.check(oracle.as_ref() == Ok(&field.discriminant), || {
            format!("a={a}: formula {} oracle {oracle:?}", field.discriminant)
        });
    }
    t.finish("cube-free 2 ≤ a ≤ 500")
}

/// `(n, r, l)` with `r | l n^(l-1)` and `n^l + r` not an l-th power:
/// 70 triples each for `l = 3, 5`, 60 for `l = 7`.
pub fn stender_grid() -> Vec<(u64, u64, u32)> {
    let mut out = Vec::new();
    for (l, want) in [(3u32, 70usize), (5, 70), (7, 60)] {
        let mut got = 0;
        'outer: for n in 1u64.. {
            for r in stender_divisors(n, l) {
                if StenderUnit::from_u64(n, r, l).is_ok() {
                    out.push((n, r, l));
                    got += 1;
                    if got == want {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

fn stender() -> CheckOutcome {
    let mut t = Tally::new("Stender units have norm exactly 1");
    let one = BigRational::one();
    for (n, r, l) in stender_grid() {
        let norm = stender_unit_norm(&BigUint::from(n), &BigUint::from(r), l);
        t.check(norm.as_ref() == Ok(&one), || format!("(n,r,l)=({n},{r},{l}): {norm:?}"));
    }
    t.finish("200 triples, l ∈ {3,5,7}")
}

fn lambda_suite() -> Vec<CheckOutcome> {
    let mut tri = Tally::new("λ(p) = 0 for p ≢ 1 (mod l), λ(p) ∈ {-1, l-1} for p ≡ 1 (mod l)");
    let mut zero = Tally::new("nonresidue partial sum is 0");
    let primes = primes_in(0, 10_000, None);
    for l in [3u32, 5, 7] {
        for a in 2u64..=50 {
            let ab = BigUint::from(a);
            if crate::arith::is_perfect_power(&ab, l) {
                continue;
            }
            for &p in &primes {
                let v = lambda(&ab, l, p);
                if v.class == LambdaClass::SkippedRamified {
                    continue;
                }
                let ok = if p % l as u64 == 1 {
                    v.value == -1 || v.value == l as i32 - 1
                } else {
                    v.value == 0
                };
                tri.check(ok, || format!("l={l} a={a} p={p} λ={}", v.value));
            }
            let s = nonresidue_partial_sum(&ab, l, 10_000);
            zero.check(s == 0.0, || format!("l={l} a={a} sum={s}"));
        }
    }
    let d = "l ∈ {3,5,7}, a ≤ 50, unramified p ≤ 10^4";
    vec![tri.finish(d), zero.finish(d)]
}

fn density() -> CheckOutcome {
    let mut t = Tally::new("split-complete fractions near 1/3 and 1/6");
    match split_density(&BigUint::from(2u32), 3, 100_000) {
        Ok(d) => {
            t.check((d.fraction_one_mod_l - 1.0 / 3.0).abs() <= 0.03, || {
                format!("fraction among p ≡ 1: {}", d.fraction_one_mod_l)
            });
            t.check((d.fraction_total - 1.0 / 6.0).abs() <= 0.03, || {
                format!("overall fraction: {}", d.fraction_total)
            });
            t.finish(format!(
                "a = 2, l = 3, X = 10^5: {:.4} and {:.4}",
                d.fraction_one_mod_l, d.fraction_total
            ))
        }
        Err(e) => {
            t.check(false, || e.to_string());
            t.finish("")
        }
    }
}

fn classnum() -> CheckOutcome {
    let mut t = Tally::new("h estimate for Q(2^(1/3)) within a factor 2 of 1");
    let field = make_pure_field(&BigUint::from(2u32), 3).expect("2 is cube-free");
    let proxy = log_L1_proxy(&field.radicand, 3, 100_000);
    let r = StenderUnit::from_u64(1, 1, 3)
        .and_then(|su| reduce_unit_rank1(&su))
        .map(|u| u.regulator);
    let h = r.map_err(|e| e.to_string()).and_then(|r| {
        h_estimate_l3(&field, &proxy, r).map_err(|e| e.to_string())
    });
    t.check(matches!(h, Ok(h) if (0.5..=2.0).contains(&h)), || format!("{h:?}"));
    t.finish(format!("X = 10^5, h ≈ {:.4}", h.unwrap_or(f64::NAN)))
}

fn ratios() -> Vec<CheckOutcome> {
    let mut landau = Tally::new("Landau ratio bounded (< 1) for a = n³ + 1");
    let mut logd = Tally::new("R̂/log D ≤ 3 for a = n³ + 1");
    let mut worst = 0f64;
    for n in 10u64..=100 {
        let su = match StenderUnit::from_u64(n, 1, 3) {
            Ok(su) => su,
            Err(e) => {
                landau.check(false, || format!("n={n}: {e}"));
                continue;
            }
        };
        let field = make_pure_field(&su.radicand(), 3);
        let r = reduce_unit_rank1(&su);
        match (field, r) {
            (Ok(f), Ok(u)) => match bound_ratios(&f.discriminant, 3, u.regulator) {
                Ok(b) => {
                    worst = worst.max(b.regulator_over_log_d);
                    landau.check(b.landau_ratio < 1.0, || format!("n={n}: {}", b.landau_ratio));
                    logd.check(b.regulator_over_log_d <= 3.0, || {
                        format!("n={n}: {}", b.regulator_over_log_d)
                    });
                }
                Err(e) => landau.check(false, || format!("n={n}: {e}")),
            },
            (f, r) => landau.check(false, || format!("n={n}: {f:?} {r:?}")),
        }
    }
    vec![
        landau.finish("n = 10..100"),
        logd.finish(format!("n = 10..100, max {worst:.4}")),
    ]
}

fn sieve() -> CheckOutcome {
    let mut t = Tally::new("staged and direct sieves agree");
    let configs: [(u32, u32, u64, Overrides); 4] = [
        (3, 1, 1_000_000, Overrides::default()),
        (3, 2, 1_000_000_000, Overrides { small_prime_ceiling: Some(2), symbol_prime_ceiling: Some(7), z: None }),
        (5, 1, 10u64.pow(15), Overrides::default()),
        (3, 3, 10u64.pow(12), Overrides { z: Some(BigUint::from(50u32)), ..Default::default() }),
    ];
    let budget = FactorBudget::default();
    for (l, k, x, o) in configs {
        let res = derive_params(l, k, 0.9, &BigUint::from(x), &o).and_then(|p| {
            let target = build_congruence_target(&p)?;
            let d = sieve_admissible(&target, &p, SieveMode::Direct, &budget, None)?;
            let s = sieve_admissible(&target, &p, SieveMode::Staged, &budget, None)?;
            Ok(d.admissible == s.admissible)
        });
        t.check(matches!(res, Ok(true)), || format!("(l,k,x)=({l},{k},{x}): {res:?}"));
    }
    t.finish("4 desk-scale configurations")
}

fn pipeline() -> Vec<CheckOutcome> {
    let cfg = RunConfig {
        small_prime_ceiling: Some(2),
        symbol_prime_ceiling: Some(7),
        proxy_cutoff: Some(1000),
        ..RunConfig::default()
    };
    let mut nonempty = Tally::new("construct yields admissible m");
    let mut bound = Tally::new("D_j · k^l ≥ Δ(m)");
    let mut symbols = Tally::new("symbol conditions re-verify");
    match run_construct(&cfg, None) {
        Ok(man) => {
            nonempty.check(!man.admissible.is_empty(), || "empty".into());
            let kl = BigUint::from(man.params.k).pow(man.params.l);
            for a in &man.admissible {
                for pj in &a.per_j {
                    bound.check(&pj.discriminant * &kl >= a.delta, || format!("m={} j={}", a.m, pj.j));
                }
            }
            match run_analyze(&man, &cfg) {
                Ok(an) => {
                    for c in &an.symbol_checks {
                        symbols.check(c.passed, || format!("m={} j={} p={}", c.m, c.j, c.p));
                    }
                    if an.symbol_checks.is_empty() {
                        symbols.check(true, String::new);
                    }
                }
                Err(e) => symbols.check(false, || e.to_string()),
            }
        }
        Err(e) => nonempty.check(false, || e.to_string()),
    }
    let d = "l = 3, k = 2, x = 10^9, ceilings (2, 7)";
    vec![nonempty.finish(d), bound.finish(d), symbols.finish(d)]
}
