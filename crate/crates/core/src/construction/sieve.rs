//! Power-free sieve over the progression `m ≡ m0 (mod q)`, `1 ≤ m ≤ M`.
//!
//! Staged mode:
//! 1. every `p | q` is checked once to divide no `F_j(m)` (a failure is an
//!    invariant violation, not a filter);
//! 2. for primes `p` in `(symbol ceiling, C]` the roots of `F_j(m) ≡ 0
//!    (mod p^l)` are lifted from `F_p` and every progression index hitting
//!    one is struck out;
//! 3. survivors still have to exclude `p^l | F_j(m)` with `p > C`; writing
//!    `F_j(m) = p^l·t` gives `t ≤ F_j(m)/(C+1)^l`, so small cofactors are
//!    enumerated directly and large ones fall back to factoring.
//!
//! Direct mode factors every `F_j(m)`. Both modes finish by factoring the
//! kept values to fill in the discriminant data.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{
    is_lth_power_gt1, lth_power_part, AdmissibleM, CongruenceTarget, ConstructionError,
    ConstructionParams, Gap, PerJ, F,
};
use crate::arith::{
    big_mod_u64, factorize_u64, inv_mod, mul_mod, pow_mod, primes_in, FactorBudget, FactorCache,
    Factorization,
};
use crate::fpoly::nth_roots_mod;
use crate::par_map;
use crate::purefield::{pure_field_from_factorization, FieldOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SieveMode {
    Staged,
    Direct,
}

impl std::str::FromStr for SieveMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "staged" => Ok(Self::Staged),
            "direct" => Ok(Self::Direct),
            other => Err(format!("unknown sieve mode {other:?} (staged|direct)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveStats {
    pub progression_len: u64,
    /// `C`: primes up to here are sieved by roots mod `p^l`.
    pub sieve_prime_bound: u64,
    pub sieve_primes: u64,
    pub rejected_by_prime_powers: u64,
    pub tail_checks: u64,
    pub rejected_in_tail: u64,
    pub tail_factor_fallbacks: u64,
    pub rejected_direct: u64,
    pub kept: u64,
    pub gaps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveOutcome {
    pub admissible: Vec<AdmissibleM>,
    pub gaps: Vec<Gap>,
    pub stats: SieveStats,
}

/// Progressions longer than this are refused.
pub const MAX_PROGRESSION: u64 = 1 << 30;
/// Upper limit on the root-sieved prime range.
pub const MAX_SIEVE_PRIME: u64 = 1 << 27;
/// Cofactor enumeration limit in the tail stage before factoring instead.
pub const TAIL_ENUMERATION_LIMIT: u64 = 100_000;

struct Progression {
    first: u64,
    step: u64,
    len: u64,
}

impl Progression {
    fn new(target: &CongruenceTarget, m_max: u64) -> Result<Self, ConstructionError> {
        let first = if target.m0.is_zero() { target.q.clone() } else { target.m0.clone() };
        let (first, step, len) = match first.to_u64() {
            Some(f) if f <= m_max => match target.q.to_u64() {
                Some(q) if q <= m_max => (f, q, (m_max - f) / q + 1),
                _ => (f, 1, 1),
            },
            _ => (0, 1, 0),
        };
        if len > MAX_PROGRESSION {
            return Err(ConstructionError::Invariant(format!(
                "progression of {len} terms exceeds {MAX_PROGRESSION}"
            )));
        }
        Ok(Self { first, step, len })
    }

    fn at(&self, t: u64) -> u64 {
        self.first + t * self.step
    }
}

pub fn sieve_admissible(
    target: &CongruenceTarget,
    params: &ConstructionParams,
    mode: SieveMode,
    budget: &FactorBudget,
    cache: Option<&FactorCache>,
) -> Result<SieveOutcome, ConstructionError> {
    let prog = Progression::new(target, params.m_max)?;
    let mut stats = SieveStats {
        progression_len: prog.len,
        ..Default::default()
    };
    check_shield(target, params)?;
    let ms: Vec<u64> = (0..prog.len).map(|t| prog.at(t)).collect();
    let factor = |n: &BigUint| match cache {
        Some(c) => c.factorize(n, budget),
        None => crate::arith::factorize(n, budget),
    };

    // (m, per-j factorizations of F_j(m)) for kept m; gaps for the rest.
    let mut gaps = Vec::new();
    let kept: Vec<(u64, Vec<Factorization>)> = match mode {
        SieveMode::Direct => {
            let results = par_map(&ms, |&m| {
                let mut facs = Vec::with_capacity(params.k as usize);
                for j in 1..=params.k {
                    match factor(&F(j, m, params)) {
                        Ok(f) if f.is_power_free(params.l) => facs.push(f),
                        Ok(_) => return Ok(None),
                        Err(e) => return Err(Gap { m, j, reason: e.to_string() }),
                    }
                }
                Ok(Some((m, facs)))
            });
            let mut out = Vec::new();
            for r in results {
                match r {
                    Ok(Some(v)) => out.push(v),
                    Ok(None) => stats.rejected_direct += 1,
                    Err(g) => gaps.push(g),
                }
            }
            out
        }
        SieveMode::Staged => {
            let struck = strike_prime_powers(&prog, params, &mut stats);
            let survivors: Vec<u64> = (0..prog.len)
                .filter(|&t| !struck[t as usize])
                .map(|t| prog.at(t))
                .collect();
            let c = stats.sieve_prime_bound;
            let results = par_map(&survivors, |&m| tail_check(m, c, params, &factor));
            let mut out = Vec::new();
            for r in results {
                stats.tail_checks += r.checks;
                stats.tail_factor_fallbacks += r.fallbacks;
                match r.verdict {
                    Tail::Keep => out.push(r.m),
                    Tail::Reject => stats.rejected_in_tail += 1,
                    Tail::Gap(g) => gaps.push(g),
                }
            }
            // Survivors are factored once more for their field data; a
            // factorization with an l-th power here means the sieve is wrong.
            let facs = par_map(&out, |&m| {
                let mut facs = Vec::with_capacity(params.k as usize);
                for j in 1..=params.k {
                    match factor(&F(j, m, params)) {
                        Ok(f) => facs.push(f),
                        Err(e) => return Err(Gap { m, j, reason: e.to_string() }),
                    }
                }
                Ok((m, facs))
            });
            let mut kept = Vec::new();
            for r in facs {
                match r {
                    Ok((m, f)) => {
                        if let Some(bad) = f.iter().position(|x| !x.is_power_free(params.l)) {
                            return Err(ConstructionError::Invariant(format!(
                                "staged sieve kept m = {m} but F_{}(m) = {} is not {}-th-power-free",
                                bad + 1,
                                f[bad],
                                params.l
                            )));
                        }
                        kept.push((m, f));
                    }
                    Err(g) => gaps.push(g),
                }
            }
            kept
        }
    };

    let assembled = par_map(&kept, |(m, facs)| assemble(*m, facs, params, budget));
    let mut admissible = Vec::with_capacity(assembled.len());
    for a in assembled {
        admissible.push(a?);
    }
    admissible.sort_by_key(|a| a.m);
    gaps.sort_by_key(|g| (g.m, g.j));
    stats.kept = admissible.len() as u64;
    stats.gaps = gaps.len() as u64;
    Ok(SieveOutcome {
        admissible,
        gaps,
        stats,
    })
}

/// Stage 1: `F_j(m) mod p` depends only on `m0 mod p`.
fn check_shield(target: &CongruenceTarget, params: &ConstructionParams) -> Result<(), ConstructionError> {
    for (&p, r) in &target.per_prime {
        for j in 1..=params.k {
            let c = big_mod_u64(&params.coefficient(j), p);
            let v = (mul_mod(c, pow_mod(r.residue, params.l as u64, p), p) + 1) % p;
            if v == 0 {
                return Err(ConstructionError::Invariant(format!(
                    "p = {p} divides F_{j}(m) for m ≡ {} (mod {p})",
                    r.residue
                )));
            }
        }
    }
    Ok(())
}

/// Root-sieving work is kept proportional to the number of candidates; the
/// tail stage covers whatever lies above the bound.
pub const SIEVE_PRIMES_PER_CANDIDATE: u64 = 64;
pub const MIN_SIEVE_PRIME_BOUND: u64 = 10_000;

fn sieve_bound(params: &ConstructionParams, candidates: u64) -> u64 {
    // max F_j(m) = (MP)^l + 1 at j = 1, so any p with p^l | F_j(m) is ≤ MP.
    let b = BigUint::from(params.m_max) * &params.period;
    let z = &params.z;
    let zroot = z.nth_root(params.l).max(BigUint::one());
    let stage3 = BigUint::from(2u32) * &b / zroot;
    let c = z.max(&stage3).min(&b).clone();
    let work = candidates
        .saturating_mul(params.k as u64)
        .saturating_mul(SIEVE_PRIMES_PER_CANDIDATE)
        .max(MIN_SIEVE_PRIME_BOUND);
    c.to_u64().unwrap_or(u64::MAX).min(MAX_SIEVE_PRIME).min(work)
}

/// Stages 2 and 3: strike indices `t` with `p^l | F_j(first + t·step)`.
fn strike_prime_powers(prog: &Progression, params: &ConstructionParams, stats: &mut SieveStats) -> Vec<bool> {
    let c = sieve_bound(params, prog.len);
    stats.sieve_prime_bound = c;
    let mut struck = vec![false; prog.len as usize];
    if prog.len == 0 {
        return struck;
    }
    let lo = params.symbol_prime_ceiling.max(1);
    let primes = primes_in(lo, c, None);
    stats.sieve_primes = primes.len() as u64;
    let coeffs: Vec<BigUint> = (1..=params.k).map(|j| params.coefficient(j)).collect();
    let chunks: Vec<&[u64]> = primes.chunks(256).collect();
    let hits = par_map(&chunks, |chunk| {
        let mut out = Vec::new();
        for &p in chunk.iter() {
            for cj in &coeffs {
                for root in roots_mod_prime_power(cj, params.l, p) {
                    progression_hits(prog, &root, p, params.l, &mut out);
                }
            }
        }
        out
    });
    for t in hits.into_iter().flatten() {
        struck[t as usize] = true;
    }
    stats.rejected_by_prime_powers = struck.iter().filter(|&&s| s).count() as u64;
    struck
}

/// Roots of `c·m^l + 1 ≡ 0 (mod p^l)`.
pub(crate) fn roots_mod_prime_power(c: &BigUint, l: u32, p: u64) -> Vec<BigUint> {
    let cp = big_mod_u64(c, p);
    if cp == 0 {
        return Vec::new();
    }
    let a = (p - inv_mod(cp, p).expect("p prime, p ∤ c")) % p;
    let base = nth_roots_mod(a, l, p);
    let pb = BigUint::from(p);
    let f = |m: &BigUint, modulus: &BigUint| (c * m.modpow(&BigUint::from(l), modulus) + 1u32) % modulus;
    if p % l as u64 != 0 && p != l as u64 {
        // Simple roots: f'(m) = l c m^(l-1) is a unit mod p.
        let mut out = Vec::with_capacity(base.len());
        for r in base {
            let mut m = BigUint::from(r);
            let mut pk = pb.clone();
            let deriv = mul_mod(
                mul_mod(l as u64 % p, cp, p),
                pow_mod(r, l as u64 - 1, p),
                p,
            );
            let neg_inv = (p - inv_mod(deriv, p).expect("simple root")) % p;
            for _ in 1..l {
                let next = &pk * &pb;
                let val = f(&m, &next) / &pk;
                let t = big_mod_u64(&(val * neg_inv), p);
                m += &pk * t;
                pk = next;
            }
            out.push(m);
        }
        out
    } else {
        // p = l: lift level by level over all p candidates.
        let mut roots: Vec<BigUint> = base.into_iter().map(BigUint::from).collect();
        let mut pk = pb.clone();
        for _ in 1..l {
            let next = &pk * &pb;
            let mut lifted = Vec::new();
            for r in &roots {
                for t in 0..p {
                    let cand = r + &pk * t;
                    if f(&cand, &next).is_zero() {
                        lifted.push(cand);
                    }
                }
            }
            roots = lifted;
            pk = next;
        }
        roots
    }
}

fn progression_hits(prog: &Progression, root: &BigUint, p: u64, l: u32, out: &mut Vec<u64>) {
    let modulus = BigUint::from(p).pow(l);
    let md = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let step = BigInt::from(prog.step);
    let Some(inv) = mod_inverse(&step, &md) else {
        return;
    };
    let diff = BigInt::from_biguint(Sign::Plus, root.clone()) - BigInt::from(prog.first);
    let t0 = (diff * inv).mod_floor(&md);
    let Some(t0) = t0.to_u64() else { return };
    let Some(period) = modulus.to_u64() else {
        if t0 < prog.len {
            out.push(t0);
        }
        return;
    };
    let mut t = t0;
    while t < prog.len {
        out.push(t);
        t = match t.checked_add(period) {
            Some(v) => v,
            None => break,
        };
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

enum Tail {
    Keep,
    Reject,
    Gap(Gap),
}

struct TailResult {
    m: u64,
    verdict: Tail,
    checks: u64,
    fallbacks: u64,
}

/// Stage 4: no prime above `c` appears to the l-th power in any `F_j(m)`.
fn tail_check<E: std::fmt::Display>(
    m: u64,
    c: u64,
    params: &ConstructionParams,
    factor: &(dyn Fn(&BigUint) -> Result<Factorization, E> + Sync),
) -> TailResult {
    let mut res = TailResult {
        m,
        verdict: Tail::Keep,
        checks: 0,
        fallbacks: 0,
    };
    let c1 = BigUint::from(c + 1).pow(params.l);
    for j in 1..=params.k {
        let f = F(j, m, params);
        let tmax = &f / &c1;
        if tmax.is_zero() {
            continue;
        }
        res.checks += 1;
        match tmax.to_u64().filter(|&t| t <= TAIL_ENUMERATION_LIMIT) {
            Some(tmax) => {
                for t in 1..=tmax {
                    let (q, r) = f.div_rem(&BigUint::from(t));
                    if r.is_zero() && is_lth_power_gt1(&q, params.l) {
                        res.verdict = Tail::Reject;
                        return res;
                    }
                }
            }
            None => {
                res.fallbacks += 1;
                match factor(&f) {
                    Ok(fac) if fac.is_power_free(params.l) => {}
                    Ok(_) => {
                        res.verdict = Tail::Reject;
                        return res;
                    }
                    Err(e) => {
                        res.verdict = Tail::Gap(Gap {
                            m,
                            j,
                            reason: e.to_string(),
                        });
                        return res;
                    }
                }
            }
        }
    }
    res
}

fn assemble(
    m: u64,
    facs: &[Factorization],
    params: &ConstructionParams,
    budget: &FactorBudget,
) -> Result<AdmissibleM, ConstructionError> {
    let delta = params.delta(m);
    let kl = BigUint::from(params.k).pow(params.l);
    let opts = FieldOptions {
        validate: true,
        budget: *budget,
    };
    let mut per_j = Vec::with_capacity(facs.len());
    for (idx, f_fac) in facs.iter().enumerate() {
        let j = idx as u32 + 1;
        let j_fac = Factorization::from_pairs(
            factorize_u64(j as u64)
                .into_iter()
                .map(|(p, e)| (BigUint::from(p), e)),
        );
        let fac = j_fac.merge(f_fac);
        let value = &delta + j;
        if fac.value() != value {
            return Err(ConstructionError::Invariant(format!(
                "j·F_{j}({m}) ≠ Δ({m}) + {j}"
            )));
        }
        let field = pure_field_from_factorization(&value, &fac, params.l, &opts)?;
        let s_j = BigUint::from(lth_power_part(j, params.l));
        if field.stripped_power != s_j {
            return Err(ConstructionError::Invariant(format!(
                "S_{j} = {} but the l-th-power part of {j} is {s_j} (m = {m})",
                field.stripped_power
            )));
        }
        per_j.push(PerJ {
            j,
            f_j: f_fac.value(),
            bound_holds: &field.discriminant * &kl >= delta,
            radicand: field.radicand,
            stripped_power: field.stripped_power,
            discriminant: field.discriminant,
            factorization: fac,
        });
    }
    Ok(AdmissibleM { m, delta, per_j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_congruence_target, derive_params, Overrides};

    fn p13(k: u32, x: u64, o: Overrides) -> ConstructionParams {
        derive_params(3, k, 0.9, &BigUint::from(x), &o).unwrap()
    }

    #[test]
    fn trivial_target_direct() {
        // M = 10 with P = 1: F = m³ + 1; 344 = 2³·43 and 513 = 3³·19 drop out.
        let params = p13(1, 1000, Overrides::default());
        assert_eq!(params.m_max, 10);
        let out = sieve_admissible(
            &CongruenceTarget::trivial(),
            &params,
            SieveMode::Direct,
            &FactorBudget::default(),
            None,
        )
        .unwrap();
        let ms: Vec<u64> = out.admissible.iter().map(|a| a.m).collect();
        assert_eq!(ms, vec![1, 2, 3, 4, 5, 6, 9, 10]);
        assert!(out.admissible.iter().all(|a| a.per_j.iter().all(|p| p.bound_holds)));
    }

    #[test]
    fn modes_agree_on_small_runs() {
        for (k, x, o) in [
            (1, 1000u64, Overrides::default()),
            (1, 10u64.pow(12), Overrides { z: Some(BigUint::from(5u32)), ..Default::default() }),
            (2, 10u64.pow(12), Overrides::default()),
            (
                2,
                10u64.pow(9),
                Overrides {
                    small_prime_ceiling: Some(2),
                    symbol_prime_ceiling: Some(7),
                    z: None,
                },
            ),
            (3, 10u64.pow(15), Overrides { z: Some(BigUint::from(100u32)), ..Default::default() }),
        ] {
            let params = p13(k, x, o);
            let target = build_congruence_target(&params).unwrap();
            let b = FactorBudget::default();
            let d = sieve_admissible(&target, &params, SieveMode::Direct, &b, None).unwrap();
            let s = sieve_admissible(&target, &params, SieveMode::Staged, &b, None).unwrap();
            assert_eq!(d.admissible, s.admissible, "k = {k}, x = {x}");
            assert!(d.gaps.is_empty() && s.gaps.is_empty());
        }
    }

    #[test]
    fn lifted_roots() {
        for (c, p) in [(1u32, 7u64), (1, 3), (8, 5), (4, 3), (27, 13), (1, 19)] {
            let c = BigUint::from(c);
            let pl = p.pow(3);
            let brute: Vec<u64> = (0..pl)
                .filter(|&m| (&c * BigUint::from(m).pow(3) + 1u32) % pl == BigUint::zero())
                .collect();
            let mut got: Vec<u64> = roots_mod_prime_power(&c, 3, p)
                .into_iter()
                .map(|r| r.to_u64().unwrap())
                .collect();
            got.sort_unstable();
            assert_eq!(got, brute, "c = {c}, p = {p}");
        }
    }
}
