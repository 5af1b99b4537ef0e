//! Runs of consecutive radicands `Δ(m)+1, ..., Δ(m)+k` with `Δ(m) = (mP)^l`,
//! `P = lcm(1..k)`.
//!
//! `Δ(m) + j = j·F_j(m)` with `F_j(m) = j^(l-1) (m P/j)^l + 1`, and `j` is
//! coprime to `F_j(m)`. An `m` is admissible when every `F_j(m)` is
//! l-th-power-free; then the l-th-power part of `Δ(m)+j` comes from `j`
//! alone and `D_j ≥ Δ(m)/k^l`.
//!
//! The congruence target `m0 (mod q)` keeps small primes away from every
//! `F_j(m)`: primes up to the small-prime ceiling get `m ≡ 0`; primes
//! `p ≡ 1 (mod l)` above it get the least `m0` making every
//! `(m0 P)^l + j` a nonzero l-th power residue.

mod sieve;

pub use sieve::{sieve_admissible, SieveMode, SieveOutcome, SieveStats};

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{crt, exact_root, is_prime_u64, lcm_up_to, primes_in, ArithError, Factorization};
use crate::purefield::FieldError;
use crate::symbols::{find_m0_mod_p, lemma_threshold, SymbolError};

pub const MANIFEST_SCHEMA: &str = "purefields.run-manifest/1";
pub const DEFAULT_Q_BITS_CAP: u64 = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructionError {
    #[error("l = {0} is not an odd prime")]
    BadDegree(u32),
    #[error("k must be at least 1")]
    BadWindow,
    #[error("epsilon = {0} is outside (0, 1)")]
    BadEpsilon(f64),
    #[error("x too small for (l, k) = ({l}, {k}): M = floor(x^(1/l)/P) = 0")]
    XTooSmall { l: u32, k: u32 },
    #[error("M = {0} exceeds the supported range (2^64)")]
    MTooLarge(String),
    #[error(
        "q has {bits} bits, above the cap of {cap}; lower the symbol-prime ceiling or raise the cap"
    )]
    QTooLarge { bits: u64, cap: u64 },
    #[error(
        "no lemma residue mod {p} although p ≥ threshold {threshold}; the existence guarantee failed"
    )]
    LemmaViolated { p: u64, threshold: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overrides {
    pub small_prime_ceiling: Option<u64>,
    pub symbol_prime_ceiling: Option<u64>,
    #[serde(default, with = "crate::bigserde::opt_biguint")]
    pub z: Option<BigUint>,
}

impl Overrides {
    pub fn any(&self) -> bool {
        self.small_prime_ceiling.is_some() || self.symbol_prime_ceiling.is_some() || self.z.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub l: u32,
    pub k: u32,
    pub epsilon: f64,
    #[serde(with = "crate::bigserde::biguint")]
    pub x: BigUint,
    /// `P = lcm(1..k)`.
    #[serde(with = "crate::bigserde::biguint")]
    pub period: BigUint,
    /// `M = floor(x^(1/l) / P)`.
    pub m_max: u64,
    pub small_prime_ceiling: u64,
    pub symbol_prime_ceiling: u64,
    #[serde(with = "crate::bigserde::biguint")]
    pub z: BigUint,
    pub overrides: Overrides,
    /// True when any ceiling was overridden.
    pub override_regime: bool,
    pub q_bits_cap: u64,
}

impl ConstructionParams {
    /// `P_j = P/j`.
    pub fn period_j(&self, j: u32) -> BigUint {
        &self.period / j
    }

    /// `Δ(m) = (mP)^l`.
    pub fn delta(&self, m: u64) -> BigUint {
        (BigUint::from(m) * &self.period).pow(self.l)
    }

    /// `j^(l-1) P_j^l`, so that `F_j(m) = c_j m^l + 1`.
    pub fn coefficient(&self, j: u32) -> BigUint {
        BigUint::from(j).pow(self.l - 1) * self.period_j(j).pow(self.l)
    }
}

pub fn derive_params(
    l: u32,
    k: u32,
    epsilon: f64,
    x: &BigUint,
    overrides: &Overrides,
) -> Result<ConstructionParams, ConstructionError> {
    if l < 3 || !is_prime_u64(l as u64) {
        return Err(ConstructionError::BadDegree(l));
    }
    if k == 0 {
        return Err(ConstructionError::BadWindow);
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ConstructionError::BadEpsilon(epsilon));
    }
    let period = lcm_up_to(k as u64);
    let m_big = x.nth_root(l) / &period;
    if m_big.is_zero() {
        return Err(ConstructionError::XTooSmall { l, k });
    }
    let m_max = m_big
        .to_u64()
        .ok_or_else(|| ConstructionError::MTooLarge(m_big.to_string()))?;
    let threshold = lemma_threshold(l, k).min(u64::MAX as u128) as u64;
    let small_prime_ceiling = overrides.small_prime_ceiling.unwrap_or(threshold);
    let log_m = (m_max as f64).ln();
    let symbol_prime_ceiling = overrides
        .symbol_prime_ceiling
        .unwrap_or_else(|| log_m.max(0.0).powf(epsilon).floor() as u64);
    let mut params = ConstructionParams {
        l,
        k,
        epsilon,
        x: x.clone(),
        period,
        m_max,
        small_prime_ceiling,
        symbol_prime_ceiling,
        z: BigUint::one(),
        overrides: overrides.clone(),
        override_regime: overrides.any(),
        q_bits_cap: DEFAULT_Q_BITS_CAP,
    };
    params.z = match &overrides.z {
        Some(z) => z.clone(),
        None => default_z(&q_of(&params), m_max, k, l),
    };
    Ok(params)
}

/// `∏` of the primes in `(k, symbol_prime_ceiling]`.
fn q_of(params: &ConstructionParams) -> BigUint {
    primes_in(params.k as u64, params.symbol_prime_ceiling, None)
        .into_iter()
        .fold(BigUint::one(), |acc, p| acc * p)
}

/// `q^l · ⌈(log M)^(k l²)⌉`.
fn default_z(q: &BigUint, m_max: u64, k: u32, l: u32) -> BigUint {
    let log_m = (m_max as f64).ln().max(0.0);
    let e = (k * l * l) as f64;
    let factor = match BigUint::from_f64(log_m.powf(e).ceil()) {
        Some(v) if log_m.powf(e).is_finite() => v,
        _ => BigUint::one() << ((e * log_m.log2()).ceil() as u64),
    };
    q.pow(l) * factor.max(BigUint::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `m ≡ 0 (mod p)`, which forces `F_j(m) ≡ 1`.
    ZeroClass,
    /// Least residue from the consecutive-residue search.
    LemmaSearch,
    /// The search found nothing below the existence threshold; `0` used.
    FallbackZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeResidue {
    pub residue: u64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceTarget {
    #[serde(with = "crate::bigserde::biguint")]
    pub m0: BigUint,
    #[serde(with = "crate::bigserde::biguint")]
    pub q: BigUint,
    pub per_prime: BTreeMap<u64, PrimeResidue>,
    pub warnings: Vec<String>,
}

impl CongruenceTarget {
    pub fn trivial() -> Self {
        Self {
            m0: BigUint::zero(),
            q: BigUint::one(),
            per_prime: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn lemma_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.per_prime
            .iter()
            .filter(|(_, r)| r.provenance == Provenance::LemmaSearch)
            .map(|(&p, _)| p)
    }
}

pub fn build_congruence_target(
    params: &ConstructionParams,
) -> Result<CongruenceTarget, ConstructionError> {
    let l = params.l;
    let k = params.k;
    let threshold = lemma_threshold(l, k);
    let period = BigInt::from_biguint(Sign::Plus, params.period.clone());
    let primes = primes_in(k as u64, params.symbol_prime_ceiling, None);
    let q_bits_estimate: f64 = primes.iter().map(|&p| (p as f64).log2()).sum();
    if q_bits_estimate > params.q_bits_cap as f64 + 1.0 {
        return Err(ConstructionError::QTooLarge {
            bits: q_bits_estimate.ceil() as u64,
            cap: params.q_bits_cap,
        });
    }
    let mut per_prime = BTreeMap::new();
    let mut warnings = Vec::new();
    for &p in &primes {
        let entry = if p <= params.small_prime_ceiling || p % l as u64 != 1 {
            PrimeResidue {
                residue: 0,
                provenance: Provenance::ZeroClass,
            }
        } else {
            match find_m0_mod_p(p, l, k, &period) {
                Ok(m0) => PrimeResidue {
                    residue: m0,
                    provenance: Provenance::LemmaSearch,
                },
                Err(SymbolError::NotFound { .. }) if (p as u128) < threshold => {
                    warnings.push(format!(
                        "no lemma residue mod {p} (below threshold {threshold}); using 0"
                    ));
                    PrimeResidue {
                        residue: 0,
                        provenance: Provenance::FallbackZero,
                    }
                }
                Err(SymbolError::NotFound { .. }) => {
                    return Err(ConstructionError::LemmaViolated {
                        p,
                        threshold: threshold.to_string(),
                    })
                }
                Err(e) => return Err(e.into()),
            }
        };
        per_prime.insert(p, entry);
    }
    let system: Vec<(BigUint, BigUint)> = per_prime
        .iter()
        .map(|(&p, r)| (BigUint::from(r.residue), BigUint::from(p)))
        .collect();
    let (m0, q) = crt(&system)?;
    if q.bits() > params.q_bits_cap {
        return Err(ConstructionError::QTooLarge {
            bits: q.bits(),
            cap: params.q_bits_cap,
        });
    }
    Ok(CongruenceTarget {
        m0,
        q,
        per_prime,
        warnings,
    })
}

/// `F_j(m) = j^(l-1) (m P_j)^l + 1`.
#[allow(non_snake_case)]
pub fn F(j: u32, m: u64, params: &ConstructionParams) -> BigUint {
    let inner = BigUint::from(m) * params.period_j(j);
    BigUint::from(j).pow(params.l - 1) * inner.pow(params.l) + 1u32
}

/// Largest `s` with `s^l | j`.
pub fn lth_power_part(j: u32, l: u32) -> u64 {
    let mut s = 1u64;
    for (p, e) in crate::arith::factorize_u64(j as u64) {
        s *= p.pow(e / l);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerJ {
    pub j: u32,
    #[serde(with = "crate::bigserde::biguint")]
    pub f_j: BigUint,
    /// l-th-power-free part of `Δ(m) + j`.
    #[serde(with = "crate::bigserde::biguint")]
    pub radicand: BigUint,
    /// `S_j` with `Δ(m) + j = S_j^l · radicand`.
    #[serde(with = "crate::bigserde::biguint")]
    pub stripped_power: BigUint,
    #[serde(with = "crate::bigserde::biguint")]
    pub discriminant: BigUint,
    /// Factorization of `Δ(m) + j`.
    pub factorization: Factorization,
    /// `D_j · k^l ≥ Δ(m)`.
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleM {
    pub m: u64,
    #[serde(with = "crate::bigserde::biguint")]
    pub delta: BigUint,
    pub per_j: Vec<PerJ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub m: u64,
    pub j: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub params: ConstructionParams,
    pub mode: SieveMode,
    pub target: CongruenceTarget,
    pub admissible: Vec<AdmissibleM>,
    pub gaps: Vec<Gap>,
    pub stats: SieveStats,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

/// Integer `l`-th root check used by stage (iv).
pub(crate) fn is_lth_power_gt1(n: &BigUint, l: u32) -> bool {
    !n.is_one() && exact_root(n, l).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l: u32, k: u32, x: u64, o: Overrides) -> ConstructionParams {
        derive_params(l, k, 0.9, &BigUint::from(x), &o).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let p = params(3, 4, 1_000_000_000, Overrides::default());
        assert_eq!(p.period, BigUint::from(12u32));
        let p = params(3, 1, 1_000_000_000, Overrides::default());
        assert_eq!(p.small_prime_ceiling, 144);
        let p = params(3, 2, 1_000_000_000, Overrides::default());
        assert_eq!(p.m_max, 500);
        assert_eq!(p.delta(2), BigUint::from(64u32));
        assert!(!p.override_regime);
        assert!(p.delta(p.m_max) <= p.x);
        // symbol ceiling floor((ln 500)^0.9) = 5; q = 3·5
        assert_eq!(p.symbol_prime_ceiling, 5);
        let q = BigUint::from(15u32);
        assert!(p.z >= q.pow(3));
    }

    #[test]
    fn parameter_errors() {
        let o = Overrides::default();
        let x = BigUint::from(1000u32);
        assert!(matches!(derive_params(3, 1, 1.5, &x, &o), Err(ConstructionError::BadEpsilon(_))));
        assert!(matches!(
            derive_params(3, 4, 0.5, &BigUint::from(100u32), &o),
            Err(ConstructionError::XTooSmall { .. })
        ));
        assert!(matches!(derive_params(4, 1, 0.5, &x, &o), Err(ConstructionError::BadDegree(4))));
        assert!(matches!(derive_params(3, 0, 0.5, &x, &o), Err(ConstructionError::BadWindow)));
    }

    #[test]
    fn f_identity() {
        let p = params(3, 2, 1_000_000_000, Overrides::default());
        assert_eq!(F(1, 3, &p), BigUint::from(217u32));
        assert_eq!(F(2, 3, &p), BigUint::from(109u32));
        assert_eq!(F(2, 5, &p), BigUint::from(501u32));
        for m in 1..50 {
            for j in 1..=2 {
                assert_eq!(F(j, m, &p) * j, p.delta(m) + j);
            }
        }
    }

    #[test]
    fn target_with_search_prime() {
        let o = Overrides {
            small_prime_ceiling: Some(144),
            symbol_prime_ceiling: Some(160),
            z: None,
        };
        let p = params(3, 1, 10u64.pow(18), o);
        let t = build_congruence_target(&p).unwrap();
        let lemma: Vec<u64> = t.lemma_primes().collect();
        assert_eq!(lemma, vec![151, 157]);
        let q: BigUint = primes_in(1, 160, None).into_iter().map(BigUint::from).product();
        assert_eq!(t.q, q);
        for (&pr, r) in &t.per_prime {
            assert_eq!(&t.m0 % pr, BigUint::from(r.residue));
        }
        assert!(t.m0 < t.q);
    }

    #[test]
    fn empty_symbol_range_is_all_zero() {
        let o = Overrides {
            small_prime_ceiling: Some(50),
            symbol_prime_ceiling: Some(50),
            z: None,
        };
        let p = params(3, 2, 10u64.pow(12), o);
        let t = build_congruence_target(&p).unwrap();
        assert!(t.per_prime.values().all(|r| r.provenance == Provenance::ZeroClass));
        assert!(t.m0.is_zero());
    }

    #[test]
    fn fallback_below_threshold() {
        let o = Overrides {
            small_prime_ceiling: Some(2),
            symbol_prime_ceiling: Some(7),
            z: None,
        };
        let p = params(3, 2, 1_000_000_000, o);
        let t = build_congruence_target(&p).unwrap();
        assert_eq!(t.per_prime[&7].provenance, Provenance::FallbackZero);
        assert_eq!(t.q, BigUint::from(105u32));
        assert_eq!(t.warnings.len(), 1);
    }

    #[test]
    fn q_cap() {
        let o = Overrides {
            small_prime_ceiling: Some(10),
            symbol_prime_ceiling: Some(100_000),
            z: Some(BigUint::from(10u32)),
        };
        let p = params(3, 1, 10u64.pow(18), o);
        assert!(matches!(build_congruence_target(&p), Err(ConstructionError::QTooLarge { .. })));
    }

    #[test]
    fn power_parts() {
        assert_eq!(lth_power_part(8, 3), 2);
        assert_eq!(lth_power_part(16, 3), 2);
        assert_eq!(lth_power_part(12, 3), 1);
        assert_eq!(lth_power_part(1, 3), 1);
    }
}
