//! Prime coefficients `λ(p)` of `ζ_K/ζ` for `K = Q(a^(1/l))` and truncated
//! Euler-product proxies for `log L(1)`.
//!
//! At an unramified `p`, `λ(p)` is the number of degree-one primes above
//! `p` minus one, i.e. the number of roots of `x^l - a` in `F_p` minus one.
//! Primes dividing `l·a` are skipped.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::{big_mod_u64, primes_in};
use crate::fpoly::{count_distinct_roots, FpPoly};
use crate::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaClass {
    /// `l` roots: `p` splits completely, `λ = l - 1`.
    SplitComplete,
    /// One root, `λ = 0`.
    OneLinear,
    /// No root, `λ = -1`.
    NoLinear,
    /// Any other root count. Never produced for prime `l`; kept so a
    /// violation is reported rather than misfiled.
    Partial,
    SkippedRamified,
}

impl LambdaClass {
    pub fn label(&self) -> &'static str {
        match self {
            Self::SplitComplete => "split-complete",
            Self::OneLinear => "one-linear",
            Self::NoLinear => "no-linear",
            Self::Partial => "partial",
            Self::SkippedRamified => "skipped-ramified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaValue {
    pub p: u64,
    pub value: i32,
    pub class: LambdaClass,
}

impl LambdaValue {
    pub fn is_skipped(&self) -> bool {
        self.class == LambdaClass::SkippedRamified
    }
}

pub fn lambda(a: &BigUint, l: u32, p: u64) -> LambdaValue {
    lambda_mod(big_mod_u64(a, p), l, p)
}

fn lambda_mod(a_mod_p: u64, l: u32, p: u64) -> LambdaValue {
    if a_mod_p == 0 || p == l as u64 {
        return LambdaValue {
            p,
            value: 0,
            class: LambdaClass::SkippedRamified,
        };
    }
    let roots = count_distinct_roots(&FpPoly::binomial(p, l as usize, a_mod_p));
    let class = match roots {
        0 => LambdaClass::NoLinear,
        1 => LambdaClass::OneLinear,
        r if r == l as usize => LambdaClass::SplitComplete,
        _ => LambdaClass::Partial,
    };
    LambdaValue {
        p,
        value: roots as i32 - 1,
        class,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub split_complete: u64,
    pub one_linear: u64,
    pub no_linear: u64,
    pub partial: u64,
    pub skipped_ramified: u64,
}

impl Tallies {
    fn add(&mut self, c: LambdaClass) {
        match c {
            LambdaClass::SplitComplete => self.split_complete += 1,
            LambdaClass::OneLinear => self.one_linear += 1,
            LambdaClass::NoLinear => self.no_linear += 1,
            LambdaClass::Partial => self.partial += 1,
            LambdaClass::SkippedRamified => self.skipped_ramified += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.split_complete + self.one_linear + self.no_linear + self.partial + self.skipped_ramified
    }

    pub fn merge(&self, o: &Tallies) -> Tallies {
        Tallies {
            split_complete: self.split_complete + o.split_complete,
            one_linear: self.one_linear + o.one_linear,
            no_linear: self.no_linear + o.no_linear,
            partial: self.partial + o.partial,
            skipped_ramified: self.skipped_ramified + o.skipped_ramified,
        }
    }
}

/// `Σ λ(p)/p` over unramified primes `lo < p ≤ cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerProxy {
    #[serde(with = "crate::bigserde::biguint")]
    pub a: BigUint,
    pub l: u32,
    pub lo: u64,
    pub cutoff: u64,
    pub sum: f64,
    pub tallies: Tallies,
    /// Per-prime values, ascending in `p`. Dropped by [`EulerProxy::summary`].
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<LambdaValue>,
}

impl EulerProxy {
    /// Sum recomputed from the stored values.
    pub fn recompute(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| !v.is_skipped())
            .map(|v| v.value as f64 / v.p as f64)
            .sum()
    }

    pub fn summary(&self) -> EulerProxy {
        EulerProxy {
            values: Vec::new(),
            ..self.clone()
        }
    }

    /// `p,class,lambda,cumulative` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,class,lambda,cumulative\n");
        let mut acc = 0.0;
        for v in &self.values {
            if !v.is_skipped() {
                acc += v.value as f64 / v.p as f64;
            }
            let _ = writeln!(out, "{},{},{},{:.12}", v.p, v.class.label(), v.value, acc);
        }
        out
    }
}

#[allow(non_snake_case)]
pub fn log_L1_proxy(a: &BigUint, l: u32, cutoff: u64) -> EulerProxy {
    log_L1_proxy_range(a, l, 0, cutoff)
}

#[allow(non_snake_case)]
pub fn log_L1_proxy_range(a: &BigUint, l: u32, lo: u64, cutoff: u64) -> EulerProxy {
    let primes = primes_in(lo, cutoff, None);
    let values = par_map(&primes, |&p| lambda(a, l, p));
    let mut tallies = Tallies::default();
    let mut sum = 0.0;
    for v in &values {
        tallies.add(v.class);
        if !v.is_skipped() {
            sum += v.value as f64 / v.p as f64;
        }
    }
    EulerProxy {
        a: a.clone(),
        l,
        lo,
        cutoff,
        sum,
        tallies,
        values,
    }
}

/// `(log D)^ε`, the cutoff at which the proxy approximates `log L(1)`.
pub fn default_cutoff(discriminant: &BigUint, epsilon: f64) -> u64 {
    crate::arith::ln_big(discriminant).powf(epsilon).floor().max(2.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitDensity {
    pub cutoff: u64,
    /// Unramified primes `p ≡ 1 (mod l)` up to the cutoff.
    pub one_mod_l: u64,
    pub split_one_mod_l: u64,
    pub unramified: u64,
    pub split_total: u64,
    pub fraction_one_mod_l: f64,
    pub fraction_total: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LseriesError {
    #[error(
        "only {found} unramified primes ≡ 1 (mod {l}) up to {x}; need {required}, reached at X = {min_x}"
    )]
    TooFewPrimes {
        x: u64,
        l: u32,
        found: u64,
        required: u64,
        min_x: u64,
    },
}

pub const MIN_DENSITY_PRIMES: u64 = 100;

/// Empirical split-complete fractions; limits are `1/l` among `p ≡ 1 (mod l)`
/// and `1/(2l)` overall.
pub fn split_density(a: &BigUint, l: u32, cutoff: u64) -> Result<SplitDensity, LseriesError> {
    let proxy = log_L1_proxy(a, l, cutoff);
    let lm = l as u64;
    let mut d = SplitDensity {
        cutoff,
        one_mod_l: 0,
        split_one_mod_l: 0,
        unramified: 0,
        split_total: 0,
        fraction_one_mod_l: 0.0,
        fraction_total: 0.0,
    };
    for v in proxy.values.iter().filter(|v| !v.is_skipped()) {
        d.unramified += 1;
        let split = v.class == LambdaClass::SplitComplete;
        d.split_total += split as u64;
        if v.p % lm == 1 {
            d.one_mod_l += 1;
            d.split_one_mod_l += split as u64;
        }
    }
    if d.one_mod_l < MIN_DENSITY_PRIMES {
        return Err(LseriesError::TooFewPrimes {
            x: cutoff,
            l,
            found: d.one_mod_l,
            required: MIN_DENSITY_PRIMES,
            min_x: min_cutoff_for_density(a, l),
        });
    }
    d.fraction_one_mod_l = d.split_one_mod_l as f64 / d.one_mod_l as f64;
    d.fraction_total = d.split_total as f64 / d.unramified as f64;
    Ok(d)
}

fn min_cutoff_for_density(a: &BigUint, l: u32) -> u64 {
    let lm = l as u64;
    let mut found = 0;
    let mut hi = 1024u64;
    let mut lo = 0u64;
    loop {
        for p in primes_in(lo, hi, Some((1, lm))) {
            if big_mod_u64(a, p) != 0 {
                found += 1;
                if found == MIN_DENSITY_PRIMES {
                    return p;
                }
            }
        }
        lo = hi;
        hi *= 2;
    }
}

/// `Σ λ(p)/p` over unramified `p ≤ cutoff` with `p ≢ 1 (mod l)`.
pub fn nonresidue_partial_sum(a: &BigUint, l: u32, cutoff: u64) -> f64 {
    let primes: Vec<u64> = primes_in(0, cutoff, None)
        .into_iter()
        .filter(|&p| p % l as u64 != 1)
        .collect();
    let values = par_map(&primes, |&p| lambda(a, l, p));
    values
        .iter()
        .filter(|v| !v.is_skipped())
        .map(|v| v.value as f64 / v.p as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda(&b(2), 3, 5).value, 0);
        assert_eq!(lambda(&b(2), 3, 5).class, LambdaClass::OneLinear);
        let v = lambda(&b(2), 3, 31);
        assert_eq!((v.value, v.class), (2, LambdaClass::SplitComplete));
        let v = lambda(&b(2), 3, 7);
        assert_eq!((v.value, v.class), (-1, LambdaClass::NoLinear));
        assert!(lambda(&b(2), 3, 2).is_skipped());
        assert!(lambda(&b(2), 3, 3).is_skipped());
    }

    #[test]
    fn proxy_examples() {
        assert_eq!(log_L1_proxy(&b(2), 3, 4).sum, 0.0);
        assert_eq!(log_L1_proxy(&b(2), 3, 1).sum, 0.0);
        let px = log_L1_proxy(&b(2), 3, 100);
        assert!((px.sum - px.recompute()).abs() < 1e-15);
        assert!(px.values.iter().any(|v| v.p == 31 && v.value == 2));
        assert!(px.values.iter().any(|v| v.p == 7 && v.value == -1));
        assert_eq!(px.tallies.total(), 25);
        let csv = px.to_csv();
        assert!(csv.starts_with("p,class,lambda,cumulative\n2,skipped-ramified,0,"));
        assert_eq!(csv.lines().count(), 26);
    }

    #[test]
    fn density_needs_primes() {
        match split_density(&b(2), 3, 100) {
            Err(LseriesError::TooFewPrimes { min_x, .. }) => assert!(min_x > 100),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonresidue_sum_vanishes() {
        assert_eq!(nonresidue_partial_sum(&b(2), 3, 10_000), 0.0);
        assert_eq!(nonresidue_partial_sum(&b(10), 5, 10_000), 0.0);
        assert_eq!(nonresidue_partial_sum(&b(10), 5, 1), 0.0);
    }
}
