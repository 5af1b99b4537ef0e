use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::sieve::small_primes;
use super::{gcd_u64, is_prime, is_prime_u64, mul_mod, ArithError};

/// Work limit for a single factorization. Counted in Pollard-rho
/// iterations rather than wall time so that runs stay reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBudget {
    pub max_rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        Self {
            max_rho_iterations: 200_000_000,
        }
    }
}

impl FactorBudget {
    pub fn iterations(max_rho_iterations: u64) -> Self {
        Self { max_rho_iterations }
    }
}

/// Prime factorization of a positive integer, ascending by prime.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "crate::bigserde::vec_pairs")]
    entries: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Builds from arbitrary (prime, exponent) pairs, merging repeats.
    /// Callers guarantee primality of the keys.
    pub fn from_pairs<I: IntoIterator<Item = (BigUint, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<BigUint, u32> = BTreeMap::new();
        for (p, e) in pairs {
            if e > 0 {
                *map.entry(p).or_default() += e;
            }
        }
        Self {
            entries: map.into_iter().collect(),
        }
    }

    pub fn one() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(BigUint, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> BigUint {
        self.entries.iter().fold(BigUint::one(), |acc, (p, _)| acc * p)
    }

    pub fn exponent_of(&self, p: &BigUint) -> u32 {
        self.entries
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn max_exponent(&self) -> u32 {
        self.entries.iter().map(|(_, e)| *e).max().unwrap_or(0)
    }

    pub fn is_power_free(&self, l: u32) -> bool {
        self.entries.iter().all(|(_, e)| *e < l)
    }

    pub fn merge(&self, other: &Factorization) -> Factorization {
        Factorization::from_pairs(self.entries.iter().chain(other.entries.iter()).cloned())
    }

    /// `p1^e1,p2^e2,...` as used by the on-disk cache.
    pub fn to_csv_fields(&self) -> String {
        self.entries
            .iter()
            .map(|(p, e)| format!("{p}^{e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

struct Meter<'a> {
    used: AtomicU64,
    budget: &'a FactorBudget,
}

impl Meter<'_> {
    fn charge(&self, n: u64) -> bool {
        self.used.fetch_add(n, Ordering::Relaxed) + n <= self.budget.max_rho_iterations
    }
}

/// Factor `n >= 1`. Trial division by primes below 2^16, then Brent's
/// variant of Pollard rho on what remains.
pub fn factorize(n: &BigUint, budget: &FactorBudget) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::NonPositive("n"));
    }
    if let Some(small) = n.to_u64() {
        let pairs = factorize_u64_budgeted(small, budget)?;
        return Ok(Factorization {
            entries: pairs.into_iter().map(|(p, e)| (BigUint::from(p), e)).collect(),
        });
    }
    let meter = Meter {
        used: AtomicU64::new(0),
        budget,
    };
    let mut rest = n.clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            found.push((pb, e));
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for (p, e) in split_u64(small, &meter, n)? {
                found.push((BigUint::from(p), e));
            }
            continue;
        }
        if is_prime(&m) {
            found.push((m, 1));
            continue;
        }
        let d = rho_big(&m, &meter).ok_or_else(|| ArithError::BudgetExceeded {
            n: n.to_string(),
            budget: budget.max_rho_iterations,
        })?;
        let other = &m / &d;
        stack.push(d);
        stack.push(other);
    }
    Ok(Factorization::from_pairs(found))
}

/// Word-sized factorization with the default budget.
pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    factorize_u64_budgeted(n, &FactorBudget::default())
        .expect("u64 factorization stays far below the default budget")
}

fn factorize_u64_budgeted(n: u64, budget: &FactorBudget) -> Result<Vec<(u64, u32)>, ArithError> {
    if n == 0 {
        return Err(ArithError::NonPositive("n"));
    }
    let meter = Meter {
        used: AtomicU64::new(0),
        budget,
    };
    split_u64(n, &meter, &BigUint::from(n))
}

fn split_u64(n: u64, meter: &Meter<'_>, original: &BigUint) -> Result<Vec<(u64, u32)>, ArithError> {
    let mut rest = n;
    let mut map: BTreeMap<u64, u32> = BTreeMap::new();
    for &p in small_primes() {
        if p.saturating_mul(p) > rest {
            break;
        }
        while rest % p == 0 {
            rest /= p;
            *map.entry(p).or_default() += 1;
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *map.entry(m).or_default() += 1;
            continue;
        }
        let d = rho_u64(m, meter).ok_or_else(|| ArithError::BudgetExceeded {
            n: original.to_string(),
            budget: meter.budget.max_rho_iterations,
        })?;
        stack.push(d);
        stack.push(m / d);
    }
    Ok(map.into_iter().collect())
}

// Brent's cycle detection with batched gcds. Returns a nontrivial factor
// of composite `n`, or None when the budget runs out.
fn rho_u64(n: u64, meter: &Meter<'_>) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    const BATCH: u64 = 128;
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (y, y);
        let mut g = 1;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                if !meter.charge(steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    unreachable!()
}

fn rho_big(n: &BigUint, meter: &Meter<'_>) -> Option<BigUint> {
    let one = BigUint::one();
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    const BATCH: u64 = 128;
    for c in 1u64.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut y, mut r, mut q) = (BigUint::from(2u32), 1u64, one.clone());
        let (mut x, mut ys) = (y.clone(), y.clone());
        let mut g = one.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                let steps = BATCH.min(r - k);
                if !meter.charge(steps) {
                    return None;
                }
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += steps;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: u64) -> Vec<(u64, u32)> {
        factorize(&BigUint::from(n), &FactorBudget::default())
            .unwrap()
            .entries()
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(fac(108), vec![(2, 2), (3, 3)]);
        assert_eq!(fac(1), vec![]);
        assert_eq!(fac(13824), vec![(2, 9), (3, 3)]);
    }

    #[test]
    fn semiprimes_need_rho() {
        let p = 4_294_967_291u64; // largest prime < 2^32
        let q = 4_294_967_279u64;
        let n = BigUint::from(p) * BigUint::from(q);
        let f = factorize(&n, &FactorBudget::default()).unwrap();
        assert_eq!(f.entries().len(), 2);
        assert_eq!(f.value(), n);
    }

    #[test]
    fn beyond_u64_with_square_factor() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64);
        let r = BigUint::from(2_305_843_009_213_693_951u64); // 2^61 - 1
        let n = &p * &p * &q * &r;
        let f = factorize(&n, &FactorBudget::default()).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.exponent_of(&p), 2);
        assert_eq!(f.exponent_of(&r), 1);
        assert!(f.entries().iter().all(|(p, _)| is_prime(p)));
    }

    #[test]
    fn budget_is_enforced() {
        let n = BigUint::from(4_294_967_291u64) * BigUint::from(4_294_967_279u64);
        let err = factorize(&n, &FactorBudget::iterations(10)).unwrap_err();
        assert!(matches!(err, ArithError::BudgetExceeded { .. }));
    }

    #[test]
    fn zero_is_rejected() {
        assert!(factorize(&BigUint::zero(), &FactorBudget::default()).is_err());
    }

    #[test]
    fn display_and_csv() {
        let f = factorize(&BigUint::from(108u32), &FactorBudget::default()).unwrap();
        assert_eq!(f.to_string(), "2^2 * 3^3");
        assert_eq!(f.to_csv_fields(), "2^2,3^3");
        assert_eq!(f.radical(), BigUint::from(6u32));
    }
}
