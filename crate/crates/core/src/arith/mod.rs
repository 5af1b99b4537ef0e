//! Exact integer and modular arithmetic: primality, factorization, CRT and
//! l-th-power-free decomposition.
//!
//! Public entry points take `BigUint` because the radicands of the
//! construction (`(mP)^l + j`) outgrow fixed-width integers almost
//! immediately. Hot loops have `u64` fast paths underneath.

mod cache;
mod crt;
mod factor;
mod powerfree;
mod prime;
mod sieve;

pub use cache::FactorCache;
pub use crt::crt;
pub use factor::{factorize, factorize_u64, FactorBudget, Factorization};
pub use powerfree::{power_free_decompose, power_free_decompose_with, PowerFreeDecomposition};
pub use prime::{is_prime, is_prime_u64, MR_ROUNDS_ABOVE_U64};
pub use sieve::{prime_table, primes_in, small_primes};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("factorization of {n} exceeded the work budget of {budget} rho iterations")]
    BudgetExceeded { n: String, budget: u64 },
    #[error("moduli at positions {first} and {second} are not coprime ({m1} and {m2})")]
    NotCoprime {
        first: usize,
        second: usize,
        m1: String,
        m2: String,
    },
    #[error("residue {residue} is not reduced modulo {modulus}")]
    UnreducedResidue { residue: String, modulus: String },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{0} must be at least 1")]
    NonPositive(&'static str),
    #[error("malformed factor cache line {line}: {reason}")]
    CacheFormat { line: usize, reason: String },
    #[error("factor cache I/O: {0}")]
    Io(String),
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// `n mod p` for a big `n` and word-sized `p`.
pub fn big_mod_u64(n: &BigUint, p: u64) -> u64 {
    (n % p).to_u64().expect("remainder fits u64")
}

/// Exact integer l-th root if `n` is a perfect l-th power.
pub fn exact_root(n: &BigUint, l: u32) -> Option<BigUint> {
    if n.is_zero() {
        return Some(BigUint::zero());
    }
    let r = n.nth_root(l);
    if r.pow(l) == *n {
        Some(r)
    } else {
        None
    }
}

pub fn is_perfect_power(n: &BigUint, l: u32) -> bool {
    exact_root(n, l).is_some()
}

/// Natural logarithm of an arbitrarily large positive integer, as f64.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        if let Some(f) = n.to_f64() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Least common multiple of 1..=k.
pub fn lcm_up_to(k: u64) -> BigUint {
    use num_integer::Integer;
    (1..=k).fold(BigUint::from(1u32), |acc, j| acc.lcm(&BigUint::from(j)))
}
