use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sieve::small_primes;
use super::{mul_mod, pow_mod};

/// Miller-Rabin rounds used above 2^64. Bases are drawn uniformly from
/// `[2, n-2]` by a fixed-seed generator, so a composite survives with
/// probability at most 4^-48 and results are reproducible.
pub const MR_ROUNDS_ABOVE_U64: usize = 48;

// Deterministic for every n < 2^64 (Jaeschke / Sorenson-Webster).
const U64_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &U64_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &U64_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in small_primes().iter().take(168) {
        if (n % p).to_u64() == Some(0) {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let two = BigUint::from(2u32);
    let upper = n - &one; // exclusive bound → bases in [2, n-2]
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    'witness: for _ in 0..MR_ROUNDS_ABOVE_U64 {
        let a = rng.gen_biguint_range(&two, &upper);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(is_prime(&BigUint::from(2u32)));
        assert!(!is_prime(&BigUint::from(1u32)));
        assert!(!is_prime(&BigUint::from(0u32)));
        assert!(!is_prime(&BigUint::from(144u32)));
        assert!(is_prime_u64(157));
    }

    #[test]
    fn agrees_with_trial_division_below_10k() {
        for n in 0u64..10_000 {
            let naive = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), naive, "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // 3215031751 is a strong pseudoprime to bases 2,3,5,7.
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest prime < 2^64
    }

    #[test]
    fn beyond_u64() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_prime(&m127));
        let composite = &m127 * BigUint::from(18_446_744_073_709_551_557u64);
        assert!(!is_prime(&composite));
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert!(!is_prime(&(&m89 * &m89)));
    }
}
