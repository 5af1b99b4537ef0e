//! Property suites. Each compares library output against a small
//! self-contained oracle written here.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use purefields::arith::{
    crt, factorize, factorize_u64, is_prime_u64, power_free_decompose, primes_in, FactorBudget,
};
use purefields::construction::{
    build_congruence_target, derive_params, sieve_admissible, Overrides, SieveMode, F,
};
use purefields::lseries::{lambda, log_L1_proxy, log_L1_proxy_range, LambdaClass};
use purefields::purefield::{
    discriminant_via_dedekind, make_pure_field, stender_divisors, stender_unit_norm,
    unit_log_vector, StenderUnit,
};
use purefields::symbols::{character_sum, count_consecutive_residues, is_lth_power_residue};

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut r, mut b) = (1u128, b as u128 % m as u128);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn prime_1_mod(l: u64) -> impl Strategy<Value = u64> {
    let ps = primes_in(0, 400, Some((1, l)));
    proptest::sample::select(ps)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_matches_trial_division(n in 1u64..2_000_000_000) {
        let f = factorize(&BigUint::from(n), &FactorBudget::default()).unwrap();
        let got: Vec<(u64, u32)> = f.entries().iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
        prop_assert_eq!(&got, &trial_factor(n));
        prop_assert_eq!(factorize_u64(n), got);
    }

    #[test]
    fn power_free_parts_reconstruct(n in 1u64..10_000_000, l in proptest::sample::select(vec![3u32, 5, 7])) {
        let d = power_free_decompose(&BigUint::from(n), l).unwrap();
        prop_assert_eq!(d.power_part.pow(l) * &d.free_part, BigUint::from(n));
        for (p, e) in trial_factor(d.free_part.to_u64().unwrap()) {
            prop_assert!(e < l, "{}^{} in free part", p, e);
        }
        // Maximality: the oracle's l-th power part agrees.
        let s: u64 = trial_factor(n).iter().map(|&(p, e)| p.pow(e / l)).product();
        prop_assert_eq!(d.power_part, BigUint::from(s));
    }

    #[test]
    fn crt_solution_satisfies_every_congruence(
        picks in proptest::collection::btree_set(0usize..40, 1..6),
        seed in any::<u64>(),
    ) {
        let primes = primes_in(0, 200, None);
        let pairs: Vec<(BigUint, BigUint)> = picks
            .iter()
            .map(|&i| {
                let p = primes[i];
                (BigUint::from(seed % p), BigUint::from(p))
            })
            .collect();
        let (r, m) = crt(&pairs).unwrap();
        let prod: BigUint = pairs.iter().map(|(_, m)| m.clone()).product();
        prop_assert_eq!(&m, &prod);
        prop_assert!(r < m);
        for (ri, mi) in &pairs {
            prop_assert_eq!(&(&r % mi), ri);
        }
    }

    #[test]
    fn discriminant_formula_agrees_with_dedekind(a in 2u64..100_000, l in proptest::sample::select(vec![3u32, 5, 7])) {
        let ab = BigUint::from(a);
        prop_assume!(!trial_factor(a).iter().all(|&(_, e)| e % l == 0));
        let field = make_pure_field(&ab, l).unwrap();
        let (d, _) = discriminant_via_dedekind(&ab, l, &FactorBudget::default()).unwrap();
        prop_assert_eq!(field.discriminant, d);
    }

    #[test]
    fn residue_symbol_matches_enumeration(p in prime_1_mod(3), d in 1u64..400) {
        prop_assume!(d % p != 0);
        let cubes: std::collections::BTreeSet<u64> = (1..p).map(|x| x * x % p * x % p).collect();
        prop_assert_eq!(
            is_lth_power_residue(&BigInt::from(d), p, 3).unwrap(),
            cubes.contains(&(d % p))
        );
    }

    #[test]
    fn weil_bound_on_random_tuples(p in prime_1_mod(3), r in proptest::collection::vec(0u32..3, 2..4)) {
        prop_assume!(r.iter().any(|&x| x != 0));
        let s = character_sum(&r, p, 3).unwrap();
        prop_assert!(s.within_weil_bound(), "{:?}", s);
        prop_assert_eq!(s.counts.iter().sum::<u64>() + s.vanishing, p);
        // Exact |S|² agrees with the floating evaluation of the sum.
        let n2 = s.re * s.re + s.im * s.im;
        prop_assert!((n2 - s.norm_sq).abs() < 1e-6 * (1.0 + n2));
    }

    #[test]
    fn consecutive_residue_count_matches_enumeration(p in prime_1_mod(3), k in 1u32..3) {
        let e = (p - 1) / 3;
        let is_res = |v: u64| v % p != 0 && pow_mod(v, e, p) == 1;
        let brute = (1..p - k as u64).filter(|&n| (0..=k as u64).all(|j| is_res(n + j))).count() as u64;
        prop_assert_eq!(count_consecutive_residues(p, 3, k).unwrap(), brute);
    }

    #[test]
    fn lambda_counts_roots(a in 2u64..1000, l in proptest::sample::select(vec![3u32, 5, 7]), i in 0usize..300) {
        let p = primes_in(0, 2000, None)[i];
        let v = lambda(&BigUint::from(a), l, p);
        if a % p == 0 || p == l as u64 {
            prop_assert_eq!(v.class, LambdaClass::SkippedRamified);
        } else {
            let roots = (0..p).filter(|&x| pow_mod(x, l as u64, p) == a % p).count() as i32;
            prop_assert_eq!(v.value, roots - 1);
        }
    }

    #[test]
    fn proxy_is_additive(a in 2u64..500, y in 10u64..3000, z in 10u64..3000) {
        let (lo, hi) = (y.min(z), y.max(z));
        let ab = BigUint::from(a);
        let whole = log_L1_proxy(&ab, 3, hi);
        let left = log_L1_proxy(&ab, 3, lo);
        let right = log_L1_proxy_range(&ab, 3, lo, hi);
        prop_assert!((whole.sum - left.sum - right.sum).abs() < 1e-12);
        prop_assert_eq!(whole.tallies, left.tallies.merge(&right.tallies));
    }

    #[test]
    fn stender_norm_is_one(n in 1u64..60, l in proptest::sample::select(vec![3u32, 5, 7]), pick in any::<usize>()) {
        let divs = stender_divisors(n, l);
        let r = divs[pick % divs.len()];
        prop_assume!(StenderUnit::from_u64(n, r, l).is_ok());
        let norm = stender_unit_norm(&BigUint::from(n), &BigUint::from(r), l).unwrap();
        prop_assert!(norm.is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unit_log_vectors_sum_to_zero(n in 1u64..40, l in proptest::sample::select(vec![3u32, 5])) {
        let su = StenderUnit::from_u64(n, 1, l).unwrap();
        let v = unit_log_vector(&su, 30).unwrap();
        prop_assert!(v.residual < 1e-20, "{}", v.residual);
        prop_assert_eq!(v.entries.len(), (l as usize + 1) / 2);
        let s: f64 = v.entries.iter().sum();
        prop_assert!(s.abs() < 1e-9 * (1.0 + v.entries[0].abs()));
    }

    #[test]
    fn sieve_output_is_admissible(k in 1u32..4, exp in 6u32..13, z in 1u64..200) {
        let o = Overrides { z: Some(BigUint::from(z)), ..Default::default() };
        let params = derive_params(3, k, 0.9, &BigUint::from(10u64).pow(exp), &o).unwrap();
        let target = build_congruence_target(&params).unwrap();
        let b = FactorBudget::default();
        let staged = sieve_admissible(&target, &params, SieveMode::Staged, &b, None).unwrap();
        let direct = sieve_admissible(&target, &params, SieveMode::Direct, &b, None).unwrap();
        prop_assert_eq!(&staged.admissible, &direct.admissible);
        let ms: Vec<u64> = staged.admissible.iter().map(|a| a.m).collect();
        for a in &staged.admissible {
            prop_assert!(BigUint::from(a.m) % &target.q == target.m0.clone() % &target.q);
            for pj in &a.per_j {
                let f = F(pj.j, a.m, &params);
                let fac = factorize(&f, &b).unwrap();
                prop_assert!(fac.is_power_free(3));
                prop_assert!(pj.bound_holds);
            }
        }
        // Everything skipped in the progression has some F_j with a cube factor.
        let q = target.q.to_u64().unwrap();
        let first = if target.m0.is_zero() { q } else { target.m0.to_u64().unwrap() };
        let mut m = first;
        while m <= params.m_max {
            if !ms.contains(&m) {
                let bad = (1..=k).any(|j| !factorize(&F(j, m, &params), &b).unwrap().is_power_free(3));
                prop_assert!(bad, "m = {} dropped without reason", m);
            }
            m += q;
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let o = Overrides {
        small_prime_ceiling: Some(2),
        symbol_prime_ceiling: Some(7),
        z: None,
    };
    let json = || {
        let params = derive_params(3, 2, 0.9, &BigUint::from(10u64).pow(9), &o).unwrap();
        let target = build_congruence_target(&params).unwrap();
        let out = sieve_admissible(&target, &params, SieveMode::Staged, &FactorBudget::default(), None)
            .unwrap();
        serde_json::to_string(&out).unwrap()
    };
    assert_eq!(json(), json());
}

#[test]
fn primes_in_progressions() {
    let ps = primes_in(0, 10_000, Some((1, 3)));
    assert!(ps.iter().all(|&p| p % 3 == 1 && is_prime_u64(p)));
    let brute = (2..=10_000u64).filter(|&n| n % 3 == 1 && is_prime_u64(n)).count();
    assert_eq!(ps.len(), brute);
}
