//! l-th power residue symbols modulo primes `p ≡ 1 (mod l)`.
//!
//! Only the condition "symbol = 1" is convention-free; it is decided by
//! Euler's criterion `d^((p-1)/l) ≡ 1 (mod p)`. Nonzero classes are
//! labelled against the least primitive root `g` of `p`: `d` has class `c`
//! when `d^((p-1)/l) = g^(c(p-1)/l)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize_u64, is_prime_u64, mul_mod, pow_mod};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolError {
    #[error("p = {p} is not ≡ 1 (mod {l}); the {l}-th power residue symbol is trivial there")]
    NotOneModL { p: u64, l: u32 },
    #[error("{p} divides {d}; the symbol is undefined")]
    Divides { d: String, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} must exceed the window k + 1 = {}", k + 1)]
    WindowTooLarge { p: u64, k: u32 },
    #[error("no m0 mod {p} with (m0·P)^{l} + j an {l}-th power residue for j = 1..{k}")]
    NotFound { p: u64, l: u32, k: u32 },
    #[error("P = {period} is divisible by p = {p}")]
    PeriodShared { p: u64, period: String },
}

fn check_modulus(p: u64, l: u32) -> Result<(), SymbolError> {
    if !is_prime_u64(p) {
        return Err(SymbolError::NotPrime(p));
    }
    if p % l as u64 != 1 {
        return Err(SymbolError::NotOneModL { p, l });
    }
    Ok(())
}

fn reduce(d: &BigInt, p: u64) -> u64 {
    d.mod_floor(&BigInt::from(p)).to_u64().expect("reduced mod p")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCondition {
    pub p: u64,
    pub l: u32,
    /// 0 iff the residue is an l-th power.
    pub value_class: u32,
}

pub fn is_lth_power_residue(d: &BigInt, p: u64, l: u32) -> Result<bool, SymbolError> {
    check_modulus(p, l)?;
    let r = reduce(d, p);
    if r == 0 {
        return Err(SymbolError::Divides { d: d.to_string(), p });
    }
    Ok(pow_mod(r, (p - 1) / l as u64, p) == 1)
}

/// Least primitive root modulo a prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = factorize_u64(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primes have primitive roots")
}

pub fn residue_class(d: &BigInt, p: u64, l: u32) -> Result<ResidueCondition, SymbolError> {
    check_modulus(p, l)?;
    let r = reduce(d, p);
    if r == 0 {
        return Err(SymbolError::Divides { d: d.to_string(), p });
    }
    let e = (p - 1) / l as u64;
    let x = pow_mod(r, e, p);
    let zeta = pow_mod(primitive_root(p), e, p);
    let mut acc = 1u64;
    for c in 0..l {
        if acc == x {
            return Ok(ResidueCondition {
                p,
                l,
                value_class: c,
            });
        }
        acc = mul_mod(acc, zeta, p);
    }
    unreachable!("x is an l-th root of unity mod p")
}

/// Class labels `class[n]` for `n = 0..p`, with `class[0]` unused. Built by
/// walking powers of the primitive root, so O(p) per prime.
pub fn class_table(p: u64, l: u32) -> Result<Vec<u32>, SymbolError> {
    check_modulus(p, l)?;
    let g = primitive_root(p);
    let mut table = vec![u32::MAX; p as usize];
    let mut acc = 1u64;
    for i in 0..p - 1 {
        table[acc as usize] = (i % l as u64) as u32;
        acc = mul_mod(acc, g, p);
    }
    Ok(table)
}

/// `S = Σ_{n=1}^{p} χ(∏_j (n+j)^(r_j))`, kept as the multiplicity of each
/// root of unity `ζ^t` among the nonzero terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterSum {
    pub exponents: Vec<u32>,
    pub p: u64,
    pub l: u32,
    /// `counts[t]` = number of n with term `ζ^t`.
    pub counts: Vec<u64>,
    /// Terms killed because `p` divides some `n + j` with `r_j > 0`.
    pub vanishing: u64,
    pub re: f64,
    pub im: f64,
    /// `|S|²`; exact when `l = 3`, where it equals `A_0 - A_1` with
    /// `A_d = Σ_s c_s c_(s-d)`.
    pub norm_sq: f64,
    pub norm_sq_exact: Option<i128>,
    pub magnitude: f64,
}

impl CharacterSum {
    /// Window length `k` of the exponent tuple `(r_0, ..., r_k)`.
    pub fn k(&self) -> usize {
        self.exponents.len().saturating_sub(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&r| r % self.l == 0)
    }

    /// `|S| ≤ k√p`, decided exactly for `l = 3`.
    pub fn within_weil_bound(&self) -> bool {
        let k = self.k() as i128;
        match self.norm_sq_exact {
            Some(n) => n <= k * k * self.p as i128,
            None => self.norm_sq <= (k * k) as f64 * self.p as f64 * (1.0 + 1e-12),
        }
    }
}

pub fn character_sum(exponents: &[u32], p: u64, l: u32) -> Result<CharacterSum, SymbolError> {
    let table = class_table(p, l)?;
    let k = exponents.len().saturating_sub(1) as u64;
    if p <= k {
        return Err(SymbolError::WindowTooLarge { p, k: k as u32 });
    }
    let mut counts = vec![0u64; l as usize];
    let mut vanishing = 0u64;
    for n in 1..=p {
        let mut t = 0u64;
        let mut zero = false;
        for (j, &r) in exponents.iter().enumerate() {
            if r == 0 {
                continue;
            }
            let v = (n + j as u64) % p;
            if v == 0 {
                zero = true;
                break;
            }
            t += r as u64 * table[v as usize] as u64;
        }
        if zero {
            vanishing += 1;
        } else {
            counts[(t % l as u64) as usize] += 1;
        }
    }
    let lf = l as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (t, &c) in counts.iter().enumerate() {
        let ang = std::f64::consts::TAU * t as f64 / lf;
        re += c as f64 * ang.cos();
        im += c as f64 * ang.sin();
    }
    let li = l as usize;
    let auto = |d: usize| -> i128 {
        (0..li)
            .map(|s| counts[s] as i128 * counts[(s + li - d) % li] as i128)
            .sum()
    };
    let norm_sq_exact = (l == 3).then(|| auto(0) - auto(1));
    let norm_sq = match norm_sq_exact {
        Some(n) => n as f64,
        None => (0..li)
            .map(|d| auto(d) as f64 * (std::f64::consts::TAU * d as f64 / lf).cos())
            .sum(),
    };
    Ok(CharacterSum {
        exponents: exponents.to_vec(),
        p,
        l,
        counts,
        vanishing,
        re,
        im,
        norm_sq,
        norm_sq_exact,
        magnitude: norm_sq.max(0.0).sqrt(),
    })
}

/// Number of `n` in `1..=p-k-1` with `n, n+1, ..., n+k` all nonzero l-th
/// power residues mod `p`.
pub fn count_consecutive_residues(p: u64, l: u32, k: u32) -> Result<u64, SymbolError> {
    let table = class_table(p, l)?;
    if p <= k as u64 + 1 {
        return Err(SymbolError::WindowTooLarge { p, k });
    }
    let is_res: Vec<bool> = table.iter().map(|&c| c == 0).collect();
    let mut run = 0u64;
    let mut count = 0u64;
    for v in 1..p {
        if is_res[v as usize] {
            run += 1;
            if run > k as u64 {
                count += 1;
            }
        } else {
            run = 0;
        }
    }
    Ok(count)
}

/// Least `m0` in `1..p` such that `(m0·P)^l + j` is a nonzero l-th power
/// residue mod `p` for every `j = 1..=k`.
pub fn find_m0_mod_p(p: u64, l: u32, k: u32, period: &BigInt) -> Result<u64, SymbolError> {
    check_modulus(p, l)?;
    if p <= k as u64 {
        return Err(SymbolError::WindowTooLarge { p, k });
    }
    let pp = reduce(period, p);
    if pp == 0 {
        return Err(SymbolError::PeriodShared {
            p,
            period: period.to_string(),
        });
    }
    let e = (p - 1) / l as u64;
    for m0 in 1..p {
        let base = pow_mod(mul_mod(m0, pp, p), l as u64, p);
        let ok = (1..=k as u64).all(|j| {
            let v = (base + j) % p;
            v != 0 && pow_mod(v, e, p) == 1
        });
        if ok {
            return Ok(m0);
        }
    }
    Err(SymbolError::NotFound { p, l, k })
}

/// `l^(2k) (lk + 1)²`: above this, a suitable `m0` always exists.
pub fn lemma_threshold(l: u32, k: u32) -> u128 {
    let l = l as u128;
    let k = k as u128;
    l.pow(2 * k as u32) * (l * k + 1).pow(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn symbol_examples() {
        assert!(is_lth_power_residue(&b(6), 7, 3).unwrap());
        assert!(!is_lth_power_residue(&b(2), 7, 3).unwrap());
        assert!(is_lth_power_residue(&b(2), 31, 3).unwrap());
        assert!(is_lth_power_residue(&b(-1), 7, 3).unwrap());
        assert!(matches!(
            is_lth_power_residue(&b(2), 5, 3),
            Err(SymbolError::NotOneModL { .. })
        ));
        assert!(matches!(
            is_lth_power_residue(&b(14), 7, 3),
            Err(SymbolError::Divides { .. })
        ));
    }

    #[test]
    fn classes() {
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(31), 3);
        assert_eq!(residue_class(&b(6), 7, 3).unwrap().value_class, 0);
        // 3 is the primitive root: class 1.
        assert_eq!(residue_class(&b(3), 7, 3).unwrap().value_class, 1);
        assert_eq!(residue_class(&b(9), 7, 3).unwrap().value_class, 2);
        let t = class_table(13, 3).unwrap();
        for n in 1..13 {
            assert_eq!(t[n], residue_class(&b(n as i64), 13, 3).unwrap().value_class);
        }
    }

    #[test]
    fn sums() {
        let s = character_sum(&[0, 0], 13, 3).unwrap();
        assert_eq!(s.counts[0], 13);
        assert_eq!(s.norm_sq_exact, Some(169));
        let s = character_sum(&[1, 0], 13, 3).unwrap();
        assert_eq!(s.norm_sq_exact, Some(0));
        assert!(s.within_weil_bound());
        let s = character_sum(&[1, 1], 31, 3).unwrap();
        assert!(s.within_weil_bound());
        assert!((s.re * s.re + s.im * s.im - s.norm_sq).abs() < 1e-9);
    }

    #[test]
    fn consecutive_counts() {
        assert_eq!(count_consecutive_residues(7, 3, 1).unwrap(), 0);
        assert_eq!(count_consecutive_residues(31, 3, 1).unwrap(), 3);
        assert_eq!(count_consecutive_residues(13, 3, 1).unwrap(), 0);
    }

    #[test]
    fn m0_search() {
        assert_eq!(find_m0_mod_p(31, 3, 1, &b(1)).unwrap(), 1);
        assert!(matches!(
            find_m0_mod_p(7, 3, 1, &b(1)),
            Err(SymbolError::NotFound { .. })
        ));
        let m0 = find_m0_mod_p(157, 3, 1, &b(1)).unwrap();
        assert!((1..157).contains(&m0));
        assert_eq!(lemma_threshold(3, 1), 144);
        assert_eq!(lemma_threshold(3, 2), 81 * 49);
    }
}
