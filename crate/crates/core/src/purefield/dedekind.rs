//! Dedekind's criterion for `f = x^l - a` at a prime `p`, and a
//! discriminant computed prime by prime from it. Used as an independent
//! check of the closed-form discriminant.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{check_odd_prime, FieldError};
use crate::arith::{big_mod_u64, inv_mod, power_free_decompose_with, FactorBudget};
use crate::fpoly::{squarefree_kernel, FpPoly};

/// True iff `p` divides the index `[O_K : Z[θ]]` for `θ^l = a`.
///
/// With `f̄ = ḡ·h̄` where `ḡ` is the squarefree part of `f̄` over `F_p`,
/// put `F = (f - G·H)/p` for monic lifts `G, H`; then `p` divides the index
/// iff `gcd(F̄, ḡ, h̄)` is non-constant.
pub fn dedekind_index_check(a: &BigUint, l: u32, p: u64) -> bool {
    let fbar = FpPoly::binomial(p, l as usize, big_mod_u64(a, p));
    let g = squarefree_kernel(&fbar);
    let (h, rem) = fbar.div_rem(&g);
    debug_assert!(rem.is_zero());
    if h.degree() == Some(0) {
        // f̄ squarefree: Z[θ] is p-maximal.
        return false;
    }

    let lift = |poly: &FpPoly| -> Vec<BigInt> {
        poly.coeffs().iter().map(|&c| BigInt::from(c)).collect()
    };
    let (gl, hl) = (lift(&g), lift(&h));
    let mut diff = vec![BigInt::zero(); l as usize + 1];
    diff[0] = -BigInt::from_biguint(Sign::Plus, a.clone());
    diff[l as usize] += 1;
    for (i, gi) in gl.iter().enumerate() {
        for (j, hj) in hl.iter().enumerate() {
            diff[i + j] -= gi * hj;
        }
    }
    let pb = BigInt::from(p);
    let fcoeffs: Vec<u64> = diff
        .iter()
        .map(|c| {
            debug_assert!((c % &pb).is_zero());
            (c / &pb).mod_floor(&pb).to_u64().expect("reduced mod p")
        })
        .collect();
    let fp = FpPoly::new(p, &fcoeffs);
    let d = fp.gcd(&g).gcd(&h);
    d.degree().is_some_and(|deg| deg > 0)
}

/// Radicand `b` generating the same field with `v_p(b) = 1`, for `p | a`
/// with `a` l-th-power-free: `b = a^t / p^(e t - 1)` where `t ≡ e^(-1) (mod l)`.
pub(super) fn eisenstein_radicand(a: &BigUint, l: u32, p: u64) -> BigUint {
    let pb = BigUint::from(p);
    let mut e = 0u32;
    let mut rest = a.clone();
    while (&rest % &pb).is_zero() {
        rest /= &pb;
        e += 1;
    }
    debug_assert!(e > 0 && e < l);
    let t = inv_mod(e as u64, l as u64).expect("e is a unit mod l") as u32;
    a.pow(t) / pb.pow(e * t - 1)
}

/// `(|d_K|, v_l(|d_K|))` assembled prime by prime from Dedekind's
/// criterion, for any radicand whose prime factors fit in a word.
pub fn discriminant_via_dedekind(
    a: &BigUint,
    l: u32,
    budget: &FactorBudget,
) -> Result<(BigUint, u32), FieldError> {
    check_odd_prime(l)?;
    let dec = power_free_decompose_with(a, l, budget, None)?;
    let radicand = dec.free_part;
    if radicand <= BigUint::from(1u32) {
        return Err(FieldError::Degenerate {
            a: a.to_string(),
            l,
        });
    }
    let mut d = BigUint::from(1u32);
    let mut v_l = 0u32;
    for (r, _) in dec.free_factorization.entries() {
        let p = r.to_u64().ok_or_else(|| FieldError::OracleRange(r.to_string()))?;
        let b = eisenstein_radicand(&radicand, l, p);
        if dedekind_index_check(&b, l, p) {
            return Err(FieldError::OracleInconsistent {
                p,
                detail: "Eisenstein polynomial reported p | index".into(),
            });
        }
        // v_p(disc(x^l - b)) = v_p(l^l b^(l-1))
        let v = if p == l as u64 { 2 * l - 1 } else { l - 1 };
        if p == l as u64 {
            v_l = v;
        } else {
            d *= r.pow(v);
        }
    }
    if (&radicand % l).is_zero() {
        d *= BigUint::from(l).pow(v_l);
        return Ok((d, v_l));
    }
    // disc(x^l - a) has v_l = l; when l divides the index it divides it
    // exactly once, removing l².
    v_l = if dedekind_index_check(&radicand, l, l as u64) {
        l - 2
    } else {
        l
    };
    d *= BigUint::from(l).pow(v_l);
    Ok((d, v_l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(a: u32, l: u32) -> u64 {
        discriminant_via_dedekind(&BigUint::from(a), l, &FactorBudget::default())
            .unwrap()
            .0
            .to_u64()
            .unwrap()
    }

    #[test]
    fn known_values() {
        assert_eq!(disc(2, 3), 108);
        assert_eq!(disc(10, 3), 300);
        assert_eq!(disc(6, 3), 972);
        assert_eq!(disc(12, 3), 972);
        assert_eq!(disc(3, 3), 243);
        assert_eq!(disc(17, 3), 3 * 289);
    }

    #[test]
    fn index_check_cases() {
        // 10 ≡ 1 (mod 9): 3 divides the index of Z[10^(1/3)].
        assert!(dedekind_index_check(&BigUint::from(10u32), 3, 3));
        assert!(!dedekind_index_check(&BigUint::from(2u32), 3, 3));
        // Squarefree reduction at an unramified prime.
        assert!(!dedekind_index_check(&BigUint::from(2u32), 3, 5));
        // Eisenstein at 2.
        assert!(!dedekind_index_check(&BigUint::from(2u32), 3, 2));
        // x^3 - 4 at 2 is not Eisenstein but the field is Q(2^(1/3)), and
        // Z[4^(1/3)] has index 2.
        assert!(dedekind_index_check(&BigUint::from(4u32), 3, 2));
    }

    #[test]
    fn eisenstein_normalization() {
        assert_eq!(eisenstein_radicand(&BigUint::from(4u32), 3, 2), BigUint::from(2u32));
        assert_eq!(eisenstein_radicand(&BigUint::from(12u32), 3, 2), BigUint::from(18u32));
    }
}
