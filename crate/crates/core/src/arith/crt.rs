use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ArithError;

/// Combine `x ≡ r_i (mod m_i)` for pairwise coprime moduli into a single
/// class `(r, ∏ m_i)` with `0 <= r < ∏ m_i`. The empty system is `(0, 1)`.
pub fn crt(pairs: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint), ArithError> {
    for (r, m) in pairs {
        if m.is_zero() {
            return Err(ArithError::ZeroModulus);
        }
        if r >= m {
            return Err(ArithError::UnreducedResidue {
                residue: r.to_string(),
                modulus: m.to_string(),
            });
        }
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if !pairs[i].1.gcd(&pairs[j].1).is_one() {
                return Err(ArithError::NotCoprime {
                    first: i,
                    second: j,
                    m1: pairs[i].1.to_string(),
                    m2: pairs[j].1.to_string(),
                });
            }
        }
    }
    let mut acc_r = BigUint::zero();
    let mut acc_m = BigUint::one();
    for (r, m) in pairs {
        // acc_r + acc_m * t ≡ r (mod m)  →  t = (r - acc_r) * acc_m^{-1} mod m
        let inv = mod_inverse(&(&acc_m % m), m).expect("coprimality checked above");
        let diff = (BigInt::from(r.clone()) - BigInt::from(acc_r.clone())).mod_floor(&BigInt::from(m.clone()));
        let t = (diff.to_biguint().expect("non-negative") * inv) % m;
        acc_r += &acc_m * t;
        acc_m *= m;
    }
    Ok((acc_r, acc_m))
}

pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let m_int = BigInt::from(m.clone());
    let e = BigInt::from(a.clone()).extended_gcd(&m_int);
    if !e.gcd.is_one() {
        return if m.is_one() { Some(BigUint::zero()) } else { None };
    }
    let x = e.x.mod_floor(&m_int);
    match x.sign() {
        Sign::Minus => None,
        _ => x.to_biguint(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn examples() {
        assert_eq!(crt(&[(b(0), b(2)), (b(1), b(3))]).unwrap(), (b(4), b(6)));
        assert_eq!(crt(&[(b(1), b(7))]).unwrap(), (b(1), b(7)));
        assert_eq!(crt(&[(b(1), b(31)), (b(0), b(5))]).unwrap(), (b(125), b(155)));
        assert_eq!(crt(&[]).unwrap(), (b(0), b(1)));
    }

    #[test]
    fn errors_name_the_pair() {
        let err = crt(&[(b(1), b(4)), (b(0), b(3)), (b(1), b(6))]).unwrap_err();
        assert_eq!(
            err,
            ArithError::NotCoprime {
                first: 0,
                second: 2,
                m1: "4".into(),
                m2: "6".into()
            }
        );
        assert!(matches!(crt(&[(b(5), b(3))]), Err(ArithError::UnreducedResidue { .. })));
        assert!(matches!(crt(&[(b(0), b(0))]), Err(ArithError::ZeroModulus)));
    }
}
