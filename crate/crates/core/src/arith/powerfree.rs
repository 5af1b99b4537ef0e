use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{factorize, ArithError, FactorBudget, FactorCache, Factorization};

/// `n = power_part^degree * free_part` with `free_part` l-th-power-free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerFreeDecomposition {
    #[serde(with = "crate::bigserde::biguint")]
    pub power_part: BigUint,
    #[serde(with = "crate::bigserde::biguint")]
    pub free_part: BigUint,
    pub degree: u32,
    /// Factorization of `free_part`; every exponent is below `degree`.
    pub free_factorization: Factorization,
}

impl PowerFreeDecomposition {
    pub fn from_factorization(f: &Factorization, l: u32) -> Self {
        let mut power_part = BigUint::one();
        let mut free = Vec::new();
        for (p, e) in f.entries() {
            power_part *= p.pow(e / l);
            if e % l != 0 {
                free.push((p.clone(), e % l));
            }
        }
        let free_factorization = Factorization::from_pairs(free);
        Self {
            power_part,
            free_part: free_factorization.value(),
            degree: l,
            free_factorization,
        }
    }

    pub fn reconstruct(&self) -> BigUint {
        self.power_part.pow(self.degree) * &self.free_part
    }
}

pub fn power_free_decompose(n: &BigUint, l: u32) -> Result<PowerFreeDecomposition, ArithError> {
    power_free_decompose_with(n, l, &FactorBudget::default(), None)
}

pub fn power_free_decompose_with(
    n: &BigUint,
    l: u32,
    budget: &FactorBudget,
    cache: Option<&FactorCache>,
) -> Result<PowerFreeDecomposition, ArithError> {
    let f = match cache {
        Some(c) => c.factorize(n, budget)?,
        None => factorize(n, budget)?,
    };
    Ok(PowerFreeDecomposition::from_factorization(&f, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(n: u64, l: u32) -> (u64, u64) {
        let d = power_free_decompose(&BigUint::from(n), l).unwrap();
        assert_eq!(d.reconstruct(), BigUint::from(n));
        (
            d.power_part.try_into().unwrap(),
            d.free_part.try_into().unwrap(),
        )
    }

    #[test]
    fn examples() {
        assert_eq!(pf(16, 3), (2, 2));
        assert_eq!(pf(7, 5), (1, 7));
        assert_eq!(pf(972, 3), (3, 36));
        assert_eq!(pf(1, 3), (1, 1));
        assert_eq!(pf(2u64.pow(20), 7), (4, 64));
    }
}
