//! Pure fields `K = Q(a^(1/l))` for an odd prime `l`.
//!
//! The radicand is normalized to its l-th-power-free part before anything
//! else; the stripped power is kept on the record. The discriminant comes
//! from the closed form
//!
//! ```text
//! |d_K| = l^e · ∏_{r | a, r prime} r^(l-1)   (the product includes r = l when l | a)
//! e = l - 2   if l ∤ a and a^(l-1) ≡ 1 (mod l²)
//! e = l       otherwise
//! ```
//!
//! and, in validation mode, the exponent at `l` is re-derived through
//! Dedekind's criterion on `x^l - a` ([`dedekind_index_check`]).

mod dedekind;
mod units;

pub use dedekind::{dedekind_index_check, discriminant_via_dedekind};
pub use units::{
    reduce_unit_rank1, regulator_rank1, stender_divisors, stender_unit_norm, unit_log_vector,
    ReducedUnit, StenderUnit, UnitLogVector, REGULATOR_FLOOR_COMPLEX_CUBIC,
};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{
    is_prime_u64, power_free_decompose_with, ArithError, FactorBudget, FactorCache, Factorization,
    PowerFreeDecomposition,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("l = {0} is not an odd prime")]
    BadDegree(u32),
    #[error("radicand {a} is a perfect {l}-th power; the field degenerates to Q")]
    Degenerate { a: String, l: u32 },
    #[error("radicand must be at least 2, got {0}")]
    RadicandTooSmall(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(
        "discriminant exponent at {l} disagrees with Dedekind's criterion for a = {a}: \
         formula gives {formula}, criterion gives {criterion}"
    )]
    ValidationMismatch {
        a: String,
        l: u32,
        formula: u32,
        criterion: u32,
    },
    #[error("{r} does not divide {l}·{n}^{}; r/(θ - n)^{l} need not be a unit", l - 1)]
    StenderDivisibility { n: String, r: String, l: u32 },
    #[error("Stender parameters must be positive")]
    StenderZero,
    #[error("unit rank {rank} unsupported here (only rank 1, l = 3)")]
    UnsupportedRank { rank: u32 },
    #[error("could not certify {digits} digits; at least {required_bits} working bits needed")]
    PrecisionUnattainable { digits: u32, required_bits: usize },
    #[error("prime {0} exceeds the word size supported by the Dedekind oracle")]
    OracleRange(String),
    #[error("Dedekind oracle inconsistency at p = {p}: {detail}")]
    OracleInconsistent { p: u64, detail: String },
}

/// Options for [`make_pure_field_with`].
#[derive(Debug, Clone, Copy)]
pub struct FieldOptions {
    /// Cross-check the exponent of `l` in the discriminant with the
    /// Dedekind criterion and fail on disagreement.
    pub validate: bool,
    pub budget: FactorBudget,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            validate: true,
            budget: FactorBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureField {
    pub l: u32,
    /// The integer the caller passed in.
    #[serde(with = "crate::bigserde::biguint")]
    pub input: BigUint,
    /// l-th-power-free radicand actually used.
    #[serde(with = "crate::bigserde::biguint")]
    pub radicand: BigUint,
    /// `S` with `input = S^l · radicand`.
    #[serde(with = "crate::bigserde::biguint")]
    pub stripped_power: BigUint,
    #[serde(with = "crate::bigserde::biguint")]
    pub radical: BigUint,
    /// `|d_K|`.
    #[serde(with = "crate::bigserde::biguint")]
    pub discriminant: BigUint,
    /// Exponent of `l` in `|d_K|`.
    pub l_exponent: u32,
    /// True iff the tame/wild exponent `e` above equals `l`.
    pub wild: bool,
    pub radicand_factorization: Factorization,
}

pub fn check_odd_prime(l: u32) -> Result<(), FieldError> {
    if l < 3 || !is_prime_u64(l as u64) {
        return Err(FieldError::BadDegree(l));
    }
    Ok(())
}

pub fn make_pure_field(a: &BigUint, l: u32) -> Result<PureField, FieldError> {
    make_pure_field_with(a, l, &FieldOptions::default(), None)
}

pub fn make_pure_field_with(
    a: &BigUint,
    l: u32,
    opts: &FieldOptions,
    cache: Option<&FactorCache>,
) -> Result<PureField, FieldError> {
    check_odd_prime(l)?;
    if *a < BigUint::from(2u32) {
        return Err(FieldError::RadicandTooSmall(a.to_string()));
    }
    let decomposition = power_free_decompose_with(a, l, &opts.budget, cache)?;
    from_decomposition(a, &decomposition, opts)
}

/// Field data from an already-known factorization of `a`.
pub fn pure_field_from_factorization(
    a: &BigUint,
    factorization: &Factorization,
    l: u32,
    opts: &FieldOptions,
) -> Result<PureField, FieldError> {
    check_odd_prime(l)?;
    debug_assert_eq!(&factorization.value(), a);
    from_decomposition(a, &PowerFreeDecomposition::from_factorization(factorization, l), opts)
}

fn from_decomposition(
    a: &BigUint,
    d: &PowerFreeDecomposition,
    opts: &FieldOptions,
) -> Result<PureField, FieldError> {
    let l = d.degree;
    if d.free_part.is_one() {
        return Err(FieldError::Degenerate {
            a: a.to_string(),
            l,
        });
    }
    let (discriminant, l_exponent, wild) = discriminant_formula(&d.free_part, &d.free_factorization, l);
    if opts.validate {
        validate_l_exponent(&d.free_part, l, l_exponent)?;
    }
    Ok(PureField {
        l,
        input: a.clone(),
        radicand: d.free_part.clone(),
        stripped_power: d.power_part.clone(),
        radical: d.free_factorization.radical(),
        discriminant,
        l_exponent,
        wild,
        radicand_factorization: d.free_factorization.clone(),
    })
}

/// `(|d_K|, v_l(|d_K|), wild)` for an l-th-power-free radicand.
pub fn discriminant_formula(radicand: &BigUint, f: &Factorization, l: u32) -> (BigUint, u32, bool) {
    let lb = BigUint::from(l);
    let l_divides = f.exponent_of(&lb) > 0;
    let e = if !l_divides && tame_at_l(radicand, l) {
        l - 2
    } else {
        l
    };
    let mut d = BigUint::one();
    let mut l_exponent = e;
    for (r, _) in f.entries() {
        if *r == lb {
            l_exponent += l - 1;
        } else {
            d *= r.pow(l - 1);
        }
    }
    d *= lb.pow(l_exponent);
    (d, l_exponent, e == l)
}

/// `a^(l-1) ≡ 1 (mod l²)`.
pub fn tame_at_l(a: &BigUint, l: u32) -> bool {
    let l2 = BigUint::from(l * l);
    a.modpow(&BigUint::from(l - 1), &l2).is_one()
}

fn validate_l_exponent(radicand: &BigUint, l: u32, formula: u32) -> Result<(), FieldError> {
    let l_divides = (radicand % l).to_u32() == Some(0);
    let criterion = if l_divides {
        // Normalize so that v_l = 1; then x^l - b is Eisenstein at l and
        // the exponent is v_l(l^l b^(l-1)) = 2l - 1.
        let b = dedekind::eisenstein_radicand(radicand, l, l as u64);
        if dedekind_index_check(&b, l, l as u64) {
            return Err(FieldError::OracleInconsistent {
                p: l as u64,
                detail: "Eisenstein polynomial reported l | index".into(),
            });
        }
        2 * l - 1
    } else if dedekind_index_check(radicand, l, l as u64) {
        l - 2
    } else {
        l
    };
    if criterion != formula {
        return Err(FieldError::ValidationMismatch {
            a: radicand.to_string(),
            l,
            formula,
            criterion,
        });
    }
    Ok(())
}
