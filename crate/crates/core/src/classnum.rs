//! Class-number estimates from the analytic class number formula and
//! regulator bound ratios.
//!
//! For a pure field of odd prime degree `l`: `r1 = 1`, `r2 = (l-1)/2` and
//! the only roots of unity are `±1`, so
//!
//! ```text
//! hR = L(1) · w·√D / (2^r1 · (2π)^r2),   w = 2,
//! ```
//!
//! with `log L(1)` replaced by the truncated sum `Σ λ(p)/p`. Everything
//! here is an estimate up to the truncation factor and, for `h`, the unit
//! index.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::ln_big;
use crate::lseries::EulerProxy;
use crate::purefield::{
    reduce_unit_rank1, regulator_rank1, unit_log_vector, FieldError, PureField, ReducedUnit,
    StenderUnit, UnitLogVector,
};

pub const REPORT_SCHEMA: &str = "purefields.field-report/1";
pub const CONSTANTS_NOTE: &str = "r1 = 1, r2 = (l-1)/2, w = 2";
pub const ESTIMATE_LABEL: &str =
    "estimate, valid up to the Euler-truncation factor and possible unit-index factor";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassnumError {
    #[error("discriminant {0} is below 16; log log D is degenerate")]
    SmallDiscriminant(String),
    #[error("regulator estimate must be positive, got {0}")]
    NonPositiveRegulator(f64),
    #[error("class number estimates from a single unit need l = 3, got l = {0}")]
    UnsupportedDegree(u32),
    #[error("proxy was computed for radicand {proxy}, field radicand is {field}")]
    ProxyMismatch { proxy: String, field: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `log(hR)` from the proxy, kept in log space so huge `D` do not overflow.
pub fn log_hr_from_proxy(field: &PureField, proxy_sum: f64) -> f64 {
    let r2 = ((field.l - 1) / 2) as f64;
    let w = 2f64;
    proxy_sum + w.ln() + 0.5 * ln_big(&field.discriminant)
        - std::f64::consts::LN_2
        - r2 * std::f64::consts::TAU.ln()
}

pub fn hr_from_proxy(field: &PureField, proxy: &EulerProxy) -> Result<f64, ClassnumError> {
    check_proxy(field, proxy)?;
    Ok(log_hr_from_proxy(field, proxy.sum).exp())
}

fn check_proxy(field: &PureField, proxy: &EulerProxy) -> Result<(), ClassnumError> {
    if proxy.a != field.radicand && proxy.a != field.input {
        return Err(ClassnumError::ProxyMismatch {
            proxy: proxy.a.to_string(),
            field: field.radicand.to_string(),
        });
    }
    Ok(())
}

/// `hR / R̂` for `l = 3`. With `R̂ ≥ R` this under-estimates `h`.
pub fn h_estimate_l3(
    field: &PureField,
    proxy: &EulerProxy,
    r_hat: f64,
) -> Result<f64, ClassnumError> {
    if field.l != 3 {
        return Err(ClassnumError::UnsupportedDegree(field.l));
    }
    if r_hat <= 0.0 || r_hat.is_nan() {
        return Err(ClassnumError::NonPositiveRegulator(r_hat));
    }
    Ok(hr_from_proxy(field, proxy)? / r_hat)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRatios {
    /// `R̂ / (√D (log D)^(l-1))`.
    pub landau_ratio: f64,
    /// `R̂ / (√D log log D)`.
    pub hypothesis1_ratio: f64,
    /// `R̂ / log D`.
    pub regulator_over_log_d: f64,
}

pub fn bound_ratios(discriminant: &BigUint, l: u32, r_hat: f64) -> Result<BoundRatios, ClassnumError> {
    if *discriminant < BigUint::from(16u32) {
        return Err(ClassnumError::SmallDiscriminant(discriminant.to_string()));
    }
    if r_hat <= 0.0 || r_hat.is_nan() {
        return Err(ClassnumError::NonPositiveRegulator(r_hat));
    }
    let log_d = ln_big(discriminant);
    let log_sqrt_d = 0.5 * log_d;
    let ln_r = r_hat.ln();
    Ok(BoundRatios {
        landau_ratio: (ln_r - log_sqrt_d - (l - 1) as f64 * log_d.ln()).exp(),
        hypothesis1_ratio: (ln_r - log_sqrt_d - log_d.ln().ln()).exp(),
        regulator_over_log_d: r_hat / log_d,
    })
}

/// `h · log D / (√D log log D)`.
pub fn size_ratio(discriminant: &BigUint, h: f64) -> f64 {
    let log_d = ln_big(discriminant);
    (h.ln() + log_d.ln() - 0.5 * log_d - log_d.ln().ln()).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitData {
    pub unit: StenderUnit,
    pub log_vector: UnitLogVector,
    /// `|log|σ_1(u)||` (l = 3 only).
    pub regulator_multiple: Option<f64>,
    /// Exact root extraction of `u` (l = 3 only).
    pub reduced: Option<ReducedUnit>,
    /// The regulator estimate used downstream.
    pub r_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub schema: String,
    pub field: PureField,
    pub proxy: EulerProxy,
    pub unit: Option<UnitData>,
    pub hr_estimate: f64,
    pub log_hr_estimate: f64,
    pub h_estimate: Option<f64>,
    /// Nearest integer to `h_estimate`; informational only.
    pub h_rounded: Option<i64>,
    pub ratios: Option<BoundRatios>,
    pub size_ratio: Option<f64>,
    pub constants: String,
    pub label: String,
}

/// Unit data for `a = n^l + r`: log vector always; for `l = 3` also the
/// raw and reduced regulator estimates.
pub fn unit_data(su: &StenderUnit, precision: u32) -> Result<UnitData, FieldError> {
    let log_vector = unit_log_vector(su, precision)?;
    if su.l != 3 {
        return Ok(UnitData {
            unit: su.clone(),
            log_vector,
            regulator_multiple: None,
            reduced: None,
            r_hat: None,
        });
    }
    let raw = regulator_rank1(su)?;
    let reduced = reduce_unit_rank1(su)?;
    Ok(UnitData {
        unit: su.clone(),
        log_vector,
        regulator_multiple: Some(raw),
        r_hat: Some(reduced.regulator),
        reduced: Some(reduced),
    })
}

pub fn assemble_report(
    field: &PureField,
    proxy: &EulerProxy,
    unit: Option<UnitData>,
) -> Result<FieldReport, ClassnumError> {
    check_proxy(field, proxy)?;
    let log_hr = log_hr_from_proxy(field, proxy.sum);
    let r_hat = unit.as_ref().and_then(|u| u.r_hat);
    let h_estimate = match (field.l, r_hat) {
        (3, Some(r)) => Some(h_estimate_l3(field, proxy, r)?),
        _ => None,
    };
    let ratios = match r_hat {
        Some(r) if field.discriminant >= BigUint::from(16u32) => {
            Some(bound_ratios(&field.discriminant, field.l, r)?)
        }
        _ => None,
    };
    Ok(FieldReport {
        schema: REPORT_SCHEMA.into(),
        field: field.clone(),
        proxy: proxy.summary(),
        unit,
        hr_estimate: log_hr.exp(),
        log_hr_estimate: log_hr,
        h_rounded: h_estimate.map(|h| h.round() as i64),
        size_ratio: h_estimate.map(|h| size_ratio(&field.discriminant, h)),
        h_estimate,
        ratios,
        constants: CONSTANTS_NOTE.into(),
        label: ESTIMATE_LABEL.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lseries::log_L1_proxy;
    use crate::purefield::make_pure_field;

    #[test]
    fn formula_instances() {
        let k = make_pure_field(&BigUint::from(2u32), 3).unwrap();
        let hr = log_hr_from_proxy(&k, 0.0).exp();
        assert!((hr - 2.0 * 108f64.sqrt() / (4.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((hr - 1.654).abs() < 1e-3);
        let k5 = make_pure_field(&BigUint::from(2u32), 5).unwrap();
        let d = 5f64.powi(5) * 16.0;
        let want = 2.0 * d.sqrt() / (2.0 * std::f64::consts::TAU.powi(2));
        assert!((log_hr_from_proxy(&k5, 0.0).exp() - want).abs() / want < 1e-12);
        assert!(log_hr_from_proxy(&k, 0.1) > log_hr_from_proxy(&k, 0.0));
    }

    #[test]
    fn ratio_examples() {
        let r = bound_ratios(&BigUint::from(108u32), 3, 1.347).unwrap();
        assert!((r.landau_ratio - 0.0059).abs() < 1e-4, "{}", r.landau_ratio);
        assert!(matches!(
            bound_ratios(&BigUint::from(15u32), 3, 1.0),
            Err(ClassnumError::SmallDiscriminant(_))
        ));
        assert!(matches!(
            bound_ratios(&BigUint::from(108u32), 3, 0.0),
            Err(ClassnumError::NonPositiveRegulator(_))
        ));
    }

    #[test]
    fn report_for_cube_root_two() {
        let k = make_pure_field(&BigUint::from(2u32), 3).unwrap();
        let px = log_L1_proxy(&k.radicand, 3, 20_000);
        let su = StenderUnit::from_u64(1, 1, 3).unwrap();
        let rep = assemble_report(&k, &px, Some(unit_data(&su, 30).unwrap())).unwrap();
        assert_eq!(rep.schema, REPORT_SCHEMA);
        let h = rep.h_estimate.unwrap();
        assert!(h > 0.5 && h < 2.0, "{h}");
        assert!(rep.proxy.values.is_empty());
        let json = serde_json::to_string(&rep).unwrap();
        let back: FieldReport = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
