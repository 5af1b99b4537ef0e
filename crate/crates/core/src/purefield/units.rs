//! Stender units `u = r/(ω - n)^l` in `Q(ω)`, `ω = (n^l + r)^(1/l)`, and
//! their logarithmic embeddings.

use astro_float::BigFloat;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{check_odd_prime, FieldError};
use crate::arith::{factorize_u64, is_perfect_power, small_primes};
use crate::hp::Hp;
use crate::numfield::{is_unit_poly, Elem, PureAlgebra};

/// Smallest regulator of any complex cubic field (discriminant -23).
/// Bounds the root extraction in [`reduce_unit_rank1`].
pub const REGULATOR_FLOOR_COMPLEX_CUBIC: f64 = 0.2811;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StenderUnit {
    #[serde(with = "crate::bigserde::biguint")]
    pub n: BigUint,
    #[serde(with = "crate::bigserde::biguint")]
    pub r: BigUint,
    pub l: u32,
}

impl StenderUnit {
    pub fn new(n: BigUint, r: BigUint, l: u32) -> Result<Self, FieldError> {
        check_odd_prime(l)?;
        if n.is_zero() || r.is_zero() {
            return Err(FieldError::StenderZero);
        }
        let bound = BigUint::from(l) * n.pow(l - 1);
        if !(&bound % &r).is_zero() {
            return Err(FieldError::StenderDivisibility {
                n: n.to_string(),
                r: r.to_string(),
                l,
            });
        }
        let su = Self { n, r, l };
        if is_perfect_power(&su.radicand(), l) {
            return Err(FieldError::Degenerate {
                a: su.radicand().to_string(),
                l,
            });
        }
        Ok(su)
    }

    pub fn from_u64(n: u64, r: u64, l: u32) -> Result<Self, FieldError> {
        Self::new(BigUint::from(n), BigUint::from(r), l)
    }

    /// `n^l + r`.
    pub fn radicand(&self) -> BigUint {
        self.n.pow(self.l) + &self.r
    }

    fn algebra(&self) -> PureAlgebra {
        PureAlgebra::new(self.l as usize, BigInt::from_biguint(Sign::Plus, self.radicand()))
    }

    /// `u` on the power basis of `Q(ω)`.
    pub fn element(&self) -> Elem {
        let k = self.algebra();
        let n = BigInt::from_biguint(Sign::Plus, self.n.clone());
        let base = k.sub(&k.theta(), &k.from_int(n));
        let inv = k.inverse(&k.pow(&base, self.l as u64)).expect("ω - n is nonzero");
        let r = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, self.r.clone()));
        k.scale(&inv, &r)
    }

    /// Exact characteristic polynomial of `u`, constant term first.
    pub fn char_poly(&self) -> Vec<BigRational> {
        self.algebra().char_poly(&self.element())
    }
}

/// Exact norm of `r/(ω - n)^l`, from the determinant of its multiplication
/// matrix.
pub fn stender_unit_norm(n: &BigUint, r: &BigUint, l: u32) -> Result<BigRational, FieldError> {
    let su = StenderUnit::new(n.clone(), r.clone(), l)?;
    Ok(su.algebra().norm(&su.element()))
}

/// All `r` admissible for a given `n`: the divisors of `l·n^(l-1)`.
pub fn stender_divisors(n: u64, l: u32) -> Vec<u64> {
    let mut fac = factorize_u64(n);
    for f in fac.iter_mut() {
        f.1 *= l - 1;
    }
    match fac.iter_mut().find(|(p, _)| *p == l as u64) {
        Some(f) => f.1 += 1,
        None => fac.push((l as u64, 1)),
    }
    let mut divs = vec![1u64];
    for (p, e) in fac {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                match d.checked_mul(pk) {
                    Some(v) => next.push(v),
                    None => break,
                }
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs.dedup();
    divs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitLogVector {
    /// `log|σ_1(u)|` for the real embedding, then `log|σ_i(u)|²` for
    /// `i = 1..(l-1)/2`.
    pub entries: Vec<f64>,
    /// The same entries printed to `precision` significant digits.
    pub decimal: Vec<String>,
    /// `|Σ entries|` evaluated at working precision.
    pub residual: f64,
    pub precision: u32,
    pub working_bits: usize,
}

const MAX_WORKING_BITS: usize = 1 << 16;

pub fn unit_log_vector(su: &StenderUnit, precision: u32) -> Result<UnitLogVector, FieldError> {
    let mut bits = (precision as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    loop {
        if bits > MAX_WORKING_BITS {
            return Err(FieldError::PrecisionUnattainable {
                digits: precision,
                required_bits: bits,
            });
        }
        let mut lo = Hp::new(bits);
        let mut hi = Hp::new(2 * bits);
        let a = log_entries(su, &mut lo);
        let b = log_entries(su, &mut hi);
        let mut agree = true;
        let mut decimal = Vec::with_capacity(a.len());
        for (x, y) in a.iter().zip(&b) {
            let dx = lo.to_digits(x, precision);
            let dy = hi.to_digits(y, precision);
            // Truncated digit strings can differ in the last place near a
            // carry; a relative check decides.
            let x_hi = hi.parse(&lo.format(x));
            let diff = hi.sub(y, &x_hi);
            let scale = hi.to_f64(y).abs().max(1.0);
            if dx != dy && hi.to_f64(&diff).abs() / scale > 10f64.powi(-(precision as i32)) {
                agree = false;
                break;
            }
            decimal.push(dy);
        }
        if !agree {
            bits *= 2;
            continue;
        }
        let mut sum = hi.small(0);
        for y in &b {
            sum = hi.add(&sum, y);
        }
        let residual = hi.to_f64(&sum).abs();
        let entries = b.iter().map(|y| hi.to_f64(y)).collect();
        return Ok(UnitLogVector {
            entries,
            decimal,
            residual,
            precision,
            working_bits: 2 * bits,
        });
    }
}

fn log_entries(su: &StenderUnit, hp: &mut Hp) -> Vec<BigFloat> {
    let l = su.l;
    let a = hp.uint(&su.radicand());
    let n = hp.uint(&su.n);
    let r = hp.uint(&su.r);
    let omega = hp.nth_root(&a, l);
    // ω - n = r / Σ ω^(l-1-i) n^i avoids cancellation when r ≪ n^l.
    let mut denom = hp.small(0);
    let mut wp = hp.small(1);
    for _ in 0..l {
        denom = hp.mul(&denom, &n);
        denom = hp.add(&denom, &wp);
        wp = hp.mul(&wp, &omega);
    }
    let gap = hp.div(&r, &denom);
    let ln_r = hp.ln(&r);
    let lf = hp.small(l as i64);
    let ln_gap = hp.ln(&gap);
    let mut out = vec![hp.sub(&ln_r, &hp.mul(&lf, &ln_gap))];
    let two = hp.small(2);
    let omega2 = hp.mul(&omega, &omega);
    let n2 = hp.mul(&n, &n);
    let two_ln_r = hp.mul(&two, &ln_r);
    for i in 1..=(l - 1) / 2 {
        let c = hp.cos_two_pi_frac(i, l);
        let cross = hp.mul(&hp.mul(&two, &n), &hp.mul(&omega, &c));
        let modsq = hp.add(&hp.sub(&omega2, &cross), &n2);
        let lm = hp.ln(&modsq);
        out.push(hp.sub(&two_ln_r, &hp.mul(&lf, &lm)));
    }
    out
}

/// `|log|σ_1(u)||` for `l = 3`. Equals the regulator when `u` is
/// fundamental and a positive integer multiple of it otherwise.
pub fn regulator_rank1(su: &StenderUnit) -> Result<f64, FieldError> {
    if su.l != 3 {
        return Err(FieldError::UnsupportedRank { rank: (su.l - 1) / 2 });
    }
    let v = unit_log_vector(su, 30)?;
    Ok(v.entries[0].abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedUnit {
    /// `k` with `u = ±v^k`, `v` the reduced unit.
    pub index: u64,
    /// `|log|σ_1(v)||`.
    pub regulator: f64,
    /// `(T, S)` with `x³ - T x² + S x - 1` the characteristic polynomial of
    /// the reduced unit (taken `> 1` at the real place).
    #[serde(with = "crate::bigserde::vec_bigint")]
    pub trace_pair: Vec<BigInt>,
}

/// Extracts exact roots of the Stender unit in a pure cubic field.
///
/// For each prime `k` with `L/k` above the smallest complex cubic
/// regulator, the only candidate root `v = u^(1/k) > 1` has characteristic
/// polynomial `x³ - T x² + S x - 1` with `|T - v| ≤ 2/√v` and
/// `S = v(T - v) + 1/v`. Candidates are confirmed exactly by comparing the
/// power sums of `v^k` against those of `u`.
pub fn reduce_unit_rank1(su: &StenderUnit) -> Result<ReducedUnit, FieldError> {
    if su.l != 3 {
        return Err(FieldError::UnsupportedRank { rank: (su.l - 1) / 2 });
    }
    let cp = su.char_poly();
    debug_assert!(is_unit_poly(&cp));
    let int = |q: &BigRational| q.to_integer();
    // x³ + c2 x² + c1 x + c0 → e1 = -c2, e2 = c1, e3 = -c0
    let mut e = [-int(&cp[2]), int(&cp[1]), -int(&cp[0])];
    let log_vec = unit_log_vector(su, 30)?;
    let bits = (log_vec.entries[0].abs() / std::f64::consts::LN_2) as usize * 2 + 256;
    let mut hp = Hp::new(bits);
    let mut log_u = log_entries(su, &mut hp).swap_remove(0);
    let mut current = log_vec.entries[0];
    if current < 0.0 {
        // Work with u⁻¹: roots 1/u_i.
        e = [&e[1] / &e[2], &e[0] / &e[2], BigInt::one() / &e[2]];
        current = -current;
        log_u = log_u.neg();
    }
    if e[2] != BigInt::one() {
        return Err(FieldError::OracleInconsistent {
            p: 0,
            detail: format!("Stender unit has norm {} at the real place", e[2]),
        });
    }
    let mut index = 1u64;
    let mut trace_pair = vec![e[0].clone(), e[1].clone()];
    let mut primes = small_primes().iter().copied().peekable();
    while let Some(&k) = primes.peek() {
        if current / (k as f64) < REGULATOR_FLOOR_COMPLEX_CUBIC {
            break;
        }
        let kk = hp.small(k as i64);
        let log_v = hp.div(&log_u, &kk);
        match kth_root(&e, &log_v, current / k as f64, k, &mut hp) {
            Some((t, s)) => {
                index *= k;
                current /= k as f64;
                log_u = log_v;
                e = [t.clone(), s.clone(), BigInt::one()];
                trace_pair = vec![t, s];
            }
            None => {
                primes.next();
            }
        }
    }
    Ok(ReducedUnit {
        index,
        regulator: current,
        trace_pair,
    })
}

fn kth_root(
    e: &[BigInt; 3],
    log_v: &BigFloat,
    log_v_f64: f64,
    k: u64,
    hp: &mut Hp,
) -> Option<(BigInt, BigInt)> {
    let v = hp.exp(log_v);
    let half_width = 2.0 / log_v_f64.exp().sqrt() + 1.0;
    let centre = hp.floor_int(&v);
    let span = half_width.ceil() as i64 + 1;
    let one = hp.small(1);
    let inv_v = hp.div(&one, &v);
    for dt in -span..=span {
        let t = &centre + BigInt::from(dt);
        let tf = hp.int(&t);
        let s_approx = hp.add(&hp.mul(&v, &hp.sub(&tf, &v)), &inv_v);
        let s_floor = hp.floor_int(&s_approx);
        for ds in 0..=1 {
            let s = &s_floor + BigInt::from(ds);
            if power_check(&t, &s, k, e) {
                return Some((t, s));
            }
        }
    }
    None
}

/// Elementary symmetric functions of the k-th powers of the roots of
/// `x³ - T x² + S x - 1` equal `e`.
fn power_check(t: &BigInt, s: &BigInt, k: u64, e: &[BigInt; 3]) -> bool {
    let k = k as usize;
    let mut p: Vec<BigInt> = Vec::with_capacity(3 * k + 1);
    p.push(BigInt::from(3));
    p.push(t.clone());
    p.push(t * t - BigInt::from(2) * s);
    for m in 3..=3 * k {
        let v = t * &p[m - 1] - s * &p[m - 2] + &p[m - 3];
        p.push(v);
    }
    let (q1, q2, q3) = (&p[k], &p[2 * k], &p[3 * k]);
    let e1 = q1.clone();
    let two_e2: BigInt = &e1 * q1 - q2;
    if !two_e2.is_even() {
        return false;
    }
    let e2: BigInt = two_e2 / BigInt::from(2);
    let three_e3: BigInt = &e2 * q1 - &e1 * q2 + q3;
    if !(&three_e3 % BigInt::from(3)).is_zero() {
        return false;
    }
    let e3: BigInt = three_e3 / BigInt::from(3);
    e1 == e[0] && e2 == e[1] && e3 == e[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn su(n: u64, r: u64, l: u32) -> StenderUnit {
        StenderUnit::from_u64(n, r, l).unwrap()
    }

    #[test]
    fn norms_are_one() {
        for (n, r, l) in [(1, 1, 3), (2, 3, 3), (1, 5, 5), (4, 8, 3), (3, 7, 7)] {
            let v = stender_unit_norm(&BigUint::from(n as u32), &BigUint::from(r as u32), l).unwrap();
            assert!(v.is_one(), "({n},{r},{l}) → {v}");
        }
    }

    #[test]
    fn divisibility_enforced() {
        assert!(matches!(
            StenderUnit::from_u64(2, 5, 3),
            Err(FieldError::StenderDivisibility { .. })
        ));
        assert!(matches!(StenderUnit::from_u64(0, 1, 3), Err(FieldError::StenderZero)));
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(stender_divisors(1, 3), vec![1, 3]);
        assert_eq!(stender_divisors(2, 3), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(stender_divisors(3, 3), vec![1, 3, 9, 27]);
    }

    #[test]
    fn log_vector_cube_root_two() {
        let v = unit_log_vector(&su(1, 1, 3), 30).unwrap();
        assert_eq!(v.entries.len(), 2);
        // 3·log(1 + 2^(1/3) + 2^(2/3)) = 4.04213204498815230...
        assert!((v.entries[0] - 4.042_132_044_988_152).abs() < 1e-12, "{:?}", v.entries);
        assert!((v.entries[0] + v.entries[1]).abs() < 1e-12);
        assert!(v.residual < 1e-20);
        let v5 = unit_log_vector(&su(1, 5, 5), 30).unwrap();
        assert_eq!(v5.entries.len(), 3);
        assert!(v5.residual < 1e-20);
    }

    #[test]
    fn regulators() {
        let r = regulator_rank1(&su(2, 1, 3)).unwrap();
        assert!((r - 7.4).abs() / 7.4 < 0.05, "{r}");
        let r = regulator_rank1(&su(10, 1, 3)).unwrap();
        assert!((r - 3.0 * 300f64.ln()).abs() / 17.1 < 0.05, "{r}");
        assert!(matches!(
            regulator_rank1(&su(1, 1, 5)),
            Err(FieldError::UnsupportedRank { rank: 2 })
        ));
    }

    #[test]
    fn reduction_finds_cube() {
        let red = reduce_unit_rank1(&su(1, 1, 3)).unwrap();
        assert_eq!(red.index, 3);
        assert!((red.regulator - 1.347_377_348_329_384).abs() < 1e-12);
        // ε = 1 + ω + ω²: x³ - 3x² - 3x - 1
        assert_eq!(red.trace_pair, vec![BigInt::from(3), BigInt::from(-3)]);
    }

}
