//! Thin wrapper over `astro-float` carrying precision, rounding mode and
//! the constant cache together.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

pub struct Hp {
    bits: usize,
    rm: RoundingMode,
    cc: Consts,
}

impl Hp {
    pub fn new(bits: usize) -> Self {
        Self {
            bits: bits.max(64),
            rm: RoundingMode::ToEven,
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    /// Working precision covering `digits` decimal digits plus guard bits.
    pub fn for_digits(digits: u32, guard_bits: usize) -> Self {
        Self::new((digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + guard_bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn uint(&mut self, n: &BigUint) -> BigFloat {
        BigFloat::parse(&n.to_str_radix(10), Radix::Dec, self.bits, self.rm, &mut self.cc)
    }

    pub fn int(&mut self, n: &BigInt) -> BigFloat {
        BigFloat::parse(&n.to_str_radix(10), Radix::Dec, self.bits, self.rm, &mut self.cc)
    }

    pub fn small(&mut self, v: i64) -> BigFloat {
        self.int(&BigInt::from(v))
    }

    pub fn ratio(&mut self, r: &BigRational) -> BigFloat {
        let n = self.int(r.numer());
        let d = self.int(r.denom());
        self.div(&n, &d)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, self.rm)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, self.rm, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, self.rm, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, self.rm)
    }

    /// Positive real n-th root of a positive number.
    pub fn nth_root(&mut self, a: &BigFloat, n: u32) -> BigFloat {
        let l = self.ln(a);
        let n = self.small(n as i64);
        let q = self.div(&l, &n);
        self.exp(&q)
    }

    /// `cos(2π k / n)`.
    pub fn cos_two_pi_frac(&mut self, k: u32, n: u32) -> BigFloat {
        let pi = self.cc.pi(self.bits, self.rm);
        let two_k = self.small(2 * k as i64);
        let n = self.small(n as i64);
        let angle = self.div(&self.mul(&pi, &two_k), &n);
        angle.cos(self.bits, self.rm, &mut self.cc)
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        self.format(a).parse().unwrap_or(f64::NAN)
    }

    pub fn format(&mut self, a: &BigFloat) -> String {
        a.format(Radix::Dec, self.rm, &mut self.cc)
            .unwrap_or_else(|_| "NaN".to_string())
    }

    /// Scientific notation with `digits` significant digits (truncated).
    pub fn to_digits(&mut self, a: &BigFloat, digits: u32) -> String {
        let s = self.format(a);
        let (mantissa, exp) = s.split_once('e').unwrap_or((&s, "+0"));
        let (sign, body) = mantissa
            .strip_prefix('-')
            .map(|b| ("-", b))
            .unwrap_or(("", mantissa));
        let digits_only: String = body.chars().filter(|c| c.is_ascii_digit()).collect();
        let keep: String = digits_only
            .chars()
            .chain(std::iter::repeat('0'))
            .take(digits.max(1) as usize)
            .collect();
        let (lead, rest) = keep.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        }
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        a.abs()
    }

    pub fn parse(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.bits, self.rm, &mut self.cc)
    }

    /// `⌊a⌋` as an exact integer.
    pub fn floor_int(&mut self, a: &BigFloat) -> BigInt {
        let f = a.floor();
        decimal_to_bigint(&self.format(&f))
    }
}

/// Parses a decimal rendering `[-]d.ddd[e±x]` of an integer-valued number.
fn decimal_to_bigint(s: &str) -> BigInt {
    let (mant, exp) = s.split_once('e').unwrap_or((s, "0"));
    let neg = mant.starts_with('-');
    let body = mant.trim_start_matches('-');
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    let exp: i64 = exp.trim_start_matches('+').parse().unwrap_or(0);
    let mut digits = format!("{ip}{fp}");
    let shift = exp - fp.len() as i64;
    if shift >= 0 {
        digits.extend(std::iter::repeat_n('0', shift as usize));
    } else {
        let keep = (digits.len() as i64 + shift).max(0) as usize;
        digits.truncate(keep);
    }
    if digits.is_empty() {
        digits.push('0');
    }
    let v: BigInt = digits.parse().unwrap_or_default();
    if neg {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcendental_basics() {
        let mut hp = Hp::for_digits(40, 64);
        let two = hp.small(2);
        let ln2 = hp.ln(&two);
        assert_eq!(
            hp.to_digits(&ln2, 30),
            "6.93147180559945309417232121458e-1"
        );
        let cbrt2 = hp.nth_root(&two, 3);
        assert!((hp.to_f64(&cbrt2) - 2f64.cbrt()).abs() < 1e-15);
        let c = hp.cos_two_pi_frac(1, 3);
        assert!((hp.to_f64(&c) + 0.5).abs() < 1e-30);
        let r = BigRational::new(BigInt::from(-7), BigInt::from(4));
        let v = hp.ratio(&r);
        assert_eq!(hp.to_f64(&v), -1.75);
    }

    #[test]
    fn integer_parts() {
        assert_eq!(decimal_to_bigint("1.25e+2"), BigInt::from(125));
        assert_eq!(decimal_to_bigint("-3.0e0"), BigInt::from(-3));
        assert_eq!(decimal_to_bigint("7e3"), BigInt::from(7000));
        let mut hp = Hp::new(256);
        let x = hp.parse("123456789012345678901234567.75");
        assert_eq!(
            hp.floor_int(&x),
            "123456789012345678901234567".parse::<BigInt>().unwrap()
        );
    }
}
