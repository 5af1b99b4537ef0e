//! Dense univariate polynomials over a prime field `F_p`, word-sized `p`.
//!
//! Degrees here are tiny (the defining polynomials `x^l - a` with `l <= 13`
//! or so), so everything is schoolbook.

use std::fmt;

use crate::arith::{inv_mod, mul_mod, pow_mod};

#[derive(Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    /// Coefficients, constant term first; no trailing zeros.
    c: Vec<u64>,
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly(mod {}; {:?})", self.p, self.c)
    }
}

impl FpPoly {
    pub fn new(p: u64, coeffs: &[u64]) -> Self {
        let mut c: Vec<u64> = coeffs.iter().map(|&a| a % p).collect();
        trim(&mut c);
        Self { p, c }
    }

    /// Builds from signed coefficients.
    pub fn from_i128(p: u64, coeffs: &[i128]) -> Self {
        let c: Vec<u64> = coeffs.iter().map(|&a| a.rem_euclid(p as i128) as u64).collect();
        Self::new(p, &c)
    }

    pub fn zero(p: u64) -> Self {
        Self { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, &[1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, &[0, 1])
    }

    /// `x^n - a`.
    pub fn binomial(p: u64, n: usize, a: u64) -> Self {
        let mut c = vec![0u64; n + 1];
        c[0] = (p - a % p) % p;
        c[n] = 1;
        Self::new(p, &c)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c
            .iter()
            .rev()
            .fold(0u64, |acc, &a| (mul_mod(acc, x, self.p) + a) % self.p)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c: Vec<u64> = (0..n)
            .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        Self::new(self.p, &c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c: Vec<u64> = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        Self::new(self.p, &c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::new(self.p, &c)
    }

    pub fn scale(&self, s: u64) -> Self {
        let c: Vec<u64> = self.c.iter().map(|&a| mul_mod(a, s, self.p)).collect();
        Self::new(self.p, &c)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).expect("p prime, lead nonzero");
        self.scale(inv)
    }

    /// Quotient and remainder. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = inv_mod(d.lead(), self.p).expect("p prime, lead nonzero");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(self.p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let coef = mul_mod(r[i + dd], inv, self.p);
            q[i] = coef;
            if coef == 0 {
                continue;
            }
            for (j, &b) in d.c.iter().enumerate() {
                let t = mul_mod(coef, b, self.p);
                r[i + j] = (r[i + j] + self.p - t) % self.p;
            }
        }
        (Self::new(self.p, &q), Self::new(self.p, &r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let c: Vec<u64> = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| mul_mod(a, i as u64 % self.p, self.p))
            .collect();
        Self::new(self.p, &c)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// For `f = g(x^p)` (derivative identically zero) returns `g`, which
    /// equals the p-th root of `f` over `F_p`.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let c: Vec<u64> = self.c.iter().step_by(p).copied().collect();
        Self::new(self.p, &c)
    }
}

fn trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

/// Product of the distinct monic irreducible factors of `f` (its radical).
pub fn squarefree_kernel(f: &FpPoly) -> FpPoly {
    let f = f.monic();
    if f.degree().unwrap_or(0) == 0 {
        return FpPoly::one(f.p);
    }
    let df = f.derivative();
    if df.is_zero() {
        return squarefree_kernel(&f.pth_root());
    }
    let c = f.gcd(&df);
    // w collects every irreducible whose exponent is prime to p.
    let w = f.div_rem(&c).0.monic();
    let mut rest = c;
    loop {
        let g = rest.gcd(&w);
        if g.degree() == Some(0) {
            break;
        }
        rest = rest.div_rem(&g).0;
    }
    if rest.degree().unwrap_or(0) == 0 {
        w
    } else {
        w.mul(&squarefree_kernel(&rest.pth_root())).monic()
    }
}

/// Number of distinct roots of `f` in `F_p`: `deg gcd(f, x^p - x)`.
pub fn count_distinct_roots(f: &FpPoly) -> usize {
    if f.is_zero() {
        return f.p as usize;
    }
    let xp = FpPoly::x(f.p).pow_mod(f.p, f);
    let g = f.gcd(&xp.sub(&FpPoly::x(f.p)));
    g.degree().unwrap_or(0)
}

/// Distinct roots of `f` in `F_p`, ascending. Cantor-Zassenhaus splitting
/// of `gcd(f, x^p - x)` with shifts `x + δ`, `δ = 0, 1, ...` so the result
/// is deterministic; tiny fields are scanned directly.
pub fn roots(f: &FpPoly) -> Vec<u64> {
    let p = f.p;
    assert!(!f.is_zero(), "every element is a root of the zero polynomial");
    if p < 64 {
        return (0..p).filter(|&x| f.eval(x) == 0).collect();
    }
    let xp = FpPoly::x(p).pow_mod(p, f);
    let g = f.gcd(&xp.sub(&FpPoly::x(p)));
    let mut out = Vec::new();
    split_linear(&g, &mut out);
    out.sort_unstable();
    out
}

fn split_linear(g: &FpPoly, out: &mut Vec<u64>) {
    let p = g.p;
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let m = g.monic();
            out.push((p - m.c[0]) % p);
        }
        Some(_) => {
            for delta in 0..p {
                let shifted = FpPoly::new(p, &[delta, 1]);
                let h = shifted.pow_mod((p - 1) / 2, g).sub(&FpPoly::one(p));
                let d = g.gcd(&h);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && Some(dd) < g.degree() {
                    split_linear(&d, out);
                    split_linear(&g.div_rem(&d).0, out);
                    return;
                }
            }
            unreachable!("a product of distinct linear factors always splits");
        }
    }
}

/// All `x` in `[0, p)` with `x^n = a`, via the roots of `x^n - a`.
pub fn nth_roots_mod(a: u64, n: u32, p: u64) -> Vec<u64> {
    if a % p == 0 {
        return vec![0];
    }
    // gcd(n, p-1) = 1: the power map is a bijection.
    let g = crate::arith::gcd_u64(n as u64, p - 1);
    if g == 1 {
        let e = inv_mod(n as u64, p - 1).expect("coprime");
        return vec![pow_mod(a, e, p)];
    }
    roots(&FpPoly::binomial(p, n as usize, a))
}
