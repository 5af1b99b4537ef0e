//! Exact arithmetic in `Q[x]/(x^l - a)` on the power basis
//! `1, θ, ..., θ^(l-1)` with rational coordinates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elem(pub Vec<BigRational>);

#[derive(Debug, Clone)]
pub struct PureAlgebra {
    l: usize,
    a: BigRational,
}

impl PureAlgebra {
    pub fn new(l: usize, a: BigInt) -> Self {
        Self {
            l,
            a: BigRational::from_integer(a),
        }
    }

    pub fn degree(&self) -> usize {
        self.l
    }

    pub fn from_int(&self, v: BigInt) -> Elem {
        let mut c = vec![BigRational::zero(); self.l];
        c[0] = BigRational::from_integer(v);
        Elem(c)
    }

    pub fn one(&self) -> Elem {
        self.from_int(BigInt::one())
    }

    pub fn theta(&self) -> Elem {
        let mut c = vec![BigRational::zero(); self.l];
        if self.l == 1 {
            c[0] = self.a.clone();
        } else {
            c[1] = BigRational::one();
        }
        Elem(c)
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        Elem(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        Elem(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, x: &Elem, s: &BigRational) -> Elem {
        Elem(x.0.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        let l = self.l;
        let mut wide = vec![BigRational::zero(); 2 * l - 1];
        for (i, a) in x.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.0.iter().enumerate() {
                wide[i + j] += a * b;
            }
        }
        let mut c = wide[..l].to_vec();
        for (i, hi) in wide[l..].iter().enumerate() {
            c[i] += hi * &self.a;
        }
        Elem(c)
    }

    pub fn pow(&self, x: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by `x`; column `j` holds `x·θ^j`.
    pub fn mul_matrix(&self, x: &Elem) -> Vec<Vec<BigRational>> {
        let mut cols = Vec::with_capacity(self.l);
        let mut basis = self.one();
        let theta = self.theta();
        for _ in 0..self.l {
            cols.push(self.mul(x, &basis).0);
            basis = self.mul(&basis, &theta);
        }
        (0..self.l)
            .map(|i| (0..self.l).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Norm as the determinant of the multiplication matrix.
    pub fn norm(&self, x: &Elem) -> BigRational {
        determinant(self.mul_matrix(x))
    }

    /// Trace: only the constant coordinate survives since `tr θ^i = 0`
    /// for `0 < i < l`.
    pub fn trace(&self, x: &Elem) -> BigRational {
        &x.0[0] * BigRational::from_integer(BigInt::from(self.l))
    }

    /// Characteristic polynomial, constant term first, monic. Built from
    /// the power-sum traces `tr(x^m)` via Newton's identities.
    pub fn char_poly(&self, x: &Elem) -> Vec<BigRational> {
        let l = self.l;
        let mut power_sums = Vec::with_capacity(l);
        let mut pw = self.one();
        for _ in 0..l {
            pw = self.mul(&pw, x);
            power_sums.push(self.trace(&pw));
        }
        // e_0 = 1, m e_m = Σ_{i=1}^m (-1)^(i-1) e_{m-i} p_i
        let mut e = vec![BigRational::one()];
        for m in 1..=l {
            let mut acc = BigRational::zero();
            for i in 1..=m {
                let term = &e[m - i] * &power_sums[i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            e.push(acc / BigRational::from_integer(BigInt::from(m)));
        }
        // χ(t) = Σ (-1)^m e_m t^(l-m)
        let mut coeffs = vec![BigRational::zero(); l + 1];
        for (m, em) in e.into_iter().enumerate() {
            coeffs[l - m] = if m % 2 == 0 { em } else { -em };
        }
        coeffs
    }

    /// Multiplicative inverse by solving `M_x · y = e_0`.
    pub fn inverse(&self, x: &Elem) -> Option<Elem> {
        let m = self.mul_matrix(x);
        let mut rhs = vec![BigRational::zero(); self.l];
        rhs[0] = BigRational::one();
        solve(m, rhs).map(Elem)
    }
}

pub fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    det
}

pub fn solve(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        rhs.swap(pivot, col);
        let pv = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
            let t = &f * &rhs[col];
            rhs[r] -= t;
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

pub fn is_integral(coeffs: &[BigRational]) -> bool {
    coeffs.iter().all(|c| c.is_integer())
}

pub fn is_unit_poly(coeffs: &[BigRational]) -> bool {
    is_integral(coeffs) && coeffs.first().is_some_and(|c| c.abs().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn cube_root_of_two() {
        let k = PureAlgebra::new(3, BigInt::from(2));
        let t = k.theta();
        assert_eq!(k.pow(&t, 3), k.from_int(BigInt::from(2)));
        assert_eq!(k.norm(&t), q(2));
        // θ - 1 has norm 1 and inverse 1 + θ + θ²
        let e = k.sub(&t, &k.one());
        assert_eq!(k.norm(&e), q(1));
        assert_eq!(k.inverse(&e).unwrap(), Elem(vec![q(1), q(1), q(1)]));
        assert_eq!(k.char_poly(&t), vec![q(-2), q(0), q(0), q(1)]);
        // 1 + θ + θ²: x³ - 3x² - 3x - 1
        assert_eq!(
            k.char_poly(&Elem(vec![q(1), q(1), q(1)])),
            vec![q(-1), q(-3), q(-3), q(1)]
        );
    }

    #[test]
    fn norm_routes_agree() {
        let k = PureAlgebra::new(5, BigInt::from(6));
        let x = Elem(vec![q(3), q(-1), q(0), q(2), q(1)]);
        let cp = k.char_poly(&x);
        assert_eq!(k.norm(&x), -cp[0].clone()); // odd degree: N = -χ(0)
    }
}
