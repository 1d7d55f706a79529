//! Laurent polynomials over F_p and square matrices of them.
//!
//! Elements of F_q((t)) appearing in the toolkit (homogeneous lifts, their
//! powers, truncated coset samples) are all Laurent polynomials, so exact
//! arithmetic on `F_p[t, 1/t]` suffices. Ranks over the fraction field
//! F_p(t) are computed by fraction-free (Bareiss) elimination; nothing is
//! ever specialised at a value of `t`.

use crate::field::Fp;
use std::fmt;

/// `sum_k coeffs[k] * t^(low + k)`; zero is the empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LPoly {
    p: u32,
    low: i64,
    coeffs: Vec<u32>,
}

impl fmt::Debug for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{}t^{}", c, self.low + k as i64)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl LPoly {
    pub fn zero(f: Fp) -> Self {
        LPoly { p: f.p(), low: 0, coeffs: Vec::new() }
    }

    pub fn monomial(f: Fp, c: u32, w: i64) -> Self {
        Self::from_coeffs(f, w, vec![c % f.p()])
    }

    pub fn constant(f: Fp, c: u32) -> Self {
        Self::monomial(f, c, 0)
    }

    pub fn from_coeffs(f: Fp, low: i64, coeffs: Vec<u32>) -> Self {
        let mut p = LPoly { p: f.p(), low, coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// t-adic valuation; `None` for zero.
    pub fn val(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    /// Highest exponent present; `None` for zero.
    pub fn deg(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of `t^e`.
    pub fn coeff(&self, e: i64) -> u32 {
        let k = e - self.low;
        if k < 0 || k >= self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(k, &c)| (self.low + k as i64, c))
    }

    pub fn add(&self, o: &LPoly) -> LPoly {
        let f = self.field();
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.deg().unwrap().max(o.deg().unwrap());
        let coeffs = (low..=high).map(|e| f.add(self.coeff(e), o.coeff(e))).collect();
        LPoly::from_coeffs(f, low, coeffs)
    }

    pub fn neg(&self) -> LPoly {
        let f = self.field();
        LPoly { p: self.p, low: self.low, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, o: &LPoly) -> LPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &LPoly) -> LPoly {
        let f = self.field();
        if self.is_zero() || o.is_zero() {
            return LPoly::zero(f);
        }
        let mut coeffs = vec![0u32; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        LPoly::from_coeffs(f, self.low + o.low, coeffs)
    }

    pub fn scale(&self, c: u32) -> LPoly {
        let f = self.field();
        LPoly::from_coeffs(f, self.low, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> LPoly {
        if self.is_zero() {
            return self.clone();
        }
        LPoly { p: self.p, low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// Drops every term of exponent `>= bound`.
    pub fn truncate_below(&self, bound: i64) -> LPoly {
        let f = self.field();
        let coeffs = (self.low..bound.max(self.low)).map(|e| self.coeff(e)).collect();
        LPoly::from_coeffs(f, self.low, coeffs)
    }

    /// Exact quotient `self / d` in F_p[t, 1/t]; `None` if `d` does not divide.
    pub fn div_exact(&self, d: &LPoly) -> Option<LPoly> {
        let f = self.field();
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LPoly::zero(f));
        }
        // Normalise both to polynomials with nonzero constant term; units t^k divide freely.
        let a: Vec<u32> = self.coeffs.clone();
        let b: Vec<u32> = d.coeffs.clone();
        if a.len() < b.len() {
            return None;
        }
        let inv_lead = f.inv(*b.last().unwrap());
        let mut rem = a;
        let mut quo = vec![0u32; rem.len() - b.len() + 1];
        for k in (0..quo.len()).rev() {
            let c = f.mul(rem[k + b.len() - 1], inv_lead);
            quo[k] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    rem[k + j] = f.sub(rem[k + j], f.mul(c, bj));
                }
            }
        }
        if rem.iter().any(|&x| x != 0) {
            return None;
        }
        Some(LPoly::from_coeffs(f, self.low - d.low, quo))
    }
}

/// Square matrix over F_p[t, 1/t].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LMatrix {
    pub n: usize,
    pub entries: Vec<LPoly>,
}

impl fmt::Debug for LMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<&LPoly>> = (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect();
        write!(f, "{rows:?}")
    }
}

impl LMatrix {
    pub fn zeros(f: Fp, n: usize) -> Self {
        LMatrix { n, entries: vec![LPoly::zero(f); n * n] }
    }

    pub fn identity(f: Fp, n: usize) -> Self {
        let mut m = Self::zeros(f, n);
        for i in 0..n {
            m.set(i, i, LPoly::constant(f, 1));
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &LPoly {
        &self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: LPoly) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LPoly::is_zero)
    }

    pub fn add(&self, o: &LMatrix) -> LMatrix {
        LMatrix { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &LMatrix) -> LMatrix {
        LMatrix { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: u32) -> LMatrix {
        LMatrix { n: self.n, entries: self.entries.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul(&self, o: &LMatrix) -> LMatrix {
        let f = self.entries[0].field();
        let n = self.n;
        let mut out = LMatrix::zeros(f, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LPoly::zero(f);
                for k in 0..n {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(o.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> LMatrix {
        let f = self.entries[0].field();
        let mut acc = LMatrix::identity(f, self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Commutator `[self, o] = self*o - o*self`.
    pub fn bracket(&self, o: &LMatrix) -> LMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    /// Minimal valuation over all entries; `None` for the zero matrix.
    pub fn min_val(&self) -> Option<i64> {
        self.entries.iter().filter_map(LPoly::val).min()
    }

    /// Characteristic polynomial `det(X - M)` as coefficients
    /// `[c_0, ..., c_n]` of `X^0..X^n` (so `c_n = 1`), computed with the
    /// division-free Berkowitz recursion.
    pub fn char_poly(&self) -> Vec<LPoly> {
        let f = self.entries[0].field();
        let n = self.n;
        // Berkowitz: vector of coefficients of det(X I - A_k), highest first.
        let mut cur: Vec<LPoly> = vec![LPoly::constant(f, 1)];
        for k in 0..n {
            // A_{k+1} = [[A_k, c],[r, a]] with a = M[k][k], r = M[k][0..k], c = M[0..k][k]
            let a = self.get(k, k).clone();
            // Toeplitz column: [1, -a, -r c, -r A c, -r A^2 c, ...]
            let mut col = vec![LPoly::constant(f, 1), a.neg()];
            let mut v: Vec<LPoly> = (0..k).map(|i| self.get(i, k).clone()).collect();
            for _ in 0..k {
                let rv = (0..k).fold(LPoly::zero(f), |acc, j| acc.add(&self.get(k, j).mul(&v[j])));
                col.push(rv.neg());
                let nv: Vec<LPoly> = (0..k)
                    .map(|i| (0..k).fold(LPoly::zero(f), |acc, j| acc.add(&self.get(i, j).mul(&v[j]))))
                    .collect();
                v = nv;
            }
            // new = T * cur, T lower-triangular Toeplitz of size (k+2) x (k+1)
            let mut next = vec![LPoly::zero(f); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, c) in cur.iter().enumerate() {
                    if i >= j && i - j < col.len() {
                        *slot = slot.add(&col[i - j].mul(c));
                    }
                }
            }
            cur = next;
        }
        // cur is highest-degree-first: cur[0] = 1 for X^n.
        cur.reverse();
        cur
    }

    /// Rank over the fraction field F_p(t).
    pub fn rank(&self) -> usize {
        let Some(mv) = self.min_val() else { return 0 };
        // Scaling by a power of t does not change the rank; afterwards all
        // entries are honest polynomials.
        let mut m: Vec<Vec<LPoly>> =
            (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).shift(-mv)).collect()).collect();
        bareiss_rank(&mut m)
    }
}

/// Fraction-free Gaussian elimination over F_p[t]; returns the rank.
pub fn bareiss_rank(m: &mut [Vec<LPoly>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let f = m[0][0].field();
    let mut prev = LPoly::constant(f, 1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(pr, r);
        let piv = m[r][c].clone();
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = piv.mul(&m[i][j]).sub(&m[i][c].mul(&m[r][j]));
                m[i][j] = num.div_exact(&prev).expect("Bareiss division must be exact");
            }
            m[i][c] = LPoly::zero(f);
        }
        prev = piv;
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> Fp {
        Fp::new(5)
    }

    #[test]
    fn poly_arith() {
        let f = f();
        let a = LPoly::from_coeffs(f, -1, vec![1, 2]); // t^-1 + 2
        let b = LPoly::from_coeffs(f, 0, vec![3, 1]); // 3 + t
        let prod = a.mul(&b);
        assert_eq!(prod.coeff(-1), 3);
        assert_eq!(prod.coeff(0), 1 + 6 % 5);
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(prod.div_exact(&a), Some(b));
        assert!(LPoly::constant(f, 1).div_exact(&LPoly::from_coeffs(f, 0, vec![1, 1])).is_none());
        assert_eq!(a.sub(&a), LPoly::zero(f));
    }

    #[test]
    fn char_poly_of_diagonal_lift() {
        // [[t^-1, 0], [0, 0]] has char poly X^2 - t^-1 X.
        let f = f();
        let mut m = LMatrix::zeros(f, 2);
        m.set(0, 0, LPoly::monomial(f, 1, -1));
        let cp = m.char_poly();
        assert!(cp[0].is_zero());
        assert_eq!(cp[1], LPoly::monomial(f, 4, -1));
        assert_eq!(cp[2], LPoly::constant(f, 1));
    }

    #[test]
    fn char_poly_against_cofactor_expansion() {
        let f = f();
        let mut m = LMatrix::zeros(f, 3);
        let vals = [[1, 2, 0], [0, 3, 4], [2, 0, 1]];
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, LPoly::from_coeffs(f, -1, vec![vals[i][j], (i + j) as u32 % 5]));
            }
        }
        let cp = m.char_poly();
        // constant term is (-1)^3 det(M); trace is -c_2
        let det = {
            let g = |i: usize, j: usize| m.get(i, j).clone();
            g(0, 0).mul(&g(1, 1).mul(&g(2, 2)).sub(&g(1, 2).mul(&g(2, 1))))
                .sub(&g(0, 1).mul(&g(1, 0).mul(&g(2, 2)).sub(&g(1, 2).mul(&g(2, 0)))))
                .add(&g(0, 2).mul(&g(1, 0).mul(&g(2, 1)).sub(&g(1, 1).mul(&g(2, 0)))))
        };
        assert_eq!(cp[0], det.neg());
        let tr = m.get(0, 0).add(m.get(1, 1)).add(m.get(2, 2));
        assert_eq!(cp[2], tr.neg());
    }

    #[test]
    fn rank_over_function_field() {
        let f = f();
        // [[t^-1, 1], [1, t]] has determinant 0: rank 1.
        let mut m = LMatrix::zeros(f, 2);
        m.set(0, 0, LPoly::monomial(f, 1, -1));
        m.set(0, 1, LPoly::constant(f, 1));
        m.set(1, 0, LPoly::constant(f, 1));
        m.set(1, 1, LPoly::monomial(f, 1, 1));
        assert_eq!(m.rank(), 1);
        m.set(1, 1, LPoly::monomial(f, 1, 2));
        assert_eq!(m.rank(), 2);
        assert_eq!(LMatrix::zeros(f, 3).rank(), 0);
    }
}
