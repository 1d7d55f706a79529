//! Arithmetic in the prime field F_p and dense linear algebra over it.

use serde::{Deserialize, Serialize};

/// The prime field Z/pZ. Elements are `u32` values in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    pub fn new(p: u32) -> Self {
        debug_assert!(is_prime(p as u64), "{p} is not prime");
        Fp { p }
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Reduces an arbitrary signed integer into the field.
    pub fn from_i64(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }
}

/// Dense matrix over F_p, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FpMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        FpMatrix { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &FpMatrix, f: Fp) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = FpMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &FpMatrix, f: Fp) -> FpMatrix {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        FpMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FpMatrix, f: Fp) -> FpMatrix {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        FpMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u32, f: Fp) -> FpMatrix {
        FpMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn pow(&self, e: usize, f: Fp) -> FpMatrix {
        let mut acc = FpMatrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    /// Sub-matrix keeping only the listed columns.
    pub fn select_cols(&self, cols: &[usize]) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, f: Fp) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c));
            for j in 0..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        for j in 0..self.cols {
                            let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                            self.set(i, j, v);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: Fp) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis of the right kernel `{v : self * v = 0}`.
    pub fn kernel(&self, f: Fp) -> Vec<Vec<u32>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u32; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, f: Fp) -> Option<FpMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = FpMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let pivots = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = FpMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j));
            }
        }
        Some(out)
    }

    /// One solution of `self * v = rhs`, or `None` if inconsistent.
    pub fn solve(&self, rhs: &[u32], f: Fp) -> Option<Vec<u32>> {
        let mut aug = FpMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, rhs[i]);
        }
        let pivots = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = aug.get(r, self.cols);
        }
        Some(v)
    }
}

/// Whether `v` lies in the span of `basis` (all vectors of equal length).
pub fn in_span(basis: &[Vec<u32>], v: &[u32], f: Fp) -> bool {
    if basis.is_empty() {
        return v.iter().all(|&x| x == 0);
    }
    let rows: Vec<Vec<u32>> = basis.to_vec();
    let m = FpMatrix::from_rows(&rows);
    let mut with = rows;
    with.push(v.to_vec());
    FpMatrix::from_rows(&with).rank(f) == m.rank(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let f = Fp::new(5);
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.inv(2), 3);
        assert_eq!(f.sub(1, 3), 3);
        assert_eq!(f.from_i64(-7), 3);
    }

    #[test]
    fn rank_kernel_inverse() {
        let f = Fp::new(5);
        let m = FpMatrix::from_rows(&[vec![1, 2, 3], vec![0, 1, 1], vec![1, 3, 4]]);
        // third row = first + second
        assert_eq!(m.rank(f), 2);
        let ker = m.kernel(f);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        for i in 0..3 {
            let s = (0..3).fold(0, |acc, j| f.add(acc, f.mul(m.get(i, j), v[j])));
            assert_eq!(s, 0);
        }
        assert!(m.inverse(f).is_none());
        let a = FpMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let ai = a.inverse(f).unwrap();
        assert_eq!(a.mul(&ai, f), FpMatrix::identity(2));
        let sol = a.solve(&[1, 0], f).unwrap();
        assert_eq!(sol, vec![ai.get(0, 0), ai.get(1, 0)]);
    }
}
