//! Characters of graded pieces with values in `F_{l^a}` and eigenspace
//! multiplicities of finite modules.

use crate::apartment::{lattice_bounds, support, ApartmentPoint, GradedSupport, Level};
use crate::error::{DmpError, Result};
use crate::field::is_prime;
use crate::graded::{is_degenerate, GradedElement};
use crate::refine::{fork, DMPPair};
use rand::Rng;
use serde::{Deserialize, Serialize};

const MODULE: &str = "finite_types";

/// The field `F_{l^a}`; elements are integers whose base-`l` digits are
/// polynomial coefficients modulo a primitive polynomial.
#[derive(Debug, Clone)]
pub struct GF {
    pub ell: u32,
    pub a: u32,
    pub order: u32,
    /// Coefficients of the monic modulus, lowest first, without the leading 1.
    pub modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for GF {
    fn eq(&self, o: &Self) -> bool {
        self.ell == o.ell && self.a == o.a && self.modulus == o.modulus
    }
}

impl Eq for GF {}

impl GF {
    pub fn new(ell: u32, a: u32) -> Result<Self> {
        if !is_prime(ell as u64) || a == 0 {
            return Err(DmpError::validation(MODULE, "field", format!("F_{{{ell}^{a}}} is not a finite field")));
        }
        let order = (ell as u64).pow(a);
        if order > 1 << 20 {
            return Err(DmpError::infeasible(MODULE, "field", format!("field of order {order} is too large")));
        }
        let order = order as u32;
        // first monic polynomial of degree a for which t is primitive
        for code in 0..ell.pow(a) {
            let modulus = digits(code, ell, a);
            if a > 1 && modulus[0] == 0 {
                continue;
            }
            if let Some((exp, log)) = Self::tables(ell, a, order, &modulus) {
                return Ok(GF { ell, a, order, modulus, exp, log });
            }
        }
        Err(DmpError::contract(MODULE, "field", "no primitive polynomial found"))
    }

    fn tables(ell: u32, a: u32, order: u32, modulus: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
        let n = order - 1;
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![u32::MAX; order as usize];
        // generator: t for a > 1, a primitive root for a = 1
        let gen = if a == 1 { (2..ell.max(3)).find(|&g| is_primitive_root(g, ell)).unwrap_or(1) } else { ell };
        let mut cur = 1u32;
        for k in 0..n {
            if log[cur as usize] != u32::MAX {
                return None;
            }
            log[cur as usize] = k;
            exp.push(cur);
            cur = if a == 1 { (cur as u64 * gen as u64 % ell as u64) as u32 } else { times_t(cur, ell, a, modulus) };
        }
        (cur == 1).then_some((exp, log))
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        if self.ell == 2 {
            return x ^ y;
        }
        let (dx, dy) = (digits(x, self.ell, self.a), digits(y, self.ell, self.a));
        undigits(dx.iter().zip(&dy).map(|(a, b)| (a + b) % self.ell), self.ell)
    }

    pub fn neg(&self, x: u32) -> u32 {
        if self.ell == 2 {
            return x;
        }
        undigits(digits(x, self.ell, self.a).into_iter().map(|d| (self.ell - d) % self.ell), self.ell)
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let n = self.order - 1;
        self.exp[((self.log[x as usize] + self.log[y as usize]) % n) as usize]
    }

    pub fn inv(&self, x: u32) -> u32 {
        assert!(x != 0, "inverse of zero");
        let n = self.order - 1;
        self.exp[((n - self.log[x as usize]) % n) as usize]
    }

    pub fn pow(&self, x: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if x == 0 {
            return 0;
        }
        let n = (self.order - 1) as u64;
        self.exp[((self.log[x as usize] as u64 * (e % n)) % n) as usize]
    }

    pub fn primitive(&self) -> u32 {
        self.exp[1 % self.exp.len()]
    }

    /// A primitive `p`-th root of unity.
    pub fn root_of_unity(&self, p: u32) -> Result<u32> {
        let n = self.order - 1;
        if p == self.ell || n % p != 0 {
            return Err(DmpError::validation(
                MODULE,
                "build_character",
                format!("{p} does not divide {}^{} - 1", self.ell, self.a),
            ));
        }
        Ok(self.exp[(n / p) as usize])
    }

    /// Evaluates a polynomial with `F_l` coefficients at `x`.
    fn eval(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Field embedding into `big` as a lookup table, if `big` contains `self`.
    pub fn embedding_into(&self, big: &GF) -> Option<Vec<u32>> {
        if self.ell != big.ell || big.a % self.a != 0 {
            return None;
        }
        let mut full = self.modulus.clone();
        full.push(1);
        let root = (0..big.order).find(|&r| big.eval(&full, r) == 0)?;
        let table = (0..self.order)
            .map(|x| {
                let d = digits(x, self.ell, self.a);
                big.eval(&d, root)
            })
            .collect();
        Some(table)
    }
}

fn is_primitive_root(g: u32, p: u32) -> bool {
    let mut cur = 1u64;
    for k in 1..p {
        cur = cur * g as u64 % p as u64;
        if cur == 1 {
            return k == p - 1;
        }
    }
    false
}

fn digits(mut x: u32, ell: u32, a: u32) -> Vec<u32> {
    (0..a)
        .map(|_| {
            let d = x % ell;
            x /= ell;
            d
        })
        .collect()
}

fn undigits(ds: impl DoubleEndedIterator<Item = u32>, ell: u32) -> u32 {
    ds.rev().fold(0, |acc, d| acc * ell + d)
}

fn times_t(x: u32, ell: u32, a: u32, modulus: &[u32]) -> u32 {
    let mut d = digits(x, ell, a);
    let top = d[a as usize - 1];
    for k in (1..a as usize).rev() {
        d[k] = d[k - 1];
    }
    d[0] = 0;
    // t^a = -sum modulus_k t^k
    for k in 0..a as usize {
        d[k] = (d[k] + (ell - modulus[k] % ell) * top) % ell;
    }
    undigits(d.into_iter(), ell)
}

/// Dense square matrix over [`GF`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFMatrix {
    pub n: usize,
    pub data: Vec<u32>,
}

impl GFMatrix {
    pub fn zeros(n: usize) -> Self {
        GFMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &GFMatrix, k: &GF) -> GFMatrix {
        let n = self.n;
        let mut out = GFMatrix::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = k.add(out.get(i, j), k.mul(a, o.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn map(&self, table: &[u32]) -> GFMatrix {
        GFMatrix { n: self.n, data: self.data.iter().map(|&x| table[x as usize]).collect() }
    }

    pub fn inverse(&self, k: &GF) -> Option<GFMatrix> {
        let n = self.n;
        let mut rows: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut r = self.data[i * n..(i + 1) * n].to_vec();
                r.extend((0..n).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let pivots = rref(&mut rows, 2 * n, k);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = GFMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, rows[i][n + j]);
            }
        }
        Some(out)
    }
}

/// Row reduction of `rows` (each of length `cols`); returns pivot columns.
fn rref(rows: &mut [Vec<u32>], cols: usize, k: &GF) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(pr, r);
        let inv = k.inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = k.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let factor = rows[i][c];
                for j in 0..cols {
                    let v = k.sub(rows[i][j], k.mul(factor, rows[r][j]));
                    rows[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// The character `lambda -> zeta^<lambda, phi>` of `g_{x=s}`.
#[derive(Debug, Clone)]
pub struct AdditiveCharacter {
    pub x: ApartmentPoint,
    pub s: Level,
    pub phi: GradedElement,
    pub zeta: u32,
    pub field: GF,
}

impl AdditiveCharacter {
    pub fn base(&self) -> GradedSupport {
        support(&self.x, self.s)
    }

    /// Pairing exponent of the basis vector at `(i, j)` of `g_{x=s}`.
    pub fn exponent_at(&self, i: usize, j: usize) -> u32 {
        self.phi.coeff(j, i)
    }

    /// Value on the `k`-th basis vector of the base group.
    pub fn on_basis(&self, k: usize) -> u32 {
        let (i, j, _) = self.base().positions[k];
        self.field.pow(self.zeta, self.exponent_at(i, j) as u64)
    }

    /// Value on an arbitrary element given by coordinates in the base group.
    pub fn value(&self, lambda: &[u32]) -> u32 {
        let p = self.phi.q as u64;
        let e: u64 = self
            .base()
            .positions
            .iter()
            .zip(lambda)
            .map(|(&(i, j, _), &c)| c as u64 * self.exponent_at(i, j) as u64)
            .sum::<u64>()
            % p;
        self.field.pow(self.zeta, e)
    }

    pub fn is_trivial(&self) -> bool {
        self.phi.is_zero()
    }
}

/// `psi_phi` on `g_{x=s}` for `phi ∈ g_{x=-s}`.
pub fn build_character(x: &ApartmentPoint, s: Level, phi: &GradedElement, zeta: u32, field: &GF) -> Result<AdditiveCharacter> {
    const OP: &str = "build_character";
    if phi.x != *x || phi.degree != -s {
        return Err(DmpError::validation(MODULE, OP, "graded element is not in the dual piece"));
    }
    if field.ell == phi.q {
        return Err(DmpError::validation(MODULE, OP, "coefficient characteristic equals p"));
    }
    field.root_of_unity(phi.q)?;
    if zeta == 0 || zeta == 1 || field.pow(zeta, phi.q as u64) != 1 {
        return Err(DmpError::validation(MODULE, OP, "zeta is not a primitive p-th root of unity"));
    }
    Ok(AdditiveCharacter { x: x.clone(), s, phi: phi.clone(), zeta, field: field.clone() })
}

/// A module for `g_{x=s}` given by a simultaneous eigenbasis, possibly in
/// disguised coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteModule {
    pub x: ApartmentPoint,
    #[serde(with = "crate::rational::serde_q")]
    pub s: Level,
    pub p: u32,
    pub ell: u32,
    pub a: u32,
    /// Per basis vector, the exponent of `zeta` by which each generator acts.
    pub eigen: Vec<Vec<u32>>,
    pub generators: Vec<GFMatrix>,
}

impl FiniteModule {
    pub fn dim(&self) -> usize {
        self.eigen.len()
    }

    pub fn group_dim(&self) -> usize {
        support(&self.x, self.s).dim()
    }

    /// Module with the given eigen table; `disguise` conjugates every generator
    /// by a random invertible matrix.
    pub fn from_eigen<R: Rng>(
        x: &ApartmentPoint,
        s: Level,
        p: u32,
        field: &GF,
        eigen: Vec<Vec<u32>>,
        disguise: Option<&mut R>,
    ) -> Result<Self> {
        let zeta = field.root_of_unity(p)?;
        let gd = support(x, s).dim();
        if eigen.iter().any(|e| e.len() != gd || e.iter().any(|&v| v >= p)) {
            return Err(DmpError::validation(MODULE, "finite_module", "eigen table does not match the group"));
        }
        let d = eigen.len();
        let mut generators: Vec<GFMatrix> = (0..gd)
            .map(|k| {
                let mut g = GFMatrix::zeros(d);
                for (b, e) in eigen.iter().enumerate() {
                    g.set(b, b, field.pow(zeta, e[k] as u64));
                }
                g
            })
            .collect();
        if let Some(rng) = disguise {
            let (pm, pinv) = loop {
                let mut m = GFMatrix::zeros(d);
                for v in m.data.iter_mut() {
                    *v = rng.gen_range(0..field.order);
                }
                if let Some(inv) = m.inverse(field) {
                    break (m, inv);
                }
            };
            generators = generators.iter().map(|g| pm.mul(g, field).mul(&pinv, field)).collect();
        }
        Ok(FiniteModule { x: x.clone(), s, p, ell: field.ell, a: field.a, eigen, generators })
    }

    pub fn regular(x: &ApartmentPoint, s: Level, p: u32, field: &GF) -> Result<Self> {
        let gd = support(x, s).dim();
        let total = (p as u64).pow(gd as u32);
        let eigen = (0..total).map(|idx| exponent_vector(idx, p, gd)).collect();
        Self::from_eigen::<rand::rngs::ThreadRng>(x, s, p, field, eigen, None)
    }

    pub fn trivial(x: &ApartmentPoint, s: Level, p: u32, field: &GF) -> Result<Self> {
        let gd = support(x, s).dim();
        Self::from_eigen::<rand::rngs::ThreadRng>(x, s, p, field, vec![vec![0; gd]], None)
    }

    /// One-dimensional module on which the group acts by `psi_chi`.
    pub fn delta(x: &ApartmentPoint, s: Level, chi: &GradedElement, field: &GF) -> Result<Self> {
        let row = support(x, s).positions.iter().map(|&(i, j, _)| chi.coeff(j, i)).collect();
        Self::from_eigen::<rand::rngs::ThreadRng>(x, s, chi.q, field, vec![row], None)
    }

    pub fn random<R: Rng>(x: &ApartmentPoint, s: Level, p: u32, field: &GF, dim: usize, rng: &mut R) -> Result<Self> {
        let gd = support(x, s).dim();
        let eigen = (0..dim).map(|_| (0..gd).map(|_| rng.gen_range(0..p)).collect()).collect();
        Self::from_eigen(x, s, p, field, eigen, Some(rng))
    }

    pub fn field(&self) -> Result<GF> {
        GF::new(self.ell, self.a)
    }

    /// The same module over a larger field.
    pub fn extend_to(&self, big: &GF) -> Result<FiniteModule> {
        let small = self.field()?;
        let table = small
            .embedding_into(big)
            .ok_or_else(|| DmpError::validation(MODULE, "extend", "target field does not contain the coefficient field"))?;
        Ok(FiniteModule {
            generators: self.generators.iter().map(|g| g.map(&table)).collect(),
            ell: big.ell,
            a: big.a,
            ..self.clone()
        })
    }
}

fn exponent_vector(mut idx: u64, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (idx % p as u64) as u32;
            idx /= p as u64;
            d
        })
        .collect()
}

fn same_group(m: &FiniteModule, x: &ApartmentPoint, s: Level, p: u32, op: &'static str) -> Result<()> {
    if m.x != *x || m.s != s || m.p != p {
        return Err(DmpError::validation(MODULE, op, "module and character live on different groups"));
    }
    Ok(())
}

/// Dimension of `{v : g v = chi(g) v}` for generators `g` in `which`.
fn eigenspace_dim(m: &FiniteModule, values: &[(usize, u32)], field: &GF) -> usize {
    let d = m.dim();
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(values.len() * d);
    for &(k, val) in values {
        let g = &m.generators[k];
        for i in 0..d {
            rows.push((0..d).map(|j| if i == j { field.sub(g.get(i, j), val) } else { g.get(i, j) }).collect());
        }
    }
    d - rref(&mut rows, d, field).len()
}

/// `dim Hom(psi, M)`.
pub fn hom_dim(m: &FiniteModule, psi: &AdditiveCharacter) -> Result<usize> {
    same_group(m, &psi.x, psi.s, psi.phi.q, "hom_dim")?;
    if psi.field.ell != m.ell || psi.field.a != m.a {
        return Err(DmpError::validation(MODULE, "hom_dim", "module and character use different coefficient fields"));
    }
    let values: Vec<(usize, u32)> = (0..m.group_dim()).map(|k| (k, psi.on_basis(k))).collect();
    Ok(eigenspace_dim(m, &values, &psi.field))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForkIdentity {
    /// Multiplicity of the coarse character on the subgroup from the coarse pair.
    pub restricted: usize,
    /// Sum over all extensions.
    pub extension_sum: usize,
    /// Sum over degenerate extensions only.
    pub degenerate_sum: usize,
    pub extensions: usize,
}

impl ForkIdentity {
    pub fn holds(&self) -> bool {
        self.restricted == self.extension_sum
    }
}

/// Compares the coarse multiplicity with the sum over the characters of
/// `g_{x=s}` that extend it.
pub fn fork_identity(m: &FiniteModule, coarse: &DMPPair, x: &ApartmentPoint, s: Level) -> Result<ForkIdentity> {
    const OP: &str = "verify_fork_identity";
    same_group(m, x, s, coarse.q(), OP)?;
    let field = m.field()?;
    let zeta = field.root_of_unity(m.p)?;
    let fk = fork(coarse, x, s)?;
    let base = support(x, s);
    let y_ge = lattice_bounds(&coarse.x, coarse.s, false);
    let sub: Vec<usize> = base
        .positions
        .iter()
        .enumerate()
        .filter(|(_, &(i, j, w))| w >= y_ge[i][j])
        .map(|(k, _)| k)
        .collect();
    let chi0 = build_character(x, s, &fk.base, zeta, &field)?;
    let values: Vec<(usize, u32)> = sub.iter().map(|&k| (k, chi0.on_basis(k))).collect();
    let restricted = eigenspace_dim(m, &values, &field);
    let total = fk.size(coarse.q());
    let mut extension_sum = 0;
    let mut degenerate_sum = 0;
    for idx in 0..total {
        let chi = fk.element(idx);
        let psi = build_character(x, s, &chi, zeta, &field)?;
        // the extension must agree with chi0 on the subgroup
        if sub.iter().any(|&k| psi.on_basis(k) != chi0.on_basis(k)) {
            return Err(DmpError::contract(MODULE, OP, "fork element does not extend the coarse character"));
        }
        let h = hom_dim(m, &psi)?;
        extension_sum += h;
        if is_degenerate(&chi)? {
            degenerate_sum += h;
        }
    }
    Ok(ForkIdentity { restricted, extension_sum, degenerate_sum, extensions: total as usize })
}

pub fn verify_fork_identity(m: &FiniteModule, coarse: &DMPPair, x: &ApartmentPoint, s: Level) -> Result<bool> {
    Ok(fork_identity(m, coarse, x, s)?.holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_arithmetic() {
        let k = GF::new(2, 4).unwrap();
        assert_eq!(k.order, 16);
        for x in 1..16 {
            assert_eq!(k.mul(x, k.inv(x)), 1);
        }
        let z = k.root_of_unity(5).unwrap();
        assert_ne!(z, 1);
        assert_eq!(k.pow(z, 5), 1);
        assert!(k.root_of_unity(7).is_err());
        let k3 = GF::new(3, 2).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(k3.sub(k3.add(x, y), y), x);
            }
        }
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let small = GF::new(2, 4).unwrap();
        let big = GF::new(2, 8).unwrap();
        let t = small.embedding_into(&big).unwrap();
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(t[small.mul(x, y) as usize], big.mul(t[x as usize], t[y as usize]));
                assert_eq!(t[small.add(x, y) as usize], big.add(t[x as usize], t[y as usize]));
            }
        }
    }

    #[test]
    fn character_examples() {
        let k = GF::new(2, 4).unwrap();
        let z = k.root_of_unity(5).unwrap();
        let o = ApartmentPoint::origin(2);
        let zero = GradedElement::zero(&o, qi(-1), 5);
        assert!(build_character(&o, qi(1), &zero, z, &k).unwrap().is_trivial());
        let e12 = GradedElement::new(&o, qi(-1), 5, &[(0, 1, 1)]).unwrap();
        let psi = build_character(&o, qi(1), &e12, z, &k).unwrap();
        // only the (2,1) coordinate of g_{x=1} is seen
        let base = psi.base();
        let k21 = base.index_of(1, 0).unwrap();
        for kk in 0..base.dim() {
            assert_eq!(psi.on_basis(kk), if kk == k21 { z } else { 1 });
        }
        let wrong = GF::new(5, 1).unwrap();
        assert!(build_character(&o, qi(1), &e12, 2, &wrong).is_err());
    }

    #[test]
    fn hom_dim_examples() {
        let k = GF::new(2, 4).unwrap();
        let z = k.root_of_unity(5).unwrap();
        let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
        let s = q(1, 2);
        let reg = FiniteModule::regular(&x, s, 5, &k).unwrap();
        let triv = FiniteModule::trivial(&x, s, 5, &k).unwrap();
        for b in 0..5 {
            for c in 0..5 {
                let phi = GradedElement::new(&x, -s, 5, &[(0, 1, b), (1, 0, c)]).unwrap();
                let psi = build_character(&x, s, &phi, z, &k).unwrap();
                assert_eq!(hom_dim(&reg, &psi).unwrap(), 1);
                assert_eq!(hom_dim(&triv, &psi).unwrap(), usize::from(b == 0 && c == 0));
                let psi2 = build_character(&x, s, &phi, k.pow(z, 2), &k).unwrap();
                assert_eq!(hom_dim(&reg, &psi2).unwrap(), 1);
                assert_eq!(hom_dim(&triv, &psi2).unwrap(), usize::from(b == 0 && c == 0));
            }
        }
    }

    #[test]
    fn random_module_dimensions_add_up() {
        let k = GF::new(2, 4).unwrap();
        let z = k.root_of_unity(5).unwrap();
        let o = ApartmentPoint::origin(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = FiniteModule::random(&o, qi(1), 5, &k, 20, &mut rng).unwrap();
        let mut total = 0;
        for idx in 0..625u32 {
            let v = exponent_vector(idx as u64, 5, 4);
            let sup = support(&o, qi(-1));
            let entries: Vec<(usize, usize, u32)> =
                sup.positions.iter().zip(&v).map(|(&(i, j, _), &c)| (i, j, c)).collect();
            let phi = GradedElement::new(&o, qi(-1), 5, &entries).unwrap();
            total += hom_dim(&m, &build_character(&o, qi(1), &phi, z, &k).unwrap()).unwrap();
        }
        assert_eq!(total, 20);
    }

    #[test]
    fn fork_identity_on_iwahori_instance() {
        let k = GF::new(2, 4).unwrap();
        let y = ApartmentPoint::new(vec![q(3, 8), qi(0)]);
        let coarse = DMPPair::new(q(5, 8), &y, GradedElement::new(&y, q(-5, 8), 5, &[(0, 1, 1)]).unwrap()).unwrap();
        let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
        let reg = FiniteModule::regular(&x, q(1, 2), 5, &k).unwrap();
        let r = fork_identity(&reg, &coarse, &x, q(1, 2)).unwrap();
        assert_eq!((r.restricted, r.extension_sum, r.extensions), (5, 5, 5));
        assert_eq!(r.degenerate_sum, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = FiniteModule::random(&x, q(1, 2), 5, &k, 12, &mut rng).unwrap();
        assert!(verify_fork_identity(&m, &coarse, &x, q(1, 2)).unwrap());
    }
}
