//! Graded pieces `g_{x=d}` over F_q and the groups acting on them.
//!
//! An element of `g_{x=d}` is stored as its coefficient matrix `C` over
//! F_q, supported on the positions of [`GradedSupport`]; its homogeneous
//! lift is `sum C_ij t^(d - x_i + x_j) e_ij`. Conjugating the lift by the
//! formal diagonal `diag(t^x_i)` turns it into `t^d C`, which is why the
//! reductive quotient `G_{x=0}` acts on `C` by ordinary conjugation with
//! block-diagonal matrices (blocks = coordinates sharing `x_i mod 1`).

use crate::apartment::{bounds_le, lattice_bounds, support, ApartmentPoint, GradedSupport, Level};
use crate::error::{DmpError, Result};
use crate::field::{Fp, FpMatrix};
use crate::laurent::{LMatrix, LPoly};
use crate::rational::{is_integer, qi, serde_q, Q};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet, VecDeque};

const MODULE: &str = "graded";

/// An element of the graded piece `g_{x=degree}` over F_q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradedElement {
    pub x: ApartmentPoint,
    #[serde(with = "serde_q")]
    pub degree: Level,
    pub q: u32,
    /// Sparse nonzero coefficients `(i, j, c)`, sorted by position.
    pub coeffs: Vec<(usize, usize, u32)>,
}

impl GradedElement {
    pub fn zero(x: &ApartmentPoint, degree: Level, q: u32) -> Self {
        GradedElement { x: x.clone(), degree, q, coeffs: Vec::new() }
    }

    /// Builds an element from `(i, j, c)` triples, rejecting positions off the support.
    pub fn new(x: &ApartmentPoint, degree: Level, q: u32, entries: &[(usize, usize, u32)]) -> Result<Self> {
        if !crate::field::is_prime(q as u64) {
            return Err(DmpError::validation(MODULE, "graded_element", format!("q = {q} is not prime")));
        }
        let sup = support(x, degree);
        let mut map: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for &(i, j, c) in entries {
            if sup.index_of(i, j).is_none() {
                return Err(DmpError::validation(
                    MODULE,
                    "graded_element",
                    format!("position ({}, {}) is not in the support of g_{{x={}}}", i + 1, j + 1, degree),
                ));
            }
            let e = map.entry((i, j)).or_insert(0);
            *e = (*e + c) % q;
        }
        Ok(Self::from_map(x, degree, q, map))
    }

    fn from_map(x: &ApartmentPoint, degree: Level, q: u32, map: BTreeMap<(usize, usize), u32>) -> Self {
        let coeffs = map.into_iter().filter(|&(_, c)| c != 0).map(|((i, j), c)| (i, j, c)).collect();
        GradedElement { x: x.clone(), degree, q, coeffs }
    }

    /// Element with coefficient matrix `c`; entries off the support must vanish.
    pub fn from_matrix(x: &ApartmentPoint, degree: Level, q: u32, c: &FpMatrix) -> Result<Self> {
        let mut entries = Vec::new();
        for i in 0..c.rows {
            for j in 0..c.cols {
                let v = c.get(i, j);
                if v != 0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::new(x, degree, q, &entries)
    }

    /// Element with the given coordinates in support order.
    pub fn from_vector(x: &ApartmentPoint, degree: Level, q: u32, v: &[u32]) -> Self {
        let sup = support(x, degree);
        let map = sup.positions.iter().zip(v).map(|(&(i, j, _), &c)| ((i, j), c % q)).collect();
        Self::from_map(x, degree, q, map)
    }

    pub fn n(&self) -> usize {
        self.x.dim()
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.q)
    }

    pub fn support(&self) -> GradedSupport {
        support(&self.x, self.degree)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> u32 {
        self.coeffs.iter().find(|&&(a, b, _)| a == i && b == j).map_or(0, |&(_, _, c)| c)
    }

    /// Coordinates in support order.
    pub fn to_vector(&self) -> Vec<u32> {
        self.support().positions.iter().map(|&(i, j, _)| self.coeff(i, j)).collect()
    }

    pub fn matrix(&self) -> FpMatrix {
        let n = self.n();
        let mut m = FpMatrix::zeros(n, n);
        for &(i, j, c) in &self.coeffs {
            m.set(i, j, c);
        }
        m
    }

    /// `g C g^-1` for `g` in the reductive quotient at `x`.
    pub fn conjugate(&self, g: &FpMatrix, g_inv: &FpMatrix) -> GradedElement {
        let f = self.field();
        let c = g.mul(&self.matrix(), f).mul(g_inv, f);
        GradedElement::from_matrix(&self.x, self.degree, self.q, &c)
            .expect("conjugation by the reductive quotient preserves graded pieces")
    }

    pub fn add(&self, other: &GradedElement) -> GradedElement {
        let f = self.field();
        let c = self.matrix().add(&other.matrix(), f);
        GradedElement::from_matrix(&self.x, self.degree, self.q, &c).expect("sum of graded elements")
    }
}

/// Laurent-monomial matrix: entry `(i, j)` is `c t^w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomLift {
    pub n: usize,
    pub q: u32,
    /// Nonzero entries `(i, j, c, w)`.
    pub entries: Vec<(usize, usize, u32, i64)>,
}

impl HomLift {
    pub fn zero(n: usize, q: u32) -> Self {
        HomLift { n, q, entries: Vec::new() }
    }

    pub fn to_matrix(&self) -> LMatrix {
        let f = Fp::new(self.q);
        let mut m = LMatrix::zeros(f, self.n);
        for &(i, j, c, w) in &self.entries {
            m.set(i, j, m.get(i, j).add(&LPoly::monomial(f, c, w)));
        }
        m
    }

    /// Reads a monomial matrix back; `None` if some entry has two terms.
    pub fn from_matrix(m: &LMatrix, q: u32) -> Option<Self> {
        let mut entries = Vec::new();
        for i in 0..m.n {
            for j in 0..m.n {
                let terms: Vec<(i64, u32)> = m.get(i, j).terms().collect();
                match terms.as_slice() {
                    [] => {}
                    [(w, c)] => entries.push((i, j, *c, *w)),
                    _ => return None,
                }
            }
        }
        Some(HomLift { n: m.n, q, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether every entry has degree `d` at `x`.
    pub fn is_homogeneous(&self, x: &ApartmentPoint, d: Level) -> bool {
        self.entries.iter().all(|&(i, j, _, w)| qi(w) + x.coord(i) - x.coord(j) == d)
    }
}

/// The homogeneous lift `sum c_ij t^(d - x_i + x_j) e_ij`.
pub fn homogeneous_lift(phi: &GradedElement) -> HomLift {
    let sup = phi.support();
    let entries = phi
        .coeffs
        .iter()
        .map(|&(i, j, c)| (i, j, c, sup.exponent(i, j).expect("coefficient on support")))
        .collect();
    HomLift { n: phi.n(), q: phi.q, entries }
}

/// Whether the characteristic polynomial of `m` is `X^n`.
pub fn is_nilpotent_matrix(m: &LMatrix) -> bool {
    let cp = m.char_poly();
    cp[..m.n].iter().all(LPoly::is_zero)
}

/// Degeneracy of `phi ∈ g_{x=-s}`, `s > 0`.
///
/// Decided by nilpotence of the homogeneous lift: for GL_n a coset
/// `phi + g_{x>-s}` contains a nilpotent element exactly when the graded
/// element itself is nilpotent.
pub fn is_degenerate(phi: &GradedElement) -> Result<bool> {
    if phi.degree >= qi(0) {
        return Err(DmpError::validation(
            MODULE,
            "is_degenerate",
            format!("degree {} is not negative; types exist only at levels s > 0", phi.degree),
        ));
    }
    Ok(is_nilpotent_matrix(&homogeneous_lift(phi).to_matrix()))
}

/// Orbit invariant of a graded element under `G_{x=0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankProfile {
    /// Ranks over F_q(t) of `Phi, Phi^2, .., Phi^n`.
    pub powers: Vec<usize>,
    /// `(class index, k, rank)`: rank of `C^k` restricted to the block of
    /// coordinates in the given residue class.
    pub blocks: Vec<(usize, usize, usize)>,
}

impl RankProfile {
    pub fn is_nilpotent(&self) -> bool {
        self.powers.last().map_or(true, |&r| r == 0)
    }
}

pub fn rank_profile(phi: &GradedElement) -> RankProfile {
    let f = phi.field();
    let n = phi.n();
    let lift = homogeneous_lift(phi).to_matrix();
    let mut powers = Vec::with_capacity(n);
    let mut acc = lift.clone();
    for k in 1..=n {
        if k > 1 {
            acc = acc.mul(&lift);
        }
        powers.push(acc.rank());
    }
    let rq = ReductiveQuotient::at(&phi.x);
    let c = phi.matrix();
    let mut blocks = Vec::new();
    let mut ck = FpMatrix::identity(n);
    for k in 1..=n {
        ck = ck.mul(&c, f);
        for (b, cols) in rq.blocks.iter().enumerate() {
            blocks.push((b, k, ck.select_cols(cols).rank(f)));
        }
    }
    RankProfile { powers, blocks }
}

/// The reductive quotient `G_{x=0}`: block-diagonal invertible matrices,
/// one block per residue class of `x_i mod 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductiveQuotient {
    pub x: ApartmentPoint,
    #[serde(with = "serde_q::vec")]
    pub classes: Vec<Q>,
    pub blocks: Vec<Vec<usize>>,
}

impl ReductiveQuotient {
    pub fn at(x: &ApartmentPoint) -> Self {
        let res = x.residue_classes();
        let mut classes: Vec<Q> = res.clone();
        classes.sort();
        classes.dedup();
        let blocks = classes
            .iter()
            .map(|c| (0..x.dim()).filter(|&i| res[i] == *c).collect())
            .collect();
        ReductiveQuotient { x: x.clone(), classes, blocks }
    }

    /// Uniformly random element as `(g, g^-1)`.
    pub fn random_element<R: Rng>(&self, f: Fp, rng: &mut R) -> (FpMatrix, FpMatrix) {
        let n = self.x.dim();
        loop {
            let mut g = FpMatrix::zeros(n, n);
            for block in &self.blocks {
                for &i in block {
                    for &j in block {
                        g.set(i, j, rng.gen_range(0..f.p()));
                    }
                }
            }
            if let Some(inv) = g.inverse(f) {
                return (g, inv);
            }
        }
    }
}

/// Image of `G_{y>0}` in `G_{x=0}`: a pattern group generated by the
/// elementary matrices `1 + a e_ij` for the listed directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentImage {
    pub y: ApartmentPoint,
    pub x: ApartmentPoint,
    pub directions: Vec<(usize, usize)>,
}

impl UnipotentImage {
    pub fn new(y: &ApartmentPoint, x: &ApartmentPoint) -> Self {
        let n = x.dim();
        let mut directions = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // t^w e_ij with w = x_j - x_i integral lies in G_{x>=0} \ G_{x>0};
                // it comes from G_{y>0} when w + y_i - y_j > 0.
                let w = x.coord(j) - x.coord(i);
                if is_integer(w) && w + y.coord(i) - y.coord(j) > qi(0) {
                    directions.push((i, j));
                }
            }
        }
        UnipotentImage { y: y.clone(), x: x.clone(), directions }
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Both,
    OrbitSearch,
    DimensionCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCount {
    /// Orbit size `N = q^exponent`.
    pub size: u64,
    pub exponent: u32,
    /// Orbit members when enumerated.
    pub members: Option<Vec<GradedElement>>,
    pub method: CountMethod,
}

/// Default cap on breadth-first orbit closure.
pub const ORBIT_SEARCH_BOUND: usize = 100_000;

/// Size of the orbit of `phi` under `im(G_{y>0} -> G_{x=0})`.
pub fn unipotent_orbit_count(
    y: &ApartmentPoint,
    x: &ApartmentPoint,
    phi: &GradedElement,
    search_bound: usize,
) -> Result<OrbitCount> {
    const OP: &str = "unipotent_orbit_count";
    if phi.x != *x {
        return Err(DmpError::validation(MODULE, OP, "graded element is not based at x"));
    }
    // G_{x>0} ⊂ G_{y>0} ⊂ G_{y>=0} ⊂ G_{x>=0}
    let (xg, yg) = (lattice_bounds(x, qi(0), true), lattice_bounds(y, qi(0), true));
    let (xe, ye) = (lattice_bounds(x, qi(0), false), lattice_bounds(y, qi(0), false));
    if !(bounds_le(&yg, &xg) && bounds_le(&ye, &yg) && bounds_le(&xe, &ye)) {
        return Err(DmpError::validation(MODULE, OP, "parahoric inclusions between y and x fail"));
    }
    let f = phi.field();
    let image = UnipotentImage::new(y, x);
    let bfs = orbit_search(&image, phi, search_bound);
    let q = phi.q as u64;
    let dimension = if (phi.q as usize) > phi.n() || bfs.is_none() {
        Some(dimension_count(&image, phi, f))
    } else {
        None
    };
    match (bfs, dimension) {
        (Some(members), Some(e)) => {
            let size = q.pow(e);
            if members.len() as u64 != size {
                return Err(DmpError::contract(
                    MODULE,
                    OP,
                    format!("orbit search found {} elements, dimension count gives q^{e}", members.len()),
                ));
            }
            Ok(OrbitCount { size, exponent: e, members: Some(members), method: CountMethod::Both })
        }
        (Some(members), None) => {
            let size = members.len() as u64;
            let exponent = exact_log(size, q).ok_or_else(|| {
                DmpError::contract(MODULE, OP, format!("orbit size {size} is not a power of {q}"))
            })?;
            Ok(OrbitCount { size, exponent, members: Some(members), method: CountMethod::OrbitSearch })
        }
        (None, Some(e)) => {
            if (phi.q as usize) <= phi.n() {
                return Err(DmpError::infeasible(MODULE, OP, "orbit too large to enumerate and q <= n"));
            }
            Ok(OrbitCount { size: q.pow(e), exponent: e, members: None, method: CountMethod::DimensionCount })
        }
        (None, None) => Err(DmpError::infeasible(MODULE, OP, "orbit too large to enumerate and q <= n")),
    }
}

fn exact_log(mut v: u64, base: u64) -> Option<u32> {
    let mut e = 0;
    while v > 1 {
        if v % base != 0 {
            return None;
        }
        v /= base;
        e += 1;
    }
    (v == 1).then_some(e)
}

fn orbit_search(image: &UnipotentImage, phi: &GradedElement, bound: usize) -> Option<Vec<GradedElement>> {
    let f = phi.field();
    let n = phi.n();
    let gens: Vec<(FpMatrix, FpMatrix)> = image
        .directions
        .iter()
        .map(|&(i, j)| {
            let mut g = FpMatrix::identity(n);
            g.set(i, j, 1);
            let mut gi = FpMatrix::identity(n);
            gi.set(i, j, f.neg(1));
            (g, gi)
        })
        .collect();
    let mut seen: HashSet<GradedElement> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(phi.clone());
    queue.push_back(phi.clone());
    while let Some(cur) = queue.pop_front() {
        for (g, gi) in &gens {
            let next = cur.conjugate(g, gi);
            if seen.insert(next.clone()) {
                if seen.len() > bound {
                    return None;
                }
                queue.push_back(next);
            }
        }
    }
    let mut members: Vec<GradedElement> = seen.into_iter().collect();
    members.sort();
    Some(members)
}

/// `dim u - dim {X in u : XC = CX}` where `u` is spanned by the directions.
fn dimension_count(image: &UnipotentImage, phi: &GradedElement, f: Fp) -> u32 {
    let n = phi.n();
    let c = phi.matrix();
    let d = image.dim();
    // Columns: coordinates of X; rows: entries of XC - CX.
    let mut m = FpMatrix::zeros(n * n, d);
    for (col, &(i, j)) in image.directions.iter().enumerate() {
        let mut e = FpMatrix::zeros(n, n);
        e.set(i, j, 1);
        let comm = e.mul(&c, f).sub(&c.mul(&e, f), f);
        for r in 0..n * n {
            m.set(r, col, comm.data[r]);
        }
    }
    m.rank(f) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn iwahori() -> ApartmentPoint {
        ApartmentPoint::new(vec![q(1, 2), qi(0)])
    }

    #[test]
    fn degeneracy_examples() {
        let o = ApartmentPoint::origin(2);
        let e12 = GradedElement::new(&o, qi(-1), 5, &[(0, 1, 1)]).unwrap();
        assert!(is_degenerate(&e12).unwrap());
        let e11 = GradedElement::new(&o, qi(-1), 5, &[(0, 0, 1)]).unwrap();
        assert!(!is_degenerate(&e11).unwrap());
        for b in 0..5 {
            for c in 0..5 {
                let phi = GradedElement::new(&iwahori(), q(-1, 2), 5, &[(0, 1, b), (1, 0, c)]).unwrap();
                assert_eq!(is_degenerate(&phi).unwrap(), b * c == 0, "b={b} c={c}");
            }
        }
        let pos = GradedElement::zero(&o, qi(1), 5);
        assert!(matches!(is_degenerate(&pos), Err(DmpError::Validation { .. })));
    }

    #[test]
    fn off_support_rejected() {
        assert!(GradedElement::new(&iwahori(), q(-1, 2), 5, &[(0, 0, 1)]).is_err());
    }

    #[test]
    fn lift_examples() {
        let zero = GradedElement::zero(&iwahori(), q(-1, 2), 5);
        assert!(homogeneous_lift(&zero).is_zero());
        let phi = GradedElement::new(&iwahori(), q(-1, 2), 5, &[(0, 1, 2), (1, 0, 3)]).unwrap();
        let lift = homogeneous_lift(&phi);
        assert_eq!(lift.entries, vec![(0, 1, 2, -1), (1, 0, 3, 0)]);
        assert!(lift.is_homogeneous(&iwahori(), q(-1, 2)));
        let o3 = ApartmentPoint::origin(3);
        let reg = GradedElement::new(&o3, qi(-1), 5, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(homogeneous_lift(&reg).entries, vec![(0, 1, 1, -1), (1, 2, 1, -1)]);
    }

    #[test]
    fn profile_examples() {
        let o = ApartmentPoint::origin(2);
        let zero = GradedElement::zero(&o, qi(-1), 5);
        assert_eq!(rank_profile(&zero).powers, vec![0, 0]);
        let reg = GradedElement::new(&o, qi(-1), 5, &[(0, 1, 1)]).unwrap();
        assert_eq!(rank_profile(&reg).powers, vec![1, 0]);
        let o3 = ApartmentPoint::origin(3);
        let reg3 = GradedElement::new(&o3, qi(-1), 5, &[(0, 1, 3), (1, 2, 4)]).unwrap();
        assert_eq!(rank_profile(&reg3).powers, vec![2, 1, 0]);
    }

    #[test]
    fn reductive_quotient_blocks() {
        let rq = ReductiveQuotient::at(&ApartmentPoint::new(vec![q(1, 2), q(3, 2), qi(0)]));
        assert_eq!(rq.blocks, vec![vec![2], vec![0, 1]]);
    }

    #[test]
    fn orbit_count_examples() {
        let x = iwahori();
        let zero = GradedElement::zero(&x, q(-1, 2), 5);
        let y = ApartmentPoint::new(vec![q(3, 8), qi(0)]);
        assert_eq!(unipotent_orbit_count(&y, &x, &zero, ORBIT_SEARCH_BOUND).unwrap().size, 1);
        let phi = GradedElement::new(&x, q(-1, 2), 5, &[(0, 1, 1)]).unwrap();
        let c = unipotent_orbit_count(&y, &x, &phi, ORBIT_SEARCH_BOUND).unwrap();
        assert_eq!(c.size, 1);
        assert_eq!(c.method, CountMethod::Both);
    }

    #[test]
    fn orbit_count_gl3_interior_point() {
        // x hyperspecial, y = (u/2, 0, -u/2) normalised; U is upper unitriangular.
        let x = ApartmentPoint::origin(3);
        let y = ApartmentPoint::new(vec![q(1, 4), qi(0), q(-1, 4)]);
        let img = UnipotentImage::new(&y, &x);
        assert_eq!(img.directions, vec![(0, 1), (0, 2), (1, 2)]);
        let phi = GradedElement::new(&x, qi(-1), 7, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let c = unipotent_orbit_count(&y, &x, &phi, ORBIT_SEARCH_BOUND).unwrap();
        assert_eq!(c.method, CountMethod::Both);
        // The regular nilpotent e12 + e23 has a 2-dimensional centraliser in u,
        // so the orbit is q^(3-2).
        assert_eq!(c.exponent, 1);
        assert_eq!(c.size, 7);
    }
}
