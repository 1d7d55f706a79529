//! Nilpotent orbits of `gl_n` labelled by partitions.

use crate::apartment::{lattice_bounds, ApartmentPoint, Level};
use crate::error::{DmpError, Result};
use crate::field::{Fp, FpMatrix};
use crate::graded::{homogeneous_lift, is_degenerate, GradedElement, HomLift, ReductiveQuotient};
use crate::laurent::{LMatrix, LPoly};
use crate::rational::{is_integer, qi, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const MODULE: &str = "orbits";

/// A nilpotent orbit, named by its Jordan type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct OrbitLabel {
    partition: Vec<usize>,
}

impl TryFrom<Vec<usize>> for OrbitLabel {
    type Error = DmpError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        OrbitLabel::new(v)
    }
}

impl From<OrbitLabel> for Vec<usize> {
    fn from(o: OrbitLabel) -> Self {
        o.partition
    }
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.partition.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl OrbitLabel {
    pub fn new(partition: Vec<usize>) -> Result<Self> {
        if partition.is_empty()
            || partition.contains(&0)
            || partition.windows(2).any(|w| w[0] < w[1])
        {
            return Err(DmpError::validation(
                MODULE,
                "orbit_label",
                format!("{partition:?} is not a weakly decreasing list of positive integers"),
            ));
        }
        Ok(OrbitLabel { partition })
    }

    pub fn zero(n: usize) -> Self {
        OrbitLabel { partition: vec![1; n] }
    }

    pub fn regular(n: usize) -> Self {
        OrbitLabel { partition: vec![n] }
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.partition.iter().sum()
    }

    pub fn transpose(&self) -> Vec<usize> {
        let largest = self.partition[0];
        (1..=largest).map(|k| self.partition.iter().filter(|&&p| p >= k).count()).collect()
    }

    /// Dimension `n^2 - sum (transpose parts)^2` of the orbit.
    pub fn dim(&self) -> usize {
        let n = self.n();
        n * n - self.transpose().iter().map(|c| c * c).sum::<usize>()
    }

    fn partial_sums(&self) -> Vec<usize> {
        let n = self.n();
        (1..=n).map(|k| self.partition.iter().take(k).sum()).collect()
    }
}

/// All partitions of `n`, in reverse lexicographic order (regular first).
pub fn all_orbits(n: usize) -> Vec<OrbitLabel> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<OrbitLabel>) {
        if rest == 0 {
            out.push(OrbitLabel { partition: cur.clone() });
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Closure order: `lambda <= mu` iff every partial sum of `lambda` is at most that of `mu`.
pub fn dominance_leq(lambda: &OrbitLabel, mu: &OrbitLabel) -> Result<bool> {
    if lambda.n() != mu.n() {
        return Err(DmpError::validation(
            MODULE,
            "dominance_leq",
            format!("partitions of {} and {} are not comparable", lambda.n(), mu.n()),
        ));
    }
    Ok(lambda.partial_sums().iter().zip(mu.partial_sums()).all(|(a, b)| *a <= b))
}

/// Orbits in an order extending dominance: smaller orbits come first.
pub fn linear_extension(orbits: &[OrbitLabel]) -> Vec<OrbitLabel> {
    let mut out = orbits.to_vec();
    // dim is strictly monotone along dominance, partial sums break ties
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.partial_sums().cmp(&b.partial_sums())));
    out
}

/// Jordan type of a nilpotent matrix over F_q(t).
pub fn jordan_type_matrix(m: &LMatrix) -> Result<OrbitLabel> {
    let n = m.n;
    let cp = m.char_poly();
    if let Some(k) = (0..n).find(|&k| !cp[k].is_zero()) {
        return Err(DmpError::validation(
            MODULE,
            "jordan_type",
            format!("not nilpotent: coefficient of X^{k} in the characteristic polynomial is {:?}", cp[k]),
        ));
    }
    let mut ranks = vec![n];
    let mut acc = m.clone();
    for k in 1..=n {
        if k > 1 {
            acc = acc.mul(m);
        }
        ranks.push(acc.rank());
    }
    ranks.push(0);
    // number of parts >= k is ranks[k-1] - ranks[k]
    let mut partition = Vec::new();
    for k in (1..=n).rev() {
        let exact = (ranks[k - 1] - ranks[k]) - (ranks[k] - ranks[k + 1]);
        partition.extend(std::iter::repeat(k).take(exact));
    }
    OrbitLabel::new(partition)
}

pub fn jordan_type(phi: &HomLift) -> Result<OrbitLabel> {
    jordan_type_matrix(&phi.to_matrix())
}

/// The orbit of the homogeneous lift of a degenerate `phi ∈ g_{x=-s}`.
pub fn debacker_lift(s: Level, x: &ApartmentPoint, phi: &GradedElement) -> Result<OrbitLabel> {
    check_base(s, x, phi, "debacker_lift")?;
    if !is_degenerate(phi)? {
        return Err(DmpError::validation(MODULE, "debacker_lift", "graded element is not degenerate"));
    }
    jordan_type(&homogeneous_lift(phi))
}

fn check_base(s: Level, x: &ApartmentPoint, phi: &GradedElement, op: &'static str) -> Result<()> {
    if phi.x != *x || phi.degree != -s {
        return Err(DmpError::validation(
            MODULE,
            op,
            format!("graded element lives in g_{{x={}}}, expected degree {}", phi.degree, -s),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SL2Triple {
    pub phi: HomLift,
    pub h: HomLift,
    pub e: HomLift,
}

impl SL2Triple {
    /// Checks `[H,E] = 2E`, `[H,Phi] = -2Phi`, `[E,Phi] = H`.
    pub fn brackets_hold(&self) -> bool {
        let (phi, h, e) = (self.phi.to_matrix(), self.h.to_matrix(), self.e.to_matrix());
        h.bracket(&e) == e.scale(2) && h.bracket(&phi) == phi.scale(self.phi.q - 2) && e.bracket(&phi) == h
    }
}

/// Completes a homogeneous nilpotent `Phi ∈ g_{x=-s}` to a graded sl2-triple.
///
/// The coefficient matrix `C` is put in graded Jordan form (each chain
/// vector lies in a single residue class), the standard triple is written
/// down chain by chain and conjugated back.
pub fn sl2_complete(x: &ApartmentPoint, s: Level, phi: &HomLift) -> Result<SL2Triple> {
    const OP: &str = "sl2_complete";
    let n = x.dim();
    if phi.n != n {
        return Err(DmpError::validation(MODULE, OP, "matrix size does not match the base point"));
    }
    if (phi.q as usize) <= 2 * n {
        return Err(DmpError::validation(MODULE, OP, format!("requires q > 2n, got q = {}", phi.q)));
    }
    if !phi.is_homogeneous(x, -s) {
        return Err(DmpError::validation(MODULE, OP, format!("lift is not homogeneous of degree {}", -s)));
    }
    let f = Fp::new(phi.q);
    let mut c = FpMatrix::zeros(n, n);
    for &(i, j, v, _) in &phi.entries {
        c.set(i, j, v);
    }
    if !c.pow(n, f).is_zero() {
        return Err(DmpError::validation(MODULE, OP, "lift is not nilpotent"));
    }
    let rq = ReductiveQuotient::at(x);
    let chains = graded_jordan_chains(&c, &rq, -s, f);
    let mut p = FpMatrix::zeros(n, n);
    let mut h_diag = vec![0u32; n];
    let mut e_jordan = FpMatrix::zeros(n, n);
    let mut col = 0;
    for chain in &chains {
        let l = chain.len() as i64;
        for (k, v) in chain.iter().enumerate() {
            for (i, &vi) in v.iter().enumerate() {
                p.set(i, col + k, vi);
            }
            h_diag[col + k] = f.from_i64(l - 1 - 2 * k as i64);
            if k > 0 {
                // E e_{k+1} = k (L - k) e_k, 1-based
                e_jordan.set(col + k - 1, col + k, f.from_i64(k as i64 * (l - k as i64)));
            }
        }
        col += chain.len();
    }
    let p_inv = p.inverse(f).ok_or_else(|| DmpError::contract(MODULE, OP, "graded Jordan basis is singular"))?;
    let mut h_jordan = FpMatrix::zeros(n, n);
    for (i, &v) in h_diag.iter().enumerate() {
        h_jordan.set(i, i, v);
    }
    let h = p.mul(&h_jordan, f).mul(&p_inv, f);
    let e = p.mul(&e_jordan, f).mul(&p_inv, f);
    let triple = SL2Triple {
        phi: phi.clone(),
        h: lift_coefficients(x, qi(0), &h, phi.q, OP)?,
        e: lift_coefficients(x, s, &e, phi.q, OP)?,
    };
    if !triple.brackets_hold() {
        return Err(DmpError::contract(MODULE, OP, "bracket identities fail"));
    }
    Ok(triple)
}

fn lift_coefficients(x: &ApartmentPoint, d: Q, c: &FpMatrix, q: u32, op: &'static str) -> Result<HomLift> {
    let mut entries = Vec::new();
    for i in 0..c.rows {
        for j in 0..c.cols {
            let v = c.get(i, j);
            if v == 0 {
                continue;
            }
            let w = d - x.coord(i) + x.coord(j);
            if !is_integer(w) {
                return Err(DmpError::contract(MODULE, op, "completion left the graded piece"));
            }
            entries.push((i, j, v, w.to_integer()));
        }
    }
    Ok(HomLift { n: c.rows, q, entries })
}

/// Jordan chains `v, Cv, .., C^(L-1) v` with each `v` in one residue class.
fn graded_jordan_chains(c: &FpMatrix, rq: &ReductiveQuotient, d: Q, f: Fp) -> Vec<Vec<Vec<u32>>> {
    let n = c.rows;
    let nb = rq.blocks.len();
    // C maps class a to the class shifted by d
    let shift_back = |b: usize| -> Option<usize> {
        (0..nb).find(|&a| {
            let target = rq.classes[a] + d;
            let t = target - Q::from_integer(target.floor().to_integer());
            t == rq.classes[b]
        })
    };
    let restricted_kernel = |k: usize, b: usize| -> Vec<Vec<u32>> {
        let ck = c.pow(k, f);
        let cols = &rq.blocks[b];
        ck.select_cols(cols)
            .kernel(f)
            .into_iter()
            .map(|v| {
                let mut full = vec![0u32; n];
                for (t, &ci) in cols.iter().enumerate() {
                    full[ci] = v[t];
                }
                full
            })
            .collect()
    };
    let apply = |v: &[u32]| -> Vec<u32> {
        (0..n).map(|i| (0..n).fold(0, |acc, j| f.add(acc, f.mul(c.get(i, j), v[j])))).collect()
    };
    let mut chains = Vec::new();
    for k in (1..=n).rev() {
        for b in 0..nb {
            let mut span: Vec<Vec<u32>> = if k > 1 { restricted_kernel(k - 1, b) } else { Vec::new() };
            if let Some(a) = shift_back(b) {
                span.extend(restricted_kernel(k + 1, a).iter().map(|v| apply(v)));
            }
            let base_rank = rank_of(&span, n, f);
            let mut cur_rank = base_rank;
            for v in restricted_kernel(k, b) {
                let mut trial = span.clone();
                trial.push(v.clone());
                let r = rank_of(&trial, n, f);
                if r > cur_rank {
                    span = trial;
                    cur_rank = r;
                    let mut chain = vec![v.clone()];
                    for _ in 1..k {
                        let next = apply(chain.last().expect("nonempty chain"));
                        chain.push(next);
                    }
                    chains.push(chain);
                }
            }
        }
    }
    chains
}

fn rank_of(vs: &[Vec<u32>], n: usize, f: Fp) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<u32>> = vs.to_vec();
    let m = FpMatrix::from_rows(&rows);
    debug_assert_eq!(m.cols, n);
    m.rank(f)
}

/// Result of a randomized minimality run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub lift: OrbitLabel,
    pub samples: usize,
    pub nilpotent_samples: usize,
    pub counterexample: Option<OrbitLabel>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Randomized falsification of the minimality of the lift; see [`minimality_report`].
pub fn minimality_probe(s: Level, x: &ApartmentPoint, phi: &GradedElement, samples: usize, depth: i64, seed: u64) -> Result<bool> {
    Ok(minimality_report(s, x, phi, samples, depth, seed)?.passed())
}

/// Draws elements of `phi + g_{x>-s}` with entries of t-degree at most
/// `depth` and compares the Jordan type of every nilpotent one with the lift.
///
/// Half the samples are uniform; the other half are conditioned to be
/// nilpotent by solving for a correction that makes `k^-1 X k` strictly
/// upper triangular for a random `k ∈ GL_n(F_q[t])`.
pub fn minimality_report(
    s: Level,
    x: &ApartmentPoint,
    phi: &GradedElement,
    samples: usize,
    depth: i64,
    seed: u64,
) -> Result<ProbeReport> {
    let lift = debacker_lift(s, x, phi)?;
    let f = phi.field();
    let n = x.dim();
    let bounds = lattice_bounds(x, -s, true);
    let base = homogeneous_lift(phi).to_matrix();
    let unknowns: Vec<(usize, usize, i64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .flat_map(|(i, j)| (bounds[i][j]..=depth).map(move |e| (i, j, e)))
        .collect();
    let outcomes: Vec<Option<OrbitLabel>> = (0..samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(idx as u64));
            let sample = if idx % 2 == 0 {
                Some(uniform_sample(&base, &unknowns, f, &mut rng))
            } else {
                nilpotent_sample(&base, &unknowns, f, &mut rng)
            }?;
            let cp = sample.char_poly();
            if cp[..n].iter().any(|c| !c.is_zero()) {
                return None;
            }
            jordan_type_matrix(&sample).ok()
        })
        .collect();
    let mut nilpotent_samples = 0;
    let mut counterexample = None;
    for o in outcomes.into_iter().flatten() {
        nilpotent_samples += 1;
        if counterexample.is_none() && !dominance_leq(&lift, &o)? {
            counterexample = Some(o);
        }
    }
    Ok(ProbeReport { lift, samples, nilpotent_samples, counterexample })
}

fn unit(f: Fp, n: usize, i: usize, j: usize, e: i64) -> LMatrix {
    let mut m = LMatrix::zeros(f, n);
    m.set(i, j, LPoly::monomial(f, 1, e));
    m
}

fn uniform_sample<R: Rng>(base: &LMatrix, unknowns: &[(usize, usize, i64)], f: Fp, rng: &mut R) -> LMatrix {
    let mut m = base.clone();
    for &(i, j, e) in unknowns {
        let c = rng.gen_range(0..f.p());
        if c != 0 {
            m.set(i, j, m.get(i, j).add(&LPoly::monomial(f, c, e)));
        }
    }
    m
}

/// Random `k` and `k^-1` as products of elementary and diagonal matrices over F_q[t].
fn random_polynomial_conjugator<R: Rng>(n: usize, f: Fp, rng: &mut R) -> (LMatrix, LMatrix) {
    let mut k = LMatrix::identity(f, n);
    let mut k_inv = LMatrix::identity(f, n);
    let factors = rng.gen_range(0..=2 * n);
    for _ in 0..factors {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let a = rng.gen_range(1..f.p());
        let e = rng.gen_range(0..=1);
        let mut el = LMatrix::identity(f, n);
        el.set(i, j, LPoly::monomial(f, a, e));
        let mut el_inv = LMatrix::identity(f, n);
        el_inv.set(i, j, LPoly::monomial(f, f.neg(a), e));
        k = k.mul(&el);
        k_inv = el_inv.mul(&k_inv);
    }
    (k, k_inv)
}

fn nilpotent_sample<R: Rng>(base: &LMatrix, unknowns: &[(usize, usize, i64)], f: Fp, rng: &mut R) -> Option<LMatrix> {
    let n = base.n;
    if n < 2 {
        return None;
    }
    let (k, k_inv) = random_polynomial_conjugator(n, f, rng);
    let conj = |m: &LMatrix| k_inv.mul(m).mul(&k);
    let target = conj(base);
    let images: Vec<LMatrix> = unknowns.iter().map(|&(i, j, e)| conj(&unit(f, n, i, j, e))).collect();
    // one equation per (row, col, degree) in the lower triangle with diagonal
    let mut rows: BTreeMap<(usize, usize, i64), usize> = BTreeMap::new();
    for m in images.iter().chain(std::iter::once(&target)) {
        for a in 0..n {
            for b in 0..=a {
                for (deg, _) in m.get(a, b).terms() {
                    let next = rows.len();
                    rows.entry((a, b, deg)).or_insert(next);
                }
            }
        }
    }
    let mut sys = FpMatrix::zeros(rows.len(), unknowns.len());
    let mut rhs = vec![0u32; rows.len()];
    for (col, m) in images.iter().enumerate() {
        for (&(a, b, deg), &r) in &rows {
            sys.set(r, col, m.get(a, b).coeff(deg));
        }
    }
    for (&(a, b, deg), &r) in &rows {
        rhs[r] = f.neg(target.get(a, b).coeff(deg));
    }
    let mut sol = sys.solve(&rhs, f)?;
    for v in sys.kernel(f) {
        let c = rng.gen_range(0..f.p());
        for (s, vi) in sol.iter_mut().zip(v) {
            *s = f.add(*s, f.mul(c, vi));
        }
    }
    let mut m = base.clone();
    for (&(i, j, e), &c) in unknowns.iter().zip(&sol) {
        if c != 0 {
            m.set(i, j, m.get(i, j).add(&LPoly::monomial(f, c, e)));
        }
    }
    Some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn lab(p: &[usize]) -> OrbitLabel {
        OrbitLabel::new(p.to_vec()).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&lab(&[1, 1]), &lab(&[2])).unwrap());
        assert!(dominance_leq(&lab(&[2, 2]), &lab(&[3, 1])).unwrap());
        assert!(!dominance_leq(&lab(&[3, 1]), &lab(&[2, 2])).unwrap());
        assert!(dominance_leq(&lab(&[2]), &lab(&[2, 1])).is_err());
    }

    #[test]
    fn dims() {
        assert_eq!(OrbitLabel::zero(4).dim(), 0);
        assert_eq!(OrbitLabel::regular(4).dim(), 12);
        assert_eq!(lab(&[2, 1]).dim(), 4);
        assert_eq!(all_orbits(4).len(), 5);
        assert_eq!(all_orbits(6).len(), 11);
    }

    #[test]
    fn label_rejects_bad_partitions() {
        assert!(OrbitLabel::new(vec![1, 2]).is_err());
        assert!(OrbitLabel::new(vec![]).is_err());
        assert!(serde_json::from_str::<OrbitLabel>("[2,0]").is_err());
        assert_eq!(serde_json::to_string(&lab(&[2, 1])).unwrap(), "[2,1]");
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_type(&HomLift::zero(3, 5)).unwrap(), OrbitLabel::zero(3));
        let e12 = HomLift { n: 2, q: 5, entries: vec![(0, 1, 1, -1)] };
        assert_eq!(jordan_type(&e12).unwrap(), lab(&[2]));
        for (b, c) in [(1, 0), (0, 3), (4, 0)] {
            let mut entries = Vec::new();
            if b != 0 {
                entries.push((0, 1, b, -1));
            }
            if c != 0 {
                entries.push((1, 0, c, 0));
            }
            assert_eq!(jordan_type(&HomLift { n: 2, q: 5, entries }).unwrap(), lab(&[2]));
        }
        let not_nil = HomLift { n: 2, q: 5, entries: vec![(0, 1, 1, -1), (1, 0, 1, 0)] };
        let err = jordan_type(&not_nil).unwrap_err();
        assert!(err.message().contains("X^0"), "{}", err.message());
    }

    #[test]
    fn lift_examples() {
        let o2 = ApartmentPoint::origin(2);
        assert_eq!(debacker_lift(qi(1), &o2, &GradedElement::zero(&o2, qi(-1), 5)).unwrap(), OrbitLabel::zero(2));
        let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
        let phi = GradedElement::new(&x, q(-1, 2), 5, &[(0, 1, 3)]).unwrap();
        assert_eq!(debacker_lift(q(1, 2), &x, &phi).unwrap(), lab(&[2]));
        let o3 = ApartmentPoint::origin(3);
        let phi = GradedElement::new(&o3, qi(-1), 5, &[(0, 1, 2), (1, 2, 4)]).unwrap();
        assert_eq!(debacker_lift(qi(1), &o3, &phi).unwrap(), lab(&[3]));
        let bad = GradedElement::new(&o2, qi(-1), 5, &[(0, 0, 1)]).unwrap();
        assert!(debacker_lift(qi(1), &o2, &bad).is_err());
    }

    #[test]
    fn sl2_examples() {
        let o2 = ApartmentPoint::origin(2);
        let phi = HomLift { n: 2, q: 7, entries: vec![(0, 1, 1, -1)] };
        let t = sl2_complete(&o2, qi(1), &phi).unwrap();
        assert_eq!(t.h.entries, vec![(0, 0, 6, 0), (1, 1, 1, 0)]);
        assert_eq!(t.e.entries, vec![(1, 0, 1, 1)]);
        let zero = sl2_complete(&o2, qi(1), &HomLift::zero(2, 7)).unwrap();
        assert!(zero.h.is_zero() && zero.e.is_zero());
        let o3 = ApartmentPoint::origin(3);
        let phi = HomLift { n: 3, q: 7, entries: vec![(0, 1, 1, -1), (1, 2, 1, -1)] };
        let t = sl2_complete(&o3, qi(1), &phi).unwrap();
        assert_eq!(t.h.entries, vec![(0, 0, 5, 0), (2, 2, 2, 0)]);
        assert_eq!(t.e.entries, vec![(1, 0, 2, 1), (2, 1, 2, 1)]);
        assert!(sl2_complete(&o3, qi(1), &HomLift { q: 5, ..phi }).is_err());
    }

    #[test]
    fn sl2_at_non_hyperspecial_point() {
        let x = ApartmentPoint::new(vec![q(2, 3), q(1, 3), qi(0)]);
        let phi = GradedElement::new(&x, q(-1, 3), 11, &[(1, 0, 3), (2, 1, 5)]).unwrap();
        let t = sl2_complete(&x, q(1, 3), &homogeneous_lift(&phi)).unwrap();
        assert!(t.h.is_homogeneous(&x, qi(0)));
        assert!(t.e.is_homogeneous(&x, q(1, 3)));
    }

    #[test]
    fn probe_examples() {
        let o2 = ApartmentPoint::origin(2);
        let zero = GradedElement::zero(&o2, qi(-1), 5);
        assert!(minimality_probe(qi(1), &o2, &zero, 50, 2, 1).unwrap());
        let reg = GradedElement::new(&o2, qi(-1), 5, &[(0, 1, 1)]).unwrap();
        let r = minimality_report(qi(1), &o2, &reg, 200, 3, 7).unwrap();
        assert!(r.passed());
        assert!(r.nilpotent_samples > 0);
        let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
        let phi = GradedElement::new(&x, q(-1, 2), 5, &[(0, 1, 1)]).unwrap();
        assert!(minimality_probe(q(1, 2), &x, &phi, 200, 3, 9).unwrap());
    }
}
