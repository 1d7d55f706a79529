//! Counting densities of nilpotent orbits on cosets.
//!
//! A coset `phi + g_{x>-s}` is cut into residue classes modulo the
//! reference lattice `t^(c+K) gl_n(O)`, where `t^c gl_n(O)` sits inside
//! every strict lattice involved. The density of an orbit `O` is the number
//! of residue classes that contain an element of `O`, divided by
//! `q^(dim O * (c+K))`.
//!
//! Residues are produced as `X = k U k^-1` with `U` strictly upper
//! triangular and `k = kbar (1 + L)`, where `kbar` runs over Bruhat cell
//! representatives of `GL_n(F_q)/B(F_q)` and `L` is strictly lower with
//! entries in `t F_q[t]`. The search fixes one t-adic level at a time; the
//! new unknowns at level `m` enter `X_m` affinely, so each level is an
//! affine solve and the last level is recorded as an affine subspace.

use crate::apartment::lattice_bounds;
use crate::error::{DmpError, Result};
use crate::field::{Fp, FpMatrix};
use crate::graded::homogeneous_lift;
use crate::laurent::LMatrix;
use crate::orbits::{dominance_leq, OrbitLabel};
use crate::qmatrix::QMatrix;
use crate::rational::{big_pow, serde_big};
use crate::refine::{ComponentValues, DMPPair, RelationRecord};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

const MODULE: &str = "measures";

pub const NORMALIZATION: &str =
    "residues modulo t^(c+K) gl_n(O) meeting the orbit, divided by q^(dim O * (c+K))";

/// Smallest `c` with `t^c gl_n(O)` inside the strict lattice of every pair.
pub fn reference_exponent(pairs: &[DMPPair]) -> i64 {
    pairs
        .iter()
        .flat_map(|p| lattice_bounds(&p.x, -p.s, true).into_iter().flatten())
        .max()
        .unwrap_or(0)
}

/// Probe pairs with a common reference lattice `t^lambda_c gl_n(O)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub pairs: Vec<DMPPair>,
    pub lambda_c: i64,
    pub k: i64,
}

impl ProbeSet {
    pub fn new(pairs: Vec<DMPPair>, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(DmpError::validation(MODULE, "probe_set", format!("truncation K = {k} must be positive")));
        }
        let lambda_c = reference_exponent(&pairs);
        Ok(ProbeSet { pairs, lambda_c, k })
    }
}

/// Forced-zero patterns on strictly upper `U` whose union describes the
/// residues meeting `orbit`; `None` for the zero orbit.
fn orbit_patterns(orbit: &OrbitLabel) -> Result<Option<Vec<Vec<(usize, usize)>>>> {
    let n = orbit.n();
    if *orbit == OrbitLabel::zero(n) {
        return Ok(None);
    }
    if *orbit == OrbitLabel::regular(n) {
        return Ok(Some(vec![Vec::new()]));
    }
    if n == 3 {
        // rank one with U^2 = 0: one of the two superdiagonal entries vanishes
        return Ok(Some(vec![vec![(0, 1)], vec![(1, 2)]]));
    }
    Err(DmpError::undecided(
        MODULE,
        "residue_membership",
        format!("no membership criterion for orbit {orbit} in rank {n}"),
    ))
}

/// Affine subspace `offset + span(basis)` with `basis` in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Affine {
    offset: Vec<u32>,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Affine {
    fn new(offset: Vec<u32>, span: Vec<Vec<u32>>, f: Fp) -> Self {
        let dim = offset.len();
        let (basis, pivots) = if span.is_empty() || dim == 0 {
            (Vec::new(), Vec::new())
        } else {
            let mut m = FpMatrix::from_rows(&span);
            let pivots = m.rref(f);
            let basis = (0..pivots.len()).map(|r| m.data[r * dim..(r + 1) * dim].to_vec()).collect();
            (basis, pivots)
        };
        let mut a = Affine { offset, basis, pivots };
        a.offset = a.reduce(&a.offset, f);
        a
    }

    fn reduce(&self, v: &[u32], f: Fp) -> Vec<u32> {
        let mut out = v.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = out[pc];
            if c != 0 {
                for (o, &b) in out.iter_mut().zip(row) {
                    *o = f.sub(*o, f.mul(c, b));
                }
            }
        }
        out
    }

    fn contains_point(&self, v: &[u32], f: Fp) -> bool {
        self.reduce(v, f) == self.offset
    }

    fn contains(&self, other: &Affine, f: Fp) -> bool {
        self.contains_point(&other.offset, f)
            && other.basis.iter().all(|b| self.reduce(b, f).iter().all(|&x| x == 0))
    }

    fn points(&self, f: Fp) -> Vec<Vec<u32>> {
        let q = f.p();
        let d = self.basis.len();
        let total = (q as u64).pow(d as u32);
        (0..total)
            .map(|mut idx| {
                let mut v = self.offset.clone();
                for row in &self.basis {
                    let c = (idx % q as u64) as u32;
                    idx /= q as u64;
                    if c != 0 {
                        for (o, &b) in v.iter_mut().zip(row) {
                            *o = f.add(*o, f.mul(c, b));
                        }
                    }
                }
                v
            })
            .collect()
    }
}

/// One coset (or one pinned residue) prepared for the level search.
struct Engine {
    n: usize,
    f: Fp,
    /// Lowest t-adic level of any coset element.
    low: i64,
    /// Number of levels, `P - low`.
    depth: usize,
    /// `fixed[level][i*n+j]`: required coefficient of `t^(low+level)`.
    fixed: Vec<Vec<Option<u32>>>,
    free: Vec<Vec<usize>>,
}

type Emission = (Vec<u32>, Affine);

impl Engine {
    fn for_coset(pair: &DMPPair, top: i64) -> Result<Self> {
        let n = pair.n();
        let f = pair.phi.field();
        let strict = lattice_bounds(&pair.x, -pair.s, true);
        let ge = lattice_bounds(&pair.x, -pair.s, false);
        let low = ge.iter().flatten().copied().min().expect("n >= 1");
        if strict.iter().flatten().any(|&b| b > top) {
            return Err(DmpError::validation(MODULE, "count_measure", "reference lattice is not inside the coset lattice"));
        }
        let lift = homogeneous_lift(&pair.phi);
        let depth = (top - low) as usize;
        let mut fixed = vec![vec![None; n * n]; depth];
        for (lv, row) in fixed.iter_mut().enumerate() {
            let m = low + lv as i64;
            for i in 0..n {
                for j in 0..n {
                    if m < strict[i][j] {
                        let c = lift.entries.iter().find(|e| e.0 == i && e.1 == j && e.3 == m).map_or(0, |e| e.2);
                        row[i * n + j] = Some(c);
                    }
                }
            }
        }
        Ok(Self::finish(n, f, low, fixed))
    }

    fn pinned(pair: &DMPPair, top: i64, y: &LMatrix) -> Result<Self> {
        let base = Self::for_coset(pair, top)?;
        let n = base.n;
        if y.entries.iter().any(|e| e.val().is_some_and(|v| v < base.low) || e.deg().is_some_and(|d| d >= top)) {
            return Err(DmpError::validation(MODULE, "residue_membership", "residue has terms outside the coset levels"));
        }
        let mut fixed = base.fixed.clone();
        for (lv, row) in fixed.iter_mut().enumerate() {
            let m = base.low + lv as i64;
            for i in 0..n {
                for j in 0..n {
                    let c = y.get(i, j).coeff(m);
                    match row[i * n + j] {
                        Some(want) if want != c => {
                            return Err(DmpError::validation(
                                MODULE,
                                "residue_membership",
                                "residue does not lie in the coset",
                            ))
                        }
                        _ => row[i * n + j] = Some(c),
                    }
                }
            }
        }
        Ok(Self::finish(n, base.f, base.low, fixed))
    }

    fn finish(n: usize, f: Fp, low: i64, fixed: Vec<Vec<Option<u32>>>) -> Self {
        let free = fixed.iter().map(|row| (0..n * n).filter(|&k| row[k].is_none()).collect()).collect();
        Engine { n, f, low, depth: fixed.len(), fixed, free }
    }

    fn total_free(&self) -> usize {
        self.free.iter().map(Vec::len).sum()
    }

    /// Runs the search for one forced-zero pattern, all `kbar` in parallel.
    fn run(&self, pattern: &[(usize, usize)]) -> Vec<Emission> {
        let n = self.n;
        let u_coords: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|p| !pattern.contains(p)).collect();
        let l_coords: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        bruhat_representatives(n, self.f)
            .into_par_iter()
            .flat_map_iter(|(kbar, kbar_inv)| {
                let mut out = Vec::new();
                let mut search = Search {
                    eng: self,
                    kbar: &kbar,
                    kbar_inv: &kbar_inv,
                    u_coords: &u_coords,
                    l_coords: &l_coords,
                    us: Vec::new(),
                    ls: Vec::new(),
                    prefix: Vec::new(),
                    out: &mut out,
                };
                search.level(0);
                out
            })
            .collect()
    }
}

struct Search<'a> {
    eng: &'a Engine,
    kbar: &'a FpMatrix,
    kbar_inv: &'a FpMatrix,
    u_coords: &'a [(usize, usize)],
    l_coords: &'a [(usize, usize)],
    us: Vec<FpMatrix>,
    ls: Vec<FpMatrix>,
    prefix: Vec<u32>,
    out: &'a mut Vec<Emission>,
}

impl Search<'_> {
    fn conj(&self, m: &FpMatrix) -> FpMatrix {
        let f = self.eng.f;
        self.kbar.mul(m, f).mul(self.kbar_inv, f)
    }

    /// `X_m` with the unknowns of level `li` set to zero.
    fn constant(&self, li: usize) -> FpMatrix {
        let (n, f) = (self.eng.n, self.eng.f);
        // (1+L) and its inverse up to level li, with L_li = 0
        let mut lp = vec![FpMatrix::identity(n)];
        for j in 1..=li {
            lp.push(if j < li { self.ls[j - 1].clone() } else { FpMatrix::zeros(n, n) });
        }
        let mut linv = vec![FpMatrix::identity(n)];
        for j in 1..=li {
            let mut acc = FpMatrix::zeros(n, n);
            for i in 1..=j {
                acc = acc.sub(&lp[i].mul(&linv[j - i], f), f);
            }
            linv.push(acc);
        }
        let mut inner = FpMatrix::zeros(n, n);
        for b in 0..li {
            for a in 0..=(li - b) {
                let c = li - b - a;
                if lp[a].is_zero() || linv[c].is_zero() || self.us[b].is_zero() {
                    continue;
                }
                inner = inner.add(&lp[a].mul(&self.us[b], f).mul(&linv[c], f), f);
            }
        }
        self.conj(&inner)
    }

    fn columns(&self, li: usize) -> Vec<FpMatrix> {
        let n = self.eng.n;
        let f = self.eng.f;
        let mut cols = Vec::new();
        for &(i, j) in self.u_coords {
            let mut e = FpMatrix::zeros(n, n);
            e.set(i, j, 1);
            cols.push(self.conj(&e));
        }
        if li >= 1 {
            let u0 = &self.us[0];
            for &(i, j) in self.l_coords {
                let mut e = FpMatrix::zeros(n, n);
                e.set(i, j, 1);
                cols.push(self.conj(&e.mul(u0, f).sub(&u0.mul(&e, f), f)));
            }
        }
        cols
    }

    fn level(&mut self, li: usize) {
        let eng = self.eng;
        let (n, f) = (eng.n, eng.f);
        let cst = self.constant(li);
        let cols = self.columns(li);
        let nv = cols.len();
        let fixed_pos: Vec<usize> = (0..n * n).filter(|&k| eng.fixed[li][k].is_some()).collect();
        let mut sys = FpMatrix::zeros(fixed_pos.len(), nv);
        let mut rhs = vec![0u32; fixed_pos.len()];
        for (r, &k) in fixed_pos.iter().enumerate() {
            for (c, col) in cols.iter().enumerate() {
                sys.set(r, c, col.data[k]);
            }
            rhs[r] = f.sub(eng.fixed[li][k].expect("fixed position"), cst.data[k]);
        }
        let Some(part) = (if fixed_pos.is_empty() { Some(vec![0; nv]) } else { sys.solve(&rhs, f) }) else {
            return;
        };
        let kernel = if fixed_pos.is_empty() {
            (0..nv)
                .map(|c| {
                    let mut v = vec![0; nv];
                    v[c] = 1;
                    v
                })
                .collect()
        } else {
            sys.kernel(f)
        };
        let free = &eng.free[li];
        let image = |v: &[u32]| -> Vec<u32> {
            free.iter()
                .map(|&k| cols.iter().zip(v).fold(cst.data[k], |acc, (col, &x)| f.add(acc, f.mul(col.data[k], x))))
                .collect()
        };
        if li + 1 == eng.depth {
            let offset = image(&part);
            let span: Vec<Vec<u32>> = kernel
                .iter()
                .map(|kv| free.iter().map(|&k| cols.iter().zip(kv).fold(0, |acc, (col, &x)| f.add(acc, f.mul(col.data[k], x)))).collect())
                .filter(|v: &Vec<u32>| v.iter().any(|&x| x != 0))
                .collect();
            self.out.push((self.prefix.clone(), Affine::new(offset, span, f)));
            return;
        }
        let q = f.p() as u64;
        let total = q.pow(kernel.len() as u32);
        for mut idx in 0..total {
            let mut v = part.clone();
            for kv in &kernel {
                let c = (idx % q) as u32;
                idx /= q;
                if c != 0 {
                    for (x, &k) in v.iter_mut().zip(kv) {
                        *x = f.add(*x, f.mul(c, k));
                    }
                }
            }
            let mut u = FpMatrix::zeros(n, n);
            for (t, &(i, j)) in self.u_coords.iter().enumerate() {
                u.set(i, j, v[t]);
            }
            let mut l = FpMatrix::zeros(n, n);
            if li >= 1 {
                for (t, &(i, j)) in self.l_coords.iter().enumerate() {
                    l.set(i, j, v[self.u_coords.len() + t]);
                }
            }
            let xm = image(&v);
            let plen = self.prefix.len();
            self.prefix.extend_from_slice(&xm);
            self.us.push(u);
            if li >= 1 {
                self.ls.push(l);
            }
            self.level(li + 1);
            self.us.pop();
            if li >= 1 {
                self.ls.pop();
            }
            self.prefix.truncate(plen);
        }
    }
}

/// Largest flag variety searched by the density count.
pub const FLAG_BOUND: u64 = 10_000;

/// `|GL_n(F_q)/B(F_q)|`.
pub fn flag_count(n: usize, q: u32) -> u64 {
    (1..=n as u32).map(|k| (0..k).map(|e| (q as u64).saturating_pow(e)).sum::<u64>()).fold(1u64, u64::saturating_mul)
}

/// Representatives `u w` of `GL_n(F_q)/B(F_q)` with their inverses.
pub fn bruhat_representatives(n: usize, f: Fp) -> Vec<(FpMatrix, FpMatrix)> {
    let mut out = Vec::new();
    for w in permutations(n) {
        // w e_a = e_{w(a)}; u_ij free for i < j with w^-1(i) > w^-1(j)
        let mut winv = vec![0; n];
        for (a, &wa) in w.iter().enumerate() {
            winv[wa] = a;
        }
        let slots: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| winv[i] > winv[j]).collect();
        let q = f.p() as u64;
        for mut idx in 0..q.pow(slots.len() as u32) {
            let mut u = FpMatrix::identity(n);
            for &(i, j) in &slots {
                u.set(i, j, (idx % q) as u32);
                idx /= q;
            }
            let mut pm = FpMatrix::zeros(n, n);
            for (a, &wa) in w.iter().enumerate() {
                pm.set(wa, a, 1);
            }
            let k = u.mul(&pm, f);
            let kinv = k.inverse(f).expect("Bruhat representative is invertible");
            out.push((k, kinv));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

/// Size of the union of affine subspaces sharing one prefix.
fn union_size(subs: Vec<Affine>, f: Fp) -> u128 {
    let mut kept: Vec<Affine> = Vec::new();
    let mut sorted = subs;
    sorted.sort_by_key(|a| std::cmp::Reverse(a.basis.len()));
    for a in sorted {
        if !kept.iter().any(|k| k.contains(&a, f)) {
            kept.push(a);
        }
    }
    let q = f.p() as u128;
    if kept.len() == 1 {
        return q.pow(kept[0].basis.len() as u32);
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for a in &kept {
        seen.extend(a.points(f));
    }
    seen.len() as u128
}

fn count_residues(eng: &Engine, patterns: &[Vec<(usize, usize)>]) -> u128 {
    let mut groups: HashMap<Vec<u32>, HashSet<Affine>> = HashMap::new();
    for pat in patterns {
        for (prefix, aff) in eng.run(pat) {
            groups.entry(prefix).or_default().insert(aff);
        }
    }
    let f = eng.f;
    groups.into_par_iter().map(|(_, subs)| union_size(subs.into_iter().collect(), f)).sum()
}

fn check_orbit(orbit: &OrbitLabel, pair: &DMPPair, op: &'static str) -> Result<()> {
    if orbit.n() != pair.n() {
        return Err(DmpError::validation(MODULE, op, format!("orbit {orbit} does not match rank {}", pair.n())));
    }
    Ok(())
}

/// Whether the residue `y` (mod `t^(c+K) gl_n(O)`, `c` from the pair alone)
/// is the image of an element of `orbit` in the coset of `pair`.
pub fn residue_membership(orbit: &OrbitLabel, pair: &DMPPair, k: i64, y: &LMatrix) -> Result<bool> {
    residue_membership_with(orbit, pair, reference_exponent(std::slice::from_ref(pair)), k, y)
}

pub fn residue_membership_with(orbit: &OrbitLabel, pair: &DMPPair, c: i64, k: i64, y: &LMatrix) -> Result<bool> {
    check_orbit(orbit, pair, "residue_membership")?;
    let eng = Engine::pinned(pair, c + k, y)?;
    match orbit_patterns(orbit)? {
        None => Ok(y.is_zero()),
        Some(pats) => Ok(pats.iter().any(|p| !eng.run(p).is_empty())),
    }
}

/// Density of `orbit` on the coset of `pair`, reference exponent from the pair alone.
pub fn count_measure(orbit: &OrbitLabel, pair: &DMPPair, k: i64) -> Result<BigRational> {
    count_measure_with(orbit, pair, reference_exponent(std::slice::from_ref(pair)), k)
}

/// Density of `orbit` on the coset of `pair` relative to `t^c gl_n(O)`.
pub fn count_measure_with(orbit: &OrbitLabel, pair: &DMPPair, c: i64, k: i64) -> Result<BigRational> {
    const OP: &str = "count_measure";
    check_orbit(orbit, pair, OP)?;
    if k < 1 {
        return Err(DmpError::validation(MODULE, OP, format!("truncation K = {k} must be positive")));
    }
    let patterns = orbit_patterns(orbit)?;
    let flags = flag_count(pair.n(), pair.q());
    if patterns.is_some() && flags > FLAG_BOUND {
        return Err(DmpError::infeasible(MODULE, OP, format!("{flags} flags exceed the bound {FLAG_BOUND}")));
    }
    let top = c + k;
    let eng = Engine::for_coset(pair, top)?;
    if eng.total_free() > 60 {
        return Err(DmpError::infeasible(MODULE, OP, "residue space too large"));
    }
    let count = match patterns {
        None => u128::from(pair.phi.is_zero()),
        Some(pats) => count_residues(&eng, &pats),
    };
    let q = pair.q() as u64;
    Ok(BigRational::from_integer(count.into()) / big_pow(q, orbit.dim() as i64 * top))
}

/// `orbit` densities on a fixed family of pairs, sharing one reference lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSlice {
    pub orbit: OrbitLabel,
    pub lambda_c: i64,
    pub k: i64,
    pub values: BTreeMap<DMPPair, BigRational>,
}

impl MeasureSlice {
    pub fn compute(orbit: &OrbitLabel, pairs: &[DMPPair], lambda_c: i64, k: i64) -> Result<Self> {
        let mut values = BTreeMap::new();
        for p in pairs {
            if !values.contains_key(p) {
                values.insert(p.clone(), count_measure_with(orbit, p, lambda_c, k)?);
            }
        }
        Ok(MeasureSlice { orbit: orbit.clone(), lambda_c, k, values })
    }
}

impl ComponentValues for MeasureSlice {
    fn value(&self, pair: &DMPPair) -> Option<BigRational> {
        self.values.get(pair).cloned()
    }
}

/// All pairs named by a record.
pub fn record_pairs(rec: &RelationRecord) -> Vec<DMPPair> {
    let mut out = vec![rec.lhs.clone(), rec.rep.clone()];
    out.extend(rec.terms.iter().map(|(_, p)| p.clone()));
    out
}

/// Checks a record against the densities of `orbit`; every point involved
/// must have spread below one so that the conjugating groups fix the
/// reference lattice.
pub fn verify_relation_measure(rec: &RelationRecord, orbit: &OrbitLabel, k: i64) -> Result<bool> {
    let pairs = record_pairs(rec);
    if pairs.iter().any(|p| p.x.spread() >= crate::rational::qi(1)) {
        return Err(DmpError::validation(
            MODULE,
            "verify_relation",
            "points with spread >= 1 have parahorics outside GL_n(O)",
        ));
    }
    let c = reference_exponent(&pairs);
    let slice = MeasureSlice::compute(orbit, &pairs, c, k)?;
    crate::refine::verify_relation(rec, &slice)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub orbit: OrbitLabel,
    pub pair: DMPPair,
    #[serde(with = "serde_big")]
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureTable {
    pub orbits: Vec<OrbitLabel>,
    pub pairs: Vec<DMPPair>,
    pub entries: Vec<MeasureEntry>,
    pub normalization: String,
    pub lambda_c: i64,
    pub k: i64,
}

impl MeasureTable {
    pub fn get(&self, orbit: &OrbitLabel, pair: &DMPPair) -> Option<&BigRational> {
        self.entries.iter().find(|e| e.orbit == *orbit && e.pair == *pair).map(|e| &e.value)
    }

    /// Matrix with one row per pair and one column per orbit.
    pub fn matrix(&self) -> QMatrix {
        let rows = self
            .pairs
            .iter()
            .map(|p| self.orbits.iter().map(|o| self.get(o, p).cloned().unwrap_or_else(BigRational::zero)).collect())
            .collect();
        QMatrix::from_rows(rows)
    }

    pub fn slice(&self, orbit: &OrbitLabel) -> MeasureSlice {
        let values = self.entries.iter().filter(|e| e.orbit == *orbit).map(|e| (e.pair.clone(), e.value.clone())).collect();
        MeasureSlice { orbit: orbit.clone(), lambda_c: self.lambda_c, k: self.k, values }
    }
}

/// Densities of every orbit on every probe, with the triangularity check.
pub fn build_measure_table(probes: &ProbeSet, orbits: &[OrbitLabel]) -> Result<MeasureTable> {
    const OP: &str = "build_measure_table";
    for o in orbits {
        orbit_patterns(o)?;
    }
    let jobs: Vec<(OrbitLabel, DMPPair)> =
        probes.pairs.iter().flat_map(|p| orbits.iter().map(move |o| (o.clone(), p.clone()))).collect();
    let values: Vec<Result<BigRational>> = jobs
        .iter()
        .map(|(o, p)| count_measure_with(o, p, probes.lambda_c, probes.k))
        .collect();
    let mut entries = Vec::with_capacity(jobs.len());
    for ((orbit, pair), value) in jobs.into_iter().zip(values) {
        let value = value?;
        let expected_nonzero = dominance_leq(&pair.lift, &orbit)?;
        if expected_nonzero == value.is_zero() {
            return Err(DmpError::contract(
                MODULE,
                OP,
                format!("density of {orbit} on {pair} is {value}, lift {} predicts the opposite", pair.lift),
            ));
        }
        entries.push(MeasureEntry { orbit, pair, value });
    }
    Ok(MeasureTable {
        orbits: orbits.to_vec(),
        pairs: probes.pairs.clone(),
        entries,
        normalization: NORMALIZATION.to_string(),
        lambda_c: probes.lambda_c,
        k: probes.k,
    })
}

/// Whether the probe rows of a square table are linearly independent.
pub fn independence_check(table: &MeasureTable) -> Result<bool> {
    if table.pairs.len() != table.orbits.len() {
        return Err(DmpError::validation(
            MODULE,
            "independence_check",
            format!("table is {} x {}, not square", table.pairs.len(), table.orbits.len()),
        ));
    }
    Ok(table.matrix().rank() == table.orbits.len())
}

pub fn is_positive(v: &BigRational) -> bool {
    *v > BigRational::zero()
}
