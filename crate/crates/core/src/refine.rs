//! Refinement of a coarse degenerate coset into finer cosets, the linear
//! relation this produces, and chains of such relations along geodesics.

use crate::apartment::{
    breakpoints, inclusion_chains_hold, lattice_bounds, support, ApartmentPoint, Level, ShapeSet,
};
use crate::error::{DmpError, Result};
use crate::graded::{
    homogeneous_lift, is_degenerate, rank_profile, unipotent_orbit_count, GradedElement, HomLift,
    ORBIT_SEARCH_BOUND,
};
use crate::orbits::{debacker_lift, dominance_leq, jordan_type, OrbitLabel};
use crate::rational::{format_ratio, qi, serde_q};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

const MODULE: &str = "refine";

/// Default cap on the number of subcosets enumerated by one refinement.
pub const ENUMERATION_BOUND: u64 = 1_000_000;

/// A level `s`, a point `x` and a degenerate `phi ∈ g_{x=-s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DMPPair {
    #[serde(with = "serde_q")]
    pub s: Level,
    pub x: ApartmentPoint,
    pub phi: GradedElement,
    pub lift: OrbitLabel,
}

impl DMPPair {
    pub fn new(s: Level, x: &ApartmentPoint, phi: GradedElement) -> Result<Self> {
        if s <= qi(0) {
            return Err(DmpError::validation(MODULE, "dmp_pair", format!("level {s} is not positive")));
        }
        let lift = debacker_lift(s, x, &phi)?;
        Ok(DMPPair { s, x: x.clone(), phi, lift })
    }

    /// Pair whose graded element is the image of a homogeneous lift.
    pub fn from_lift(s: Level, x: &ApartmentPoint, lift: &HomLift) -> Result<Self> {
        let phi = image_of_lift(lift, x, -s)?;
        Self::new(s, x, phi)
    }

    pub fn q(&self) -> u32 {
        self.phi.q
    }

    pub fn n(&self) -> usize {
        self.x.dim()
    }
}

impl fmt::Display for DMPPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.x.coords().iter().map(format_ratio).collect();
        let coeffs: Vec<String> =
            self.phi.coeffs.iter().map(|(i, j, c)| format!("{c}e{}{}", i + 1, j + 1)).collect();
        write!(
            f,
            "({}, ({}), {})",
            format_ratio(&self.s),
            coords.join(","),
            if coeffs.is_empty() { "0".to_string() } else { coeffs.join("+") }
        )
    }
}

/// Image in `g_{x=d}` of a Laurent-monomial matrix lying in `g_{x>=d}`.
pub fn image_of_lift(lift: &HomLift, x: &ApartmentPoint, d: Level) -> Result<GradedElement> {
    let sup = support(x, d);
    let ge = lattice_bounds(x, d, false);
    let mut entries = Vec::new();
    for &(i, j, c, w) in &lift.entries {
        if w < ge[i][j] {
            return Err(DmpError::validation(
                MODULE,
                "image_of_lift",
                format!("entry ({}, {}) of valuation {w} lies outside g_{{x>={d}}}", i + 1, j + 1),
            ));
        }
        if sup.exponent(i, j) == Some(w) {
            entries.push((i, j, c));
        }
    }
    GradedElement::new(x, d, lift.q, &entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    /// Not degenerate.
    A,
    /// Conjugate to the image of the coarse element.
    B,
    /// Degenerate with a strictly larger lift.
    C,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcosetClass {
    pub tag: CaseTag,
    pub chi: GradedElement,
    pub lift: Option<OrbitLabel>,
}

/// The affine space `(phi + g_{y>-tau}) / g_{x>-s}` inside `g_{x=-s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fork {
    pub base: GradedElement,
    /// Support positions of `g_{x=-s}` that vary over the fork.
    pub free: Vec<(usize, usize)>,
}

impl Fork {
    pub fn size(&self, q: u32) -> u64 {
        (q as u64).saturating_pow(self.free.len() as u32)
    }

    /// The `idx`-th element in lexicographic order of the free coordinates.
    pub fn element(&self, mut idx: u64) -> GradedElement {
        let q = self.base.q;
        let mut entries: Vec<(usize, usize, u32)> = self.base.coeffs.clone();
        for &(i, j) in self.free.iter().rev() {
            let c = (idx % q as u64) as u32;
            idx /= q as u64;
            entries.retain(|&(a, b, _)| (a, b) != (i, j));
            if c != 0 {
                entries.push((i, j, c));
            }
        }
        GradedElement::new(&self.base.x, self.base.degree, q, &entries).expect("fork stays in the graded piece")
    }
}

fn check_inclusions(coarse: &DMPPair, x: &ApartmentPoint, s: Level, op: &'static str) -> Result<()> {
    if x.dim() != coarse.n() {
        return Err(DmpError::validation(MODULE, op, "coarse and finer points differ in dimension"));
    }
    if !inclusion_chains_hold(&ShapeSet::at(x, s), &ShapeSet::at(&coarse.x, coarse.s)) {
        return Err(DmpError::validation(
            MODULE,
            op,
            format!("filtration inclusions fail between {} and ({:?}, {s})", coarse, x.coords()),
        ));
    }
    Ok(())
}

/// Base point and free directions of the fork from `coarse` to `(x, s)`.
pub fn fork(coarse: &DMPPair, x: &ApartmentPoint, s: Level) -> Result<Fork> {
    check_inclusions(coarse, x, s, "fork")?;
    let lift = homogeneous_lift(&coarse.phi);
    let base = image_of_lift(&lift, x, -s)?;
    let y_strict = lattice_bounds(&coarse.x, -coarse.s, true);
    let free = support(x, -s)
        .positions
        .iter()
        .filter(|&&(i, j, w)| w >= y_strict[i][j])
        .map(|&(i, j, _)| (i, j))
        .collect();
    Ok(Fork { base, free })
}

/// Classification of every subcoset of `coarse` modulo `g_{x>-s}`.
pub fn enumerate_and_classify(coarse: &DMPPair, x: &ApartmentPoint, s: Level) -> Result<Vec<SubcosetClass>> {
    enumerate_and_classify_bounded(coarse, x, s, ENUMERATION_BOUND)
}

pub fn enumerate_and_classify_bounded(
    coarse: &DMPPair,
    x: &ApartmentPoint,
    s: Level,
    bound: u64,
) -> Result<Vec<SubcosetClass>> {
    const OP: &str = "enumerate_and_classify";
    let fk = fork(coarse, x, s)?;
    let q = coarse.q();
    let size = fk.size(q);
    if size > bound || fk.free.len() > 40 {
        return Err(DmpError::infeasible(
            MODULE,
            OP,
            format!("{} subcosets exceed the enumeration bound {bound}", size),
        ));
    }
    let base_profile = rank_profile(&fk.base);
    let classes: Vec<Result<SubcosetClass>> = (0..size)
        .into_par_iter()
        .map(|idx| {
            let chi = fk.element(idx);
            if !is_degenerate(&chi)? {
                return Ok(SubcosetClass { tag: CaseTag::A, chi, lift: None });
            }
            let lift = jordan_type(&homogeneous_lift(&chi))?;
            let tag = if lift == coarse.lift && rank_profile(&chi) == base_profile {
                CaseTag::B
            } else if lift != coarse.lift && dominance_leq(&coarse.lift, &lift)? {
                CaseTag::C
            } else {
                return Err(DmpError::contract(
                    MODULE,
                    OP,
                    format!("subcoset {chi:?} has lift {lift} and fits none of the three cases over {}", coarse.lift),
                ));
            };
            Ok(SubcosetClass { tag, chi, lift: Some(lift) })
        })
        .collect();
    let mut out = classes.into_iter().collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.chi.to_vector().cmp(&b.chi.to_vector()));
    Ok(out)
}

/// `c = q^e` with `e ∈ Z`, serialised as `"q^e"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PowerOfQ {
    pub q: u32,
    pub e: i64,
}

impl PowerOfQ {
    pub fn one(q: u32) -> Self {
        PowerOfQ { q, e: 0 }
    }

    pub fn value(&self) -> BigRational {
        crate::rational::big_pow(self.q as u64, self.e)
    }

    pub fn inverse(self) -> Self {
        PowerOfQ { q: self.q, e: -self.e }
    }

    pub fn times(self, o: PowerOfQ) -> Self {
        PowerOfQ { q: self.q, e: self.e + o.e }
    }
}

impl fmt::Display for PowerOfQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.q, self.e)
    }
}

impl From<PowerOfQ> for String {
    fn from(c: PowerOfQ) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for PowerOfQ {
    type Error = DmpError;

    fn try_from(s: String) -> Result<Self> {
        let bad = || DmpError::validation(MODULE, "parse_power", format!("expected \"q^e\", got {s:?}"));
        let (q, e) = s.split_once('^').ok_or_else(bad)?;
        Ok(PowerOfQ { q: q.trim().parse().map_err(|_| bad())?, e: e.trim().parse().map_err(|_| bad())? })
    }
}

mod serde_coef_terms {
    use super::DMPPair;
    use crate::rational::serde_big;
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Term {
        #[serde(with = "serde_big")]
        coef: BigRational,
        pair: DMPPair,
    }

    pub fn serialize<S: Serializer>(terms: &[(BigRational, DMPPair)], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Term> = terms.iter().map(|(c, p)| Term { coef: c.clone(), pair: p.clone() }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigRational, DMPPair)>, D::Error> {
        let v: Vec<Term> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|t| (t.coef, t.pair)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    /// Decomposition of a coarse coset into finer ones.
    Refinement,
    /// Two conjugate graded elements at the same point.
    Conjugation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: LinkKind,
    pub coarse_point: ApartmentPoint,
    #[serde(with = "serde_q")]
    pub coarse_level: Level,
    pub finer_point: ApartmentPoint,
    #[serde(with = "serde_q")]
    pub finer_level: Level,
    pub count_a: u64,
    pub count_b: u64,
    pub count_c: u64,
    /// Non-degenerate subcosets; they carry no nilpotent elements.
    pub a_terms: Vec<GradedElement>,
}

/// `v(lhs) = c * v(rep) + sum coef * v(term)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub lhs: DMPPair,
    pub c: PowerOfQ,
    pub rep: DMPPair,
    #[serde(with = "serde_coef_terms")]
    pub terms: Vec<(BigRational, DMPPair)>,
    pub provenance: Provenance,
}

impl RelationRecord {
    /// The same relation solved for the finer representative:
    /// `v(rep) = c^-1 v(lhs) - sum c^-1 coef v(term)`.
    pub fn solved_for_finer(&self) -> LinearRelation {
        let inv = self.c.inverse();
        let scale = inv.value();
        LinearRelation {
            target: self.rep.clone(),
            c: inv,
            source: self.lhs.clone(),
            terms: self.terms.iter().map(|(a, p)| (-(a * &scale), p.clone())).collect(),
        }
    }

    pub fn as_relation(&self) -> LinearRelation {
        LinearRelation { target: self.lhs.clone(), c: self.c, source: self.rep.clone(), terms: self.terms.clone() }
    }
}

/// `v(target) = c * v(source) + sum coef * v(term)`, a formal identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRelation {
    pub target: DMPPair,
    pub c: PowerOfQ,
    pub source: DMPPair,
    #[serde(with = "serde_coef_terms")]
    pub terms: Vec<(BigRational, DMPPair)>,
}

impl LinearRelation {
    pub fn identity(p: &DMPPair) -> Self {
        LinearRelation { target: p.clone(), c: PowerOfQ::one(p.q()), source: p.clone(), terms: Vec::new() }
    }

    /// Substitutes `self` for `v(self.source)` in `outer`, where
    /// `outer.source == self.target`.
    pub fn then(&self, outer: &LinearRelation) -> LinearRelation {
        assert_eq!(outer.source, self.target, "relations do not chain");
        let scale = outer.c.value();
        let mut terms = outer.terms.clone();
        terms.extend(self.terms.iter().map(|(a, p)| (a * &scale, p.clone())));
        LinearRelation { target: outer.target.clone(), c: self.c.times(outer.c), source: self.source.clone(), terms: merge_terms(terms) }
    }
}

/// Sums coefficients of equal pairs and drops zeros; sorted by pair.
pub fn merge_terms(terms: Vec<(BigRational, DMPPair)>) -> Vec<(BigRational, DMPPair)> {
    let mut acc: BTreeMap<DMPPair, BigRational> = BTreeMap::new();
    for (a, p) in terms {
        *acc.entry(p).or_insert_with(BigRational::zero) += a;
    }
    acc.into_iter().filter(|(_, a)| !a.is_zero()).map(|(p, a)| (a, p)).collect()
}

/// The relation coming from decomposing `coarse` into cosets at `(x, s)`.
pub fn refine_relation(coarse: &DMPPair, x: &ApartmentPoint, s: Level) -> Result<RelationRecord> {
    refine_relation_bounded(coarse, x, s, ENUMERATION_BOUND)
}

pub fn refine_relation_bounded(coarse: &DMPPair, x: &ApartmentPoint, s: Level, bound: u64) -> Result<RelationRecord> {
    const OP: &str = "refine_relation";
    let classes = enumerate_and_classify_bounded(coarse, x, s, bound)?;
    let fk = fork(coarse, x, s)?;
    let q = coarse.q();
    let count = |t: CaseTag| classes.iter().filter(|c| c.tag == t).count() as u64;
    let (na, nb, nc) = (count(CaseTag::A), count(CaseTag::B), count(CaseTag::C));
    if nb == 0 {
        return Err(DmpError::contract(MODULE, OP, "no subcoset is conjugate to the coarse element"));
    }
    if na + nb + nc != fk.size(q) {
        return Err(DmpError::contract(MODULE, OP, "case counts do not add up to the fork size"));
    }
    let rep = DMPPair::new(s, x, fk.base.clone())?;
    if !classes.iter().any(|c| c.tag == CaseTag::B && c.chi == rep.phi) {
        return Err(DmpError::contract(MODULE, OP, "image of the coarse element is not in case B"));
    }
    // The B-set must be one orbit of the unipotent image.
    match unipotent_orbit_count(&coarse.x, x, &fk.base, ORBIT_SEARCH_BOUND) {
        Ok(orbit) => {
            if orbit.size != nb {
                return Err(DmpError::contract(
                    MODULE,
                    OP,
                    format!("B-count {nb} differs from the orbit size {}", orbit.size),
                ));
            }
            if let Some(members) = orbit.members {
                let b_set: Vec<&GradedElement> =
                    classes.iter().filter(|c| c.tag == CaseTag::B).map(|c| &c.chi).collect();
                if members.iter().any(|m| !b_set.contains(&m)) {
                    return Err(DmpError::contract(MODULE, OP, "orbit member outside the B-set"));
                }
            }
        }
        Err(DmpError::Infeasible { .. }) => {}
        Err(e) => return Err(e),
    }
    let e = exact_power(nb, q).ok_or_else(|| {
        DmpError::contract(MODULE, OP, format!("B-count {nb} is not a power of {q}"))
    })?;
    let terms = classes
        .iter()
        .filter(|c| c.tag == CaseTag::C)
        .map(|c| DMPPair::new(s, x, c.chi.clone()).map(|p| (BigRational::one(), p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelationRecord {
        lhs: coarse.clone(),
        c: PowerOfQ { q, e },
        rep,
        terms,
        provenance: Provenance {
            kind: LinkKind::Refinement,
            coarse_point: coarse.x.clone(),
            coarse_level: coarse.s,
            finer_point: x.clone(),
            finer_level: s,
            count_a: na,
            count_b: nb,
            count_c: nc,
            a_terms: classes.iter().filter(|c| c.tag == CaseTag::A).map(|c| c.chi.clone()).collect(),
        },
    })
}

fn exact_power(mut v: u64, q: u32) -> Option<i64> {
    let mut e = 0;
    while v > 1 && v % q as u64 == 0 {
        v /= q as u64;
        e += 1;
    }
    (v == 1).then_some(e)
}

/// Values of components `v(pair)`, as supplied by measures or multiplicities.
pub trait ComponentValues {
    fn value(&self, pair: &DMPPair) -> Option<BigRational>;
}

impl<F: Fn(&DMPPair) -> Option<BigRational>> ComponentValues for F {
    fn value(&self, pair: &DMPPair) -> Option<BigRational> {
        self(pair)
    }
}

/// Exact check of `v(target) = c v(source) + sum coef v(term)`.
pub fn verify_linear(rel: &LinearRelation, values: &dyn ComponentValues) -> Result<bool> {
    let mut missing = Vec::new();
    let mut get = |p: &DMPPair| {
        values.value(p).unwrap_or_else(|| {
            missing.push(p.to_string());
            BigRational::zero()
        })
    };
    let lhs = get(&rel.target);
    let mut rhs = rel.c.value() * get(&rel.source);
    for (a, p) in &rel.terms {
        rhs += a * get(p);
    }
    if !missing.is_empty() {
        missing.dedup();
        return Err(DmpError::validation(
            MODULE,
            "verify_relation",
            format!("missing components: {}", missing.join(", ")),
        ));
    }
    Ok(lhs == rhs)
}

pub fn verify_relation(rec: &RelationRecord, values: &dyn ComponentValues) -> Result<bool> {
    verify_linear(&rec.as_relation(), values)
}

/// A chain of records connecting two pairs and its composite relation
/// `v(p1) = c v(p0) + corrections`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connection {
    pub records: Vec<RelationRecord>,
    pub composite: LinearRelation,
}

fn canonical_key(p: &DMPPair) -> (Vec<i64>, Vec<(usize, usize, u32)>, Level, Vec<(i64, i64)>) {
    let lift = homogeneous_lift(&p.phi);
    let shape: Vec<i64> = lift.entries.iter().map(|e| e.3).collect();
    (shape, p.phi.coeffs.clone(), p.s, p.x.coords().iter().map(|c| (*c.numer(), *c.denom())).collect())
}

fn conjugation_record(from: &DMPPair, to: &DMPPair) -> RelationRecord {
    RelationRecord {
        lhs: from.clone(),
        c: PowerOfQ::one(from.q()),
        rep: to.clone(),
        terms: Vec::new(),
        provenance: Provenance {
            kind: LinkKind::Conjugation,
            coarse_point: from.x.clone(),
            coarse_level: from.s,
            finer_point: to.x.clone(),
            finer_level: to.s,
            count_a: 0,
            count_b: 1,
            count_c: 0,
            a_terms: Vec::new(),
        },
    }
}

/// Pair at `(x, s)` carried by `lift`, or `None` if the lift is not homogeneous there.
fn pair_along(lift: &HomLift, x: &ApartmentPoint, s: Level) -> Option<DMPPair> {
    if !lift.is_homogeneous(x, -s) {
        return None;
    }
    DMPPair::from_lift(s, x, lift).ok()
}

/// Connects two pairs with equal lift by refinement relations at the
/// breakpoints of the geodesic between them.
pub fn connect(p0: &DMPPair, p1: &DMPPair) -> Result<Connection> {
    connect_bounded(p0, p1, ENUMERATION_BOUND)
}

pub fn connect_bounded(p0: &DMPPair, p1: &DMPPair, bound: u64) -> Result<Connection> {
    const OP: &str = "connect";
    if p0.lift != p1.lift {
        return Err(DmpError::validation(
            MODULE,
            OP,
            format!("lifts differ: {} vs {}", p0.lift, p1.lift),
        ));
    }
    if p0.q() != p1.q() || p0.n() != p1.n() {
        return Err(DmpError::validation(MODULE, OP, "pairs live over different groups"));
    }
    if p0 == p1 {
        return Ok(Connection { records: Vec::new(), composite: LinearRelation::identity(p0) });
    }
    let mut candidates = vec![p0, p1];
    candidates.sort_by_key(|p| canonical_key(p));
    let mut chosen = None;
    for cand in candidates {
        let lift = homogeneous_lift(&cand.phi);
        let (Some(e0), Some(e1)) = (pair_along(&lift, &p0.x, p0.s), pair_along(&lift, &p1.x, p1.s)) else {
            continue;
        };
        if rank_profile(&e0.phi) == rank_profile(&p0.phi) && rank_profile(&e1.phi) == rank_profile(&p1.phi) {
            chosen = Some((lift, e0, e1));
            break;
        }
    }
    let Some((lift, e0, e1)) = chosen else {
        return Err(DmpError::infeasible(
            MODULE,
            OP,
            "no common homogeneous lift aligns the two pairs inside the standard apartment",
        ));
    };
    let plan = breakpoints(&p0.x, p0.s, &p1.x, p1.s)?;
    let mut records = Vec::new();
    // v(current) expressed through v(p0)
    let mut rel = LinearRelation::identity(p0);
    if e0 != *p0 {
        let rec = conjugation_record(p0, &e0);
        rel = rel.then(&rec.solved_for_finer());
        records.push(rec);
    }
    let nb = plan.breakpoints.len();
    for k in 0..nb {
        let (xb, sb) = plan.point(plan.breakpoints[k]);
        let here = pair_along(&lift, &xb, sb).ok_or_else(|| {
            DmpError::infeasible(MODULE, OP, "lift is not homogeneous along the whole geodesic")
        })?;
        let nominal = plan.breakpoint_is_nominal(k);
        // arriving from the left interval
        if k > 0 {
            let iv = &plan.intervals[k - 1];
            let (xm, sm) = plan.point(iv.sample);
            let mid = pair_along(&lift, &xm, sm)
                .ok_or_else(|| DmpError::infeasible(MODULE, OP, "lift is not homogeneous on an interval"))?;
            if nominal {
                rel = retarget(rel, &here);
            } else {
                let rec = refine_relation_bounded(&mid, &xb, sb, bound)?;
                check_rep(&rec, &here)?;
                rel = rel.then(&rec.solved_for_finer());
                records.push(rec);
            }
        }
        // leaving into the right interval
        if k + 1 < nb {
            let iv = &plan.intervals[k];
            let (xm, sm) = plan.point(iv.sample);
            let mid = pair_along(&lift, &xm, sm)
                .ok_or_else(|| DmpError::infeasible(MODULE, OP, "lift is not homogeneous on an interval"))?;
            if plan.breakpoint_is_nominal(k) {
                rel = retarget(rel, &mid);
            } else {
                let rec = refine_relation_bounded(&mid, &xb, sb, bound)?;
                check_rep(&rec, &here)?;
                rel = rel.then(&rec.as_relation());
                records.push(rec);
            }
        }
    }
    if e1 != *p1 {
        let rec = conjugation_record(&e1, p1);
        rel = rel.then(&rec.solved_for_finer());
        records.push(rec);
    }
    if rel.target != *p1 {
        return Err(DmpError::contract(MODULE, OP, "chain does not end at the target pair"));
    }
    Ok(Connection { records, composite: rel })
}

/// Moves the target of `rel` to a pair describing the same coset.
fn retarget(mut rel: LinearRelation, same: &DMPPair) -> LinearRelation {
    rel.target = same.clone();
    rel
}

fn check_rep(rec: &RelationRecord, here: &DMPPair) -> Result<()> {
    if rec.rep != *here {
        return Err(DmpError::contract(MODULE, "connect", "breakpoint pair is not the case-B representative"));
    }
    Ok(())
}

/// `v(p0) = c' v(p1) + S'` composed with `v(p1) = c v(p0) + S` must give
/// `c c' = 1` and `S + c S' = 0`.
pub fn reversal_cancels(forward: &LinearRelation, backward: &LinearRelation) -> bool {
    if forward.source != backward.target || forward.target != backward.source {
        return false;
    }
    let round = backward.then(forward);
    round.c.e == 0 && round.terms.is_empty()
}

/// Whether `a` lies in Z[1/q].
pub fn coef_is_q_integral(a: &BigRational, q: u32) -> bool {
    let mut d: BigInt = a.denom().clone();
    let qb = BigInt::from(q);
    while d > BigInt::one() {
        if (&d % &qb).is_zero() {
            d /= &qb;
        } else {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn pair(s: Level, x: &[Level], q: u32, entries: &[(usize, usize, u32)]) -> DMPPair {
        let x = ApartmentPoint::new(x.to_vec());
        let phi = GradedElement::new(&x, -s, q, entries).unwrap();
        DMPPair::new(s, &x, phi).unwrap()
    }

    fn counts(cl: &[SubcosetClass]) -> (usize, usize, usize) {
        let c = |t| cl.iter().filter(|k| k.tag == t).count();
        (c(CaseTag::A), c(CaseTag::B), c(CaseTag::C))
    }

    #[test]
    fn iwahori_fork() {
        let coarse = pair(q(5, 8), &[q(3, 8), qi(0)], 5, &[(0, 1, 1)]);
        let x = ApartmentPoint::new(vec![q(1, 2), qi(0)]);
        let cl = enumerate_and_classify(&coarse, &x, q(1, 2)).unwrap();
        assert_eq!(cl.len(), 5);
        assert_eq!(counts(&cl), (4, 1, 0));
        assert_eq!(cl[0].tag, CaseTag::B);
        assert_eq!(cl[0].chi.coeffs, vec![(0, 1, 1)]);
        let rec = refine_relation(&coarse, &x, q(1, 2)).unwrap();
        assert_eq!(rec.c, PowerOfQ { q: 5, e: 0 });
        assert!(rec.terms.is_empty());
        assert_eq!(rec.provenance.a_terms.len(), 4);
    }

    #[test]
    fn hyperspecial_fork() {
        let coarse = pair(qi(1), &[q(1, 4), qi(0)], 5, &[]);
        let x = ApartmentPoint::origin(2);
        let cl = enumerate_and_classify(&coarse, &x, qi(1)).unwrap();
        assert_eq!(counts(&cl), (0, 1, 4));
        for c in cl.iter().filter(|c| c.tag == CaseTag::C) {
            assert_eq!(c.lift, Some(OrbitLabel::regular(2)));
            assert_eq!(c.chi.coeffs.len(), 1);
            assert_eq!((c.chi.coeffs[0].0, c.chi.coeffs[0].1), (0, 1));
        }
        let rec = refine_relation(&coarse, &x, qi(1)).unwrap();
        assert_eq!(rec.c.e, 0);
        assert_eq!(rec.terms.len(), 4);
        assert!(rec.terms.iter().all(|(a, p)| a.is_one() && p.lift == OrbitLabel::regular(2)));
    }

    #[test]
    fn trivial_fork() {
        let p = pair(qi(1), &[qi(0), qi(0)], 5, &[(0, 1, 2)]);
        let cl = enumerate_and_classify(&p, &p.x, p.s).unwrap();
        assert_eq!(counts(&cl), (0, 1, 0));
    }

    #[test]
    fn inclusion_violation_rejected() {
        let coarse = pair(qi(1), &[qi(0), qi(0)], 5, &[]);
        let x = ApartmentPoint::new(vec![q(3, 4), qi(0)]);
        assert!(matches!(enumerate_and_classify(&coarse, &x, qi(1)), Err(DmpError::Validation { .. })));
    }

    #[test]
    fn power_of_q_text() {
        let c = PowerOfQ { q: 5, e: -2 };
        assert_eq!(serde_json::to_string(&c).unwrap(), "\"5^-2\"");
        assert_eq!(serde_json::from_str::<PowerOfQ>("\"5^-2\"").unwrap(), c);
        assert_eq!(c.value(), BigRational::new(1.into(), 25.into()));
    }

    #[test]
    fn connect_examples() {
        let p0 = pair(qi(1), &[qi(0), qi(0)], 5, &[(0, 1, 1)]);
        let conn = connect(&p0, &p0).unwrap();
        assert!(conn.records.is_empty());
        assert_eq!(conn.composite.c.e, 0);

        let p1 = pair(q(1, 2), &[q(1, 2), qi(0)], 5, &[(0, 1, 1)]);
        let conn = connect(&p0, &p1).unwrap();
        assert_eq!(conn.records.len(), 2);
        assert_eq!(conn.composite.c.e, 0);
        assert!(conn.composite.terms.is_empty());
        let back = connect(&p1, &p0).unwrap();
        assert!(reversal_cancels(&conn.composite, &back.composite));

        let z0 = pair(qi(1), &[qi(0), qi(0)], 5, &[]);
        let z1 = pair(qi(1), &[q(1, 4), qi(0)], 5, &[]);
        let conn = connect(&z0, &z1).unwrap();
        assert_eq!(conn.records.len(), 1);
        assert_eq!(conn.composite.terms.len(), 4);
        assert!(conn.composite.terms.iter().all(|(_, p)| p.lift == OrbitLabel::regular(2)));
        let back = connect(&z1, &z0).unwrap();
        assert!(reversal_cancels(&conn.composite, &back.composite));
    }

    #[test]
    fn connect_rejects_lift_mismatch() {
        let p0 = pair(qi(1), &[qi(0), qi(0)], 5, &[]);
        let p1 = pair(qi(1), &[qi(0), qi(0)], 5, &[(0, 1, 1)]);
        assert!(connect(&p0, &p1).is_err());
    }

    #[test]
    fn verify_with_point_measure() {
        let coarse = pair(qi(1), &[q(1, 4), qi(0)], 5, &[]);
        let rec = refine_relation(&coarse, &ApartmentPoint::origin(2), qi(1)).unwrap();
        // zero-orbit measure: 1 on cosets containing 0
        let point = |p: &DMPPair| Some(if p.phi.is_zero() { BigRational::one() } else { BigRational::zero() });
        assert!(verify_relation(&rec, &point).unwrap());
        let missing = |_: &DMPPair| None;
        assert!(verify_relation(&rec, &missing).is_err());
    }
}
