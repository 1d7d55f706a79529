//! Type-A model of the standard apartment of GL_n over F_q((t)).
//!
//! A point is a vector `x = (x_1, .., x_n)` of rationals normalised with
//! `x_n = 0`. The monomial `t^w e_ij` has degree `w + x_i - x_j` at `x`, so
//! the Moy-Prasad lattice `g_{x>=s}` is cut out entrywise by the valuation
//! bound `ceil(s + x_j - x_i)` and `g_{x>s}` by `floor(s + x_j - x_i) + 1`.
//! For GL_n the groups `G_{x>=s}` (s > 0) are `1 + g_{x>=s}` and the
//! parahoric `G_{x>=0}` is the unit group of `g_{x>=0}`, so the group
//! filtration is recorded by the same bound matrices.

use crate::error::{DmpError, Result};
use crate::field::is_prime;
use crate::rational::{ceil_q, floor_q, is_integer, qi, serde_q, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

const MODULE: &str = "apartment";

/// Group GL_n over F_q((t)) together with the denominator bound `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfig {
    pub n: usize,
    pub q: u32,
    pub m: i64,
    /// When set, residue characteristics below the large-p hypothesis are
    /// accepted silently; otherwise a warning is logged.
    pub allow_small_p: bool,
}

/// Bound on the residue characteristic under which DeBacker's theory is
/// known to apply for every group of the given rank.
pub const LARGE_P_FLOOR: u32 = 271;

impl GroupConfig {
    pub fn new(n: usize, q: u32, m: i64) -> Result<Self> {
        let cfg = GroupConfig { n, q, m, allow_small_p: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(DmpError::validation(MODULE, "group_config", "n must be positive"));
        }
        if !is_prime(self.q as u64) {
            return Err(DmpError::validation(MODULE, "group_config", format!("q = {} is not prime", self.q)));
        }
        if self.m < 1 {
            return Err(DmpError::validation(MODULE, "group_config", "m must be at least 1"));
        }
        Ok(())
    }

    /// Whether `q >= max(n, 271)`.
    pub fn large_p_holds(&self) -> bool {
        self.q as usize >= self.n.max(LARGE_P_FLOOR as usize)
    }

    pub fn warn_if_small_p(&self) {
        if !self.large_p_holds() && !self.allow_small_p {
            log::warn!(
                "q = {} is below max(n, {}); running the type-A linear algebra outside the large-p regime",
                self.q,
                LARGE_P_FLOOR
            );
        }
    }
}

/// A rational point of the standard apartment, normalised so `x_n = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ApartmentPoint {
    #[serde(with = "serde_q::vec")]
    coords: Vec<Q>,
}

impl ApartmentPoint {
    /// Builds a point, translating along the diagonal so the last coordinate is 0.
    pub fn new(coords: Vec<Q>) -> Self {
        let last = *coords.last().expect("apartment point needs at least one coordinate");
        ApartmentPoint { coords: coords.into_iter().map(|c| c - last).collect() }
    }

    pub fn origin(n: usize) -> Self {
        ApartmentPoint { coords: vec![qi(0); n] }
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, i: usize) -> Q {
        self.coords[i]
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &ApartmentPoint, t: Q) -> ApartmentPoint {
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| (qi(1) - t) * a + t * b).collect();
        ApartmentPoint::new(coords)
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> i64 {
        self.coords.iter().fold(1i64, |acc, c| acc.lcm(c.denom()))
    }

    /// Largest `|x_i - x_j|`.
    pub fn spread(&self) -> Q {
        let mx = self.coords.iter().max().copied().unwrap_or_default();
        let mn = self.coords.iter().min().copied().unwrap_or_default();
        mx - mn
    }

    /// Residue class of each coordinate modulo 1 (fractional part).
    pub fn residue_classes(&self) -> Vec<Q> {
        self.coords.iter().map(|&c| c - qi(floor_q(c))).collect()
    }

    pub fn validate(&self, cfg: &GroupConfig) -> Result<()> {
        if self.dim() != cfg.n {
            return Err(DmpError::validation(
                MODULE,
                "apartment_point",
                format!("point has {} coordinates, expected {}", self.dim(), cfg.n),
            ));
        }
        if cfg.m % self.denominator() != 0 {
            return Err(DmpError::validation(
                MODULE,
                "apartment_point",
                format!("coordinate denominator {} does not divide m = {}", self.denominator(), cfg.m),
            ));
        }
        Ok(())
    }
}

/// Levels `s`, `tau`, `r` are plain rationals.
pub type Level = Q;

pub fn validate_level(cfg: &GroupConfig, s: Level) -> Result<()> {
    if cfg.m % s.denom() != 0 {
        return Err(DmpError::validation(
            MODULE,
            "level",
            format!("level denominator {} does not divide m = {}", s.denom(), cfg.m),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiltrationKind {
    AlgebraFiltration,
    GroupFiltration,
}

/// A Moy-Prasad lattice described by its entrywise valuation bounds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeShape {
    pub kind: FiltrationKind,
    /// Entry `(i, j)` consists of all `a t^w` with `w >= bounds[i][j]`.
    pub bounds: Vec<Vec<i64>>,
    pub provenance: LatticeProvenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeProvenance {
    pub x: ApartmentPoint,
    #[serde(with = "serde_q")]
    pub s: Level,
    pub strict: bool,
}

impl LatticeShape {
    /// `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &LatticeShape) -> bool {
        bounds_le(&other.bounds, &self.bounds)
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }
}

/// `a <= b` entrywise, i.e. lattice(b) ⊆ lattice(a).
pub fn bounds_le(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    a.iter().zip(b).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| x <= y))
}

/// Valuation bounds of `g_{x>=s}` (or `g_{x>s}` when `strict`).
pub fn lattice_bounds(x: &ApartmentPoint, s: Level, strict: bool) -> Vec<Vec<i64>> {
    let n = x.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = s + x.coord(j) - x.coord(i);
                    if strict {
                        floor_q(v) + 1
                    } else {
                        ceil_q(v)
                    }
                })
                .collect()
        })
        .collect()
}

/// The Moy-Prasad lattice `g_{x>=s}` or `g_{x>s}`.
pub fn mp_lattice(cfg: &GroupConfig, x: &ApartmentPoint, s: Level, strict: bool) -> Result<LatticeShape> {
    x.validate(cfg)?;
    validate_level(cfg, s)?;
    Ok(shape(FiltrationKind::AlgebraFiltration, x, s, strict))
}

fn shape(kind: FiltrationKind, x: &ApartmentPoint, s: Level, strict: bool) -> LatticeShape {
    LatticeShape {
        kind,
        bounds: lattice_bounds(x, s, strict),
        provenance: LatticeProvenance { x: x.clone(), s, strict },
    }
}

/// Positions of the graded piece `g_{x=d}` with their monomial exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedSupport {
    #[serde(with = "serde_q")]
    pub degree: Level,
    /// `(i, j, w)`: the line spanned by `t^w e_ij`, `w = degree - x_i + x_j`.
    pub positions: Vec<(usize, usize, i64)>,
}

impl GradedSupport {
    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    pub fn exponent(&self, i: usize, j: usize) -> Option<i64> {
        self.positions.iter().find(|&&(a, b, _)| a == i && b == j).map(|&(_, _, w)| w)
    }

    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        self.positions.iter().position(|&(a, b, _)| a == i && b == j)
    }
}

/// Support of `g_{x=d}`, positions in row-major order.
pub fn support(x: &ApartmentPoint, degree: Level) -> GradedSupport {
    let n = x.dim();
    let mut positions = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = degree - x.coord(i) + x.coord(j);
            if is_integer(w) {
                positions.push((i, j, w.to_integer()));
            }
        }
    }
    GradedSupport { degree, positions }
}

pub fn graded_support(cfg: &GroupConfig, x: &ApartmentPoint, degree: Level) -> Result<GradedSupport> {
    x.validate(cfg)?;
    validate_level(cfg, degree)?;
    Ok(support(x, degree))
}

/// The six filtration shapes that must be constant along an open interval of
/// a geodesic, plus the level-zero pair used by the first inclusion chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShapeSet {
    pub group_ge_s: Vec<Vec<i64>>,
    pub group_gt_s: Vec<Vec<i64>>,
    pub alg_ge_s: Vec<Vec<i64>>,
    pub alg_gt_s: Vec<Vec<i64>>,
    pub alg_ge_neg_s: Vec<Vec<i64>>,
    pub alg_gt_neg_s: Vec<Vec<i64>>,
    pub group_ge_0: Vec<Vec<i64>>,
    pub group_gt_0: Vec<Vec<i64>>,
}

impl ShapeSet {
    pub fn at(x: &ApartmentPoint, s: Level) -> Self {
        ShapeSet {
            group_ge_s: lattice_bounds(x, s, false),
            group_gt_s: lattice_bounds(x, s, true),
            alg_ge_s: lattice_bounds(x, s, false),
            alg_gt_s: lattice_bounds(x, s, true),
            alg_ge_neg_s: lattice_bounds(x, -s, false),
            alg_gt_neg_s: lattice_bounds(x, -s, true),
            group_ge_0: lattice_bounds(x, qi(0), false),
            group_gt_0: lattice_bounds(x, qi(0), true),
        }
    }

    /// The six shapes of an interval (level-zero pair excluded).
    pub fn six(&self) -> [&Vec<Vec<i64>>; 6] {
        [
            &self.group_ge_s,
            &self.group_gt_s,
            &self.alg_ge_s,
            &self.alg_gt_s,
            &self.alg_ge_neg_s,
            &self.alg_gt_neg_s,
        ]
    }
}

/// Checks the four inclusion chains `A_{x>} ⊂ A_{y>} ⊂ A_{y>=} ⊂ A_{x>=}`
/// between a breakpoint `(x, s)` and a nearby point `(y, tau)`.
pub fn inclusion_chains_hold(at_break: &ShapeSet, nearby: &ShapeSet) -> bool {
    let chain = |x_gt: &Vec<Vec<i64>>, y_gt: &Vec<Vec<i64>>, y_ge: &Vec<Vec<i64>>, x_ge: &Vec<Vec<i64>>| {
        // lattice inclusion L1 ⊂ L2 means bounds(L2) <= bounds(L1)
        bounds_le(y_gt, x_gt) && bounds_le(y_ge, y_gt) && bounds_le(x_ge, y_ge)
    };
    chain(&at_break.group_gt_0, &nearby.group_gt_0, &nearby.group_ge_0, &at_break.group_ge_0)
        && chain(&at_break.group_gt_s, &nearby.group_gt_s, &nearby.group_ge_s, &at_break.group_ge_s)
        && chain(&at_break.alg_gt_s, &nearby.alg_gt_s, &nearby.alg_ge_s, &at_break.alg_ge_s)
        && chain(&at_break.alg_gt_neg_s, &nearby.alg_gt_neg_s, &nearby.alg_ge_neg_s, &at_break.alg_ge_neg_s)
}

/// Per-interval data of a geodesic plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCertificate {
    #[serde(with = "serde_q")]
    pub left: Q,
    #[serde(with = "serde_q")]
    pub right: Q,
    #[serde(with = "serde_q")]
    pub sample: Q,
    pub shapes: ShapeSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicPlan {
    pub x0: ApartmentPoint,
    #[serde(with = "serde_q")]
    pub s0: Level,
    pub x1: ApartmentPoint,
    #[serde(with = "serde_q")]
    pub s1: Level,
    #[serde(with = "serde_q::vec")]
    pub breakpoints: Vec<Q>,
    pub intervals: Vec<IntervalCertificate>,
    /// Denominator bound large enough for every breakpoint point and level.
    #[serde(with = "crate::rational::serde_bigint")]
    pub effective_m: BigInt,
}

impl GeodesicPlan {
    pub fn point(&self, t: Q) -> (ApartmentPoint, Level) {
        (self.x0.lerp(&self.x1, t), (qi(1) - t) * self.s0 + t * self.s1)
    }

    /// Whether the filtration shapes at breakpoint `idx` agree with those of
    /// every adjacent interval (the breakpoint is then only nominal).
    pub fn breakpoint_is_nominal(&self, idx: usize) -> bool {
        let (x, s) = self.point(self.breakpoints[idx]);
        let here = ShapeSet::at(&x, s);
        self.adjacent_intervals(idx).iter().all(|&k| self.intervals[k].shapes == here)
    }

    /// Indices of intervals adjacent to breakpoint `idx`.
    pub fn adjacent_intervals(&self, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if idx > 0 {
            out.push(idx - 1);
        }
        if idx < self.intervals.len() {
            out.push(idx);
        }
        out
    }
}

/// Breakpoints of the path `t -> ((1-t) x0 + t x1, (1-t) s0 + t s1)`.
///
/// Every affine function `level_t - x_t,i + x_t,j` with `level` one of
/// `s_t`, `-s_t`, `0` is linear in `t`; a breakpoint is a `t` in `(0,1)` where
/// one of them takes an integer value. Endpoints are always breakpoints.
pub fn breakpoints(x0: &ApartmentPoint, s0: Level, x1: &ApartmentPoint, s1: Level) -> Result<GeodesicPlan> {
    if x0.dim() != x1.dim() {
        return Err(DmpError::validation(MODULE, "breakpoints", "endpoints live in different dimensions"));
    }
    let n = x0.dim();
    let mut ts: BTreeSet<Q> = BTreeSet::new();
    ts.insert(qi(0));
    ts.insert(qi(1));
    for sign in [1i64, -1, 0] {
        for i in 0..n {
            for j in 0..n {
                let a = qi(sign) * s0 - x0.coord(i) + x0.coord(j);
                let b = qi(sign) * (s1 - s0) - (x1.coord(i) - x0.coord(i)) + (x1.coord(j) - x0.coord(j));
                if b == qi(0) {
                    continue;
                }
                // f(t) = a + b t hits integers k between f(0) and f(1).
                let (lo, hi) = if b > qi(0) { (a, a + b) } else { (a + b, a) };
                for k in ceil_q(lo)..=floor_q(hi) {
                    let t = (qi(k) - a) / b;
                    if t > qi(0) && t < qi(1) {
                        ts.insert(t);
                    }
                }
            }
        }
    }
    let breakpoints: Vec<Q> = ts.into_iter().collect();
    let mut intervals = Vec::with_capacity(breakpoints.len() - 1);
    let point = |t: Q| (x0.lerp(x1, t), (qi(1) - t) * s0 + t * s1);
    for w in breakpoints.windows(2) {
        let (l, r) = (w[0], w[1]);
        let mid = (l + r) / qi(2);
        let (xm, sm) = point(mid);
        intervals.push(IntervalCertificate { left: l, right: r, sample: mid, shapes: ShapeSet::at(&xm, sm) });
    }
    let mut effective_m = BigInt::from(1);
    for &t in &breakpoints {
        let (x, s) = point(t);
        for d in x.coords().iter().map(|c| *c.denom()).chain([*s.denom()]) {
            effective_m = effective_m.lcm(&BigInt::from(d));
        }
    }
    let plan = GeodesicPlan { x0: x0.clone(), s0, x1: x1.clone(), s1, breakpoints, intervals, effective_m };
    verify_plan(&plan)?;
    Ok(plan)
}

/// Re-derives the certificate: interval constancy at a second interior
/// sample and the inclusion chains at each breakpoint.
pub fn verify_plan(plan: &GeodesicPlan) -> Result<()> {
    for iv in &plan.intervals {
        let other = iv.left + (iv.right - iv.left) / qi(3);
        let (x, s) = plan.point(other);
        if ShapeSet::at(&x, s) != iv.shapes {
            return Err(DmpError::contract(
                MODULE,
                "breakpoints",
                format!("shapes vary inside interval ({}, {})", iv.left, iv.right),
            ));
        }
    }
    for (idx, &t) in plan.breakpoints.iter().enumerate() {
        let (x, s) = plan.point(t);
        let here = ShapeSet::at(&x, s);
        for k in plan.adjacent_intervals(idx) {
            if !inclusion_chains_hold(&here, &plan.intervals[k].shapes) {
                return Err(DmpError::contract(
                    MODULE,
                    "breakpoints",
                    format!("inclusion chain fails at breakpoint t = {t}"),
                ));
            }
        }
    }
    Ok(())
}

/// Whether `g_{x0>=s0} ∩ g_{x1>=s1} ⊆ g_{x_t>=s_t}`.
pub fn convexity_check(x0: &ApartmentPoint, s0: Level, x1: &ApartmentPoint, s1: Level, t: Q) -> bool {
    let v0 = lattice_bounds(x0, s0, false);
    let v1 = lattice_bounds(x1, s1, false);
    let xt = x0.lerp(x1, t);
    let st = (qi(1) - t) * s0 + t * s1;
    let vt = lattice_bounds(&xt, st, false);
    let meet: Vec<Vec<i64>> =
        v0.iter().zip(&v1).map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()).collect();
    bounds_le(&vt, &meet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn pt(c: &[(i64, i64)]) -> ApartmentPoint {
        ApartmentPoint::new(c.iter().map(|&(a, b)| q(a, b)).collect())
    }

    #[test]
    fn lattice_examples() {
        let cfg = GroupConfig::new(2, 5, 8).unwrap();
        let l = mp_lattice(&cfg, &ApartmentPoint::origin(2), qi(0), false).unwrap();
        assert_eq!(l.bounds, vec![vec![0, 0], vec![0, 0]]);
        let x = pt(&[(1, 2), (0, 1)]);
        assert_eq!(mp_lattice(&cfg, &x, q(1, 2), false).unwrap().bounds, vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(mp_lattice(&cfg, &x, q(-1, 2), true).unwrap().bounds, vec![vec![0, 0], vec![1, 0]]);
    }

    #[test]
    fn denominator_rejected() {
        let cfg = GroupConfig::new(2, 5, 2).unwrap();
        let x = pt(&[(1, 3), (0, 1)]);
        assert!(matches!(mp_lattice(&cfg, &x, qi(0), false), Err(DmpError::Validation { .. })));
        assert!(mp_lattice(&cfg, &ApartmentPoint::origin(2), q(1, 4), false).is_err());
        assert!(GroupConfig::new(2, 6, 1).is_err());
    }

    #[test]
    fn normalisation_drops_diagonal_translation() {
        let a = pt(&[(3, 2), (1, 1)]);
        assert_eq!(a.coords(), &[q(1, 2), qi(0)]);
    }

    #[test]
    fn graded_support_examples() {
        let s = support(&ApartmentPoint::origin(2), qi(-1));
        assert_eq!(s.positions, vec![(0, 0, -1), (0, 1, -1), (1, 0, -1), (1, 1, -1)]);
        let s = support(&pt(&[(1, 2), (0, 1)]), q(-1, 2));
        assert_eq!(s.positions, vec![(0, 1, -1), (1, 0, 0)]);
        let s = support(&pt(&[(3, 8), (0, 1)]), q(-5, 8));
        assert_eq!(s.positions, vec![(0, 1, -1)]);
    }

    #[test]
    fn breakpoint_examples() {
        let x0 = ApartmentPoint::origin(2);
        let x1 = pt(&[(1, 2), (0, 1)]);
        let plan = breakpoints(&x0, qi(1), &x1, q(1, 2)).unwrap();
        assert_eq!(plan.breakpoints, vec![qi(0), qi(1)]);
        let plan = breakpoints(&x0, qi(1), &x0, qi(1)).unwrap();
        assert_eq!(plan.breakpoints, vec![qi(0), qi(1)]);
        let plan = breakpoints(&x0, qi(1), &x1, qi(1)).unwrap();
        assert_eq!(plan.breakpoints, vec![qi(0), qi(1)]);
        let interior = &plan.intervals[0].shapes.alg_gt_neg_s;
        let at_x0 = lattice_bounds(&x0, qi(-1), true);
        assert_eq!(at_x0, vec![vec![0, 0], vec![0, 0]]);
        // the interval lattice also contains the line t^-1 e_12
        assert_eq!(interior, &vec![vec![0, -1], vec![0, 0]]);
    }

    #[test]
    fn interior_breakpoints_found() {
        // x from (0,0) to (3/2, 0) at fixed level 1 crosses an integer at t = 2/3.
        let plan = breakpoints(&ApartmentPoint::origin(2), qi(1), &pt(&[(3, 2), (0, 1)]), qi(1)).unwrap();
        assert_eq!(plan.breakpoints, vec![qi(0), q(2, 3), qi(1)]);
    }

    #[test]
    fn convexity_examples() {
        let x0 = ApartmentPoint::origin(2);
        let x1 = pt(&[(1, 2), (0, 1)]);
        assert!(convexity_check(&x0, qi(1), &x1, q(1, 2), q(1, 2)));
        assert!(convexity_check(&x0, qi(1), &x1, q(1, 2), qi(0)));
        // the lattice at the midpoint coincides with the intersection
        let mid = lattice_bounds(&pt(&[(1, 4), (0, 1)]), q(3, 4), false);
        assert_eq!(mid, vec![vec![1, 1], vec![1, 1]]);
    }
}
