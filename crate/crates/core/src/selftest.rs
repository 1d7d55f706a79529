//! The acceptance suite, shared by the `selftest` command and the
//! `acceptance` test target.

use crate::apartment::{breakpoints, convexity_check, inclusion_chains_hold, lattice_bounds, support, ApartmentPoint, Level, ShapeSet};
use crate::error::{DmpError, Result};
use crate::finite_types::{fork_identity, FiniteModule, GF};
use crate::graded::{is_degenerate, unipotent_orbit_count, CountMethod, GradedElement, ORBIT_SEARCH_BOUND};
use crate::measures::{count_measure, verify_relation_measure};
use crate::orbits::{all_orbits, dominance_leq, minimality_report, OrbitLabel};
use crate::qmatrix::QMatrix;
use crate::rational::{q, qi, Q};
use crate::refine::{refine_relation, DMPPair, RelationRecord};
use crate::solver::{assemble_and_invert, default_probe_table, solve_expansion, synthesize_vector, CoefficientEntry, ExpansionResult};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Budgets in seconds, indexed by criterion number.
pub const BUDGETS: [Option<u64>; 10] = [None, Some(60), Some(120), Some(30), None, Some(10), Some(120), Some(60), None, None];

/// Fewest refine instances checked against the measures.
pub const MIN_REFINE_INSTANCES: usize = 20;
pub const MODULES_PER_INSTANCE: usize = 50;
pub const ROUND_TRIPS: usize = 100;
pub const PROBE_SAMPLES: usize = 200;
pub const PROBE_DEPTH: i64 = 3;
pub const GEODESICS: usize = 1000;
pub const MAX_DENOMINATOR: i64 = 8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelftestConfig {
    pub q: u32,
    /// Truncation for the rank-two computations.
    pub k: i64,
    /// Truncation for the rank-three coefficient matrix.
    pub k_gl3: i64,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { q: 5, k: 2, k_gl3: 1, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: Option<u64>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let budget = self.budget_seconds.map_or(String::new(), |b| format!(" / {b} s"));
        format!(
            "criterion {}: {} {} [{:.2} s{budget}] {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

/// Records produced by earlier criteria and consumed by the count checks.
#[derive(Debug, Default)]
pub struct Collected {
    pub records: Vec<RelationRecord>,
}

fn timed(id: usize, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    let start = Instant::now();
    let (ok, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = start.elapsed().as_secs_f64();
    let budget = BUDGETS[id];
    let within = budget.map_or(true, |b| seconds <= b as f64);
    let detail = if within { detail } else { format!("{detail}; over budget") };
    CriterionResult { id, name: name.to_string(), passed: ok && within, detail, seconds, budget_seconds: budget }
}

/// Runs every criterion in order.
pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionResult> {
    let mut collected = Collected::default();
    let mut out = vec![
        criterion_1(cfg),
        criterion_2(cfg, &mut collected),
        criterion_3(cfg, &mut collected),
        criterion_4(cfg),
        criterion_5(cfg),
        criterion_6(cfg),
        criterion_7(cfg),
    ];
    out.push(criterion_8(&collected));
    out.push(criterion_9(&collected));
    out
}

fn all_vectors(q: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (q as u64).pow(len as u32);
    (0..total).map(move |mut idx| {
        (0..len)
            .map(|_| {
                let d = (idx % q as u64) as u32;
                idx /= q as u64;
                d
            })
            .collect()
    })
}

/// Every pair with degenerate `phi` at the rank-two sweep points.
pub fn degenerate_sweep(q: u32) -> Result<Vec<DMPPair>> {
    let mut out = Vec::new();
    for x in [ApartmentPoint::origin(2), ApartmentPoint::new(vec![crate::rational::q(1, 2), qi(0)])] {
        for s in [crate::rational::q(1, 2), qi(1)] {
            let dim = support(&x, -s).dim();
            for v in all_vectors(q, dim) {
                let phi = GradedElement::from_vector(&x, -s, q, &v);
                if is_degenerate(&phi)? {
                    out.push(DMPPair::new(s, &x, phi)?);
                }
            }
        }
    }
    Ok(out)
}

pub fn criterion_1(cfg: &SelftestConfig) -> CriterionResult {
    timed(1, "density support matches lift dominance", || {
        let pairs = degenerate_sweep(cfg.q)?;
        let orbits = all_orbits(2);
        let checks: Vec<(DMPPair, OrbitLabel)> =
            pairs.iter().flat_map(|p| orbits.iter().map(move |o| (p.clone(), o.clone()))).collect();
        let violations = checks
            .par_iter()
            .map(|(p, o)| -> Result<usize> {
                let nonzero = !count_measure(o, p, cfg.k)?.is_zero();
                Ok(usize::from(nonzero != dominance_leq(&p.lift, o)?))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<usize>();
        Ok((violations == 0, format!("{} pairs x {} orbits, {violations} violations", pairs.len(), orbits.len())))
    })
}

fn worked_iwahori(q: u32, c: u32) -> Result<(DMPPair, ApartmentPoint, Level)> {
    let y = ApartmentPoint::new(vec![crate::rational::q(3, 8), qi(0)]);
    let entries: Vec<(usize, usize, u32)> = if c == 0 { Vec::new() } else { vec![(0, 1, c)] };
    let phi = GradedElement::new(&y, crate::rational::q(-5, 8), q, &entries)?;
    let coarse = DMPPair::new(crate::rational::q(5, 8), &y, phi)?;
    Ok((coarse, ApartmentPoint::new(vec![crate::rational::q(1, 2), qi(0)]), crate::rational::q(1, 2)))
}

fn worked_hyperspecial(q: u32) -> Result<(DMPPair, ApartmentPoint, Level)> {
    let y = ApartmentPoint::new(vec![crate::rational::q(1, 4), qi(0)]);
    let coarse = DMPPair::new(qi(1), &y, GradedElement::zero(&y, qi(-1), q))?;
    Ok((coarse, ApartmentPoint::origin(2), qi(1)))
}

fn random_q<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Q {
    let d = rng.gen_range(1..=MAX_DENOMINATOR);
    q(rng.gen_range(lo * d..hi * d), d)
}

fn random_point<R: Rng>(rng: &mut R, n: usize) -> ApartmentPoint {
    let mut coords: Vec<Q> = (0..n - 1).map(|_| random_q(rng, 0, 1)).collect();
    coords.push(qi(0));
    ApartmentPoint::new(coords)
}

fn random_level<R: Rng>(rng: &mut R) -> Level {
    loop {
        let s = random_q(rng, 0, 2);
        if s > qi(0) {
            return s;
        }
    }
}

/// A coarse pair on an open interval of a random geodesic and the adjacent
/// breakpoint, or `None` if the draw is unusable.
fn random_refine_instance<R: Rng>(rng: &mut R, q: u32, max_fork: u64) -> Result<Option<(DMPPair, ApartmentPoint, Level)>> {
    let (x0, s0) = (random_point(rng, 2), random_level(rng));
    let (x1, s1) = (random_point(rng, 2), random_level(rng));
    if (&x0, s0) == (&x1, s1) {
        return Ok(None);
    }
    let plan = breakpoints(&x0, s0, &x1, s1)?;
    let idx = rng.gen_range(0..plan.breakpoints.len());
    let adj = plan.adjacent_intervals(idx);
    let iv = &plan.intervals[adj[rng.gen_range(0..adj.len())]];
    let (y, tau) = plan.point(iv.sample);
    let (x, s) = plan.point(plan.breakpoints[idx]);
    if tau <= qi(0) || s <= qi(0) {
        return Ok(None);
    }
    let dim = support(&y, -tau).dim();
    let v: Vec<u32> = (0..dim).map(|_| rng.gen_range(0..q)).collect();
    let phi = GradedElement::from_vector(&y, -tau, q, &v);
    if !is_degenerate(&phi)? {
        return Ok(None);
    }
    let coarse = DMPPair::new(tau, &y, phi)?;
    let fk = crate::refine::fork(&coarse, &x, s)?;
    if fk.size(q) > max_fork {
        return Ok(None);
    }
    Ok(Some((coarse, x, s)))
}

pub fn refine_instances(cfg: &SelftestConfig) -> Result<Vec<(DMPPair, ApartmentPoint, Level)>> {
    let mut out = Vec::new();
    for c in 0..cfg.q {
        out.push(worked_iwahori(cfg.q, c)?);
    }
    out.push(worked_hyperspecial(cfg.q)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x2);
    let target = out.len() + MIN_REFINE_INSTANCES;
    let mut draws = 0;
    while out.len() < target {
        draws += 1;
        if draws > 100_000 {
            return Err(DmpError::infeasible("selftest", "refine_instances", "too few usable random instances"));
        }
        if let Some(inst) = random_refine_instance(&mut rng, cfg.q, (cfg.q as u64).pow(3))? {
            out.push(inst);
        }
    }
    Ok(out)
}

pub fn criterion_2(cfg: &SelftestConfig, collected: &mut Collected) -> CriterionResult {
    timed(2, "refinement records hold for both densities", || {
        let instances = refine_instances(cfg)?;
        let records =
            instances.iter().map(|(c, x, s)| refine_relation(c, x, *s)).collect::<Result<Vec<_>>>()?;
        let orbits = all_orbits(2);
        let checks: Vec<(usize, &OrbitLabel)> =
            (0..records.len()).flat_map(|i| orbits.iter().map(move |o| (i, o))).collect();
        let failures: Vec<String> = checks
            .par_iter()
            .map(|&(i, o)| -> Result<Option<String>> {
                Ok((!verify_relation_measure(&records[i], o, cfg.k)?).then(|| format!("{} on {o}", records[i].lhs)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let terms: usize = records.iter().map(|r| r.terms.len()).sum();
        let detail = format!(
            "{} records, {terms} correction terms, {} failures{}",
            records.len(),
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(" (first: {f})"))
        );
        let ok = failures.is_empty() && records.len() >= MIN_REFINE_INSTANCES;
        collected.records.extend(records);
        Ok((ok, detail))
    })
}

pub fn criterion_3(cfg: &SelftestConfig, collected: &mut Collected) -> CriterionResult {
    timed(3, "fork extension sums match restricted multiplicities", || {
        let field = GF::new(2, 4)?;
        let instances = vec![worked_iwahori(cfg.q, 1)?, worked_hyperspecial(cfg.q)?];
        let mut failures = 0;
        let mut degenerate_only_mismatch = 0;
        for (k, (coarse, x, s)) in instances.iter().enumerate() {
            collected.records.push(refine_relation(coarse, x, *s)?);
            let outcomes = (0..MODULES_PER_INSTANCE)
                .into_par_iter()
                .map(|i| -> Result<(bool, bool)> {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((k as u64) << 32 | i as u64));
                    let dim = rng.gen_range(1..=16);
                    let m = FiniteModule::random(x, *s, cfg.q, &field, dim, &mut rng)?;
                    let r = fork_identity(&m, coarse, x, *s)?;
                    Ok((r.holds(), r.degenerate_sum == r.restricted))
                })
                .collect::<Result<Vec<_>>>()?;
            failures += outcomes.iter().filter(|o| !o.0).count();
            degenerate_only_mismatch += outcomes.iter().filter(|o| !o.1).count();
        }
        Ok((
            failures == 0,
            format!(
                "{} modules, {failures} failures; degenerate-only sum differs on {degenerate_only_mismatch}",
                instances.len() * MODULES_PER_INSTANCE
            ),
        ))
    })
}

fn check_structure(n: usize, q: u32, k: i64) -> Result<(bool, String)> {
    let (probes, table) = default_probe_table(n, q, qi(0), k)?;
    let cm = assemble_and_invert(&probes, &table)?;
    let size = cm.orbits.len();
    let mut ok = true;
    for i in 0..size {
        ok &= cm.m.get(i, i).is_positive();
        for j in 0..i {
            ok &= cm.m.get(i, j).is_zero();
        }
    }
    for o in &cm.orbits {
        for op in &cm.orbits {
            if !dominance_leq(o, op)? {
                ok &= cm.a(op, o).is_some_and(|a| a.is_zero());
            }
        }
    }
    ok &= cm.m.mul(&cm.inverse) == QMatrix::identity(size);
    Ok((ok, format!("GL_{n}: {size}x{size}, K = {k}")))
}

pub fn criterion_4(cfg: &SelftestConfig) -> CriterionResult {
    timed(4, "coefficient matrices are triangular and invert exactly", || {
        let (a, da) = check_structure(2, cfg.q, cfg.k)?;
        let (b, db) = check_structure(3, cfg.q, cfg.k_gl3)?;
        Ok((a && b, format!("{da}; {db}")))
    })
}

fn random_big<R: Rng>(rng: &mut R) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(-1000i64..=1000)), BigInt::from(rng.gen_range(1i64..=1000)))
}

pub fn criterion_5(cfg: &SelftestConfig) -> CriterionResult {
    timed(5, "solve inverts synthesis", || {
        let (probes, table) = default_probe_table(2, cfg.q, qi(0), cfg.k)?;
        let cm = assemble_and_invert(&probes, &table)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5);
        let mut mismatches = 0;
        for _ in 0..ROUND_TRIPS {
            let c = ExpansionResult {
                coefficients: cm
                    .orbits
                    .iter()
                    .map(|o| CoefficientEntry { orbit: o.clone(), value: random_big(&mut rng) })
                    .collect(),
                normalization: cm.normalization.clone(),
                lambda_c: cm.lambda_c,
                k: cm.k,
            };
            let v = synthesize_vector(&c, &cm.probes, &table)?;
            if solve_expansion(&v, &cm)?.coefficients != c.coefficients {
                mismatches += 1;
            }
        }
        Ok((mismatches == 0, format!("{ROUND_TRIPS} vectors, {mismatches} mismatches")))
    })
}

pub fn criterion_6(cfg: &SelftestConfig) -> CriterionResult {
    timed(6, "no sampled nilpotent undercuts the lift", || {
        let pairs = degenerate_sweep(cfg.q)?;
        let mut counterexamples = 0;
        let mut nilpotent = 0;
        for (i, p) in pairs.iter().enumerate() {
            let rep = minimality_report(p.s, &p.x, &p.phi, PROBE_SAMPLES, PROBE_DEPTH, cfg.seed ^ (i as u64) << 8)?;
            nilpotent += rep.nilpotent_samples;
            counterexamples += usize::from(!rep.passed());
        }
        Ok((
            counterexamples == 0,
            format!("{} pairs, {nilpotent} nilpotent samples, {counterexamples} counterexamples", pairs.len()),
        ))
    })
}

pub fn criterion_7(cfg: &SelftestConfig) -> CriterionResult {
    timed(7, "geodesic certificates", || {
        let failures = (0..GEODESICS)
            .into_par_iter()
            .map(|i| -> Result<usize> {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7 ^ (i as u64) << 16);
                let n = rng.gen_range(2..=3);
                let (x0, s0) = (random_point(&mut rng, n), random_q(&mut rng, -2, 2));
                let (x1, s1) = (random_point(&mut rng, n), random_q(&mut rng, -2, 2));
                let plan = match breakpoints(&x0, s0, &x1, s1) {
                    Ok(p) => p,
                    Err(DmpError::Contract { .. }) => return Ok(1),
                    Err(e) => return Err(e),
                };
                let mut bad = 0;
                for (idx, &t) in plan.breakpoints.iter().enumerate() {
                    let (x, s) = plan.point(t);
                    let here = ShapeSet::at(&x, s);
                    for k in plan.adjacent_intervals(idx) {
                        bad += usize::from(!inclusion_chains_hold(&here, &plan.intervals[k].shapes));
                    }
                    bad += usize::from(!convexity_check(&x0, s0, &x1, s1, t));
                }
                for iv in &plan.intervals {
                    for t in [iv.sample, iv.left + (iv.right - iv.left) / qi(4)] {
                        let (x, s) = plan.point(t);
                        bad += usize::from(ShapeSet::at(&x, s) != iv.shapes);
                        bad += usize::from(!convexity_check(&x0, s0, &x1, s1, t));
                    }
                }
                Ok(usize::from(bad > 0))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<usize>();
        Ok((failures == 0, format!("{GEODESICS} geodesics, {failures} failures")))
    })
}

pub fn criterion_8(collected: &Collected) -> CriterionResult {
    timed(8, "orbit counts are powers of q and both counts agree", || {
        let mut bad = 0;
        let mut both = 0;
        for rec in &collected.records {
            let q = rec.c.q as u64;
            let mut v = rec.provenance.count_b;
            while v > 1 && v % q == 0 {
                v /= q;
            }
            bad += usize::from(v != 1 || q.pow(rec.c.e as u32) != rec.provenance.count_b);
            match unipotent_orbit_count(&rec.lhs.x, &rec.rep.x, &rec.rep.phi, ORBIT_SEARCH_BOUND) {
                Ok(oc) => {
                    bad += usize::from(oc.size != rec.provenance.count_b);
                    both += usize::from(oc.method == CountMethod::Both);
                }
                Err(DmpError::Infeasible { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok((
            bad == 0 && !collected.records.is_empty(),
            format!("{} records, {both} with both counts, {bad} failures", collected.records.len()),
        ))
    })
}

/// `dim (g_{x>=-s} ∩ g_{y>-tau}) / g_{x>-s}`.
pub fn quotient_dim(coarse: &DMPPair, x: &ApartmentPoint, s: Level) -> usize {
    let lo_x = lattice_bounds(x, -s, false);
    let hi_x = lattice_bounds(x, -s, true);
    let lo_y = lattice_bounds(&coarse.x, -coarse.s, true);
    let n = x.dim();
    let mut dim = 0;
    for i in 0..n {
        for j in 0..n {
            dim += (hi_x[i][j] - lo_x[i][j].max(lo_y[i][j])).max(0) as usize;
        }
    }
    dim
}

pub fn criterion_9(collected: &Collected) -> CriterionResult {
    timed(9, "fork partition counts are conserved", || {
        let mut bad = 0;
        for rec in &collected.records {
            let p = &rec.provenance;
            let dim = quotient_dim(&rec.lhs, &p.finer_point, p.finer_level);
            bad += usize::from(p.count_a + p.count_b + p.count_c != (rec.c.q as u64).pow(dim as u32));
        }
        Ok((bad == 0 && !collected.records.is_empty(), format!("{} records, {bad} failures", collected.records.len())))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_size() {
        // 1 + 25 at the origin, 9 + 1 at (1/2, 0)
        assert_eq!(degenerate_sweep(5).unwrap().len(), 36);
    }

    #[test]
    fn quotient_dim_of_worked_forks() {
        let (c, x, s) = worked_iwahori(5, 1).unwrap();
        assert_eq!(quotient_dim(&c, &x, s), 1);
        let (c, x, s) = worked_hyperspecial(5).unwrap();
        assert_eq!(quotient_dim(&c, &x, s), 1);
    }
}
