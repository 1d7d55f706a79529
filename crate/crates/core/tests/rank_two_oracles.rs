//! Brute-force checks in rank two: every nonzero nilpotent is
//! `lambda [[ab, -a^2], [b^2, -ab]]` with `(a, b)` primitive, so residues of
//! the regular orbit can be listed directly.

use dmp_core::apartment::{lattice_bounds, support, ApartmentPoint};
use dmp_core::graded::{homogeneous_lift, is_degenerate, GradedElement};
use dmp_core::measures::{count_measure, reference_exponent};
use dmp_core::orbits::OrbitLabel;
use dmp_core::rational::{q, qi, Q};
use dmp_core::refine::DMPPair;
use dmp_core::selftest::degenerate_sweep;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::{HashMap, HashSet};

const P: u32 = 5;

/// Truncated power series in `t`, length `len`.
fn mul(a: &[u32], b: &[u32], len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = (out[i + j] + x * y) % P;
        }
    }
    out
}

fn series(mut idx: u64, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (idx % P as u64) as u32;
            idx /= P as u64;
            d
        })
        .collect()
}

/// Primitive `(a, b)` modulo `t^len` up to units: `a = 1`, or `b = 1` with `t | a`.
fn primitive_directions(len: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let count = (P as u64).pow(len as u32);
    let mut one = vec![0u32; len];
    one[0] = 1;
    let mut out = Vec::new();
    for i in 0..count {
        let v = series(i, len);
        out.push((one.clone(), v.clone()));
        if v[0] == 0 {
            out.push((v, one.clone()));
        }
    }
    out
}

/// Residues modulo `t^top` of nilpotents with entries of valuation at least
/// `low`, encoded entry-major as coefficients of `t^low .. t^(top-1)`.
fn nilpotent_residues(low: i64, top: i64, cache: &mut HashMap<(i64, i64), HashSet<Vec<u32>>>) -> &HashSet<Vec<u32>> {
    cache.entry((low, top)).or_insert_with(|| {
        let depth = (top - low) as usize;
        let mut out = HashSet::new();
        out.insert(vec![0; 4 * depth]);
        let neg = |v: &[u32]| v.iter().map(|&c| (P - c) % P).collect::<Vec<_>>();
        for e in low..top {
            let len = (top - e) as usize;
            let units: Vec<Vec<u32>> =
                (0..(P as u64).pow(len as u32)).map(|i| series(i, len)).filter(|u| u[0] != 0).collect();
            for (a, b) in primitive_directions(len) {
                let ab = mul(&a, &b, len);
                let m = [ab.clone(), neg(&mul(&a, &a, len)), mul(&b, &b, len), neg(&ab)];
                for mu in &units {
                    let mut code = vec![0u32; 4 * depth];
                    let off = (e - low) as usize;
                    for (k, entry) in m.iter().enumerate() {
                        code[k * depth + off..k * depth + off + len].copy_from_slice(&mul(mu, entry, len));
                    }
                    out.insert(code);
                }
            }
        }
        out
    })
}

/// Fixed coefficients of the coset of `phi` at levels `low .. top`.
fn coset_pattern(phi: &GradedElement, low: i64, top: i64) -> Vec<Option<u32>> {
    let depth = (top - low) as usize;
    let strict = lattice_bounds(&phi.x, phi.degree, true);
    let lift = homogeneous_lift(phi);
    let mut pat = vec![None; 4 * depth];
    for i in 0..2 {
        for j in 0..2 {
            for lv in 0..depth {
                let m = low + lv as i64;
                if m < strict[i][j] {
                    let c = lift.entries.iter().find(|e| (e.0, e.1, e.3) == (i, j, m)).map_or(0, |e| e.2);
                    pat[(i * 2 + j) * depth + lv] = Some(c);
                }
            }
        }
    }
    pat
}

fn matches(code: &[u32], pat: &[Option<u32>]) -> bool {
    code.iter().zip(pat).all(|(c, p)| p.map_or(true, |v| v == *c))
}

fn low_of(pair: &DMPPair) -> i64 {
    lattice_bounds(&pair.x, -pair.s, false).into_iter().flatten().min().unwrap()
}

#[test]
fn regular_density_matches_enumeration() {
    let regular = OrbitLabel::regular(2);
    let mut cache = HashMap::new();
    for k in [1, 2] {
        for pair in degenerate_sweep(P).unwrap() {
            let low = low_of(&pair);
            let top = reference_exponent(std::slice::from_ref(&pair)) + k;
            let pat = coset_pattern(&pair.phi, low, top);
            let residues = nilpotent_residues(low, top, &mut cache);
            let hits = residues.iter().filter(|r| matches(r, &pat)).count();
            let expected = BigRational::new(BigInt::from(hits), BigInt::from(P).pow(2 * top as u32));
            assert_eq!(count_measure(&regular, &pair, k).unwrap(), expected, "{pair} at K = {k}");
        }
    }
}

#[test]
fn degeneracy_matches_enumeration() {
    let points: [(ApartmentPoint, Q); 4] = [
        (ApartmentPoint::origin(2), qi(1)),
        (ApartmentPoint::new(vec![q(1, 2), qi(0)]), q(1, 2)),
        (ApartmentPoint::new(vec![q(1, 2), qi(0)]), qi(1)),
        (ApartmentPoint::new(vec![q(1, 3), qi(0)]), q(2, 3)),
    ];
    let mut cache = HashMap::new();
    for (x, s) in points {
        let dim = support(&x, -s).dim();
        let strict = lattice_bounds(&x, -s, true);
        let low = lattice_bounds(&x, -s, false).into_iter().flatten().min().unwrap();
        let top = strict.into_iter().flatten().max().unwrap();
        let residues = nilpotent_residues(low, top, &mut cache).clone();
        for idx in 0..(P as u64).pow(dim as u32) {
            let v = series(idx, dim);
            let phi = GradedElement::from_vector(&x, -s, P, &v);
            let pat = coset_pattern(&phi, low, top);
            let brute = residues.iter().any(|r| matches(r, &pat));
            assert_eq!(is_degenerate(&phi).unwrap(), brute, "phi = {:?} at {:?}, s = {s}", phi.coeffs, x.coords());
        }
    }
}
