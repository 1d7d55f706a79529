//! Expansion coefficients from multiplicities on a probe family.

use crate::apartment::{ApartmentPoint, Level};
use crate::error::{DmpError, Result};
use crate::graded::GradedElement;
use crate::measures::{build_measure_table, MeasureTable, ProbeSet};
use crate::orbits::{all_orbits, dominance_leq, linear_extension, OrbitLabel};
use crate::qmatrix::QMatrix;
use crate::rational::{floor_q, q, qi, serde_big, serde_q};
use crate::refine::{ComponentValues, DMPPair};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::path::Path;

const MODULE: &str = "solver";

/// One probe per orbit, each with level above `r`.
///
/// Rank two uses the hyperspecial zero pattern and the Iwahori `e_12`
/// pattern; higher ranks use the Iwahori point `((n-1)/n, .., 1/n, 0)` at
/// level `1/n` with chains of `e_{i+1,i}` cut to the partition.
pub fn choose_probes(n: usize, field_q: u32, r: Level) -> Result<Vec<(OrbitLabel, DMPPair)>> {
    const OP: &str = "choose_probes";
    if r < qi(0) {
        return Err(DmpError::validation(MODULE, OP, format!("depth bound {r} is negative")));
    }
    if n < 2 {
        return Err(DmpError::validation(MODULE, OP, "rank must be at least 2"));
    }
    let shift = |s: Level| -> Level {
        // smallest integer k with s + k > r
        let k = (floor_q(r - s) + 1).max(0);
        s + qi(k)
    };
    let mut out = Vec::new();
    for orbit in linear_extension(&all_orbits(n)) {
        let (x, s0, entries): (ApartmentPoint, Level, Vec<(usize, usize, u32)>) = if n == 2 {
            if orbit == OrbitLabel::zero(2) {
                (ApartmentPoint::origin(2), qi(1), Vec::new())
            } else {
                (ApartmentPoint::new(vec![q(1, 2), qi(0)]), q(1, 2), vec![(0, 1, 1)])
            }
        } else {
            let x = ApartmentPoint::new((0..n).map(|i| q((n - 1 - i) as i64, n as i64)).collect());
            let mut entries = Vec::new();
            let mut start = 0;
            for &part in orbit.partition() {
                for i in start..start + part - 1 {
                    entries.push((i + 1, i, 1));
                }
                start += part;
            }
            (x, q(1, n as i64), entries)
        };
        let s = shift(s0);
        let phi = GradedElement::new(&x, -s, field_q, &entries)?;
        let pair = DMPPair::new(s, &x, phi)?;
        if pair.lift != orbit {
            return Err(DmpError::contract(MODULE, OP, format!("probe for {orbit} has lift {}", pair.lift)));
        }
        out.push((orbit, pair));
    }
    Ok(out)
}

mod serde_qmatrix {
    use super::QMatrix;
    use crate::rational::{format_ratio, parse_big};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &QMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.to_rows().iter().map(|r| r.iter().map(format_ratio).collect()).collect();
        s.collect_seq(rows)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<QMatrix, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| parse_big(&x).ok_or_else(|| D::Error::custom(format!("bad rational {x:?}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QMatrix::from_rows(parsed))
    }
}

/// `m[i][j] = density of orbits[j] on probes[i]` and its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientMatrix {
    pub orbits: Vec<OrbitLabel>,
    pub probes: Vec<DMPPair>,
    #[serde(with = "serde_qmatrix")]
    pub m: QMatrix,
    #[serde(with = "serde_qmatrix")]
    pub inverse: QMatrix,
    pub normalization: String,
    pub lambda_c: i64,
    pub k: i64,
}

impl CoefficientMatrix {
    fn index(&self, o: &OrbitLabel) -> Option<usize> {
        self.orbits.iter().position(|x| x == o)
    }

    /// `A_{O',O}`, the weight of the probe of `O'` in the coefficient of `O`.
    pub fn a(&self, o_prime: &OrbitLabel, o: &OrbitLabel) -> Option<&BigRational> {
        Some(self.inverse.get(self.index(o)?, self.index(o_prime)?))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| DmpError::contract(MODULE, "save", e.to_string()))?;
        std::fs::write(path, text).map_err(|e| DmpError::validation(MODULE, "save", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DmpError::validation(MODULE, "load", e.to_string()))?;
        let cm: CoefficientMatrix =
            serde_json::from_str(&text).map_err(|e| DmpError::validation(MODULE, "load", e.to_string()))?;
        if cm.m.mul(&cm.inverse) != QMatrix::identity(cm.orbits.len()) {
            return Err(DmpError::validation(MODULE, "load", "stored inverse does not invert the stored matrix"));
        }
        Ok(cm)
    }
}

/// Builds `M` from the table and inverts it exactly.
pub fn assemble_and_invert(probes: &[(OrbitLabel, DMPPair)], table: &MeasureTable) -> Result<CoefficientMatrix> {
    const OP: &str = "assemble_and_invert";
    let orbits: Vec<OrbitLabel> = probes.iter().map(|(o, _)| o.clone()).collect();
    let size = orbits.len();
    let mut m = QMatrix::zeros(size, size);
    for (i, (o_prime, pair)) in probes.iter().enumerate() {
        for (j, o) in orbits.iter().enumerate() {
            let v = table.get(o, pair).ok_or_else(|| {
                DmpError::validation(MODULE, OP, format!("table has no entry for {o} on {pair}"))
            })?;
            if !v.is_zero() && !dominance_leq(o_prime, o)? {
                return Err(DmpError::contract(MODULE, OP, format!("entry ({o_prime}, {o}) breaks triangularity")));
            }
            m.set(i, j, v.clone());
        }
        if m.get(i, i).is_zero() {
            return Err(DmpError::contract(MODULE, OP, format!("zero diagonal entry at {o_prime}")));
        }
    }
    let inverse = m.inverse().ok_or_else(|| DmpError::contract(MODULE, OP, "matrix is singular"))?;
    Ok(CoefficientMatrix {
        orbits,
        probes: probes.iter().map(|(_, p)| p.clone()).collect(),
        m,
        inverse,
        normalization: table.normalization.clone(),
        lambda_c: table.lambda_c,
        k: table.k,
    })
}

/// Default probes together with their density table.
pub fn default_probe_table(n: usize, field_q: u32, r: Level, k: i64) -> Result<(Vec<(OrbitLabel, DMPPair)>, MeasureTable)> {
    let probes = choose_probes(n, field_q, r)?;
    let set = ProbeSet::new(probes.iter().map(|(_, p)| p.clone()).collect(), k)?;
    let orbits: Vec<OrbitLabel> = probes.iter().map(|(o, _)| o.clone()).collect();
    let table = build_measure_table(&set, &orbits)?;
    Ok((probes, table))
}

/// Probes, their density table and the coefficient matrix in one call.
pub fn default_coefficient_matrix(n: usize, field_q: u32, r: Level, k: i64) -> Result<CoefficientMatrix> {
    let (probes, table) = default_probe_table(n, field_q, r, k)?;
    assemble_and_invert(&probes, &table)
}

/// Multiplicities `dim Hom(psi_phi, pi)` on a family of pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityVector {
    #[serde(with = "serde_q")]
    pub r: Level,
    pub entries: Vec<(DMPPair, u64)>,
    pub source: String,
}

impl MultiplicityVector {
    pub fn new(r: Level, entries: Vec<(DMPPair, u64)>, source: impl Into<String>) -> Result<Self> {
        if let Some((p, _)) = entries.iter().find(|(p, _)| p.s <= r) {
            return Err(DmpError::validation(
                MODULE,
                "multiplicity_vector",
                format!("pair {p} has level at most the depth bound {r}"),
            ));
        }
        Ok(MultiplicityVector { r, entries, source: source.into() })
    }
}

impl ComponentValues for MultiplicityVector {
    fn value(&self, pair: &DMPPair) -> Option<BigRational> {
        self.entries.iter().find(|(p, _)| p == pair).map(|(_, v)| BigRational::from_integer((*v).into()))
    }
}

/// Rational values on pairs, e.g. a synthesized vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalVector {
    pub entries: Vec<RationalEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalEntry {
    pub pair: DMPPair,
    #[serde(with = "serde_big")]
    pub value: BigRational,
}

impl ComponentValues for RationalVector {
    fn value(&self, pair: &DMPPair) -> Option<BigRational> {
        self.entries.iter().find(|e| e.pair == *pair).map(|e| e.value.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub orbit: OrbitLabel,
    #[serde(with = "serde_big")]
    pub value: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub coefficients: Vec<CoefficientEntry>,
    pub normalization: String,
    pub lambda_c: i64,
    pub k: i64,
}

impl ExpansionResult {
    pub fn coefficient(&self, o: &OrbitLabel) -> Option<&BigRational> {
        self.coefficients.iter().find(|e| e.orbit == *o).map(|e| &e.value)
    }
}

/// `c_O = sum_{O'} A_{O',O} v(probe_{O'})`.
pub fn solve_expansion(v: &dyn ComponentValues, cm: &CoefficientMatrix) -> Result<ExpansionResult> {
    let mut missing = Vec::new();
    let values: Vec<BigRational> = cm
        .probes
        .iter()
        .map(|p| {
            v.value(p).unwrap_or_else(|| {
                missing.push(p.to_string());
                BigRational::zero()
            })
        })
        .collect();
    if !missing.is_empty() {
        return Err(DmpError::validation(
            MODULE,
            "solve_expansion",
            format!("vector lacks probe entries: {}", missing.join(", ")),
        ));
    }
    let c = cm.inverse.mul_vec(&values);
    Ok(ExpansionResult {
        coefficients: cm.orbits.iter().cloned().zip(c).map(|(orbit, value)| CoefficientEntry { orbit, value }).collect(),
        normalization: cm.normalization.clone(),
        lambda_c: cm.lambda_c,
        k: cm.k,
    })
}

/// `v(pair) = sum_O density_O(pair) c_O` on every requested pair.
pub fn synthesize_vector(c: &ExpansionResult, pairs: &[DMPPair], table: &MeasureTable) -> Result<RationalVector> {
    let mut entries = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let mut acc = BigRational::zero();
        for e in &c.coefficients {
            let m = table.get(&e.orbit, pair).ok_or_else(|| {
                DmpError::validation(MODULE, "synthesize_vector", format!("table has no entry for {} on {pair}", e.orbit))
            })?;
            acc += m * &e.value;
        }
        entries.push(RationalEntry { pair: pair.clone(), value: acc });
    }
    Ok(RationalVector { entries })
}
