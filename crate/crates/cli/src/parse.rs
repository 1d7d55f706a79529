//! Text forms of points, levels and graded elements on the command line.

use dmp_core::apartment::{ApartmentPoint, GroupConfig, Level};
use dmp_core::graded::GradedElement;
use dmp_core::rational::parse_q;
use dmp_core::{DmpError, Result};
use num_integer::Integer;

fn bad(what: &str, text: &str) -> DmpError {
    DmpError::validation("cli", "parse", format!("cannot read {what} from {text:?}"))
}

/// `"1/2"`.
pub fn level(text: &str) -> Result<Level> {
    parse_q(text).ok_or_else(|| bad("a rational level", text))
}

/// `"3/8,0"`.
pub fn point(text: &str) -> Result<ApartmentPoint> {
    let coords = text.split(',').map(|c| parse_q(c).ok_or_else(|| bad("a point", text))).collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(bad("a point", text));
    }
    Ok(ApartmentPoint::new(coords))
}

/// `"1,2,1;2,1,3"`: one-based `i,j,c` triples.
pub fn entries(text: &str) -> Result<Vec<(usize, usize, u32)>> {
    if text.trim().is_empty() || text.trim() == "0" {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|t| {
            let parts: Vec<&str> = t.split(',').map(str::trim).collect();
            let [i, j, c] = parts.as_slice() else { return Err(bad("an entry", t)) };
            let i: usize = i.parse().map_err(|_| bad("an entry", t))?;
            let j: usize = j.parse().map_err(|_| bad("an entry", t))?;
            let c: u32 = c.parse().map_err(|_| bad("an entry", t))?;
            if i == 0 || j == 0 {
                return Err(bad("a one-based entry", t));
            }
            Ok((i - 1, j - 1, c))
        })
        .collect()
}

pub fn element(x: &ApartmentPoint, degree: Level, q: u32, text: &str) -> Result<GradedElement> {
    GradedElement::new(x, degree, q, &entries(text)?)
}

/// Group config with `m` taken from the flag or from the inputs.
pub fn group(n: usize, q: u32, m: Option<i64>, points: &[&ApartmentPoint], levels: &[Level]) -> Result<GroupConfig> {
    let derived = points
        .iter()
        .map(|p| p.denominator())
        .chain(levels.iter().map(|s| *s.denom()))
        .fold(1i64, |a, d| a.lcm(&d));
    let cfg = GroupConfig::new(n, q, m.unwrap_or(derived))?;
    for p in points {
        if p.dim() != n {
            return Err(DmpError::validation("cli", "parse", format!("point has {} coordinates, expected n = {n}", p.dim())));
        }
        p.validate(&cfg)?;
    }
    for s in levels {
        dmp_core::apartment::validate_level(&cfg, *s)?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dmp_core::rational::q;

    #[test]
    fn reads_points_and_entries() {
        assert_eq!(point("3/8, 0").unwrap().coords(), &[q(3, 8), q(0, 1)]);
        assert_eq!(entries("1,2,1;2,1,3").unwrap(), vec![(0, 1, 1), (1, 0, 3)]);
        assert!(entries("0,1,1").is_err());
        assert!(entries("1,2").is_err());
        assert!(entries("0").unwrap().is_empty());
        assert!(level("1/0").is_err());
    }
}
