//! Cyclic covers of parabolic fibrations, cyclic quotient singularities and
//! Hirzebruch-Jung strings.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::divisors::{BaseCurve, GraphDivisor};
use crate::error::{Error, Result};
use crate::trees::FiberTree;

/// Entry `e/m` of a DPD divisor at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpdEntry {
    pub point: String,
    pub e: i64,
    pub m: u64,
}

/// Rational divisor `sum (e_i/m_i) p_i` with coprime `e_i`, `m_i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DpdDivisor {
    pub entries: Vec<DpdEntry>,
}

impl DpdDivisor {
    pub fn new(entries: Vec<DpdEntry>) -> Result<Self> {
        for entry in &entries {
            if entry.m == 0 {
                return Err(Error::BadParameters(format!("zero denominator at {}", entry.point)));
            }
            if entry.e.unsigned_abs().gcd(&entry.m) != 1 {
                return Err(Error::BadParameters(format!(
                    "{}/{} at {} is not in lowest terms",
                    entry.e, entry.m, entry.point
                )));
            }
        }
        Ok(DpdDivisor { entries })
    }

    pub fn multiplicities(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.m).collect()
    }
}

impl FromStr for DpdDivisor {
    type Err = Error;

    /// Parses `"p1:1/2,p2:3/4"`; a bare integer means denominator 1.
    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut column = 1;
        for part in s.split(',') {
            let here = column;
            column += part.chars().count() + 1;
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (point, frac) = part
                .split_once(':')
                .ok_or_else(|| Error::parse(1, here, format!("expected `point:e/m`, got `{part}`")))?;
            let (e, m) = frac.split_once('/').unwrap_or((frac, "1"));
            let e = e.trim().parse().map_err(|err| Error::parse(1, here, format!("numerator: {err}")))?;
            let m = m.trim().parse().map_err(|err| Error::parse(1, here, format!("denominator: {err}")))?;
            entries.push(DpdEntry {
                point: point.trim().to_string(),
                e,
                m,
            });
        }
        DpdDivisor::new(entries)
    }
}

/// Least common multiple of the multiplicities.
pub fn cover_order(multiplicities: &[u64]) -> Result<u64> {
    if multiplicities.is_empty() || multiplicities.contains(&0) {
        return Err(Error::BadParameters("multiplicities must be a nonempty list of positive integers".into()));
    }
    multiplicities.iter().try_fold(1u64, |acc, &m| {
        let g = acc.gcd(&m);
        (acc / g)
            .checked_mul(m)
            .ok_or_else(|| Error::BadParameters("cover order overflows".into()))
    })
}

/// Coefficients of the pulled-back divisor under a cyclic cover of degree `d`.
pub fn dpd_cover(dpd: &DpdDivisor, d: u64) -> Result<Vec<(String, i64)>> {
    dpd.entries
        .iter()
        .map(|entry| {
            if d % entry.m != 0 {
                return Err(Error::NonIntegral {
                    point: entry.point.clone(),
                    e: entry.e,
                    m: entry.m,
                    d,
                });
            }
            let c = i128::from(entry.e) * i128::from(d / entry.m);
            let c = i64::try_from(c).map_err(|_| Error::BadParameters("coefficient overflows".into()))?;
            Ok((entry.point.clone(), c))
        })
        .collect()
}

/// The cover as a line bundle: trivial fibers over the ramification points.
pub fn dpd_lift(dpd: &DpdDivisor, d: u64) -> Result<GraphDivisor> {
    dpd_cover(dpd, d)?;
    let points: Vec<String> = dpd.entries.iter().map(|e| e.point.clone()).collect();
    let mut base = BaseCurve::line(points.clone());
    base.mu = d;
    Ok(GraphDivisor {
        base,
        fibers: points.into_iter().map(|p| (p, FiberTree::single(0))).collect(),
        equivariance: None,
    })
}

/// Type `(m, e')` of the quotient singularity, `e'` reduced into `1..m`.
pub fn singularity_type(e: i64, m: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::BadParameters("zero denominator".into()));
    }
    if m == 1 {
        return Err(Error::NotSingular);
    }
    if e.unsigned_abs().gcd(&m) != 1 {
        return Err(Error::BadParameters(format!("{e} and {m} are not coprime")));
    }
    let r = i128::from(e).rem_euclid(i128::from(m));
    Ok((m, r as u64))
}

/// Chain of weights, each at most `-2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct HjString(pub Vec<i64>);

impl fmt::Display for HjString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Negative continued fraction of `n/q`, negated.
pub fn hj_string(n: u64, q: u64) -> Result<HjString> {
    if q == 0 || q >= n || n.gcd(&q) != 1 {
        return Err(Error::BadParameters(format!("need 1 <= q < n with gcd 1, got n={n}, q={q}")));
    }
    let (mut n, mut q) = (u128::from(n), u128::from(q));
    let mut out = Vec::new();
    while q > 0 {
        let a = n.div_ceil(q);
        out.push(-(a as i64));
        (n, q) = (q, a * q - n);
    }
    Ok(HjString(out))
}

/// Evaluates the continued fraction back to `(n, q)`.
pub fn hj_inverse(s: &HjString) -> Result<(u64, u64)> {
    if s.0.is_empty() || s.0.iter().any(|&a| a > -2) {
        return Err(Error::BadParameters(format!("not a Hirzebruch-Jung string: {s}")));
    }
    let (mut num, mut den) = (1u128, 0u128);
    for &a in s.0.iter().rev() {
        let a = u128::from(a.unsigned_abs());
        let next = a
            .checked_mul(num)
            .and_then(|x| x.checked_sub(den))
            .ok_or_else(|| Error::BadParameters("continued fraction overflows".into()))?;
        (num, den) = (next, num);
    }
    let conv = |x: u128| u64::try_from(x).map_err(|_| Error::BadParameters("continued fraction overflows".into()));
    Ok((conv(num)?, conv(den)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_orders() {
        assert_eq!(cover_order(&[2, 3]).unwrap(), 6);
        assert_eq!(cover_order(&[1, 1, 1]).unwrap(), 1);
        assert_eq!(cover_order(&[4, 6, 10]).unwrap(), 60);
        assert!(cover_order(&[]).is_err());
    }

    #[test]
    fn cover_coefficients() {
        let one = |e, m| DpdDivisor::new(vec![DpdEntry { point: "p".into(), e, m }]).unwrap();
        assert_eq!(dpd_cover(&one(1, 2), 2).unwrap(), vec![("p".into(), 1)]);
        assert_eq!(dpd_cover(&one(3, 4), 8).unwrap(), vec![("p".into(), 6)]);
        assert!(matches!(dpd_cover(&one(1, 3), 4), Err(Error::NonIntegral { d: 4, .. })));
        assert!(DpdDivisor::new(vec![DpdEntry { point: "p".into(), e: 2, m: 4 }]).is_err());
    }

    #[test]
    fn dpd_literal() {
        let d: DpdDivisor = "p1:1/2, p2:-3/4,p3:5".parse().unwrap();
        assert_eq!(d.multiplicities(), vec![2, 4, 1]);
        assert_eq!(d.entries[1].e, -3);
        assert!(matches!("p1 1/2".parse::<DpdDivisor>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn singularity_types() {
        assert_eq!(singularity_type(5, 3).unwrap(), (3, 2));
        assert_eq!(singularity_type(-1, 4).unwrap(), (4, 3));
        assert_eq!(singularity_type(1, 2).unwrap(), (2, 1));
        assert_eq!(singularity_type(7, 1), Err(Error::NotSingular));
    }

    #[test]
    fn hj_examples() {
        assert_eq!(hj_string(2, 1).unwrap(), HjString(vec![-2]));
        assert_eq!(hj_string(5, 2).unwrap(), HjString(vec![-3, -2]));
        assert_eq!(hj_string(9, 1).unwrap(), HjString(vec![-9]));
        assert_eq!(hj_string(5, 2).unwrap().to_string(), "[-3,-2]");
        assert_eq!(hj_inverse(&HjString(vec![-2])).unwrap(), (2, 1));
        assert_eq!(hj_inverse(&HjString(vec![-3, -2])).unwrap(), (5, 2));
        assert_eq!(hj_inverse(&HjString(vec![-2, -2, -2])).unwrap(), (4, 3));
        assert!(hj_string(4, 2).is_err());
        assert!(hj_string(3, 3).is_err());
        assert!(hj_inverse(&HjString(vec![-1])).is_err());
    }
}
