//! Numerical invariants of graph divisors.

use serde::Serialize;

use crate::covering::DpdDivisor;
use crate::divisors::GraphDivisor;
use crate::error::{Error, Result};
use crate::trees::{pseudominimalize, validate_contractible, FiberTree};

/// Vertices of the pseudominimal extended graph.
pub fn vertex_count(d: &GraphDivisor) -> Result<usize> {
    let mut v = 1 + d.base.infinity;
    for tree in d.fibers.values() {
        v += pseudominimalize(tree)?.len();
    }
    Ok(v)
}

/// Number of affine components of the fiber: the leaves of its pseudominimal
/// tree, and one for an irreducible fiber.
pub fn component_count(tree: &FiberTree) -> Result<usize> {
    Ok(pseudominimalize(tree)?.leaf_count().max(1))
}

/// Picard number over the affine line.
pub fn picard_number(d: &GraphDivisor) -> Result<usize> {
    if d.base.infinity != 1 {
        return Err(Error::UnsupportedBase(d.base.infinity));
    }
    let mut rho = 0;
    for tree in d.fibers.values() {
        rho += component_count(tree)? - 1;
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum ClassGroup {
    /// `Z/nZ`; order 1 is the trivial group.
    Cyclic(u64),
    Unknown,
}

/// Class group from fiber multiplicities.
pub fn class_group_of(multiplicities: &[u64]) -> ClassGroup {
    let multiple: Vec<u64> = multiplicities.iter().copied().filter(|&m| m > 1).collect();
    match multiple.as_slice() {
        [] => ClassGroup::Cyclic(1),
        [m] => ClassGroup::Cyclic(*m),
        _ => ClassGroup::Unknown,
    }
}

/// Class group of a surface with irreducible fibers. Multiplicities come
/// from the DPD data when given, from the trees otherwise. Reducible fibers
/// give `Unknown`.
pub fn class_group(d: &GraphDivisor, dpd: Option<&DpdDivisor>) -> ClassGroup {
    let mut mults = Vec::new();
    for tree in d.fibers.values() {
        let Ok(c) = component_count(tree) else {
            return ClassGroup::Unknown;
        };
        if c > 1 {
            return ClassGroup::Unknown;
        }
        if dpd.is_none() {
            let Ok(contraction) = validate_contractible(tree) else {
                return ClassGroup::Unknown;
            };
            // the affine part of the fiber sits on its non-root (-1)-vertices
            let m = (0..tree.len())
                .filter(|&v| v != tree.root() && tree.weight(v) == -1)
                .map(|v| contraction.multiplicities.get(v))
                .fold(0, num_integer::gcd);
            mults.push(m.max(1));
        }
    }
    if let Some(dpd) = dpd {
        mults = dpd.multiplicities();
    }
    class_group_of(&mults)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub point: String,
    pub height: usize,
    pub type_sequence: Vec<usize>,
    pub components: usize,
    /// Multiplicities listed in canonical vertex order.
    pub multiplicities: Vec<u64>,
    pub pseudominimal: FiberTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub vertex_count: usize,
    pub picard_number: Option<usize>,
    pub class_group: ClassGroup,
    pub fibers: Vec<FiberReport>,
}

pub fn report(d: &GraphDivisor, dpd: Option<&DpdDivisor>) -> Result<InvariantReport> {
    let mut fibers = Vec::new();
    for (point, tree) in &d.fibers {
        let contraction = validate_contractible(tree)?;
        let multiplicities = tree
            .canonical_order()
            .into_iter()
            .map(|v| contraction.multiplicities.get(v))
            .collect();
        fibers.push(FiberReport {
            point: point.clone(),
            height: tree.height(),
            type_sequence: tree.type_sequence(),
            components: component_count(tree)?,
            multiplicities,
            pseudominimal: pseudominimalize(tree)?,
        });
    }
    let picard_number = match picard_number(d) {
        Ok(r) => Some(r),
        Err(Error::UnsupportedBase(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(InvariantReport {
        vertex_count: vertex_count(d)?,
        picard_number,
        class_group: class_group(d, dpd),
        fibers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::DpdEntry;
    use crate::trees::gamma;

    fn over_line(trees: Vec<FiberTree>) -> GraphDivisor {
        GraphDivisor::over_line(trees.into_iter().enumerate().map(|(i, t)| (format!("b{i}"), t)).collect())
    }

    #[test]
    fn vertex_counts() {
        for d in 2..5 {
            for m in 1..5 {
                assert_eq!(vertex_count(&over_line(vec![gamma(d, m)])).unwrap(), d * m + 3);
            }
        }
        assert_eq!(vertex_count(&over_line(vec![FiberTree::single(0)])).unwrap(), 3);
        for m in 1..6 {
            assert_eq!(vertex_count(&over_line(vec![gamma(2, m)])).unwrap(), 2 * m + 3);
        }
    }

    #[test]
    fn picard_numbers() {
        assert_eq!(picard_number(&over_line(vec![gamma(4, 2)])).unwrap(), 3);
        assert_eq!(picard_number(&over_line(vec![FiberTree::single(0), gamma(1, 3)])).unwrap(), 0);
        assert_eq!(picard_number(&over_line(vec![gamma(2, 1), gamma(3, 2)])).unwrap(), 3);
        let mut d = over_line(vec![gamma(2, 1)]);
        d.base.infinity = 2;
        assert_eq!(picard_number(&d), Err(Error::UnsupportedBase(2)));
    }

    #[test]
    fn class_groups() {
        assert_eq!(class_group_of(&[1, 1]), ClassGroup::Cyclic(1));
        assert_eq!(class_group_of(&[1, 5]), ClassGroup::Cyclic(5));
        assert_eq!(class_group_of(&[2, 3]), ClassGroup::Unknown);
        let chain: FiberTree = "[-2, [[-1, [[-2, []]]]]]".parse().unwrap();
        let d = over_line(vec![chain]);
        assert_eq!(class_group(&d, None), ClassGroup::Cyclic(2));
        let dpd = DpdDivisor::new(vec![DpdEntry { point: "b0".into(), e: 1, m: 5 }]).unwrap();
        assert_eq!(class_group(&d, Some(&dpd)), ClassGroup::Cyclic(5));
        assert_eq!(class_group(&over_line(vec![gamma(2, 1)]), None), ClassGroup::Unknown);
    }

    #[test]
    fn report_lists_fibers() {
        let r = report(&over_line(vec![gamma(2, 3)]), None).unwrap();
        assert_eq!(r.vertex_count, 9);
        assert_eq!(r.picard_number, Some(1));
        assert_eq!(r.fibers[0].type_sequence, vec![0, 0, 2]);
        assert_eq!(r.fibers[0].components, 2);
    }
}
