//! Zariski-factor status, cylinder verdicts and non-cancellation families.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::blowups::{apply_batch, derive_sequence_with_map, BlowupSequence, BlowupStep, StepKind};
use crate::covering::DpdDivisor;
use crate::divisors::{check_matching, iso, BaseCurve, GraphDivisor, IsoOutcome, Matching, Mode};
use crate::error::{Error, Result};
use crate::invariants::{component_count, vertex_count};
use crate::stretching::{stretch, stretch_tree, Level, StretchEntry, StretchSpec};
use crate::trees::{pseudominimalize, FiberTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZariskiKind {
    ZariskiFactor,
    /// Chain fibers without multiplicity data to confirm the parabolic structure.
    Zariski1FactorOnlyByDefault,
    NotZariski1Factor,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZariskiStatus {
    pub kind: ZariskiKind,
    pub citation: String,
    /// Point whose fiber rules out the 1-factor property.
    pub witness: Option<String>,
}

impl ZariskiStatus {
    fn new(kind: ZariskiKind, citation: &str, witness: Option<String>) -> Self {
        ZariskiStatus {
            kind,
            citation: citation.to_string(),
            witness,
        }
    }
}

pub fn zariski_status(d: &GraphDivisor, dpd: Option<&DpdDivisor>) -> ZariskiStatus {
    if let Err(e) = d.check() {
        return ZariskiStatus::new(ZariskiKind::Unknown, &e.to_string(), None);
    }
    let mut minimal = BTreeMap::new();
    for (p, tree) in &d.fibers {
        match pseudominimalize(tree) {
            Ok(t) => minimal.insert(p.clone(), t),
            Err(e) => return ZariskiStatus::new(ZariskiKind::Unknown, &e.to_string(), None),
        };
    }
    let gdf = d.is_reduced() && dpd.is_none_or(|x| x.multiplicities().iter().all(|&m| m == 1));
    if gdf {
        let trivial = FiberTree::single(0);
        return match minimal.iter().find(|(_, t)| **t != trivial) {
            None => ZariskiStatus::new(
                ZariskiKind::ZariskiFactor,
                "reduced fibers that are all irreducible: the surface is a line bundle over the base",
                None,
            ),
            Some((p, _)) => ZariskiStatus::new(
                ZariskiKind::NotZariski1Factor,
                "reduced fibers with a reducible member: not a line bundle, hence not a Zariski 1-factor",
                Some(p.clone()),
            ),
        };
    }
    if let Some((p, _)) = minimal.iter().find(|(_, t)| !t.is_chain()) {
        return ZariskiStatus::new(
            ZariskiKind::NotZariski1Factor,
            "a fiber tree is not a chain, so the surface carries no parabolic Gm-structure",
            Some(p.clone()),
        );
    }
    match dpd {
        Some(_) => ZariskiStatus::new(
            ZariskiKind::ZariskiFactor,
            "chain fibers with multiplicity data: a parabolic Gm-surface, which is a Zariski factor",
            None,
        ),
        None => ZariskiStatus::new(
            ZariskiKind::Zariski1FactorOnlyByDefault,
            "chain fibers; no multiplicity data was given to confirm the parabolic Gm-structure",
            None,
        ),
    }
}

/// How a `Yes` verdict was reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "route", rename_all = "kebab-case")]
pub enum Route {
    /// The divisors themselves are isomorphic.
    Isomorphic,
    /// A top-level stretch by `k` of the smaller divisor is isomorphic to the larger.
    UniformStretch { k: u64 },
    /// Member `k` of the family at `stage` of the smaller divisor is isomorphic to the larger.
    Family { stage: usize, k: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub route: Route,
    /// The route was applied to the second divisor rather than the first.
    pub reversed: bool,
    /// The transformed divisor that the matching starts from.
    pub source: GraphDivisor,
    pub target: GraphDivisor,
    pub matching: Matching,
    pub citation: String,
}

impl Certificate {
    pub fn to_value(&self) -> Value {
        json!({
            "route": self.route,
            "reversed": self.reversed,
            "matching": self.matching.to_value(&self.source, &self.target),
            "citation": self.citation,
        })
    }

    /// Re-checks the matching behind the certificate.
    pub fn check(&self, mode: Mode, equivariant: bool) -> bool {
        check_matching(&self.source, &self.target, &self.matching, mode, equivariant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub invariant: String,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CylinderVerdict {
    Yes(Certificate),
    No(Separation),
    Unknown(String),
}

impl CylinderVerdict {
    pub fn to_value(&self) -> Value {
        match self {
            CylinderVerdict::Yes(c) => json!({ "verdict": "yes", "certificate": c.to_value() }),
            CylinderVerdict::No(s) => json!({ "verdict": "no", "witness": s }),
            CylinderVerdict::Unknown(r) => json!({ "verdict": "unknown", "reason": r }),
        }
    }
}

/// Fibers that are not a single `[[0]]` vertex.
fn nontrivial<'a>(fibers: impl Iterator<Item = (&'a String, &'a FiberTree)>) -> Vec<(&'a String, &'a FiberTree)> {
    fibers.filter(|(_, t)| t.height() > 0).collect()
}

fn top_count(tree: &FiberTree) -> usize {
    let h = tree.height();
    tree.levels().iter().filter(|&&l| l == h).count()
}

/// Every leaf of every fiber sits on the top level.
fn leaves_level(d: &GraphDivisor) -> bool {
    d.fibers.values().all(|t| {
        let levels = t.levels();
        t.leaves().iter().all(|&v| levels[v] == t.height())
    })
}

fn attempt(source: GraphDivisor, target: &GraphDivisor, mode: Mode, equivariant: bool, route: Route, reversed: bool, citation: &str) -> Option<Certificate> {
    let IsoOutcome::Isomorphic(matching) = iso(&source, target, mode, equivariant) else {
        return None;
    };
    let cert = Certificate {
        route,
        reversed,
        source,
        target: target.clone(),
        matching,
        citation: citation.to_string(),
    };
    cert.check(mode, equivariant).then_some(cert)
}

fn uniform_stretch(small: &GraphDivisor, large: &GraphDivisor, mode: Mode, equivariant: bool, reversed: bool) -> Option<Certificate> {
    if !leaves_level(small) || !leaves_level(large) {
        return None;
    }
    let diff = large.tree_vertex_count().checked_sub(small.tree_vertex_count())?;
    let fibers = nontrivial(small.fibers.iter());
    let tops: usize = fibers.iter().map(|(_, t)| top_count(t)).sum();
    if diff == 0 || tops == 0 || diff % tops != 0 {
        return None;
    }
    let k = (diff / tops) as u64;
    if equivariant && k % small.base.mu != 0 {
        return None;
    }
    let spec = StretchSpec {
        entries: fibers
            .iter()
            .map(|(p, _)| ((*p).clone(), StretchEntry { a: k, level: Level::Top }))
            .collect(),
        principal: true,
    };
    let stretched = stretch(small, &spec).ok()?;
    attempt(
        stretched,
        large,
        mode,
        equivariant,
        Route::UniformStretch { k },
        reversed,
        "isomorphic after a top-level stretching with equal coefficients; stretching does not change the cylinder",
    )
}

fn family_route(small: &GraphDivisor, large: &GraphDivisor, mode: Mode, reversed: bool) -> Option<Certificate> {
    let diff = large.tree_vertex_count().checked_sub(small.tree_vertex_count())?;
    if diff == 0 {
        return None;
    }
    let plan = FamilyPlan::new(small).ok()?;
    let per_step = plan.growth();
    if per_step == 0 || diff % per_step != 0 {
        return None;
    }
    let k = (diff / per_step) as u64;
    let member = plan.member(k).ok()?;
    attempt(
        member,
        large,
        mode,
        false,
        Route::Family { stage: plan.stage, k },
        reversed,
        "isomorphic to a member of the stretched family of the other divisor; family members share the cylinder",
    )
}

/// Three-valued cylinder comparison.
pub fn cylinders_isomorphic(d1: &GraphDivisor, d2: &GraphDivisor, mode: Mode, equivariant: bool) -> CylinderVerdict {
    if let Err(e) = d1.check().and_then(|_| d2.check()) {
        return CylinderVerdict::Unknown(e.to_string());
    }
    if let IsoOutcome::Isomorphic(matching) = iso(d1, d2, mode, equivariant) {
        let cert = Certificate {
            route: Route::Isomorphic,
            reversed: false,
            source: d1.clone(),
            target: d2.clone(),
            matching,
            citation: "isomorphic graph divisors give isomorphic cylinders".into(),
        };
        if cert.check(mode, equivariant) {
            return CylinderVerdict::Yes(cert);
        }
    }
    for (small, large, reversed) in [(d1, d2, false), (d2, d1, true)] {
        if let Some(c) = uniform_stretch(small, large, mode, equivariant, reversed) {
            return CylinderVerdict::Yes(c);
        }
    }
    if !equivariant {
        for (small, large, reversed) in [(d1, d2, false), (d2, d1, true)] {
            if let Some(c) = family_route(small, large, mode, reversed) {
                return CylinderVerdict::Yes(c);
            }
        }
    }
    if mode == Mode::OverBase && d1.is_reduced() && d2.is_reduced() && d1.fibers.keys().eq(d2.fibers.keys()) {
        let total = |d: &GraphDivisor| d.fibers.values().map(|t| component_count(t).unwrap_or(0)).sum::<usize>();
        let (left, right) = (total(d1), total(d2));
        if left != right {
            return CylinderVerdict::No(Separation {
                invariant: "number of special-fiber components over the base".into(),
                left,
                right,
            });
        }
    }
    CylinderVerdict::Unknown("no sufficient condition holds and no invariant separates the cylinders".into())
}

/// Per-fiber blowup sequences split at the first stage where some tree branches.
struct FamilyPlan {
    base: BaseCurve,
    stage: usize,
    fibers: Vec<(String, FiberTree, Vec<Vec<BlowupStep>>)>,
}

impl FamilyPlan {
    fn new(d: &GraphDivisor) -> Result<Self> {
        d.check()?;
        let mut seqs: Vec<(String, BlowupSequence)> = Vec::new();
        for (p, tree) in &d.fibers {
            let contraction = crate::trees::validate_contractible(tree)?;
            if !contraction.multiplicities.all_reduced() {
                return Err(Error::NonReducedFiber(p.clone()));
            }
            seqs.push((p.clone(), derive_sequence_with_map(tree)?.0));
        }
        let longest = seqs.iter().map(|(_, s)| s.batches.len()).max().unwrap_or(0);
        for stage in 1..=longest {
            let mut branching = false;
            let mut fibers = Vec::new();
            for (p, seq) in &seqs {
                let mut tree = FiberTree::single(0);
                let cut = stage.min(seq.batches.len());
                for (b, batch) in seq.batches[..cut].iter().enumerate() {
                    apply_batch(&mut tree, batch, b)?;
                }
                branching |= (0..tree.len()).any(|v| tree.children(v).len() >= 2);
                fibers.push((p.clone(), tree, seq.batches[cut..].to_vec()));
            }
            if branching {
                let mut base = d.base.clone();
                base.perm = base.points.clone();
                return Ok(FamilyPlan { base, stage, fibers });
            }
        }
        Err(Error::NoBranchingFiber)
    }

    /// Tree vertices added per unit of the stretching coefficient.
    fn growth(&self) -> usize {
        nontrivial(self.fibers.iter().map(|(p, t, _)| (p, t)))
            .iter()
            .map(|(_, t)| top_count(t))
            .sum()
    }

    fn member(&self, a: u64) -> Result<GraphDivisor> {
        let mut fibers = BTreeMap::new();
        for (p, tree, rest) in &self.fibers {
            if tree.height() == 0 || a == 0 {
                let mut t = tree.clone();
                for (b, batch) in rest.iter().enumerate() {
                    apply_batch(&mut t, batch, b)?;
                }
                fibers.insert(p.clone(), t);
                continue;
            }
            let h = tree.height();
            let levels = tree.levels();
            let (mut t, chains) = stretch_tree(p, tree, StretchEntry { a, level: Level::Top })?;
            // old index -> index in the stretched replay
            let mut remap: Vec<usize> = (0..tree.len())
                .map(|v| if levels[v] == h { chains[&(v, a as usize - 1)] } else { v })
                .collect();
            for (b, batch) in rest.iter().enumerate() {
                let mapped: Vec<BlowupStep> = batch
                    .iter()
                    .map(|s| BlowupStep {
                        target: remap[s.target],
                        kind: match s.kind {
                            StepKind::Outer => StepKind::Outer,
                            StepKind::Inner(n) => StepKind::Inner(remap[n]),
                        },
                    })
                    .collect();
                let before = t.len();
                apply_batch(&mut t, &mapped, b)?;
                remap.extend(before..t.len());
            }
            fibers.insert(p.clone(), t);
        }
        Ok(GraphDivisor {
            base: self.base.clone(),
            fibers,
            equivariance: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub j: u64,
    pub divisor: GraphDivisor,
    pub vertex_count: usize,
    /// Cylinder certificate against the input divisor.
    pub certificate: Certificate,
}

/// Members `j = 1..=k` of the stretched family of a reduced divisor with a
/// branching fiber. Distinct vertex counts certify that the surfaces differ.
pub fn generate_family(d: &GraphDivisor, k: u64) -> Result<Vec<FamilyMember>> {
    let plan = FamilyPlan::new(d)?;
    let mut out = Vec::new();
    for j in 1..=k {
        let divisor = plan.member(j)?;
        let vertex_count = vertex_count(&divisor)?;
        let certificate = attempt(
            divisor.clone(),
            &divisor,
            Mode::OverBase,
            false,
            Route::Family { stage: plan.stage, k: j },
            false,
            "stretching the family stage with equal coefficients preserves the cylinder",
        )
        .ok_or_else(|| Error::InvalidDivisor(vec![format!("family member {j} failed its self-check")]))?;
        out.push(FamilyMember {
            j,
            divisor,
            vertex_count,
            certificate,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::DpdEntry;
    use crate::trees::gamma;

    fn one(t: FiberTree) -> GraphDivisor {
        GraphDivisor::over_line(vec![("b".into(), t)])
    }

    #[test]
    fn zariski_examples() {
        assert_eq!(zariski_status(&one(FiberTree::single(0)), None).kind, ZariskiKind::ZariskiFactor);
        let s = zariski_status(&one(gamma(2, 1)), None);
        assert_eq!(s.kind, ZariskiKind::NotZariski1Factor);
        assert_eq!(s.witness.as_deref(), Some("b"));
        let chain: FiberTree = "[-2, [[-1, [[-2, []]]]]]".parse().unwrap();
        let dpd = DpdDivisor::new(vec![DpdEntry { point: "b".into(), e: 1, m: 2 }]).unwrap();
        assert_eq!(zariski_status(&one(chain.clone()), Some(&dpd)).kind, ZariskiKind::ZariskiFactor);
        assert_eq!(zariski_status(&one(chain), None).kind, ZariskiKind::Zariski1FactorOnlyByDefault);
        let bad: FiberTree = "[-1, []]".parse().unwrap();
        assert_eq!(zariski_status(&one(bad), None).kind, ZariskiKind::Unknown);
    }

    #[test]
    fn cylinder_examples() {
        let v = cylinders_isomorphic(&one(gamma(2, 1)), &one(gamma(2, 5)), Mode::OverBase, false);
        let CylinderVerdict::Yes(c) = v else { panic!("{v:?}") };
        assert_eq!(c.route, Route::UniformStretch { k: 4 });
        let v = cylinders_isomorphic(&one(gamma(2, 5)), &one(gamma(2, 1)), Mode::OverBase, false);
        assert!(matches!(v, CylinderVerdict::Yes(Certificate { reversed: true, .. })));
        for m in 1..4 {
            let v = cylinders_isomorphic(&one(gamma(2, m)), &one(gamma(3, m)), Mode::OverBase, false);
            assert_eq!(
                v,
                CylinderVerdict::No(Separation {
                    invariant: "number of special-fiber components over the base".into(),
                    left: 2,
                    right: 3
                })
            );
        }
        let other = GraphDivisor::over_line(vec![("c".into(), gamma(2, 1))]);
        assert!(matches!(
            cylinders_isomorphic(&one(gamma(2, 1)), &other, Mode::OverBase, false),
            CylinderVerdict::Unknown(_)
        ));
        assert!(matches!(
            cylinders_isomorphic(&one(gamma(2, 1)), &other, Mode::Abstract, false),
            CylinderVerdict::Yes(_)
        ));
    }

    #[test]
    fn family_of_danielewski_surface() {
        let fam = generate_family(&one(gamma(2, 1)), 3).unwrap();
        let v: Vec<usize> = fam.iter().map(|m| m.vertex_count).collect();
        assert_eq!(v, vec![7, 9, 11]);
        for (j, m) in fam.iter().enumerate() {
            assert_eq!(m.divisor.fibers["b"].canonical_form(), gamma(2, j + 2).canonical_form());
        }
        let fam = generate_family(&one(gamma(3, 2)), 1).unwrap();
        assert_eq!(fam[0].divisor.fibers["b"].canonical_form(), gamma(3, 3).canonical_form());
        assert_eq!(generate_family(&one(FiberTree::single(0)), 2), Err(Error::NoBranchingFiber));
        let chain: FiberTree = "[-2, [[-1, [[-2, []]]]]]".parse().unwrap();
        assert!(matches!(generate_family(&one(chain), 2), Err(Error::NonReducedFiber(_))));
    }

    #[test]
    fn family_of_uneven_tree_uses_family_route() {
        // one branch of length 1, one of length 2: leaves on different levels
        let t: FiberTree = "[-2, [[-1, []], [-2, [[-1, []]]]]]".parse().unwrap();
        let d = one(t);
        d.check().unwrap();
        let fam = generate_family(&d, 2).unwrap();
        assert!(fam[0].vertex_count < fam[1].vertex_count);
        for m in &fam {
            m.divisor.check().unwrap();
            let v = cylinders_isomorphic(&d, &m.divisor, Mode::OverBase, false);
            assert!(matches!(v, CylinderVerdict::Yes(Certificate { route: Route::Family { .. }, .. })), "{v:?}");
        }
    }
}
