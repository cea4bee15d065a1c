//! Graph divisors over a marked base curve and their isomorphisms.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::trees::{validate_contractible, FiberTree, SearchOutcome};

/// Node budget of the equivariant matching search.
pub const SEARCH_BUDGET: u64 = 1_000_000;

/// Marked base curve with a cyclic automorphism of order dividing `mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseCurve {
    pub points: Vec<String>,
    /// Number of points at infinity.
    pub infinity: usize,
    pub mu: u64,
    /// `perm[i]` is the image of `points[i]` under the generator.
    pub perm: Vec<String>,
}

impl BaseCurve {
    /// The affine line with the given special points and trivial action.
    pub fn line(points: Vec<String>) -> Self {
        BaseCurve {
            perm: points.clone(),
            points,
            infinity: 1,
            mu: 1,
        }
    }

    pub fn image<'a>(&'a self, p: &str) -> Option<&'a str> {
        let i = self.points.iter().position(|q| q == p)?;
        self.perm.get(i).map(String::as_str)
    }

    pub fn perm_is_identity(&self) -> bool {
        self.points == self.perm
    }

    /// Orbits of the generator, each listed from its first point in `points`
    /// order. Assumes `perm` is a permutation of `points`.
    pub fn orbits(&self) -> Vec<Vec<String>> {
        let mut seen = vec![false; self.points.len()];
        let index: HashMap<&str, usize> = self.points.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let mut out = Vec::new();
        for start in 0..self.points.len() {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                orbit.push(self.points[i].clone());
                i = index[self.perm[i].as_str()];
            }
            out.push(orbit);
        }
        out
    }
}

/// Fiber trees over the special points of a base curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDivisor {
    pub base: BaseCurve,
    pub fibers: BTreeMap<String, FiberTree>,
    /// For each point `p`, an isomorphism from the fiber over `p` onto the
    /// fiber over its image, as a vertex map. `None` means identity maps.
    pub equivariance: Option<BTreeMap<String, Vec<usize>>>,
}

/// A problem found by [`GraphDivisor::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorIssue {
    pub point: Option<String>,
    pub error: Error,
}

impl std::fmt::Display for DivisorIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.point {
            Some(p) => write!(f, "{p}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl GraphDivisor {
    /// Divisor over the affine line with trivial action, points in the given order.
    pub fn over_line(fibers: Vec<(String, FiberTree)>) -> Self {
        let points = fibers.iter().map(|(p, _)| p.clone()).collect();
        GraphDivisor {
            base: BaseCurve::line(points),
            fibers: fibers.into_iter().collect(),
            equivariance: None,
        }
    }

    pub fn fiber(&self, p: &str) -> Result<&FiberTree> {
        self.fibers.get(p).ok_or_else(|| Error::UnknownPoint(p.to_string()))
    }

    /// Equivariance map at `p`, identity when none is recorded.
    pub fn equivariance_map(&self, p: &str) -> Vec<usize> {
        match self.equivariance.as_ref().and_then(|e| e.get(p)) {
            Some(m) => m.clone(),
            None => (0..self.fibers.get(p).map_or(0, FiberTree::len)).collect(),
        }
    }

    /// Total number of vertices over all fibers.
    pub fn tree_vertex_count(&self) -> usize {
        self.fibers.values().map(FiberTree::len).sum()
    }

    /// Whether every fiber component has multiplicity one. Invalid fibers count as non-reduced.
    pub fn is_reduced(&self) -> bool {
        self.fibers
            .values()
            .all(|t| validate_contractible(t).is_ok_and(|c| c.multiplicities.all_reduced()))
    }

    /// Checks every invariant and lists all problems found.
    pub fn validate(&self) -> std::result::Result<(), Vec<DivisorIssue>> {
        let mut issues = Vec::new();
        let mut global = |error: Error| issues.push(DivisorIssue { point: None, error });
        let base = &self.base;
        if base.infinity == 0 {
            global(Error::BadParameters("at least one point at infinity is required".into()));
        }
        if base.mu == 0 {
            global(Error::BadParameters("mu must be positive".into()));
        }
        let mut sorted_points = base.points.clone();
        sorted_points.sort();
        let distinct = sorted_points.windows(2).all(|w| w[0] != w[1]);
        if !distinct {
            global(Error::BadParameters("repeated point label".into()));
        }
        let mut sorted_perm = base.perm.clone();
        sorted_perm.sort();
        let perm_ok = distinct && sorted_perm == sorted_points;
        if !perm_ok {
            global(Error::BadParameters("perm is not a permutation of points".into()));
        }
        for p in self.fibers.keys() {
            if !base.points.contains(p) {
                global(Error::UnknownPoint(p.clone()));
            }
        }
        for p in &base.points {
            let issue = |error: Error| DivisorIssue {
                point: Some(p.clone()),
                error,
            };
            match self.fibers.get(p) {
                None => issues.push(issue(Error::InvalidTree("no fiber tree".into()))),
                Some(t) => {
                    if let Err(e) = t.check().and_then(|_| validate_contractible(t)) {
                        issues.push(issue(e));
                    }
                }
            }
        }
        if perm_ok && issues.is_empty() && base.mu > 0 {
            issues.extend(self.equivariance_issues());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    fn equivariance_issues(&self) -> Vec<DivisorIssue> {
        let mut issues = Vec::new();
        let broken = |p: &str, msg: String| DivisorIssue {
            point: Some(p.to_string()),
            error: Error::EquivarianceBroken(msg),
        };
        if self.equivariance.is_none() && !self.base.perm_is_identity() {
            issues.push(DivisorIssue {
                point: None,
                error: Error::EquivarianceBroken("points are permuted but no fiber maps are given".into()),
            });
            return issues;
        }
        if let Some(eq) = &self.equivariance {
            for p in eq.keys() {
                if !self.fibers.contains_key(p) {
                    issues.push(broken(p, "map for an unknown point".into()));
                }
            }
        }
        for p in &self.base.points {
            let q = self.base.image(p).expect("perm checked");
            let (a, b) = (&self.fibers[p], &self.fibers[q]);
            if !a.is_isomorphism(b, &self.equivariance_map(p)) {
                issues.push(broken(p, format!("map onto the fiber over {q} is not a tree isomorphism")));
            }
        }
        if !issues.is_empty() {
            return issues;
        }
        for orbit in self.base.orbits() {
            let len = orbit.len() as u64;
            let p = &orbit[0];
            if self.base.mu % len != 0 {
                issues.push(broken(p, format!("orbit of length {len} does not divide mu = {}", self.base.mu)));
                continue;
            }
            let order = permutation_order(&self.orbit_composite(&orbit));
            if (self.base.mu / len) % order != 0 {
                issues.push(broken(
                    p,
                    format!("composite around the orbit has order {order}, not dividing {}", self.base.mu / len),
                ));
            }
        }
        issues
    }

    /// Composite of the equivariance maps once around `orbit`, as an
    /// automorphism of the fiber over `orbit[0]`.
    fn orbit_composite(&self, orbit: &[String]) -> Vec<usize> {
        let n = self.fibers[&orbit[0]].len();
        let mut comp: Vec<usize> = (0..n).collect();
        for p in orbit {
            let e = self.equivariance_map(p);
            comp = comp.iter().map(|&v| e[v]).collect();
        }
        comp
    }

    /// [`validate`](Self::validate) folded into a single error.
    pub fn check(&self) -> Result<()> {
        self.validate()
            .map_err(|issues| Error::InvalidDivisor(issues.iter().map(ToString::to_string).collect()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        GraphDivisor::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidDivisor(vec![msg.to_string()]);
        let obj = value.as_object().ok_or_else(|| bad("divisor must be an object"))?;
        let base = obj.get("base").and_then(Value::as_object).ok_or_else(|| bad("missing base"))?;
        let labels = |key: &str| -> Result<Option<Vec<String>>> {
            match base.get(key) {
                None => Ok(None),
                Some(v) => v
                    .as_array()
                    .ok_or_else(|| bad(&format!("base.{key} must be a list")))?
                    .iter()
                    .map(|x| label_of(x).ok_or_else(|| bad(&format!("base.{key} entries must be labels"))))
                    .collect::<Result<Vec<_>>>()
                    .map(Some),
            }
        };
        let fibers_obj = obj.get("fibers").and_then(Value::as_object).ok_or_else(|| bad("missing fibers"))?;
        let points = labels("points")?.unwrap_or_else(|| fibers_obj.keys().cloned().collect());
        let perm = labels("perm")?.unwrap_or_else(|| points.clone());
        let uint = |key: &str, default: u64| -> Result<u64> {
            match base.get(key) {
                None => Ok(default),
                Some(v) => v.as_u64().ok_or_else(|| bad(&format!("base.{key} must be a non-negative integer"))),
            }
        };
        let base = BaseCurve {
            points,
            infinity: uint("infinity", 1)? as usize,
            mu: uint("mu", 1)?,
            perm,
        };
        let mut fibers = BTreeMap::new();
        for (p, lit) in fibers_obj {
            let tree = FiberTree::from_value(lit).map_err(|e| bad(&format!("fiber {p}: {e}")))?;
            fibers.insert(p.clone(), tree);
        }
        let equivariance = match obj.get("equivariance") {
            None | Some(Value::Null) => None,
            Some(v) => {
                let map = v.as_object().ok_or_else(|| bad("equivariance must be an object"))?;
                let mut out = BTreeMap::new();
                for (p, arr) in map {
                    let arr = arr
                        .as_array()
                        .ok_or_else(|| bad(&format!("equivariance map at {p} must be a list")))?;
                    let m = arr
                        .iter()
                        .map(|x| x.as_u64().map(|x| x as usize))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| bad(&format!("equivariance map at {p} must list vertex indices")))?;
                    out.insert(p.clone(), m);
                }
                Some(out)
            }
        };
        // literal trees are numbered in preorder, so the maps apply as given
        Ok(GraphDivisor {
            base,
            fibers,
            equivariance,
        })
    }

    /// JSON form; fiber maps are expressed on preorder indices.
    pub fn to_value(&self) -> Value {
        let mut fibers = Map::new();
        for (p, t) in &self.fibers {
            fibers.insert(p.clone(), t.to_value());
        }
        let mut out = Map::new();
        out.insert(
            "base".into(),
            json!({
                "points": self.base.points,
                "infinity": self.base.infinity,
                "mu": self.base.mu,
                "perm": self.base.perm,
            }),
        );
        out.insert("fibers".into(), Value::Object(fibers));
        if let Some(eq) = &self.equivariance {
            let mut maps = Map::new();
            for (p, m) in eq {
                let Some(q) = self.base.image(p) else { continue };
                let (Some(a), Some(b)) = (self.fibers.get(p), self.fibers.get(q)) else {
                    continue;
                };
                maps.insert(p.clone(), json!(to_preorder_map(a, b, m)));
            }
            out.insert("equivariance".into(), Value::Object(maps));
        }
        Value::Object(out)
    }
}

fn label_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn preorder_positions(t: &FiberTree) -> Vec<usize> {
    let mut pos = vec![0; t.len()];
    for (i, v) in t.preorder().into_iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Rewrites a vertex map between two trees on their preorder indices.
pub fn to_preorder_map(a: &FiberTree, b: &FiberTree, map: &[usize]) -> Vec<usize> {
    let pb = preorder_positions(b);
    a.preorder().into_iter().map(|v| pb[map[v]]).collect()
}

fn permutation_order(p: &[usize]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut order = 1u64;
    for s in 0..p.len() {
        let mut len = 0u64;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len > 0 {
            order = num_integer::lcm(order, len);
        }
    }
    order
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&v| outer[v]).collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Whether divisors over the same base must match point by point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    OverBase,
    Abstract,
}

/// Point bijection together with tree isomorphisms over each point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub points: BTreeMap<String, String>,
    pub maps: BTreeMap<String, Vec<usize>>,
}

impl Matching {
    pub fn to_value(&self, d1: &GraphDivisor, d2: &GraphDivisor) -> Value {
        let mut maps = Map::new();
        for (p, m) in &self.maps {
            let q = &self.points[p];
            maps.insert(p.clone(), json!(to_preorder_map(&d1.fibers[p], &d2.fibers[q], m)));
        }
        json!({ "points": self.points, "maps": maps })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphic(Matching),
    NotIsomorphic,
    /// The equivariant search ran out of budget.
    Undecided,
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic(_))
    }
}

/// Decides whether two valid divisors are isomorphic.
pub fn iso(d1: &GraphDivisor, d2: &GraphDivisor, mode: Mode, equivariant: bool) -> IsoOutcome {
    if d1.base.infinity != d2.base.infinity || d1.fibers.len() != d2.fibers.len() {
        return IsoOutcome::NotIsomorphic;
    }
    if equivariant {
        return equivariant_iso(d1, d2, mode);
    }
    let mut matching = Matching {
        points: BTreeMap::new(),
        maps: BTreeMap::new(),
    };
    match mode {
        Mode::OverBase => {
            for (p, t1) in &d1.fibers {
                let Some(t2) = d2.fibers.get(p) else {
                    return IsoOutcome::NotIsomorphic;
                };
                let Some(map) = t1.isomorphism_to(t2) else {
                    return IsoOutcome::NotIsomorphic;
                };
                matching.points.insert(p.clone(), p.clone());
                matching.maps.insert(p.clone(), map);
            }
        }
        Mode::Abstract => {
            let keyed = |d: &GraphDivisor| {
                let mut v: Vec<(Vec<u8>, String)> =
                    d.fibers.iter().map(|(p, t)| (t.canonical_form(), p.clone())).collect();
                v.sort();
                v
            };
            let (a, b) = (keyed(d1), keyed(d2));
            for ((ka, p), (kb, q)) in a.iter().zip(&b) {
                if ka != kb {
                    return IsoOutcome::NotIsomorphic;
                }
                let map = d1.fibers[p].isomorphism_to(&d2.fibers[q]).expect("equal encodings");
                matching.points.insert(p.clone(), q.clone());
                matching.maps.insert(p.clone(), map);
            }
        }
    }
    IsoOutcome::Isomorphic(matching)
}

struct EquivariantSearch<'a> {
    d1: &'a GraphDivisor,
    d2: &'a GraphDivisor,
    orbits1: Vec<Vec<String>>,
    orbits2: Vec<Vec<String>>,
    mode: Mode,
    budget: u64,
    cache: HashMap<(usize, usize, usize), Option<Vec<Vec<usize>>>>,
}

enum Found {
    Yes,
    No,
    OutOfBudget,
}

impl EquivariantSearch<'_> {
    /// Tree maps along orbit `i` of `d1` onto orbit `j` of `d2`, with
    /// `orbits1[i][0]` sent to `orbits2[j][offset]`.
    fn orbit_maps(&mut self, i: usize, j: usize, offset: usize) -> std::result::Result<Option<Vec<Vec<usize>>>, ()> {
        if let Some(hit) = self.cache.get(&(i, j, offset)) {
            return Ok(hit.clone());
        }
        let o1 = &self.orbits1[i];
        let o2 = &self.orbits2[j];
        let len = o1.len();
        let q0 = &o2[offset];
        let t1 = &self.d1.fibers[&o1[0]];
        let t2 = &self.d2.fibers[q0];
        let rotated: Vec<String> = (0..len).map(|k| o2[(offset + k) % len].clone()).collect();
        let e1 = self.d1.orbit_composite(o1);
        let e2 = self.d2.orbit_composite(&rotated);
        let mut found = None;
        let outcome = t1.for_each_isomorphism(t2, &mut self.budget, |phi| {
            if compose(phi, &e1) == compose(&e2, phi) {
                found = Some(phi.to_vec());
                false
            } else {
                true
            }
        });
        if outcome == SearchOutcome::BudgetExceeded {
            return Err(());
        }
        let result = found.map(|phi0| {
            let mut maps = vec![phi0];
            for k in 0..len - 1 {
                // phi_{k+1} = e2_{q_k} . phi_k . e1_{p_k}^{-1}
                let e1k = self.d1.equivariance_map(&o1[k]);
                let e2k = self.d2.equivariance_map(&rotated[k]);
                let next = compose(&compose(&e2k, &maps[k]), &invert(&e1k));
                maps.push(next);
            }
            maps
        });
        self.cache.insert((i, j, offset), result.clone());
        Ok(result)
    }

    fn assign(&mut self, i: usize, used: &mut Vec<bool>, matching: &mut Matching) -> Found {
        if i == self.orbits1.len() {
            return Found::Yes;
        }
        if self.budget == 0 {
            return Found::OutOfBudget;
        }
        self.budget -= 1;
        let mut out_of_budget = false;
        for j in 0..self.orbits2.len() {
            if used[j] || self.orbits2[j].len() != self.orbits1[i].len() {
                continue;
            }
            let len = self.orbits1[i].len();
            for offset in 0..len {
                let p0 = &self.orbits1[i][0];
                let q0 = &self.orbits2[j][offset];
                if self.mode == Mode::OverBase && p0 != q0 {
                    continue;
                }
                let c1 = self.d1.fibers[p0].canonical_form();
                if c1 != self.d2.fibers[q0].canonical_form() {
                    continue;
                }
                let maps = match self.orbit_maps(i, j, offset) {
                    Err(()) => {
                        out_of_budget = true;
                        continue;
                    }
                    Ok(None) => continue,
                    Ok(Some(maps)) => maps,
                };
                let pts: Vec<(String, String)> = (0..len)
                    .map(|k| (self.orbits1[i][k].clone(), self.orbits2[j][(offset + k) % len].clone()))
                    .collect();
                if self.mode == Mode::OverBase && pts.iter().any(|(p, q)| p != q) {
                    continue;
                }
                for ((p, q), m) in pts.iter().zip(maps) {
                    matching.points.insert(p.clone(), q.clone());
                    matching.maps.insert(p.clone(), m);
                }
                used[j] = true;
                match self.assign(i + 1, used, matching) {
                    Found::Yes => return Found::Yes,
                    Found::OutOfBudget => out_of_budget = true,
                    Found::No => {}
                }
                used[j] = false;
                for (p, _) in &pts {
                    matching.points.remove(p);
                    matching.maps.remove(p);
                }
            }
        }
        if out_of_budget {
            Found::OutOfBudget
        } else {
            Found::No
        }
    }
}

fn equivariant_iso(d1: &GraphDivisor, d2: &GraphDivisor, mode: Mode) -> IsoOutcome {
    if d1.base.mu != d2.base.mu {
        return IsoOutcome::NotIsomorphic;
    }
    let mut search = EquivariantSearch {
        d1,
        d2,
        orbits1: d1.base.orbits(),
        orbits2: d2.base.orbits(),
        mode,
        budget: SEARCH_BUDGET,
        cache: HashMap::new(),
    };
    let mut used = vec![false; search.orbits2.len()];
    let mut matching = Matching {
        points: BTreeMap::new(),
        maps: BTreeMap::new(),
    };
    match search.assign(0, &mut used, &mut matching) {
        Found::Yes => IsoOutcome::Isomorphic(matching),
        Found::No => IsoOutcome::NotIsomorphic,
        Found::OutOfBudget => IsoOutcome::Undecided,
    }
}

/// Independently re-checks a matching.
pub fn check_matching(d1: &GraphDivisor, d2: &GraphDivisor, m: &Matching, mode: Mode, equivariant: bool) -> bool {
    if d1.fibers.len() != d2.fibers.len() || m.points.len() != d1.fibers.len() {
        return false;
    }
    let mut images: Vec<&String> = m.points.values().collect();
    images.sort();
    images.dedup();
    if images.len() != m.points.len() {
        return false;
    }
    for (p, t1) in &d1.fibers {
        let Some(q) = m.points.get(p) else { return false };
        if mode == Mode::OverBase && p != q {
            return false;
        }
        let (Some(t2), Some(map)) = (d2.fibers.get(q), m.maps.get(p)) else {
            return false;
        };
        if !t1.is_isomorphism(t2, map) {
            return false;
        }
    }
    if !equivariant {
        return true;
    }
    if d1.base.mu != d2.base.mu {
        return false;
    }
    for p in d1.fibers.keys() {
        let (Some(p1), Some(q)) = (d1.base.image(p), m.points.get(p)) else {
            return false;
        };
        let Some(q1) = d2.base.image(q) else { return false };
        if m.points.get(p1).map(String::as_str) != Some(q1) {
            return false;
        }
        let lhs = compose(&m.maps[p1], &d1.equivariance_map(p));
        let rhs = compose(&d2.equivariance_map(q), &m.maps[p]);
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::gamma;

    fn one_point(t: FiberTree) -> GraphDivisor {
        GraphDivisor::over_line(vec![("b".into(), t)])
    }

    fn mu2_on(tree: FiberTree, map: Option<Vec<usize>>) -> GraphDivisor {
        let mut d = one_point(tree);
        d.base.mu = 2;
        d.equivariance = map.map(|m| BTreeMap::from([("b".to_string(), m)]));
        d
    }

    #[test]
    fn identical_divisors_match_identically() {
        let d = one_point(gamma(2, 3));
        let IsoOutcome::Isomorphic(m) = iso(&d, &d, Mode::OverBase, false) else {
            panic!()
        };
        assert_eq!(m.points["b"], "b");
        assert!(check_matching(&d, &d, &m, Mode::OverBase, false));
    }

    #[test]
    fn distinct_heights_are_not_isomorphic() {
        let a = one_point(gamma(2, 2));
        let b = one_point(gamma(2, 3));
        assert_eq!(iso(&a, &b, Mode::OverBase, false), IsoOutcome::NotIsomorphic);
        assert_eq!(iso(&a, &b, Mode::Abstract, true), IsoOutcome::NotIsomorphic);
    }

    #[test]
    fn branch_swap_does_not_commute_with_trivial_action() {
        let swap = mu2_on(gamma(2, 1), Some(vec![0, 2, 1]));
        let trivial = mu2_on(gamma(2, 1), None);
        swap.check().unwrap();
        trivial.check().unwrap();
        assert!(iso(&swap, &trivial, Mode::OverBase, false).is_isomorphic());
        assert_eq!(iso(&swap, &trivial, Mode::OverBase, true), IsoOutcome::NotIsomorphic);
        let IsoOutcome::Isomorphic(m) = iso(&swap, &swap, Mode::OverBase, true) else {
            panic!()
        };
        assert!(check_matching(&swap, &swap, &m, Mode::OverBase, true));
    }

    #[test]
    fn swapped_points_match_abstractly_only() {
        let t = gamma(2, 1);
        let mut d1 = GraphDivisor::over_line(vec![("p".into(), t.clone()), ("q".into(), FiberTree::single(0))]);
        d1.base.mu = 2;
        d1.base.perm = vec!["p".into(), "q".into()];
        let d2 = GraphDivisor::over_line(vec![("p".into(), FiberTree::single(0)), ("q".into(), t)]);
        assert_eq!(iso(&d1, &d2, Mode::OverBase, false), IsoOutcome::NotIsomorphic);
        let IsoOutcome::Isomorphic(m) = iso(&d1, &d2, Mode::Abstract, false) else {
            panic!()
        };
        assert_eq!(m.points["p"], "q");
        assert!(check_matching(&d1, &d2, &m, Mode::Abstract, false));
    }

    #[test]
    fn orbit_of_two_points_matches_equivariantly() {
        let t = gamma(3, 1);
        let make = |e: Vec<usize>| {
            let mut d = GraphDivisor::over_line(vec![("p".into(), t.clone()), ("q".into(), t.clone())]);
            d.base.mu = 2;
            d.base.perm = vec!["q".into(), "p".into()];
            d.equivariance = Some(BTreeMap::from([("p".into(), e.clone()), ("q".into(), invert(&e))]));
            d
        };
        let a = make(vec![0, 1, 2, 3]);
        let b = make(vec![0, 2, 3, 1]);
        a.check().unwrap();
        b.check().unwrap();
        let IsoOutcome::Isomorphic(m) = iso(&a, &b, Mode::OverBase, true) else {
            panic!()
        };
        assert!(check_matching(&a, &b, &m, Mode::OverBase, true));
    }

    #[test]
    fn validation_reports_each_problem() {
        assert!(one_point(gamma(3, 2)).validate().is_ok());
        let bad = one_point("[-2, [[-1, []]]]".parse().unwrap());
        let issues = bad.validate().unwrap_err();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].point.as_deref(), Some("b"));
        assert!(matches!(issues[0].error, Error::NotContractible(_)));
        let broken = mu2_on(gamma(2, 1), Some(vec![1, 0, 2]));
        assert!(matches!(
            broken.validate().unwrap_err()[0].error,
            Error::EquivarianceBroken(_)
        ));
        // an order-three automorphism under mu = 2
        let rot = mu2_on(gamma(3, 1), Some(vec![0, 2, 3, 1]));
        assert!(matches!(rot.validate().unwrap_err()[0].error, Error::EquivarianceBroken(_)));
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"base":{"points":["b1"],"infinity":1,"mu":2,"perm":["b1"]},
            "fibers":{"b1":[-2,[[-1,[]],[-1,[]]]]},"equivariance":{"b1":[0,2,1]}}"#;
        let d = GraphDivisor::from_json(src).unwrap();
        d.check().unwrap();
        let again = GraphDivisor::from_value(&d.to_value()).unwrap();
        assert_eq!(d, again);
        let err = GraphDivisor::from_json("{\"base\": ").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
