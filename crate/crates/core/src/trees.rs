//! Weighted rooted trees of degenerate fibers.
//!
//! A [`FiberTree`] is the dual graph of a completed fiber: vertices are fiber
//! components weighted by their self-intersection numbers, the root is the
//! component meeting the section at infinity. Contracting a `(-1)`-vertex adds
//! one to the weight of each neighbor and joins its (at most two) neighbors.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

/// One fiber component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord {
    pub weight: i64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Weighted rooted tree over a fiber point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberTree {
    vertices: Vec<VertexRecord>,
    root: usize,
}

/// Multiplicities of fiber components, indexed like the tree's vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityMap(pub Vec<u64>);

impl MultiplicityMap {
    pub fn get(&self, v: usize) -> u64 {
        self.0[v]
    }

    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(1)
    }

    pub fn all_reduced(&self) -> bool {
        self.0.iter().all(|&m| m == 1)
    }
}

/// Result of a successful contraction to the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    /// Vertices in the order they were blown down.
    pub order: Vec<usize>,
    /// Neighbors of each contracted vertex at the moment it was contracted
    /// (parent first), aligned with `order`.
    pub centers: Vec<Vec<usize>>,
    pub multiplicities: MultiplicityMap,
}

/// Outcome of a bounded isomorphism enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Every isomorphism was visited.
    Exhausted,
    /// The visitor asked to stop.
    Stopped,
    /// The node budget ran out before the search finished.
    BudgetExceeded,
}

impl FiberTree {
    /// The single-vertex tree `[[w]]`.
    pub fn single(weight: i64) -> Self {
        FiberTree {
            vertices: vec![VertexRecord {
                weight,
                parent: None,
                children: Vec::new(),
            }],
            root: 0,
        }
    }

    /// Builds `weight` with the given subtrees attached below it. Vertices are
    /// numbered in preorder.
    pub fn node(weight: i64, children: Vec<FiberTree>) -> Self {
        let mut tree = FiberTree::single(weight);
        for child in children {
            tree.graft(0, &child);
        }
        tree
    }

    /// Builds a tree from parallel weight and parent arrays. Exactly one entry
    /// of `parents` must be `None`.
    pub fn from_parents(weights: Vec<i64>, parents: Vec<Option<usize>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        if weights.len() != parents.len() {
            return Err(Error::InvalidTree("weights and parents differ in length".into()));
        }
        let n = weights.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parents[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidTree(format!("{} roots", roots.len())));
        }
        let mut vertices: Vec<VertexRecord> = weights
            .into_iter()
            .zip(&parents)
            .map(|(weight, &parent)| VertexRecord {
                weight,
                parent,
                children: Vec::new(),
            })
            .collect();
        for v in 0..n {
            if let Some(p) = parents[v] {
                if p >= n || p == v {
                    return Err(Error::InvalidTree(format!("bad parent {p} of vertex {v}")));
                }
                vertices[p].children.push(v);
            }
        }
        let tree = FiberTree {
            vertices,
            root: roots[0],
        };
        tree.check()?;
        Ok(tree)
    }

    /// Validates the parent/children links: one root, connected, acyclic.
    pub fn check(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.root >= n {
            return Err(Error::InvalidTree("root out of range".into()));
        }
        if self.vertices[self.root].parent.is_some() {
            return Err(Error::InvalidTree("root has a parent".into()));
        }
        for (v, rec) in self.vertices.iter().enumerate() {
            for &c in &rec.children {
                if c >= n || self.vertices[c].parent != Some(v) {
                    return Err(Error::InvalidTree(format!("inconsistent link {v} -> {c}")));
                }
            }
            if let Some(p) = rec.parent {
                if p >= n || !self.vertices[p].children.contains(&v) {
                    return Err(Error::InvalidTree(format!("inconsistent link {p} -> {v}")));
                }
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([self.root]);
        let mut count = 0;
        while let Some(v) = queue.pop_front() {
            if seen[v] {
                return Err(Error::InvalidTree("cycle".into()));
            }
            seen[v] = true;
            count += 1;
            queue.extend(self.vertices[v].children.iter().copied());
        }
        if count != n {
            return Err(Error::InvalidTree("disconnected".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.vertices[v].weight
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.vertices[v].parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.vertices[v].children
    }

    /// Degree inside the fiber tree; the root's edge to the section is not counted.
    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].children.len() + usize::from(self.vertices[v].parent.is_some())
    }

    /// A leaf is an extremal vertex different from the root.
    pub fn is_leaf(&self, v: usize) -> bool {
        v != self.root && self.vertices[v].children.is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_leaf(v)).count()
    }

    /// Tree distance of every vertex to the root.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0; self.len()];
        for v in self.bfs_order() {
            for &c in &self.vertices[v].children {
                level[c] = level[v] + 1;
            }
        }
        level
    }

    pub fn level(&self, v: usize) -> usize {
        let mut l = 0;
        let mut cur = v;
        while let Some(p) = self.vertices[cur].parent {
            l += 1;
            cur = p;
        }
        l
    }

    pub fn height(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Vertices in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut queue = VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            queue.extend(self.vertices[v].children.iter().copied());
        }
        order
    }

    /// Number of leaves on each level `1..=height`.
    pub fn type_sequence(&self) -> Vec<usize> {
        let levels = self.levels();
        let h = levels.iter().copied().max().unwrap_or(0);
        let mut seq = vec![0; h];
        for v in self.leaves() {
            seq[levels[v] - 1] += 1;
        }
        seq
    }

    pub fn is_chain(&self) -> bool {
        self.vertices.iter().all(|r| r.children.len() <= 1)
    }

    /// Every branch at the root is a chain.
    pub fn is_bush(&self) -> bool {
        self.vertices
            .iter()
            .enumerate()
            .all(|(v, r)| v == self.root || r.children.len() <= 1)
    }

    /// Canonical encodings of every rooted subtree, indexed by vertex.
    pub fn subtree_encodings(&self) -> Vec<Vec<u8>> {
        let mut enc: Vec<Vec<u8>> = vec![Vec::new(); self.len()];
        for &v in self.bfs_order().iter().rev() {
            let mut kids: Vec<&Vec<u8>> = self.vertices[v].children.iter().map(|&c| &enc[c]).collect();
            kids.sort();
            let mut out = Vec::new();
            out.push(b'(');
            out.extend_from_slice(self.vertices[v].weight.to_string().as_bytes());
            for k in kids {
                out.extend_from_slice(k);
            }
            out.push(b')');
            enc[v] = out;
        }
        enc
    }

    /// Encoding that agrees for two trees iff they are isomorphic as weighted
    /// rooted trees.
    pub fn canonical_form(&self) -> Vec<u8> {
        self.subtree_encodings().swap_remove(self.root)
    }

    /// `canonical_form` as text.
    pub fn canonical_string(&self) -> String {
        String::from_utf8(self.canonical_form()).expect("encoding is ASCII")
    }

    /// Preorder traversal with children visited in canonical-encoding order.
    /// Isomorphic trees list corresponding vertices at the same positions.
    pub fn canonical_order(&self) -> Vec<usize> {
        let enc = self.subtree_encodings();
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            let mut kids = self.vertices[v].children.clone();
            kids.sort_by(|a, b| enc[*a].cmp(&enc[*b]).then(a.cmp(b)));
            stack.extend(kids.into_iter().rev());
        }
        order
    }

    /// Relabels vertices in canonical order. Returns the new tree and the map
    /// from old to new indices.
    pub fn canonicalized(&self) -> (FiberTree, Vec<usize>) {
        let order = self.canonical_order();
        let mut new_of = vec![0; self.len()];
        for (i, &v) in order.iter().enumerate() {
            new_of[v] = i;
        }
        let weights = order.iter().map(|&v| self.weight(v)).collect();
        let parents = order.iter().map(|&v| self.parent(v).map(|p| new_of[p])).collect();
        let mut tree = FiberTree::from_parents(weights, parents).expect("relabeling keeps shape");
        // children in canonical order, not in index order
        for v in 0..tree.len() {
            tree.vertices[v].children.sort_unstable();
        }
        (tree, new_of)
    }

    /// Some root- and weight-preserving isomorphism onto `other`, as a vertex map.
    pub fn isomorphism_to(&self, other: &FiberTree) -> Option<Vec<usize>> {
        if self.len() != other.len() || self.canonical_form() != other.canonical_form() {
            return None;
        }
        let a = self.canonical_order();
        let b = other.canonical_order();
        let mut map = vec![0; self.len()];
        for (&x, &y) in a.iter().zip(&b) {
            map[x] = y;
        }
        Some(map)
    }

    /// Checks that `map` is a root- and weight-preserving isomorphism onto `other`.
    pub fn is_isomorphism(&self, other: &FiberTree, map: &[usize]) -> bool {
        if map.len() != self.len() || other.len() != self.len() {
            return false;
        }
        let mut hit = vec![false; other.len()];
        for &y in map {
            if y >= other.len() || hit[y] {
                return false;
            }
            hit[y] = true;
        }
        if map[self.root] != other.root {
            return false;
        }
        (0..self.len()).all(|v| {
            self.weight(v) == other.weight(map[v])
                && self.parent(v).map(|p| map[p]) == other.parent(map[v])
        })
    }

    /// Enumerates every isomorphism onto `other`, calling `visit` on each
    /// vertex map until it returns `false`. `budget` bounds the number of
    /// search nodes and is decremented in place.
    pub fn for_each_isomorphism<F>(&self, other: &FiberTree, budget: &mut u64, mut visit: F) -> SearchOutcome
    where
        F: FnMut(&[usize]) -> bool,
    {
        if self.len() != other.len() || self.canonical_form() != other.canonical_form() {
            return SearchOutcome::Exhausted;
        }
        let search = IsoSearch {
            a: self,
            b: other,
            enc_a: self.subtree_encodings(),
            enc_b: other.subtree_encodings(),
        };
        let mut map = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([(self.root, other.root)]);
        search.expand(&mut queue, &mut map, budget, &mut visit)
    }

    /// Attaches a copy of `sub` below `at`; returns the index of the copy's root.
    pub(crate) fn graft(&mut self, at: usize, sub: &FiberTree) -> usize {
        let offset = self.vertices.len();
        let order = sub.preorder();
        let mut new_of = vec![0; sub.len()];
        for (i, &v) in order.iter().enumerate() {
            new_of[v] = offset + i;
        }
        for &v in &order {
            let rec = &sub.vertices[v];
            self.vertices.push(VertexRecord {
                weight: rec.weight,
                parent: Some(rec.parent.map_or(at, |p| new_of[p])),
                children: rec.children.iter().map(|&c| new_of[c]).collect(),
            });
        }
        self.vertices[at].children.push(offset);
        offset
    }

    /// Preorder traversal in stored child order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.vertices[v].children.iter().rev().copied());
        }
        order
    }

    pub(crate) fn push_child(&mut self, parent: usize, weight: i64) -> usize {
        let id = self.vertices.len();
        self.vertices.push(VertexRecord {
            weight,
            parent: Some(parent),
            children: Vec::new(),
        });
        self.vertices[parent].children.push(id);
        id
    }

    /// Inserts a new vertex on the edge between `upper` and its child `lower`.
    pub(crate) fn subdivide(&mut self, upper: usize, lower: usize, weight: i64) -> usize {
        let id = self.vertices.len();
        let pos = self.vertices[upper]
            .children
            .iter()
            .position(|&c| c == lower)
            .expect("lower is a child of upper");
        self.vertices.push(VertexRecord {
            weight,
            parent: Some(upper),
            children: vec![lower],
        });
        self.vertices[upper].children[pos] = id;
        self.vertices[lower].parent = Some(id);
        id
    }

    /// Inserts a new root above the current one.
    pub(crate) fn push_root(&mut self, weight: i64) -> usize {
        let id = self.vertices.len();
        self.vertices.push(VertexRecord {
            weight,
            parent: None,
            children: vec![self.root],
        });
        self.vertices[self.root].parent = Some(id);
        self.root = id;
        id
    }

    /// Removes a vertex with at most one child from the tree, hooking its
    /// child onto its parent in its place. The record stays, unlinked.
    pub(crate) fn detach(&mut self, v: usize) {
        let p = self.vertices[v].parent.expect("non-root");
        let pos = self.vertices[p].children.iter().position(|&c| c == v).expect("linked");
        if let Some(&c) = self.vertices[v].children.first() {
            self.vertices[p].children[pos] = c;
            self.vertices[c].parent = Some(p);
        } else {
            self.vertices[p].children.remove(pos);
        }
        self.vertices[v].children.clear();
        self.vertices[v].parent = None;
    }

    pub(crate) fn clear_children(&mut self, v: usize) {
        self.vertices[v].children.clear();
    }

    /// Hooks `child` below `parent`, overwriting its parent link.
    pub(crate) fn adopt(&mut self, parent: usize, child: usize) {
        self.vertices[parent].children.push(child);
        self.vertices[child].parent = Some(parent);
    }

    pub(crate) fn add_weight(&mut self, v: usize, delta: i64) -> Result<()> {
        let w = &mut self.vertices[v].weight;
        *w = w.checked_add(delta).ok_or(Error::WeightOverflow(v))?;
        Ok(())
    }

    pub(crate) fn set_weight(&mut self, v: usize, weight: i64) {
        self.vertices[v].weight = weight;
    }

    /// Nested-list literal `[w, [child, ...]]`.
    pub fn to_literal(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("literal serializes")
    }

    pub fn to_value(&self) -> Value {
        fn build(t: &FiberTree, v: usize) -> Value {
            let kids = t.children(v).iter().map(|&c| build(t, c)).collect();
            Value::Array(vec![Value::from(t.weight(v)), Value::Array(kids)])
        }
        build(self, self.root)
    }

    /// Parses a nested-list literal value; vertices are numbered in preorder.
    pub fn from_value(value: &Value) -> Result<Self> {
        fn parse(value: &Value, depth: usize) -> Result<FiberTree> {
            if depth > 10_000 {
                return Err(Error::InvalidTree("literal nested too deeply".into()));
            }
            let items = value
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::InvalidTree(format!("expected [weight, [children]], got {value}")))?;
            let weight = items[0]
                .as_i64()
                .ok_or_else(|| Error::InvalidTree(format!("weight must be an integer, got {}", items[0])))?;
            let kids = items[1]
                .as_array()
                .ok_or_else(|| Error::InvalidTree(format!("children must be a list, got {}", items[1])))?;
            let kids = kids.iter().map(|k| parse(k, depth + 1)).collect::<Result<Vec<_>>>()?;
            Ok(FiberTree::node(weight, kids))
        }
        parse(value, 0)
    }
}

impl FromStr for FiberTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(s).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        FiberTree::from_value(&value)
    }
}

impl fmt::Display for FiberTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl Serialize for FiberTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiberTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        FiberTree::from_value(&value).map_err(serde::de::Error::custom)
    }
}

struct IsoSearch<'a> {
    a: &'a FiberTree,
    b: &'a FiberTree,
    enc_a: Vec<Vec<u8>>,
    enc_b: Vec<Vec<u8>>,
}

impl IsoSearch<'_> {
    fn expand<F>(
        &self,
        queue: &mut VecDeque<(usize, usize)>,
        map: &mut Vec<usize>,
        budget: &mut u64,
        visit: &mut F,
    ) -> SearchOutcome
    where
        F: FnMut(&[usize]) -> bool,
    {
        if *budget == 0 {
            return SearchOutcome::BudgetExceeded;
        }
        *budget -= 1;
        let Some((u, v)) = queue.pop_front() else {
            return if visit(map) {
                SearchOutcome::Exhausted
            } else {
                SearchOutcome::Stopped
            };
        };
        map[u] = v;
        let mut used = vec![false; self.b.children(v).len()];
        let out = self.assign(u, v, 0, &mut used, queue, map, budget, visit);
        queue.push_front((u, v));
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn assign<F>(
        &self,
        u: usize,
        v: usize,
        i: usize,
        used: &mut Vec<bool>,
        queue: &mut VecDeque<(usize, usize)>,
        map: &mut Vec<usize>,
        budget: &mut u64,
        visit: &mut F,
    ) -> SearchOutcome
    where
        F: FnMut(&[usize]) -> bool,
    {
        let ca = self.a.children(u);
        if i == ca.len() {
            return self.expand(queue, map, budget, visit);
        }
        let cb = self.b.children(v);
        for j in 0..cb.len() {
            if used[j] || self.enc_a[ca[i]] != self.enc_b[cb[j]] {
                continue;
            }
            used[j] = true;
            queue.push_back((ca[i], cb[j]));
            let out = self.assign(u, v, i + 1, used, queue, map, budget, visit);
            queue.pop_back();
            used[j] = false;
            if out != SearchOutcome::Exhausted {
                return out;
            }
        }
        SearchOutcome::Exhausted
    }
}

/// Working copy used while blowing down vertices.
#[derive(Clone)]
struct Scratch {
    tree: FiberTree,
    alive: Vec<bool>,
}

impl Scratch {
    fn new(tree: &FiberTree) -> Self {
        Scratch {
            alive: vec![true; tree.len()],
            tree: tree.clone(),
        }
    }

    fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Contracts a non-root vertex with at most one child. Returns its
    /// neighbors (parent first).
    fn contract(&mut self, v: usize) -> Result<Vec<usize>> {
        let p = self.tree.parent(v).expect("non-root");
        debug_assert!(self.tree.children(v).len() <= 1);
        self.tree.add_weight(p, 1)?;
        let mut centers = vec![p];
        if let Some(&c) = self.tree.children(v).first() {
            self.tree.add_weight(c, 1)?;
            centers.push(c);
        }
        self.tree.detach(v);
        self.alive[v] = false;
        Ok(centers)
    }

    /// Contracts the root, which must have exactly one child.
    fn contract_root(&mut self) -> Result<usize> {
        let r = self.tree.root;
        let c = self.tree.children(r)[0];
        self.tree.add_weight(c, 1)?;
        self.tree.vertices[c].parent = None;
        self.tree.vertices[r].children.clear();
        self.tree.root = c;
        self.alive[r] = false;
        Ok(c)
    }

    /// Vertex encodings restricted to the live tree.
    fn encodings(&self) -> Vec<Vec<u8>> {
        // dead vertices are detached, so their encodings are never consulted
        self.tree.subtree_encodings_from_root()
    }

    fn finish(self) -> (FiberTree, Vec<Option<usize>>) {
        let order = self.tree.preorder();
        let mut new_of = vec![None; self.tree.len()];
        for (i, &v) in order.iter().enumerate() {
            new_of[v] = Some(i);
        }
        let weights = order.iter().map(|&v| self.tree.weight(v)).collect();
        let parents = order
            .iter()
            .map(|&v| self.tree.parent(v).map(|p| new_of[p].expect("live")))
            .collect();
        let tree = FiberTree::from_parents(weights, parents).expect("contraction keeps a tree");
        (tree, new_of)
    }
}

impl FiberTree {
    /// Encodings for vertices reachable from the root; unreachable ones are empty.
    fn subtree_encodings_from_root(&self) -> Vec<Vec<u8>> {
        let mut enc: Vec<Vec<u8>> = vec![Vec::new(); self.len()];
        for &v in self.bfs_order().iter().rev() {
            let mut kids: Vec<&Vec<u8>> = self.vertices[v].children.iter().map(|&c| &enc[c]).collect();
            kids.sort();
            let mut out = vec![b'('];
            out.extend_from_slice(self.vertices[v].weight.to_string().as_bytes());
            for k in kids {
                out.extend_from_slice(k);
            }
            out.push(b')');
            enc[v] = out;
        }
        enc
    }
}

/// Picks the eligible vertex with the smallest subtree encoding, ties broken by index.
fn pick_smallest(candidates: &[usize], enc: &[Vec<u8>]) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .min_by(|a, b| enc[*a].cmp(&enc[*b]).then(a.cmp(b)))
}

/// Blows the tree down to its root.
///
/// Repeatedly contracts a non-root `(-1)`-vertex with at most one child until
/// only the root is left, which must then have weight 0. Multiplicities come
/// from replaying the contractions backwards as blowups: an outer blowup copies
/// the multiplicity of its center, an inner one adds the two.
pub fn validate_contractible(tree: &FiberTree) -> Result<Contraction> {
    let mut scratch = Scratch::new(tree);
    let mut order = Vec::new();
    let mut centers = Vec::new();
    while scratch.alive_count() > 1 {
        let t = &scratch.tree;
        let eligible: Vec<usize> = (0..t.len())
            .filter(|&v| scratch.alive[v] && v != t.root && t.weight(v) == -1 && t.children(v).len() <= 1)
            .collect();
        let enc = scratch.encodings();
        let Some(v) = pick_smallest(&eligible, &enc) else {
            return Err(Error::NotContractible(format!(
                "no contractible (-1)-vertex left among {} vertices",
                scratch.alive_count()
            )));
        };
        centers.push(scratch.contract(v)?);
        order.push(v);
    }
    let root_weight = scratch.tree.weight(scratch.tree.root);
    if root_weight != 0 {
        return Err(Error::NotContractible(format!("root ends with weight {root_weight}")));
    }
    let mut mult = vec![0u64; tree.len()];
    mult[tree.root] = 1;
    for (v, c) in order.iter().zip(&centers).rev() {
        mult[*v] = c.iter().map(|&u| mult[u]).sum();
    }
    Ok(Contraction {
        order,
        centers,
        multiplicities: MultiplicityMap(mult),
    })
}

/// Reweights a tree shape by `w(v) = -deg(v)`, ignoring the input weights.
pub fn gdf_weights(shape: &FiberTree) -> FiberTree {
    let mut out = shape.clone();
    for v in 0..out.len() {
        let d = out.degree(v) as i64;
        out.set_weight(v, -d);
    }
    out
}

/// Contracts non-leaf `(-1)`-vertices until every `(-1)`-vertex is a leaf.
pub fn pseudominimalize(tree: &FiberTree) -> Result<FiberTree> {
    validate_contractible(tree)?;
    let mut scratch = Scratch::new(tree);
    loop {
        let t = &scratch.tree;
        let root = t.root;
        let eligible: Vec<usize> = (0..t.len())
            .filter(|&v| scratch.alive[v] && v != root && t.weight(v) == -1 && t.children(v).len() == 1)
            .collect();
        let enc = scratch.encodings();
        if let Some(v) = pick_smallest(&eligible, &enc) {
            scratch.contract(v)?;
            continue;
        }
        if t.weight(root) == -1 {
            match t.children(root).len() {
                0 => return Err(Error::NotContractible("isolated (-1)-root".into())),
                1 => {
                    scratch.contract_root()?;
                    continue;
                }
                n => return Err(Error::NotPseudominimalizable { children: n }),
            }
        }
        break;
    }
    Ok(scratch.finish().0)
}

/// Whether every `(-1)`-vertex is a leaf.
pub fn is_pseudominimal(tree: &FiberTree) -> bool {
    (0..tree.len()).all(|v| tree.weight(v) != -1 || tree.is_leaf(v))
}

/// Bush with `d` branches, each a chain of length `m`, weighted by `-deg`.
pub fn gamma(d: usize, m: usize) -> FiberTree {
    let mut tree = FiberTree::single(0);
    for _ in 0..d {
        let mut at = tree.root();
        for _ in 0..m {
            at = tree.push_child(at, 0);
        }
    }
    gdf_weights(&tree)
}
