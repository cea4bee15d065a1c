//! Blowup sequences, their replay, and the extended graph of a divisor.

use std::fmt::Write as _;

use serde::Serialize;

use crate::divisors::GraphDivisor;
use crate::error::{Error, Result};
use crate::trees::{validate_contractible, FiberTree};

pub use crate::trees::{is_pseudominimal, pseudominimalize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "neighbor", rename_all = "lowercase")]
pub enum StepKind {
    Outer,
    /// Blowup of the node between the target and this neighbor.
    Inner(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlowupStep {
    pub target: usize,
    pub kind: StepKind,
}

impl BlowupStep {
    pub fn outer(target: usize) -> Self {
        BlowupStep {
            target,
            kind: StepKind::Outer,
        }
    }

    pub fn inner(target: usize, neighbor: usize) -> Self {
        BlowupStep {
            target,
            kind: StepKind::Inner(neighbor),
        }
    }
}

/// Batches of simultaneous blowups, starting from the trivial fiber `[[0]]`.
///
/// Vertex 0 is the root; each step appends one vertex, numbered in step order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BlowupSequence {
    pub batches: Vec<Vec<BlowupStep>>,
}

impl BlowupSequence {
    pub fn new(batches: Vec<Vec<BlowupStep>>) -> Self {
        BlowupSequence { batches }
    }

    pub fn steps(&self) -> impl Iterator<Item = &BlowupStep> {
        self.batches.iter().flatten()
    }

    pub fn step_count(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.step_count() == 0
    }

    /// Whether every batch only blows up points on the top level of the
    /// current tree.
    pub fn is_well_ordered(&self) -> bool {
        let mut tree = FiberTree::single(0);
        for batch in &self.batches {
            let levels = tree.levels();
            let top = levels.iter().copied().max().unwrap_or(0);
            let on_top = |v: usize| v < levels.len() && levels[v] == top;
            let ok = batch.iter().all(|s| match s.kind {
                StepKind::Outer => on_top(s.target),
                StepKind::Inner(n) => on_top(s.target) || on_top(n),
            });
            if !ok || apply_batch(&mut tree, batch, 0).is_err() {
                return false;
            }
        }
        true
    }
}

/// Applies one batch in place. Targets must exist before the batch starts.
pub(crate) fn apply_batch(tree: &mut FiberTree, batch: &[BlowupStep], batch_index: usize) -> Result<()> {
    let existing = tree.len();
    for (i, step) in batch.iter().enumerate() {
        let bad = |reason: String| Error::InvalidStep {
            batch: batch_index,
            step: i,
            reason,
        };
        if step.target >= existing {
            return Err(bad(format!("target {} does not exist", step.target)));
        }
        match step.kind {
            StepKind::Outer => {
                tree.add_weight(step.target, -1)?;
                tree.push_child(step.target, -1);
            }
            StepKind::Inner(n) => {
                if n >= existing {
                    return Err(bad(format!("neighbor {n} does not exist")));
                }
                let (upper, lower) = if tree.parent(n) == Some(step.target) {
                    (step.target, n)
                } else if tree.parent(step.target) == Some(n) {
                    (n, step.target)
                } else {
                    return Err(bad(format!("{} and {n} are not adjacent", step.target)));
                };
                tree.add_weight(upper, -1)?;
                tree.add_weight(lower, -1)?;
                tree.subdivide(upper, lower, -1);
            }
        }
    }
    Ok(())
}

/// Replays a sequence from `[[0]]`.
pub fn replay(seq: &BlowupSequence) -> Result<FiberTree> {
    let mut tree = FiberTree::single(0);
    for (b, batch) in seq.batches.iter().enumerate() {
        apply_batch(&mut tree, batch, b)?;
    }
    Ok(tree)
}

/// Whether every step is an outer blowup.
pub fn is_gdf(seq: &BlowupSequence) -> bool {
    seq.steps().all(|s| s.kind == StepKind::Outer)
}

/// Recovers a well-ordered blowup sequence producing `tree`.
///
/// The tree is blown down in rounds; each round contracts every eligible
/// `(-1)`-vertex on the deepest level holding one. The rounds, reversed, are
/// the batches. The replay numbers vertices differently from `tree`; the
/// returned map sends each vertex of `tree` to its replay index.
pub fn derive_sequence_with_map(tree: &FiberTree) -> Result<(BlowupSequence, Vec<usize>)> {
    validate_contractible(tree)?;
    let mut work = tree.clone();
    let mut alive = vec![true; tree.len()];
    let mut remaining = tree.len();
    // (vertex, neighbors at contraction time, ordering key)
    let mut rounds: Vec<Vec<(usize, Vec<usize>, Vec<u8>)>> = Vec::new();
    while remaining > 1 {
        let levels = work.levels();
        let eligible: Vec<usize> = (0..work.len())
            .filter(|&v| alive[v] && v != work.root() && work.weight(v) == -1 && work.children(v).len() <= 1)
            .collect();
        let Some(deepest) = eligible.iter().map(|&v| levels[v]).max() else {
            return Err(Error::NotContractible("no contractible (-1)-vertex".into()));
        };
        let mut round = Vec::new();
        for v in eligible.into_iter().filter(|&v| levels[v] == deepest) {
            let p = work.parent(v).expect("non-root");
            let mut centers = vec![p];
            if let Some(&c) = work.children(v).first() {
                centers.push(c);
            }
            contract_in_place(&mut work, v)?;
            alive[v] = false;
            remaining -= 1;
            round.push((v, centers, Vec::new()));
        }
        let enc = encodings_live(&work);
        for entry in &mut round {
            let mut key = enc[entry.1[0]].clone();
            if let Some(&c) = entry.1.get(1) {
                key.push(b'|');
                key.extend_from_slice(&enc[c]);
            }
            entry.2 = key;
        }
        round.sort_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)));
        rounds.push(round);
    }
    let mut replay_of = vec![usize::MAX; tree.len()];
    replay_of[tree.root()] = 0;
    let mut next = 1;
    let mut batches = Vec::with_capacity(rounds.len());
    for round in rounds.into_iter().rev() {
        let mut batch = Vec::with_capacity(round.len());
        for (v, centers, _) in &round {
            let step = match centers.as_slice() {
                [p] => BlowupStep::outer(replay_of[*p]),
                [p, c] => BlowupStep::inner(replay_of[*p], replay_of[*c]),
                _ => unreachable!("a contracted vertex has one or two neighbors"),
            };
            batch.push(step);
            replay_of[*v] = next;
            next += 1;
        }
        batches.push(batch);
    }
    Ok((BlowupSequence { batches }, replay_of))
}

pub fn derive_sequence(tree: &FiberTree) -> Result<BlowupSequence> {
    Ok(derive_sequence_with_map(tree)?.0)
}

fn contract_in_place(tree: &mut FiberTree, v: usize) -> Result<()> {
    let p = tree.parent(v).expect("non-root");
    tree.add_weight(p, 1)?;
    if let Some(&c) = tree.children(v).first() {
        tree.add_weight(c, 1)?;
    }
    tree.detach(v);
    Ok(())
}

fn encodings_live(tree: &FiberTree) -> Vec<Vec<u8>> {
    let mut enc: Vec<Vec<u8>> = vec![Vec::new(); tree.len()];
    for &v in tree.bfs_order().iter().rev() {
        let mut kids: Vec<&Vec<u8>> = tree.children(v).iter().map(|&c| &enc[c]).collect();
        kids.sort();
        let mut out = format!("({}", tree.weight(v)).into_bytes();
        for k in kids {
            out.extend_from_slice(k);
        }
        out.push(b')');
        enc[v] = out;
    }
    enc
}

/// The section `S`, the fibers at infinity, and every fiber tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedGraph {
    pub infinity: usize,
    pub fibers: Vec<(String, FiberTree)>,
}

pub fn extended_graph(divisor: &GraphDivisor) -> ExtendedGraph {
    ExtendedGraph {
        infinity: divisor.base.infinity,
        fibers: divisor.fibers.iter().map(|(p, t)| (p.clone(), t.clone())).collect(),
    }
}

impl ExtendedGraph {
    pub fn vertex_count(&self) -> usize {
        1 + self.infinity + self.fibers.iter().map(|(_, t)| t.len()).sum::<usize>()
    }

    /// Graphviz rendering. Fiber vertices are named `point.i` with `i` the
    /// position in canonical order, so isomorphic inputs render identically.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph extended {\n");
        out.push_str("  \"S\" [shape=doublecircle, label=\"S (w=0)\"];\n");
        for i in 1..=self.infinity {
            let name = if self.infinity == 1 {
                "F_inf".to_string()
            } else {
                format!("F_inf{i}")
            };
            let _ = writeln!(out, "  \"{name}\" [label=\"{name} (w=0, mult=1)\"];");
            let _ = writeln!(out, "  \"S\" -- \"{name}\";");
        }
        for (point, tree) in &self.fibers {
            let order = tree.canonical_order();
            let mut pos = vec![0; tree.len()];
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            let mult = validate_contractible(tree).ok().map(|c| c.multiplicities);
            for &v in &order {
                let name = format!("{point}.{}", pos[v]);
                let m = mult
                    .as_ref()
                    .map_or_else(|| "?".to_string(), |m| m.get(v).to_string());
                let _ = writeln!(out, "  \"{name}\" [label=\"{name} (w={}, mult={m})\"];", tree.weight(v));
            }
            let _ = writeln!(out, "  \"S\" -- \"{point}.0\";");
            for &v in &order {
                let mut kids = tree.children(v).to_vec();
                kids.sort_by_key(|&c| pos[c]);
                for c in kids {
                    let _ = writeln!(out, "  \"{point}.{}\" -- \"{point}.{}\";", pos[v], pos[c]);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{gamma, gdf_weights};

    fn lit(s: &str) -> FiberTree {
        s.parse().unwrap()
    }

    #[test]
    fn replay_two_outer_at_root() {
        let seq = BlowupSequence::new(vec![vec![BlowupStep::outer(0), BlowupStep::outer(0)]]);
        assert_eq!(replay(&seq).unwrap().canonical_form(), gamma(2, 1).canonical_form());
    }

    #[test]
    fn replay_chain_of_outer_blowups() {
        for m in 1..6 {
            let batches = (0..m).map(|i| vec![BlowupStep::outer(i)]).collect();
            let t = replay(&BlowupSequence::new(batches)).unwrap();
            let expected = if m == 1 {
                "[-1,[[-1,[]]]]".to_string()
            } else {
                let mut s = "[-1,[]]".to_string();
                for _ in 1..m {
                    s = format!("[-2,[{s}]]");
                }
                format!("[-1,[{s}]]")
            };
            assert_eq!(t.to_literal(), expected);
            assert_eq!(t, gdf_weights(&t));
        }
    }

    #[test]
    fn replay_inner_step() {
        let seq = BlowupSequence::new(vec![vec![BlowupStep::outer(0)], vec![BlowupStep::inner(1, 0)]]);
        let t = replay(&seq).unwrap();
        assert_eq!(t.canonical_form(), lit("[-2, [[-1, [[-2, []]]]]]").canonical_form());
    }

    #[test]
    fn replay_rejects_bad_steps() {
        let seq = BlowupSequence::new(vec![vec![BlowupStep::outer(3)]]);
        assert!(matches!(replay(&seq), Err(Error::InvalidStep { .. })));
        let seq = BlowupSequence::new(vec![
            vec![BlowupStep::outer(0), BlowupStep::outer(0)],
            vec![BlowupStep::inner(1, 2)],
        ]);
        assert!(matches!(replay(&seq), Err(Error::InvalidStep { batch: 1, .. })));
        // same-batch targets must already exist
        let seq = BlowupSequence::new(vec![vec![BlowupStep::outer(0), BlowupStep::outer(1)]]);
        assert!(replay(&seq).is_err());
    }

    #[test]
    fn gdf_criterion() {
        assert!(is_gdf(&BlowupSequence::default()));
        assert!(is_gdf(&BlowupSequence::new(vec![vec![BlowupStep::outer(0)]])));
        let seq = BlowupSequence::new(vec![vec![BlowupStep::outer(0)], vec![BlowupStep::inner(1, 0)]]);
        assert!(!is_gdf(&seq));
    }

    #[test]
    fn derive_examples() {
        assert!(derive_sequence(&FiberTree::single(0)).unwrap().is_empty());
        let seq = derive_sequence(&gamma(2, 1)).unwrap();
        assert_eq!(seq.batches, vec![vec![BlowupStep::outer(0), BlowupStep::outer(0)]]);
        let seq = derive_sequence(&gamma(3, 4)).unwrap();
        assert_eq!(seq.batches.len(), 4);
        assert!(seq.batches.iter().all(|b| b.len() == 3));
        assert!(is_gdf(&seq) && seq.is_well_ordered());
    }

    #[test]
    fn derive_round_trips_non_gdf_tree() {
        let t = lit("[-2, [[-1, [[-2, []]]]]]");
        let (seq, map) = derive_sequence_with_map(&t).unwrap();
        assert!(!is_gdf(&seq));
        let r = replay(&seq).unwrap();
        assert_eq!(r.canonical_form(), t.canonical_form());
        for v in 0..t.len() {
            assert_eq!(r.weight(map[v]), t.weight(v));
        }
    }

    #[test]
    fn extended_graph_counts() {
        let empty = GraphDivisor::over_line(vec![]);
        assert_eq!(extended_graph(&empty).vertex_count(), 2);
        let trivial = GraphDivisor::over_line(vec![("0".into(), FiberTree::single(0))]);
        assert_eq!(extended_graph(&trivial).vertex_count(), 3);
        for d in 1..4 {
            for m in 1..4 {
                let g = GraphDivisor::over_line(vec![("0".into(), gamma(d, m))]);
                assert_eq!(extended_graph(&g).vertex_count(), d * m + 3);
            }
        }
    }

    #[test]
    fn dot_output_is_stable_under_relabeling() {
        let a = GraphDivisor::over_line(vec![("b".into(), lit("[-2, [[-1,[]], [-2, [[-1,[]]]]]]"))]);
        let b = GraphDivisor::over_line(vec![("b".into(), lit("[-2, [[-2, [[-1,[]]]], [-1,[]]]]"))]);
        let dot = extended_graph(&a).to_dot();
        assert_eq!(dot, extended_graph(&b).to_dot());
        assert!(dot.contains("doublecircle"));
        assert!(dot.contains("\"b.0\" [label=\"b.0 (w=-2, mult=1)\"]"));
    }
}
