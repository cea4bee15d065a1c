#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use zcancel_core::blowups::replay;
use zcancel_core::equations::poly::{Poly1, Ring};
use zcancel_core::{BlowupSequence, BlowupStep, DanielewskiForm, FiberTree, StepKind};

/// Random blowup sequence with at most `max_vertices` vertices in the
/// replay. Inner steps are drawn with probability `inner`.
pub fn random_sequence<R: Rng>(rng: &mut R, max_vertices: usize, inner: f64) -> BlowupSequence {
    let target_len = rng.gen_range(1..=max_vertices);
    let mut batches: Vec<Vec<BlowupStep>> = Vec::new();
    let mut tree = FiberTree::single(0);
    while tree.len() < target_len {
        let existing = tree.len();
        let room = target_len - existing;
        let size = rng.gen_range(1..=room.min(3));
        let mut batch = Vec::new();
        for _ in 0..size {
            let edges: Vec<(usize, usize)> = (0..existing)
                .filter_map(|v| tree.parent(v).filter(|&p| p < existing).map(|p| (p, v)))
                .collect();
            // inner steps go alone so adjacency is read off the current tree
            if batch.is_empty() && !edges.is_empty() && rng.gen_bool(inner) {
                let &(p, c) = edges.choose(rng).expect("nonempty");
                let step = if rng.gen_bool(0.5) { BlowupStep::inner(p, c) } else { BlowupStep::inner(c, p) };
                batch.push(step);
                break;
            }
            batch.push(BlowupStep::outer(rng.gen_range(0..existing)));
        }
        batches.push(batch);
        tree = replay(&BlowupSequence::new(batches.clone())).expect("generated steps are valid");
    }
    BlowupSequence::new(batches)
}

/// Multiplicities by forward replay: an outer blowup copies the
/// multiplicity of its center, an inner one adds both.
pub fn forward_multiplicities(seq: &BlowupSequence) -> Vec<u64> {
    let mut mult = vec![1u64];
    for step in seq.steps() {
        let m = match step.kind {
            StepKind::Outer => mult[step.target],
            StepKind::Inner(n) => mult[step.target] + mult[n],
        };
        mult.push(m);
    }
    mult
}

/// The same tree with vertices renumbered by `perm` (old -> new).
pub fn relabel(tree: &FiberTree, perm: &[usize]) -> FiberTree {
    let n = tree.len();
    let mut weights = vec![0; n];
    let mut parents = vec![None; n];
    for v in 0..n {
        weights[perm[v]] = tree.weight(v);
        parents[perm[v]] = tree.parent(v).map(|p| perm[p]);
    }
    FiberTree::from_parents(weights, parents).expect("relabeling keeps a tree")
}

pub fn random_perm<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Random Danielewski form with `b_0` a product of distinct rational linear factors.
pub fn random_form<R: Rng>(r: &mut R, d: usize, m: usize) -> DanielewskiForm {
    let mut roots: Vec<i64> = Vec::new();
    while roots.len() < d {
        let x = r.gen_range(-6..=6);
        if !roots.contains(&x) {
            roots.push(x);
        }
    }
    let b0 = roots.iter().fold(Poly1::one(), |acc, &x| acc.mul(&Poly1::from_ints(&[-x, 1])));
    let mut b = vec![b0];
    for _ in 1..m {
        let coeffs: Vec<i64> = (0..d).map(|_| r.gen_range(-3..=3)).collect();
        b.push(Poly1::from_ints(&coeffs));
    }
    DanielewskiForm::new(m, b).unwrap()
}

