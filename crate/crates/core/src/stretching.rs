//! Stretchings: insertion of chains `[[-2,...,-2,-1]]` into fiber trees.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use serde::Serialize;

use crate::divisors::GraphDivisor;
use crate::error::{Error, Result};
use crate::trees::FiberTree;

/// Level at which chains are inserted into one fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// The height of the fiber tree.
    Top,
    /// A fixed level; `-1` inserts between the root and the section.
    At(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StretchEntry {
    pub a: u64,
    pub level: Level,
}

/// Coefficients and levels per point. Points not listed are left alone.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StretchSpec {
    pub entries: BTreeMap<String, StretchEntry>,
    /// Asserted by the caller: the coefficients form a principal divisor.
    pub principal: bool,
}

impl StretchSpec {
    /// Top-level stretch with coefficient `a` at every special point of `d`.
    pub fn uniform_top(d: &GraphDivisor, a: u64) -> Self {
        StretchSpec {
            entries: d
                .fibers
                .keys()
                .map(|p| (p.clone(), StretchEntry { a, level: Level::Top }))
                .collect(),
            // a multiple of the full fiber over the marked point
            principal: true,
        }
    }
}

impl FromStr for StretchSpec {
    type Err = Error;

    /// Parses `"b1:level=top,a=3;b2:level=-1,a=2"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = StretchSpec::default();
        let mut column = 1;
        for part in s.split(';') {
            let here = column;
            column += part.chars().count() + 1;
            let trimmed = part.trim();
            if trimmed.is_empty() {
                continue;
            }
            let (point, rest) = trimmed
                .split_once(':')
                .ok_or_else(|| Error::parse(1, here, format!("expected `point:key=value,...` in `{trimmed}`")))?;
            let mut a = None;
            let mut level = Level::Top;
            for kv in rest.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::parse(1, here, format!("expected key=value, got `{kv}`")))?;
                match k.trim() {
                    "a" => {
                        a = Some(v.trim().parse::<u64>().map_err(|e| Error::parse(1, here, format!("a: {e}")))?);
                    }
                    "level" => {
                        level = match v.trim() {
                            "top" => Level::Top,
                            n => Level::At(n.parse().map_err(|e| Error::parse(1, here, format!("level: {e}")))?),
                        };
                    }
                    "principal" => {
                        spec.principal = v.trim().parse().map_err(|e| Error::parse(1, here, format!("principal: {e}")))?;
                    }
                    other => return Err(Error::parse(1, here, format!("unknown key `{other}`"))),
                }
            }
            let a = a.ok_or_else(|| Error::parse(1, here, format!("missing a= for point {point}")))?;
            spec.entries.insert(point.trim().to_string(), StretchEntry { a, level });
        }
        Ok(spec)
    }
}

/// Where the chains went: `(base vertex, position in chain) -> new vertex`.
/// The base vertex of a `-1` insertion is the old root.
pub type ChainIndex = HashMap<(usize, usize), usize>;

fn resolve_level(point: &str, tree: &FiberTree, level: Level) -> Result<i64> {
    let h = tree.height();
    let l = match level {
        Level::Top => h as i64,
        Level::At(l) => l,
    };
    if l < -1 || l > h as i64 {
        return Err(Error::LevelOutOfRange {
            point: point.to_string(),
            level: l,
            height: h,
        });
    }
    Ok(l)
}

/// Stretches one tree; returns the new tree and the inserted chains.
pub fn stretch_tree(point: &str, tree: &FiberTree, entry: StretchEntry) -> Result<(FiberTree, ChainIndex)> {
    let level = resolve_level(point, tree, entry.level)?;
    let mut out = tree.clone();
    let mut chains = ChainIndex::new();
    let a = entry.a as usize;
    if a == 0 {
        return Ok((out, chains));
    }
    if level == -1 {
        let old_root = tree.root();
        out.add_weight(old_root, -1)?;
        // build upward from the old root: -2, ..., -2, then the (-1)-root
        for j in 0..a {
            let w = if j + 1 == a { -1 } else { -2 };
            let id = out.push_root(w);
            chains.insert((old_root, j), id);
        }
        return Ok((out, chains));
    }
    let levels = tree.levels();
    for v in (0..tree.len()).filter(|&v| levels[v] as i64 == level) {
        let kids = tree.children(v).to_vec();
        let s = kids.len() as i64;
        out.add_weight(v, -1)?;
        out.clear_children(v);
        let mut at = v;
        for j in 0..a {
            let w = if j + 1 == a { -1 - s } else { -2 };
            at = out.push_child(at, w);
            chains.insert((v, j), at);
        }
        for c in kids {
            out.adopt(at, c);
        }
    }
    Ok((out, chains))
}

/// Applies a stretching to a divisor, carrying equivariance maps along the
/// inserted chains.
pub fn stretch(d: &GraphDivisor, spec: &StretchSpec) -> Result<GraphDivisor> {
    for p in spec.entries.keys() {
        if !d.fibers.contains_key(p) {
            return Err(Error::UnknownPoint(p.clone()));
        }
    }
    let mut fibers = BTreeMap::new();
    let mut chains: BTreeMap<String, ChainIndex> = BTreeMap::new();
    for (p, tree) in &d.fibers {
        let (t, c) = match spec.entries.get(p) {
            Some(&entry) => stretch_tree(p, tree, entry)?,
            None => (tree.clone(), ChainIndex::new()),
        };
        fibers.insert(p.clone(), t);
        chains.insert(p.clone(), c);
    }
    let equivariance = match &d.equivariance {
        None => None,
        Some(eq) => {
            let mut out = BTreeMap::new();
            for (p, map) in eq {
                let Some(q) = d.base.image(p) else { continue };
                let (Some(cp), Some(cq)) = (chains.get(p), chains.get(q)) else {
                    continue;
                };
                let n = fibers[p].len();
                let mut new_map = vec![usize::MAX; n];
                new_map[..map.len()].copy_from_slice(map);
                for (&(v, j), &id) in cp {
                    let target = cq.get(&(map[v], j)).ok_or_else(|| {
                        Error::EquivarianceBroken(format!("stretching differs between {p} and its image {q}"))
                    })?;
                    new_map[id] = *target;
                }
                if cp.len() != cq.len() {
                    return Err(Error::EquivarianceBroken(format!(
                        "stretching differs between {p} and its image {q}"
                    )));
                }
                out.insert(p.clone(), new_map);
            }
            Some(out)
        }
    };
    Ok(GraphDivisor {
        base: d.base.clone(),
        fibers,
        equivariance,
    })
}

/// Number of vertices a stretching adds.
pub fn stretch_delta_v(d: &GraphDivisor, spec: &StretchSpec) -> Result<usize> {
    let mut total = 0;
    for (p, entry) in &spec.entries {
        let tree = d.fiber(p)?;
        let level = resolve_level(p, tree, entry.level)?;
        let sites = if level == -1 {
            1
        } else {
            tree.levels().iter().filter(|&&l| l as i64 == level).count()
        };
        total += entry.a as usize * sites;
    }
    Ok(total)
}
