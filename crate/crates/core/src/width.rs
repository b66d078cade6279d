//! Directed path, DAG and arboreal decompositions: validators, the path-to-arboreal
//! conversion, and exact directed path-width for small digraphs.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::digraph::{Digraph, GraphError, OutTree};

/// Default vertex limit for [`dpw_exact`].
pub const DEFAULT_DPW_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("bag {bag} contains vertex {vertex}, which is not in the digraph")]
    VertexOutOfRange { bag: usize, vertex: usize },
    #[error("vertex {0} is in no bag")]
    Uncovered(usize),
    #[error("arc ({0}, {1}): no bag of {0} precedes a bag of {1}")]
    ArcNotRespected(usize, usize),
    #[error("vertex {vertex} is in bags {from} and {to} but not in bag {via} between them")]
    NotConvex { vertex: usize, from: usize, via: usize, to: usize },
    #[error("index digraph has a directed cycle")]
    IndexCyclic,
    #[error("index digraph has {index} nodes but {bags} bags were given")]
    BagCountMismatch { index: usize, bags: usize },
    #[error("node bag {0} is empty")]
    EmptyNodeBag(usize),
    #[error("vertex {vertex} lies in node bags {first} and {second}")]
    NotPartition { vertex: usize, first: usize, second: usize },
    #[error("index tree nodes must be exactly 0..{0}")]
    IndexTreeNodes(usize),
    #[error("arc ({0}, {1}) of the index tree has no label")]
    MissingLabel(usize, usize),
    #[error("label on ({0}, {1}) is not on an arc of the index tree")]
    StrayLabel(usize, usize),
    #[error("below arc ({}, {}): vertex {vertex} is both in the subtree and in the arc label", .arc.0, .arc.1)]
    LabelMeetsSubtree { arc: (usize, usize), vertex: usize },
    #[error("below arc ({}, {}): a walk leaves the subtree through {escape} and returns avoiding the label", .arc.0, .arc.1)]
    NotNormal { arc: (usize, usize), escape: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WidthError {
    #[error("S and Z share vertex {0}")]
    Overlap(usize),
    #[error("digraph of order {order} exceeds the dpw search cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("input decomposition is invalid: {0}")]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn normalize(bag: Vec<usize>) -> Vec<usize> {
    let mut bag = bag;
    bag.sort_unstable();
    bag.dedup();
    bag
}

fn width_of<'a>(bags: impl Iterator<Item = &'a Vec<usize>>) -> usize {
    bags.map(Vec::len).max().unwrap_or(0).saturating_sub(1)
}

fn check_range(d: &Digraph, bags: &[Vec<usize>]) -> Result<(), Violation> {
    for (i, bag) in bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| !d.contains_vertex(v)) {
            return Err(Violation::VertexOutOfRange { bag: i, vertex: v });
        }
    }
    Ok(())
}

/// Directed path decomposition: a sequence of bags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathDecomposition {
    bags: Vec<Vec<usize>>,
}

impl PathDecomposition {
    /// Bags are stored sorted and deduplicated.
    pub fn new(bags: Vec<Vec<usize>>) -> Self {
        PathDecomposition { bags: bags.into_iter().map(normalize).collect() }
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn width(&self) -> usize {
        width_of(self.bags.iter())
    }

    /// The same bags on the index path `0 -> 1 -> … -> m-1`.
    pub fn to_dag_decomposition(&self) -> DagDecomposition {
        let m = self.bags.len();
        let index = Digraph::new(m, (1..m).map(|i| (i - 1, i))).expect("path index");
        DagDecomposition { index, bags: self.bags.clone() }
    }

    /// Drops every bag contained in the previously kept bag.
    pub fn without_redundant_bags(&self) -> PathDecomposition {
        let mut kept: Vec<Vec<usize>> = Vec::new();
        for bag in &self.bags {
            let redundant = match kept.last() {
                Some(prev) => bag.iter().all(|v| prev.binary_search(v).is_ok()),
                None => bag.is_empty(),
            };
            if !redundant {
                kept.push(bag.clone());
            }
        }
        PathDecomposition { bags: kept }
    }
}

/// Checks cover, arc order and convexity; returns the width.
///
/// On a path, an arc `(u, v)` is respected iff the first bag of `u` is not after
/// the last bag of `v`, and convexity means every vertex's bags are consecutive.
pub fn validate_dpd(d: &Digraph, dec: &PathDecomposition) -> Result<usize, Violation> {
    check_range(d, &dec.bags)?;
    let n = d.order();
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0; n];
    for (i, bag) in dec.bags.iter().enumerate() {
        for &v in bag {
            if first[v] == usize::MAX {
                first[v] = i;
            } else if last[v] + 1 != i {
                return Err(Violation::NotConvex { vertex: v, from: last[v], via: last[v] + 1, to: i });
            }
            last[v] = i;
        }
    }
    if let Some(v) = (0..n).find(|&v| first[v] == usize::MAX) {
        return Err(Violation::Uncovered(v));
    }
    if let Some(&(u, v)) = d.arcs().iter().find(|&&(u, v)| first[u] > last[v]) {
        return Err(Violation::ArcNotRespected(u, v));
    }
    Ok(dec.width())
}

/// DAG decomposition: an acyclic index digraph with one bag per index node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagDecomposition {
    pub index: Digraph,
    pub bags: Vec<Vec<usize>>,
}

impl DagDecomposition {
    pub fn new(index: Digraph, bags: Vec<Vec<usize>>) -> Self {
        DagDecomposition { index, bags: bags.into_iter().map(normalize).collect() }
    }

    pub fn width(&self) -> usize {
        width_of(self.bags.iter())
    }
}

/// Checks the three DAG-decomposition conditions; returns the width.
///
/// Arc condition is existential: some bag of `u` reaches (or is) some bag of `v`.
pub fn validate_dagd(d: &Digraph, dec: &DagDecomposition) -> Result<usize, Violation> {
    let m = dec.index.order();
    if dec.bags.len() != m {
        return Err(Violation::BagCountMismatch { index: m, bags: dec.bags.len() });
    }
    if !dec.index.is_acyclic() {
        return Err(Violation::IndexCyclic);
    }
    check_range(d, &dec.bags)?;
    let reach: Vec<Vec<bool>> = (0..m).map(|h| dec.index.reachable_from(h)).collect();
    let n = d.order();
    let mut holders = vec![Vec::new(); n];
    for (h, bag) in dec.bags.iter().enumerate() {
        for &v in bag {
            holders[v].push(h);
        }
    }
    if let Some(v) = (0..n).find(|&v| holders[v].is_empty()) {
        return Err(Violation::Uncovered(v));
    }
    for &(u, v) in d.arcs() {
        if !holders[u].iter().any(|&a| holders[v].iter().any(|&b| reach[a][b])) {
            return Err(Violation::ArcNotRespected(u, v));
        }
    }
    for (vertex, held) in holders.iter().enumerate() {
        for &from in held {
            for &to in held {
                if from == to || !reach[from][to] {
                    continue;
                }
                if let Some(via) =
                    (0..m).find(|&h| reach[from][h] && reach[h][to] && dec.bags[h].binary_search(&vertex).is_err())
                {
                    return Err(Violation::NotConvex { vertex, from, via, to });
                }
            }
        }
    }
    Ok(dec.width())
}

/// Arboreal decomposition over an index out-tree on nodes `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArborealDecomposition {
    pub tree: OutTree,
    /// label `X_e` per tree arc `e`
    pub arc_labels: BTreeMap<(usize, usize), Vec<usize>>,
    /// node bag `W_r` per node `r`
    pub node_bags: Vec<Vec<usize>>,
}

impl ArborealDecomposition {
    pub fn new(tree: OutTree, arc_labels: BTreeMap<(usize, usize), Vec<usize>>, node_bags: Vec<Vec<usize>>) -> Self {
        ArborealDecomposition {
            tree,
            arc_labels: arc_labels.into_iter().map(|(e, x)| (e, normalize(x))).collect(),
            node_bags: node_bags.into_iter().map(normalize).collect(),
        }
    }

    /// `max_r |W_r ∪ labels of arcs at r| - 1`.
    pub fn width(&self) -> usize {
        (0..self.node_bags.len())
            .map(|r| {
                let mut set: BTreeSet<usize> = self.node_bags[r].iter().copied().collect();
                for (&(a, b), x) in &self.arc_labels {
                    if a == r || b == r {
                        set.extend(x.iter().copied());
                    }
                }
                set.len()
            })
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Union of node bags over the subtree rooted at `r` (the nodes `>= r`).
    pub fn subtree_union(&self, r: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            out.extend(self.node_bags[x].iter().copied());
            stack.extend(self.tree.children(x).iter().copied());
        }
        out
    }
}

/// Whether no directed walk leaves `s` and comes back without touching `z`.
///
/// Equivalently: in `d - z`, no vertex outside `s` that is reachable from `s` can reach `s`.
pub fn is_z_normal(d: &Digraph, s: &BTreeSet<usize>, z: &BTreeSet<usize>) -> Result<bool, WidthError> {
    if let Some(&v) = s.intersection(z).next() {
        return Err(WidthError::Overlap(v));
    }
    Ok(normality_escape(d, s, z).is_none())
}

/// A vertex outside `s ∪ z`, reachable from `s` in `d - z`, with an arc back into `s`.
fn normality_escape(d: &Digraph, s: &BTreeSet<usize>, z: &BTreeSet<usize>) -> Option<usize> {
    let n = d.order();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = s.iter().copied().filter(|&v| v < n).collect();
    for &v in &stack {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &w in d.out_neighbors(v) {
            if !seen[w] && !z.contains(&w) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..n).find(|&w| seen[w] && !s.contains(&w) && d.out_neighbors(w).iter().any(|x| s.contains(x)))
}

/// Checks the partition and normality conditions; returns the width.
pub fn validate_arboreal(d: &Digraph, dec: &ArborealDecomposition) -> Result<usize, Violation> {
    let m = dec.node_bags.len();
    if dec.tree.len() != m || dec.tree.vertices().enumerate().any(|(i, r)| i != r) {
        return Err(Violation::IndexTreeNodes(m));
    }
    check_range(d, &dec.node_bags)?;
    let mut owner = vec![None; d.order()];
    for (r, bag) in dec.node_bags.iter().enumerate() {
        if bag.is_empty() {
            return Err(Violation::EmptyNodeBag(r));
        }
        for &v in bag {
            if let Some(first) = owner[v] {
                return Err(Violation::NotPartition { vertex: v, first, second: r });
            }
            owner[v] = Some(r);
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return Err(Violation::Uncovered(v));
    }
    let arcs = dec.tree.arcs();
    if let Some(&(a, b)) = dec.arc_labels.keys().find(|e| arcs.binary_search(e).is_err()) {
        return Err(Violation::StrayLabel(a, b));
    }
    for (i, (_, x)) in dec.arc_labels.iter().enumerate() {
        if let Some(&v) = x.iter().find(|&&v| !d.contains_vertex(v)) {
            return Err(Violation::VertexOutOfRange { bag: m + i, vertex: v });
        }
    }
    for &(a, b) in &arcs {
        let label = dec.arc_labels.get(&(a, b)).ok_or(Violation::MissingLabel(a, b))?;
        let z: BTreeSet<usize> = label.iter().copied().collect();
        let s = dec.subtree_union(b);
        if let Some(&v) = s.intersection(&z).next() {
            return Err(Violation::LabelMeetsSubtree { arc: (a, b), vertex: v });
        }
        if let Some(escape) = normality_escape(d, &s, &z) {
            return Err(Violation::NotNormal { arc: (a, b), escape });
        }
    }
    Ok(dec.width())
}

/// Turns a directed path decomposition `Y_1 … Y_m` into an arboreal decomposition on the
/// path `0 -> 1 -> …`: `W_1 = Y_1`, `W_i = Y_i \ Y_{i-1}`, `X_(i,i+1) = Y_i ∩ Y_{i+1}`.
/// Bags contained in their predecessor are dropped first so that no `W_i` is empty.
pub fn dpd_to_arboreal(d: &Digraph, dec: &PathDecomposition) -> Result<ArborealDecomposition, WidthError> {
    validate_dpd(d, dec)?;
    let bags = dec.without_redundant_bags().bags;
    let m = bags.len();
    let mut node_bags = Vec::with_capacity(m);
    let mut labels = BTreeMap::new();
    for i in 0..m {
        let fresh = match i {
            0 => bags[0].clone(),
            _ => bags[i].iter().copied().filter(|v| bags[i - 1].binary_search(v).is_err()).collect(),
        };
        node_bags.push(fresh);
        if i + 1 < m {
            let shared = bags[i].iter().copied().filter(|v| bags[i + 1].binary_search(v).is_ok()).collect();
            labels.insert((i, i + 1), shared);
        }
    }
    let tree = OutTree::from_arcs(0, (1..m).map(|i| (i - 1, i))).expect("index path");
    Ok(ArborealDecomposition::new(tree, labels, node_bags))
}

/// Exact directed path-width with a witness, for digraphs up to [`DEFAULT_DPW_CAP`] vertices.
pub fn dpw_exact(d: &Digraph) -> Result<(usize, PathDecomposition), WidthError> {
    dpw_exact_with_cap(d, DEFAULT_DPW_CAP)
}

/// Dynamic program over the set `I` of introduced vertices.
///
/// A vertex stays in the active bag until all its in-neighbours are introduced;
/// introducing `v` after `I` creates the bag `active(I) ∪ {v}`. Closing a vertex as
/// early as allowed never hurts, so the width is the min over introduction orders
/// of the largest such bag, minus one. Among optimal orders the one choosing the
/// smallest vertex at each step is returned.
pub fn dpw_exact_with_cap(d: &Digraph, cap: usize) -> Result<(usize, PathDecomposition), WidthError> {
    let n = d.order();
    if n > cap || n > 30 {
        return Err(WidthError::CapExceeded { order: n, cap: cap.min(30) });
    }
    if n == 0 {
        return Ok((0, PathDecomposition::new(Vec::new())));
    }
    let in_masks = d.in_masks()?;
    let full: u32 = (1u32 << n) - 1;
    let active = |set: u32| -> u32 {
        (0..n).filter(|&v| set >> v & 1 == 1 && in_masks[v] as u32 & !set != 0).fold(0, |m, v| m | 1 << v)
    };
    let active_size: Vec<u8> = (0..=full).map(|s| active(s).count_ones() as u8).collect();

    // rest[s] = smallest achievable max bag size when finishing from s
    let mut rest = vec![0u8; 1 << n];
    for s in (0..full).rev() {
        let step = active_size[s as usize] + 1;
        rest[s as usize] = (0..n)
            .filter(|&v| s >> v & 1 == 0)
            .map(|v| step.max(rest[(s | 1 << v) as usize]))
            .min()
            .expect("s is not full");
    }

    let mut bags = Vec::with_capacity(n);
    let mut s = 0u32;
    while s != full {
        let target = rest[s as usize];
        let step = active_size[s as usize] + 1;
        let v = (0..n)
            .find(|&v| s >> v & 1 == 0 && step.max(rest[(s | 1 << v) as usize]) == target)
            .expect("an optimal move exists");
        let mut bag: Vec<usize> = (0..n).filter(|&w| active(s) >> w & 1 == 1).collect();
        bag.push(v);
        bags.push(bag);
        s |= 1 << v;
    }
    let width = rest[0] as usize - 1;
    Ok((width, PathDecomposition::new(bags)))
}
