//! Exact minimum-leaf out-branching solvers.
//!
//! [`min_leaf_brute_force`] searches parent assignments directly and serves as the
//! reference. [`check_k_leaves_contraction`] decides "at most `k` leaves" by
//! guessing the contraction of an optimal out-branching (a small out-tree on at
//! most `2k` key vertices) and asking the linkage oracle to realise each of its
//! arcs as a path, the paths jointly covering the digraph.

use rayon::prelude::*;
use thiserror::Error;

use crate::digraph::{any_out_branching, bits, has_out_branching, Digraph, GraphError, OutTree};
use crate::linkage::{solve_cover_linkage, LinkageQuery};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    NoOutBranching,
    Optimal { min_leaves: usize, witness: OutTree },
}

impl SolveResult {
    pub fn min_leaves(&self) -> Option<usize> {
        match self {
            SolveResult::NoOutBranching => None,
            SolveResult::Optimal { min_leaves, .. } => Some(*min_leaves),
        }
    }

    pub fn witness(&self) -> Option<&OutTree> {
        match self {
            SolveResult::NoOutBranching => None,
            SolveResult::Optimal { witness, .. } => Some(witness),
        }
    }
}

/// Answer to "does the digraph have an out-branching with at most `k` leaves?".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KLeafDecision {
    pub k: usize,
    pub witness: Option<OutTree>,
}

impl KLeafDecision {
    pub fn answer(&self) -> bool {
        self.witness.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("leaf bound k must be at least 1")]
    ZeroK,
    #[error("cannot enumerate out-trees on an empty vertex set")]
    EmptyVertexSet,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exact minimum number of leaves over all out-branchings of `d`.
pub fn min_leaf_brute_force(d: &Digraph) -> Result<SolveResult, GraphError> {
    min_leaf_brute_force_below(d, d.order() + 1)
}

/// As [`min_leaf_brute_force`], but only looks for out-branchings with fewer than
/// `bound` leaves; reports [`SolveResult::NoOutBranching`] when none exists.
pub fn min_leaf_brute_force_below(d: &Digraph, bound: usize) -> Result<SolveResult, GraphError> {
    let Some(roots) = has_out_branching(d)? else {
        return Ok(SolveResult::NoOutBranching);
    };
    let mut search = BruteForce::new(d, bound);
    for root in roots {
        if search.best_leaves == 1 {
            break;
        }
        search.run(root);
    }
    Ok(match search.best {
        Some(witness) => SolveResult::Optimal { min_leaves: search.best_leaves, witness },
        None => SolveResult::NoOutBranching,
    })
}

struct BruteForce<'a> {
    d: &'a Digraph,
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    children: Vec<usize>,
    /// out-neighbours (other than the root) still waiting for a parent
    pending: Vec<usize>,
    /// vertices that can no longer receive a child and have none
    settled_leaves: usize,
    root: usize,
    best_leaves: usize,
    best: Option<OutTree>,
}

impl<'a> BruteForce<'a> {
    fn new(d: &'a Digraph, bound: usize) -> Self {
        let n = d.order();
        BruteForce {
            d,
            order: Vec::new(),
            parent: vec![None; n],
            children: vec![0; n],
            pending: vec![0; n],
            settled_leaves: 0,
            root: 0,
            best_leaves: bound,
            best: None,
        }
    }

    fn run(&mut self, root: usize) {
        let d = self.d;
        self.root = root;
        // BFS order so that parents tend to be placed before their children
        let mut seen = vec![false; d.order()];
        seen[root] = true;
        self.order = vec![root];
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            for &w in d.out_neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    self.order.push(w);
                }
            }
        }
        debug_assert_eq!(self.order.len(), d.order());
        self.parent.fill(None);
        self.children.fill(0);
        for v in d.vertices() {
            self.pending[v] = d.out_neighbors(v).iter().filter(|&&w| w != root).count();
        }
        self.settled_leaves = d.vertices().filter(|&v| self.pending[v] == 0).count();
        self.assign(1);
    }

    fn assign(&mut self, idx: usize) {
        if self.settled_leaves >= self.best_leaves {
            return;
        }
        let d = self.d;
        if idx == self.order.len() {
            self.best_leaves = self.settled_leaves;
            let parents = d.vertices().filter_map(|v| self.parent[v].map(|p| (v, p))).collect();
            self.best = Some(OutTree::from_parents(self.root, parents).expect("acyclic parent assignment"));
            return;
        }
        let v = self.order[idx];
        for &p in d.in_neighbors(v) {
            if self.closes_cycle(p, v) {
                continue;
            }
            self.parent[v] = Some(p);
            self.children[p] += 1;
            for &w in d.in_neighbors(v) {
                self.pending[w] -= 1;
                if self.pending[w] == 0 && self.children[w] == 0 {
                    self.settled_leaves += 1;
                }
            }
            self.assign(idx + 1);
            for &w in d.in_neighbors(v) {
                if self.pending[w] == 0 && self.children[w] == 0 {
                    self.settled_leaves -= 1;
                }
                self.pending[w] += 1;
            }
            self.children[p] -= 1;
            self.parent[v] = None;
            if self.best_leaves == 1 {
                return;
            }
        }
    }

    fn closes_cycle(&self, p: usize, v: usize) -> bool {
        let mut cur = p;
        loop {
            if cur == v {
                return true;
            }
            match self.parent[cur] {
                Some(next) => cur = next,
                None => return false,
            }
        }
    }
}

/// All rooted out-trees on the vertex set `y` with at most `leaf_cap` leaves.
///
/// Trees are not tied to any digraph. Order: by root position in `y`, then by the
/// parent assignment of the non-root vertices read as an odometer. Without a cap
/// there are `|y|^(|y|-1)` of them.
pub fn enumerate_out_trees(y: &[usize], leaf_cap: usize) -> Result<OutTrees, SolverError> {
    if y.is_empty() {
        return Err(SolverError::EmptyVertexSet);
    }
    let mut vertices = y.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(OutTrees::new(vertices, leaf_cap))
}

/// Iterator returned by [`enumerate_out_trees`].
pub struct OutTrees {
    vertices: Vec<usize>,
    leaf_cap: usize,
    root: usize,
    /// parent position (into `vertices`) for each position; the root's entry is ignored
    choice: Vec<usize>,
    exhausted: bool,
}

impl OutTrees {
    fn new(vertices: Vec<usize>, leaf_cap: usize) -> Self {
        let m = vertices.len();
        let mut it = OutTrees { vertices, leaf_cap, root: 0, choice: vec![0; m], exhausted: false };
        it.reset_choices();
        it
    }

    fn reset_choices(&mut self) {
        for pos in 0..self.choice.len() {
            self.choice[pos] = if pos == 0 { 1 } else { 0 };
        }
    }

    /// Advances the odometer, skipping self-parent digits; false when all roots are done.
    fn advance(&mut self) -> bool {
        let m = self.vertices.len();
        for pos in (0..m).rev() {
            if pos == self.root {
                continue;
            }
            let mut next = self.choice[pos] + 1;
            if next == pos {
                next += 1;
            }
            if next < m {
                self.choice[pos] = next;
                return true;
            }
            self.choice[pos] = if pos == 0 { 1 } else { 0 };
        }
        self.root += 1;
        self.root < m
    }

    fn current(&self) -> Option<OutTree> {
        let m = self.vertices.len();
        // every vertex must reach the root by following parents
        let mut state = vec![0u8; m]; // 0 unknown, 1 on stack, 2 reaches root
        state[self.root] = 2;
        for start in 0..m {
            let mut cur = start;
            let mut trail = Vec::new();
            while state[cur] == 0 {
                state[cur] = 1;
                trail.push(cur);
                cur = self.choice[cur];
            }
            if state[cur] == 1 {
                return None;
            }
            for v in trail {
                state[v] = 2;
            }
        }
        let mut has_child = vec![false; m];
        for pos in (0..m).filter(|&p| p != self.root) {
            has_child[self.choice[pos]] = true;
        }
        if has_child.iter().filter(|&&c| !c).count() > self.leaf_cap {
            return None;
        }
        let arcs = (0..m).filter(|&p| p != self.root).map(|p| (self.vertices[self.choice[p]], self.vertices[p]));
        Some(OutTree::from_arcs(self.vertices[self.root], arcs).expect("checked acyclic"))
    }
}

impl Iterator for OutTrees {
    type Item = OutTree;

    fn next(&mut self) -> Option<OutTree> {
        while !self.exhausted {
            let tree = self.current();
            if !self.advance() {
                self.exhausted = true;
            }
            if tree.is_some() {
                return tree;
            }
        }
        None
    }
}

/// Decides whether `d` has an out-branching with at most `k` leaves by
/// enumerating candidate contractions and realising them with the linkage oracle.
pub fn check_k_leaves_contraction(d: &Digraph, k: usize) -> Result<KLeafDecision, SolverError> {
    check_k_leaves_contraction_with(d, k, true)
}

/// As [`check_k_leaves_contraction`]; `prune_unary` toggles skipping candidate trees
/// with a non-root vertex of out-degree exactly 1 (no contraction has one).
pub fn check_k_leaves_contraction_with(d: &Digraph, k: usize, prune_unary: bool) -> Result<KLeafDecision, SolverError> {
    if k == 0 {
        return Err(SolverError::ZeroK);
    }
    let n = d.order();
    if k >= n {
        return Ok(KLeafDecision { k, witness: any_out_branching(d)? });
    }
    let Some(source) = has_out_branching(d)? else {
        return Ok(KLeafDecision { k, witness: None });
    };
    d.check_bitset_order()?;

    let reach: Vec<Vec<bool>> = d.vertices().map(|v| d.reachable_from(v)).collect();
    let sinks = d.vertices().filter(|&v| d.out_degree(v) == 0).fold(0u64, |m, v| m | 1 << v);
    let source_mask = source.iter().fold(0u64, |m, &v| m | 1 << v);
    if sinks.count_ones() as usize > k {
        return Ok(KLeafDecision { k, witness: None });
    }

    let try_subset = |y: u64| -> Option<OutTree> {
        let members: Vec<usize> = bits(y).collect();
        let trees = enumerate_out_trees(&members, k).expect("nonempty subset");
        for t in trees {
            if source_mask & (1 << t.root()) == 0 {
                continue;
            }
            if prune_unary && members.iter().any(|&v| v != t.root() && t.out_degree(v) == 1) {
                continue;
            }
            let demands = t.arcs();
            if demands.is_empty() || demands.iter().any(|&(a, b)| !reach[a][b]) {
                continue;
            }
            let query = LinkageQuery::new(demands).expect("tree arcs are proper");
            let solution = solve_cover_linkage(d, &query).expect("vertices in range");
            if let Some(sol) = solution {
                let witness = sol.to_out_tree(t.root()).expect("restricted linkage of a tree is an out-tree");
                debug_assert_eq!(witness.leaf_count(), t.leaf_count());
                return Some(witness);
            }
        }
        None
    };

    for size in 2..=(2 * k).min(n) {
        let subsets: Vec<u64> =
            subsets_of_size(n, size).filter(|&y| y & sinks == sinks && y & source_mask != 0).collect();
        if let Some(witness) = subsets.par_iter().find_map_first(|&y| try_subset(y)) {
            return Ok(KLeafDecision { k, witness: Some(witness) });
        }
    }
    Ok(KLeafDecision { k, witness: None })
}

/// Minimum leaf count via increasing `k` in [`check_k_leaves_contraction`].
pub fn min_leaf_contraction(d: &Digraph) -> Result<SolveResult, SolverError> {
    if has_out_branching(d)?.is_none() {
        return Ok(SolveResult::NoOutBranching);
    }
    for k in 1..=d.order() {
        if let Some(witness) = check_k_leaves_contraction(d, k)?.witness {
            return Ok(SolveResult::Optimal { min_leaves: witness.leaf_count(), witness });
        }
    }
    unreachable!("an out-branching has at most n leaves")
}

/// `size`-subsets of `0..n` as bitmasks in lexicographic order of their sorted members.
fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    let mut idx: Vec<usize> = (0..size).collect();
    let mut done = size > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mask = idx.iter().fold(0u64, |m, &v| m | 1 << v);
        // next combination
        let mut i = size;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(mask)
    })
}
