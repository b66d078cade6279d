//! Digraphs on dense vertex ids, out-trees, and the out-branching existence test.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

/// Largest order handled by the bitset-based searches.
pub const MAX_BITSET_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a digraph of order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("digraph is empty")]
    Empty,
    #[error("digraph of order {order} exceeds the limit of {limit} vertices for this search")]
    TooLarge { order: usize, limit: usize },
}

/// A simple digraph on vertices `0..n`.
///
/// Arcs are stored sorted and deduplicated; adjacency lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a digraph, collapsing parallel arcs and rejecting self-loops.
    pub fn new<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (u, v) in arcs {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, order: n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push((u, v));
        }
        list.sort_unstable();
        list.dedup();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in &list {
            out[u].push(v);
            inn[v].push(u);
        }
        for adj in &mut inn {
            adj.sort_unstable();
        }
        Ok(Digraph { n, arcs: list, out, inn })
    }

    pub fn empty(n: usize) -> Self {
        Digraph { n, arcs: Vec::new(), out: vec![Vec::new(); n], inn: vec![Vec::new(); n] }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && self.out[u].binary_search(&v).is_ok()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        v < self.n
    }

    /// Out-neighbourhoods as bitmasks. Fails above [`MAX_BITSET_ORDER`].
    pub fn out_masks(&self) -> Result<Vec<u64>, GraphError> {
        self.check_bitset_order()?;
        Ok(self.out.iter().map(|adj| mask_of(adj.iter().copied())).collect())
    }

    pub fn in_masks(&self) -> Result<Vec<u64>, GraphError> {
        self.check_bitset_order()?;
        Ok(self.inn.iter().map(|adj| mask_of(adj.iter().copied())).collect())
    }

    pub(crate) fn check_bitset_order(&self) -> Result<(), GraphError> {
        if self.n > MAX_BITSET_ORDER {
            Err(GraphError::TooLarge { order: self.n, limit: MAX_BITSET_ORDER })
        } else {
            Ok(())
        }
    }

    /// Vertices reachable from `start` (including `start`).
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.out[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Kahn's algorithm; `None` when the digraph has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.inn.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &self.out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// The subdigraph induced by `keep`, with vertices renumbered in ascending order.
    pub fn induced(&self, keep: &[usize]) -> Digraph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let arcs = self
            .arcs
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Digraph::new(keep.len(), arcs).expect("induced subgraph of a valid digraph")
    }
}

pub(crate) fn mask_of<I: IntoIterator<Item = usize>>(vertices: I) -> u64 {
    vertices.into_iter().fold(0u64, |m, v| m | (1u64 << v))
}

/// Iterates the set bits of `mask` in ascending order.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// Strongly connected components and the ones without incoming arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondensationReport {
    /// Components, each sorted, listed by smallest member.
    pub components: Vec<Vec<usize>>,
    /// Indices into `components` of the components with no arc entering from outside.
    pub source_components: Vec<usize>,
}

impl CondensationReport {
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.binary_search(&v).is_ok())
    }
}

/// Kosaraju's algorithm, iterative.
pub fn condensation(d: &Digraph) -> CondensationReport {
    let n = d.order();
    let mut finished = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for s in 0..n {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if let Some(&w) = d.out_neighbors(v).get(*next) {
                *next += 1;
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                finished.push(v);
                stack.pop();
            }
        }
    }

    let mut comp = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for &s in finished.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in d.in_neighbors(v) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }

    // renumber components by smallest member
    let mut order: Vec<usize> = (0..components.len()).collect();
    order.sort_by_key(|&c| components[c][0]);
    let mut rank = vec![0; components.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut has_entry = vec![false; components.len()];
    for &(u, v) in d.arcs() {
        if comp[u] != comp[v] {
            has_entry[rank[comp[v]]] = true;
        }
    }
    let components: Vec<Vec<usize>> = order.into_iter().map(|c| std::mem::take(&mut components[c])).collect();
    let source_components = (0..components.len()).filter(|&c| !has_entry[c]).collect();
    CondensationReport { components, source_components }
}

/// Whether `d` has an out-branching; if so, returns the unique source component,
/// any vertex of which can serve as the root.
pub fn has_out_branching(d: &Digraph) -> Result<Option<Vec<usize>>, GraphError> {
    if d.order() == 0 {
        return Err(GraphError::Empty);
    }
    let report = condensation(d);
    Ok(match report.source_components.as_slice() {
        [single] => Some(report.components[*single].clone()),
        _ => None,
    })
}

/// A BFS out-branching rooted at the smallest vertex of the source component.
pub fn any_out_branching(d: &Digraph) -> Result<Option<OutTree>, GraphError> {
    let Some(source) = has_out_branching(d)? else {
        return Ok(None);
    };
    let root = source[0];
    let mut parent = BTreeMap::new();
    let mut seen = vec![false; d.order()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in d.out_neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    Ok(Some(OutTree::from_parents(root, parent).expect("BFS tree is an out-tree")))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("vertex {0} has more than one parent")]
    MultipleParents(usize),
    #[error("root {0} has a parent")]
    RootHasParent(usize),
    #[error("arc ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("vertex {0} is not reachable from the root (cycle or second root)")]
    Unreachable(usize),
}

/// A rooted out-tree: every non-root vertex has exactly one parent and is reachable from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutTree {
    root: usize,
    parent: BTreeMap<usize, usize>,
    children: BTreeMap<usize, Vec<usize>>,
}

impl OutTree {
    pub fn singleton(root: usize) -> Self {
        OutTree { root, parent: BTreeMap::new(), children: BTreeMap::from([(root, Vec::new())]) }
    }

    pub fn from_arcs<I>(root: usize, arcs: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut parent = BTreeMap::new();
        for (u, v) in arcs {
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            if v == root {
                return Err(TreeError::RootHasParent(root));
            }
            if parent.insert(v, u).is_some() {
                return Err(TreeError::MultipleParents(v));
            }
        }
        Self::from_parents(root, parent)
    }

    pub fn from_parents(root: usize, parent: BTreeMap<usize, usize>) -> Result<Self, TreeError> {
        if parent.contains_key(&root) {
            return Err(TreeError::RootHasParent(root));
        }
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::from([(root, Vec::new())]);
        for (&v, &p) in &parent {
            if v == p {
                return Err(TreeError::SelfLoop(v));
            }
            children.entry(v).or_default();
            children.entry(p).or_default().push(v);
        }
        // every vertex (including parents that never appear as children) must be reached from the root
        let mut reached = BTreeSet::from([root]);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &c in &children[&v] {
                if reached.insert(c) {
                    stack.push(c);
                }
            }
        }
        if let Some(&v) = children.keys().find(|v| !reached.contains(v)) {
            return Err(TreeError::Unreachable(v));
        }
        Ok(OutTree { root, parent, children })
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: usize) -> bool {
        self.children.contains_key(&v)
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.children.keys().copied()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(&v).copied()
    }

    pub fn parents(&self) -> &BTreeMap<usize, usize> {
        &self.parent
    }

    /// Children of `v` in ascending order (empty if `v` is not in the tree).
    pub fn children(&self, v: usize) -> &[usize] {
        self.children.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.children(v).len()
    }

    /// Arcs sorted by (parent, child).
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<_> = self.parent.iter().map(|(&v, &p)| (p, v)).collect();
        arcs.sort_unstable();
        arcs
    }

    pub fn leaves(&self) -> Vec<usize> {
        self.children.iter().filter(|(_, c)| c.is_empty()).map(|(&v, _)| v).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.children.values().filter(|c| c.is_empty()).count()
    }

    pub fn branching_vertices(&self) -> Vec<usize> {
        self.children.iter().filter(|(_, c)| c.len() >= 2).map(|(&v, _)| v).collect()
    }

    /// Root, leaves and branching vertices: the vertices kept by [`OutTree::contract`].
    pub fn key_vertices(&self) -> BTreeSet<usize> {
        self.children.iter().filter(|(&v, c)| v == self.root || c.len() != 1).map(|(&v, _)| v).collect()
    }

    /// Replaces every maximal path whose internal vertices have out-degree 1
    /// by a single arc between its key-vertex endpoints.
    pub fn contract(&self) -> OutTree {
        let keep = self.key_vertices();
        let mut arcs = Vec::new();
        for &x in &keep {
            for &c in self.children(x) {
                let mut cur = c;
                while !keep.contains(&cur) {
                    cur = self.children(cur)[0];
                }
                arcs.push((x, cur));
            }
        }
        OutTree::from_arcs(self.root, arcs).expect("contraction of an out-tree is an out-tree")
    }

    /// Vertices of the tree path from the root down to `v`, inclusive.
    pub fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchingError {
    #[error("vertex {0} is not covered by the out-tree")]
    NotSpanning(usize),
    #[error("tree vertex {vertex} is not a vertex of the digraph (order {order})")]
    VertexOutOfRange { vertex: usize, order: usize },
    #[error("arc ({0}, {1}) is not an arc of the digraph")]
    ArcAbsent(usize, usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Checks that `t` is an out-branching of `d` and returns its number of leaves.
pub fn validate_out_branching(d: &Digraph, t: &OutTree) -> Result<usize, BranchingError> {
    if let Some(v) = t.vertices().find(|&v| v >= d.order()) {
        return Err(BranchingError::VertexOutOfRange { vertex: v, order: d.order() });
    }
    if let Some(v) = d.vertices().find(|&v| !t.contains(v)) {
        return Err(BranchingError::NotSpanning(v));
    }
    if let Some((u, v)) = t.arcs().into_iter().find(|&(u, v)| !d.has_arc(u, v)) {
        return Err(BranchingError::ArcAbsent(u, v));
    }
    Ok(t.leaf_count())
}

/// Validates `t` against `d`, then contracts it onto its key vertices.
pub fn contract_branching(d: &Digraph, t: &OutTree) -> Result<OutTree, BranchingError> {
    validate_out_branching(d, t)?;
    Ok(t.contract())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Digraph {
        Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn build_dedups_and_rejects_bad_arcs() {
        let d = Digraph::new(2, [(0, 1), (0, 1)]).unwrap();
        assert_eq!(d.arcs(), &[(0, 1)]);
        assert_eq!(Digraph::new(2, [(0, 0)]), Err(GraphError::SelfLoop(0)));
        assert_eq!(Digraph::new(2, [(0, 2)]), Err(GraphError::VertexOutOfRange { vertex: 2, order: 2 }));
        let d = c3();
        assert_eq!(d.arcs(), &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(d.in_neighbors(0), &[2]);
    }

    #[test]
    fn existence_criterion() {
        assert_eq!(has_out_branching(&c3()).unwrap(), Some(vec![0, 1, 2]));
        assert_eq!(has_out_branching(&Digraph::empty(2)).unwrap(), None);
        let path = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(has_out_branching(&path).unwrap(), Some(vec![0]));
        assert_eq!(has_out_branching(&Digraph::empty(0)), Err(GraphError::Empty));
    }

    #[test]
    fn condensation_sources() {
        // {0,1} -> {2,3} <- {4}
        let d = Digraph::new(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2), (4, 3)]).unwrap();
        let r = condensation(&d);
        assert_eq!(r.components, vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(r.source_components, vec![0, 2]);
        assert_eq!(has_out_branching(&d).unwrap(), None);
    }

    #[test]
    fn validate_examples() {
        let path = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let t = OutTree::from_arcs(0, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(validate_out_branching(&path, &t), Ok(1));

        let star = Digraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let t = OutTree::from_arcs(0, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(validate_out_branching(&star, &t), Ok(3));

        let t = OutTree::from_arcs(0, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(validate_out_branching(&c3(), &t), Err(BranchingError::ArcAbsent(0, 2)));

        let t = OutTree::from_arcs(0, [(0, 1)]).unwrap();
        assert_eq!(validate_out_branching(&c3(), &t), Err(BranchingError::NotSpanning(2)));
    }

    #[test]
    fn malformed_trees_rejected() {
        assert_eq!(OutTree::from_arcs(0, [(0, 1), (2, 1)]), Err(TreeError::MultipleParents(1)));
        assert_eq!(OutTree::from_arcs(0, [(1, 0)]), Err(TreeError::RootHasParent(0)));
        // 1 -> 2 -> 1 detached from the root
        assert_eq!(OutTree::from_arcs(0, [(1, 2), (2, 1)]), Err(TreeError::Unreachable(1)));
        // second root
        assert_eq!(OutTree::from_arcs(0, [(0, 1), (3, 2)]), Err(TreeError::Unreachable(2)));
    }

    #[test]
    fn single_vertex_tree_has_one_leaf() {
        let t = OutTree::singleton(0);
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(validate_out_branching(&Digraph::empty(1), &t), Ok(1));
        assert_eq!(t.contract(), t);
    }

    #[test]
    fn contraction_examples() {
        let ham = OutTree::from_arcs(0, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(ham.contract().arcs(), vec![(0, 4)]);

        let star = OutTree::from_arcs(0, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.contract(), star);

        let spider = OutTree::from_arcs(0, [(0, 1), (1, 2), (2, 3), (2, 4)]).unwrap();
        let c = spider.contract();
        assert_eq!(c.vertices().collect::<Vec<_>>(), vec![0, 2, 3, 4]);
        assert_eq!(c.arcs(), vec![(0, 2), (2, 3), (2, 4)]);
    }

    #[test]
    fn bits_iterates_ascending() {
        assert_eq!(bits(0b1010_0101).collect::<Vec<_>>(), vec![0, 2, 5, 7]);
        assert_eq!(mask_of([1, 3]), 0b1010);
    }
}
