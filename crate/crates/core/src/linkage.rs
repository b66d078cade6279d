//! Exact search for covering linkages.
//!
//! A query is a list of demands `(s_i, t_i)`. A solution is one directed path per
//! demand such that the internal vertices of all paths are pairwise disjoint,
//! avoid every demand endpoint, and together with the endpoints cover the whole
//! digraph. This is the restricted form of a hamiltonian linkage: the union of
//! the paths of a tree-shaped demand list is an out-branching.
//!
//! The search is exponential in the worst case. It backtracks over demands in
//! order, grows the current path one arc at a time in ascending neighbour order,
//! and remembers failed `(demand, used vertices, tail)` states.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::digraph::{bits, mask_of, Digraph, GraphError, OutTree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkageError {
    #[error("demand {index} has identical endpoints {vertex}")]
    DegenerateDemand { index: usize, vertex: usize },
    #[error("demand endpoint {0} is not a vertex of the digraph")]
    EndpointOutOfRange(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkageQuery {
    demands: Vec<(usize, usize)>,
}

impl LinkageQuery {
    pub fn new(demands: Vec<(usize, usize)>) -> Result<Self, LinkageError> {
        if let Some((index, &(s, _))) = demands.iter().enumerate().find(|(_, (s, t))| s == t) {
            return Err(LinkageError::DegenerateDemand { index, vertex: s });
        }
        Ok(LinkageQuery { demands })
    }

    pub fn demands(&self) -> &[(usize, usize)] {
        &self.demands
    }

    /// Every vertex that is some `s_i` or `t_i`.
    pub fn endpoints(&self) -> BTreeSet<usize> {
        self.demands.iter().flat_map(|&(s, t)| [s, t]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkageSolution {
    /// `paths[i]` runs from `s_i` to `t_i`.
    pub paths: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkageViolation {
    #[error("expected {expected} paths, found {found}")]
    PathCount { expected: usize, found: usize },
    #[error("path {0} does not run from its demand source to its demand target")]
    WrongEnds(usize),
    #[error("path {0} uses a non-arc or repeats a vertex")]
    NotAPath(usize),
    #[error("vertex {vertex} is internal to two paths")]
    SharedInternal { vertex: usize },
    #[error("vertex {vertex} is a demand endpoint but internal to path {path}")]
    EndpointInternal { vertex: usize, path: usize },
    #[error("vertex {0} is not covered")]
    Uncovered(usize),
}

impl LinkageSolution {
    /// Re-checks every solution property from scratch.
    pub fn verify(&self, d: &Digraph, q: &LinkageQuery) -> Result<(), LinkageViolation> {
        let demands = q.demands();
        if self.paths.len() != demands.len() {
            return Err(LinkageViolation::PathCount { expected: demands.len(), found: self.paths.len() });
        }
        let endpoints = q.endpoints();
        let mut covered: BTreeSet<usize> = endpoints.clone();
        let mut internal_seen = BTreeSet::new();
        for (i, (path, &(s, t))) in self.paths.iter().zip(demands).enumerate() {
            if path.len() < 2 || path[0] != s || path[path.len() - 1] != t {
                return Err(LinkageViolation::WrongEnds(i));
            }
            let distinct: BTreeSet<_> = path.iter().collect();
            if distinct.len() != path.len() || path.windows(2).any(|w| !d.has_arc(w[0], w[1])) {
                return Err(LinkageViolation::NotAPath(i));
            }
            for &v in &path[1..path.len() - 1] {
                if endpoints.contains(&v) {
                    return Err(LinkageViolation::EndpointInternal { vertex: v, path: i });
                }
                if !internal_seen.insert(v) {
                    return Err(LinkageViolation::SharedInternal { vertex: v });
                }
                covered.insert(v);
            }
        }
        if let Some(v) = d.vertices().find(|v| !covered.contains(v)) {
            return Err(LinkageViolation::Uncovered(v));
        }
        Ok(())
    }

    /// The union of the paths as an out-tree rooted at `root`.
    pub fn to_out_tree(&self, root: usize) -> Result<OutTree, TreeError> {
        let arcs = self.paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1])));
        OutTree::from_arcs(root, arcs)
    }
}

/// Finds the first covering linkage in demand/neighbour order, or `None` if infeasible.
pub fn solve_cover_linkage(d: &Digraph, q: &LinkageQuery) -> Result<Option<LinkageSolution>, LinkageError> {
    let out = d.out_masks()?;
    if let Some(&v) = q.endpoints().iter().find(|&&v| !d.contains_vertex(v)) {
        return Err(LinkageError::EndpointOutOfRange(v));
    }
    let all = if d.order() == 64 { u64::MAX } else { (1u64 << d.order()) - 1 };
    let free = all & !mask_of(q.endpoints());
    let mut search =
        Search { out, demands: q.demands(), free, dead: HashSet::new(), current: Vec::new(), done: Vec::new() };
    Ok(search.start(0, 0).then_some(LinkageSolution { paths: search.done }))
}

struct Search<'a> {
    out: Vec<u64>,
    demands: &'a [(usize, usize)],
    free: u64,
    dead: HashSet<(usize, u64, usize)>,
    current: Vec<usize>,
    done: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn start(&mut self, i: usize, used: u64) -> bool {
        let Some(&(s, _)) = self.demands.get(i) else {
            return used == self.free;
        };
        let saved = std::mem::replace(&mut self.current, vec![s]);
        let found = self.extend(i, used, s);
        if !found {
            self.current = saved;
        }
        found
    }

    fn extend(&mut self, i: usize, used: u64, tail: usize) -> bool {
        if self.dead.contains(&(i, used, tail)) || !self.coverable(i, used, tail) {
            return false;
        }
        let target = self.demands[i].1;
        let open = self.free & !used;
        for w in bits(self.out[tail]) {
            if w == target {
                let mut path = std::mem::take(&mut self.current);
                path.push(target);
                self.done.push(path);
                if self.start(i + 1, used) {
                    return true;
                }
                let mut path = self.done.pop().expect("pushed above");
                path.pop();
                self.current = path;
            } else if open & (1 << w) != 0 {
                self.current.push(w);
                if self.extend(i, used | (1 << w), w) {
                    return true;
                }
                self.current.pop();
            }
        }
        self.dead.insert((i, used, tail));
        false
    }

    /// Every unused free vertex must be reachable, through unused free vertices,
    /// from the current tail or the source of a later demand.
    fn coverable(&self, i: usize, used: u64, tail: usize) -> bool {
        let open = self.free & !used;
        if open == 0 {
            return true;
        }
        let mut frontier = self.out[tail];
        for &(s, _) in &self.demands[i + 1..] {
            frontier |= self.out[s];
        }
        let mut reached = 0u64;
        frontier &= open;
        while frontier != 0 {
            reached |= frontier;
            let mut next = 0u64;
            for v in bits(frontier) {
                next |= self.out[v];
            }
            frontier = next & open & !reached;
        }
        reached == open
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(d: &Digraph, demands: Vec<(usize, usize)>) -> Option<Vec<Vec<usize>>> {
        let q = LinkageQuery::new(demands).unwrap();
        let sol = solve_cover_linkage(d, &q).unwrap();
        if let Some(s) = &sol {
            s.verify(d, &q).unwrap();
        }
        sol.map(|s| s.paths)
    }

    #[test]
    fn hamiltonian_path_demand() {
        let d = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(solve(&d, vec![(0, 2)]), Some(vec![vec![0, 1, 2]]));
    }

    #[test]
    fn cycle_two_demands() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(solve(&d, vec![(0, 1), (1, 0)]), Some(vec![vec![0, 1], vec![1, 2, 0]]));
    }

    #[test]
    fn uncoverable_vertices() {
        let d = Digraph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(solve(&d, vec![(0, 1)]), None);
    }

    #[test]
    fn endpoints_cannot_be_internal() {
        // 0 -> 2 -> 1 exists, but 2 is an endpoint of the second demand
        let d = Digraph::new(4, [(0, 2), (2, 1), (2, 3)]).unwrap();
        assert_eq!(solve(&d, vec![(0, 1), (2, 3)]), None);
        assert_eq!(solve(&d, vec![(0, 2), (2, 1), (2, 3)]), Some(vec![vec![0, 2], vec![2, 1], vec![2, 3]]));
    }

    #[test]
    fn errors() {
        assert_eq!(LinkageQuery::new(vec![(1, 1)]), Err(LinkageError::DegenerateDemand { index: 0, vertex: 1 }));
        let d = Digraph::new(2, [(0, 1)]).unwrap();
        let q = LinkageQuery::new(vec![(0, 5)]).unwrap();
        assert_eq!(solve_cover_linkage(&d, &q), Err(LinkageError::EndpointOutOfRange(5)));
    }

    #[test]
    fn verifier_catches_tampering() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let q = LinkageQuery::new(vec![(0, 2)]).unwrap();
        let bad = LinkageSolution { paths: vec![vec![0, 2]] };
        assert_eq!(bad.verify(&d, &q), Err(LinkageViolation::NotAPath(0)));
        let q2 = LinkageQuery::new(vec![(0, 1)]).unwrap();
        let short = LinkageSolution { paths: vec![vec![0, 1]] };
        assert_eq!(short.verify(&d, &q2), Err(LinkageViolation::Uncovered(2)));
    }

    #[test]
    fn repeated_calls_agree() {
        let d = Digraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (1, 3), (2, 4), (4, 0)]).unwrap();
        let q = LinkageQuery::new(vec![(0, 4)]).unwrap();
        let a = solve_cover_linkage(&d, &q).unwrap();
        let b = solve_cover_linkage(&d, &q).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.unwrap().paths, vec![vec![0, 1, 2, 3, 4]]);
    }
}
