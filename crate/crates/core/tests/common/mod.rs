//! Slow, obviously-correct oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use minlob::digraph::Digraph;
use minlob::generate::random_digraph;

/// Every digraph on `n` vertices, one per subset of the `n(n-1)` possible arcs.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = Digraph> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let arcs = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a);
        Digraph::new(n, arcs).unwrap()
    })
}

/// A reproducible corpus: sizes cycle through `sizes`, densities through `densities`.
pub fn corpus(count: usize, sizes: std::ops::RangeInclusive<usize>, densities: &[f64], seed: u64) -> Vec<Digraph> {
    let sizes: Vec<usize> = sizes.collect();
    (0..count)
        .map(|i| {
            random_digraph(sizes[i % sizes.len()], densities[i / sizes.len() % densities.len()], seed + i as u64)
                .unwrap()
        })
        .collect()
}

/// Hamiltonian path by the subset dynamic program: `reach[S]` holds the possible endpoints of a path through S.
pub fn has_hamiltonian_path(d: &Digraph) -> bool {
    let n = d.order();
    if n == 0 {
        return false;
    }
    let mut reach = vec![0u32; 1 << n];
    for v in 0..n {
        reach[1 << v] |= 1 << v;
    }
    for s in 1usize..1 << n {
        for v in 0..n {
            if reach[s] >> v & 1 == 0 {
                continue;
            }
            for &w in d.out_neighbors(v) {
                if s >> w & 1 == 0 {
                    reach[s | 1 << w] |= 1 << w;
                }
            }
        }
    }
    reach[(1 << n) - 1] != 0
}

/// Parent vectors of every out-branching, by trying every in-arc choice for every non-root vertex.
pub fn all_out_branchings(d: &Digraph) -> Vec<(usize, Vec<Option<usize>>)> {
    let n = d.order();
    let mut out = Vec::new();
    for root in 0..n {
        let choices: Vec<Vec<Option<usize>>> = (0..n)
            .map(|v| if v == root { vec![None] } else { d.in_neighbors(v).iter().map(|&u| Some(u)).collect() })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = vec![0; n];
        loop {
            let parent: Vec<Option<usize>> = (0..n).map(|v| choices[v][idx[v]]).collect();
            let reaches_root = (0..n).all(|v| {
                let mut cur = v;
                for _ in 0..n {
                    match parent[cur] {
                        None => return cur == root,
                        Some(p) => cur = p,
                    }
                }
                false
            });
            if reaches_root {
                out.push((root, parent));
            }
            let mut i = 0;
            while i < n {
                idx[i] += 1;
                if idx[i] < choices[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

pub fn leaves_of(parent: &[Option<usize>]) -> usize {
    let n = parent.len();
    (0..n).filter(|&v| !parent.contains(&Some(v))).count()
}

/// Minimum leaves over the exhaustive enumeration, `None` when there is no out-branching.
pub fn min_leaves_exhaustive(d: &Digraph) -> Option<usize> {
    all_out_branchings(d).iter().map(|(_, p)| leaves_of(p)).min()
}

/// Z-normality by explicit simple-path search: is there a path s -> w -> ... -> t with s, t in S,
/// w outside S and every inner vertex outside S and Z?
pub fn z_normal_by_paths(d: &Digraph, s: &BTreeSet<usize>, z: &BTreeSet<usize>) -> bool {
    fn dfs(d: &Digraph, v: usize, s: &BTreeSet<usize>, z: &BTreeSet<usize>, seen: &mut Vec<bool>) -> bool {
        for &w in d.out_neighbors(v) {
            if s.contains(&w) {
                return true;
            }
            if z.contains(&w) || seen[w] {
                continue;
            }
            seen[w] = true;
            if dfs(d, w, s, z, seen) {
                return true;
            }
            seen[w] = false;
        }
        false
    }
    for &a in s {
        for &w in d.out_neighbors(a) {
            if s.contains(&w) || z.contains(&w) {
                continue;
            }
            let mut seen = vec![false; d.order()];
            seen[w] = true;
            if dfs(d, w, s, z, &mut seen) {
                return false;
            }
        }
    }
    true
}

/// Every simple path from `a` to `b` as a vertex sequence.
pub fn simple_paths(d: &Digraph, a: usize, b: usize) -> Vec<Vec<usize>> {
    fn go(d: &Digraph, b: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == b {
            out.push(path.clone());
            return;
        }
        for &w in d.out_neighbors(v) {
            if !path.contains(&w) {
                path.push(w);
                go(d, b, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(d, b, &mut vec![a], &mut out);
    out
}

/// Restricted covering linkage by trying every combination of simple paths.
pub fn covering_linkage_exists(d: &Digraph, demands: &[(usize, usize)]) -> bool {
    let endpoints: BTreeSet<usize> = demands.iter().flat_map(|&(a, b)| [a, b]).collect();
    let options: Vec<Vec<Vec<usize>>> = demands
        .iter()
        .map(|&(a, b)| {
            simple_paths(d, a, b)
                .into_iter()
                .filter(|p| p[1..p.len() - 1].iter().all(|v| !endpoints.contains(v)))
                .collect()
        })
        .collect();
    fn pick(
        i: usize,
        options: &[Vec<Vec<usize>>],
        used: &mut Vec<bool>,
        n: usize,
        endpoints: &BTreeSet<usize>,
    ) -> bool {
        if i == options.len() {
            return (0..n).all(|v| used[v] || endpoints.contains(&v));
        }
        for p in &options[i] {
            let inner = &p[1..p.len() - 1];
            if inner.iter().any(|&v| used[v]) {
                continue;
            }
            for &v in inner {
                used[v] = true;
            }
            let ok = pick(i + 1, options, used, n, endpoints);
            for &v in inner {
                used[v] = false;
            }
            if ok {
                return true;
            }
        }
        false
    }
    pick(0, &options, &mut vec![false; d.order()], d.order(), &endpoints)
}
