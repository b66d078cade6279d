//! Text formats: digraph files, DIMACS CNF, and certificate files.
//!
//! All vertex ids on disk are 1-based; in memory they are 0-based. Lines whose
//! first token is `c` are comments; blank lines are ignored.
//!
//! Digraph file:
//! ```text
//! p digraph <n> <m>
//! a <u> <v>          (m lines)
//! ```
//! Certificate files hold exactly one object:
//! ```text
//! b root <r>                     out-branching
//! b <parent> <child>
//!
//! bag <i> <v...>                 directed path decomposition (bags 1..m)
//! bag <i> <v...> + harc <h> <h'> DAG decomposition
//! node <i> <v...>                arboreal decomposition: node bags W
//! tarc <i> <j> <v...>            arboreal decomposition: tree arc and label X
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::{validate_out_branching, BranchingError, Digraph, GraphError, OutTree, TreeError};
use crate::reduction::{CnfFormula, FormulaError, Literal};
use crate::width::{
    validate_arboreal, validate_dagd, validate_dpd, ArborealDecomposition, DagDecomposition, PathDecomposition,
    Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("header declares {declared} {what}, file has {found}")]
    CountMismatch { what: &'static str, declared: usize, found: usize },
    #[error("empty certificate")]
    EmptyCertificate,
}

fn malformed(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, message: message.into() }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty() && toks[0] != "c")
}

fn number(line: usize, tok: &str) -> Result<usize, FormatError> {
    tok.parse().map_err(|_| malformed(line, format!("expected a non-negative integer, found `{tok}`")))
}

fn vertex(line: usize, tok: &str, n: Option<usize>) -> Result<usize, FormatError> {
    let id = number(line, tok)?;
    if id == 0 || n.is_some_and(|n| id > n) {
        return Err(malformed(line, format!("vertex id {id} out of range")));
    }
    Ok(id - 1)
}

pub fn parse_graph(text: &str) -> Result<Digraph, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    for (line, toks) in content_lines(text) {
        match toks.as_slice() {
            ["p", "digraph", n, m] => {
                if header.is_some() {
                    return Err(malformed(line, "duplicate header"));
                }
                header = Some((number(line, n)?, number(line, m)?));
            }
            ["a", u, v] => {
                let (n, m) = header.ok_or_else(|| malformed(line, "arc before header"))?;
                if arcs.len() == m {
                    return Err(malformed(line, format!("more than the {m} declared arcs")));
                }
                let (u, v) = (vertex(line, u, Some(n))?, vertex(line, v, Some(n))?);
                if u == v {
                    return Err(malformed(line, "self-loop"));
                }
                arcs.push((u, v));
            }
            _ => return Err(malformed(line, format!("unrecognised line `{}`", toks.join(" ")))),
        }
    }
    let (n, m) = header.ok_or(FormatError::MissingHeader)?;
    if arcs.len() != m {
        return Err(FormatError::CountMismatch { what: "arcs", declared: m, found: arcs.len() });
    }
    Ok(Digraph::new(n, arcs).expect("arcs checked while parsing"))
}

pub fn write_graph(d: &Digraph) -> String {
    let mut s = format!("p digraph {} {}\n", d.order(), d.arc_count());
    for &(u, v) in d.arcs() {
        let _ = writeln!(s, "a {} {}", u + 1, v + 1);
    }
    s
}

/// DIMACS CNF restricted to clauses of three distinct variables.
pub fn parse_cnf(text: &str) -> Result<CnfFormula, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut lines_of: Vec<usize> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    'lines: for (line, toks) in content_lines(text) {
        if toks[0] == "p" {
            match toks.as_slice() {
                ["p", "cnf", k, p] if header.is_none() => header = Some((number(line, k)?, number(line, p)?)),
                _ => return Err(malformed(line, "bad or duplicate `p cnf <vars> <clauses>` header")),
            }
            continue;
        }
        let (k, _) = header.ok_or_else(|| malformed(line, "clause before header"))?;
        for tok in toks {
            if tok == "%" {
                break 'lines;
            }
            let lit: i64 = tok.parse().map_err(|_| malformed(line, format!("bad literal `{tok}`")))?;
            if current.is_empty() {
                current_line = line;
            }
            match Literal::from_dimacs(lit) {
                None => {
                    clauses.push(std::mem::take(&mut current));
                    lines_of.push(current_line);
                }
                Some(l) if l.var >= k => return Err(malformed(line, format!("variable {} exceeds {k}", l.var + 1))),
                Some(l) => current.push(l),
            }
        }
    }
    let (k, p) = header.ok_or(FormatError::MissingHeader)?;
    if !current.is_empty() {
        return Err(malformed(current_line, "clause not terminated by 0"));
    }
    if clauses.len() != p {
        return Err(FormatError::CountMismatch { what: "clauses", declared: p, found: clauses.len() });
    }
    CnfFormula::new(k, clauses).map_err(|e| match e {
        FormulaError::ClauseSize { clause, size } => {
            malformed(lines_of[clause], format!("clause has {size} literals, expected 3"))
        }
        FormulaError::RepeatedVariable { clause, var } => {
            malformed(lines_of[clause], format!("repeated variable {} in clause", var + 1))
        }
        FormulaError::VariableOutOfRange { clause, var, .. } => {
            malformed(lines_of[clause], format!("variable {} out of range", var + 1))
        }
        FormulaError::NoClauses => malformed(0, "formula has no clauses"),
    })
}

pub fn write_cnf(f: &CnfFormula) -> String {
    let mut s = format!("p cnf {} {}\n", f.var_count(), f.clauses().len());
    for c in f.clauses() {
        let _ = writeln!(s, "{} {} {} 0", c[0].to_dimacs(), c[1].to_dimacs(), c[2].to_dimacs());
    }
    s
}

/// A parsed certificate file, 0-based, not yet validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Branching { root: usize, arcs: Vec<(usize, usize)> },
    Path { bags: Vec<Vec<usize>> },
    Dag { bags: Vec<Vec<usize>>, arcs: Vec<(usize, usize)> },
    Arboreal { nodes: Vec<Vec<usize>>, arcs: Vec<(usize, usize, Vec<usize>)> },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Branching { .. } => "out-branching",
            Certificate::Path { .. } => "path-decomposition",
            Certificate::Dag { .. } => "dag-decomposition",
            Certificate::Arboreal { .. } => "arboreal-decomposition",
        }
    }

    pub fn from_tree(t: &OutTree) -> Self {
        Certificate::Branching { root: t.root(), arcs: t.arcs() }
    }

    pub fn from_path(dec: &PathDecomposition) -> Self {
        Certificate::Path { bags: dec.bags().to_vec() }
    }

    pub fn from_dag(dec: &DagDecomposition) -> Self {
        Certificate::Dag { bags: dec.bags.clone(), arcs: dec.index.arcs().to_vec() }
    }

    pub fn from_arboreal(dec: &ArborealDecomposition) -> Self {
        Certificate::Arboreal {
            nodes: dec.node_bags.clone(),
            arcs: dec.arc_labels.iter().map(|(&(a, b), x)| (a, b, x.clone())).collect(),
        }
    }

    /// Canonical text: sorted arcs, bags in index order, vertices ascending.
    pub fn to_text(&self) -> String {
        fn ids(vs: &[usize]) -> String {
            vs.iter().map(|v| format!(" {}", v + 1)).collect()
        }
        let mut s = String::new();
        match self {
            Certificate::Branching { root, arcs } => {
                let _ = writeln!(s, "b root {}", root + 1);
                let mut arcs = arcs.clone();
                arcs.sort_unstable();
                for (p, c) in arcs {
                    let _ = writeln!(s, "b {} {}", p + 1, c + 1);
                }
            }
            Certificate::Path { bags } | Certificate::Dag { bags, .. } => {
                for (i, bag) in bags.iter().enumerate() {
                    let _ = writeln!(s, "bag {}{}", i + 1, ids(&sorted(bag)));
                }
                if let Certificate::Dag { arcs, .. } = self {
                    let mut arcs = arcs.clone();
                    arcs.sort_unstable();
                    for (a, b) in arcs {
                        let _ = writeln!(s, "harc {} {}", a + 1, b + 1);
                    }
                }
            }
            Certificate::Arboreal { nodes, arcs } => {
                for (i, bag) in nodes.iter().enumerate() {
                    let _ = writeln!(s, "node {}{}", i + 1, ids(&sorted(bag)));
                }
                let mut arcs = arcs.clone();
                arcs.sort();
                for (a, b, x) in arcs {
                    let _ = writeln!(s, "tarc {} {}{}", a + 1, b + 1, ids(&sorted(&x)));
                }
            }
        }
        s
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Collects `(index, payload)` entries into a vector indexed `0..m`, requiring ids `1..=m`.
fn dense<T>(what: &str, entries: BTreeMap<usize, (usize, T)>) -> Result<Vec<T>, FormatError> {
    let mut out = Vec::with_capacity(entries.len());
    for (expected, (id, (line, payload))) in entries.into_iter().enumerate() {
        if id != expected + 1 {
            return Err(malformed(line, format!("{what} ids must be 1..m without gaps; missing {}", expected + 1)));
        }
        out.push(payload);
    }
    Ok(out)
}

pub fn parse_certificate(text: &str) -> Result<Certificate, FormatError> {
    let mut root = None;
    let mut tree_arcs = Vec::new();
    let mut bags: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    let mut harcs = Vec::new();
    let mut nodes: BTreeMap<usize, (usize, Vec<usize>)> = BTreeMap::new();
    let mut tarcs: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let mut kind: Option<&str> = None;

    for (line, toks) in content_lines(text) {
        let family = match toks[0] {
            "b" => "b",
            "bag" | "harc" => "bag",
            "node" | "tarc" => "node",
            other => return Err(malformed(line, format!("unrecognised line kind `{other}`"))),
        };
        if kind.is_some_and(|k| k != family) {
            return Err(malformed(line, "certificate mixes object kinds"));
        }
        kind = Some(family);
        let ids = |toks: &[&str]| toks.iter().map(|t| vertex(line, t, None)).collect::<Result<Vec<_>, _>>();
        match toks.as_slice() {
            ["b", "root", r] => {
                if root.replace(vertex(line, r, None)?).is_some() {
                    return Err(malformed(line, "duplicate root line"));
                }
            }
            ["b", p, c] => tree_arcs.push((vertex(line, p, None)?, vertex(line, c, None)?)),
            ["bag", i, rest @ ..] => {
                let id = number(line, i)?;
                if bags.insert(id, (line, ids(rest)?)).is_some() {
                    return Err(malformed(line, format!("duplicate bag {id}")));
                }
            }
            ["harc", a, b] => harcs.push((line, number(line, a)?, number(line, b)?)),
            ["node", i, rest @ ..] => {
                let id = number(line, i)?;
                if nodes.insert(id, (line, ids(rest)?)).is_some() {
                    return Err(malformed(line, format!("duplicate node {id}")));
                }
            }
            ["tarc", a, b, rest @ ..] => {
                tarcs.push((vertex(line, a, None)?, vertex(line, b, None)?, ids(rest)?));
            }
            _ => return Err(malformed(line, format!("malformed `{}` line", toks[0]))),
        }
    }

    match kind {
        None => Err(FormatError::EmptyCertificate),
        Some("b") => {
            let root = root.ok_or_else(|| malformed(0, "missing `b root <r>` line"))?;
            Ok(Certificate::Branching { root, arcs: tree_arcs })
        }
        Some("bag") => {
            let m = bags.len();
            let bags = dense("bag", bags)?;
            if harcs.is_empty() {
                return Ok(Certificate::Path { bags });
            }
            let mut arcs = Vec::new();
            for (line, a, b) in harcs {
                if a == 0 || b == 0 || a > m || b > m {
                    return Err(malformed(line, "harc endpoint is not a bag id"));
                }
                arcs.push((a - 1, b - 1));
            }
            Ok(Certificate::Dag { bags, arcs })
        }
        _ => {
            let m = nodes.len();
            let nodes = dense("node", nodes)?;
            if let Some(&(a, b, _)) = tarcs.iter().find(|&&(a, b, _)| a >= m || b >= m) {
                return Err(malformed(0, format!("tarc ({}, {}) names an unknown node", a + 1, b + 1)));
            }
            Ok(Certificate::Arboreal { nodes, arcs: tarcs })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("invalid out-branching: {0}")]
    Branching(#[from] BranchingError),
    #[error("invalid decomposition: {0}")]
    Decomposition(#[from] Violation),
    #[error("index digraph: {0}")]
    Index(#[from] GraphError),
}

impl CertifyError {
    /// The message with vertex, bag and node ids shifted to the 1-based file convention.
    pub fn one_based(&self) -> String {
        match self {
            CertifyError::Branching(e) => format!("invalid out-branching: {}", branching_one_based(e)),
            CertifyError::Decomposition(v) => format!("invalid decomposition: {}", violation_one_based(v)),
            CertifyError::Index(e) => format!("index digraph: {e}"),
        }
    }
}

fn branching_one_based(e: &BranchingError) -> String {
    match e {
        BranchingError::NotSpanning(v) => format!("vertex {} is not covered by the out-tree", v + 1),
        BranchingError::VertexOutOfRange { vertex, order } => {
            format!("tree vertex {} is not a vertex of the digraph (order {order})", vertex + 1)
        }
        BranchingError::ArcAbsent(u, v) => format!("arc ({}, {}) is not an arc of the digraph", u + 1, v + 1),
        BranchingError::Tree(t) => match t {
            TreeError::MultipleParents(v) => format!("vertex {} has more than one parent", v + 1),
            TreeError::RootHasParent(v) => format!("root {} has a parent", v + 1),
            TreeError::SelfLoop(v) => format!("arc ({0}, {0}) is a self-loop", v + 1),
            TreeError::Unreachable(v) => format!("vertex {} is not reachable from the root", v + 1),
        },
    }
}

fn violation_one_based(v: &Violation) -> String {
    let p = |(a, b): (usize, usize)| format!("({}, {})", a + 1, b + 1);
    match *v {
        Violation::VertexOutOfRange { bag, vertex } => {
            format!("bag {} contains vertex {}, which is not in the digraph", bag + 1, vertex + 1)
        }
        Violation::Uncovered(x) => format!("vertex {} is in no bag", x + 1),
        Violation::ArcNotRespected(a, b) => {
            format!("arc {}: no bag of {} precedes a bag of {}", p((a, b)), a + 1, b + 1)
        }
        Violation::NotConvex { vertex, from, via, to } => format!(
            "vertex {} is in bags {} and {} but not in bag {} between them",
            vertex + 1,
            from + 1,
            to + 1,
            via + 1
        ),
        Violation::IndexCyclic | Violation::BagCountMismatch { .. } | Violation::IndexTreeNodes(_) => v.to_string(),
        Violation::EmptyNodeBag(x) => format!("node bag {} is empty", x + 1),
        Violation::NotPartition { vertex, first, second } => {
            format!("vertex {} lies in node bags {} and {}", vertex + 1, first + 1, second + 1)
        }
        Violation::MissingLabel(a, b) => format!("arc {} of the index tree has no label", p((a, b))),
        Violation::StrayLabel(a, b) => format!("label on {} is not on an arc of the index tree", p((a, b))),
        Violation::LabelMeetsSubtree { arc, vertex } => {
            format!("below arc {}: vertex {} is both in the subtree and in the arc label", p(arc), vertex + 1)
        }
        Violation::NotNormal { arc, escape } => format!(
            "below arc {}: a walk leaves the subtree through {} and returns avoiding the label",
            p(arc),
            escape + 1
        ),
    }
}

/// Outcome of a successful audit: number of leaves, or width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Audit {
    pub kind: &'static str,
    pub value: usize,
}

/// Builds the object a certificate describes and runs the matching validator.
pub fn certify(d: &Digraph, cert: &Certificate) -> Result<Audit, CertifyError> {
    let kind = cert.kind();
    let value = match cert {
        Certificate::Branching { root, arcs } => {
            let t = OutTree::from_arcs(*root, arcs.iter().copied()).map_err(BranchingError::from)?;
            validate_out_branching(d, &t)?
        }
        Certificate::Path { bags } => validate_dpd(d, &PathDecomposition::new(bags.clone()))?,
        Certificate::Dag { bags, arcs } => {
            let index = Digraph::new(bags.len(), arcs.iter().copied())?;
            validate_dagd(d, &DagDecomposition::new(index, bags.clone()))?
        }
        Certificate::Arboreal { nodes, arcs } => {
            let m = nodes.len();
            let mut has_parent = vec![false; m];
            for &(_, b, _) in arcs {
                has_parent[b] = true;
            }
            let root = has_parent.iter().position(|&p| !p).unwrap_or(0);
            let tree = OutTree::from_arcs(root, arcs.iter().map(|&(a, b, _)| (a, b)))
                .map_err(|_| Violation::IndexTreeNodes(m))?;
            let labels = arcs.iter().map(|(a, b, x)| ((*a, *b), x.clone())).collect();
            validate_arboreal(d, &ArborealDecomposition::new(tree, labels, nodes.clone()))?
        }
    };
    Ok(Audit { kind, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_examples() {
        let d = parse_graph("p digraph 3 3\na 1 2\na 2 3\na 3 1\n").unwrap();
        assert_eq!(d, Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap());
        let with_comments = parse_graph("c a cycle\np digraph 3 3\n\nc arcs\na 1 2\na 2 3\na 3 1\n").unwrap();
        assert_eq!(with_comments, d);
        assert_eq!(
            parse_graph("p digraph 3 2\na 1 2\na 2 3\na 3 1\n"),
            Err(FormatError::Malformed { line: 4, message: "more than the 2 declared arcs".into() })
        );
        assert_eq!(
            parse_graph("p digraph 3 3\na 1 2\n"),
            Err(FormatError::CountMismatch { what: "arcs", declared: 3, found: 1 })
        );
        assert!(matches!(parse_graph("p digraph 2 1\na 1 3\n"), Err(FormatError::Malformed { line: 2, .. })));
        assert!(matches!(parse_graph("p digraph 2 1\na 2 2\n"), Err(FormatError::Malformed { line: 2, .. })));
        assert_eq!(parse_graph("a 1 2\n").unwrap_err(), malformed(1, "arc before header"));
        assert_eq!(write_graph(&d), "p digraph 3 3\na 1 2\na 2 3\na 3 1\n");
    }

    #[test]
    fn cnf_examples() {
        let f = parse_cnf("c demo\np cnf 3 1\n1 2 3 0\n").unwrap();
        assert_eq!(f.var_count(), 3);
        assert_eq!(f.clauses().len(), 1);
        assert_eq!(write_cnf(&f), "p cnf 3 1\n1 2 3 0\n");
        assert_eq!(parse_cnf("p cnf 2 1\n1 -1 2 0\n").unwrap_err(), malformed(2, "repeated variable 1 in clause"));
        assert_eq!(parse_cnf("p cnf 2 1\n1 2 0\n").unwrap_err(), malformed(2, "clause has 2 literals, expected 3"));
        // clauses may wrap across lines
        let wrapped = parse_cnf("p cnf 4 2\n1 -2\n 3 0 -4 2 1 0\n").unwrap();
        assert_eq!(wrapped.clauses()[1][0], Literal::new(3, false));
        assert!(matches!(parse_cnf("p cnf 3 2\n1 2 3 0\n"), Err(FormatError::CountMismatch { .. })));
        assert!(matches!(parse_cnf("p cnf 3 1\n1 2 3\n"), Err(FormatError::Malformed { .. })));
    }

    #[test]
    fn certificate_kinds() {
        let c3 = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let b = parse_certificate("b root 1\nb 1 2\nb 2 3\n").unwrap();
        assert_eq!(certify(&c3, &b), Ok(Audit { kind: "out-branching", value: 1 }));
        let missing = parse_certificate("b root 1\nb 1 2\n").unwrap();
        let err = certify(&c3, &missing).unwrap_err();
        assert_eq!(err, CertifyError::Branching(BranchingError::NotSpanning(2)));
        assert_eq!(err.one_based(), "invalid out-branching: vertex 3 is not covered by the out-tree");

        let p = parse_certificate("bag 1 1 2\nbag 2 2 3\nbag 3 3 1\n").unwrap();
        assert!(matches!(certify(&c3, &p), Err(CertifyError::Decomposition(Violation::NotConvex { .. }))));
        let p = parse_certificate("bag 2 2 3\nbag 1 1 2 3\n").unwrap();
        assert_eq!(certify(&c3, &p), Ok(Audit { kind: "path-decomposition", value: 2 }));

        let dag = parse_certificate("bag 1 1\nbag 2 1 2 3\nharc 1 2\n").unwrap();
        assert_eq!(certify(&c3, &dag), Ok(Audit { kind: "dag-decomposition", value: 2 }));

        let arb = parse_certificate("node 1 1\nnode 2 2 3\ntarc 1 2 1\n").unwrap();
        assert_eq!(certify(&c3, &arb), Ok(Audit { kind: "arboreal-decomposition", value: 2 }));
    }

    #[test]
    fn certificate_errors() {
        assert_eq!(parse_certificate("c nothing\n"), Err(FormatError::EmptyCertificate));
        assert!(parse_certificate("b root 1\nbag 1 1\n").is_err());
        assert!(parse_certificate("bag 1 1\nbag 3 2\n").is_err());
        assert!(parse_certificate("bag 1 1\nharc 1 2\n").is_err());
        assert!(parse_certificate("b 1 2\n").is_err());
        assert!(parse_certificate("node 1 1\ntarc 1 2\n").is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let texts = [
            "b root 2\nb 1 3\nb 2 1\n",
            "bag 1 1\nbag 2 1 2\nbag 3\n",
            "bag 1 1\nbag 2 2\nharc 1 2\n",
            "node 1 1\nnode 2 2 3\ntarc 1 2 1\n",
        ];
        for text in texts {
            let cert = parse_certificate(text).unwrap();
            assert_eq!(cert.to_text(), text);
        }
    }
}
