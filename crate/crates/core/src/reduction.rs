//! 3SAT to minimum-leaf out-branching.
//!
//! Each clause becomes a copy of a six-vertex gadget; each variable gets a vertex
//! `u_i` hanging off a common root `r`; each literal threads a chain of arcs through
//! the gadgets of the clauses containing it, in clause order. The formula is
//! satisfiable iff the instance has an out-branching with exactly `k` leaves,
//! `k` being the number of variables.
//!
//! Vertex numbering: `r = 0`, `u_i = 1 + i`, and clause `j` occupies
//! `1 + k + 6j ..` in the order `x1, y1, z1, x2, y2, z2`. Clause position 1/2/3
//! is gadget slot x/y/z.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::digraph::{validate_out_branching, BranchingError, Digraph, OutTree};
use crate::linkage::{solve_cover_linkage, LinkageQuery};
use crate::width::PathDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    X,
    Y,
    Z,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::X, Slot::Y, Slot::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Slot {
        Slot::ALL[i % 3]
    }

    /// Cyclic successor x -> y -> z -> x (the direction of the layer-one triangle).
    pub fn next(self) -> Slot {
        Slot::from_index(self.index() + 1)
    }

    fn letter(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    One,
    Two,
}

/// Local id of a gadget vertex: `x1, y1, z1, x2, y2, z2` = `0..6`.
pub fn gadget_local(slot: Slot, layer: Layer) -> usize {
    slot.index() + if layer == Layer::Two { 3 } else { 0 }
}

pub fn gadget_local_name(local: usize) -> String {
    format!("{}{}", Slot::from_index(local).letter(), local / 3 + 1)
}

/// The clause gadget: triangle `x1 y1 z1`, verticals `a1 a2`, reversed triangle `x2 z2 y2`.
pub fn build_gadget() -> Digraph {
    use Layer::*;
    use Slot::*;
    let arc = |a: (Slot, Layer), b: (Slot, Layer)| (gadget_local(a.0, a.1), gadget_local(b.0, b.1));
    Digraph::new(
        6,
        [
            arc((X, One), (Y, One)),
            arc((Y, One), (Z, One)),
            arc((Z, One), (X, One)),
            arc((X, One), (X, Two)),
            arc((Y, One), (Y, Two)),
            arc((Z, One), (Z, Two)),
            arc((X, Two), (Z, Two)),
            arc((Z, Two), (Y, Two)),
            arc((Y, Two), (X, Two)),
        ],
    )
    .expect("gadget arcs are valid")
}

/// Paths through one gadget, one per entry slot, from `a1` to `a2`, jointly
/// covering all six vertices. Indexed by the bitmask of entry slots.
type Traversal = BTreeMap<Slot, Vec<usize>>;

fn gadget_traversals() -> &'static [Option<Traversal>; 8] {
    static TABLE: OnceLock<[Option<Traversal>; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = build_gadget();
        std::array::from_fn(|mask| {
            let slots: Vec<Slot> = Slot::ALL.into_iter().filter(|s| mask & (1 << s.index()) != 0).collect();
            if slots.is_empty() {
                return None;
            }
            let demands = slots.iter().map(|&s| (gadget_local(s, Layer::One), gadget_local(s, Layer::Two))).collect();
            let query = LinkageQuery::new(demands).expect("distinct endpoints");
            let sol = solve_cover_linkage(&h, &query).expect("gadget is small")?;
            Some(slots.into_iter().zip(sol.paths).collect())
        })
    })
}

/// The compatible traversal of a gadget entered at exactly the slots in `entries`.
pub fn gadget_traversal(entries: &BTreeSet<Slot>) -> Option<&'static BTreeMap<Slot, Vec<usize>>> {
    let mask = entries.iter().fold(0usize, |m, s| m | 1 << s.index());
    gadget_traversals()[mask].as_ref()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    /// From a DIMACS literal (`3` is v3, `-3` its negation).
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        (lit != 0).then(|| Literal { var: lit.unsigned_abs() as usize - 1, positive: lit > 0 })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}v{}", if self.positive { "" } else { "¬" }, self.var + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula has no clauses")]
    NoClauses,
    #[error("clause {clause} has {size} literals, expected 3")]
    ClauseSize { clause: usize, size: usize },
    #[error("clause {clause} repeats variable v{}", var + 1)]
    RepeatedVariable { clause: usize, var: usize },
    #[error("clause {clause} mentions v{} but the formula has {var_count} variables", var + 1)]
    VariableOutOfRange { clause: usize, var: usize, var_count: usize },
}

/// A 3-CNF formula; every clause has three literals over three distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    var_count: usize,
    clauses: Vec<[Literal; 3]>,
}

/// Truth value per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn value(&self, lit: Literal) -> bool {
        self.0[lit.var] == lit.positive
    }

    /// All `2^k` assignments, v1 as the most significant bit, all-false first.
    pub fn all(var_count: usize) -> impl Iterator<Item = Assignment> {
        (0u64..1 << var_count)
            .map(move |bitsv| Assignment((0..var_count).map(|i| bitsv >> (var_count - 1 - i) & 1 == 1).collect()))
    }
}

impl CnfFormula {
    pub fn new(var_count: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        if clauses.is_empty() {
            return Err(FormulaError::NoClauses);
        }
        let mut checked = Vec::with_capacity(clauses.len());
        for (j, clause) in clauses.into_iter().enumerate() {
            let lits: [Literal; 3] =
                clause.as_slice().try_into().map_err(|_| FormulaError::ClauseSize { clause: j, size: clause.len() })?;
            for (a, lit) in lits.iter().enumerate() {
                if lit.var >= var_count {
                    return Err(FormulaError::VariableOutOfRange { clause: j, var: lit.var, var_count });
                }
                if lits[..a].iter().any(|o| o.var == lit.var) {
                    return Err(FormulaError::RepeatedVariable { clause: j, var: lit.var });
                }
            }
            checked.push(lits);
        }
        Ok(CnfFormula { var_count, clauses: checked })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn first_unsatisfied(&self, a: &Assignment) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|&l| a.value(l)))
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        a.0.len() == self.var_count && self.first_unsatisfied(a).is_none()
    }

    /// First satisfying assignment in [`Assignment::all`] order, by exhaustive search.
    pub fn brute_force_satisfying(&self) -> Option<Assignment> {
        Assignment::all(self.var_count).find(|a| self.is_satisfied_by(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    Root,
    Variable(usize),
    Gadget { clause: usize, slot: Slot, layer: Layer },
}

/// The digraph built from a formula plus the map between vertex ids and roles.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    formula: CnfFormula,
    digraph: Digraph,
    /// arcs of the positive (index 0) and negative (index 1) chain per variable
    chains: Vec<[Vec<(usize, usize)>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("clause {} has no true literal", .0 + 1)]
    UncoveredClause(usize),
    #[error("assignment has {found} values, formula has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error(transparent)]
    Branching(#[from] BranchingError),
    #[error("out-branching has {found} leaves, expected {expected}")]
    WrongLeafCount { expected: usize, found: usize },
    #[error("out-branching is not a root with one path per variable vertex")]
    NotPathShaped,
    #[error("path from u{} meets gadget H{} in an unexpected pattern", path + 1, clause + 1)]
    UnexpectedTraversal { path: usize, clause: usize },
    #[error("decoded assignment leaves clause {} unsatisfied", .0 + 1)]
    DecodeUnsatisfied(usize),
}

impl ReducedInstance {
    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn var_count(&self) -> usize {
        self.formula.var_count
    }

    pub fn clause_count(&self) -> usize {
        self.formula.clauses.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn var_vertex(&self, var: usize) -> usize {
        1 + var
    }

    pub fn gadget_vertex(&self, clause: usize, slot: Slot, layer: Layer) -> usize {
        self.gadget_base(clause) + gadget_local(slot, layer)
    }

    fn gadget_base(&self, clause: usize) -> usize {
        1 + self.var_count() + 6 * clause
    }

    pub fn role(&self, v: usize) -> Option<VertexRole> {
        let k = self.var_count();
        match v {
            0 => Some(VertexRole::Root),
            v if v <= k => Some(VertexRole::Variable(v - 1)),
            v if v < self.digraph.order() => {
                let off = v - 1 - k;
                let local = off % 6;
                Some(VertexRole::Gadget {
                    clause: off / 6,
                    slot: Slot::from_index(local),
                    layer: if local < 3 { Layer::One } else { Layer::Two },
                })
            }
            _ => None,
        }
    }

    /// Human-readable name: `r`, `u3`, `y2(H1)` (1-based indices).
    pub fn vertex_name(&self, v: usize) -> String {
        match self.role(v) {
            Some(VertexRole::Root) => "r".into(),
            Some(VertexRole::Variable(i)) => format!("u{}", i + 1),
            Some(VertexRole::Gadget { clause, slot, layer }) => {
                format!("{}(H{})", gadget_local_name(gadget_local(slot, layer)), clause + 1)
            }
            None => format!("?{v}"),
        }
    }

    /// Arcs of the chain for a literal: `u_i` into its first clause gadget, then
    /// exit-to-entry arcs between consecutive gadgets.
    pub fn literal_chain(&self, lit: Literal) -> &[(usize, usize)] {
        &self.chains[lit.var][usize::from(!lit.positive)]
    }

    /// `(clause, slot)` occurrences of a literal in clause order.
    pub fn occurrences(&self, lit: Literal) -> Vec<(usize, Slot)> {
        self.formula
            .clauses
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.iter().position(|&l| l == lit).map(|pos| (j, Slot::from_index(pos))))
            .collect()
    }

    fn gadget_of(&self, v: usize) -> Option<usize> {
        match self.role(v) {
            Some(VertexRole::Gadget { clause, .. }) => Some(clause),
            _ => None,
        }
    }

    fn to_global(&self, clause: usize, local: usize) -> usize {
        self.gadget_base(clause) + local
    }
}

/// Builds the instance digraph of order `6p + k + 1`.
pub fn reduce_cnf(f: &CnfFormula) -> ReducedInstance {
    let k = f.var_count;
    let p = f.clauses.len();
    let mut inst = ReducedInstance { formula: f.clone(), digraph: Digraph::empty(1 + k + 6 * p), chains: Vec::new() };
    let gadget = build_gadget();
    let mut arcs = Vec::new();
    for j in 0..p {
        arcs.extend(gadget.arcs().iter().map(|&(a, b)| (inst.to_global(j, a), inst.to_global(j, b))));
    }
    for i in 0..k {
        arcs.push((inst.root(), inst.var_vertex(i)));
    }
    let mut chains = Vec::with_capacity(k);
    for i in 0..k {
        let chain = [true, false].map(|positive| {
            let mut prev = inst.var_vertex(i);
            let mut chain = Vec::new();
            for (j, slot) in inst.occurrences(Literal::new(i, positive)) {
                chain.push((prev, inst.gadget_vertex(j, slot, Layer::One)));
                prev = inst.gadget_vertex(j, slot, Layer::Two);
            }
            chain
        });
        arcs.extend(chain.iter().flatten().copied());
        chains.push(chain);
    }
    inst.digraph = Digraph::new(1 + k + 6 * p, arcs).expect("instance arcs are valid");
    inst.chains = chains;
    inst
}

/// Out-branching with exactly `k` leaves built from a satisfying assignment.
pub fn assignment_to_branching(inst: &ReducedInstance, a: &Assignment) -> Result<OutTree, ReductionError> {
    let f = inst.formula();
    if a.0.len() != f.var_count {
        return Err(ReductionError::AssignmentLength { expected: f.var_count, found: a.0.len() });
    }
    if let Some(j) = f.first_unsatisfied(a) {
        return Err(ReductionError::UncoveredClause(j));
    }
    let traversals: Vec<&BTreeMap<Slot, Vec<usize>>> = f
        .clauses
        .iter()
        .map(|c| {
            let entries = (0..3).filter(|&pos| a.value(c[pos])).map(Slot::from_index).collect();
            gadget_traversal(&entries).expect("gadget admits every nonempty entry set")
        })
        .collect();

    let mut arcs = Vec::new();
    for i in 0..f.var_count {
        arcs.push((inst.root(), inst.var_vertex(i)));
        let mut prev = inst.var_vertex(i);
        for (j, slot) in inst.occurrences(Literal::new(i, a.0[i])) {
            for &local in &traversals[j][&slot] {
                let v = inst.to_global(j, local);
                arcs.push((prev, v));
                prev = v;
            }
        }
    }
    let tree = OutTree::from_arcs(inst.root(), arcs).expect("variable paths form an out-tree");
    let leaves = validate_out_branching(inst.digraph(), &tree)?;
    debug_assert_eq!(leaves, f.var_count);
    Ok(tree)
}

/// Splits a `k`-leaf out-branching into the paths hanging from `u_1, …, u_k`.
fn variable_paths(inst: &ReducedInstance, b: &OutTree) -> Result<Vec<Vec<usize>>, ReductionError> {
    let k = inst.var_count();
    let leaves = validate_out_branching(inst.digraph(), b)?;
    if leaves != k {
        return Err(ReductionError::WrongLeafCount { expected: k, found: leaves });
    }
    if b.root() != inst.root() || b.out_degree(inst.root()) != k {
        return Err(ReductionError::NotPathShaped);
    }
    (0..k)
        .map(|i| {
            let mut path = vec![inst.var_vertex(i)];
            loop {
                match b.children(*path.last().expect("nonempty")) {
                    [] => return Ok(path),
                    [c] => path.push(*c),
                    _ => return Err(ReductionError::NotPathShaped),
                }
            }
        })
        .collect()
}

fn tree_from_paths(inst: &ReducedInstance, paths: &[Vec<usize>]) -> Result<OutTree, ReductionError> {
    let mut arcs = Vec::new();
    for path in paths {
        arcs.push((inst.root(), path[0]));
        arcs.extend(path.windows(2).map(|w| (w[0], w[1])));
    }
    let tree = OutTree::from_arcs(inst.root(), arcs).map_err(BranchingError::from)?;
    validate_out_branching(inst.digraph(), &tree)?;
    Ok(tree)
}

/// Where one variable path meets one gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetVisit {
    pub path: usize,
    pub clause: usize,
    /// index range of the visit within the path
    pub start: usize,
    pub end: usize,
    pub entry: usize,
    pub exit: usize,
}

fn gadget_visits(
    inst: &ReducedInstance,
    paths: &[Vec<usize>],
    clause: usize,
) -> Result<Vec<GadgetVisit>, ReductionError> {
    let mut visits = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let hits: Vec<usize> = (0..path.len()).filter(|&t| inst.gadget_of(path[t]) == Some(clause)).collect();
        let (Some(&start), Some(&end)) = (hits.first(), hits.last()) else {
            continue;
        };
        if end - start + 1 != hits.len() {
            return Err(ReductionError::UnexpectedTraversal { path: i, clause });
        }
        visits.push(GadgetVisit { path: i, clause, start, end, entry: path[start], exit: path[end] });
    }
    Ok(visits)
}

fn is_compatible(inst: &ReducedInstance, visit: &GadgetVisit) -> bool {
    match (inst.role(visit.entry), inst.role(visit.exit)) {
        (
            Some(VertexRole::Gadget { slot: s_in, layer: Layer::One, .. }),
            Some(VertexRole::Gadget { slot: s_out, layer: Layer::Two, .. }),
        ) => s_in == s_out,
        _ => false,
    }
}

/// The first (path, gadget) pair whose visit does not enter at `a1` and leave at `a2`.
pub fn audit_compatibility(inst: &ReducedInstance, b: &OutTree) -> Result<Option<GadgetVisit>, ReductionError> {
    let paths = variable_paths(inst, b)?;
    for j in 0..inst.clause_count() {
        if let Some(v) = gadget_visits(inst, &paths, j)?.into_iter().find(|v| !is_compatible(inst, v)) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Rewires a `k`-leaf out-branching so that every variable path crosses each gadget
/// it meets straight from some `a1` to the matching `a2`, keeping `k` leaves.
///
/// Gadgets are processed in clause order. Within an incompatible gadget the visiting
/// segments are replaced by the compatible traversal for the same entry slots, and
/// each old continuation out of the gadget is reattached to the new path ending at
/// the vertex it left from. With two entries this is exactly the swap
/// `P_a' = P_a[u, a1] a2`, `P_b' = P_b[u, b1] c1 c2 b2 P_a[b2, *]`.
pub fn repair_to_compatible(inst: &ReducedInstance, b: &OutTree) -> Result<OutTree, ReductionError> {
    let mut paths = variable_paths(inst, b)?;
    for j in 0..inst.clause_count() {
        let visits = gadget_visits(inst, &paths, j)?;
        if visits.iter().all(|v| is_compatible(inst, v)) {
            continue;
        }
        let mut entries = BTreeMap::new();
        for v in &visits {
            match inst.role(v.entry) {
                Some(VertexRole::Gadget { slot, layer: Layer::One, .. }) => {
                    entries.insert(slot, v.path);
                }
                _ => return Err(ReductionError::UnexpectedTraversal { path: v.path, clause: j }),
            }
        }
        let slots: BTreeSet<Slot> = entries.keys().copied().collect();
        let traversal = gadget_traversal(&slots).expect("nonempty entry set");

        let mut continuations: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in &visits {
            let rest = paths[v.path][v.end + 1..].to_vec();
            if !rest.is_empty() {
                continuations.insert(v.exit, rest);
            }
        }
        let mut rebuilt = Vec::new();
        for v in &visits {
            let slot = Slot::ALL.into_iter().find(|s| entries.get(s) == Some(&v.path)).expect("entered");
            let mut path = paths[v.path][..v.start].to_vec();
            path.extend(traversal[&slot].iter().map(|&l| inst.to_global(j, l)));
            if let Some(rest) = continuations.remove(&inst.gadget_vertex(j, slot, Layer::Two)) {
                path.extend(rest);
            }
            rebuilt.push((v.path, path));
        }
        if let Some((&exit, _)) = continuations.iter().next() {
            let path = visits.iter().find(|v| v.exit == exit).expect("exit of some visit").path;
            return Err(ReductionError::UnexpectedTraversal { path, clause: j });
        }
        for (i, path) in rebuilt {
            paths[i] = path;
        }
    }
    let tree = tree_from_paths(inst, &paths)?;
    let leaves = tree.leaf_count();
    if leaves != inst.var_count() {
        return Err(ReductionError::WrongLeafCount { expected: inst.var_count(), found: leaves });
    }
    Ok(tree)
}

/// Reads a satisfying assignment off a `k`-leaf out-branching: after repair, `v_i` is
/// true iff the path from `u_i` starts along the positive chain. A path with no arc
/// gives true.
pub fn decode_assignment(inst: &ReducedInstance, b: &OutTree) -> Result<Assignment, ReductionError> {
    let repaired = repair_to_compatible(inst, b)?;
    let values = (0..inst.var_count())
        .map(|i| match repaired.children(inst.var_vertex(i)) {
            [first] => inst.literal_chain(Literal::new(i, false)).first().map(|&(_, v)| v) != Some(*first),
            _ => true,
        })
        .collect();
    let a = Assignment(values);
    match inst.formula().first_unsatisfied(&a) {
        Some(j) => Err(ReductionError::DecodeUnsatisfied(j)),
        None => Ok(a),
    }
}

/// The width-1 path decomposition `{r}, {u_1} … {u_k}` followed, per clause, by
/// `{z1,y1}, {y1,x1}, {x2,y2}, {y2,z2}`.
pub fn canonical_width1_dpd(inst: &ReducedInstance) -> PathDecomposition {
    use Layer::*;
    use Slot::*;
    let mut bags = vec![vec![inst.root()]];
    bags.extend((0..inst.var_count()).map(|i| vec![inst.var_vertex(i)]));
    for j in 0..inst.clause_count() {
        let g = |s, l| inst.gadget_vertex(j, s, l);
        bags.push(vec![g(Z, One), g(Y, One)]);
        bags.push(vec![g(Y, One), g(X, One)]);
        bags.push(vec![g(X, Two), g(Y, Two)]);
        bags.push(vec![g(Y, Two), g(Z, Two)]);
    }
    PathDecomposition::new(bags)
}

/// Which gadget statement a [`PropertyCheck`] is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetProperty {
    /// A hamiltonian `(a1, a2)`-linkage exists.
    OnePath,
    /// A hamiltonian `(a1, a2, b1, b2)`-linkage exists.
    TwoPaths,
    /// A hamiltonian `(a1, a2, b1, b2, c1, c2)`-linkage exists.
    ThreePaths,
    /// Every hamilton path from `a1` ends at `a2`.
    HamiltonEndsAtPartner,
    /// Disjoint covering paths from `a1`, `b1`, each with at least one arc, end at
    /// `(a2, b2)` or `(b2, c1)`.
    PairEndings,
}

impl GadgetProperty {
    pub const ALL: [GadgetProperty; 5] = [
        GadgetProperty::OnePath,
        GadgetProperty::TwoPaths,
        GadgetProperty::ThreePaths,
        GadgetProperty::HamiltonEndsAtPartner,
        GadgetProperty::PairEndings,
    ];

    pub fn label(self) -> &'static str {
        ["(i)", "(ii)", "(iii)", "(iv)", "(v)"][self as usize]
    }
}

/// One property under one relabelling `x, y, z -> relabel[0], relabel[1], relabel[2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub property: GadgetProperty,
    pub relabel: [Slot; 3],
    pub cyclic: bool,
    pub holds: bool,
    /// local-id paths: a witness for existence properties, a counterexample for universal ones
    pub paths: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetReport {
    pub checks: Vec<PropertyCheck>,
    /// Covering pairs outside the two endings of (v) in which one path has no arc,
    /// per cyclic relabelling. (v) itself is checked over paths with at least one arc.
    pub pair_ending_exceptions: Vec<([Slot; 3], Vec<Vec<usize>>)>,
}

impl GadgetReport {
    pub fn cyclic_all_hold(&self) -> bool {
        self.checks.iter().filter(|c| c.cyclic).all(|c| c.holds)
    }

    pub fn get(&self, property: GadgetProperty, relabel: [Slot; 3]) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == property && c.relabel == relabel)
    }
}

/// All simple paths of `h` starting at `start` (including the trivial one).
fn simple_paths_from(h: &Digraph, start: usize) -> Vec<Vec<usize>> {
    fn walk(h: &Digraph, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        let last = *path.last().expect("nonempty");
        for &w in h.out_neighbors(last) {
            if !path.contains(&w) {
                path.push(w);
                walk(h, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(h, &mut vec![start], &mut out);
    out
}

/// Families of pairwise vertex-disjoint paths, one from each start, covering all of `h`.
fn covering_families(h: &Digraph, starts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let per_start: Vec<Vec<Vec<usize>>> = starts.iter().map(|&s| simple_paths_from(h, s)).collect();
    let mut families = vec![Vec::new()];
    for options in &per_start {
        let mut next = Vec::new();
        for fam in &families {
            for p in options {
                let clash = fam.iter().any(|q: &Vec<usize>| q.iter().any(|v| p.contains(v)));
                if !clash {
                    let mut f = fam.clone();
                    f.push(p.clone());
                    next.push(f);
                }
            }
        }
        families = next;
    }
    families.retain(|f| f.iter().map(Vec::len).sum::<usize>() == h.order());
    families
}

/// Exhaustively checks the five gadget properties under all six relabellings of
/// `x, y, z`; the three cyclic relabellings are the gadget's automorphisms.
pub fn verify_gadget_properties() -> GadgetReport {
    let h = build_gadget();
    let perms: [[Slot; 3]; 6] = {
        use Slot::*;
        [[X, Y, Z], [Y, Z, X], [Z, X, Y], [X, Z, Y], [Y, X, Z], [Z, Y, X]]
    };
    let mut checks = Vec::new();
    let mut exceptions = Vec::new();
    for relabel in perms {
        let cyclic = relabel[1] == relabel[0].next();
        let one = |i: usize| gadget_local(relabel[i], Layer::One);
        let two = |i: usize| gadget_local(relabel[i], Layer::Two);
        for property in GadgetProperty::ALL {
            let (holds, paths) = match property {
                GadgetProperty::OnePath | GadgetProperty::TwoPaths | GadgetProperty::ThreePaths => {
                    let count = property as usize + 1;
                    let starts: Vec<usize> = (0..count).map(one).collect();
                    let witness = covering_families(&h, &starts)
                        .into_iter()
                        .find(|f| f.iter().enumerate().all(|(i, p)| *p.last().expect("nonempty") == two(i)));
                    (witness.is_some(), witness.unwrap_or_default())
                }
                GadgetProperty::HamiltonEndsAtPartner => {
                    let bad = covering_families(&h, &[one(0)])
                        .into_iter()
                        .find(|f| *f[0].last().expect("nonempty") != two(0));
                    (bad.is_none(), bad.unwrap_or_default())
                }
                GadgetProperty::PairEndings => {
                    let allowed = [(two(0), two(1)), (two(1), one(2))];
                    let (nontrivial, trivial): (Vec<_>, Vec<_>) = covering_families(&h, &[one(0), one(1)])
                        .into_iter()
                        .filter(|f| {
                            let ends = (*f[0].last().expect("nonempty"), *f[1].last().expect("nonempty"));
                            !allowed.contains(&ends)
                        })
                        .partition(|f| f.iter().all(|p| p.len() >= 2));
                    if cyclic {
                        exceptions.extend(trivial.into_iter().map(|f| (relabel, f)));
                    }
                    let bad = nontrivial.into_iter().next();
                    (bad.is_none(), bad.unwrap_or_default())
                }
            };
            checks.push(PropertyCheck { property, relabel, cyclic, holds, paths });
        }
    }
    GadgetReport { checks, pair_ending_exceptions: exceptions }
}
