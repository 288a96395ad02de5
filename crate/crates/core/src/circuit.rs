//! NNF and DNNF circuits.
//!
//! Circuits are stored as a node array in topological order (children have
//! smaller ids than their parents) with a single root. [`CircuitBuilder`]
//! hash-conses nodes and folds constants, so shared subcircuits are built
//! once. A [`DnnfCircuit`] is an [`NnfCircuit`] whose conjunctions have been
//! checked to be variable-disjoint; satisfiability, conditioning, clause
//! entailment and model enumeration are polynomial on it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::logic::{Assignment, Clause, CnfFormula, Lit, Var};
use crate::model::{Ballot, IssueSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    True,
    False,
    Lit(Lit),
    And(Vec<NodeId>),
    /// A disjunction. `decision` names the variable when the node has the
    /// shape `(v ∧ ..) ∨ (¬v ∧ ..)`.
    Or {
        decision: Option<Var>,
        children: Vec<NodeId>,
    },
}

impl Node {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::And(c) | Node::Or { children: c, .. } => c,
            _ => &[],
        }
    }
}

/// Fixed-width set of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet(Vec<u64>);

impl VarSet {
    fn empty(num_vars: usize) -> Self {
        VarSet(vec![0; num_vars.div_ceil(64)])
    }

    fn insert(&mut self, v: Var) {
        self.0[v.index() / 64] |= 1 << (v.index() % 64);
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0[v.index() / 64] >> (v.index() % 64) & 1 == 1
    }

    fn intersects(&self, other: &VarSet) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn union_with(&mut self, other: &VarSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

/// A rooted NNF circuit over variables `0 .. num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NnfCircuit {
    nodes: Vec<Node>,
    root: NodeId,
    num_vars: usize,
}

impl NnfCircuit {
    /// Admits a node list as-is after checking that children precede their
    /// parents, literals are in range and the root exists.
    pub fn from_nodes(nodes: Vec<Node>, root: NodeId, num_vars: usize) -> Result<Self> {
        if root.index() >= nodes.len() {
            return Err(Error::MalformedCircuit(format!("root {} out of range", root.index())));
        }
        for (i, node) in nodes.iter().enumerate() {
            if let Some(c) = node.children().iter().find(|c| c.index() >= i) {
                return Err(Error::MalformedCircuit(format!(
                    "node {i} refers to node {} which does not precede it",
                    c.index()
                )));
            }
            let var = match node {
                Node::Lit(l) => Some(l.var()),
                Node::Or { decision, .. } => *decision,
                _ => None,
            };
            if let Some(v) = var.filter(|v| v.index() >= num_vars) {
                return Err(Error::MalformedCircuit(format!(
                    "node {i} uses variable {} beyond {num_vars}",
                    v.index() + 1
                )));
            }
        }
        Ok(NnfCircuit { nodes, root, num_vars })
    }

    pub fn constant(value: bool, num_vars: usize) -> Self {
        let node = if value { Node::True } else { Node::False };
        NnfCircuit {
            nodes: vec![node],
            root: NodeId(0),
            num_vars,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.children().len()).sum()
    }

    /// Number of disjunction nodes.
    pub fn or_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Or { .. })).count()
    }

    /// Same circuit over a wider variable universe.
    pub fn widened(mut self, num_vars: usize) -> Self {
        self.num_vars = self.num_vars.max(num_vars);
        self
    }

    /// Variables mentioned below each node.
    pub fn var_sets(&self) -> Vec<VarSet> {
        let mut sets: Vec<VarSet> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut s = VarSet::empty(self.num_vars);
            match node {
                Node::Lit(l) => s.insert(l.var()),
                _ => {
                    for c in node.children() {
                        s.union_with(&sets[c.index()]);
                    }
                }
            }
            sets.push(s);
        }
        sets
    }

    /// Variables mentioned anywhere under the root.
    pub fn vars(&self) -> VarSet {
        self.var_sets().swap_remove(self.root.index())
    }

    pub fn is_decomposable(&self) -> bool {
        let sets = self.var_sets();
        self.nodes.iter().all(|node| match node {
            Node::And(children) => {
                let mut seen = VarSet::empty(self.num_vars);
                children.iter().all(|c| {
                    let s = &sets[c.index()];
                    let ok = !seen.intersects(s);
                    seen.union_with(s);
                    ok
                })
            }
            _ => true,
        })
    }

    /// Whether every disjunction is a decision node `(v ∧ α) ∨ (¬v ∧ β)`
    /// and the circuit is decomposable, which makes it an FBDD.
    pub fn is_fbdd(&self) -> bool {
        let implies = |id: NodeId, lit: Lit| match self.node(id) {
            Node::Lit(l) => *l == lit,
            Node::And(children) => children
                .iter()
                .any(|c| matches!(self.node(*c), Node::Lit(l) if *l == lit)),
            _ => false,
        };
        self.is_decomposable()
            && self.nodes.iter().all(|node| match node {
                Node::Or {
                    decision: Some(v),
                    children,
                } => {
                    children.len() == 2
                        && ((implies(children[0], v.pos()) && implies(children[1], v.neg()))
                            || (implies(children[0], v.neg()) && implies(children[1], v.pos())))
                }
                Node::Or { .. } => false,
                _ => true,
            })
    }

    /// Boolean value under an assignment covering every variable in the
    /// circuit.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool> {
        let mut value = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::True => true,
                Node::False => false,
                Node::Lit(l) => assignment
                    .lit_value(*l)
                    .ok_or(Error::MissingVariable(l.var().index() as u32 + 1))?,
                Node::And(c) => c.iter().all(|c| value[c.index()]),
                Node::Or { children, .. } => children.iter().any(|c| value[c.index()]),
            };
            value.push(v);
        }
        Ok(value[self.root.index()])
    }

    /// Replace literals over assigned variables by constants and fold.
    pub fn condition(&self, assignment: &Assignment) -> NnfCircuit {
        let mut b = CircuitBuilder::new(self.num_vars);
        let mut map: Vec<NodeId> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let id = match node {
                Node::True => b.top(),
                Node::False => b.bottom(),
                Node::Lit(l) => match assignment.lit_value(*l) {
                    Some(true) => b.top(),
                    Some(false) => b.bottom(),
                    None => b.lit(*l),
                },
                Node::And(c) => b.and(c.iter().map(|c| map[c.index()]).collect()),
                Node::Or { decision, children } => {
                    let children = children.iter().map(|c| map[c.index()]).collect();
                    b.or_tagged(*decision, children)
                }
            };
            map.push(id);
        }
        b.finish(map[self.root.index()])
    }
}

/// Hash-consing circuit builder with constant folding.
#[derive(Debug)]
pub struct CircuitBuilder {
    nodes: Vec<Node>,
    unique: BTreeMap<Node, NodeId>,
    num_vars: usize,
}

impl CircuitBuilder {
    pub fn new(num_vars: usize) -> Self {
        CircuitBuilder {
            nodes: Vec::new(),
            unique: BTreeMap::new(),
            num_vars,
        }
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = NodeId::new(self.nodes.len());
        self.nodes.push(node.clone());
        self.unique.insert(node, id);
        id
    }

    pub fn top(&mut self) -> NodeId {
        self.intern(Node::True)
    }

    pub fn bottom(&mut self) -> NodeId {
        self.intern(Node::False)
    }

    pub fn lit(&mut self, lit: Lit) -> NodeId {
        self.intern(Node::Lit(lit))
    }

    pub fn and(&mut self, mut children: Vec<NodeId>) -> NodeId {
        if children.iter().any(|c| self.nodes[c.index()] == Node::False) {
            return self.bottom();
        }
        children.retain(|c| self.nodes[c.index()] != Node::True);
        children.sort_unstable();
        children.dedup();
        match children.len() {
            0 => self.top(),
            1 => children[0],
            _ => self.intern(Node::And(children)),
        }
    }

    pub fn or(&mut self, children: Vec<NodeId>) -> NodeId {
        self.or_tagged(None, children)
    }

    /// Disjunction that keeps its decision tag while both branches survive
    /// folding.
    pub fn or_tagged(&mut self, decision: Option<Var>, mut children: Vec<NodeId>) -> NodeId {
        if children.iter().any(|c| self.nodes[c.index()] == Node::True) {
            return self.top();
        }
        children.retain(|c| self.nodes[c.index()] != Node::False);
        if decision.is_none() {
            children.sort_unstable();
            children.dedup();
        }
        match children.len() {
            0 => self.bottom(),
            1 => children[0],
            n => {
                let decision = decision.filter(|_| n == 2);
                self.intern(Node::Or { decision, children })
            }
        }
    }

    /// `(v ∧ high) ∨ (¬v ∧ low)`.
    pub fn decision(&mut self, var: Var, high: NodeId, low: NodeId) -> NodeId {
        let pos = self.lit(var.pos());
        let neg = self.lit(var.neg());
        let hi = self.and(vec![pos, high]);
        let lo = self.and(vec![neg, low]);
        self.or_tagged(Some(var), vec![hi, lo])
    }

    /// Keep only the nodes reachable from `root`, renumbered in order.
    pub fn finish(self, root: NodeId) -> NnfCircuit {
        let mut reachable = vec![false; self.nodes.len()];
        reachable[root.index()] = true;
        for i in (0..self.nodes.len()).rev() {
            if reachable[i] {
                for c in self.nodes[i].children() {
                    reachable[c.index()] = true;
                }
            }
        }
        let mut remap = vec![NodeId(u32::MAX); self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, node) in self.nodes.into_iter().enumerate() {
            if !reachable[i] {
                continue;
            }
            remap[i] = NodeId::new(nodes.len());
            let node = match node {
                Node::And(c) => Node::And(c.iter().map(|c| remap[c.index()]).collect()),
                Node::Or { decision, children } => Node::Or {
                    decision,
                    children: children.iter().map(|c| remap[c.index()]).collect(),
                },
                other => other,
            };
            nodes.push(node);
        }
        NnfCircuit {
            nodes,
            root: remap[root.index()],
            num_vars: self.num_vars,
        }
    }
}

/// A decomposable NNF circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnnfCircuit(NnfCircuit);

impl DnnfCircuit {
    pub fn new(circuit: NnfCircuit) -> Result<Self> {
        if circuit.is_decomposable() {
            Ok(DnnfCircuit(circuit))
        } else {
            Err(Error::NotDecomposable)
        }
    }

    pub fn constant(value: bool, num_vars: usize) -> Self {
        DnnfCircuit(NnfCircuit::constant(value, num_vars))
    }

    pub fn circuit(&self) -> &NnfCircuit {
        &self.0
    }

    pub fn into_circuit(self) -> NnfCircuit {
        self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.num_vars
    }

    pub fn widened(self, num_vars: usize) -> Self {
        DnnfCircuit(self.0.widened(num_vars))
    }

    pub fn condition(&self, assignment: &Assignment) -> DnnfCircuit {
        // Conditioning only removes variables, so conjuncts stay disjoint.
        DnnfCircuit(self.0.condition(assignment))
    }

    pub fn is_satisfiable(&self) -> bool {
        self.is_satisfiable_under(&Assignment::new(0))
    }

    /// Satisfiability of the circuit conditioned on `assignment`, computed
    /// in one pass without building the conditioned circuit.
    pub fn is_satisfiable_under(&self, assignment: &Assignment) -> bool {
        let nodes = &self.0.nodes;
        let mut sat = Vec::with_capacity(nodes.len());
        for node in nodes {
            let v = match node {
                Node::True => true,
                Node::False => false,
                Node::Lit(l) => assignment.lit_value(*l) != Some(false),
                Node::And(c) => c.iter().all(|c| sat[c.index()]),
                Node::Or { children, .. } => children.iter().any(|c| sat[c.index()]),
            };
            sat.push(v);
        }
        sat[self.0.root.index()]
    }

    /// Whether every model satisfies the clause.
    pub fn entails_clause(&self, clause: &Clause) -> bool {
        let mut refutation = Assignment::new(self.num_vars());
        for &l in clause.lits() {
            refutation.assign(!l);
        }
        !self.is_satisfiable_under(&refutation)
    }

    /// Ballots over the first `num_issues` variables that extend to a model,
    /// in lexicographic order with 0 before 1.
    pub fn models(&self, num_issues: usize) -> Models<'_> {
        Models {
            circuit: self,
            num_issues,
            assignment: Assignment::new(num_issues.max(self.num_vars())),
            stack: Vec::new(),
            state: ModelsState::Fresh,
        }
    }

    pub fn enumerate_models(&self, issues: &IssueSet) -> Vec<Ballot> {
        self.models(issues.len()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModelsState {
    Fresh,
    Running,
    Done,
}

/// Depth-first model enumeration that only descends into satisfiable
/// prefixes, so each step costs one pass over the circuit per issue.
#[derive(Debug)]
pub struct Models<'a> {
    circuit: &'a DnnfCircuit,
    num_issues: usize,
    assignment: Assignment,
    // next value to try per depth: 0, 1, or 2 for exhausted
    stack: Vec<u8>,
    state: ModelsState,
}

impl Iterator for Models<'_> {
    type Item = Ballot;

    fn next(&mut self) -> Option<Ballot> {
        match self.state {
            ModelsState::Done => return None,
            ModelsState::Fresh => {
                self.state = ModelsState::Running;
                if !self.circuit.is_satisfiable_under(&self.assignment) {
                    self.state = ModelsState::Done;
                    return None;
                }
                if self.num_issues == 0 {
                    self.state = ModelsState::Done;
                    return Some(Ballot::new(Vec::new()));
                }
                self.stack.push(0);
            }
            ModelsState::Running => {}
        }
        loop {
            let Some(&choice) = self.stack.last() else {
                self.state = ModelsState::Done;
                return None;
            };
            let depth = self.stack.len() - 1;
            let var = Var::new(depth);
            if choice == 2 {
                self.stack.pop();
                self.assignment.unset(var);
                continue;
            }
            *self.stack.last_mut().expect("nonempty") = choice + 1;
            self.assignment.set(var, choice == 1);
            if !self.circuit.is_satisfiable_under(&self.assignment) {
                continue;
            }
            if depth + 1 == self.num_issues {
                let values = self.assignment.values()[..self.num_issues]
                    .iter()
                    .map(|v| v.expect("prefix assigned"))
                    .collect();
                return Some(Ballot::new(values));
            }
            self.stack.push(0);
        }
    }
}

/// Compile a CNF formula into an equivalent decision-DNNF by Shannon
/// expansion along `order`, with unit propagation, splitting into
/// variable-disjoint components and a cache keyed by the residual clause
/// set. Variables missing from `order` are branched on last, by index.
pub fn compile_cnf_to_dnnf(formula: &CnfFormula, order: &[Var]) -> DnnfCircuit {
    let n = formula.num_vars();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    for v in order.iter().map(|v| v.index()).chain(0..n) {
        if v < n && rank[v] == usize::MAX {
            rank[v] = next;
            next += 1;
        }
    }
    let mut compiler = Compiler {
        builder: CircuitBuilder::new(n),
        cache: BTreeMap::new(),
        rank,
    };
    let mut clauses = formula.clauses().to_vec();
    clauses.sort();
    clauses.dedup();
    let root = compiler.compile(clauses);
    DnnfCircuit(compiler.builder.finish(root))
}

struct Compiler {
    builder: CircuitBuilder,
    cache: BTreeMap<Vec<Clause>, NodeId>,
    rank: Vec<usize>,
}

/// Assign `lit` true in a clause list. `None` on an empty clause.
fn assign_lit(clauses: &[Clause], lit: Lit) -> Option<Vec<Clause>> {
    let mut out = Vec::with_capacity(clauses.len());
    for c in clauses {
        if c.lits().contains(&lit) {
            continue;
        }
        if c.lits().contains(&!lit) {
            let rest: Vec<Lit> = c.lits().iter().copied().filter(|&l| l != !lit).collect();
            if rest.is_empty() {
                return None;
            }
            out.push(Clause::from_sorted(rest));
        } else {
            out.push(c.clone());
        }
    }
    Some(out)
}

impl Compiler {
    fn compile(&mut self, mut clauses: Vec<Clause>) -> NodeId {
        if clauses.iter().any(Clause::is_empty) {
            return self.builder.bottom();
        }
        let mut units = Vec::new();
        while let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c.lits()[0]) {
            units.push(unit);
            match assign_lit(&clauses, unit) {
                Some(rest) => clauses = rest,
                None => return self.builder.bottom(),
            }
        }
        clauses.sort();
        clauses.dedup();

        let mut parts: Vec<NodeId> = units.iter().map(|&l| self.builder.lit(l)).collect();
        for component in self.components(clauses) {
            parts.push(self.compile_component(component));
        }
        self.builder.and(parts)
    }

    fn compile_component(&mut self, clauses: Vec<Clause>) -> NodeId {
        if let Some(&id) = self.cache.get(&clauses) {
            return id;
        }
        let var = clauses
            .iter()
            .flat_map(|c| c.lits().iter().map(|l| l.var()))
            .min_by_key(|v| self.rank[v.index()])
            .expect("component has a literal");
        let high = match assign_lit(&clauses, var.pos()) {
            Some(rest) => self.compile(rest),
            None => self.builder.bottom(),
        };
        let low = match assign_lit(&clauses, var.neg()) {
            Some(rest) => self.compile(rest),
            None => self.builder.bottom(),
        };
        let id = self.builder.decision(var, high, low);
        self.cache.insert(clauses, id);
        id
    }

    /// Split clauses into groups that share no variables.
    fn components(&self, clauses: Vec<Clause>) -> Vec<Vec<Clause>> {
        if clauses.is_empty() {
            return Vec::new();
        }
        let n = self.rank.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for c in &clauses {
            let first = c.lits()[0].var().index();
            for l in &c.lits()[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, l.var().index()));
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<Clause>> = BTreeMap::new();
        for c in clauses {
            let r = find(&mut parent, c.lits()[0].var().index());
            groups.entry(r).or_default().push(c);
        }
        groups.into_values().collect()
    }
}

/// Item costs and a total budget; a ballot is affordable when the costs of
/// its accepted items sum to at most the budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetSpec {
    costs: Vec<u64>,
    budget: u64,
}

impl BudgetSpec {
    pub fn new(costs: Vec<u64>, budget: u64) -> Result<Self> {
        if let Some(i) = costs.iter().position(|&c| c == 0) {
            return Err(Error::InvalidBudget(format!(
                "cost of issue {} must be positive",
                i + 1
            )));
        }
        Ok(BudgetSpec { costs, budget })
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn num_issues(&self) -> usize {
        self.costs.len()
    }

    pub fn cost(&self, ballot: &Ballot) -> u64 {
        self.costs
            .iter()
            .zip(ballot.values())
            .filter(|(_, &v)| v)
            .map(|(c, _)| c)
            .sum()
    }

    pub fn is_affordable(&self, ballot: &Ballot) -> bool {
        self.cost(ballot) <= self.budget
    }

    /// FBDD over the grid of decision points `(level, spent)`.
    ///
    /// The node at level `i` with `spent` already committed decides issue
    /// `i` and represents the assignments to issues `i..n` that fit in the
    /// remaining `budget - spent`. Only points reachable from `(0, 0)` are
    /// built.
    pub fn encode(&self) -> DnnfCircuit {
        let n = self.costs.len();
        let mut levels: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); n + 1];
        levels[0].insert(0);
        for i in 0..n {
            let current: Vec<u64> = levels[i].iter().copied().collect();
            for spent in current {
                levels[i + 1].insert(spent);
                if let Some(s) = spent.checked_add(self.costs[i]).filter(|&s| s <= self.budget) {
                    levels[i + 1].insert(s);
                }
            }
        }

        let mut b = CircuitBuilder::new(n);
        let top = b.top();
        let bottom = b.bottom();
        let mut below: BTreeMap<u64, NodeId> = levels[n].iter().map(|&s| (s, top)).collect();
        for i in (0..n).rev() {
            let mut here = BTreeMap::new();
            for &spent in &levels[i] {
                let take = spent
                    .checked_add(self.costs[i])
                    .filter(|&s| s <= self.budget)
                    .map_or(bottom, |s| below[&s]);
                let skip = below[&spent];
                here.insert(spent, b.decision(Var::new(i), take, skip));
            }
            below = here;
        }
        DnnfCircuit(b.finish(below[&0]))
    }
}

/// Budget circuit for `spec` over `issues`, checking the widths agree.
pub fn encode_budget(spec: &BudgetSpec, issues: &IssueSet) -> Result<DnnfCircuit> {
    if spec.num_issues() != issues.len() {
        return Err(Error::Dimension {
            expected: issues.len(),
            found: spec.num_issues(),
        });
    }
    Ok(spec.encode())
}

impl core::fmt::Display for BudgetSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let costs: Vec<_> = self.costs.iter().map(ToString::to_string).collect();
        write!(f, "costs {}\nbudget {}", costs.join(" "), self.budget)
    }
}
