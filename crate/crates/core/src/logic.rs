//! CNF formulas, fragment classification and fragment-specific SAT solvers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Not;

use crate::model::PartialBallot;
use crate::{Error, Result};

/// A propositional variable, 0-based. Variables below the number of issues
/// are issues; anything above is auxiliary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: usize) -> Self {
        Var(u32::try_from(index).expect("variable index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A literal packed as `2 * var + negated`, so the derived order sorts by
/// variable first and puts the positive literal before the negative one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index in `0 .. 2 * num_vars`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Lit(u32::try_from(code).expect("literal code fits in u32"))
    }

    /// Signed 1-based DIMACS form.
    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 {
            return None;
        }
        let var = usize::try_from(lit.unsigned_abs() - 1).ok()?;
        Some(Lit::new(Var::new(var), lit > 0))
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A set of literals with no complementary pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Self> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(Error::Tautology(w[0].var().0));
        }
        Ok(Clause(lits))
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    /// Wraps literals already sorted, deduplicated and free of
    /// complementary pairs.
    pub(crate) fn from_sorted(lits: Vec<Lit>) -> Self {
        debug_assert!(lits.windows(2).all(|w| w[0].var() < w[1].var()));
        Clause(lits)
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.0.iter().filter(|l| l.is_positive()).count()
    }
}

/// A partial truth assignment over `0 .. len()` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<Option<bool>>);

impl Assignment {
    pub fn new(num_vars: usize) -> Self {
        Assignment(vec![None; num_vars])
    }

    pub fn total(values: &[bool]) -> Self {
        Assignment(values.iter().map(|&v| Some(v)).collect())
    }

    /// The decided issues of `partial`, widened to `num_vars` variables.
    pub fn from_partial(partial: &PartialBallot, num_vars: usize) -> Self {
        let mut values = partial.values().to_vec();
        values.resize(num_vars.max(values.len()), None);
        Assignment(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.0.get(var.index()).copied().flatten()
    }

    /// Truth value of `lit`, if its variable is assigned.
    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var()).map(|v| v == lit.is_positive())
    }

    pub fn set(&mut self, var: Var, value: bool) {
        if var.index() >= self.0.len() {
            self.0.resize(var.index() + 1, None);
        }
        self.0[var.index()] = Some(value);
    }

    pub fn assign(&mut self, lit: Lit) {
        self.set(lit.var(), lit.is_positive());
    }

    pub fn unset(&mut self, var: Var) {
        if let Some(v) = self.0.get_mut(var.index()) {
            *v = None;
        }
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.0
    }

    /// Assigned values with unassigned variables read as false.
    pub fn to_bools(&self) -> Vec<bool> {
        self.0.iter().map(|v| v.unwrap_or(false)).collect()
    }
}

/// Syntactic fragments a formula belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragments {
    pub krom: bool,
    pub horn: bool,
    pub definite_horn: bool,
    /// Variables whose complementation turns the formula Horn, when such a
    /// set exists.
    pub renaming: Option<Vec<Var>>,
}

impl Fragments {
    pub fn renamable_horn(&self) -> bool {
        self.renaming.is_some()
    }
}

/// Which satisfiability procedure to run on a formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatBackend {
    Krom,
    Horn,
    /// Horn after complementing the listed variables.
    RenamableHorn(Vec<Var>),
    Generic,
}

impl SatBackend {
    /// The cheapest applicable procedure for a formula with these fragments.
    pub fn for_fragments(frags: &Fragments) -> Self {
        if frags.horn {
            SatBackend::Horn
        } else if frags.krom {
            SatBackend::Krom
        } else if let Some(r) = &frags.renaming {
            SatBackend::RenamableHorn(r.clone())
        } else {
            SatBackend::Generic
        }
    }
}

/// Conjunction of clauses over `num_vars` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        for c in &clauses {
            if let Some(l) = c.lits().iter().find(|l| l.var().index() >= num_vars) {
                return Err(Error::UnknownIssue(l.var().index()));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Shorthand for tests and small callers: clauses as signed DIMACS
    /// literals. Panics on tautologies or out-of-range variables.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Self {
        let clauses = clauses
            .iter()
            .map(|c| Clause::new(c.iter().map(|&l| Lit::from_dimacs(l).expect("nonzero"))))
            .collect::<Result<Vec<_>>>()
            .expect("no tautologies");
        CnfFormula::new(num_vars, clauses).expect("variables in range")
    }

    pub fn top(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Same clauses over a wider variable universe.
    pub fn widened(&self, num_vars: usize) -> Self {
        CnfFormula {
            num_vars: self.num_vars.max(num_vars),
            clauses: self.clauses.clone(),
        }
    }

    pub fn is_krom(&self) -> bool {
        self.clauses.iter().all(|c| c.len() <= 2)
    }

    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(|c| c.positives() <= 1)
    }

    pub fn is_definite_horn(&self) -> bool {
        self.clauses.iter().all(|c| c.positives() == 1)
    }

    /// A set of variables whose complementation makes the formula Horn.
    ///
    /// Every pair of literals in a clause may not both be positive after
    /// renaming. With `r_v` meaning "flip v", a positive literal `v` stays
    /// positive iff `!r_v` and a negative one becomes positive iff `r_v`, so
    /// the pair constraint is the 2-clause over the same literals, read on
    /// the `r` variables.
    pub fn horn_renaming(&self) -> Option<Vec<Var>> {
        if self.is_horn() {
            return Some(Vec::new());
        }
        let mut pairs = Vec::new();
        for c in &self.clauses {
            let lits = c.lits();
            for i in 0..lits.len() {
                for j in i + 1..lits.len() {
                    pairs.push(Clause(vec![lits[i], lits[j]]));
                }
            }
        }
        let encoding = CnfFormula {
            num_vars: self.num_vars,
            clauses: pairs,
        };
        let model = krom_solve(&encoding)?;
        Some(
            (0..self.num_vars)
                .map(Var::new)
                .filter(|&v| model.get(v) == Some(true))
                .collect(),
        )
    }

    pub fn classify(&self) -> Fragments {
        Fragments {
            krom: self.is_krom(),
            horn: self.is_horn(),
            definite_horn: self.is_definite_horn(),
            renaming: self.horn_renaming(),
        }
    }

    /// Complement every literal over the given variables.
    pub fn rename(&self, vars: &[Var]) -> Self {
        let mut flip = vec![false; self.num_vars];
        for v in vars {
            flip[v.index()] = true;
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let mut lits: Vec<Lit> = c
                    .lits()
                    .iter()
                    .map(|&l| if flip[l.var().index()] { !l } else { l })
                    .collect();
                lits.sort_unstable();
                Clause(lits)
            })
            .collect();
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }

    /// Drop satisfied clauses and falsified literals. The result keeps the
    /// variable universe and may contain the empty clause.
    pub fn instantiate(&self, assignment: &Assignment) -> Self {
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.lits().iter().any(|&l| assignment.lit_value(l) == Some(true)))
            .map(|c| {
                Clause(
                    c.lits()
                        .iter()
                        .copied()
                        .filter(|&l| assignment.lit_value(l).is_none())
                        .collect(),
                )
            })
            .collect();
        CnfFormula {
            num_vars: self.num_vars,
            clauses,
        }
    }

    /// Truth value under a total assignment given as a slice.
    pub fn evaluate(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.lits().iter().any(|l| values[l.var().index()] == l.is_positive()))
    }

    pub fn sat_krom(&self) -> Result<Option<Assignment>> {
        if !self.is_krom() {
            return Err(Error::Fragment("Krom"));
        }
        Ok(krom_solve(self))
    }

    pub fn sat_horn(&self) -> Result<Option<Assignment>> {
        if !self.is_horn() {
            return Err(Error::Fragment("Horn"));
        }
        Ok(horn_minimal_model(self))
    }

    pub fn sat_renamable_horn(&self, renaming: &[Var]) -> Result<Option<Assignment>> {
        let renamed = self.rename(renaming);
        let Some(model) = renamed.sat_horn()? else {
            return Ok(None);
        };
        let mut values = model.to_bools();
        for v in renaming {
            values[v.index()] = !values[v.index()];
        }
        Ok(Some(Assignment::total(&values)))
    }

    pub fn sat_generic(&self) -> Option<Assignment> {
        let mut assignment = Assignment::new(self.num_vars);
        if dpll(&self.clauses, &mut assignment) {
            // Untouched variables are free.
            Some(Assignment::total(&assignment.to_bools()))
        } else {
            None
        }
    }

    pub fn solve_with(&self, backend: &SatBackend) -> Result<Option<Assignment>> {
        match backend {
            SatBackend::Krom => self.sat_krom(),
            SatBackend::Horn => self.sat_horn(),
            SatBackend::RenamableHorn(r) => self.sat_renamable_horn(r),
            SatBackend::Generic => Ok(self.sat_generic()),
        }
    }

    /// Satisfiability with the cheapest procedure the formula qualifies for.
    pub fn solve(&self) -> Option<Assignment> {
        let backend = SatBackend::for_fragments(&self.classify());
        self.solve_with(&backend)
            .expect("backend chosen from the formula's own fragments")
    }
}

/// Strongly connected components of a graph given as adjacency lists.
/// Component ids come out in reverse topological order: every edge goes
/// from a component to one with an equal or smaller id.
pub(crate) fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut n_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (u, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[u] == UNSEEN {
                index[u] = counter;
                low[u] = counter;
                counter += 1;
                stack.push(u);
            }
            if let Some(&v) = adj[u].get(*edge) {
                *edge += 1;
                if index[v] == UNSEEN {
                    call.push((v, 0));
                } else if comp[v] == UNSEEN {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    comp[w] = n_comp;
                    if w == u {
                        break;
                    }
                }
                n_comp += 1;
            }
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
        }
    }
    comp
}

/// 2SAT via the implication graph. Assumes every clause has at most two
/// literals.
fn krom_solve(f: &CnfFormula) -> Option<Assignment> {
    let mut adj = vec![Vec::new(); 2 * f.num_vars];
    for c in &f.clauses {
        match *c.lits() {
            [] => return None,
            [a] => adj[(!a).code()].push(a.code()),
            [a, b] => {
                adj[(!a).code()].push(b.code());
                adj[(!b).code()].push(a.code());
            }
            _ => unreachable!("krom_solve called on a non-Krom clause"),
        }
    }
    let comp = strongly_connected_components(&adj);
    let mut values = Vec::with_capacity(f.num_vars);
    for v in 0..f.num_vars {
        let (p, n) = (Var::new(v).pos().code(), Var::new(v).neg().code());
        if comp[p] == comp[n] {
            return None;
        }
        // The literal whose component is closer to the sinks is true.
        values.push(comp[p] < comp[n]);
    }
    Some(Assignment::total(&values))
}

/// Minimal model of a Horn formula by counter-based unit propagation.
fn horn_minimal_model(f: &CnfFormula) -> Option<Assignment> {
    let mut pending: Vec<usize> = Vec::with_capacity(f.clauses.len());
    let mut watchers = vec![Vec::new(); f.num_vars];
    let mut values = vec![false; f.num_vars];
    let mut queue = Vec::new();

    for (ci, c) in f.clauses.iter().enumerate() {
        let body = c.lits().iter().filter(|l| !l.is_positive()).count();
        pending.push(body);
        for l in c.lits().iter().filter(|l| !l.is_positive()) {
            watchers[l.var().index()].push(ci);
        }
        if body == 0 {
            queue.push(ci);
        }
    }

    let head = |ci: usize| f.clauses[ci].lits().iter().copied().find(|l| l.is_positive());
    while let Some(ci) = queue.pop() {
        let h = head(ci)?;
        let v = h.var().index();
        if values[v] {
            continue;
        }
        values[v] = true;
        for &cj in &watchers[v] {
            pending[cj] -= 1;
            if pending[cj] == 0 {
                queue.push(cj);
            }
        }
    }
    Some(Assignment::total(&values))
}

enum Propagation {
    Conflict,
    Done,
}

fn unit_propagate(clauses: &[Clause], assignment: &mut Assignment, trail: &mut Vec<Var>) -> Propagation {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for &l in c.lits() {
                match assignment.lit_value(l) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return Propagation::Conflict,
                (1, Some(l)) => {
                    assignment.assign(l);
                    trail.push(l.var());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Propagation::Done;
        }
    }
}

fn dpll(clauses: &[Clause], assignment: &mut Assignment) -> bool {
    let mut trail = Vec::new();
    if let Propagation::Conflict = unit_propagate(clauses, assignment, &mut trail) {
        for v in trail {
            assignment.unset(v);
        }
        return false;
    }
    // Branch on a variable of the shortest open clause.
    let branch = clauses
        .iter()
        .filter(|c| !c.lits().iter().any(|&l| assignment.lit_value(l) == Some(true)))
        .filter_map(|c| {
            let open: Vec<Lit> = c
                .lits()
                .iter()
                .copied()
                .filter(|&l| assignment.lit_value(l).is_none())
                .collect();
            open.first().map(|&l| (open.len(), l))
        })
        .min_by_key(|&(len, _)| len)
        .map(|(_, l)| l);
    let Some(lit) = branch else {
        return true;
    };
    for choice in [lit, !lit] {
        assignment.assign(choice);
        if dpll(clauses, assignment) {
            return true;
        }
        assignment.unset(choice.var());
    }
    for v in trail {
        assignment.unset(v);
    }
    false
}
