//! Algebraic model counting on DNNF circuits.
//!
//! For an idempotent `⊕` and a labelling with `λ(x) ⊕ λ(¬x) = e⊗` for every
//! variable, one bottom-up pass over a DNNF circuit computes
//! `⊕_{models α} ⊗_{l true in α} λ(l)`. Over the max-plus semiring this is a
//! weighted maximal model, which drives the Kemeny, Slater and reversal
//! scoring engines.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{DnnfCircuit, Node};
use crate::logic::{Assignment, Lit, Var};
use crate::model::{Ballot, IssueSet, Profile};
use crate::{Error, Result};

pub trait Semiring {
    type Value: Clone + PartialEq + fmt::Debug;

    const IDEMPOTENT_PLUS: bool;
    const COMMUTATIVE: bool;

    /// Neutral element of `⊕`.
    fn zero() -> Self::Value;
    /// Neutral element of `⊗`.
    fn one() -> Self::Value;
    fn plus(a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn times(a: &Self::Value, b: &Self::Value) -> Self::Value;
}

/// Integers extended with both infinities, ordered `-inf < n < +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    NegInf,
    Finite(i64),
    PosInf,
}

impl Extended {
    pub fn finite(self) -> Option<i64> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl From<i64> for Extended {
    fn from(v: i64) -> Self {
        Extended::Finite(v)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => f.write_str("+inf"),
        }
    }
}

/// `(Z ∪ {±inf}, max, +, -inf, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct MaxPlus;

impl Semiring for MaxPlus {
    type Value = Extended;

    const IDEMPOTENT_PLUS: bool = true;
    const COMMUTATIVE: bool = true;

    fn zero() -> Extended {
        Extended::NegInf
    }

    fn one() -> Extended {
        Extended::Finite(0)
    }

    fn plus(a: &Extended, b: &Extended) -> Extended {
        *a.max(b)
    }

    fn times(a: &Extended, b: &Extended) -> Extended {
        use Extended::*;
        match (*a, *b) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(x), Finite(y)) => match x.checked_add(y) {
                Some(s) => Finite(s),
                None if x > 0 => PosInf,
                None => NegInf,
            },
        }
    }
}

/// `({0,1}, ∨, ∧, 0, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    const IDEMPOTENT_PLUS: bool = true;
    const COMMUTATIVE: bool = true;

    fn zero() -> bool {
        false
    }

    fn one() -> bool {
        true
    }

    fn plus(a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn times(a: &bool, b: &bool) -> bool {
        *a && *b
    }
}

/// Natural numbers with `+` and `*`. Not idempotent, so it is rejected by
/// [`amc_evaluate`] on plain DNNF.
#[derive(Debug, Clone, Copy)]
pub struct Counting;

impl Semiring for Counting {
    type Value = u64;

    const IDEMPOTENT_PLUS: bool = false;
    const COMMUTATIVE: bool = true;

    fn zero() -> u64 {
        0
    }

    fn one() -> u64 {
        1
    }

    fn plus(a: &u64, b: &u64) -> u64 {
        a.saturating_add(*b)
    }

    fn times(a: &u64, b: &u64) -> u64 {
        a.saturating_mul(*b)
    }
}

/// Labels for both literals of each variable.
#[derive(Debug)]
pub struct Labelling<S: Semiring> {
    labels: Vec<(S::Value, S::Value)>,
}

impl<S: Semiring> Clone for Labelling<S> {
    fn clone(&self) -> Self {
        Labelling {
            labels: self.labels.clone(),
        }
    }
}

impl<S: Semiring> PartialEq for Labelling<S> {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl<S: Semiring> Labelling<S> {
    /// Every literal labelled `e⊗`.
    pub fn new(num_vars: usize) -> Self {
        Labelling {
            labels: vec![(S::one(), S::one()); num_vars],
        }
    }

    pub fn from_pairs(labels: Vec<(S::Value, S::Value)>) -> Self {
        Labelling { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn set(&mut self, var: Var, pos: S::Value, neg: S::Value) {
        self.labels[var.index()] = (pos, neg);
    }

    pub fn get(&self, lit: Lit) -> &S::Value {
        let (pos, neg) = &self.labels[lit.var().index()];
        if lit.is_positive() {
            pos
        } else {
            neg
        }
    }

    pub fn pairs(&self) -> &[(S::Value, S::Value)] {
        &self.labels
    }

    /// Extend to `num_vars` variables with `e⊗` on the new literals.
    pub fn padded(mut self, num_vars: usize) -> Self {
        if self.labels.len() < num_vars {
            self.labels.resize(num_vars, (S::one(), S::one()));
        }
        self
    }

    pub fn is_neutral(&self) -> bool {
        self.labels.iter().all(|(p, n)| S::plus(p, n) == S::one())
    }

    /// `⊗` of the labels of the literals the ballot makes true.
    pub fn weight(&self, ballot: &Ballot) -> S::Value {
        ballot.values().iter().enumerate().fold(S::one(), |acc, (i, &v)| {
            S::times(&acc, self.get(Lit::new(Var::new(i), v)))
        })
    }

    /// `⊗` of the labels of the literals an assignment fixes true.
    pub fn fixed_weight(&self, assignment: &Assignment) -> S::Value {
        assignment
            .values()
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| Lit::new(Var::new(i), v)))
            .fold(S::one(), |acc, l| S::times(&acc, self.get(l)))
    }
}

impl Labelling<MaxPlus> {
    /// One line per issue: name, `λ(x)`, `λ(¬x)`.
    pub fn dump(&self, issues: &IssueSet) -> String {
        let mut out = String::new();
        for (i, name) in issues.names().enumerate() {
            let (p, n) = &self.labels[i];
            out.push_str(&format!("{name} {p} {n}\n"));
        }
        out
    }
}

fn check_preconditions<S: Semiring>(c: &DnnfCircuit, labels: &Labelling<S>) -> Result<()> {
    if !S::IDEMPOTENT_PLUS {
        return Err(Error::Contract("addition must be idempotent"));
    }
    if labels.len() < c.num_vars() {
        return Err(Error::Dimension {
            expected: c.num_vars(),
            found: labels.len(),
        });
    }
    if !labels.is_neutral() {
        return Err(Error::Contract("labelling must be neutral"));
    }
    Ok(())
}

/// Per-node values of the circuit conditioned on `assignment`: assigned
/// literals become `e⊗` or `e⊕`.
fn node_values<S: Semiring>(c: &DnnfCircuit, labels: &Labelling<S>, assignment: &Assignment) -> Vec<S::Value> {
    let nodes = c.circuit().nodes();
    let mut values: Vec<S::Value> = Vec::with_capacity(nodes.len());
    for node in nodes {
        let v = match node {
            Node::True => S::one(),
            Node::False => S::zero(),
            Node::Lit(l) => match assignment.lit_value(*l) {
                Some(true) => S::one(),
                Some(false) => S::zero(),
                None => labels.get(*l).clone(),
            },
            Node::And(children) => children
                .iter()
                .fold(S::one(), |acc, ch| S::times(&acc, &values[ch.index()])),
            Node::Or { children, .. } => children
                .iter()
                .fold(S::zero(), |acc, ch| S::plus(&acc, &values[ch.index()])),
        };
        values.push(v);
    }
    values
}

pub fn amc_evaluate<S: Semiring>(c: &DnnfCircuit, labels: &Labelling<S>) -> Result<S::Value> {
    amc_evaluate_under(c, labels, &Assignment::new(0))
}

/// AMC of the circuit conditioned on `assignment`. The fixed variables do
/// not contribute labels; see [`Labelling::fixed_weight`] to add them back.
pub fn amc_evaluate_under<S: Semiring>(
    c: &DnnfCircuit,
    labels: &Labelling<S>,
    assignment: &Assignment,
) -> Result<S::Value> {
    check_preconditions(c, labels)?;
    let values = node_values(c, labels, assignment);
    Ok(values[c.circuit().root().index()].clone())
}

pub fn amc_witness(c: &DnnfCircuit, labels: &Labelling<MaxPlus>, num_issues: usize) -> Result<Ballot> {
    amc_witness_under(c, labels, &Assignment::new(0), num_issues)
}

/// A ballot extending `assignment` that attains the conditioned AMC value,
/// found by tracing back maximizing children. Issues untouched by the
/// traced branch take the literal labelled `e⊗`, positive on ties.
pub fn amc_witness_under(
    c: &DnnfCircuit,
    labels: &Labelling<MaxPlus>,
    assignment: &Assignment,
    num_issues: usize,
) -> Result<Ballot> {
    check_preconditions(c, labels)?;
    let values = node_values(c, labels, assignment);
    let root = c.circuit().root();
    if values[root.index()] == Extended::NegInf {
        return Err(Error::NoWitness);
    }
    let mut chosen = assignment.clone();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        match c.circuit().node(id) {
            Node::Lit(l) => chosen.assign(*l),
            Node::And(children) => stack.extend(children),
            Node::Or { children, .. } => {
                let best = children
                    .iter()
                    .find(|ch| values[ch.index()] == values[id.index()])
                    .expect("an or node attains its value on some child");
                stack.push(*best);
            }
            Node::True | Node::False => {}
        }
    }
    let ballot = (0..num_issues)
        .map(|i| {
            let v = Var::new(i);
            chosen.get(v).unwrap_or_else(|| *labels.get(v.pos()) == MaxPlus::one())
        })
        .collect();
    Ok(Ballot::new(ballot))
}

/// `λ(x) = n1 - max(n0, n1)`, `λ(¬x) = n0 - max(n0, n1)` per issue.
fn shifted(counts: impl Iterator<Item = (i64, i64)>) -> Labelling<MaxPlus> {
    Labelling::from_pairs(
        counts
            .map(|(n1, n0)| {
                let shift = n1.max(n0);
                (Extended::Finite(n1 - shift), Extended::Finite(n0 - shift))
            })
            .collect(),
    )
}

fn count(n: usize) -> i64 {
    i64::try_from(n).expect("count fits in i64")
}

/// Majority strengths of both literals, shifted so the larger is 0.
pub fn kemeny_labels(profile: &Profile) -> Labelling<MaxPlus> {
    let p = count(profile.len());
    shifted((0..profile.num_issues()).map(|i| {
        let ones = count(profile.ballots().iter().filter(|b| b.get(i)).count());
        (ones, p - ones)
    }))
}

/// `-1` on literals the majority outcome makes false, `0` elsewhere.
pub fn slater_labels(profile: &Profile) -> Labelling<MaxPlus> {
    let m = profile.majority_outcome();
    Labelling::from_pairs(
        m.values()
            .iter()
            .map(|v| match v {
                Some(true) => (Extended::Finite(0), Extended::Finite(-1)),
                Some(false) => (Extended::Finite(-1), Extended::Finite(0)),
                None => (Extended::Finite(0), Extended::Finite(0)),
            })
            .collect(),
    )
}

/// Fewest flips turning `ballot` into a rational ballot making `lit` false.
///
/// Computed as a max-plus AMC over the circuit conditioned on `lit` false,
/// with `0` on literals the ballot makes true and `-1` on the others, plus
/// the flip of `lit`'s own issue. If no rational ballot makes `lit` false
/// the score is 0.
pub fn reversal_score(c: &DnnfCircuit, ballot: &Ballot, lit: Lit) -> Result<u64> {
    let num_vars = c.num_vars().max(ballot.len());
    let mu = Labelling::<MaxPlus>::from_pairs(
        ballot
            .values()
            .iter()
            .map(|&v| {
                if v {
                    (Extended::Finite(0), Extended::Finite(-1))
                } else {
                    (Extended::Finite(-1), Extended::Finite(0))
                }
            })
            .collect(),
    )
    .padded(num_vars);
    let mut falsify = Assignment::new(num_vars);
    falsify.assign(!lit);
    match amc_evaluate_under(c, &mu, &falsify)? {
        Extended::Finite(v) => {
            let own = u64::from(ballot.satisfies(lit));
            Ok(v.unsigned_abs() + own)
        }
        Extended::NegInf => Ok(0),
        Extended::PosInf => Err(Error::Invariant("reversal score labels are finite")),
    }
}

/// Total reversal scores of both literals over the profile, shifted.
pub fn reversal_labels(profile: &Profile, c: &DnnfCircuit) -> Result<Labelling<MaxPlus>> {
    let mut distinct: BTreeMap<&Ballot, i64> = BTreeMap::new();
    for b in profile.ballots() {
        *distinct.entry(b).or_default() += 1;
    }
    let mut totals = Vec::with_capacity(profile.num_issues());
    for i in 0..profile.num_issues() {
        let v = Var::new(i);
        let (mut n1, mut n0) = (0i64, 0i64);
        for (b, &mult) in &distinct {
            n1 += mult * count(reversal_score(c, b, v.pos())? as usize);
            n0 += mult * count(reversal_score(c, b, v.neg())? as usize);
        }
        totals.push((n1, n0));
    }
    Ok(shifted(totals.into_iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BudgetSpec, CircuitBuilder};
    use crate::logic::CnfFormula;

    fn b(s: &str) -> Ballot {
        s.parse().unwrap()
    }

    fn fin(v: i64) -> Extended {
        Extended::Finite(v)
    }

    fn xnor_circuit() -> DnnfCircuit {
        let mut bld = CircuitBuilder::new(2);
        let (x1, x2) = (Var::new(0), Var::new(1));
        let p1 = bld.lit(x1.pos());
        let p2 = bld.lit(x2.pos());
        let n1 = bld.lit(x1.neg());
        let n2 = bld.lit(x2.neg());
        let a = bld.and(vec![p1, p2]);
        let c = bld.and(vec![n1, n2]);
        let root = bld.or(vec![a, c]);
        DnnfCircuit::new(bld.finish(root)).unwrap()
    }

    fn three_voters() -> Profile {
        Profile::new(vec![b("110"), b("101"), b("011")]).unwrap()
    }

    fn at_most_two() -> DnnfCircuit {
        crate::circuit::compile_cnf_to_dnnf(&CnfFormula::from_dimacs_clauses(3, &[&[-1, -2, -3]]), &[])
    }

    #[test]
    fn amc_examples() {
        let lab = Labelling::<MaxPlus>::from_pairs(vec![(fin(0), fin(-1)), (fin(0), fin(-1))]);
        assert_eq!(amc_evaluate(&xnor_circuit(), &lab).unwrap(), fin(0));
        assert_eq!(
            amc_evaluate(&DnnfCircuit::constant(false, 2), &lab).unwrap(),
            Extended::NegInf
        );
        let one = Labelling::<MaxPlus>::from_pairs(vec![(fin(0), fin(-4))]);
        assert_eq!(amc_evaluate(&DnnfCircuit::constant(true, 1), &one).unwrap(), fin(0));
    }

    #[test]
    fn amc_preconditions() {
        let bad = Labelling::<MaxPlus>::from_pairs(vec![(fin(1), fin(-1)), (fin(0), fin(0))]);
        assert_eq!(
            amc_evaluate(&xnor_circuit(), &bad),
            Err(Error::Contract("labelling must be neutral"))
        );
        let counting = Labelling::<Counting>::new(2);
        assert_eq!(
            amc_evaluate(&xnor_circuit(), &counting),
            Err(Error::Contract("addition must be idempotent"))
        );
        let short = Labelling::<MaxPlus>::new(1);
        assert!(matches!(
            amc_evaluate(&xnor_circuit(), &short),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn boolean_amc_is_satisfiability() {
        let lab = Labelling::<Boolean>::new(3);
        assert!(amc_evaluate(&xnor_circuit(), &lab.clone().padded(2)).unwrap());
        assert!(!amc_evaluate(&DnnfCircuit::constant(false, 3), &lab).unwrap());
    }

    #[test]
    fn witness_examples() {
        let lab = Labelling::<MaxPlus>::from_pairs(vec![(fin(0), fin(-1)), (fin(0), fin(-1))]);
        assert_eq!(amc_witness(&xnor_circuit(), &lab, 2).unwrap(), b("11"));

        let lab = Labelling::<MaxPlus>::from_pairs(vec![(fin(0), fin(-3)), (fin(-2), fin(0))]);
        assert_eq!(amc_witness(&DnnfCircuit::constant(true, 2), &lab, 2).unwrap(), b("10"));

        let budget = BudgetSpec::new(vec![1, 1, 1], 2).unwrap().encode();
        let w = amc_witness(&budget, &kemeny_labels(&three_voters()), 3).unwrap();
        assert!([b("110"), b("101"), b("011")].contains(&w));

        assert_eq!(
            amc_witness(&DnnfCircuit::constant(false, 2), &lab, 2),
            Err(Error::NoWitness)
        );
    }

    #[test]
    fn kemeny_label_examples() {
        let lab = kemeny_labels(&three_voters());
        assert_eq!(lab.get(Var::new(0).pos()), &fin(0));
        assert_eq!(lab.get(Var::new(0).neg()), &fin(-1));
        assert!(lab.is_neutral());

        let unanimous = Profile::new(vec![b("1"), b("1"), b("1")]).unwrap();
        assert_eq!(kemeny_labels(&unanimous).pairs(), &[(fin(0), fin(-3))]);

        let tied = Profile::new(vec![b("1"), b("0")]).unwrap();
        assert_eq!(kemeny_labels(&tied).pairs(), &[(fin(0), fin(0))]);
    }

    #[test]
    fn slater_label_examples() {
        let lab = slater_labels(&three_voters());
        assert_eq!(lab.pairs(), &[(fin(0), fin(-1)); 3]);
        let p = Profile::new(vec![b("10"), b("00")]).unwrap();
        assert_eq!(slater_labels(&p).pairs(), &[(fin(0), fin(0)), (fin(-1), fin(0))]);
    }

    #[test]
    fn reversal_score_examples() {
        let c = at_most_two();
        let x1 = Var::new(0);
        let x3 = Var::new(2);
        assert_eq!(reversal_score(&c, &b("110"), x1.pos()).unwrap(), 1);
        assert_eq!(reversal_score(&c, &b("110"), x3.neg()).unwrap(), 2);

        let top = DnnfCircuit::constant(true, 3);
        assert_eq!(reversal_score(&top, &b("110"), x1.pos()).unwrap(), 1);
        assert_eq!(reversal_score(&top, &b("110"), x3.pos()).unwrap(), 0);

        // x1 forced true: no rational ballot makes x1 false.
        let forced = crate::circuit::compile_cnf_to_dnnf(&CnfFormula::from_dimacs_clauses(2, &[&[1]]), &[]);
        assert_eq!(reversal_score(&forced, &b("10"), x1.pos()).unwrap(), 0);
    }

    #[test]
    fn reversal_label_examples() {
        let p = three_voters();
        let top = DnnfCircuit::constant(true, 3);
        assert_eq!(reversal_labels(&p, &top).unwrap(), kemeny_labels(&p));

        // n_{x1,1} = 1 + 1 + 0 and n_{x1,0} = 0 + 0 + 2 under Γ
        let lab = reversal_labels(&p, &at_most_two()).unwrap();
        assert_eq!(lab.get(Var::new(0).pos()), &fin(0));
        assert_eq!(lab.get(Var::new(0).neg()), &fin(0));

        let rejected = Profile::new(vec![b("0"), b("0")]).unwrap();
        let top = DnnfCircuit::constant(true, 1);
        assert_eq!(reversal_labels(&rejected, &top).unwrap().pairs(), &[(fin(-2), fin(0))]);
    }

    #[test]
    fn maxplus_infinities() {
        use Extended::*;
        assert_eq!(MaxPlus::times(&NegInf, &PosInf), NegInf);
        assert_eq!(MaxPlus::times(&fin(3), &PosInf), PosInf);
        assert_eq!(MaxPlus::plus(&NegInf, &fin(-7)), fin(-7));
        assert_eq!(MaxPlus::times(&fin(i64::MAX), &fin(1)), PosInf);
    }

    #[test]
    fn dump_lists_issues() {
        let lab = kemeny_labels(&three_voters());
        let text = lab.dump(&IssueSet::numbered(3));
        assert_eq!(text.lines().next(), Some("x1 0 -1"));
    }
}
