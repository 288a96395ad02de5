//! Aggregation rules and outcome determination.
//!
//! [`outcome_decide`] answers whether some outcome of a rule agrees with a
//! partial ballot. It routes to a polynomial engine when the constraint
//! language supports one for the rule:
//!
//! - Kemeny, Slater and reversal scoring on DNNF (and budget) constraints go
//!   through max-plus algebraic model counting,
//! - Kemeny and Slater on Krom CNF use the majority outcome, which is always
//!   consistent there,
//! - ranked agenda (Tideman) runs its iterative definition with one
//!   satisfiability call per literal,
//!
//! and falls back to exhaustive enumeration otherwise.
//! [`outcomes_bruteforce`] transcribes every rule definition literally and
//! is the oracle the fast paths are tested against.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::amc::{
    amc_evaluate, amc_evaluate_under, kemeny_labels, reversal_labels, slater_labels, Extended, Labelling, MaxPlus,
    Semiring,
};
use crate::circuit::{compile_cnf_to_dnnf, BudgetSpec, DnnfCircuit};
use crate::logic::{Assignment, CnfFormula, Lit, SatBackend, Var};
use crate::model::{Ballot, PartialBallot, Profile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    Kemeny,
    Slater,
    Reversal,
    Young,
    MaxHamming,
    Tideman,
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [
        RuleId::Kemeny,
        RuleId::Slater,
        RuleId::Reversal,
        RuleId::Young,
        RuleId::MaxHamming,
        RuleId::Tideman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Kemeny => "kemeny",
            RuleId::Slater => "slater",
            RuleId::Reversal => "reversal",
            RuleId::Young => "young",
            RuleId::MaxHamming => "maxhamming",
            RuleId::Tideman => "tideman",
        }
    }

    /// Rules that return exactly the rational completions of a consistent
    /// majority outcome.
    pub fn is_majority_consistent(self) -> bool {
        matches!(self, RuleId::Kemeny | RuleId::Slater)
    }

    fn is_weighted_max_model(self) -> bool {
        matches!(self, RuleId::Kemeny | RuleId::Slater | RuleId::Reversal)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRule(s.into()))
    }
}

/// An integrity constraint in one of the supported languages.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Cnf { formula: CnfFormula, backend: SatBackend },
    Dnnf(DnnfCircuit),
    Budget { spec: BudgetSpec, circuit: DnnfCircuit },
}

impl Constraint {
    /// A CNF constraint solved with the cheapest procedure its fragments
    /// allow.
    pub fn cnf(formula: CnfFormula) -> Self {
        let backend = SatBackend::for_fragments(&formula.classify());
        Constraint::Cnf { formula, backend }
    }

    /// A CNF constraint with an explicit solver, which must fit the formula.
    pub fn cnf_with_backend(formula: CnfFormula, backend: SatBackend) -> Result<Self> {
        let fits = match &backend {
            SatBackend::Krom => formula.is_krom(),
            SatBackend::Horn => formula.is_horn(),
            SatBackend::RenamableHorn(r) => formula.rename(r).is_horn(),
            SatBackend::Generic => true,
        };
        if !fits {
            return Err(Error::Fragment(match backend {
                SatBackend::Krom => "Krom",
                SatBackend::Horn => "Horn",
                _ => "renamable Horn",
            }));
        }
        Ok(Constraint::Cnf { formula, backend })
    }

    pub fn dnnf(circuit: DnnfCircuit) -> Self {
        Constraint::Dnnf(circuit)
    }

    pub fn budget(spec: BudgetSpec) -> Self {
        let circuit = spec.encode();
        Constraint::Budget { spec, circuit }
    }

    pub fn num_vars(&self) -> usize {
        match self {
            Constraint::Cnf { formula, .. } => formula.num_vars(),
            Constraint::Dnnf(c) => c.num_vars(),
            Constraint::Budget { spec, .. } => spec.num_issues(),
        }
    }

    /// The DNNF form, if the constraint has one without compiling.
    pub fn as_dnnf(&self) -> Option<&DnnfCircuit> {
        match self {
            Constraint::Dnnf(c) | Constraint::Budget { circuit: c, .. } => Some(c),
            Constraint::Cnf { .. } => None,
        }
    }

    /// Whether satisfiability after instantiation is polynomial, which is
    /// what the iterative ranked agenda engine needs.
    pub fn has_tractable_instantiation(&self) -> bool {
        match self {
            Constraint::Cnf { backend, .. } => *backend != SatBackend::Generic,
            _ => true,
        }
    }

    fn check_issues(&self, n: usize) -> Result<()> {
        match self {
            Constraint::Budget { spec, .. } if spec.num_issues() != n => Err(Error::Dimension {
                expected: n,
                found: spec.num_issues(),
            }),
            _ => Ok(()),
        }
    }

    fn width(&self, n: usize) -> usize {
        self.num_vars().max(n)
    }

    /// Whether some model of the constraint extends the partial
    /// assignment. Auxiliary variables are existentially quantified.
    pub fn is_consistent(&self, assignment: &Assignment) -> bool {
        match self {
            Constraint::Cnf { formula, backend } => formula
                .instantiate(assignment)
                .solve_with(backend)
                .expect("backend validated against the formula")
                .is_some(),
            Constraint::Dnnf(c) | Constraint::Budget { circuit: c, .. } => c.is_satisfiable_under(assignment),
        }
    }

    pub fn is_rational(&self, ballot: &Ballot) -> bool {
        match self {
            Constraint::Budget { spec, .. } => spec.is_affordable(ballot),
            Constraint::Cnf { formula, .. } if formula.num_vars() <= ballot.len() => formula.evaluate(ballot.values()),
            _ => self.is_consistent(&Assignment::total(ballot.values())),
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        self.is_consistent(&Assignment::new(0))
    }

    /// Every ballot of the profile must satisfy the constraint.
    pub fn validate_profile(&self, profile: &Profile) -> Result<()> {
        self.check_issues(profile.num_issues())?;
        match profile.ballots().iter().position(|b| !self.is_rational(b)) {
            Some(index) => Err(Error::IrrationalBallot { index }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    KromMajority,
    DnnfAmc,
    TidemanIterative,
    BruteForce,
}

impl Engine {
    pub fn tag(self) -> &'static str {
        match self {
            Engine::KromMajority => "krom_majority",
            Engine::DnnfAmc => "dnnf_amc",
            Engine::TidemanIterative => "tideman_iterative",
            Engine::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Engine selection; `Auto` dispatches on rule and constraint language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    #[default]
    Auto,
    Amc,
    Krom,
    Tideman,
    Brute,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub engine: EngineChoice,
    /// Tie-break order on literals for ranked agenda. Unlisted literals
    /// follow in issue order, positive first.
    pub tie_break: Vec<Lit>,
    /// Largest issue count the enumeration oracle accepts.
    pub max_enumeration_issues: usize,
    /// Largest profile the Young search accepts.
    pub max_young_ballots: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            engine: EngineChoice::Auto,
            tie_break: Vec::new(),
            max_enumeration_issues: 20,
            max_young_ballots: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeAnswer {
    pub decision: bool,
    pub witness: Option<Ballot>,
    pub engine: Engine,
}

impl OutcomeAnswer {
    fn no(engine: Engine) -> Self {
        OutcomeAnswer {
            decision: false,
            witness: None,
            engine,
        }
    }

    fn yes(witness: Ballot, engine: Engine) -> Self {
        OutcomeAnswer {
            decision: true,
            witness: Some(witness),
            engine,
        }
    }
}

/// Decide whether some outcome of `rule` agrees with `partial`.
pub fn outcome_decide(
    rule: RuleId,
    constraint: &Constraint,
    profile: &Profile,
    partial: &PartialBallot,
    config: &Config,
) -> Result<OutcomeAnswer> {
    let n = profile.num_issues();
    if partial.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: partial.len(),
        });
    }
    constraint.validate_profile(profile)?;

    let answer = match (config.engine, rule, constraint) {
        (EngineChoice::Brute, ..) => brute_decide(rule, constraint, profile, partial, config)?,

        (EngineChoice::Auto | EngineChoice::Tideman, RuleId::Tideman, _) => {
            let winner = tideman_iterative(constraint, profile, &config.tie_break)?;
            let engine = if constraint.has_tractable_instantiation() {
                Engine::TidemanIterative
            } else {
                Engine::BruteForce
            };
            if partial.agrees(&winner)? {
                OutcomeAnswer::yes(winner, engine)
            } else {
                OutcomeAnswer::no(engine)
            }
        }
        (EngineChoice::Tideman, ..) => {
            return Err(Error::EngineMismatch {
                engine: "tideman",
                reason: "rules other than ranked agenda",
            })
        }

        (EngineChoice::Auto | EngineChoice::Amc, r, Constraint::Dnnf(c))
        | (EngineChoice::Auto | EngineChoice::Amc, r, Constraint::Budget { circuit: c, .. })
            if r.is_weighted_max_model() =>
        {
            dnnf_decide(r, c, profile, partial)?
        }
        (EngineChoice::Amc, r, Constraint::Cnf { formula, .. }) if r.is_weighted_max_model() => {
            let c = compile_cnf_to_dnnf(formula, &[]);
            dnnf_decide(r, &c, profile, partial)?
        }
        (EngineChoice::Amc, ..) => {
            return Err(Error::EngineMismatch {
                engine: "amc",
                reason: "rules other than kemeny, slater and reversal",
            })
        }

        (EngineChoice::Auto | EngineChoice::Krom, r, Constraint::Cnf { formula, .. })
            if r.is_majority_consistent() && formula.is_krom() =>
        {
            krom_majority_fastpath(r, formula, profile, partial)?
        }
        (EngineChoice::Krom, ..) => {
            return Err(Error::EngineMismatch {
                engine: "krom",
                reason: "anything but kemeny or slater over a Krom CNF",
            })
        }

        (EngineChoice::Auto, ..) => brute_decide(rule, constraint, profile, partial, config)?,
    };

    if let Some(w) = &answer.witness {
        if !constraint.is_rational(w) || !partial.agrees(w)? {
            return Err(Error::Invariant("witness must be rational and agree with the query"));
        }
    }
    Ok(answer)
}

fn brute_decide(
    rule: RuleId,
    constraint: &Constraint,
    profile: &Profile,
    partial: &PartialBallot,
    config: &Config,
) -> Result<OutcomeAnswer> {
    let outcomes = outcomes_bruteforce(rule, constraint, profile, config)?;
    for b in outcomes {
        if partial.agrees(&b)? {
            return Ok(OutcomeAnswer::yes(b, Engine::BruteForce));
        }
    }
    Ok(OutcomeAnswer::no(Engine::BruteForce))
}

fn rule_labels(rule: RuleId, c: &DnnfCircuit, profile: &Profile) -> Result<Labelling<MaxPlus>> {
    let labels = match rule {
        RuleId::Kemeny => kemeny_labels(profile),
        RuleId::Slater => slater_labels(profile),
        RuleId::Reversal => reversal_labels(profile, c)?,
        _ => {
            return Err(Error::EngineMismatch {
                engine: "amc",
                reason: "rules other than kemeny, slater and reversal",
            })
        }
    };
    Ok(labels.padded(c.num_vars()))
}

/// Best score among rational ballots extending `fixed`, counting the fixed
/// literals' own labels.
fn restricted_best(c: &DnnfCircuit, labels: &Labelling<MaxPlus>, fixed: &Assignment) -> Result<Extended> {
    let free = amc_evaluate_under(c, labels, fixed)?;
    Ok(MaxPlus::times(&free, &labels.fixed_weight(fixed)))
}

/// Weighted-max-model rules on a DNNF constraint.
///
/// Yes iff the best score over all rational ballots equals the best score
/// over those agreeing with `partial`. The witness is the lexicographically
/// smallest optimal ballot agreeing with `partial`, fixed one issue at a
/// time.
pub fn dnnf_decide(rule: RuleId, c: &DnnfCircuit, profile: &Profile, partial: &PartialBallot) -> Result<OutcomeAnswer> {
    let n = profile.num_issues();
    let labels = rule_labels(rule, c, profile)?.padded(n);
    let best = amc_evaluate(c, &labels)?;
    if best == Extended::NegInf {
        return Err(Error::NoRationalBallot);
    }
    let mut fixed = Assignment::from_partial(partial, c.num_vars().max(n));
    if restricted_best(c, &labels, &fixed)? != best {
        return Ok(OutcomeAnswer::no(Engine::DnnfAmc));
    }
    for i in 0..n {
        let v = Var::new(i);
        if fixed.get(v).is_some() {
            continue;
        }
        fixed.set(v, false);
        if restricted_best(c, &labels, &fixed)? != best {
            fixed.set(v, true);
            debug_assert_eq!(restricted_best(c, &labels, &fixed)?, best);
        }
    }
    let witness = Ballot::new((0..n).map(|i| fixed.get(Var::new(i)) == Some(true)).collect());
    Ok(OutcomeAnswer::yes(witness, Engine::DnnfAmc))
}

pub fn kemeny_dnnf(c: &DnnfCircuit, profile: &Profile, partial: &PartialBallot) -> Result<OutcomeAnswer> {
    dnnf_decide(RuleId::Kemeny, c, profile, partial)
}

pub fn slater_dnnf(c: &DnnfCircuit, profile: &Profile, partial: &PartialBallot) -> Result<OutcomeAnswer> {
    dnnf_decide(RuleId::Slater, c, profile, partial)
}

pub fn reversal_dnnf(c: &DnnfCircuit, profile: &Profile, partial: &PartialBallot) -> Result<OutcomeAnswer> {
    dnnf_decide(RuleId::Reversal, c, profile, partial)
}

/// Kemeny or Slater over a Krom constraint.
///
/// On rational profiles the majority outcome is consistent with any Krom
/// constraint, so the outcomes are exactly its rational completions. This
/// is checked, not assumed.
pub fn krom_majority_fastpath(
    rule: RuleId,
    formula: &CnfFormula,
    profile: &Profile,
    partial: &PartialBallot,
) -> Result<OutcomeAnswer> {
    if !rule.is_majority_consistent() {
        return Err(Error::EngineMismatch {
            engine: "krom",
            reason: "rules that are not majority-consistent",
        });
    }
    if !formula.is_krom() {
        return Err(Error::Fragment("Krom"));
    }
    let n = profile.num_issues();
    let width = formula.num_vars().max(n);
    let majority = profile.majority_outcome();
    if formula
        .instantiate(&Assignment::from_partial(&majority, width))
        .sat_krom()?
        .is_none()
    {
        return Err(Error::Invariant(
            "majority outcome of a rational profile is consistent with a Krom constraint",
        ));
    }

    let mut fixed = Assignment::from_partial(&majority, width);
    for (i, (m, s)) in majority.values().iter().zip(partial.values()).enumerate() {
        match (m, s) {
            (Some(a), Some(b)) if a != b => return Ok(OutcomeAnswer::no(Engine::KromMajority)),
            (None, Some(b)) => fixed.set(Var::new(i), *b),
            _ => {}
        }
    }
    let consistent = |a: &Assignment| -> Result<bool> { Ok(formula.instantiate(a).sat_krom()?.is_some()) };
    if !consistent(&fixed)? {
        return Ok(OutcomeAnswer::no(Engine::KromMajority));
    }
    for i in 0..n {
        let v = Var::new(i);
        if fixed.get(v).is_none() {
            fixed.set(v, false);
            if !consistent(&fixed)? {
                fixed.set(v, true);
            }
        }
    }
    let witness = Ballot::new((0..n).map(|i| fixed.get(Var::new(i)) == Some(true)).collect());
    Ok(OutcomeAnswer::yes(witness, Engine::KromMajority))
}

/// All `2n` issue literals ordered by tie-break rank: listed literals
/// first, then the rest in issue order with the positive literal first.
pub fn tie_break_order(num_issues: usize, preferred: &[Lit]) -> Vec<Lit> {
    let mut order: Vec<Lit> = Vec::with_capacity(2 * num_issues);
    for &l in preferred {
        if l.var().index() < num_issues && !order.contains(&l) {
            order.push(l);
        }
    }
    for code in 0..2 * num_issues {
        let l = Lit::from_code(code);
        if !order.contains(&l) {
            order.push(l);
        }
    }
    order
}

/// Literals sorted by majority strength, descending, ties by `tie_break`.
fn ranked_literals(profile: &Profile, tie_break: &[Lit]) -> Vec<Lit> {
    let mut order = tie_break_order(profile.num_issues(), tie_break);
    let strength: BTreeMap<Lit, usize> = order
        .iter()
        .map(|&l| (l, profile.majority_strength(l).expect("issue literal")))
        .collect();
    // stable sort keeps the tie-break order among equal strengths
    order.sort_by(|a, b| strength[b].cmp(&strength[a]));
    order
}

/// Ranked agenda: accept each literal in rank order unless its complement
/// is already accepted or accepting it makes the constraint inconsistent.
pub fn tideman_iterative(constraint: &Constraint, profile: &Profile, tie_break: &[Lit]) -> Result<Ballot> {
    let n = profile.num_issues();
    constraint.check_issues(n)?;
    if !constraint.is_satisfiable() {
        return Err(Error::NoRationalBallot);
    }
    let mut accepted = Assignment::new(constraint.width(n));
    for lit in ranked_literals(profile, tie_break) {
        if accepted.lit_value(lit).is_some() {
            continue;
        }
        accepted.assign(lit);
        if !constraint.is_consistent(&accepted) {
            accepted.unset(lit.var());
        }
    }
    (0..n)
        .map(|i| accepted.get(Var::new(i)))
        .collect::<Option<Vec<bool>>>()
        .map(Ballot::new)
        .ok_or(Error::Invariant("ranked agenda decides every issue"))
}

/// Every rational ballot, in lexicographic order.
pub fn rational_ballots(constraint: &Constraint, num_issues: usize, config: &Config) -> Result<Vec<Ballot>> {
    if num_issues > config.max_enumeration_issues || num_issues >= 64 {
        return Err(Error::ResourceLimit {
            what: "issue count for enumeration",
            limit: config.max_enumeration_issues,
            actual: num_issues,
        });
    }
    constraint.check_issues(num_issues)?;
    let rational: Vec<Ballot> = (0..1u64 << num_issues)
        .map(|bits| Ballot::from_index(num_issues, bits))
        .filter(|b| constraint.is_rational(b))
        .collect();
    if rational.is_empty() {
        return Err(Error::NoRationalBallot);
    }
    Ok(rational)
}

fn argmin_by<K: Ord>(candidates: Vec<Ballot>, mut key: impl FnMut(&Ballot) -> K) -> Vec<Ballot> {
    let keyed: Vec<(K, Ballot)> = candidates.into_iter().map(|b| (key(&b), b)).collect();
    let Some(best) = keyed.iter().map(|(k, _)| k).min() else {
        return Vec::new();
    };
    let best_positions: Vec<bool> = keyed.iter().map(|(k, _)| k == best).collect();
    keyed
        .into_iter()
        .zip(best_positions)
        .filter_map(|((_, b), keep)| keep.then_some(b))
        .collect()
}

/// Reversal scores by enumeration: fewest flips from `ballot` to a rational
/// ballot making `lit` false, 0 when there is none.
pub fn reversal_score_bruteforce(rational: &[Ballot], ballot: &Ballot, lit: Lit) -> usize {
    rational
        .iter()
        .filter(|r| !r.satisfies(lit))
        .map(|r| r.hamming(ballot).expect("same width"))
        .min()
        .unwrap_or(0)
}

/// The full outcome set of `rule`, by direct enumeration, sorted.
pub fn outcomes_bruteforce(
    rule: RuleId,
    constraint: &Constraint,
    profile: &Profile,
    config: &Config,
) -> Result<Vec<Ballot>> {
    let n = profile.num_issues();
    if rule == RuleId::Young {
        return young_outcomes(constraint, profile, config).map(|y| y.outcomes);
    }
    let rational = rational_ballots(constraint, n, config)?;
    let outcomes = match rule {
        RuleId::Kemeny => argmin_by(rational, |b| profile.total_hamming(b).expect("same width")),
        RuleId::Slater => {
            let m = profile.majority_outcome();
            argmin_by(rational, |b| b.hamming_to_partial(&m).expect("same width"))
        }
        RuleId::MaxHamming => argmin_by(rational, |b| profile.max_hamming(b).expect("same width")),
        RuleId::Reversal => {
            let mut totals = vec![(0usize, 0usize); n];
            for r in profile.ballots() {
                for (i, t) in totals.iter_mut().enumerate() {
                    let v = Var::new(i);
                    t.0 += reversal_score_bruteforce(&rational, r, v.pos());
                    t.1 += reversal_score_bruteforce(&rational, r, v.neg());
                }
            }
            let score = |b: &Ballot| -> usize {
                totals
                    .iter()
                    .zip(b.values())
                    .map(|(t, &v)| if v { t.0 } else { t.1 })
                    .sum()
            };
            argmin_by(rational.clone(), |b| core::cmp::Reverse(score(b)))
        }
        RuleId::Tideman => {
            // consistency of a partial assignment means agreeing with some
            // rational ballot
            let mut accepted = PartialBallot::undecided(n);
            for lit in ranked_literals(profile, &config.tie_break) {
                let i = lit.var().index();
                if accepted.get(i).is_some() {
                    continue;
                }
                accepted.set(i, Some(lit.is_positive()));
                if !rational.iter().any(|r| accepted.agrees(r).expect("same width")) {
                    accepted.set(i, None);
                }
            }
            vec![accepted
                .to_ballot()
                .ok_or(Error::Invariant("ranked agenda decides every issue"))?]
        }
        RuleId::Young => unreachable!("handled above"),
    };
    Ok(outcomes)
}

pub fn maxhamming_outcomes(constraint: &Constraint, profile: &Profile, config: &Config) -> Result<Vec<Ballot>> {
    outcomes_bruteforce(RuleId::MaxHamming, constraint, profile, config)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YoungOutcome {
    /// Fewest ballots whose deletion leaves a complete, rational majority.
    pub deletions: usize,
    pub outcomes: Vec<Ballot>,
}

/// Young's rule by searching deletions of increasing size. Sub-profiles are
/// enumerated as multiplicity vectors over the distinct ballots, so equal
/// ballots are never deleted in more than one way.
pub fn young_outcomes(constraint: &Constraint, profile: &Profile, config: &Config) -> Result<YoungOutcome> {
    let p = profile.len();
    if p > config.max_young_ballots {
        return Err(Error::ResourceLimit {
            what: "profile size for Young",
            limit: config.max_young_ballots,
            actual: p,
        });
    }
    constraint.check_issues(profile.num_issues())?;
    let mut distinct: BTreeMap<&Ballot, usize> = BTreeMap::new();
    for b in profile.ballots() {
        *distinct.entry(b).or_default() += 1;
    }
    let groups: Vec<(&Ballot, usize)> = distinct.into_iter().collect();
    let n = profile.num_issues();

    for deletions in 0..p {
        let mut found = BTreeSet::new();
        let mut kept = vec![0usize; groups.len()];
        sub_profiles(&groups, 0, p - deletions, &mut kept, &mut |kept| {
            let total: usize = kept.iter().sum();
            let mut ballot = Vec::with_capacity(n);
            for i in 0..n {
                let ones: usize = groups
                    .iter()
                    .zip(kept)
                    .filter(|((b, _), _)| b.get(i))
                    .map(|(_, k)| k)
                    .sum();
                if 2 * ones == total {
                    return;
                }
                ballot.push(2 * ones > total);
            }
            let ballot = Ballot::new(ballot);
            if constraint.is_rational(&ballot) {
                found.insert(ballot);
            }
        });
        if !found.is_empty() {
            return Ok(YoungOutcome {
                deletions,
                outcomes: found.into_iter().collect(),
            });
        }
    }
    Err(Error::Invariant(
        "a single remaining ballot is a complete rational majority",
    ))
}

/// Calls `visit` with every multiplicity vector `kept[i] <= groups[i].1`
/// summing to `remaining` over groups `from..`.
fn sub_profiles(
    groups: &[(&Ballot, usize)],
    from: usize,
    remaining: usize,
    kept: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if from == groups.len() {
        if remaining == 0 {
            visit(kept);
        }
        return;
    }
    let capacity_after: usize = groups[from + 1..].iter().map(|g| g.1).sum();
    for k in 0..=groups[from].1.min(remaining) {
        if remaining - k > capacity_after {
            continue;
        }
        kept[from] = k;
        sub_profiles(groups, from + 1, remaining - k, kept, visit);
    }
    kept[from] = 0;
}
