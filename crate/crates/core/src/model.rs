//! Issues, ballots, partial ballots and profiles.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::logic::Lit;
use crate::{Error, Result};

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// Ordered set of issue names. Positions are the canonical index for every
/// ballot over these issues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueSet {
    names: Vec<String>,
}

impl IssueSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(Error::InvalidIssues(format!("bad issue name {name:?}")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidIssues(format!("duplicate issue {name}")));
            }
        }
        Ok(IssueSet { names })
    }

    /// Issues named `x1 .. xn`.
    pub fn numbered(n: usize) -> Self {
        IssueSet {
            names: (1..=n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// A complete truth assignment to the issues.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ballot(Vec<bool>);

impl Ballot {
    pub fn new(values: Vec<bool>) -> Self {
        Ballot(values)
    }

    /// Ballot of width `n` whose issue `i` is bit `i` of `bits`, most
    /// significant issue first, so counting up `bits` walks the ballots in
    /// lexicographic order.
    pub fn from_index(n: usize, bits: u64) -> Self {
        Ballot((0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, issue: usize) -> bool {
        self.0[issue]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// Whether the literal is made true by this ballot.
    pub fn satisfies(&self, lit: Lit) -> bool {
        self.0[lit.var().index()] == lit.is_positive()
    }

    pub fn hamming(&self, other: &Ballot) -> Result<usize> {
        check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Distance to a partial ballot: only decided positions can disagree.
    pub fn hamming_to_partial(&self, other: &PartialBallot) -> Result<usize> {
        check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| matches!(b, Some(v) if v != *a))
            .count())
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.0 {
            f.write_str(if v { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Ballot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::BallotSyntax(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Ballot)
    }
}

/// A three-valued assignment; `None` is the undecided value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialBallot(Vec<Option<bool>>);

impl PartialBallot {
    pub fn new(values: Vec<Option<bool>>) -> Self {
        PartialBallot(values)
    }

    pub fn undecided(n: usize) -> Self {
        PartialBallot(alloc::vec![None; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, issue: usize) -> Option<bool> {
        self.0[issue]
    }

    pub fn set(&mut self, issue: usize, value: Option<bool>) {
        self.0[issue] = value;
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.0
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// The ballot this partial ballot denotes, if no position is undecided.
    pub fn to_ballot(&self) -> Option<Ballot> {
        self.0.iter().copied().collect::<Option<Vec<_>>>().map(Ballot)
    }

    pub fn agrees(&self, ballot: &Ballot) -> Result<bool> {
        check_len(self.len(), ballot.len())?;
        Ok(self.0.iter().zip(&ballot.0).all(|(p, b)| p.is_none_or(|v| v == *b)))
    }
}

impl From<&Ballot> for PartialBallot {
    fn from(b: &Ballot) -> Self {
        PartialBallot(b.0.iter().map(|&v| Some(v)).collect())
    }
}

impl fmt::Display for PartialBallot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            f.write_str(match v {
                Some(true) => "1",
                Some(false) => "0",
                None => "*",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PartialBallot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                _ => Err(Error::BallotSyntax(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(PartialBallot)
    }
}

/// A nonempty sequence of ballots of equal width.
///
/// Rationality with respect to an integrity constraint is checked where the
/// constraint is known, see [`crate::rules::Constraint::validate_profile`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    ballots: Vec<Ballot>,
    issues: usize,
}

impl Profile {
    pub fn new(ballots: Vec<Ballot>) -> Result<Self> {
        let issues = ballots.first().ok_or(Error::EmptyProfile)?.len();
        for b in &ballots {
            check_len(issues, b.len())?;
        }
        Ok(Profile { ballots, issues })
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    /// Number of ballots.
    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_issues(&self) -> usize {
        self.issues
    }

    /// Number of ballots making `lit` true.
    pub fn majority_strength(&self, lit: Lit) -> Result<usize> {
        let idx = lit.var().index();
        if idx >= self.issues {
            return Err(Error::UnknownIssue(idx));
        }
        Ok(self.ballots.iter().filter(|b| b.satisfies(lit)).count())
    }

    /// Per-issue strict majority; ties stay undecided.
    pub fn majority_outcome(&self) -> PartialBallot {
        let p = self.ballots.len();
        PartialBallot(
            (0..self.issues)
                .map(|i| {
                    let ones = self.ballots.iter().filter(|b| b.get(i)).count();
                    if 2 * ones > p {
                        Some(true)
                    } else if 2 * (p - ones) > p {
                        Some(false)
                    } else {
                        None
                    }
                })
                .collect(),
        )
    }

    pub fn max_hamming(&self, ballot: &Ballot) -> Result<usize> {
        self.ballots
            .iter()
            .map(|b| ballot.hamming(b))
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    pub fn total_hamming(&self, ballot: &Ballot) -> Result<usize> {
        self.ballots.iter().map(|b| ballot.hamming(b)).sum()
    }
}
