//! Random instance generators and enumeration oracles shared by the
//! integration tests. Oracles here only use truth tables and circuit
//! evaluation, never the engines under test.

#![allow(dead_code)]

use jagg_core::amc::{Extended, Labelling, MaxPlus};
use jagg_core::circuit::{CircuitBuilder, DnnfCircuit, NodeId};
use jagg_core::{Assignment, Ballot, Clause, CnfFormula, Lit, Profile, Var};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn all_ballots(n: usize) -> impl Iterator<Item = Ballot> {
    (0..1u64 << n).map(move |i| Ballot::from_index(n, i))
}

fn random_clause(rng: &mut StdRng, n: usize, len: usize, max_positive: Option<usize>) -> Clause {
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let mut positives = 0;
    let lits = vars[..len.min(n)].iter().map(|&v| {
        let mut positive = rng.gen_bool(0.5);
        if let Some(max) = max_positive {
            if positives >= max {
                positive = false;
            }
        }
        positives += usize::from(positive);
        Lit::new(Var::new(v), positive)
    });
    Clause::new(lits.collect::<Vec<_>>()).unwrap()
}

pub fn random_cnf(rng: &mut StdRng, n: usize, clauses: usize, max_len: usize) -> CnfFormula {
    let cs = (0..clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            random_clause(rng, n, len, None)
        })
        .collect();
    CnfFormula::new(n, cs).unwrap()
}

pub fn random_krom(rng: &mut StdRng, n: usize, clauses: usize) -> CnfFormula {
    random_cnf(rng, n, clauses, 2)
}

pub fn random_horn(rng: &mut StdRng, n: usize, clauses: usize, max_len: usize) -> CnfFormula {
    let cs = (0..clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            random_clause(rng, n, len, Some(1))
        })
        .collect();
    CnfFormula::new(n, cs).unwrap()
}

/// Krom clauses with at most one positive literal.
pub fn random_krom_horn(rng: &mut StdRng, n: usize, clauses: usize) -> CnfFormula {
    random_horn(rng, n, clauses, 2)
}

/// Truth-table models of a formula over its first `n` variables, with the
/// remaining variables existentially quantified.
pub fn truth_table(f: &CnfFormula, n: usize) -> Vec<Ballot> {
    let aux = f.num_vars() - n;
    all_ballots(n)
        .filter(|b| {
            (0..1u64 << aux).any(|ext| {
                let mut values = b.values().to_vec();
                values.extend((0..aux).map(|i| ext >> i & 1 == 1));
                f.evaluate(&values)
            })
        })
        .collect()
}

/// Models of a circuit by evaluating it on every total assignment.
pub fn circuit_models(c: &DnnfCircuit, n: usize) -> Vec<Ballot> {
    let aux = c.num_vars().saturating_sub(n);
    all_ballots(n)
        .filter(|b| {
            (0..1u64 << aux).any(|ext| {
                let mut values = b.values().to_vec();
                values.extend((0..aux).map(|i| ext >> i & 1 == 1));
                c.circuit().evaluate(&Assignment::total(&values)).unwrap()
            })
        })
        .collect()
}

/// A random DNNF circuit over `vars`. Conjunctions split the variables
/// into disjoint blocks; disjunctions reuse them freely, so the result is
/// usually not deterministic.
pub fn random_dnnf(rng: &mut StdRng, num_vars: usize, depth: usize) -> DnnfCircuit {
    let mut b = CircuitBuilder::new(num_vars);
    let vars: Vec<Var> = (0..num_vars).map(Var::new).collect();
    let root = gen_node(rng, &mut b, &vars, depth);
    DnnfCircuit::new(b.finish(root)).expect("generator keeps conjunctions disjoint")
}

fn gen_node(rng: &mut StdRng, b: &mut CircuitBuilder, vars: &[Var], depth: usize) -> NodeId {
    if vars.is_empty() {
        return if rng.gen_bool(0.9) { b.top() } else { b.bottom() };
    }
    if depth == 0 || vars.len() == 1 && rng.gen_bool(0.5) {
        let v = *vars.choose(rng).unwrap();
        return match rng.gen_range(0..20) {
            0 => b.top(),
            1 => b.bottom(),
            _ => b.lit(Lit::new(v, rng.gen_bool(0.5))),
        };
    }
    if rng.gen_bool(0.5) {
        let mut shuffled = vars.to_vec();
        shuffled.shuffle(rng);
        let blocks = rng.gen_range(2..=3.min(shuffled.len()).max(2));
        let mut children = Vec::new();
        let mut rest = &shuffled[..];
        for k in (1..=blocks).rev() {
            if rest.is_empty() {
                break;
            }
            let take = if k == 1 {
                rest.len()
            } else {
                rng.gen_range(1..=rest.len().saturating_sub(k - 1).max(1))
            };
            let (block, tail) = rest.split_at(take);
            // a block may leave some of its variables unused
            let used = rng.gen_range(1..=block.len());
            children.push(gen_node(rng, b, &block[..used], depth - 1));
            rest = tail;
        }
        b.and(children)
    } else {
        let k = rng.gen_range(2..=3);
        let children = (0..k).map(|_| gen_node(rng, b, vars, depth - 1)).collect();
        b.or(children)
    }
}

/// A random labelling with `max(λ(x), λ(¬x)) = 0`.
pub fn random_neutral_labels(rng: &mut StdRng, num_vars: usize) -> Labelling<MaxPlus> {
    Labelling::from_pairs(
        (0..num_vars)
            .map(|_| {
                let other = Extended::Finite(-rng.gen_range(0..6));
                if rng.gen_bool(0.5) {
                    (Extended::Finite(0), other)
                } else {
                    (other, Extended::Finite(0))
                }
            })
            .collect(),
    )
}

pub fn label_score(labels: &Labelling<MaxPlus>, values: &[bool]) -> Extended {
    values.iter().enumerate().fold(Extended::Finite(0), |acc, (i, &v)| {
        match (acc, *labels.get(Lit::new(Var::new(i), v))) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::NegInf,
        }
    })
}

/// `p` ballots drawn uniformly with replacement from `rational`.
pub fn random_profile(rng: &mut StdRng, rational: &[Ballot], p: usize) -> Profile {
    Profile::new((0..p).map(|_| rational.choose(rng).unwrap().clone()).collect()).unwrap()
}

pub fn random_partial(rng: &mut StdRng, n: usize) -> jagg_core::PartialBallot {
    jagg_core::PartialBallot::new(
        (0..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => Some(false),
                1 => Some(true),
                _ => None,
            })
            .collect(),
    )
}
