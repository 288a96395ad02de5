//! Seeded random instances: a CNF constraint and a rational profile.

use jagg_core::{Ballot, Clause, CnfFormula, IssueSet, Lit, Profile, Var};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

pub struct Instance {
    pub issues: IssueSet,
    pub formula: CnfFormula,
    pub profile: Profile,
}

const SAMPLE_TRIES: usize = 10_000;

/// A random `max_len`-CNF over `n` issues with `p` rational ballots. Draws
/// fresh formulas until one has a model found by sampling.
pub fn random_instance(seed: u64, n: usize, p: usize, clauses: usize, max_len: usize) -> Instance {
    assert!(
        n > 0 && p > 0 && max_len > 0,
        "instance needs issues, ballots and clause width"
    );
    let mut rng = StdRng::seed_from_u64(seed);
    loop {
        let formula = random_formula(&mut rng, n, clauses, max_len);
        let mut ballots = Vec::with_capacity(p);
        for _ in 0..SAMPLE_TRIES {
            let b = Ballot::new((0..n).map(|_| rng.gen_bool(0.5)).collect());
            if formula.evaluate(b.values()) {
                ballots.push(b);
                if ballots.len() == p {
                    return Instance {
                        issues: IssueSet::numbered(n),
                        formula,
                        profile: Profile::new(ballots).expect("nonempty, equal widths"),
                    };
                }
            }
        }
    }
}

fn random_formula(rng: &mut StdRng, n: usize, clauses: usize, max_len: usize) -> CnfFormula {
    let cs = (0..clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.min(n));
            let vars = sample(rng, n, len);
            Clause::new(vars.iter().map(|v| Lit::new(Var::new(v), rng.gen_bool(0.5)))).expect("distinct variables")
        })
        .collect();
    CnfFormula::new(n, cs).expect("variables in range")
}
