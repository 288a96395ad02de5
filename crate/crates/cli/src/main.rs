use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jagg::formats::{self, VarNames};
use jagg::gen;
use jagg_core::amc::{kemeny_labels, reversal_labels, slater_labels};
use jagg_core::circuit::{compile_cnf_to_dnnf, BudgetSpec, DnnfCircuit};
use jagg_core::rules::{
    outcome_decide, outcomes_bruteforce, young_outcomes, Config, Constraint, Engine, EngineChoice, RuleId,
};
use jagg_core::{IssueSet, Lit, PartialBallot, Profile, Var};

#[derive(Parser)]
#[command(
    name = "jagg",
    version,
    about = "Judgment aggregation over Krom, Horn, DNNF and budget constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report the syntactic fragments of a DIMACS CNF file.
    Classify { cnf: PathBuf },
    /// Encode a budget constraint as an NNF circuit.
    EncodeBudget {
        #[arg(long, value_delimiter = ',', required_unless_present = "spec")]
        costs: Vec<u64>,
        #[arg(long, required_unless_present = "spec")]
        budget: Option<u64>,
        /// Budget spec file (`costs ...` / `budget ...`) instead of flags.
        #[arg(long, conflicts_with_all = ["costs", "budget"])]
        spec: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a DIMACS CNF file into a decision-DNNF in NNF format.
    Compile {
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether some outcome of a rule agrees with a partial ballot.
    Outcome(OutcomeArgs),
    /// List every outcome of a rule by enumeration.
    Oracle(ProblemArgs),
    /// Write a random CNF constraint and rational profile.
    #[command(hide = true)]
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        issues: usize,
        #[arg(long, default_value_t = 5)]
        ballots: usize,
        #[arg(long, default_value_t = 6)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Cnf,
    Nnf,
    Budget,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Auto,
    Amc,
    Krom,
    Tideman,
    Brute,
}

impl From<EngineArg> for EngineChoice {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => EngineChoice::Auto,
            EngineArg::Amc => EngineChoice::Amc,
            EngineArg::Krom => EngineChoice::Krom,
            EngineArg::Tideman => EngineChoice::Tideman,
            EngineArg::Brute => EngineChoice::Brute,
        }
    }
}

#[derive(Args)]
struct ProblemArgs {
    /// kemeny, slater, reversal, young, maxhamming or tideman.
    #[arg(long, value_parser = parse_rule)]
    rule: RuleId,
    /// Constraint file; budget constraints may be given inline instead.
    #[arg(long, required_unless_present = "costs")]
    constraint: Option<PathBuf>,
    /// Constraint format; guessed from the extension when absent.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_delimiter = ',', requires = "budget", conflicts_with = "constraint")]
    costs: Vec<u64>,
    #[arg(long, requires = "costs")]
    budget: Option<u64>,
    #[arg(long)]
    profile: PathBuf,
    /// Comma-separated literals ranked first on ties, e.g. `x3,-x1`.
    #[arg(long)]
    tie_break: Option<String>,
    /// Largest issue count the enumeration oracle accepts.
    #[arg(long, env = "JAGG_MAX_ISSUES", default_value_t = 20)]
    max_issues: usize,
    /// Largest profile the Young search accepts.
    #[arg(long, env = "JAGG_MAX_YOUNG", default_value_t = 12)]
    max_young: usize,
}

#[derive(Args)]
struct OutcomeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Partial ballot over {0,1,*}; all `*` when absent.
    #[arg(long)]
    partial: Option<String>,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Print `YES <ballot>` or `NO` only, with the engine on stderr.
    #[arg(long)]
    machine: bool,
    /// Dump the literal labelling used by the circuit engine.
    #[arg(long)]
    explain: bool,
}

fn parse_rule(s: &str) -> Result<RuleId, String> {
    s.parse().map_err(|e: jagg_core::Error| e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Classify { cnf } => classify(&cnf)?,
        Command::EncodeBudget {
            costs,
            budget,
            spec,
            out,
        } => {
            let spec = match spec {
                Some(path) => formats::parse_budget(&read(&path)?)?,
                None => BudgetSpec::new(costs, budget.unwrap_or_default())?,
            };
            let start = Instant::now();
            let circuit = spec.encode();
            emit(
                &formats::write_nnf(circuit.circuit(), &VarNames::new()),
                out.as_deref(),
                &circuit,
                start,
            )?;
        }
        Command::Compile { cnf, out } => {
            let d = formats::parse_dimacs(&read(&cnf)?).with_context(|| format!("parsing {}", cnf.display()))?;
            let start = Instant::now();
            let circuit = compile_cnf_to_dnnf(&d.formula, &[]);
            emit(
                &formats::write_nnf(circuit.circuit(), &d.names),
                out.as_deref(),
                &circuit,
                start,
            )?;
        }
        Command::Outcome(args) => return outcome(&args),
        Command::Oracle(args) => oracle(&args)?,
        Command::Gen {
            seed,
            issues,
            ballots,
            clauses,
            width,
            out_dir,
        } => {
            if issues == 0 || ballots == 0 || width == 0 {
                bail!("issues, ballots and width must be positive");
            }
            let inst = gen::random_instance(seed, issues, ballots, clauses, width);
            let names: VarNames = inst
                .issues
                .names()
                .enumerate()
                .map(|(i, n)| (i, n.to_string()))
                .collect();
            fs::create_dir_all(&out_dir)?;
            fs::write(
                out_dir.join("constraint.cnf"),
                formats::write_dimacs(&inst.formula, &names),
            )?;
            fs::write(
                out_dir.join("profile.txt"),
                formats::write_profile(&inst.issues, &inst.profile),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes a circuit to `out` or stdout, with its size and build time on
/// stdout, or stderr when stdout carries the circuit.
fn emit(text: &str, out: Option<&Path>, circuit: &DnnfCircuit, start: Instant) -> Result<()> {
    let c = circuit.circuit();
    let stats = format!(
        "nodes={} edges={} time={:.3}ms",
        c.len(),
        c.edge_count(),
        start.elapsed().as_secs_f64() * 1e3
    );
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("{stats}");
        }
        None => {
            print!("{text}");
            eprintln!("{stats}");
        }
    }
    Ok(())
}

fn var_name(names: &VarNames, v: Var) -> String {
    names
        .get(&v.index())
        .cloned()
        .unwrap_or_else(|| format!("x{}", v.index() + 1))
}

fn classify(path: &Path) -> Result<()> {
    let d = formats::parse_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let f = d.formula.classify();
    println!(
        "krom={} horn={} definite={} renamable={}",
        f.krom,
        f.horn,
        f.definite_horn,
        f.renamable_horn()
    );
    if let Some(r) = f.renaming.as_ref().filter(|r| !r.is_empty()) {
        let names: Vec<String> = r.iter().map(|&v| var_name(&d.names, v)).collect();
        println!("renaming={}", names.join(","));
    }
    Ok(())
}

struct Loaded {
    issues: IssueSet,
    profile: Profile,
    constraint: Constraint,
    config: Config,
}

fn load(args: &ProblemArgs, engine: EngineChoice) -> Result<Loaded> {
    let (issues, profile) =
        formats::parse_profile(&read(&args.profile)?).with_context(|| format!("parsing {}", args.profile.display()))?;
    let n = issues.len();
    let format = match (args.format, &args.constraint) {
        (Some(f), _) => f,
        (None, None) => Format::Budget,
        (None, Some(p)) => match p.extension().and_then(|e| e.to_str()) {
            Some("nnf") => Format::Nnf,
            Some("budget") => Format::Budget,
            _ => Format::Cnf,
        },
    };
    if engine == EngineChoice::Krom && format != Format::Cnf {
        bail!("engine krom needs a CNF constraint");
    }
    let constraint = match (format, &args.constraint) {
        (Format::Budget, None) => {
            Constraint::budget(BudgetSpec::new(args.costs.clone(), args.budget.unwrap_or_default())?)
        }
        (_, None) => bail!("--constraint is required for the {} format", format_name(format)),
        (format, Some(path)) => {
            let text = read(path)?;
            let ctx = || format!("parsing {}", path.display());
            match format {
                Format::Cnf => {
                    let d = formats::parse_dimacs(&text).with_context(ctx)?;
                    Constraint::cnf(formats::bind_formula(&d, &issues)?.widened(n))
                }
                Format::Nnf => {
                    let f = formats::parse_nnf(&text).with_context(ctx)?;
                    Constraint::dnnf(formats::bind_circuit(&f, &issues)?)
                }
                Format::Budget => Constraint::budget(formats::parse_budget(&text).with_context(ctx)?),
            }
        }
    };
    if let Err(jagg_core::Error::IrrationalBallot { index }) = constraint.validate_profile(&profile) {
        bail!(
            "ballot {} of the profile ({}) violates the integrity constraint",
            index + 1,
            profile.ballots()[index]
        );
    }
    let tie_break = match &args.tie_break {
        Some(spec) => parse_tie_break(spec, &issues)?,
        None => Vec::new(),
    };
    let config = Config {
        engine,
        tie_break,
        max_enumeration_issues: args.max_issues,
        max_young_ballots: args.max_young,
    };
    Ok(Loaded {
        issues,
        profile,
        constraint,
        config,
    })
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Cnf => "cnf",
        Format::Nnf => "nnf",
        Format::Budget => "budget",
    }
}

fn parse_tie_break(spec: &str, issues: &IssueSet) -> Result<Vec<Lit>> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (positive, name) = match t.strip_prefix(['-', '!', '~']) {
                Some(rest) => (false, rest),
                None => (true, t),
            };
            let i = issues
                .position(name)
                .with_context(|| format!("tie-break names unknown issue {name:?}"))?;
            Ok(Lit::new(Var::new(i), positive))
        })
        .collect()
}

fn outcome(args: &OutcomeArgs) -> Result<ExitCode> {
    let loaded = load(&args.problem, args.engine.into())?;
    let n = loaded.issues.len();
    let partial: PartialBallot = match &args.partial {
        Some(s) => s.parse()?,
        None => PartialBallot::undecided(n),
    };
    if partial.len() != n {
        bail!(
            "partial ballot {partial} has {} positions, the profile has {n} issues",
            partial.len()
        );
    }
    let rule = args.problem.rule;
    let answer = outcome_decide(rule, &loaded.constraint, &loaded.profile, &partial, &loaded.config)?;

    let verdict = match &answer.witness {
        Some(w) if answer.decision => format!("YES {w}"),
        _ => "NO".to_string(),
    };
    if args.machine {
        println!("{verdict}");
        eprintln!("engine={}", answer.engine);
    } else {
        println!("{verdict}");
        if let Some(w) = &answer.witness {
            let named: Vec<String> = loaded
                .issues
                .names()
                .zip(w.values())
                .map(|(name, &v)| format!("{name}={}", u8::from(v)))
                .collect();
            println!("outcome: {}", named.join(" "));
        }
        println!(
            "rule: {rule}, query: {partial}, majority: {}",
            loaded.profile.majority_outcome()
        );
        println!("engine: {}", answer.engine);
    }
    if args.explain {
        explain(rule, &loaded, answer.engine)?;
    }
    Ok(if answer.decision {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn explain(rule: RuleId, loaded: &Loaded, engine: Engine) -> Result<()> {
    if engine != Engine::DnnfAmc {
        eprintln!("explain: engine {engine} uses no labelling");
        return Ok(());
    }
    let compiled;
    let circuit = match (loaded.constraint.as_dnnf(), &loaded.constraint) {
        (Some(c), _) => c,
        (None, Constraint::Cnf { formula, .. }) => {
            compiled = compile_cnf_to_dnnf(formula, &[]);
            &compiled
        }
        (None, _) => unreachable!("only CNF constraints lack a circuit"),
    };
    let labels = match rule {
        RuleId::Kemeny => kemeny_labels(&loaded.profile),
        RuleId::Slater => slater_labels(&loaded.profile),
        _ => reversal_labels(&loaded.profile, circuit)?,
    };
    eprintln!("labels (issue, positive, negative):");
    eprint!("{}", labels.dump(&loaded.issues));
    Ok(())
}

fn oracle(args: &ProblemArgs) -> Result<()> {
    let loaded = load(args, EngineChoice::Brute)?;
    let outcomes = if args.rule == RuleId::Young {
        let y = young_outcomes(&loaded.constraint, &loaded.profile, &loaded.config)?;
        eprintln!("deletions={}", y.deletions);
        y.outcomes
    } else {
        outcomes_bruteforce(args.rule, &loaded.constraint, &loaded.profile, &loaded.config)?
    };
    for b in outcomes {
        println!("{b}");
    }
    Ok(())
}
