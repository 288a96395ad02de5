//! Text formats: DIMACS CNF, NNF circuits, profiles and budget specs.
//!
//! DIMACS and NNF files may bind variables to issue names with comment
//! lines `c issue <var> <name>`, where `<var>` is the 1-based variable.
//! Without such lines variable `i` is issue `i` and variables past the
//! issue count are auxiliary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use jagg_core::circuit::{BudgetSpec, DnnfCircuit, NnfCircuit, Node, NodeId};
use jagg_core::{Ballot, Clause, CnfFormula, IssueSet, Lit, Profile, Var};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] jagg_core::Error),
}

type Result<T> = std::result::Result<T, FormatError>;

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line: line + 1,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected a number, found {tok:?}")))
}

/// Parses `c issue <var> <name>`, returning `None` for other comments.
fn issue_comment(rest: &str, line: usize) -> Result<Option<(usize, String)>> {
    let mut toks = rest.split_whitespace();
    if toks.next() != Some("issue") {
        return Ok(None);
    }
    let (Some(var), Some(name), None) = (toks.next(), toks.next(), toks.next()) else {
        return Err(syntax(line, "expected `c issue <var> <name>`"));
    };
    let var: usize = parse_num(var, line)?;
    if var == 0 {
        return Err(syntax(line, "variables are numbered from 1"));
    }
    Ok(Some((var - 1, name.to_string())))
}

/// Variable names recorded in a constraint file, keyed by 0-based variable.
pub type VarNames = BTreeMap<usize, String>;

#[derive(Debug, Clone)]
pub struct Dimacs {
    pub formula: CnfFormula,
    pub names: VarNames,
}

pub fn parse_dimacs(text: &str) -> Result<Dimacs> {
    let mut header: Option<(usize, usize)> = None;
    let mut names = VarNames::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (ln, raw) in text.lines().enumerate() {
        last_line = ln;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                if let Some((v, name)) = issue_comment(rest, ln)? {
                    names.insert(v, name);
                }
                continue;
            }
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() || toks.len() != 3 || toks[0] != "cnf" {
                return Err(syntax(ln, "expected a single `p cnf <vars> <clauses>` header"));
            }
            header = Some((parse_num(toks[1], ln)?, parse_num(toks[2], ln)?));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax(ln, "clause before the `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = parse_num(tok, ln)?;
            if lit == 0 {
                clauses.push(clause_from(&current, ln)?);
                current.clear();
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(syntax(
                    ln,
                    format!("literal {lit} exceeds the declared {num_vars} variables"),
                ));
            } else {
                current.push(lit);
            }
        }
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(FormatError::Invalid("missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        clauses.push(clause_from(&current, last_line)?);
    }
    if clauses.len() != num_clauses {
        return Err(FormatError::Invalid(format!(
            "header declares {num_clauses} clauses, found {}",
            clauses.len()
        )));
    }
    if let Some(&v) = names.keys().find(|&&v| v >= num_vars) {
        return Err(FormatError::Invalid(format!(
            "issue comment names variable {} beyond the header",
            v + 1
        )));
    }
    Ok(Dimacs {
        formula: CnfFormula::new(num_vars, clauses)?,
        names,
    })
}

fn clause_from(lits: &[i64], line: usize) -> Result<Clause> {
    Clause::new(lits.iter().map(|&l| Lit::from_dimacs(l).expect("nonzero literal")))
        .map_err(|e| syntax(line, e.to_string()))
}

pub fn write_dimacs(formula: &CnfFormula, names: &VarNames) -> String {
    let mut out = String::new();
    for (v, name) in names {
        writeln!(out, "c issue {} {name}", v + 1).unwrap();
    }
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.clauses().len()).unwrap();
    for c in formula.clauses() {
        for l in c.lits() {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Where each file variable lands once issues follow `issues`: named
/// variables move to their issue's position, the rest become auxiliary
/// variables after the issues. Returns the target of each variable and the
/// resulting variable count.
pub fn bind_vars(num_vars: usize, names: &VarNames, issues: &IssueSet) -> Result<(Vec<Var>, usize)> {
    let n = issues.len();
    if names.is_empty() {
        return Ok(((0..num_vars).map(Var::new).collect(), num_vars.max(n)));
    }
    let mut seen = BTreeMap::new();
    let mut next_aux = n;
    let mut targets = Vec::with_capacity(num_vars);
    for v in 0..num_vars {
        match names.get(&v) {
            Some(name) => {
                let pos = issues.position(name).ok_or_else(|| {
                    FormatError::Invalid(format!("constraint names issue {name:?}, which the profile lacks"))
                })?;
                if seen.insert(pos, v).is_some() {
                    return Err(FormatError::Invalid(format!(
                        "issue {name:?} is bound to two variables"
                    )));
                }
                targets.push(Var::new(pos));
            }
            None => {
                targets.push(Var::new(next_aux));
                next_aux += 1;
            }
        }
    }
    Ok((targets, next_aux))
}

fn map_lit(targets: &[Var], l: Lit) -> Lit {
    Lit::new(targets[l.var().index()], l.is_positive())
}

/// The formula with issues in the order of `issues`.
pub fn bind_formula(d: &Dimacs, issues: &IssueSet) -> Result<CnfFormula> {
    let (targets, width) = bind_vars(d.formula.num_vars(), &d.names, issues)?;
    let clauses = d
        .formula
        .clauses()
        .iter()
        .map(|c| Clause::new(c.lits().iter().map(|&l| map_lit(&targets, l))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(CnfFormula::new(width, clauses)?)
}

#[derive(Debug, Clone)]
pub struct NnfFile {
    pub circuit: DnnfCircuit,
    pub names: VarNames,
}

/// Parses an NNF file and checks decomposability. The last node is the
/// root. The edge count in the header is informational and not checked,
/// since compilers disagree on how to count it.
pub fn parse_nnf(text: &str) -> Result<NnfFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut names = VarNames::new();
    let mut nodes: Vec<Node> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "c" => {
                if let Some((v, name)) = issue_comment(line[1..].trim_start(), ln)? {
                    names.insert(v, name);
                }
            }
            "nnf" => {
                if header.is_some() || toks.len() != 4 {
                    return Err(syntax(ln, "expected a single `nnf <nodes> <edges> <vars>` header"));
                }
                let _edges: usize = parse_num(toks[2], ln)?;
                header = Some((parse_num(toks[1], ln)?, parse_num(toks[3], ln)?));
            }
            kind => {
                let Some((_, num_vars)) = header else {
                    return Err(syntax(ln, "node before the `nnf` header"));
                };
                nodes.push(parse_node(kind, &toks[1..], nodes.len(), num_vars, ln)?);
            }
        }
    }
    let Some((num_nodes, num_vars)) = header else {
        return Err(FormatError::Invalid("missing `nnf` header".into()));
    };
    if nodes.len() != num_nodes {
        return Err(FormatError::Invalid(format!(
            "header declares {num_nodes} nodes, found {}",
            nodes.len()
        )));
    }
    if nodes.is_empty() {
        return Err(FormatError::Invalid("circuit has no nodes".into()));
    }
    if let Some(&v) = names.keys().find(|&&v| v >= num_vars) {
        return Err(FormatError::Invalid(format!(
            "issue comment names variable {} beyond the header",
            v + 1
        )));
    }
    let root = NodeId::new(nodes.len() - 1);
    let circuit = NnfCircuit::from_nodes(nodes, root, num_vars)?;
    Ok(NnfFile {
        circuit: DnnfCircuit::new(circuit)?,
        names,
    })
}

fn parse_node(kind: &str, args: &[&str], index: usize, num_vars: usize, ln: usize) -> Result<Node> {
    let children = |args: &[&str]| -> Result<Vec<NodeId>> {
        let Some((count, ids)) = args.split_first() else {
            return Err(syntax(ln, "missing child count"));
        };
        let count: usize = parse_num(count, ln)?;
        if ids.len() != count {
            return Err(syntax(ln, format!("expected {count} children, found {}", ids.len())));
        }
        ids.iter()
            .map(|t| {
                let id: usize = parse_num(t, ln)?;
                if id >= index {
                    return Err(syntax(ln, format!("child {id} does not precede node {index}")));
                }
                Ok(NodeId::new(id))
            })
            .collect()
    };
    match kind {
        "L" => {
            let [lit] = args else {
                return Err(syntax(ln, "expected `L <literal>`"));
            };
            let lit: i64 = parse_num(lit, ln)?;
            if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                return Err(syntax(ln, format!("literal {lit} out of range")));
            }
            Ok(Node::Lit(Lit::from_dimacs(lit).expect("nonzero literal")))
        }
        "A" => {
            let ch = children(args)?;
            Ok(if ch.is_empty() { Node::True } else { Node::And(ch) })
        }
        "O" => {
            let Some((var, rest)) = args.split_first() else {
                return Err(syntax(ln, "expected `O <var> <count> <ids...>`"));
            };
            let var: usize = parse_num(var, ln)?;
            if var > num_vars {
                return Err(syntax(ln, format!("decision variable {var} out of range")));
            }
            let ch = children(rest)?;
            Ok(if ch.is_empty() {
                Node::False
            } else {
                Node::Or {
                    decision: (var > 0).then(|| Var::new(var - 1)),
                    children: ch,
                }
            })
        }
        other => Err(syntax(ln, format!("unknown node kind {other:?}"))),
    }
}

pub fn write_nnf(circuit: &NnfCircuit, names: &VarNames) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "nnf {} {} {}",
        circuit.len(),
        circuit.edge_count(),
        circuit.num_vars()
    )
    .unwrap();
    for (v, name) in names {
        writeln!(out, "c issue {} {name}", v + 1).unwrap();
    }
    let ids = |ch: &[NodeId]| ch.iter().map(|c| c.index().to_string()).collect::<Vec<_>>().join(" ");
    for node in circuit.nodes() {
        match node {
            Node::True => out.push_str("A 0\n"),
            Node::False => out.push_str("O 0 0\n"),
            Node::Lit(l) => writeln!(out, "L {}", l.to_dimacs()).unwrap(),
            Node::And(ch) => writeln!(out, "A {} {}", ch.len(), ids(ch)).unwrap(),
            Node::Or { decision, children } => {
                let var = decision.map_or(0, |v| v.index() + 1);
                writeln!(out, "O {var} {} {}", children.len(), ids(children)).unwrap();
            }
        }
    }
    out
}

/// The circuit with issues in the order of `issues`.
pub fn bind_circuit(f: &NnfFile, issues: &IssueSet) -> Result<DnnfCircuit> {
    let c = f.circuit.circuit();
    let (targets, width) = bind_vars(c.num_vars(), &f.names, issues)?;
    if f.names.is_empty() {
        return Ok(f.circuit.clone().widened(width));
    }
    let nodes = c
        .nodes()
        .iter()
        .map(|node| match node {
            Node::Lit(l) => Node::Lit(map_lit(&targets, *l)),
            Node::Or { decision, children } => Node::Or {
                decision: decision.map(|v| targets[v.index()]),
                children: children.clone(),
            },
            other => other.clone(),
        })
        .collect();
    Ok(DnnfCircuit::new(NnfCircuit::from_nodes(nodes, c.root(), width)?)?)
}

/// Parses `issues x1 .. xn` followed by `ballot v1 .. vn` lines.
pub fn parse_profile(text: &str) -> Result<(IssueSet, Profile)> {
    let mut issues: Option<IssueSet> = None;
    let mut ballots = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        match (toks.next(), &issues) {
            (Some("issues"), None) => {
                issues = Some(IssueSet::new(toks).map_err(|e| syntax(ln, e.to_string()))?);
            }
            (Some("issues"), Some(_)) => return Err(syntax(ln, "duplicate `issues` line")),
            (Some("ballot"), Some(set)) => {
                let values = toks
                    .map(|t| match t {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(syntax(ln, format!("ballot values are 0 or 1, found {t:?}"))),
                    })
                    .collect::<Result<Vec<bool>>>()?;
                if values.len() != set.len() {
                    return Err(syntax(
                        ln,
                        format!("expected {} values, found {}", set.len(), values.len()),
                    ));
                }
                ballots.push(Ballot::new(values));
            }
            (Some("ballot"), None) => return Err(syntax(ln, "`ballot` before the `issues` line")),
            (Some(other), _) => return Err(syntax(ln, format!("unknown directive {other:?}"))),
            (None, _) => unreachable!("blank lines skipped"),
        }
    }
    let issues = issues.ok_or_else(|| FormatError::Invalid("missing `issues` line".into()))?;
    Ok((issues, Profile::new(ballots)?))
}

pub fn write_profile(issues: &IssueSet, profile: &Profile) -> String {
    let mut out = String::from("issues");
    for name in issues.names() {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    for b in profile.ballots() {
        out.push_str("ballot");
        for &v in b.values() {
            out.push_str(if v { " 1" } else { " 0" });
        }
        out.push('\n');
    }
    out
}

/// Parses `costs c1 .. cn` and `budget B`, in either order.
pub fn parse_budget(text: &str) -> Result<BudgetSpec> {
    let mut costs = None;
    let mut budget = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut toks = line.split_whitespace();
        match toks.next() {
            None => {}
            Some("costs") if costs.is_none() => {
                costs = Some(toks.map(|t| parse_num::<u64>(t, ln)).collect::<Result<Vec<_>>>()?);
            }
            Some("budget") if budget.is_none() => {
                let (Some(b), None) = (toks.next(), toks.next()) else {
                    return Err(syntax(ln, "expected `budget <B>`"));
                };
                budget = Some(parse_num::<u64>(b, ln)?);
            }
            Some(other) => return Err(syntax(ln, format!("unexpected {other:?}"))),
        }
    }
    match (costs, budget) {
        (Some(c), Some(b)) => Ok(BudgetSpec::new(c, b)?),
        _ => Err(FormatError::Invalid(
            "budget spec needs a `costs` line and a `budget` line".into(),
        )),
    }
}
