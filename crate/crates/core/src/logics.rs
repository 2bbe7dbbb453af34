//! Tabular logic definitions, built-in n-valued logics, truth-table
//! to hnf synthesis, formula translation, and the end-to-end decision
//! pipeline.
//!
//! Truth values 0, 1/(n-1), ..., 1 are indexed by `e1..en` in
//! increasing order, so the designated value is always `en`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::canon::{decide_valid, CanonError};
use crate::semantics::{
    environments, models, Environment, MatrixJudgement, SemanticsError, Value,
};
use crate::term::{Dimension, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("classical logic requires n = 2, got n = {0}")]
    ClassicalDimension(u32),
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("connective `{name}` has arity {expected}, applied to {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("table entry {0} out of range 1..={1}")]
    TableEntry(u32, u32),
    #[error("logic file, line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Canon(#[from] CanonError),
}

/// A connective of a tabular logic: arity k and a table of n^k values,
/// row-major with the first argument varying slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connective {
    pub arity: usize,
    pub table: Vec<Value>,
}

impl Connective {
    /// Table lookup at the given argument values (1-based indices).
    pub fn apply(&self, args: &[Value], n: Dimension) -> Value {
        debug_assert_eq!(args.len(), self.arity);
        let mut idx = 0usize;
        for &a in args {
            idx = idx * n.get() as usize + (a as usize - 1);
        }
        self.table[idx]
    }
}

/// A finite tabular logic with a single designated value.
#[derive(Debug, Clone)]
pub struct LogicSpec {
    pub name: String,
    pub n: Dimension,
    pub designated: Value,
    pub connectives: BTreeMap<String, Connective>,
}

impl LogicSpec {
    /// The connective signature, in the shape the formula parser takes.
    pub fn signature(&self) -> HashMap<String, usize> {
        self.connectives
            .iter()
            .map(|(name, c)| (name.clone(), c.arity))
            .collect()
    }

    fn validate(self) -> Result<Self, LogicError> {
        let n = self.n.get();
        if self.designated < 1 || self.designated > n {
            return Err(LogicError::TableEntry(self.designated, n));
        }
        for c in self.connectives.values() {
            let expected = (n as usize).pow(c.arity as u32);
            if c.table.len() != expected {
                return Err(LogicError::TableLength {
                    expected,
                    found: c.table.len(),
                });
            }
            if let Some(&bad) = c.table.iter().find(|&&v| v < 1 || v > n) {
                return Err(LogicError::TableEntry(bad, n));
            }
        }
        Ok(self)
    }
}

/// The built-in logic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// classical logic, n = 2 only
    Classical,
    Lukasiewicz,
    Godel,
    Post,
}

impl Family {
    pub fn from_name(s: &str) -> Option<Family> {
        match s {
            "cl" | "classical" => Some(Family::Classical),
            "lukasiewicz" => Some(Family::Lukasiewicz),
            "godel" => Some(Family::Godel),
            "post" => Some(Family::Post),
            _ => None,
        }
    }
}

fn unary_table(n: u32, f: impl Fn(u32) -> u32) -> Connective {
    Connective {
        arity: 1,
        table: (1..=n).map(f).collect(),
    }
}

fn binary_table(n: u32, f: impl Fn(u32, u32) -> u32) -> Connective {
    let f = &f;
    Connective {
        arity: 2,
        table: (1..=n)
            .flat_map(|i| (1..=n).map(move |j| f(i, j)))
            .collect(),
    }
}

/// A built-in logic, generated from the arithmetic definitions on the
/// truth values (i - 1)/(n - 1) for index i.
pub fn builtin(family: Family, n: Dimension) -> Result<LogicSpec, LogicError> {
    let nv = n.get();
    let mut connectives = BTreeMap::new();
    let name;
    match family {
        Family::Classical => {
            if nv != 2 {
                return Err(LogicError::ClassicalDimension(nv));
            }
            name = "CL";
            connectives.insert(
                "and".into(),
                Connective { arity: 2, table: vec![1, 1, 1, 2] },
            );
            connectives.insert(
                "or".into(),
                Connective { arity: 2, table: vec![1, 2, 2, 2] },
            );
            connectives.insert("not".into(), Connective { arity: 1, table: vec![2, 1] });
        }
        Family::Lukasiewicz => {
            name = "lukasiewicz";
            connectives.insert("and".into(), binary_table(nv, std::cmp::min));
            connectives.insert("or".into(), binary_table(nv, std::cmp::max));
            // not a = 1 - a; imp(a, b) = min(1, 1 - a + b)
            connectives.insert("not".into(), unary_table(nv, |i| nv + 1 - i));
            connectives.insert(
                "imp".into(),
                binary_table(nv, |i, j| std::cmp::min(nv, nv + j - i)),
            );
        }
        Family::Godel => {
            name = "godel";
            connectives.insert("and".into(), binary_table(nv, std::cmp::min));
            connectives.insert("or".into(), binary_table(nv, std::cmp::max));
            // not a = 1 if a = 0 else 0; imp(a, b) = 1 if a <= b else b
            connectives.insert(
                "not".into(),
                unary_table(nv, |i| if i == 1 { nv } else { 1 }),
            );
            connectives.insert(
                "imp".into(),
                binary_table(nv, |i, j| if i <= j { nv } else { j }),
            );
        }
        Family::Post => {
            name = "post";
            connectives.insert("and".into(), binary_table(nv, std::cmp::min));
            connectives.insert("or".into(), binary_table(nv, std::cmp::max));
            // cyclic negation: not a = 1 if a = 0 else a - 1/(n-1)
            connectives.insert(
                "not".into(),
                unary_table(nv, |i| if i == 1 { nv } else { i - 1 }),
            );
        }
    }
    LogicSpec {
        name: name.to_string(),
        n,
        designated: nv,
        connectives,
    }
    .validate()
}

/// A connective compiled to a pure hnf over variables x1..xk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesizedConnective {
    pub name: String,
    pub arity: usize,
    pub hnf: Term,
}

fn synth(table: &[Value], arity: usize, n: u32, first_var: u32) -> Term {
    if arity == 0 {
        return Term::Const(table[0]);
    }
    let chunk = table.len() / n as usize;
    let branches = table
        .chunks(chunk)
        .map(|sub| synth(sub, arity - 1, n, first_var + 1))
        .collect();
    Term::q(Term::Var(first_var), branches)
}

/// Compile a truth table into an hnf over x1..xk by recursion on the
/// first argument: branching on x1 splits the table into its n blocks.
pub fn synthesize_hnf(
    name: &str,
    table: &[Value],
    arity: usize,
    n: Dimension,
) -> Result<SynthesizedConnective, LogicError> {
    let nv = n.get();
    let expected = (nv as usize).pow(arity as u32);
    if table.len() != expected {
        return Err(LogicError::TableLength {
            expected,
            found: table.len(),
        });
    }
    if let Some(&bad) = table.iter().find(|&&v| v < 1 || v > nv) {
        return Err(LogicError::TableEntry(bad, nv));
    }
    Ok(SynthesizedConnective {
        name: name.to_string(),
        arity,
        hnf: synth(table, arity, nv, 1),
    })
}

/// Translate a formula with connective applications into the pure
/// selector language: each App node is replaced by the synthesized
/// hnf of its connective, with arguments substituted for x1..xk.
pub fn translate(phi: &Term, logic: &LogicSpec) -> Result<Term, LogicError> {
    match phi {
        Term::Var(_) | Term::Const(_) => Ok(phi.clone()),
        Term::Q(head, args) => {
            let head = translate(head, logic)?;
            let args: Vec<Term> = args
                .iter()
                .map(|a| translate(a, logic))
                .collect::<Result<_, _>>()?;
            Ok(Term::q(head, args))
        }
        Term::App(name, args) => {
            let conn = logic
                .connectives
                .get(name)
                .ok_or_else(|| LogicError::UnknownConnective(name.clone()))?;
            if args.len() != conn.arity {
                return Err(LogicError::ArityMismatch {
                    name: name.clone(),
                    expected: conn.arity,
                    found: args.len(),
                });
            }
            let sc = synthesize_hnf(name, &conn.table, conn.arity, logic.n)?;
            let subst: HashMap<u32, Term> = args
                .iter()
                .enumerate()
                .map(|(k, a)| Ok((k as u32 + 1, translate(a, logic)?)))
                .collect::<Result<_, LogicError>>()?;
            Ok(sc.hnf.substitute(&subst))
        }
    }
}

/// Evaluate a formula directly by the logic's truth tables.
pub fn matrix_eval(
    phi: &Term,
    rho: &Environment,
    logic: &LogicSpec,
) -> Result<Value, LogicError> {
    match phi {
        Term::Var(i) => rho
            .get(*i)
            .ok_or(LogicError::Semantics(SemanticsError::UnboundVariable(*i))),
        Term::Const(i) => Ok(*i),
        Term::Q(head, args) => {
            let v = matrix_eval(head, rho, logic)?;
            matrix_eval(&args[(v - 1) as usize], rho, logic)
        }
        Term::App(name, args) => {
            let conn = logic
                .connectives
                .get(name)
                .ok_or_else(|| LogicError::UnknownConnective(name.clone()))?;
            if args.len() != conn.arity {
                return Err(LogicError::ArityMismatch {
                    name: name.clone(),
                    expected: conn.arity,
                    found: args.len(),
                });
            }
            let vals: Vec<Value> = args
                .iter()
                .map(|a| matrix_eval(a, rho, logic))
                .collect::<Result<_, _>>()?;
            Ok(conn.apply(&vals, logic.n))
        }
    }
}

/// Matrix validity of `phi` in the logic, by direct table evaluation.
pub fn matrix_valid(phi: &Term, logic: &LogicSpec) -> Result<bool, LogicError> {
    for env in environments(&phi.vars(), logic.n)? {
        if matrix_eval(phi, &env, logic)? != logic.designated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decide the consequence `premises |= phi` in the logic, through the
/// translation into the pure language. With no premises this runs the
/// normalization decision procedure; otherwise the matrix oracle.
pub fn decide(logic: &LogicSpec, premises: &[Term], phi: &Term) -> Result<bool, LogicError> {
    let phi_t = translate(phi, logic)?;
    if premises.is_empty() {
        return Ok(decide_valid(&phi_t, logic.n)?);
    }
    let premises: Vec<Term> = premises
        .iter()
        .map(|p| translate(p, logic))
        .collect::<Result<_, _>>()?;
    let j = MatrixJudgement {
        premises,
        conclusion: phi_t,
        designated: logic.n.get(),
    };
    Ok(models(&j, logic.n)?)
}

/// Outcome of comparing direct matrix validity against the
/// translation-based decision on a corpus of formulas.
#[derive(Debug, Clone, Default)]
pub struct ConservativityReport {
    pub checked: usize,
    /// formulas where the two routes disagreed (expected: none)
    pub disagreements: Vec<Term>,
}

/// For each formula: matrix validity in the logic versus validity of
/// the translation in the selector matrix. Any disagreement is a bug.
pub fn check_conservativity(
    logic: &LogicSpec,
    corpus: &[Term],
) -> Result<ConservativityReport, LogicError> {
    let mut report = ConservativityReport::default();
    for phi in corpus {
        let direct = matrix_valid(phi, logic)?;
        let translated = decide(logic, &[], phi)?;
        report.checked += 1;
        if direct != translated {
            report.disagreements.push(phi.clone());
        }
    }
    Ok(report)
}

/// Parse a logic definition file.
pub fn parse_logic(text: &str) -> Result<LogicSpec, LogicError> {
    let mut name: Option<String> = None;
    let mut n: Option<u32> = None;
    let mut designated: Option<u32> = None;
    let mut connectives: BTreeMap<String, Connective> = BTreeMap::new();
    let mut pending: Option<(String, usize)> = None;

    let fail = |line: usize, message: &str| LogicError::File {
        line,
        message: message.to_string(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "logic" => {
                let v = parts.next().ok_or_else(|| fail(lineno, "missing logic name"))?;
                if name.replace(v.to_string()).is_some() {
                    return Err(fail(lineno, "duplicate `logic` line"));
                }
            }
            "n" => {
                let v: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad `n` value"))?;
                if n.replace(v).is_some() {
                    return Err(fail(lineno, "duplicate `n` line"));
                }
            }
            "designated" => {
                let v: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad `designated` value"))?;
                if designated.replace(v).is_some() {
                    return Err(fail(lineno, "a single designated value is required"));
                }
            }
            "connective" => {
                if pending.is_some() {
                    return Err(fail(lineno, "previous connective has no `table` line"));
                }
                let cname = parts
                    .next()
                    .ok_or_else(|| fail(lineno, "missing connective name"))?;
                let arity: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad connective arity"))?;
                if connectives.contains_key(cname) {
                    return Err(fail(lineno, "duplicate connective"));
                }
                pending = Some((cname.to_string(), arity));
            }
            "table" => {
                let (cname, arity) = pending
                    .take()
                    .ok_or_else(|| fail(lineno, "`table` line without a `connective` line"))?;
                let table: Vec<u32> = parts
                    .map(|s| s.parse().map_err(|_| fail(lineno, "bad table entry")))
                    .collect::<Result<_, _>>()?;
                connectives.insert(cname, Connective { arity, table });
            }
            _ => return Err(fail(lineno, "unrecognized line")),
        }
    }
    if pending.is_some() {
        return Err(fail(text.lines().count(), "last connective has no `table` line"));
    }
    let n = Dimension::new(n.ok_or_else(|| fail(0, "missing `n` line"))?)
        .map_err(|_| fail(0, "n must be at least 2"))?;
    LogicSpec {
        name: name.ok_or_else(|| fail(0, "missing `logic` line"))?,
        n,
        designated: designated.ok_or_else(|| fail(0, "missing `designated` line"))?,
        connectives,
    }
    .validate()
}
