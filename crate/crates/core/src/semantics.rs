//! Evaluation in the n-element generating algebra and brute-force
//! oracles for validity, consequence and logical equivalence.
//!
//! These oracles enumerate all environments over the variables of the
//! terms involved. They are correctness references, not decision
//! procedures; the enumeration is capped at [`ORACLE_VAR_CAP`] variables.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::{Dimension, Term};

/// A truth value, i.e. the index i of the constant `ei`, in `1..=n`.
pub type Value = u32;

/// Hard cap on the number of distinct variables the oracles enumerate.
pub const ORACLE_VAR_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("unbound variable x{0}")]
    UnboundVariable(u32),
    #[error("connective application `{0}` cannot be evaluated in the pure language")]
    AppPresent(String),
    #[error("oracle enumeration over {0} variables exceeds the cap of {ORACLE_VAR_CAP}")]
    TooManyVariables(usize),
}

/// A finite assignment of truth values to variable indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment(pub BTreeMap<u32, Value>);

impl Environment {
    pub fn new() -> Self {
        Environment(BTreeMap::new())
    }

    pub fn bind(mut self, var: u32, value: Value) -> Self {
        self.0.insert(var, value);
        self
    }

    pub fn get(&self, var: u32) -> Option<Value> {
        self.0.get(&var).copied()
    }
}

/// Structural evaluation: `q(t, u_1, ..., u_n)` selects the i-th
/// argument when the head evaluates to `ei`.
pub fn eval(t: &Term, rho: &Environment, _n: Dimension) -> Result<Value, SemanticsError> {
    eval_with_selector(t, rho, &|i| i)
}

/// Evaluation where the head value `ei` selects argument `sel(i)`;
/// used for the permuted algebras `n^sigma`.
pub fn eval_with_selector(
    t: &Term,
    rho: &Environment,
    sel: &dyn Fn(Value) -> Value,
) -> Result<Value, SemanticsError> {
    match t {
        Term::Var(i) => rho.get(*i).ok_or(SemanticsError::UnboundVariable(*i)),
        Term::Const(i) => Ok(*i),
        Term::Q(head, args) => {
            let v = eval_with_selector(head, rho, sel)?;
            eval_with_selector(&args[(sel(v) - 1) as usize], rho, sel)
        }
        Term::App(name, _) => Err(SemanticsError::AppPresent(name.clone())),
    }
}

/// All n^k environments over the given variable set.
pub fn environments(
    vars: &BTreeSet<u32>,
    n: Dimension,
) -> Result<Vec<Environment>, SemanticsError> {
    if vars.len() > ORACLE_VAR_CAP {
        return Err(SemanticsError::TooManyVariables(vars.len()));
    }
    let vars: Vec<u32> = vars.iter().copied().collect();
    let mut out = Vec::with_capacity((n.get() as usize).pow(vars.len() as u32));
    let mut counter = vec![1u32; vars.len()];
    loop {
        let mut env = Environment::new();
        for (v, c) in vars.iter().zip(&counter) {
            env = env.bind(*v, *c);
        }
        out.push(env);
        // mixed-radix increment
        let mut k = 0;
        loop {
            if k == counter.len() {
                return Ok(out);
            }
            counter[k] += 1;
            if counter[k] <= n.get() {
                break;
            }
            counter[k] = 1;
            k += 1;
        }
    }
}

/// A matrix consequence judgement `premises |= conclusion` with a
/// single designated value.
#[derive(Debug, Clone)]
pub struct MatrixJudgement {
    pub premises: Vec<Term>,
    pub conclusion: Term,
    pub designated: Value,
}

/// Exhaustive matrix consequence: in every environment where all
/// premises take the designated value, the conclusion does too.
pub fn models(j: &MatrixJudgement, n: Dimension) -> Result<bool, SemanticsError> {
    models_with_selector(j, n, &|i| i)
}

pub fn models_with_selector(
    j: &MatrixJudgement,
    n: Dimension,
    sel: &dyn Fn(Value) -> Value,
) -> Result<bool, SemanticsError> {
    let mut vars = j.conclusion.vars();
    for p in &j.premises {
        vars.extend(p.vars());
    }
    for env in environments(&vars, n)? {
        let mut all_designated = true;
        for p in &j.premises {
            if eval_with_selector(p, &env, sel)? != j.designated {
                all_designated = false;
                break;
            }
        }
        if all_designated && eval_with_selector(&j.conclusion, &env, sel)? != j.designated {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Logical equivalence: `eval` agrees on all environments over the
/// variables of both terms.
pub fn equiv(t: &Term, u: &Term, n: Dimension) -> Result<bool, SemanticsError> {
    let mut vars = t.vars();
    vars.extend(u.vars());
    for env in environments(&vars, n)? {
        if eval(t, &env, n)? != eval(u, &env, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn t(s: &str, n: u32) -> Term {
        parse(s, dim(n), None).unwrap()
    }

    #[test]
    fn eval_selects_arguments() {
        let n = dim(2);
        assert_eq!(eval(&t("q(e1, e2, e1)", 2), &Environment::new(), n).unwrap(), 2);
        let rho = Environment::new().bind(1, 2);
        assert_eq!(eval(&t("q(x1, e1, e2)", 2), &rho, n).unwrap(), 2);
    }

    #[test]
    fn eval_lukasiewicz_negation_at_zero() {
        // L3 negation is q(x, e3, e2, e1); at x = e1 (value 0) it yields e3 (value 1)
        let n = dim(3);
        let rho = Environment::new().bind(1, 1);
        assert_eq!(eval(&t("q(x1, e3, e2, e1)", 3), &rho, n).unwrap(), 3);
    }

    #[test]
    fn eval_unbound_variable() {
        let n = dim(2);
        assert_eq!(
            eval(&t("x1", 2), &Environment::new(), n),
            Err(SemanticsError::UnboundVariable(1))
        );
    }

    #[test]
    fn models_finds_countermodel() {
        let n = dim(2);
        let j = MatrixJudgement {
            premises: vec![],
            conclusion: t("q(x1, e1, e2)", 2),
            designated: 2,
        };
        assert!(!models(&j, n).unwrap());
    }

    #[test]
    fn models_reflexivity() {
        let n = dim(3);
        let j = MatrixJudgement {
            premises: vec![t("x1", 3)],
            conclusion: t("x1", 3),
            designated: 3,
        };
        assert!(models(&j, n).unwrap());
    }

    #[test]
    fn equiv_axiom_instances() {
        let n = dim(2);
        assert!(equiv(&t("q(x1, e1, e2)", 2), &t("x1", 2), n).unwrap());
        assert!(equiv(&t("q(x1, x2, x2)", 2), &t("x2", 2), n).unwrap());
        assert!(!equiv(&t("x1", 2), &t("x2", 2), n).unwrap());
    }

    #[test]
    fn empty_premises_with_top_designated_matches_equiv_with_en() {
        let n = dim(3);
        for s in ["q(x1, e3, e3, e3)", "e3", "q(x1, e1, e2, e3)"] {
            let phi = t(s, 3);
            let j = MatrixJudgement {
                premises: vec![],
                conclusion: phi.clone(),
                designated: 3,
            };
            assert_eq!(
                models(&j, n).unwrap(),
                equiv(&phi, &Term::Const(3), n).unwrap()
            );
        }
    }

    #[test]
    fn environment_count() {
        let vars = t("q(x1, x2, e1)", 2).vars();
        assert_eq!(environments(&vars, dim(3)).unwrap().len(), 9);
    }

    #[test]
    fn var_cap_enforced() {
        let vars: BTreeSet<u32> = (1..=13).collect();
        assert!(matches!(
            environments(&vars, dim(2)),
            Err(SemanticsError::TooManyVariables(13))
        ));
    }
}
