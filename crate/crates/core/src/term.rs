//! Abstract syntax, parsing, printing, substitution and structural
//! predicates for the terms of the (n+1)-ary selector language.
//!
//! A term is built from indexed variables `x1, x2, ...`, constants
//! `e1..en`, the selector `q` of arity n+1, and (in source-logic
//! formulas only) named connective applications such as `or(x1, x2)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// The dimension n of the algebra; always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self, TermError> {
        if n < 2 {
            return Err(TermError::DimensionTooSmall(n));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn arity(self) -> usize {
        self.0 as usize
    }

    /// The constant indices `1..=n`.
    pub fn values(self) -> impl Iterator<Item = u32> {
        1..=self.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// `xk`, k >= 1.
    Var(u32),
    /// `ei`, 1 <= i <= n.
    Const(u32),
    /// `q(head, a1, ..., an)`.
    Q(Box<Term>, Vec<Term>),
    /// A named source-logic connective application. Never present in
    /// translated or normalized terms.
    App(String, Vec<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(u32),
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("constant index {index} out of range 1..={n}")]
    ConstOutOfRange { index: u32, n: u32 },
    #[error("connective `{name}` applied to {found} arguments, expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("operation not defined on connective applications (found `{0}`)")]
    AppPresent(String),
    #[error("permutation is not a bijection on 1..={0}")]
    BadPermutation(u32),
}

impl Term {
    pub fn var(index: u32) -> Term {
        Term::Var(index)
    }

    pub fn constant(index: u32) -> Term {
        Term::Const(index)
    }

    pub fn q(head: Term, args: Vec<Term>) -> Term {
        Term::Q(Box::new(head), args)
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn is_app_free(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Q(head, args) => head.is_app_free() && args.iter().all(|a| a.is_app_free()),
            Term::App(..) => false,
        }
    }

    /// Head normal form: every `q` node has a variable head.
    pub fn is_hnf(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Q(head, args) => {
                matches!(**head, Term::Var(_)) && args.iter().all(|a| a.is_hnf())
            }
            Term::App(..) => false,
        }
    }

    /// All variable indices occurring in the term, in increasing order.
    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Const(_) => {}
            Term::Q(head, args) => {
                head.collect_vars(out);
                for a in args {
                    a.collect_vars(out);
                }
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Number of `q`/`App` nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Q(head, args) => 1 + head.size() + args.iter().map(Term::size).sum::<usize>(),
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Simultaneous substitution; variables outside the binding are
    /// left unchanged.
    pub fn substitute(&self, binding: &HashMap<u32, Term>) -> Term {
        match self {
            Term::Var(i) => binding.get(i).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Q(head, args) => Term::q(
                head.substitute(binding),
                args.iter().map(|a| a.substitute(binding)).collect(),
            ),
            Term::App(name, args) => Term::App(
                name.clone(),
                args.iter().map(|a| a.substitute(binding)).collect(),
            ),
        }
    }

    /// The term `t^sigma = q(t, e_{sigma(1)}, ..., e_{sigma(n)})`.
    pub fn apply_permutation(&self, sigma: &Permutation) -> Result<Term, TermError> {
        if let Some(name) = first_app_name(self) {
            return Err(TermError::AppPresent(name));
        }
        let consts = (1..=sigma.degree())
            .map(|i| Term::Const(sigma.apply(i)))
            .collect();
        Ok(Term::q(self.clone(), consts))
    }
}

fn first_app_name(t: &Term) -> Option<String> {
    match t {
        Term::Var(_) | Term::Const(_) => None,
        Term::Q(head, args) => {
            first_app_name(head).or_else(|| args.iter().find_map(first_app_name))
        }
        Term::App(name, _) => Some(name.clone()),
    }
}

/// A bijection on `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    // map[i - 1] = sigma(i), 1-based values
    map: Vec<u32>,
}

impl Permutation {
    pub fn new(map: Vec<u32>) -> Result<Self, TermError> {
        let n = map.len() as u32;
        let mut seen = vec![false; map.len()];
        for &v in &map {
            if v < 1 || v > n || seen[(v - 1) as usize] {
                return Err(TermError::BadPermutation(n));
            }
            seen[(v - 1) as usize] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: Dimension) -> Self {
        Permutation {
            map: (1..=n.get()).collect(),
        }
    }

    /// The transposition swapping `a` and `b` on `{1..n}`.
    pub fn transposition(n: Dimension, a: u32, b: u32) -> Self {
        let mut map: Vec<u32> = (1..=n.get()).collect();
        map.swap((a - 1) as usize, (b - 1) as usize);
        Permutation { map }
    }

    pub fn degree(&self) -> u32 {
        self.map.len() as u32
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.map[(i - 1) as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[(v - 1) as usize] = i as u32 + 1;
        }
        Permutation { map }
    }

    /// `self . other`: first `other`, then `self`.
    pub fn after(&self, other: &Permutation) -> Self {
        let map = (1..=self.degree()).map(|i| self.apply(other.apply(i))).collect();
        Permutation { map }
    }

    /// All n! permutations of `{1..n}`, in lexicographic order.
    pub fn all(n: Dimension) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut items: Vec<u32> = (1..=n.get()).collect();
        permute(&mut items, 0, &mut out);
        out.sort_by(|a, b| a.map.cmp(&b.map));
        out
    }
}

fn permute(items: &mut Vec<u32>, k: usize, out: &mut Vec<Permutation>) {
    if k == items.len() {
        out.push(Permutation { map: items.clone() });
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Const(i) => write!(f, "e{i}"),
            Term::Q(head, args) => {
                write!(f, "q({head}")?;
                for a in args {
                    write!(f, ", {a}")?;
                }
                write!(f, ")")
            }
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    n: Dimension,
    signature: Option<&'a HashMap<String, usize>>,
}

/// Parse a term from the canonical prefix grammar.
///
/// Connective applications are only accepted when `signature` supplies
/// their arities.
pub fn parse(
    text: &str,
    n: Dimension,
    signature: Option<&HashMap<String, usize>>,
) -> Result<Term, TermError> {
    let mut p = Parser {
        text,
        bytes: text.as_bytes(),
        pos: 0,
        n,
        signature,
    };
    p.skip_ws();
    let t = p.term()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> TermError {
        TermError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), TermError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&'a str, TermError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected a term"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        let start = self.pos;
        let word = self.ident()?;
        if let Some(rest) = word.strip_prefix('e') {
            if let Ok(i) = rest.parse::<u32>() {
                if i < 1 || i > self.n.get() {
                    return Err(TermError::ConstOutOfRange {
                        index: i,
                        n: self.n.get(),
                    });
                }
                return Ok(Term::Const(i));
            }
        }
        if let Some(rest) = word.strip_prefix('x') {
            if let Ok(i) = rest.parse::<u32>() {
                if i < 1 {
                    self.pos = start;
                    return Err(self.err("variable index must be at least 1"));
                }
                return Ok(Term::Var(i));
            }
        }
        if word == "q" {
            self.expect(b'(')?;
            let head = self.term()?;
            let mut args = Vec::with_capacity(self.n.arity());
            for _ in 0..self.n.arity() {
                self.expect(b',')?;
                args.push(self.term()?);
            }
            self.expect(b')')?;
            return Ok(Term::q(head, args));
        }
        if !word.as_bytes()[0].is_ascii_alphabetic() && word.as_bytes()[0] != b'_' {
            self.pos = start;
            return Err(self.err(format!("bad token `{word}`")));
        }
        let arity = match self.signature.and_then(|s| s.get(word)) {
            Some(&k) => k,
            None => return Err(TermError::UnknownConnective(word.to_string())),
        };
        self.expect(b'(')?;
        let mut args = Vec::with_capacity(arity);
        for k in 0..arity {
            if k > 0 {
                self.expect(b',')?;
            }
            args.push(self.term()?);
        }
        self.expect(b')')?;
        Ok(Term::App(word.to_string(), args))
    }
}
