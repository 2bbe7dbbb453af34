//! Finite algebras of dimension n: decomposition operators, central
//! elements, the inner coordinate Boolean algebra, the representation
//! isomorphism onto central vectors, permuted algebras, and principal
//! congruences.
//!
//! Identity checking is dual-route. Small instances are enumerated
//! directly. Algebras carried as tuples over {1..n} with pointwise q
//! (subpowers of the generating n-element algebra) satisfy an identity
//! iff the n-element algebra does: each coordinate of any assignment is
//! an assignment in n, and conversely the diagonal constants lift any
//! countermodel. Truth in n is decided exactly by comparing canonical
//! normal forms, so identities with far too many variables to
//! enumerate (A6, B3, B4 for n = 4) are still checked exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::canon::full_normalize;
use crate::hnf::hnf_normalize;
use crate::semantics::{models_with_selector, MatrixJudgement, SemanticsError, Value};
use crate::term::{Dimension, Permutation, Term};

/// Largest universe accepted for constructed algebras.
pub const MAX_UNIVERSE: usize = 512;
/// Largest dimension accepted for constructed algebras.
pub const MAX_DIM: u32 = 5;
/// Ceiling on the number of assignments a direct enumeration may scan.
pub const ASSIGN_CAP: u64 = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("universe of size {0} exceeds the cap of {MAX_UNIVERSE}")]
    UniverseCap(usize),
    #[error("dimension {0} exceeds the cap of {MAX_DIM}")]
    DimensionCap(u32),
    #[error("element {0} out of range for universe of size {1}")]
    BadElement(usize, usize),
    #[error("operation `{0}` not present")]
    UnknownOperation(String),
    #[error("operation `{name}` has arity {expected}, applied to {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("p takes at most n = {0} arguments after the head, got {1}")]
    PArity(usize, usize),
    #[error(
        "check over {0} assignments exceeds the cap of {ASSIGN_CAP} and no symbolic route applies"
    )]
    CapExceeded(u64),
    #[error("not an nBA: element {0} is not n-central")]
    NotCentral(usize),
    #[error("Boolean structure check failed: {0}")]
    BooleanFailure(String),
    #[error("unbound variable x{0} in identity")]
    UnboundVariable(u32),
    #[error("algebra file, line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Term(#[from] crate::term::TermError),
}

/// A finitary operation given by its full table, row-major with the
/// first argument varying slowest; entries are element ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub arity: usize,
    pub table: Vec<usize>,
}

impl Operation {
    pub fn apply(&self, args: &[usize], size: usize) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        let mut idx = 0usize;
        for &a in args {
            idx = idx * size + a;
        }
        self.table[idx]
    }
}

#[derive(Debug, Clone)]
enum QRepr {
    /// full table over universe^(n+1)
    Table(Vec<usize>),
    /// componentwise selection on the tuple representation
    Pointwise,
}

/// A finite algebra with constants e_1..e_n and (n+1)-ary selector q,
/// plus optional extra operations. Elements are ids `0..size`.
#[derive(Debug, Clone)]
pub struct FinAlgebra {
    pub name: String,
    pub n: Dimension,
    pub size: usize,
    /// constants e_1..e_n as element ids
    pub constants: Vec<usize>,
    /// tuple representation over {1..n} when built inside a power n^I
    pub tuples: Option<Vec<Vec<u32>>>,
    tuple_index: HashMap<Vec<u32>, usize>,
    q: QRepr,
    pub extra_ops: BTreeMap<String, Operation>,
}

impl FinAlgebra {
    /// Apply q to element ids.
    pub fn q_of(&self, head: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.n.get() as usize);
        match &self.q {
            QRepr::Table(t) => {
                let mut idx = head;
                for &a in args {
                    idx = idx * self.size + a;
                }
                t[idx]
            }
            QRepr::Pointwise => {
                let tuples = self.tuples.as_ref().expect("pointwise q requires tuples");
                let out: Vec<u32> = tuples[head]
                    .iter()
                    .enumerate()
                    .map(|(d, &i)| tuples[args[(i - 1) as usize]][d])
                    .collect();
                self.tuple_index[&out]
            }
        }
    }

    /// The derived operator p(a, a_1..a_m) = q(a, a_1..a_m, e_{m+1}..e_n).
    pub fn p_op(&self, a: usize, args: &[usize]) -> Result<usize, AlgebraError> {
        let n = self.n.get() as usize;
        if args.len() > n {
            return Err(AlgebraError::PArity(n, args.len()));
        }
        let mut full = args.to_vec();
        for i in args.len()..n {
            full.push(self.constants[i]);
        }
        Ok(self.q_of(a, &full))
    }

    /// Is this algebra carried as tuples over {1..n} with q acting
    /// componentwise (a subpower of the n-element algebra)? This is
    /// what licenses the symbolic identity route.
    pub fn is_subpower(&self) -> bool {
        self.tuples.is_some()
    }

    /// Replace a pointwise q by an explicit table when that is cheap;
    /// the tuple representation is kept for diagnostics and the
    /// symbolic route.
    fn materialize_q(mut self) -> Self {
        if let QRepr::Pointwise = self.q {
            let n = self.n.get() as usize;
            let entries = (self.size as u64).checked_pow(n as u32 + 1);
            if let Some(entries) = entries.filter(|&e| e <= 2_000_000) {
                let mut table = vec![0usize; entries as usize];
                for_all_tuples(self.size, n + 1, |tuple| {
                    let mut key = tuple[0];
                    for &x in &tuple[1..] {
                        key = key * self.size + x;
                    }
                    table[key] = self.q_of(tuple[0], &tuple[1..]);
                    true
                });
                self.q = QRepr::Table(table);
            }
        }
        self
    }

    /// A printable name for an element: its tuple when available.
    pub fn element_name(&self, x: usize) -> String {
        match &self.tuples {
            Some(t) => format!(
                "({})",
                t[x].iter()
                    .map(|i| format!("e{i}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            None => format!("#{x}"),
        }
    }

    fn check_caps(n: Dimension, size: usize) -> Result<(), AlgebraError> {
        if n.get() > MAX_DIM {
            return Err(AlgebraError::DimensionCap(n.get()));
        }
        if size > MAX_UNIVERSE {
            return Err(AlgebraError::UniverseCap(size));
        }
        Ok(())
    }

    /// Assemble an algebra from an explicit q table (crate-internal;
    /// callers are responsible for the q laws).
    pub(crate) fn from_tables(
        name: String,
        n: Dimension,
        size: usize,
        constants: Vec<usize>,
        q_table: Vec<usize>,
        extra_ops: BTreeMap<String, Operation>,
    ) -> Self {
        debug_assert_eq!(q_table.len(), size.pow(n.get() + 1));
        FinAlgebra {
            name,
            n,
            size,
            constants,
            tuples: None,
            tuple_index: HashMap::new(),
            q: QRepr::Table(q_table),
            extra_ops,
        }
    }

    /// Evaluate a term over this algebra; `env` maps variable indices
    /// to element ids, constants `ei` map to the algebra's constants,
    /// App nodes to extra operations.
    pub fn eval_term(
        &self,
        t: &Term,
        env: &HashMap<u32, usize>,
    ) -> Result<usize, AlgebraError> {
        match t {
            Term::Var(i) => env
                .get(i)
                .copied()
                .ok_or(AlgebraError::UnboundVariable(*i)),
            Term::Const(i) => Ok(self.constants[(*i - 1) as usize]),
            Term::Q(head, args) => {
                let h = self.eval_term(head, env)?;
                let args: Vec<usize> = args
                    .iter()
                    .map(|a| self.eval_term(a, env))
                    .collect::<Result<_, _>>()?;
                Ok(self.q_of(h, &args))
            }
            Term::App(name, args) => {
                let op = self
                    .extra_ops
                    .get(name)
                    .ok_or_else(|| AlgebraError::UnknownOperation(name.clone()))?;
                if args.len() != op.arity {
                    return Err(AlgebraError::ArityMismatch {
                        name: name.clone(),
                        expected: op.arity,
                        found: args.len(),
                    });
                }
                let args: Vec<usize> = args
                    .iter()
                    .map(|a| self.eval_term(a, env))
                    .collect::<Result<_, _>>()?;
                Ok(op.apply(&args, self.size))
            }
        }
    }
}

/// Iterate over all `size^k` tuples, calling `f` on each; `f` returns
/// false to signal a counterexample and stop early. Returns true iff
/// no counterexample was found.
pub(crate) fn for_all_tuples(
    size: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    let mut tuple = vec![0usize; k];
    loop {
        if !f(&tuple) {
            return false;
        }
        let mut j = 0;
        loop {
            if j == k {
                return true;
            }
            tuple[j] += 1;
            if tuple[j] < size {
                break;
            }
            tuple[j] = 0;
            j += 1;
        }
    }
}

fn assignments(size: usize, k: usize) -> u64 {
    (size as u64).checked_pow(k as u32).unwrap_or(u64::MAX)
}

/// The full power n^I with pointwise q; elements are I-tuples over
/// {1..n}, numbered in mixed-radix order with the first coordinate
/// varying slowest.
pub fn power_algebra(n: Dimension, i_size: usize) -> Result<FinAlgebra, AlgebraError> {
    assert!(i_size >= 1, "power index set must be nonempty");
    let nv = n.get() as usize;
    let size = nv
        .checked_pow(i_size as u32)
        .filter(|&s| s <= MAX_UNIVERSE)
        .ok_or(AlgebraError::UniverseCap(usize::MAX))?;
    FinAlgebra::check_caps(n, size)?;

    let mut tuples = Vec::with_capacity(size);
    let mut tuple = vec![1u32; i_size];
    loop {
        tuples.push(tuple.clone());
        let mut d = i_size;
        loop {
            if d == 0 {
                break;
            }
            d -= 1;
            tuple[d] += 1;
            if tuple[d] <= n.get() {
                break;
            }
            tuple[d] = 1;
        }
        if tuple.iter().all(|&v| v == 1) {
            break;
        }
    }
    let tuple_index: HashMap<Vec<u32>, usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let constants = (1..=n.get())
        .map(|i| tuple_index[&vec![i; i_size]])
        .collect();
    Ok(FinAlgebra {
        name: format!("{}^{}", n.get(), i_size),
        n,
        size,
        constants,
        tuples: Some(tuples),
        tuple_index,
        q: QRepr::Pointwise,
        extra_ops: BTreeMap::new(),
    }
    .materialize_q())
}

/// The least subuniverse containing the generators and all constants,
/// closed under q and every extra operation, repackaged as an algebra.
pub fn subalgebra(a: &FinAlgebra, generators: &[usize]) -> Result<FinAlgebra, AlgebraError> {
    for &g in generators {
        if g >= a.size {
            return Err(AlgebraError::BadElement(g, a.size));
        }
    }
    let n = a.n.get() as usize;
    let mut member = vec![false; a.size];
    let mut closed: Vec<usize> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &x in a.constants.iter().chain(generators) {
        if !member[x] {
            member[x] = true;
            closed.push(x);
            queue.push_back(x);
        }
    }
    // closure: whenever a new element arrives, rescan all tuples over
    // the current set (the set is small in practice)
    while queue.pop_front().is_some() {
        let snapshot = closed.clone();
        let mut fresh = Vec::new();
        for_all_tuples(snapshot.len(), n + 1, |idx| {
            let head = snapshot[idx[0]];
            let args: Vec<usize> = idx[1..].iter().map(|&j| snapshot[j]).collect();
            let r = a.q_of(head, &args);
            if !member[r] {
                member[r] = true;
                fresh.push(r);
            }
            true
        });
        for (_, op) in a.extra_ops.iter() {
            for_all_tuples(snapshot.len(), op.arity, |idx| {
                let args: Vec<usize> = idx.iter().map(|&j| snapshot[j]).collect();
                let r = op.apply(&args, a.size);
                if !member[r] {
                    member[r] = true;
                    fresh.push(r);
                }
                true
            });
        }
        for x in fresh {
            closed.push(x);
            queue.push_back(x);
        }
    }
    closed.sort_unstable();
    let old_to_new: HashMap<usize, usize> =
        closed.iter().enumerate().map(|(i, &x)| (x, i)).collect();

    let size = closed.len();
    let constants = a.constants.iter().map(|&c| old_to_new[&c]).collect();
    let tuples = a
        .tuples
        .as_ref()
        .map(|t| closed.iter().map(|&x| t[x].clone()).collect::<Vec<_>>());
    let tuple_index = match &tuples {
        Some(t) => t
            .iter()
            .enumerate()
            .map(|(i, tu)| (tu.clone(), i))
            .collect(),
        None => HashMap::new(),
    };
    let q = if a.is_subpower() {
        QRepr::Pointwise
    } else {
        let mut canonical = vec![0usize; size.pow(n as u32 + 1)];
        for_all_tuples(size, n + 1, |idx| {
            let head = closed[idx[0]];
            let args: Vec<usize> = idx[1..].iter().map(|&j| closed[j]).collect();
            let mut key = idx[0];
            for &j in &idx[1..] {
                key = key * size + j;
            }
            canonical[key] = old_to_new[&a.q_of(head, &args)];
            true
        });
        QRepr::Table(canonical)
    };
    let extra_ops = a
        .extra_ops
        .iter()
        .map(|(name, op)| {
            let mut table = vec![0usize; size.pow(op.arity as u32)];
            for_all_tuples(size, op.arity, |idx| {
                let args: Vec<usize> = idx.iter().map(|&j| closed[j]).collect();
                let mut key = 0;
                for &j in idx {
                    key = key * size + j;
                }
                table[key] = old_to_new[&op.apply(&args, a.size)];
                true
            });
            (name.clone(), Operation { arity: op.arity, table })
        })
        .collect();
    Ok(FinAlgebra {
        name: format!("{}-sub{}", a.name, size),
        n: a.n,
        size,
        constants,
        tuples,
        tuple_index,
        q,
        extra_ops,
    }
    .materialize_q())
}

// ---------------------------------------------------------------------
// identity checking
// ---------------------------------------------------------------------

/// Does the identity `lhs = rhs` (variables universally quantified over
/// the universe) hold in `a`? Enumerates when feasible; for pointwise
/// subpowers of n the identity is decided in n by canonical normal
/// forms, which is exact in both directions.
pub fn check_identity(
    a: &FinAlgebra,
    lhs: &Term,
    rhs: &Term,
) -> Result<bool, AlgebraError> {
    let mut vars: BTreeSet<u32> = lhs.vars();
    vars.extend(rhs.vars());
    let vars: Vec<u32> = vars.into_iter().collect();
    let count = assignments(a.size, vars.len());
    if count <= ASSIGN_CAP {
        let mut ok = true;
        let mut env: HashMap<u32, usize> = vars.iter().map(|&v| (v, 0)).collect();
        for_all_tuples(a.size, vars.len(), |idx| {
            for (&v, &x) in vars.iter().zip(idx) {
                env.insert(v, x);
            }
            match (a.eval_term(lhs, &env), a.eval_term(rhs, &env)) {
                (Ok(l), Ok(r)) => {
                    ok = l == r;
                    ok
                }
                _ => {
                    ok = false;
                    false
                }
            }
        });
        return Ok(ok);
    }
    if a.is_subpower() && lhs.is_app_free() && rhs.is_app_free() {
        let l = full_normalize(&hnf_normalize(lhs)).expect("App-free terms have hnfs");
        let r = full_normalize(&hnf_normalize(rhs)).expect("App-free terms have hnfs");
        return Ok(l == r);
    }
    Err(AlgebraError::CapExceeded(count))
}

fn fresh_vars(start: u32, k: usize) -> Vec<Term> {
    (0..k as u32).map(|i| Term::Var(start + i)).collect()
}

/// The nBA axioms A1-A6 as (lhs, rhs) term pairs for dimension n.
pub fn nba_axioms(n: Dimension) -> Vec<(String, Term, Term)> {
    let nv = n.get() as usize;
    let mut out = Vec::new();
    let xs = fresh_vars(1, nv);
    // A1: q(ei, x1..xn) = xi
    for i in 1..=nv {
        out.push((
            format!("A1.{i}"),
            Term::q(Term::Const(i as u32), xs.clone()),
            xs[i - 1].clone(),
        ));
    }
    // A2: q(q(x, y1..yn), z1..zn) = q(x, q(y1, z..), .., q(yn, z..))
    let x = Term::Var(1);
    let ys = fresh_vars(2, nv);
    let zs = fresh_vars(2 + nv as u32, nv);
    out.push((
        "A2".into(),
        Term::q(Term::q(x.clone(), ys.clone()), zs.clone()),
        Term::q(
            x.clone(),
            ys.iter().map(|y| Term::q(y.clone(), zs.clone())).collect(),
        ),
    ));
    // A3: q(x, y, .., y) = y
    let y = Term::Var(2);
    out.push((
        "A3".into(),
        Term::q(x.clone(), vec![y.clone(); nv]),
        y.clone(),
    ));
    // A4: q(x, e1..en) = x
    out.push((
        "A4".into(),
        Term::q(x.clone(), (1..=nv).map(|i| Term::Const(i as u32)).collect()),
        x.clone(),
    ));
    // A5^i
    for i in 0..nv {
        let ys = fresh_vars(2, nv);
        let zs = fresh_vars(2 + nv as u32, nv);
        let mut largs = ys.clone();
        largs[i] = Term::q(x.clone(), zs.clone());
        let mut rargs = ys.clone();
        rargs[i] = zs[i].clone();
        out.push((
            format!("A5.{}", i + 1),
            Term::q(x.clone(), largs),
            Term::q(x.clone(), rargs),
        ));
    }
    // A6: q(x, q(y, y^1_1..y^1_n), ..) = q(y, q(x, y^1_1..y^n_1), ..)
    let y = Term::Var(2);
    let m = |i: usize, j: usize| Term::Var(3 + (i * nv + j) as u32);
    out.push((
        "A6".into(),
        Term::q(
            x.clone(),
            (0..nv)
                .map(|i| Term::q(y.clone(), (0..nv).map(|j| m(i, j)).collect()))
                .collect(),
        ),
        Term::q(
            y.clone(),
            (0..nv)
                .map(|j| Term::q(x.clone(), (0..nv).map(|i| m(i, j)).collect()))
                .collect(),
        ),
    ));
    out
}

/// B1-B4 with the central element as a universally quantified variable;
/// on an nBA these are identities.
pub fn nba_b_identities(n: Dimension) -> Vec<(String, Term, Term)> {
    let nv = n.get() as usize;
    let c = Term::Var(1);
    let mut out = Vec::new();
    // B1: q(c, e1..en) = c
    out.push((
        "B1".into(),
        Term::q(c.clone(), (1..=nv).map(|i| Term::Const(i as u32)).collect()),
        c.clone(),
    ));
    // B2: q(c, x..x) = x
    let x = Term::Var(2);
    out.push((
        "B2".into(),
        Term::q(c.clone(), vec![x.clone(); nv]),
        x.clone(),
    ));
    // B3 for q over an n x (n+1) matrix: rows r, columns j in 0..=n
    let m = |r: usize, j: usize| Term::Var(2 + (r * (nv + 1) + j) as u32);
    out.push((
        "B3.q".into(),
        Term::q(
            c.clone(),
            (0..nv)
                .map(|r| Term::q(m(r, 0), (1..=nv).map(|j| m(r, j)).collect()))
                .collect(),
        ),
        Term::q(
            Term::q(c.clone(), (0..nv).map(|r| m(r, 0)).collect()),
            (1..=nv)
                .map(|j| Term::q(c.clone(), (0..nv).map(|r| m(r, j)).collect()))
                .collect(),
        ),
    ));
    // B4 over an n x n matrix: diagonal on the right
    let m = |r: usize, j: usize| Term::Var(2 + (r * nv + j) as u32);
    out.push((
        "B4".into(),
        Term::q(
            c.clone(),
            (0..nv)
                .map(|r| Term::q(c.clone(), (0..nv).map(|j| m(r, j)).collect()))
                .collect(),
        ),
        Term::q(c.clone(), (0..nv).map(|i| m(i, i)).collect()),
    ));
    out
}

/// Verify A1-A6 and B1-B4 on `a`; returns the name of the first
/// failing identity, if any.
pub fn verify_nba_axioms(a: &FinAlgebra) -> Result<Option<String>, AlgebraError> {
    for (name, lhs, rhs) in nba_axioms(a.n).into_iter().chain(nba_b_identities(a.n)) {
        if !check_identity(a, &lhs, &rhs)? {
            return Ok(Some(name));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------
// decomposition operators and central elements
// ---------------------------------------------------------------------

/// Check D1-D3 for an n-ary operation table: idempotence, the diagonal
/// identity, and being a homomorphism from A^n to A over q and every
/// extra operation.
pub fn is_decomposition_operator(
    a: &FinAlgebra,
    f: &Operation,
) -> Result<bool, AlgebraError> {
    let n = a.n.get() as usize;
    if f.arity != n {
        return Err(AlgebraError::ArityMismatch {
            name: "decomposition candidate".into(),
            expected: n,
            found: f.arity,
        });
    }
    // D1: f(x..x) = x
    for x in 0..a.size {
        if f.apply(&vec![x; n], a.size) != x {
            return Ok(false);
        }
    }
    // D2: f(f(row1), .., f(rown)) = f(diagonal)
    let d2 = assignments(a.size, n * n);
    if d2 > ASSIGN_CAP {
        return Err(AlgebraError::CapExceeded(d2));
    }
    let mut ok = true;
    for_all_tuples(a.size, n * n, |m| {
        let outer: Vec<usize> = (0..n)
            .map(|r| f.apply(&m[r * n..(r + 1) * n], a.size))
            .collect();
        let diag: Vec<usize> = (0..n).map(|i| m[i * n + i]).collect();
        ok = f.apply(&outer, a.size) == f.apply(&diag, a.size);
        ok
    });
    if !ok {
        return Ok(false);
    }
    // D3: homomorphism A^n -> A for every operation (constants included)
    for c in &a.constants {
        if f.apply(&vec![*c; n], a.size) != *c {
            return Ok(false);
        }
    }
    let sigs: Vec<(usize, Box<dyn Fn(&[usize]) -> usize + '_>)> = {
        let mut v: Vec<(usize, Box<dyn Fn(&[usize]) -> usize + '_>)> = vec![(
            n + 1,
            Box::new(move |args: &[usize]| a.q_of(args[0], &args[1..])),
        )];
        for op in a.extra_ops.values() {
            v.push((op.arity, Box::new(move |args: &[usize]| op.apply(args, a.size))));
        }
        v
    };
    for (arity, sigma) in sigs {
        let cnt = assignments(a.size, n * arity);
        if cnt > ASSIGN_CAP {
            return Err(AlgebraError::CapExceeded(cnt));
        }
        // vectors v_1..v_arity in A^n, flattened column-wise: v_j is
        // m[j*n..(j+1)*n]
        let mut hom = true;
        for_all_tuples(a.size, n * arity, |m| {
            // componentwise sigma, then f
            let pointwise: Vec<usize> = (0..n)
                .map(|i| {
                    let row: Vec<usize> = (0..arity).map(|j| m[j * n + i]).collect();
                    sigma(&row)
                })
                .collect();
            let lhs = f.apply(&pointwise, a.size);
            let images: Vec<usize> =
                (0..arity).map(|j| f.apply(&m[j * n..(j + 1) * n], a.size)).collect();
            hom = lhs == sigma(&images);
            hom
        });
        if !hom {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The operation table of f_c(x1..xn) = q(c, x1..xn).
pub fn selector_operation(a: &FinAlgebra, c: usize) -> Operation {
    let n = a.n.get() as usize;
    let mut table = vec![0usize; a.size.pow(n as u32)];
    for_all_tuples(a.size, n, |args| {
        let mut key = 0;
        for &x in args {
            key = key * a.size + x;
        }
        table[key] = a.q_of(c, args);
        true
    });
    Operation { arity: n, table }
}

/// Is `c` n-central? Checks B1, B2, B3 (over q and every extra
/// operation) and the derived B4. On pointwise subpowers of n the
/// B3/B4 instances for q are decided symbolically in n; a fixed c is
/// central there exactly when the identities hold with c quantified,
/// because every element of a subpower is central.
pub fn is_central(a: &FinAlgebra, c: usize) -> Result<bool, AlgebraError> {
    if c >= a.size {
        return Err(AlgebraError::BadElement(c, a.size));
    }
    let n = a.n.get() as usize;
    // B1
    if a.q_of(c, &a.constants) != c {
        return Ok(false);
    }
    // B2
    for x in 0..a.size {
        if a.q_of(c, &vec![x; n]) != x {
            return Ok(false);
        }
    }
    // B3 for q, plus B4 as a consistency assertion
    let b3 = assignments(a.size, n * (n + 1));
    if b3 <= ASSIGN_CAP {
        let mut ok = true;
        for_all_tuples(a.size, n * (n + 1), |m| {
            // rows r: (head, args); columns j
            let lhs_args: Vec<usize> = (0..n)
                .map(|r| {
                    let row = &m[r * (n + 1)..(r + 1) * (n + 1)];
                    a.q_of(row[0], &row[1..])
                })
                .collect();
            let lhs = a.q_of(c, &lhs_args);
            let head = a.q_of(c, &(0..n).map(|r| m[r * (n + 1)]).collect::<Vec<_>>());
            let cols: Vec<usize> = (1..=n)
                .map(|j| a.q_of(c, &(0..n).map(|r| m[r * (n + 1) + j]).collect::<Vec<_>>()))
                .collect();
            ok = lhs == a.q_of(head, &cols);
            ok
        });
        if !ok {
            return Ok(false);
        }
        let mut b4 = true;
        for_all_tuples(a.size, n * n, |m| {
            let inner: Vec<usize> =
                (0..n).map(|r| a.q_of(c, &m[r * n..(r + 1) * n])).collect();
            let diag: Vec<usize> = (0..n).map(|i| m[i * n + i]).collect();
            b4 = a.q_of(c, &inner) == a.q_of(c, &diag);
            b4
        });
        assert!(b4, "B4 must follow from B1-B3");
    } else if a.is_subpower() && a.extra_ops.is_empty() {
        // every element of a subpower of n is central iff the B3/B4
        // identities are valid in n; decide them symbolically
        for (name, lhs, rhs) in nba_b_identities(a.n) {
            let l = full_normalize(&hnf_normalize(&lhs)).expect("identities are App-free");
            let r = full_normalize(&hnf_normalize(&rhs)).expect("identities are App-free");
            assert_eq!(l, r, "identity {name} must be valid in the variety");
        }
    } else {
        return Err(AlgebraError::CapExceeded(b3));
    }
    // B3 for every extra operation
    for (name, op) in &a.extra_ops {
        let cnt = assignments(a.size, n * op.arity);
        if cnt > ASSIGN_CAP {
            return Err(AlgebraError::CapExceeded(cnt));
        }
        let mut ok = true;
        for_all_tuples(a.size, n * op.arity, |m| {
            // m is an n x k matrix, row r = m[r*k..(r+1)*k]
            let k = op.arity;
            let lhs_args: Vec<usize> =
                (0..n).map(|r| op.apply(&m[r * k..(r + 1) * k], a.size)).collect();
            let lhs = a.q_of(c, &lhs_args);
            let images: Vec<usize> = (0..k)
                .map(|j| a.q_of(c, &(0..n).map(|r| m[r * k + j]).collect::<Vec<_>>()))
                .collect();
            ok = lhs == op.apply(&images, a.size);
            ok
        });
        if !ok {
            let _ = name;
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// the coordinate Boolean algebra and the representation
// ---------------------------------------------------------------------

/// The Boolean algebra of 2-central elements living inside an nBA:
/// universe { x : p(x, y, y) = y for all y }, with meet p(x, e1, y),
/// join p(x, y, e2), complement p(x, e2, e1), bottom e1, top e2.
#[derive(Debug, Clone)]
pub struct FinBooleanAlgebra {
    /// members as element ids of the parent algebra, sorted
    pub universe: Vec<usize>,
    pos: HashMap<usize, usize>,
    meet: Vec<usize>,
    join: Vec<usize>,
    complement: Vec<usize>,
    pub bottom: usize,
    pub top: usize,
}

impl FinBooleanAlgebra {
    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.pos.contains_key(&x)
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[self.pos[&x] * self.len() + self.pos[&y]]
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[self.pos[&x] * self.len() + self.pos[&y]]
    }

    pub fn complement(&self, x: usize) -> usize {
        self.complement[self.pos[&x]]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.meet(x, y) == x
    }

    /// The atoms: minimal nonzero elements.
    pub fn atoms(&self) -> Vec<usize> {
        self.universe
            .iter()
            .copied()
            .filter(|&x| {
                x != self.bottom
                    && self
                        .universe
                        .iter()
                        .all(|&b| b == self.bottom || b == x || !(self.leq(b, x)))
            })
            .collect()
    }
}

/// Build B_A with exhaustive verification of the Boolean axioms and of
/// the closure characterization B_A = { q(a, e1, e2, e1, .., e1) }.
pub fn coordinate_boolean_algebra(
    a: &FinAlgebra,
) -> Result<FinBooleanAlgebra, AlgebraError> {
    let universe: Vec<usize> = (0..a.size)
        .filter(|&x| (0..a.size).all(|y| a.p_op(x, &[y, y]).unwrap() == y))
        .collect();
    let pos: HashMap<usize, usize> =
        universe.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let k = universe.len();
    let bottom = a.constants[0];
    let top = a.constants[1];
    if !pos.contains_key(&bottom) || !pos.contains_key(&top) {
        return Err(AlgebraError::BooleanFailure(
            "e1 or e2 not 2-central".into(),
        ));
    }

    let mut meet = vec![0usize; k * k];
    let mut join = vec![0usize; k * k];
    let mut complement = vec![0usize; k];
    for (i, &x) in universe.iter().enumerate() {
        complement[i] = a.p_op(x, &[top, bottom])?;
        if !pos.contains_key(&complement[i]) {
            return Err(AlgebraError::BooleanFailure(format!(
                "complement of {} leaves B_A",
                a.element_name(x)
            )));
        }
        for (j, &y) in universe.iter().enumerate() {
            meet[i * k + j] = a.p_op(x, &[bottom, y])?;
            join[i * k + j] = a.p_op(x, &[y, top])?;
            if !pos.contains_key(&meet[i * k + j]) || !pos.contains_key(&join[i * k + j]) {
                return Err(AlgebraError::BooleanFailure(
                    "meet or join leaves B_A".into(),
                ));
            }
        }
    }
    let b = FinBooleanAlgebra {
        universe,
        pos,
        meet,
        join,
        complement,
        bottom,
        top,
    };
    verify_boolean_axioms(&b, a)?;
    // closure characterization: B_A = { q(a', e1, e2, e1..e1) : a' in A }
    let mut image = BTreeSet::new();
    for x in 0..a.size {
        let mut args = vec![bottom; a.n.get() as usize];
        args[1] = top;
        image.insert(a.q_of(x, &args));
    }
    if image != b.universe.iter().copied().collect() {
        return Err(AlgebraError::BooleanFailure(
            "B_A differs from { q(a, e1, e2, e1..e1) : a in A }".into(),
        ));
    }
    Ok(b)
}

fn verify_boolean_axioms(
    b: &FinBooleanAlgebra,
    a: &FinAlgebra,
) -> Result<(), AlgebraError> {
    let fail = |what: &str, x: usize| {
        Err(AlgebraError::BooleanFailure(format!(
            "{what} fails at {}",
            a.element_name(x)
        )))
    };
    for &x in &b.universe {
        if b.join(x, b.bottom) != x || b.meet(x, b.top) != x {
            return fail("identity law", x);
        }
        if b.join(x, b.complement(x)) != b.top || b.meet(x, b.complement(x)) != b.bottom {
            return fail("complement law", x);
        }
        for &y in &b.universe {
            if b.meet(x, y) != b.meet(y, x) || b.join(x, y) != b.join(y, x) {
                return fail("commutativity", x);
            }
            if b.join(x, b.meet(x, y)) != x || b.meet(x, b.join(x, y)) != x {
                return fail("absorption", x);
            }
            for &z in &b.universe {
                if b.meet(x, b.meet(y, z)) != b.meet(b.meet(x, y), z)
                    || b.join(x, b.join(y, z)) != b.join(b.join(x, y), z)
                {
                    return fail("associativity", x);
                }
                if b.meet(x, b.join(y, z)) != b.join(b.meet(x, y), b.meet(x, z)) {
                    return fail("distributivity", x);
                }
            }
        }
    }
    Ok(())
}

/// The coordinate vector of `a_elem`: a_i = q(a, e1, .., e2 at i, .., e1).
pub fn coordinates(a: &FinAlgebra, a_elem: usize) -> Vec<usize> {
    let n = a.n.get() as usize;
    (0..n)
        .map(|i| {
            let mut args = vec![a.constants[0]; n];
            args[i] = a.constants[1];
            a.q_of(a_elem, &args)
        })
        .collect()
}

/// Outcome of verifying the representation A ~ n[B_A]: the coordinate
/// map onto fully orthogonal n-vectors over B_A.
#[derive(Debug, Clone)]
pub struct RepresentationReport {
    pub algebra_size: usize,
    pub boolean_size: usize,
    pub central_vector_count: usize,
    pub injective: bool,
    pub surjective: bool,
    pub coordinates_in_b: bool,
    pub orthogonal: bool,
    pub q_preserved: bool,
    pub inverse_ok: bool,
}

impl RepresentationReport {
    pub fn ok(&self) -> bool {
        self.injective
            && self.surjective
            && self.coordinates_in_b
            && self.orthogonal
            && self.q_preserved
            && self.inverse_ok
            && self.algebra_size == self.central_vector_count
    }
}

fn orthogonal_vectors(b: &FinBooleanAlgebra, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let k = b.len();
    for_all_tuples(k, n, |idx| {
        let v: Vec<usize> = idx.iter().map(|&i| b.universe[i]).collect();
        let join_all = v.iter().fold(b.bottom, |acc, &x| b.join(acc, x));
        let orth = (0..n)
            .all(|i| (0..i).all(|j| b.meet(v[i], v[j]) == b.bottom));
        if join_all == b.top && orth {
            out.push(v);
        }
        true
    });
    out
}

/// Verify the representation theorem on a pure nBA: the coordinate map
/// is a bijective q-homomorphism onto the fully orthogonal n-vectors
/// over B_A, and the nested-p inverse reconstructs every element.
pub fn representation_iso(a: &FinAlgebra) -> Result<RepresentationReport, AlgebraError> {
    let n = a.n.get() as usize;
    let b = coordinate_boolean_algebra(a)?;
    let coords: Vec<Vec<usize>> = (0..a.size).map(|x| coordinates(a, x)).collect();

    let coordinates_in_b = coords.iter().all(|v| v.iter().all(|&x| b.contains(x)));
    let orthogonal = coords.iter().all(|v| {
        let join_all = v.iter().fold(b.bottom, |acc, &x| b.join(acc, x));
        join_all == b.top
            && (0..n).all(|i| (0..i).all(|j| b.meet(v[i], v[j]) == b.bottom))
    });
    let distinct: BTreeSet<&Vec<usize>> = coords.iter().collect();
    let injective = distinct.len() == a.size;
    let central = orthogonal_vectors(&b, n);
    let central_set: BTreeSet<&Vec<usize>> = central.iter().collect();
    let surjective = coords.iter().all(|v| central_set.contains(v))
        && central.len() == distinct.len();

    // q preservation in coordinates: q(a, b^1..b^n)_i = V_j a_j & b^j_i
    let cnt = assignments(a.size, n + 1);
    if cnt > ASSIGN_CAP {
        return Err(AlgebraError::CapExceeded(cnt));
    }
    let mut q_preserved = true;
    for_all_tuples(a.size, n + 1, |tuple| {
        let head = tuple[0];
        let args = &tuple[1..];
        let result = a.q_of(head, args);
        for i in 0..n {
            let mut acc = b.bottom;
            for (j, &bj) in args.iter().enumerate() {
                acc = b.join(acc, b.meet(coords[head][j], coords[bj][i]));
            }
            if coords[result][i] != acc {
                q_preserved = false;
                return false;
            }
        }
        true
    });

    // explicit inverse: b = p(a1, p(a2, .. p(a_{n-1}, en, e_{n-1}) .., e3), e2), e1)
    let mut inverse_ok = true;
    for (x, v) in coords.iter().enumerate() {
        let mut acc = a.constants[n - 1];
        for i in (0..n - 1).rev() {
            acc = a.p_op(v[i], &[acc, a.constants[i]])?;
        }
        if acc != x {
            inverse_ok = false;
            break;
        }
    }

    Ok(RepresentationReport {
        algebra_size: a.size,
        boolean_size: b.len(),
        central_vector_count: central.len(),
        injective,
        surjective,
        coordinates_in_b,
        orthogonal,
        q_preserved,
        inverse_ok,
    })
}

// ---------------------------------------------------------------------
// permuted algebras and the symmetry theorem
// ---------------------------------------------------------------------

/// The algebra n^sigma on {e1..en}: q(e_i, y1..yn) = y_{sigma^{-1}(i)}.
/// The map x -> x^sigma is verified to be an isomorphism from n.
pub fn permuted_algebra(n: Dimension, sigma: &Permutation) -> FinAlgebra {
    assert_eq!(sigma.degree(), n.get(), "permutation degree must be n");
    let nv = n.get() as usize;
    let inv = sigma.inverse();
    let mut table = vec![0usize; nv.pow(nv as u32 + 1)];
    for_all_tuples(nv, nv + 1, |tuple| {
        let mut key = tuple[0];
        for &x in &tuple[1..] {
            key = key * nv + x;
        }
        table[key] = tuple[1 + (inv.apply(tuple[0] as u32 + 1) - 1) as usize];
        true
    });
    let permuted = FinAlgebra {
        name: format!("{}^sigma", nv),
        n,
        size: nv,
        constants: (0..nv).collect(),
        tuples: None,
        tuple_index: HashMap::new(),
        q: QRepr::Table(table),
        extra_ops: BTreeMap::new(),
    };
    // x^sigma = q^n(x, e_{sigma 1}, .., e_{sigma n}); in n, e_i^sigma =
    // e_{sigma(i)}. Verify it is an isomorphism n -> n^sigma.
    let plain = power_algebra(n, 1).expect("n itself is within caps");
    let h = |x: usize| (sigma.apply(x as u32 + 1) - 1) as usize;
    let iso = for_all_tuples(nv, nv + 1, |tuple| {
        let image_head = h(tuple[0]);
        let image_args: Vec<usize> = tuple[1..].iter().map(|&x| h(x)).collect();
        h(plain.q_of(tuple[0], &tuple[1..])) == permuted.q_of(image_head, &image_args)
    });
    assert!(iso, "x -> x^sigma must be an isomorphism onto n^sigma");
    permuted
}

fn remap_constants(t: &Term, sigma: &Permutation) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Const(i) => Term::Const(sigma.apply(*i)),
        Term::Q(head, args) => Term::q(
            remap_constants(head, sigma),
            args.iter().map(|a| remap_constants(a, sigma)).collect(),
        ),
        Term::App(name, args) => Term::app(
            name,
            args.iter().map(|a| remap_constants(a, sigma)).collect(),
        ),
    }
}

/// The three judgements of the symmetry theorem, each decided by brute
/// force, returned as (agree, [j1, j2, j3]):
/// Gamma |= phi at (n, e_i); Gamma^sigma |= phi^sigma at (n, e_{sigma i});
/// Gamma |= phi at (n^sigma, e_{sigma i}).
pub fn check_symmetry(
    premises: &[Term],
    phi: &Term,
    sigma: &Permutation,
    i: Value,
    n: Dimension,
) -> Result<(bool, [bool; 3]), AlgebraError> {
    let inv = sigma.inverse();
    let j1 = models_with_selector(
        &MatrixJudgement {
            premises: premises.to_vec(),
            conclusion: phi.clone(),
            designated: i,
        },
        n,
        &|v| v,
    )?;
    let j2 = models_with_selector(
        &MatrixJudgement {
            premises: premises
                .iter()
                .map(|p| p.apply_permutation(sigma))
                .collect::<Result<_, _>>()?,
            conclusion: phi.apply_permutation(sigma)?,
            designated: sigma.apply(i),
        },
        n,
        &|v| v,
    )?;
    // in n^sigma the head value e_v selects argument sigma^{-1}(v) and
    // the constant symbol e_j denotes e_{sigma j} (forced by the
    // isomorphism x -> x^sigma)
    let j3 = models_with_selector(
        &MatrixJudgement {
            premises: premises.iter().map(|p| remap_constants(p, sigma)).collect(),
            conclusion: remap_constants(phi, sigma),
            designated: sigma.apply(i),
        },
        n,
        &|v| inv.apply(v),
    )?;
    Ok((j1 == j2 && j2 == j3, [j1, j2, j3]))
}

// ---------------------------------------------------------------------
// congruences
// ---------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(size: usize) -> Self {
        UnionFind {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx.max(ry)] = rx.min(ry);
        true
    }
}

/// The principal congruence theta(x, y): class representative for each
/// element. Closure interleaves transitivity (union-find) with
/// compatibility under every operation, one argument at a time.
pub fn principal_congruence(
    a: &FinAlgebra,
    x: usize,
    y: usize,
) -> Result<Vec<usize>, AlgebraError> {
    if x >= a.size || y >= a.size {
        return Err(AlgebraError::BadElement(x.max(y), a.size));
    }
    let n = a.n.get() as usize;
    let per_pass = assignments(a.size, n + 1)
        .saturating_mul((n as u64 + 1) * a.size as u64);
    if per_pass > ASSIGN_CAP * 16 {
        return Err(AlgebraError::CapExceeded(per_pass));
    }
    let mut uf = UnionFind::new(a.size);
    uf.union(x, y);
    let mut changed = true;
    while changed {
        changed = false;
        // q compatibility
        changed |= !for_all_tuples(a.size, n + 1, |tuple| {
            for pos in 0..=n {
                for other in 0..a.size {
                    if uf.find(other) != uf.find(tuple[pos]) || other == tuple[pos] {
                        continue;
                    }
                    let mut alt = tuple.to_vec();
                    alt[pos] = other;
                    let r1 = a.q_of(tuple[0], &tuple[1..]);
                    let r2 = a.q_of(alt[0], &alt[1..]);
                    if uf.union(r1, r2) {
                        return false; // restart the pass
                    }
                }
            }
            true
        });
        for op in a.extra_ops.values() {
            changed |= !for_all_tuples(a.size, op.arity, |tuple| {
                for pos in 0..op.arity {
                    for other in 0..a.size {
                        if uf.find(other) != uf.find(tuple[pos]) || other == tuple[pos] {
                            continue;
                        }
                        let mut alt = tuple.to_vec();
                        alt[pos] = other;
                        if uf.union(op.apply(tuple, a.size), op.apply(&alt, a.size)) {
                            return false;
                        }
                    }
                }
                true
            });
        }
    }
    Ok((0..a.size).map(|e| uf.find(e)).collect())
}

/// Does the congruence collapse everything?
pub fn is_total_congruence(classes: &[usize]) -> bool {
    classes.iter().all(|&c| c == classes[0])
}

// ---------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------

/// Parse an algebra definition file: `algebra <name>`, `n <int>`, then
/// either `pointwise-power <I_size>` or `universe <size>` with
/// `constant <i> <elem>` and `q <e0> .. <en> -> <elem>` lines; extra
/// operations as `op <name> <arity>` followed by `table <entries..>`.
pub fn parse_algebra(text: &str) -> Result<FinAlgebra, AlgebraError> {
    let fail = |line: usize, message: &str| AlgebraError::File {
        line,
        message: message.to_string(),
    };
    let mut name: Option<String> = None;
    let mut n: Option<u32> = None;
    let mut universe: Option<usize> = None;
    let mut power: Option<usize> = None;
    let mut constants: BTreeMap<u32, usize> = BTreeMap::new();
    let mut q_lines: Vec<(usize, Vec<usize>, usize)> = Vec::new();
    let mut ops: Vec<(String, usize, Vec<usize>, usize)> = Vec::new(); // name, arity, table, line

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        match key {
            "algebra" => {
                name = Some(
                    parts
                        .next()
                        .ok_or_else(|| fail(lineno, "missing algebra name"))?
                        .to_string(),
                );
            }
            "n" => {
                n = Some(
                    parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail(lineno, "bad `n` value"))?,
                );
            }
            "universe" => {
                universe = Some(
                    parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail(lineno, "bad `universe` size"))?,
                );
            }
            "pointwise-power" => {
                power = Some(
                    parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| fail(lineno, "bad `pointwise-power` size"))?,
                );
            }
            "constant" => {
                let i: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad constant index"))?;
                let e: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad constant element"))?;
                constants.insert(i, e);
            }
            "q" => {
                let fields: Vec<&str> = parts.collect();
                let arrow = fields
                    .iter()
                    .position(|&f| f == "->")
                    .ok_or_else(|| fail(lineno, "q line needs `->`"))?;
                let ins: Vec<usize> = fields[..arrow]
                    .iter()
                    .map(|s| s.parse().map_err(|_| fail(lineno, "bad q element")))
                    .collect::<Result<_, _>>()?;
                let out: usize = fields
                    .get(arrow + 1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad q result"))?;
                if ins.is_empty() {
                    return Err(fail(lineno, "q line needs n + 1 inputs"));
                }
                q_lines.push((ins[0], ins[1..].to_vec(), out));
            }
            "op" => {
                let oname = parts
                    .next()
                    .ok_or_else(|| fail(lineno, "missing op name"))?
                    .to_string();
                let arity: usize = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| fail(lineno, "bad op arity"))?;
                ops.push((oname, arity, Vec::new(), lineno));
            }
            "table" => {
                let (_, _, table, _) = ops
                    .last_mut()
                    .ok_or_else(|| fail(lineno, "`table` line without an `op` line"))?;
                for s in parts {
                    table.push(
                        s.parse()
                            .map_err(|_| fail(lineno, "bad table entry"))?,
                    );
                }
            }
            _ => return Err(fail(lineno, "unrecognized line")),
        }
    }

    let name = name.ok_or_else(|| fail(0, "missing `algebra` line"))?;
    let n = Dimension::new(n.ok_or_else(|| fail(0, "missing `n` line"))?)
        .map_err(|_| fail(0, "n must be at least 2"))?;
    let nv = n.get() as usize;

    let mut algebra = if let Some(i_size) = power {
        let mut a = power_algebra(n, i_size)?;
        a.name = name;
        a
    } else {
        let size = universe.ok_or_else(|| fail(0, "missing `universe` line"))?;
        FinAlgebra::check_caps(n, size)?;
        let table_len = size
            .checked_pow(nv as u32 + 1)
            .filter(|&l| (l as u64) <= ASSIGN_CAP)
            .ok_or_else(|| fail(0, "universe too large for an explicit q table"))?;
        let mut table = vec![usize::MAX; table_len];
        for (head, args, out) in q_lines {
            if args.len() != nv {
                return Err(fail(0, "q line has the wrong number of arguments"));
            }
            for &e in std::iter::once(&head).chain(args.iter()).chain(std::iter::once(&out))
            {
                if e >= size {
                    return Err(AlgebraError::BadElement(e, size));
                }
            }
            let mut key = head;
            for &x in &args {
                key = key * size + x;
            }
            table[key] = out;
        }
        if table.iter().any(|&v| v == usize::MAX) {
            return Err(fail(0, "q table is not total"));
        }
        let mut cs = vec![usize::MAX; nv];
        for (i, e) in constants {
            if i < 1 || i as usize > nv {
                return Err(fail(0, "constant index out of range"));
            }
            if e >= size {
                return Err(AlgebraError::BadElement(e, size));
            }
            cs[i as usize - 1] = e;
        }
        if cs.iter().any(|&c| c == usize::MAX) {
            return Err(fail(0, "all constants e1..en must be declared"));
        }
        let a = FinAlgebra {
            name,
            n,
            size,
            constants: cs,
            tuples: None,
            tuple_index: HashMap::new(),
            q: QRepr::Table(table),
            extra_ops: BTreeMap::new(),
        };
        // defining law of dimension-n algebras: q(e_i, b1..bn) = b_i
        let mut ok = true;
        for_all_tuples(size, nv, |args| {
            for i in 0..nv {
                if a.q_of(a.constants[i], args) != args[i] {
                    ok = false;
                    return false;
                }
            }
            true
        });
        if !ok {
            return Err(fail(0, "q(e_i, b1..bn) = b_i fails"));
        }
        if size >= nv {
            let distinct: BTreeSet<usize> = a.constants.iter().copied().collect();
            if distinct.len() != nv {
                return Err(fail(0, "constants must be distinct"));
            }
        }
        a
    };

    for (oname, arity, table, lineno) in ops {
        let expected = algebra.size.pow(arity as u32);
        if table.len() != expected {
            return Err(fail(lineno, "op table has the wrong length"));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= algebra.size) {
            return Err(AlgebraError::BadElement(bad, algebra.size));
        }
        algebra.extra_ops.insert(oname, Operation { arity, table });
    }
    Ok(algebra)
}
