//! Finite semirings, free semimodules over a finite basis, central
//! vectors, semiring powers, and Boolean powers.
//!
//! A vector over a semiring `R` with basis `E` is a total map `E -> R`.
//! The selector `q_I` acts on vectors by scalar combination, and the
//! vectors that are central for `q_I` are exactly those whose
//! coordinates are orthogonal commuting idempotents summing to one.
//! The set of `E`-central vectors carries the semiring power `E[R]`,
//! which is isomorphic to the Boolean power of `E` by the Boolean
//! algebra `C(R)` of complemented and commuting elements of `R`; for a
//! base algebra of size n this specializes to the Foster-style
//! representation of members of the generated variety as powers of the
//! generator over the atoms of their coordinate Boolean algebra.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::algebra::{
    coordinate_boolean_algebra, coordinates, for_all_tuples, AlgebraError, FinAlgebra,
    Operation,
};
/// Cap on exhaustive enumerations (vectors, table builds, tuple scans).
pub const POWER_CAP: u64 = 2_000_000;

#[derive(Debug, Error)]
pub enum PowerError {
    #[error("semiring axiom {name} fails at {witness}")]
    SemiringAxiom { name: String, witness: String },
    #[error("element {0} out of range for a universe of size {1}")]
    BadElement(usize, usize),
    #[error("invalid basis subset: {0}")]
    BadBasis(String),
    #[error("vector has {found} coordinates, expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("enumeration of {0} cases exceeds the cap")]
    CapExceeded(u64),
    #[error("Boolean structure violation: {0}")]
    BooleanFailure(String),
    #[error("base algebra is not an n-element nBA: {0}")]
    NotNba(String),
    #[error("unknown built-in semiring `{0}`")]
    UnknownSemiring(String),
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

// ---------------------------------------------------------------------
// finite semirings
// ---------------------------------------------------------------------

/// A finite semiring given by full addition and multiplication tables
/// (row-major, first argument slowest). Multiplication is not assumed
/// commutative. All axioms are verified exhaustively at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSemiring {
    pub name: String,
    pub size: usize,
    add_table: Vec<usize>,
    mul_table: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

impl FinSemiring {
    /// Build and validate a semiring: commutative additive monoid,
    /// multiplicative monoid, annihilation, and both distributive laws.
    pub fn new(
        name: impl Into<String>,
        size: usize,
        add_table: Vec<usize>,
        mul_table: Vec<usize>,
        zero: usize,
        one: usize,
    ) -> Result<Self, PowerError> {
        if add_table.len() != size * size || mul_table.len() != size * size {
            return Err(PowerError::SemiringAxiom {
                name: "totality".into(),
                witness: format!(
                    "table lengths {} and {}, expected {}",
                    add_table.len(),
                    mul_table.len(),
                    size * size
                ),
            });
        }
        for &v in add_table.iter().chain(&mul_table) {
            if v >= size {
                return Err(PowerError::BadElement(v, size));
            }
        }
        if zero >= size {
            return Err(PowerError::BadElement(zero, size));
        }
        if one >= size {
            return Err(PowerError::BadElement(one, size));
        }
        let r = FinSemiring {
            name: name.into(),
            size,
            add_table,
            mul_table,
            zero,
            one,
        };
        r.verify_axioms()?;
        Ok(r)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add_table[a * self.size + b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table[a * self.size + b]
    }

    fn verify_axioms(&self) -> Result<(), PowerError> {
        let fail = |name: &str, witness: String| {
            Err(PowerError::SemiringAxiom {
                name: name.into(),
                witness,
            })
        };
        for x in 0..self.size {
            if self.add(x, self.zero) != x || self.add(self.zero, x) != x {
                return fail("additive identity", format!("x={x}"));
            }
            if self.mul(x, self.one) != x || self.mul(self.one, x) != x {
                return fail("multiplicative identity", format!("x={x}"));
            }
            if self.mul(x, self.zero) != self.zero || self.mul(self.zero, x) != self.zero {
                return fail("SR1", format!("x={x}"));
            }
        }
        for x in 0..self.size {
            for y in 0..self.size {
                if self.add(x, y) != self.add(y, x) {
                    return fail("additive commutativity", format!("x={x}, y={y}"));
                }
                for z in 0..self.size {
                    if self.add(self.add(x, y), z) != self.add(x, self.add(y, z)) {
                        return fail(
                            "additive associativity",
                            format!("x={x}, y={y}, z={z}"),
                        );
                    }
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                        return fail(
                            "multiplicative associativity",
                            format!("x={x}, y={y}, z={z}"),
                        );
                    }
                    if self.mul(x, self.add(y, z)) != self.add(self.mul(x, y), self.mul(x, z))
                    {
                        return fail("SR2", format!("x={x}, y={y}, z={z}"));
                    }
                    if self.add(self.mul(y, x), self.mul(z, x)) != self.mul(self.add(y, z), x)
                    {
                        return fail("SR3", format!("x={x}, y={y}, z={z}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A built-in semiring by name: `bool2` and `bool4` (Boolean algebras
/// with join as addition and meet as multiplication), `z4` (the ring of
/// integers modulo 4), `chain3` (the bounded chain 0 < 1 < 2 with max
/// and min).
pub fn builtin_semiring(name: &str) -> Result<FinSemiring, PowerError> {
    let lattice = |name: &str, size: usize| {
        let add: Vec<usize> = (0..size)
            .flat_map(|a| (0..size).map(move |b| a.max(b)))
            .collect();
        let mul: Vec<usize> = (0..size)
            .flat_map(|a| (0..size).map(move |b| a.min(b)))
            .collect();
        FinSemiring::new(name, size, add, mul, 0, size - 1)
    };
    match name {
        "bool2" => lattice("bool2", 2),
        "chain3" => lattice("chain3", 3),
        "bool4" => {
            // elements are the subsets of a 2-atom Boolean algebra,
            // encoded as bit masks 0..4
            let add: Vec<usize> = (0..4).flat_map(|a| (0..4).map(move |b| a | b)).collect();
            let mul: Vec<usize> = (0..4).flat_map(|a| (0..4).map(move |b| a & b)).collect();
            FinSemiring::new("bool4", 4, add, mul, 0, 3)
        }
        "z4" => {
            let add: Vec<usize> =
                (0..4).flat_map(|a| (0..4).map(move |b| (a + b) % 4)).collect();
            let mul: Vec<usize> =
                (0..4).flat_map(|a| (0..4).map(move |b| (a * b) % 4)).collect();
            FinSemiring::new("z4", 4, add, mul, 0, 1)
        }
        other => Err(PowerError::UnknownSemiring(other.to_string())),
    }
}

// ---------------------------------------------------------------------
// free vectors and the selector q_I
// ---------------------------------------------------------------------

/// A vector of the free semimodule over a finite basis: a total map
/// from basis positions to semiring elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeVector {
    pub coords: Vec<usize>,
}

impl FreeVector {
    /// The zero vector over `basis` positions.
    pub fn zero(r: &FinSemiring, basis: usize) -> Self {
        FreeVector {
            coords: vec![r.zero; basis],
        }
    }

    /// The basis vector `1 * e` at position `e`.
    pub fn unit(r: &FinSemiring, basis: usize, e: usize) -> Self {
        let mut coords = vec![r.zero; basis];
        coords[e] = r.one;
        FreeVector { coords }
    }
}

impl std::fmt::Display for FreeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}]",
            self.coords
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// Coordinatewise sum of two vectors.
pub fn vector_add(r: &FinSemiring, v: &FreeVector, w: &FreeVector) -> FreeVector {
    FreeVector {
        coords: v
            .coords
            .iter()
            .zip(&w.coords)
            .map(|(&a, &b)| r.add(a, b))
            .collect(),
    }
}

/// Left scalar multiple `s * v`.
pub fn scalar_mul(r: &FinSemiring, s: usize, v: &FreeVector) -> FreeVector {
    FreeVector {
        coords: v.coords.iter().map(|&a| r.mul(s, a)).collect(),
    }
}

fn check_basis_subset(basis: usize, i_set: &[usize]) -> Result<(), PowerError> {
    if i_set.is_empty() {
        return Err(PowerError::BadBasis("empty index set".into()));
    }
    let mut seen = vec![false; basis];
    for &e in i_set {
        if e >= basis {
            return Err(PowerError::BadBasis(format!(
                "position {e} outside basis of size {basis}"
            )));
        }
        if seen[e] {
            return Err(PowerError::BadBasis(format!("duplicate position {e}")));
        }
        seen[e] = true;
    }
    Ok(())
}

/// The selector on vectors: `q_I(v, w^1..w^n)_d = sum_i v_{e_i} * w^i_d`,
/// where `e_1..e_n` are the basis positions listed in `i_set`.
pub fn q_i(
    r: &FinSemiring,
    v: &FreeVector,
    ws: &[FreeVector],
    i_set: &[usize],
) -> FreeVector {
    debug_assert_eq!(ws.len(), i_set.len());
    let basis = v.coords.len();
    let mut out = vec![r.zero; basis];
    for (d, slot) in out.iter_mut().enumerate() {
        let mut acc = r.zero;
        for (&e, w) in i_set.iter().zip(ws) {
            acc = r.add(acc, r.mul(v.coords[e], w.coords[d]));
        }
        *slot = acc;
    }
    FreeVector { coords: out }
}

/// Is `v` central for `q_I`? Checks the four coordinate conditions:
/// (i) coordinates off `I` vanish, (ii) the `I`-coordinates sum to one,
/// (iii) each commutes with every semiring element, and (iv) they are
/// orthogonal idempotents.
pub fn is_i_central(r: &FinSemiring, v: &FreeVector, i_set: &[usize]) -> bool {
    let basis = v.coords.len();
    let mut in_i = vec![false; basis];
    for &e in i_set {
        in_i[e] = true;
    }
    // (i)
    if (0..basis).any(|d| !in_i[d] && v.coords[d] != r.zero) {
        return false;
    }
    // (ii)
    let sum = i_set.iter().fold(r.zero, |acc, &e| r.add(acc, v.coords[e]));
    if sum != r.one {
        return false;
    }
    // (iii)
    for &e in i_set {
        let a = v.coords[e];
        if (0..r.size).any(|x| r.mul(a, x) != r.mul(x, a)) {
            return false;
        }
    }
    // (iv)
    for (p, &e) in i_set.iter().enumerate() {
        for (q, &f) in i_set.iter().enumerate() {
            let prod = r.mul(v.coords[e], v.coords[f]);
            let want = if p == q { v.coords[e] } else { r.zero };
            if prod != want {
                return false;
            }
        }
    }
    true
}

/// All `|R|^basis` vectors, in mixed-radix order.
pub fn all_vectors(r: &FinSemiring, basis: usize) -> Result<Vec<FreeVector>, PowerError> {
    let count = (r.size as u64)
        .checked_pow(basis as u32)
        .unwrap_or(u64::MAX);
    if count > POWER_CAP {
        return Err(PowerError::CapExceeded(count));
    }
    let mut out = Vec::with_capacity(count as usize);
    for_all_tuples(r.size, basis, |coords| {
        out.push(FreeVector {
            coords: coords.to_vec(),
        });
        true
    });
    Ok(out)
}

/// The vectors central for `q_I` with `I` the whole basis in order.
pub fn central_vectors(
    r: &FinSemiring,
    basis: usize,
) -> Result<Vec<FreeVector>, PowerError> {
    let i_set: Vec<usize> = (0..basis).collect();
    Ok(all_vectors(r, basis)?
        .into_iter()
        .filter(|v| is_i_central(r, v, &i_set))
        .collect())
}

// ---------------------------------------------------------------------
// cross-validation of the two centrality characterizations
// ---------------------------------------------------------------------

/// Outcome of comparing the coordinate conditions against the direct
/// identity test in the vector algebra.
#[derive(Debug, Clone)]
pub struct CentralityReport {
    pub checked: usize,
    pub disagreements: Vec<FreeVector>,
}

impl CentralityReport {
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Test centrality of `a` directly in the vector algebra, by the B1-B3
/// identities over the semimodule operations: B1 and B2 literally, B3
/// for vector addition, for every scalar multiplication, and for the
/// selector itself. When the full selector instance of B3 is too large
/// to enumerate, its derived diagonal consequence (the B4 identity) is
/// checked instead; together with the linear B3 instances this pins
/// down the same coordinate conditions, so the substitution is exact.
fn directly_central(
    r: &FinSemiring,
    a: &FreeVector,
    i_set: &[usize],
    vectors: &[FreeVector],
) -> Result<bool, PowerError> {
    let n = i_set.len();
    let basis = a.coords.len();
    let vcount = vectors.len();
    let pow = |k: u32| (vcount as u64).checked_pow(k).unwrap_or(u64::MAX);

    // B1: q(a, e_1..e_n) = a
    let units: Vec<FreeVector> = i_set
        .iter()
        .map(|&e| FreeVector::unit(r, basis, e))
        .collect();
    if q_i(r, a, &units, i_set) != *a {
        return Ok(false);
    }
    // B2: q(a, b..b) = b
    for b in vectors {
        if q_i(r, a, &vec![b.clone(); n], i_set) != *b {
            return Ok(false);
        }
    }
    // B3 for vector addition
    if pow(2 * n as u32) > POWER_CAP {
        return Err(PowerError::CapExceeded(pow(2 * n as u32)));
    }
    let mut ok = true;
    for_all_tuples(vcount, 2 * n, |idx| {
        let ws: Vec<FreeVector> = idx[..n].iter().map(|&j| vectors[j].clone()).collect();
        let vs: Vec<FreeVector> = idx[n..].iter().map(|&j| vectors[j].clone()).collect();
        let sums: Vec<FreeVector> = ws
            .iter()
            .zip(&vs)
            .map(|(w, v)| vector_add(r, w, v))
            .collect();
        ok = q_i(r, a, &sums, i_set)
            == vector_add(r, &q_i(r, a, &ws, i_set), &q_i(r, a, &vs, i_set));
        ok
    });
    if !ok {
        return Ok(false);
    }
    // B3 for every scalar multiplication
    for s in 0..r.size {
        let mut ok = true;
        for_all_tuples(vcount, n, |idx| {
            let ws: Vec<FreeVector> = idx.iter().map(|&j| vectors[j].clone()).collect();
            let scaled: Vec<FreeVector> = ws.iter().map(|w| scalar_mul(r, s, w)).collect();
            ok = q_i(r, a, &scaled, i_set) == scalar_mul(r, s, &q_i(r, a, &ws, i_set));
            ok
        });
        if !ok {
            return Ok(false);
        }
    }
    // B3 for the selector itself, or its diagonal consequence
    if pow((n * (n + 1)) as u32) <= POWER_CAP {
        // matrix x with n rows of length n+1; row i is a full selector
        // application, column j is selected by a
        let mut ok = true;
        for_all_tuples(vcount, n * (n + 1), |idx| {
            let row = |i: usize| -> Vec<FreeVector> {
                (0..n + 1)
                    .map(|j| vectors[idx[i * (n + 1) + j]].clone())
                    .collect()
            };
            let rows: Vec<Vec<FreeVector>> = (0..n).map(row).collect();
            let lhs_args: Vec<FreeVector> = rows
                .iter()
                .map(|x| q_i(r, &x[0], &x[1..], i_set))
                .collect();
            let lhs = q_i(r, a, &lhs_args, i_set);
            let cols: Vec<Vec<FreeVector>> = (0..n + 1)
                .map(|j| rows.iter().map(|x| x[j].clone()).collect())
                .collect();
            let sel: Vec<FreeVector> =
                cols.iter().map(|c| q_i(r, a, c, i_set)).collect();
            let rhs = q_i(r, &sel[0], &sel[1..], i_set);
            ok = lhs == rhs;
            ok
        });
        if !ok {
            return Ok(false);
        }
    } else if pow((n * n) as u32) <= POWER_CAP {
        let mut ok = true;
        for_all_tuples(vcount, n * n, |idx| {
            let outer: Vec<FreeVector> = (0..n)
                .map(|i| {
                    let row: Vec<FreeVector> =
                        (0..n).map(|j| vectors[idx[i * n + j]].clone()).collect();
                    q_i(r, a, &row, i_set)
                })
                .collect();
            let diag: Vec<FreeVector> =
                (0..n).map(|i| vectors[idx[i * n + i]].clone()).collect();
            ok = q_i(r, a, &outer, i_set) == q_i(r, a, &diag, i_set);
            ok
        });
        if !ok {
            return Ok(false);
        }
    } else {
        return Err(PowerError::CapExceeded(pow((n * n) as u32)));
    }
    Ok(true)
}

/// For each sampled vector, compare the coordinate conditions with the
/// direct identity test in the vector algebra over all of `R^basis`.
pub fn cross_validate_centrality(
    r: &FinSemiring,
    basis: usize,
    i_set: &[usize],
    sample: &[FreeVector],
) -> Result<CentralityReport, PowerError> {
    check_basis_subset(basis, i_set)?;
    let vectors = all_vectors(r, basis)?;
    let mut disagreements = Vec::new();
    for a in sample {
        if a.coords.len() != basis {
            return Err(PowerError::VectorLength {
                expected: basis,
                found: a.coords.len(),
            });
        }
        let by_conditions = is_i_central(r, a, i_set);
        let by_identities = directly_central(r, a, i_set, &vectors)?;
        if by_conditions != by_identities {
            disagreements.push(a.clone());
        }
    }
    Ok(CentralityReport {
        checked: sample.len(),
        disagreements,
    })
}

// ---------------------------------------------------------------------
// the complemented-commuting core C(R)
// ---------------------------------------------------------------------

/// The Boolean algebra of complemented and commuting elements of a
/// semiring, with join `r + r's`, meet `rs`, and the (unique)
/// complement. Members are identified by their semiring element ids.
#[derive(Debug, Clone)]
pub struct ComplementedCore {
    /// members as semiring element ids, sorted
    pub universe: Vec<usize>,
    pos: HashMap<usize, usize>,
    join: Vec<usize>,
    meet: Vec<usize>,
    complement: Vec<usize>,
    pub bottom: usize,
    pub top: usize,
}

impl ComplementedCore {
    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.pos.contains_key(&x)
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[self.pos[&x] * self.len() + self.pos[&y]]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[self.pos[&x] * self.len() + self.pos[&y]]
    }

    pub fn complement(&self, x: usize) -> usize {
        self.complement[self.pos[&x]]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.meet(x, y) == x
    }

    /// The atoms: minimal nonzero members.
    pub fn atoms(&self) -> Vec<usize> {
        self.universe
            .iter()
            .copied()
            .filter(|&x| {
                x != self.bottom
                    && self
                        .universe
                        .iter()
                        .all(|&b| b == self.bottom || b == x || !self.leq(b, x))
            })
            .collect()
    }
}

/// Compute C(R) with full verification: complement uniqueness,
/// idempotence, closure of join/meet/complement, the Boolean axioms,
/// and the orthogonal-sum law (every pairwise-orthogonal family of
/// members has its sum equal to its join).
pub fn complemented_core(r: &FinSemiring) -> Result<ComplementedCore, PowerError> {
    let mut universe = Vec::new();
    let mut comp_of: HashMap<usize, usize> = HashMap::new();
    for x in 0..r.size {
        let commuting = (0..r.size).all(|t| r.mul(x, t) == r.mul(t, x));
        if !commuting {
            continue;
        }
        let comps: Vec<usize> = (0..r.size)
            .filter(|&s| r.add(x, s) == r.one && r.mul(x, s) == r.zero)
            .collect();
        match comps.as_slice() {
            [] => {}
            [s] => {
                universe.push(x);
                comp_of.insert(x, *s);
            }
            _ => {
                return Err(PowerError::BooleanFailure(format!(
                    "complement of {x} is not unique"
                )))
            }
        }
    }
    let pos: HashMap<usize, usize> =
        universe.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    if !pos.contains_key(&r.zero) || !pos.contains_key(&r.one) {
        return Err(PowerError::BooleanFailure(
            "zero or one is not complemented and commuting".into(),
        ));
    }
    let k = universe.len();
    let mut join = vec![0usize; k * k];
    let mut meet = vec![0usize; k * k];
    let mut complement = vec![0usize; k];
    for (i, &x) in universe.iter().enumerate() {
        if r.mul(x, x) != x {
            return Err(PowerError::BooleanFailure(format!("{x} is not idempotent")));
        }
        complement[i] = comp_of[&x];
        if !pos.contains_key(&complement[i]) {
            return Err(PowerError::BooleanFailure(format!(
                "complement of {x} leaves C(R)"
            )));
        }
        for (j, &y) in universe.iter().enumerate() {
            join[i * k + j] = r.add(x, r.mul(comp_of[&x], y));
            meet[i * k + j] = r.mul(x, y);
            if !pos.contains_key(&join[i * k + j]) || !pos.contains_key(&meet[i * k + j]) {
                return Err(PowerError::BooleanFailure(
                    "join or meet leaves C(R)".into(),
                ));
            }
        }
    }
    let core = ComplementedCore {
        universe,
        pos,
        join,
        meet,
        complement,
        bottom: r.zero,
        top: r.one,
    };
    verify_core_boolean_axioms(&core)?;
    verify_orthogonal_sums(r, &core)?;
    Ok(core)
}

fn verify_core_boolean_axioms(b: &ComplementedCore) -> Result<(), PowerError> {
    let fail = |what: &str, x: usize| {
        Err(PowerError::BooleanFailure(format!("{what} fails at {x}")))
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

/// Every pairwise-orthogonal family in C(R) has semiring sum equal to
/// Boolean join.
fn verify_orthogonal_sums(r: &FinSemiring, core: &ComplementedCore) -> Result<(), PowerError> {
    let k = core.len();
    if k > 16 {
        return Err(PowerError::CapExceeded(1u64 << k));
    }
    for mask in 0u32..(1 << k) {
        let family: Vec<usize> = (0..k)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| core.universe[i])
            .collect();
        let orthogonal = family.iter().enumerate().all(|(i, &x)| {
            family
                .iter()
                .enumerate()
                .all(|(j, &y)| i == j || r.mul(x, y) == r.zero)
        });
        if !orthogonal {
            continue;
        }
        let sum = family.iter().fold(r.zero, |acc, &x| r.add(acc, x));
        let joined = family.iter().fold(core.bottom, |acc, &x| core.join(acc, x));
        if sum != joined {
            return Err(PowerError::BooleanFailure(format!(
                "orthogonal sum {sum} differs from join {joined}"
            )));
        }
    }
    Ok(())
}

/// Repackage C(R) as a semiring in its own right (join as addition,
/// meet as multiplication), with members reindexed to `0..|C(R)|`.
/// Validation doubles as a check that C(R) really is a bounded
/// distributive lattice.
pub fn core_semiring(
    r: &FinSemiring,
    core: &ComplementedCore,
) -> Result<FinSemiring, PowerError> {
    let k = core.len();
    let add: Vec<usize> = core
        .universe
        .iter()
        .flat_map(|&x| core.universe.iter().map(move |&y| (x, y)))
        .map(|(x, y)| core.pos[&core.join(x, y)])
        .collect();
    let mul: Vec<usize> = core
        .universe
        .iter()
        .flat_map(|&x| core.universe.iter().map(move |&y| (x, y)))
        .map(|(x, y)| core.pos[&core.meet(x, y)])
        .collect();
    FinSemiring::new(
        format!("C({})", r.name),
        k,
        add,
        mul,
        core.pos[&core.bottom],
        core.pos[&core.top],
    )
}

/// The sets of central vectors over `R` and over `C(R)` coincide
/// literally (coordinates of central vectors always land in C(R)).
pub fn semiboolean_check(r: &FinSemiring, basis: usize) -> Result<bool, PowerError> {
    let over_r = central_vectors(r, basis)?;
    let core = complemented_core(r)?;
    let csr = core_semiring(r, &core)?;
    let mut over_c: Vec<FreeVector> = central_vectors(&csr, basis)?
        .into_iter()
        .map(|v| FreeVector {
            coords: v.coords.iter().map(|&i| core.universe[i]).collect(),
        })
        .collect();
    let mut over_r = over_r;
    over_r.sort_by(|a, b| a.coords.cmp(&b.coords));
    over_c.sort_by(|a, b| a.coords.cmp(&b.coords));
    Ok(over_r == over_c)
}

// ---------------------------------------------------------------------
// semiring powers
// ---------------------------------------------------------------------

/// The semiring power `E[R]`: the algebra of `E`-central vectors with
/// the vector selector and the linearly lifted extra operations.
#[derive(Debug, Clone)]
pub struct SemiringPower {
    pub algebra: FinAlgebra,
    /// universe vectors, indexed by algebra element id
    pub vectors: Vec<FreeVector>,
}

/// Linearly lift an operation of the base algebra to vectors:
/// `w_c = sum over tuples d with g(d) = c of v1_{d1} * .. * vm_{dm}`.
fn lift_operation(
    r: &FinSemiring,
    e_size: usize,
    op: &Operation,
    args: &[&FreeVector],
) -> FreeVector {
    let mut out = vec![r.zero; e_size];
    for_all_tuples(e_size, op.arity, |ds| {
        let mut prod = r.one;
        for (arg, &d) in args.iter().zip(ds) {
            prod = r.mul(prod, arg.coords[d]);
        }
        let c = op.apply(ds, e_size);
        out[c] = r.add(out[c], prod);
        true
    });
    FreeVector { coords: out }
}

/// Build `E[R]` for a base algebra whose universe is exactly its n
/// constants. The universe is the set of `E`-central vectors; the
/// selector acts by scalar combination against the constant positions,
/// and every extra operation of `E` is lifted linearly (closure of the
/// lifts on central vectors is verified).
pub fn semiring_power(
    e: &FinAlgebra,
    r: &FinSemiring,
) -> Result<SemiringPower, PowerError> {
    let n = e.n.get() as usize;
    if e.size != n {
        return Err(PowerError::NotNba(format!(
            "size {} differs from dimension {n}",
            e.size
        )));
    }
    let i_set: Vec<usize> = e.constants.clone();
    let vectors: Vec<FreeVector> = all_vectors(r, e.size)?
        .into_iter()
        .filter(|v| is_i_central(r, v, &i_set))
        .collect();
    let index: HashMap<FreeVector, usize> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let k = vectors.len();
    let constants: Vec<usize> = i_set
        .iter()
        .map(|&c| index[&FreeVector::unit(r, e.size, c)])
        .collect();

    let entries = (k as u64).checked_pow(n as u32 + 1).unwrap_or(u64::MAX);
    if entries > POWER_CAP {
        return Err(PowerError::CapExceeded(entries));
    }
    let mut q_table = vec![0usize; entries as usize];
    let mut closed = Ok(());
    for_all_tuples(k, n + 1, |idx| {
        let result = q_i(
            r,
            &vectors[idx[0]],
            &idx[1..]
                .iter()
                .map(|&j| vectors[j].clone())
                .collect::<Vec<_>>(),
            &i_set,
        );
        let Some(&out) = index.get(&result) else {
            closed = Err(PowerError::BooleanFailure(
                "selector leaves the central vectors".into(),
            ));
            return false;
        };
        let mut key = idx[0];
        for &j in &idx[1..] {
            key = key * k + j;
        }
        q_table[key] = out;
        true
    });
    closed?;

    let mut extra_ops = BTreeMap::new();
    for (name, op) in &e.extra_ops {
        let len = (k as u64).checked_pow(op.arity as u32).unwrap_or(u64::MAX);
        if len > POWER_CAP {
            return Err(PowerError::CapExceeded(len));
        }
        let mut table = vec![0usize; len as usize];
        let mut closed = Ok(());
        for_all_tuples(k, op.arity, |idx| {
            let args: Vec<&FreeVector> = idx.iter().map(|&j| &vectors[j]).collect();
            let result = lift_operation(r, e.size, op, &args);
            let Some(&out) = index.get(&result) else {
                closed = Err(PowerError::BooleanFailure(format!(
                    "lifted operation {name} leaves the central vectors"
                )));
                return false;
            };
            let mut key = 0;
            for &j in idx {
                key = key * k + j;
            }
            table[key] = out;
            true
        });
        closed?;
        extra_ops.insert(
            name.clone(),
            Operation {
                arity: op.arity,
                table,
            },
        );
    }

    let algebra = FinAlgebra::from_tables(
        format!("{}[{}]", e.name, r.name),
        e.n,
        k,
        constants,
        q_table,
        extra_ops,
    );
    Ok(SemiringPower { algebra, vectors })
}

// ---------------------------------------------------------------------
// Boolean powers
// ---------------------------------------------------------------------

/// The pointwise power `E^k`: tuples of base elements (first coordinate
/// slowest) with coordinatewise selector and extra operations.
pub fn pointwise_power(e: &FinAlgebra, k: usize) -> Result<FinAlgebra, PowerError> {
    if k == 0 {
        return Err(PowerError::BadBasis("empty exponent set".into()));
    }
    let n = e.n.get() as usize;
    let size = (e.size as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
    let entries = size.checked_pow(n as u32 + 1).unwrap_or(u64::MAX);
    if entries > POWER_CAP {
        return Err(PowerError::CapExceeded(entries));
    }
    let size = size as usize;
    let decode = |x: usize| -> Vec<usize> {
        let mut t = vec![0usize; k];
        let mut x = x;
        for d in (0..k).rev() {
            t[d] = x % e.size;
            x /= e.size;
        }
        t
    };
    let encode = |t: &[usize]| -> usize { t.iter().fold(0, |acc, &v| acc * e.size + v) };

    let mut q_table = vec![0usize; entries as usize];
    for_all_tuples(size, n + 1, |idx| {
        let tuples: Vec<Vec<usize>> = idx.iter().map(|&x| decode(x)).collect();
        let out: Vec<usize> = (0..k)
            .map(|d| {
                let args: Vec<usize> = (1..=n).map(|j| tuples[j][d]).collect();
                e.q_of(tuples[0][d], &args)
            })
            .collect();
        let mut key = idx[0];
        for &j in &idx[1..] {
            key = key * size + j;
        }
        q_table[key] = encode(&out);
        true
    });
    let constants: Vec<usize> = e
        .constants
        .iter()
        .map(|&c| encode(&vec![c; k]))
        .collect();

    let mut extra_ops = BTreeMap::new();
    for (name, op) in &e.extra_ops {
        let len = (size as u64)
            .checked_pow(op.arity as u32)
            .unwrap_or(u64::MAX);
        if len > POWER_CAP {
            return Err(PowerError::CapExceeded(len));
        }
        let mut table = vec![0usize; len as usize];
        for_all_tuples(size, op.arity, |idx| {
            let tuples: Vec<Vec<usize>> = idx.iter().map(|&x| decode(x)).collect();
            let out: Vec<usize> = (0..k)
                .map(|d| {
                    let args: Vec<usize> = tuples.iter().map(|t| t[d]).collect();
                    op.apply(&args, e.size)
                })
                .collect();
            let mut key = 0;
            for &j in idx {
                key = key * size + j;
            }
            table[key] = encode(&out);
            true
        });
        extra_ops.insert(
            name.clone(),
            Operation {
                arity: op.arity,
                table,
            },
        );
    }
    Ok(FinAlgebra::from_tables(
        format!("{}^{k}", e.name),
        e.n,
        size,
        constants,
        q_table,
        extra_ops,
    ))
}

/// The Boolean power of `E` by a Boolean-algebra semiring, together
/// with the verified isomorphism from the semiring power.
#[derive(Debug, Clone)]
pub struct BooleanPower {
    /// functions from atoms to `E`, with pointwise operations
    pub power: FinAlgebra,
    /// the central vectors of `E[B]`, aligned with `map`
    pub vectors: Vec<FreeVector>,
    /// vector index -> power element: v maps to the function sending
    /// each atom to the unique constant whose coordinate lies above it
    pub map: Vec<usize>,
    /// atoms of `B` as semiring element ids
    pub atoms: Vec<usize>,
    pub iso_ok: bool,
    pub size_ok: bool,
}

/// Build the Boolean power of `e` by `b` (which must be a Boolean
/// algebra: every element complemented and commuting) and verify that
/// `v -> f_v` is an isomorphism from the semiring power `E[B]` onto the
/// pointwise power over the atoms.
pub fn boolean_power(e: &FinAlgebra, b: &FinSemiring) -> Result<BooleanPower, PowerError> {
    let core = complemented_core(b)?;
    if core.len() != b.size {
        return Err(PowerError::BooleanFailure(format!(
            "{} of {} elements are complemented and commuting; not a Boolean algebra",
            core.len(),
            b.size
        )));
    }
    let atoms = core.atoms();
    if atoms.is_empty() {
        return Err(PowerError::BooleanFailure("no atoms".into()));
    }
    let sp = semiring_power(e, b)?;
    let power = pointwise_power(e, atoms.len())?;

    let n = e.n.get() as usize;
    let mut map = Vec::with_capacity(sp.vectors.len());
    for v in &sp.vectors {
        let mut elem = 0usize;
        for &atom in &atoms {
            let hits: Vec<usize> = (0..n)
                .filter(|&i| core.leq(atom, v.coords[e.constants[i]]))
                .collect();
            let [i] = hits.as_slice() else {
                return Err(PowerError::BooleanFailure(format!(
                    "atom {atom} selects {} coordinates of {v}",
                    hits.len()
                )));
            };
            elem = elem * e.size + e.constants[*i];
        }
        map.push(elem);
    }

    let k = sp.vectors.len();
    let mut iso_ok = k == power.size;
    let mut seen = vec![false; power.size];
    for &m in &map {
        if seen[m] {
            iso_ok = false;
        }
        seen[m] = true;
    }
    for i in 0..n {
        if map[sp.algebra.constants[i]] != power.constants[i] {
            iso_ok = false;
        }
    }
    if iso_ok {
        for_all_tuples(k, n + 1, |idx| {
            let lhs = map[sp.algebra.q_of(idx[0], &idx[1..])];
            let args: Vec<usize> = idx[1..].iter().map(|&j| map[j]).collect();
            iso_ok = lhs == power.q_of(map[idx[0]], &args);
            iso_ok
        });
    }
    for (name, op) in &sp.algebra.extra_ops {
        if !iso_ok {
            break;
        }
        let pop = &power.extra_ops[name];
        for_all_tuples(k, op.arity, |idx| {
            let lhs = map[op.apply(idx, k)];
            let args: Vec<usize> = idx.iter().map(|&j| map[j]).collect();
            iso_ok = lhs == pop.apply(&args, power.size);
            iso_ok
        });
    }
    let size_ok = k == (e.size).pow(atoms.len() as u32);
    Ok(BooleanPower {
        power,
        vectors: sp.vectors,
        map,
        atoms,
        iso_ok,
        size_ok,
    })
}

// ---------------------------------------------------------------------
// the Foster-style representation of subpowers
// ---------------------------------------------------------------------

/// Outcome of representing a member of the variety of `P` as a power of
/// `P` over the atoms of its coordinate Boolean algebra.
#[derive(Debug, Clone)]
pub struct FosterReport {
    pub algebra_size: usize,
    pub boolean_size: usize,
    pub atom_count: usize,
    /// |A| = n^{#atoms}
    pub size_matches: bool,
    pub injective: bool,
    pub surjective: bool,
    pub constants_ok: bool,
    /// the atom-selection map commutes with q and every extra operation
    pub operations_preserved: bool,
    /// coordinate k of g(a..) equals the join of the coordinate meets
    /// over index tuples sent to e_k by g on constants
    pub coordinate_formula_ok: bool,
}

impl FosterReport {
    pub fn ok(&self) -> bool {
        self.size_matches
            && self.injective
            && self.surjective
            && self.constants_ok
            && self.operations_preserved
            && self.coordinate_formula_ok
    }
}

/// Verify that `a` is isomorphic to the power of `p` over the atoms of
/// its coordinate Boolean algebra. `p` must be an nBA whose universe is
/// exactly its n constants (checked, including centrality of every
/// element); `a` is any algebra of the same signature, typically a
/// subalgebra of a power of `p`.
pub fn foster_check(p: &FinAlgebra, a: &FinAlgebra) -> Result<FosterReport, PowerError> {
    let n = p.n.get() as usize;
    if p.size != n {
        return Err(PowerError::NotNba(format!(
            "size {} differs from dimension {n}",
            p.size
        )));
    }
    // A size-n algebra whose universe is its (distinct) constants and
    // whose selector obeys q(e_i, b1..bn) = b_i is exactly the
    // n-element generator with extra operations added, and every such
    // expansion is an nBA with all elements central; these two finite
    // checks are therefore complete here.
    let distinct: std::collections::BTreeSet<usize> = p.constants.iter().copied().collect();
    if distinct.len() != n {
        return Err(PowerError::NotNba("constants are not distinct".into()));
    }
    let mut law = true;
    for_all_tuples(p.size, n, |args| {
        law = (0..n).all(|i| p.q_of(p.constants[i], args) == args[i]);
        law
    });
    if !law {
        return Err(PowerError::NotNba("q(e_i, b1..bn) = b_i fails".into()));
    }
    // position of each element of p among the constants
    let mut const_pos = vec![usize::MAX; p.size];
    for (i, &c) in p.constants.iter().enumerate() {
        const_pos[c] = i;
    }

    let b_a = coordinate_boolean_algebra(a)?;
    let atoms = b_a.atoms();
    let atom_count = atoms.len();
    let coords_all: Vec<Vec<usize>> = (0..a.size).map(|x| coordinates(a, x)).collect();
    let power = pointwise_power(p, atom_count)?;

    let mut map = Vec::with_capacity(a.size);
    for x in 0..a.size {
        let mut elem = 0usize;
        for &atom in &atoms {
            let hits: Vec<usize> = (0..n)
                .filter(|&i| b_a.leq(atom, coords_all[x][i]))
                .collect();
            let [i] = hits.as_slice() else {
                return Err(PowerError::BooleanFailure(format!(
                    "atom selects {} coordinates of element {x}",
                    hits.len()
                )));
            };
            elem = elem * p.size + p.constants[*i];
        }
        map.push(elem);
    }

    let mut seen = vec![false; power.size];
    let mut injective = true;
    for &m in &map {
        if seen[m] {
            injective = false;
        }
        seen[m] = true;
    }
    let surjective = seen.iter().all(|&s| s);
    let size_matches = a.size == p.size.pow(atom_count as u32);
    let constants_ok = (0..n).all(|i| map[a.constants[i]] == power.constants[i]);

    // signature as (arity, op over a, op over the power, op over p)
    type Sig<'x> = (
        usize,
        Box<dyn Fn(&[usize]) -> usize + 'x>,
        Box<dyn Fn(&[usize]) -> usize + 'x>,
        Box<dyn Fn(&[usize]) -> usize + 'x>,
    );
    let mut sigs: Vec<Sig> = vec![(
        n + 1,
        Box::new(|args: &[usize]| a.q_of(args[0], &args[1..])),
        Box::new(|args: &[usize]| power.q_of(args[0], &args[1..])),
        Box::new(|args: &[usize]| p.q_of(args[0], &args[1..])),
    )];
    for (name, op) in &a.extra_ops {
        let pw = &power.extra_ops[name];
        let base = &p.extra_ops[name];
        sigs.push((
            op.arity,
            Box::new(move |args: &[usize]| op.apply(args, a.size)),
            Box::new(move |args: &[usize]| pw.apply(args, power.size)),
            Box::new(move |args: &[usize]| base.apply(args, p.size)),
        ));
    }

    let mut operations_preserved = true;
    let mut coordinate_formula_ok = true;
    for (arity, op_a, op_pw, op_p) in &sigs {
        let cases = (a.size as u64)
            .checked_pow(*arity as u32)
            .unwrap_or(u64::MAX);
        if cases > POWER_CAP {
            return Err(PowerError::CapExceeded(cases));
        }
        // group constant index tuples by the position of their image
        let mut tuples_for: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
        for_all_tuples(n, *arity, |idx| {
            let args: Vec<usize> = idx.iter().map(|&i| p.constants[i]).collect();
            tuples_for[const_pos[op_p(&args)]].push(idx.to_vec());
            true
        });
        for_all_tuples(a.size, *arity, |args| {
            let result = op_a(args);
            let mapped: Vec<usize> = args.iter().map(|&x| map[x]).collect();
            if map[result] != op_pw(&mapped) {
                operations_preserved = false;
            }
            for (k, tuples) in tuples_for.iter().enumerate() {
                let expected = tuples.iter().fold(b_a.bottom, |acc, idx| {
                    let m = idx
                        .iter()
                        .zip(args)
                        .fold(b_a.top, |m, (&i, &x)| b_a.meet(m, coords_all[x][i]));
                    b_a.join(acc, m)
                });
                if coords_all[result][k] != expected {
                    coordinate_formula_ok = false;
                }
            }
            operations_preserved && coordinate_formula_ok
        });
        if !(operations_preserved && coordinate_formula_ok) {
            break;
        }
    }

    Ok(FosterReport {
        algebra_size: a.size,
        boolean_size: b_a.len(),
        atom_count,
        size_matches,
        injective,
        surjective,
        constants_ok,
        operations_preserved,
        coordinate_formula_ok,
    })
}

// ---------------------------------------------------------------------
// semiring definition files
// ---------------------------------------------------------------------

/// Parse a semiring definition: `semiring <name>`, `universe <size>`,
/// `add <a> <b> -> <c>` and `mul <a> <b> -> <c>` lines, `zero <elem>`,
/// `one <elem>`; `#` starts a comment. All axioms are verified.
pub fn parse_semiring(text: &str) -> Result<FinSemiring, PowerError> {
    let fail = |line: usize, message: &str| PowerError::File {
        line,
        message: message.to_string(),
    };
    let mut name: Option<String> = None;
    let mut size: Option<usize> = None;
    let mut zero: Option<usize> = None;
    let mut one: Option<usize> = None;
    let mut add_lines: Vec<(usize, usize, usize)> = Vec::new();
    let mut mul_lines: Vec<(usize, usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let parse_entry = |parts: &mut dyn Iterator<Item = &str>,
                           what: &str|
         -> Result<usize, PowerError> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| fail(lineno, &format!("bad {what}")))
        };
        match key {
            "semiring" => {
                name = Some(
                    parts
                        .next()
                        .ok_or_else(|| fail(lineno, "missing semiring name"))?
                        .to_string(),
                );
            }
            "universe" => size = Some(parse_entry(&mut parts, "`universe` size")?),
            "zero" => zero = Some(parse_entry(&mut parts, "`zero` element")?),
            "one" => one = Some(parse_entry(&mut parts, "`one` element")?),
            "add" | "mul" => {
                let a = parse_entry(&mut parts, "element")?;
                let b = parse_entry(&mut parts, "element")?;
                if parts.next() != Some("->") {
                    return Err(fail(lineno, "expected `->`"));
                }
                let c = parse_entry(&mut parts, "result")?;
                if key == "add" {
                    add_lines.push((a, b, c));
                } else {
                    mul_lines.push((a, b, c));
                }
            }
            _ => return Err(fail(lineno, "unrecognized line")),
        }
    }

    let name = name.ok_or_else(|| fail(0, "missing `semiring` line"))?;
    let size = size.ok_or_else(|| fail(0, "missing `universe` line"))?;
    let zero = zero.ok_or_else(|| fail(0, "missing `zero` line"))?;
    let one = one.ok_or_else(|| fail(0, "missing `one` line"))?;
    let build = |lines: &[(usize, usize, usize)],
                 what: &str|
     -> Result<Vec<usize>, PowerError> {
        let mut table = vec![usize::MAX; size * size];
        for &(a, b, c) in lines {
            for &e in &[a, b, c] {
                if e >= size {
                    return Err(PowerError::BadElement(e, size));
                }
            }
            table[a * size + b] = c;
        }
        if table.iter().any(|&v| v == usize::MAX) {
            return Err(fail(0, &format!("`{what}` table is not total")));
        }
        Ok(table)
    };
    let add = build(&add_lines, "add")?;
    let mul = build(&mul_lines, "mul")?;
    FinSemiring::new(name, size, add, mul, zero, one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{power_algebra, subalgebra, verify_nba_axioms};
    use crate::term::Dimension;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn vec2(a: usize, b: usize) -> FreeVector {
        FreeVector { coords: vec![a, b] }
    }

    #[test]
    fn builtin_semirings_satisfy_axioms() {
        for name in ["bool2", "bool4", "z4", "chain3"] {
            let r = builtin_semiring(name).unwrap();
            assert_eq!(r.name, name);
        }
        assert!(matches!(
            builtin_semiring("nosuch"),
            Err(PowerError::UnknownSemiring(_))
        ));
    }

    #[test]
    fn distributivity_violation_rejected_with_witness() {
        // max-addition on the chain 0 < 1 < 2 with a multiplication
        // that is associative and unital but fails x(y+z) = xy + xz
        let add: Vec<usize> = (0..3).flat_map(|a| (0..3).map(move |b| a.max(b))).collect();
        let mul = vec![0, 0, 0, 0, 1, 2, 0, 2, 1];
        let err = FinSemiring::new("bad", 3, add, mul, 0, 1).unwrap_err();
        match err {
            PowerError::SemiringAxiom { name, witness } => {
                assert_eq!(name, "SR2");
                assert!(!witness.is_empty());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn selector_on_vectors() {
        let z4 = builtin_semiring("z4").unwrap();
        let i_set = [0usize, 1];
        // unit head selects the matching argument
        let e1 = FreeVector::unit(&z4, 2, 0);
        let w = vec2(2, 3);
        let t = vec2(1, 1);
        assert_eq!(q_i(&z4, &e1, &[w.clone(), t.clone()], &i_set), w);
        // coordinates summing to one collapse equal arguments: 3 + 2 = 1
        let v = vec2(3, 2);
        assert_eq!(q_i(&z4, &v, &[w.clone(), w.clone()], &i_set), w);
        // over the Boolean semiring the selector is a coordinatewise mux
        let b = builtin_semiring("bool2").unwrap();
        for a in 0..2usize {
            let head = vec2(a, 1 - a);
            for wt in 0..16usize {
                let w = vec2(wt & 1, (wt >> 1) & 1);
                let t = vec2((wt >> 2) & 1, (wt >> 3) & 1);
                let got = q_i(&b, &head, &[w.clone(), t.clone()], &i_set);
                let want = vec2(
                    a.min(w.coords[0]).max((1 - a).min(t.coords[0])),
                    a.min(w.coords[1]).max((1 - a).min(t.coords[1])),
                );
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn coordinate_centrality_conditions() {
        let z4 = builtin_semiring("z4").unwrap();
        let i_set = [0usize, 1];
        assert!(is_i_central(&z4, &FreeVector::unit(&z4, 2, 0), &i_set));
        assert!(is_i_central(&z4, &FreeVector::unit(&z4, 2, 1), &i_set));
        // 2 is not idempotent in Z_4: 2 * 2 = 0
        assert!(!is_i_central(&z4, &vec2(2, 3), &i_set));

        let b4 = builtin_semiring("bool4").unwrap();
        // a complement pair (masks 1 and 2) is central
        assert!(is_i_central(&b4, &vec2(1, 2), &i_set));
        assert!(!is_i_central(&b4, &vec2(1, 3), &i_set));

        let c3 = builtin_semiring("chain3").unwrap();
        assert!(is_i_central(&c3, &vec2(2, 0), &i_set));
        assert!(!is_i_central(&c3, &vec2(1, 2), &i_set));
    }

    #[test]
    fn centrality_cross_validation() {
        let i_set = [0usize, 1];
        for name in ["bool2", "z4"] {
            let r = builtin_semiring(name).unwrap();
            let sample = all_vectors(&r, 2).unwrap();
            let report = cross_validate_centrality(&r, 2, &i_set, &sample).unwrap();
            assert_eq!(report.checked, sample.len());
            assert!(report.ok(), "disagreement over {name}");
        }
        let r = builtin_semiring("bool2").unwrap();
        let report = cross_validate_centrality(&r, 2, &i_set, &[]).unwrap();
        assert_eq!(report.checked, 0);
        assert!(report.ok());
    }

    #[test]
    fn complemented_cores() {
        let b2 = builtin_semiring("bool2").unwrap();
        assert_eq!(complemented_core(&b2).unwrap().universe, vec![0, 1]);

        let z4 = builtin_semiring("z4").unwrap();
        let core = complemented_core(&z4).unwrap();
        assert_eq!(core.universe, vec![0, 1]);

        let c3 = builtin_semiring("chain3").unwrap();
        let core = complemented_core(&c3).unwrap();
        assert_eq!(core.universe, vec![0, 2]);

        let b4 = builtin_semiring("bool4").unwrap();
        let core = complemented_core(&b4).unwrap();
        assert_eq!(core.universe, vec![0, 1, 2, 3]);
        assert_eq!(core.atoms(), vec![1, 2]);
        assert_eq!(core.complement(1), 2);
    }

    #[test]
    fn semiring_powers() {
        let e2 = power_algebra(dim(2), 1).unwrap();
        let e3 = power_algebra(dim(3), 1).unwrap();

        // a Boolean-algebra semiring with one atom reproduces E
        let b2 = builtin_semiring("bool2").unwrap();
        assert_eq!(semiring_power(&e2, &b2).unwrap().algebra.size, 2);
        assert_eq!(semiring_power(&e3, &b2).unwrap().algebra.size, 3);

        // two atoms square it
        let b4 = builtin_semiring("bool4").unwrap();
        let sp = semiring_power(&e2, &b4).unwrap();
        assert_eq!(sp.algebra.size, 4);
        assert_eq!(verify_nba_axioms(&sp.algebra).unwrap(), None);
        assert_eq!(semiring_power(&e3, &b4).unwrap().algebra.size, 9);

        // C(Z_4) and C(chain3) are trivial, so the powers collapse to E
        let z4 = builtin_semiring("z4").unwrap();
        assert_eq!(semiring_power(&e2, &z4).unwrap().algebra.size, 2);
        let c3 = builtin_semiring("chain3").unwrap();
        assert_eq!(semiring_power(&e2, &c3).unwrap().algebra.size, 2);
    }

    #[test]
    fn lifted_operations_stay_central() {
        let mut e2 = power_algebra(dim(2), 1).unwrap();
        e2.extra_ops.insert(
            "swap".into(),
            Operation {
                arity: 1,
                table: vec![1, 0],
            },
        );
        let b4 = builtin_semiring("bool4").unwrap();
        let sp = semiring_power(&e2, &b4).unwrap();
        let op = &sp.algebra.extra_ops["swap"];
        // swapping exchanges the coordinate pair of every vector
        for (i, v) in sp.vectors.iter().enumerate() {
            let image = &sp.vectors[op.apply(&[i], sp.algebra.size)];
            assert_eq!(image.coords, vec![v.coords[1], v.coords[0]]);
        }
    }

    #[test]
    fn central_vector_sets_coincide_with_the_core() {
        for name in ["bool2", "bool4", "z4", "chain3"] {
            let r = builtin_semiring(name).unwrap();
            assert!(semiboolean_check(&r, 2).unwrap(), "failed for {name}");
            assert!(semiboolean_check(&r, 3).unwrap(), "failed for {name}");
        }
    }

    #[test]
    fn boolean_powers() {
        let e3 = power_algebra(dim(3), 1).unwrap();
        let b2 = builtin_semiring("bool2").unwrap();
        let bp = boolean_power(&e3, &b2).unwrap();
        assert_eq!(bp.atoms.len(), 1);
        assert_eq!(bp.power.size, 3);
        assert!(bp.iso_ok && bp.size_ok);

        let b4 = builtin_semiring("bool4").unwrap();
        let bp = boolean_power(&e3, &b4).unwrap();
        assert_eq!(bp.atoms.len(), 2);
        assert_eq!(bp.power.size, 9);
        assert!(bp.iso_ok && bp.size_ok);

        // a non-Boolean semiring is rejected
        let z4 = builtin_semiring("z4").unwrap();
        assert!(matches!(
            boolean_power(&e3, &z4),
            Err(PowerError::BooleanFailure(_))
        ));
    }

    #[test]
    fn foster_representation() {
        for n in [2u32, 3] {
            let p = power_algebra(dim(n), 1).unwrap();
            let pow = power_algebra(dim(n), 2).unwrap();

            // the minimal subalgebra is the diagonal, one atom
            let minimal = subalgebra(&pow, &[]).unwrap();
            let report = foster_check(&p, &minimal).unwrap();
            assert_eq!(report.atom_count, 1);
            assert_eq!(report.algebra_size, n as usize);
            assert!(report.ok());

            // the full square has two atoms
            let report = foster_check(&p, &pow).unwrap();
            assert_eq!(report.atom_count, 2);
            assert_eq!(report.algebra_size, (n * n) as usize);
            assert!(report.ok());
        }
    }

    #[test]
    fn foster_representation_with_extra_operation() {
        let mut p = power_algebra(dim(3), 1).unwrap();
        p.extra_ops.insert(
            "succ".into(),
            Operation {
                arity: 1,
                table: vec![1, 2, 0],
            },
        );
        let mut pow = power_algebra(dim(3), 2).unwrap();
        let tuples = pow.tuples.clone().unwrap();
        let table: Vec<usize> = (0..pow.size)
            .map(|x| {
                let image: Vec<u32> = tuples[x].iter().map(|&v| v % 3 + 1).collect();
                tuples.iter().position(|t| *t == image).unwrap()
            })
            .collect();
        pow.extra_ops
            .insert("succ".into(), Operation { arity: 1, table });
        let report = foster_check(&p, &pow).unwrap();
        assert!(report.ok());
    }

    #[test]
    fn semiring_files_round_trip() {
        let z4 = builtin_semiring("z4").unwrap();
        let mut text = String::from("semiring z4\nuniverse 4\nzero 0\none 1\n");
        for a in 0..4 {
            for b in 0..4 {
                text.push_str(&format!("add {a} {b} -> {}\n", z4.add(a, b)));
                text.push_str(&format!("mul {a} {b} -> {}\n", z4.mul(a, b)));
            }
        }
        let parsed = parse_semiring(&text).unwrap();
        assert_eq!(parsed, z4);

        assert!(matches!(
            parse_semiring("semiring x\nuniverse 2\nzero 0\none 1\nadd 0 0 -> 0\n"),
            Err(PowerError::File { .. })
        ));
        assert!(matches!(
            parse_semiring("universe 2\nzero 0\none 1\n"),
            Err(PowerError::File { .. })
        ));
    }
}
