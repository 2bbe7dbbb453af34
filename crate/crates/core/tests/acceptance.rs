//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. All randomness is seeded, so the suite is
//! deterministic across runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ncl_core::algebra::{
    check_symmetry, is_central, is_total_congruence, power_algebra, principal_congruence,
    representation_iso, subalgebra, verify_nba_axioms,
};
use ncl_core::canon::{
    all_steps, certify_decreasing, export_dot, full_normalize, full_normalize_traced,
    is_reduced_ordered, NormalForm,
};
use ncl_core::hnf::{hnf_normalize, root_step_hnf};
use ncl_core::logics::{builtin, decide, matrix_valid, translate, Family, LogicSpec};
use ncl_core::power::{
    all_vectors, builtin_semiring, cross_validate_centrality, foster_check, semiboolean_check,
    semiring_power,
};
use ncl_core::semantics::equiv;
use ncl_core::term::{parse, Dimension, Permutation, Term};

fn report(num: u32, label: &str, ok: bool) {
    println!("criterion {num} ({label}): {}", if ok { "pass" } else { "fail" });
    assert!(ok, "criterion {num} ({label}) failed");
}

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn pure(text: &str, n: u32) -> Term {
    parse(text, dim(n), None).unwrap()
}

fn canon_of(t: &Term) -> NormalForm {
    full_normalize(&hnf_normalize(t)).unwrap()
}

/// A random formula in a logic's connective language over x1..xv.
fn random_formula(
    rng: &mut ChaCha8Rng,
    connectives: &[(String, usize)],
    vars: u32,
    depth: usize,
) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return Term::var(rng.gen_range(1..=vars));
    }
    let (name, arity) = connectives[rng.gen_range(0..connectives.len())].clone();
    let args = (0..arity)
        .map(|_| random_formula(rng, connectives, vars, depth - 1))
        .collect();
    Term::app(name, args)
}

/// A random head normal form: variable heads, variable or constant
/// leaves.
fn random_hnf(rng: &mut ChaCha8Rng, n: u32, vars: u32, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            Term::var(rng.gen_range(1..=vars))
        } else {
            Term::constant(rng.gen_range(1..=n))
        };
    }
    let head = Term::var(rng.gen_range(1..=vars));
    let args = (0..n).map(|_| random_hnf(rng, n, vars, depth - 1)).collect();
    Term::q(head, args)
}

/// A random pure term, with arbitrary subterms in head position.
fn random_term(rng: &mut ChaCha8Rng, n: u32, vars: u32, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.35) {
        return if rng.gen_bool(0.5) {
            Term::var(rng.gen_range(1..=vars))
        } else {
            Term::constant(rng.gen_range(1..=n))
        };
    }
    let head = random_term(rng, n, vars, depth - 1);
    let args = (0..n)
        .map(|_| random_term(rng, n, vars, depth - 1))
        .collect();
    Term::q(head, args)
}

fn node_count(t: &Term) -> usize {
    match t {
        Term::Q(head, args) => 1 + node_count(head) + args.iter().map(node_count).sum::<usize>(),
        Term::App(_, args) => 1 + args.iter().map(node_count).sum::<usize>(),
        _ => 1,
    }
}

fn builtin_suite() -> Vec<LogicSpec> {
    vec![
        builtin(Family::Classical, dim(2)).unwrap(),
        builtin(Family::Lukasiewicz, dim(3)).unwrap(),
        builtin(Family::Lukasiewicz, dim(4)).unwrap(),
        builtin(Family::Godel, dim(3)).unwrap(),
        builtin(Family::Godel, dim(4)).unwrap(),
        builtin(Family::Post, dim(3)).unwrap(),
    ]
}

#[test]
fn criterion_01_oracle_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE01);
    let mut ok = true;
    for logic in builtin_suite() {
        let connectives: Vec<(String, usize)> = logic
            .connectives
            .iter()
            .map(|(name, c)| (name.clone(), c.arity))
            .collect();
        for _ in 0..500 {
            let phi = random_formula(&mut rng, &connectives, 4, 5);
            let fast = decide(&logic, &[], &phi).unwrap();
            let slow = matrix_valid(&phi, &logic).unwrap();
            if fast != slow {
                ok = false;
            }
        }
    }
    report(1, "oracle agreement", ok);
}

#[test]
fn criterion_02_paper_translation_tables() {
    let cl = builtin(Family::Classical, dim(2)).unwrap();
    let l3 = builtin(Family::Lukasiewicz, dim(3)).unwrap();
    let g3 = builtin(Family::Godel, dim(3)).unwrap();
    let p3 = builtin(Family::Post, dim(3)).unwrap();
    let cases: Vec<(&LogicSpec, &str, &str, u32)> = vec![
        (&cl, "or", "q(x1, x2, e2)", 2),
        (&cl, "and", "q(x1, e1, x2)", 2),
        (&cl, "not", "q(x1, e2, e1)", 2),
        (&g3, "or", "q(x1, x2, q(x2, e2, e2, e3), e3)", 3),
        (&g3, "and", "q(x1, e1, q(x2, e1, e2, e2), x2)", 3),
        (&l3, "or", "q(x1, x2, q(x2, e2, e2, e3), e3)", 3),
        (&l3, "and", "q(x1, e1, q(x2, e1, e2, e2), x2)", 3),
        (&p3, "or", "q(x1, x2, q(x2, e2, e2, e3), e3)", 3),
        (&p3, "and", "q(x1, e1, q(x2, e1, e2, e2), x2)", 3),
        (&g3, "not", "q(x1, e3, e1, e1)", 3),
        (&l3, "not", "q(x1, e3, e2, e1)", 3),
        (&p3, "not", "q(x1, e3, e1, e2)", 3),
        (&g3, "imp", "q(x1, e3, q(x2, e1, e3, e3), x2)", 3),
        (&l3, "imp", "q(x1, e3, q(x2, e2, e3, e3), x2)", 3),
    ];
    let mut ok = true;
    for (logic, conn, listed, n) in cases {
        let arity = logic.connectives[conn].arity;
        let formula = Term::app(conn, (1..=arity as u32).map(Term::var).collect());
        let synthesized = translate(&formula, logic).unwrap();
        if canon_of(&synthesized).term() != canon_of(&pure(listed, n)).term() {
            ok = false;
        }
    }
    report(2, "listed translation forms", ok);
}

#[test]
fn criterion_03_canonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE03);
    let mut ok = true;
    for k in 0..200 {
        let n = if k % 2 == 0 { 2 } else { 3 };
        let t = random_hnf(&mut rng, n, 4, 4);
        let u = random_hnf(&mut rng, n, 4, 4);
        let semantic = equiv(&t, &u, dim(n)).unwrap();
        let syntactic =
            full_normalize(&t).unwrap().term() == full_normalize(&u).unwrap().term();
        if semantic != syntactic {
            ok = false;
        }
    }
    report(3, "canonicity", ok);
}

/// All one-step head-normalization reducts of a term, at every position.
fn hnf_reducts(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    if let Term::Q(head, args) = t {
        if let Some(r) = root_step_hnf(head, args) {
            out.push(r);
        }
        for r in hnf_reducts(head) {
            out.push(Term::q(r, args.clone()));
        }
        for (i, a) in args.iter().enumerate() {
            for r in hnf_reducts(a) {
                let mut new_args = args.clone();
                new_args[i] = r;
                out.push(Term::q((**head).clone(), new_args));
            }
        }
    }
    out
}

#[test]
fn criterion_04_confluence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE04);
    let mut ok = true;
    for k in 0..200 {
        let n = if k % 2 == 0 { 2 } else { 3 };
        let t = random_term(&mut rng, n, 4, 3);
        // head-normalization phase: all one-step reducts rejoin
        let target = hnf_normalize(&t);
        for r in hnf_reducts(&t) {
            if hnf_normalize(&r) != target {
                ok = false;
            }
        }
        // full phase on the head normal form
        let nf = full_normalize(&target).unwrap();
        for (_, _, reduct) in all_steps(&target).unwrap() {
            if full_normalize(&reduct).unwrap().term() != nf.term() {
                ok = false;
            }
        }
    }
    report(4, "confluence evidence", ok);
}

#[test]
fn criterion_05_termination_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE05);
    let mut ok = true;
    for k in 0..150 {
        let n = if k % 2 == 0 { 2 } else { 3 };
        // bound the starting hnf so traces stay in the thousands of
        // steps rather than the (legitimately possible) millions
        let t = std::iter::repeat_with(|| hnf_normalize(&random_term(&mut rng, n, 4, 3)))
            .find(|h| node_count(h) <= 40)
            .unwrap();
        let (_, trace) = full_normalize_traced(&t).unwrap();
        if !certify_decreasing(&trace) {
            ok = false;
        }
    }
    report(5, "termination certificates", ok);
}

#[test]
fn criterion_06_normal_form_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE06);
    let mut ok = true;
    for k in 0..300 {
        let n = 2 + (k % 3);
        let t = hnf_normalize(&random_term(&mut rng, n, 4, 3));
        let nf = full_normalize(&t).unwrap();
        if !is_reduced_ordered(nf.term()) {
            ok = false;
        }
    }
    report(6, "normal-form shape", ok);
}

#[test]
fn criterion_07_nba_axioms_and_congruences() {
    let mut ok = true;
    for n in [2u32, 3, 4] {
        for i_size in [1usize, 2] {
            let a = power_algebra(dim(n), i_size).unwrap();
            if verify_nba_axioms(&a).unwrap().is_some() {
                ok = false;
            }
            if (0..a.size).any(|c| !is_central(&a, c).unwrap()) {
                ok = false;
            }
        }
        // the n-element nBA is simple: any pair of distinct constants
        // generates the total congruence
        let a = power_algebra(dim(n), 1).unwrap();
        for i in 0..n as usize {
            for j in 0..n as usize {
                if i == j {
                    continue;
                }
                let classes =
                    principal_congruence(&a, a.constants[i], a.constants[j]).unwrap();
                if !is_total_congruence(&classes) {
                    ok = false;
                }
            }
        }
    }
    report(7, "algebra axioms, centrality, simplicity", ok);
}

#[test]
fn criterion_08_representation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE08);
    let mut ok = true;
    for _ in 0..20 {
        let n = rng.gen_range(2..=3u32);
        let i_size = rng.gen_range(1..=3usize);
        let pow = power_algebra(dim(n), i_size).unwrap();
        let generators: Vec<usize> = (0..rng.gen_range(1..=2))
            .map(|_| rng.gen_range(0..pow.size))
            .collect();
        let a = subalgebra(&pow, &generators).unwrap();
        if !representation_iso(&a).unwrap().ok() {
            ok = false;
        }
    }
    report(8, "representation by central vectors", ok);
}

#[test]
fn criterion_09_powers() {
    let mut ok = true;
    let i_set = [0usize, 1];
    for name in ["bool2", "bool4", "z4", "chain3"] {
        let r = builtin_semiring(name).unwrap();
        let sample = all_vectors(&r, 2).unwrap();
        if !cross_validate_centrality(&r, 2, &i_set, &sample).unwrap().ok() {
            ok = false;
        }
        if !semiboolean_check(&r, 2).unwrap() {
            ok = false;
        }
    }
    // |E[B]| = |E|^{#atoms}: one atom for bool2, two for bool4
    for n in [2u32, 3] {
        let e = power_algebra(dim(n), 1).unwrap();
        let b2 = builtin_semiring("bool2").unwrap();
        let b4 = builtin_semiring("bool4").unwrap();
        if semiring_power(&e, &b2).unwrap().algebra.size != e.size {
            ok = false;
        }
        if semiring_power(&e, &b4).unwrap().algebra.size != e.size * e.size {
            ok = false;
        }
    }
    for n in [2u32, 3] {
        let p = power_algebra(dim(n), 1).unwrap();
        let pow = power_algebra(dim(n), 2).unwrap();
        let minimal = subalgebra(&pow, &[]).unwrap();
        if !foster_check(&p, &minimal).unwrap().ok() {
            ok = false;
        }
        if !foster_check(&p, &pow).unwrap().ok() {
            ok = false;
        }
    }
    report(9, "semiring and Boolean powers", ok);
}

#[test]
fn criterion_10_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE10);
    let n = dim(3);
    let mut ok = true;
    for _ in 0..50 {
        let premises: Vec<Term> = (0..rng.gen_range(0..=2))
            .map(|_| random_term(&mut rng, 3, 3, 2))
            .collect();
        let phi = random_term(&mut rng, 3, 3, 3);
        for sigma in Permutation::all(n) {
            for i in 1..=3u32 {
                let (agree, _) = check_symmetry(&premises, &phi, &sigma, i, n).unwrap();
                if !agree {
                    ok = false;
                }
            }
        }
    }
    report(10, "permutation symmetry", ok);
}

#[test]
fn criterion_11_round_trip_and_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE11);
    let mut ok = true;
    for k in 0..200 {
        let n = 2 + (k % 3);
        let t = random_term(&mut rng, n, 4, 3);
        if parse(&t.to_string(), dim(n), None).unwrap() != t {
            ok = false;
        }
        let h = hnf_normalize(&t);
        let first = full_normalize(&h).unwrap();
        let second = full_normalize(&h).unwrap();
        if first.term().to_string() != second.term().to_string() {
            ok = false;
        }
        if export_dot(&first) != export_dot(&second) {
            ok = false;
        }
    }
    report(11, "round-trip and determinism", ok);
}
