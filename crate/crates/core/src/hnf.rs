//! The head-normal-form rewriting system (rules h0, h1) and the fast
//! structural normalizer.
//!
//! h0 collapses selections with a constant head, h1 pushes selections
//! with a nested `q` head inward. Normal forms are exactly the hnfs:
//! every `q` node has a variable head.

use crate::term::Term;

/// One leftmost-innermost rewrite by h0 or h1; `None` iff the term is
/// already a head normal form.
pub fn step_hnf(t: &Term) -> Option<Term> {
    match t {
        Term::Var(_) | Term::Const(_) => None,
        Term::App(..) => None,
        Term::Q(head, args) => {
            if let Some(h) = step_hnf(head) {
                return Some(Term::q(h, args.clone()));
            }
            for (k, a) in args.iter().enumerate() {
                if let Some(a2) = step_hnf(a) {
                    let mut args = args.clone();
                    args[k] = a2;
                    return Some(Term::Q(head.clone(), args));
                }
            }
            root_step_hnf(head, args)
        }
    }
}

/// The root rewrite of `q(head, args)` by h0 or h1, if one applies.
pub fn root_step_hnf(head: &Term, args: &[Term]) -> Option<Term> {
    match head {
        // (h0) q(e_i, x_1, ..., x_n) -> x_i
        Term::Const(i) => Some(args[(*i - 1) as usize].clone()),
        // (h1) q(q(x, y_1, ..., y_n), z_1, ..., z_n)
        //      -> q(x, q(y_1, z_1, ..., z_n), ..., q(y_n, z_1, ..., z_n))
        Term::Q(x, ys) => Some(Term::Q(
            x.clone(),
            ys.iter().map(|y| Term::q(y.clone(), args.to_vec())).collect(),
        )),
        _ => None,
    }
}

/// The unique hnf of `t`, computed by the structural recursion of the
/// free-algebra operation `q^H` rather than by generic rewriting.
pub fn hnf_normalize(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(..) => panic!("hnf_normalize requires an App-free term"),
        Term::Q(head, args) => {
            let head = hnf_normalize(head);
            let args: Vec<Term> = args.iter().map(hnf_normalize).collect();
            q_hnf(&head, &args)
        }
    }
}

/// `q^H(head, args)` for hnf inputs: selects for a constant head,
/// rebuilds for a variable head, and distributes over a `q` head.
pub fn q_hnf(head: &Term, args: &[Term]) -> Term {
    match head {
        Term::Const(i) => args[(*i - 1) as usize].clone(),
        Term::Var(_) => Term::q(head.clone(), args.to_vec()),
        Term::Q(x, us) => Term::Q(
            x.clone(),
            us.iter().map(|u| q_hnf(u, args)).collect(),
        ),
        Term::App(..) => panic!("q_hnf requires App-free hnf inputs"),
    }
}
