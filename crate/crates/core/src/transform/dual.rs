//! Synthesis of the dual program and of the `nmr_check` clauses.
//!
//! For a predicate `p/n` with clauses `C_1..C_m` the dual is
//!
//! ```text
//! not p(V1..Vn) :- not p_1(V1..Vn), ..., not p_m(V1..Vn).
//! not p_i(V..)  :- forall(Y1, ... forall(Yj, not p_i_body(V.., Y..))).
//! not p_i_body(V.., Y..) :- g_1, ..., g_{j-1}, neg(g_j).     % j = 1..k
//! ```
//!
//! after normalizing the head of each clause to distinct fresh variables
//! with explicit `=` goals. The positive prefix `g_1..g_{j-1}` keeps the
//! generated clauses disjoint, so each failing instance is produced exactly
//! once. A predicate with no clauses gets the single fact `not p(V1..Vn).`
//!
//! Each denial `:- B` compiles the same way into `chk_i` plus a body helper,
//! and `nmr_check/0` conjoins every `chk_i`.

use std::collections::HashSet;

use crate::constraints::negate_constraint;
use crate::syntax::{Atom, Clause, Goal, Head, Lit, Sym, Term, Var};

/// Picks a name not yet in `taken`, extending the base with underscores.
pub(super) fn fresh_name(base: String, taken: &mut HashSet<Sym>) -> Sym {
    let mut name = base;
    while taken.contains(&Sym::new(&name)) {
        name.push('_');
    }
    let sym = Sym::new(&name);
    taken.insert(sym.clone());
    sym
}

/// A clause with its head flattened: the head is `p(V1..Vn)` over distinct
/// variable slots, with `Vi = t` goals prepended for every non-trivial
/// argument. `head_vars` lists the slots, `body` the extended body.
struct Normalized {
    head_vars: Vec<Var>,
    body: Vec<Goal>,
    nvars: u32,
    var_names: Vec<String>,
}

fn fresh_var_name(base: String, names: &[String]) -> String {
    let mut name = base;
    while names.iter().any(|n| n == &name) {
        name.push('_');
    }
    name
}

fn normalize(clause: &Clause) -> Normalized {
    let head = clause.head.as_ref().expect("normalize needs a head");
    let mut nvars = clause.nvars;
    let mut var_names = clause.var_names.clone();
    let mut head_vars = Vec::new();
    let mut eq_goals = Vec::new();
    for (i, arg) in head.atom.args.iter().enumerate() {
        match arg {
            Term::Var(v) if !head_vars.contains(v) => head_vars.push(*v),
            other => {
                let name = fresh_var_name(format!("V{}", i + 1), &var_names);
                let slot = Var(nvars);
                nvars += 1;
                var_names.push(name);
                head_vars.push(slot);
                eq_goals.push(Goal::Cmp(
                    crate::syntax::CmpOp::Eq,
                    Term::Var(slot),
                    other.clone(),
                ));
            }
        }
    }
    let mut body = eq_goals;
    body.extend(clause.body.iter().cloned());
    Normalized {
        head_vars,
        body,
        nvars,
        var_names,
    }
}

/// Variables of `body` not among `head_vars`, in first-appearance order.
fn body_only_vars(head_vars: &[Var], body: &[Goal]) -> Vec<Var> {
    let mut out = Vec::new();
    for g in body {
        g.visit_vars(&mut |v| {
            if !head_vars.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        });
    }
    out
}

/// The `k` prefix-positive negation clauses for `helper(args)` over `body`.
fn negation_body_clauses(
    helper: &Sym,
    head_args: &[Var],
    body: &[Goal],
    nvars: u32,
    var_names: &[String],
) -> Vec<Clause> {
    let mut out = Vec::new();
    let head_terms: Vec<Term> = head_args.iter().map(|v| Term::Var(*v)).collect();
    for j in 0..body.len() {
        let prefix: Vec<Goal> = body[..j].to_vec();
        match &body[j] {
            Goal::Lit(l) => {
                let mut b = prefix;
                b.push(Goal::Lit(Lit {
                    naf: !l.naf,
                    atom: l.atom.clone(),
                }));
                out.push(Clause {
                    head: Some(Head {
                        naf: true,
                        atom: Atom::new(helper.clone(), head_terms.clone()),
                    }),
                    body: b,
                    nvars,
                    var_names: var_names.to_vec(),
                });
            }
            Goal::Cmp(op, lhs, rhs) => {
                let mut nvars = nvars;
                let mut names = var_names.to_vec();
                let mut fresh = || {
                    let v = Var(nvars);
                    names.push(fresh_var_name(format!("T{nvars}"), &names));
                    nvars += 1;
                    v
                };
                for disjunct in negate_constraint(*op, lhs, rhs, &mut fresh) {
                    let mut b = prefix.clone();
                    for (op, l, r) in disjunct {
                        b.push(Goal::Cmp(op, l, r));
                    }
                    out.push(Clause {
                        head: Some(Head {
                            naf: true,
                            atom: Atom::new(helper.clone(), head_terms.clone()),
                        }),
                        body: b,
                        nvars,
                        var_names: names.clone(),
                    });
                }
            }
            Goal::Forall(..) => unreachable!("forall cannot occur in user clauses"),
        }
    }
    out
}

fn forall_wrap(vars: &[Var], inner: Goal) -> Goal {
    vars.iter()
        .rev()
        .fold(inner, |acc, v| Goal::Forall(*v, Box::new(acc)))
}

/// Dual clauses for one predicate given its source clauses (all sharing the
/// same name and arity). `taken` tracks reserved helper names.
pub(super) fn dualize_pred(
    name: &Sym,
    arity: u32,
    clauses: &[&Clause],
    taken: &mut HashSet<Sym>,
) -> Vec<Clause> {
    let mut out = Vec::new();
    if clauses.is_empty() {
        // Negation of an empty disjunction: an unconditional fact.
        let var_names: Vec<String> = (0..arity).map(|i| format!("V{}", i + 1)).collect();
        let args = (0..arity).map(|i| Term::Var(Var(i))).collect();
        out.push(Clause {
            head: Some(Head {
                naf: true,
                atom: Atom::new(name.clone(), args),
            }),
            body: Vec::new(),
            nvars: arity,
            var_names,
        });
        return out;
    }

    let mut clause_helpers = Vec::new();
    for (i, clause) in clauses.iter().enumerate() {
        let helper = fresh_name(format!("{name}_{}", i + 1), taken);
        let body_helper = fresh_name(format!("{helper}_body"), taken);
        clause_helpers.push(helper.clone());
        let norm = normalize(clause);
        let free = body_only_vars(&norm.head_vars, &norm.body);

        // not p_i(V..) :- forall(Y.., not p_i_body(V.., Y..)).
        let mut all_args: Vec<Var> = norm.head_vars.clone();
        all_args.extend(free.iter().copied());
        let inner = Goal::Lit(Lit::naf(Atom::new(
            body_helper.clone(),
            all_args.iter().map(|v| Term::Var(*v)).collect(),
        )));
        out.push(Clause {
            head: Some(Head {
                naf: true,
                atom: Atom::new(
                    helper.clone(),
                    norm.head_vars.iter().map(|v| Term::Var(*v)).collect(),
                ),
            }),
            body: vec![forall_wrap(&free, inner)],
            nvars: norm.nvars,
            var_names: norm.var_names.clone(),
        });

        out.extend(negation_body_clauses(
            &body_helper,
            &all_args,
            &norm.body,
            norm.nvars,
            &norm.var_names,
        ));
    }

    // Top dual: not p(V..) :- not p_1(V..), ..., not p_m(V..).
    let var_names: Vec<String> = (0..arity).map(|i| format!("V{}", i + 1)).collect();
    let args: Vec<Term> = (0..arity).map(|i| Term::Var(Var(i))).collect();
    out.insert(
        0,
        Clause {
            head: Some(Head {
                naf: true,
                atom: Atom::new(name.clone(), args.clone()),
            }),
            body: clause_helpers
                .iter()
                .map(|h| Goal::Lit(Lit::naf(Atom::new(h.clone(), args.clone()))))
                .collect(),
            nvars: arity,
            var_names,
        },
    );
    out
}

/// Clauses for the non-monotonic-rule check: one `chk_i` per denial plus the
/// single `nmr_check/0` clause. Returns `(clauses, nmr_check_name)`.
pub(super) fn synthesize_nmr_check(
    denials: &[Clause],
    taken: &mut HashSet<Sym>,
) -> (Vec<Clause>, Sym) {
    let mut out = Vec::new();
    let mut chk_names = Vec::new();
    for (i, denial) in denials.iter().enumerate() {
        let chk = fresh_name(format!("chk{}", i + 1), taken);
        let body_helper = fresh_name(format!("{chk}_1"), taken);
        chk_names.push(chk.clone());
        let vars = body_only_vars(&[], &denial.body);
        let inner = Goal::Lit(Lit::naf(Atom::new(
            body_helper.clone(),
            vars.iter().map(|v| Term::Var(*v)).collect(),
        )));
        out.push(Clause {
            head: Some(Head {
                naf: false,
                atom: Atom::new(chk.clone(), Vec::new()),
            }),
            body: vec![forall_wrap(&vars, inner)],
            nvars: denial.nvars,
            var_names: denial.var_names.clone(),
        });
        out.extend(negation_body_clauses(
            &body_helper,
            &vars,
            &denial.body,
            denial.nvars,
            &denial.var_names,
        ));
    }
    let nmr = fresh_name("nmr_check".to_string(), taken);
    out.push(Clause {
        head: Some(Head {
            naf: false,
            atom: Atom::new(nmr.clone(), Vec::new()),
        }),
        body: chk_names
            .into_iter()
            .map(|c| Goal::Lit(Lit::pos(Atom::new(c, Vec::new()))))
            .collect(),
        nvars: 0,
        var_names: Vec::new(),
    });
    (out, nmr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn dual_of(src: &str, name: &str, arity: u32) -> Vec<String> {
        let prog = parse_program(src).unwrap();
        let mut taken: HashSet<Sym> = prog
            .clauses
            .iter()
            .map(|c| c.head.as_ref().unwrap().atom.pred.clone())
            .collect();
        let sym = Sym::new(name);
        let selected: Vec<&Clause> = prog
            .clauses
            .iter()
            .filter(|c| {
                let h = c.head.as_ref().unwrap();
                h.atom.pred == sym && h.atom.arity() == arity
            })
            .collect();
        dualize_pred(&sym, arity, &selected, &mut taken)
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    #[test]
    fn zero_clause_predicate_gets_a_fact() {
        let mut taken = HashSet::new();
        let dual = dualize_pred(&Sym::new("r"), 1, &[], &mut taken);
        assert_eq!(dual.len(), 1);
        assert_eq!(dual[0].to_string(), "not r(V1).");
    }

    #[test]
    fn single_fact_dual_negates_the_binding() {
        let dual = dual_of("d(1).", "d", 1);
        assert_eq!(
            dual,
            vec![
                "not d(V1) :- not d_1(V1).",
                "not d_1(V1) :- not d_1_body(V1).",
                "not d_1_body(V1) :- V1 \\= 1.",
            ]
        );
    }

    #[test]
    fn prefix_positive_template() {
        // Body goals are kept verbatim before the negated one.
        let dual = dual_of("chk(X, Y) :- p(X), not q(X, Y).", "chk", 2);
        assert!(dual.contains(&"not chk_1_body(X, Y) :- not p(X).".to_string()));
        assert!(dual.contains(&"not chk_1_body(X, Y) :- p(X), q(X, Y).".to_string()));
    }

    #[test]
    fn body_variables_are_universally_quantified() {
        let dual = dual_of("p(X) :- q(X, Z), not r(Z).", "p", 1);
        assert!(dual.contains(&"not p_1(X) :- forall(Z, not p_1_body(X, Z)).".to_string()));
    }

    #[test]
    fn repeated_head_vars_are_flattened() {
        let dual = dual_of("p(X, X).", "p", 2);
        assert!(dual
            .iter()
            .any(|c| c.contains("not p_1_body(X, V2) :- V2 \\= X.")));
    }

    #[test]
    fn arithmetic_negation_defers_evaluation() {
        let dual = dual_of("p(X, Y) :- Y is X - 1.", "p", 2);
        assert!(
            dual.iter()
                .any(|c| c.contains("is X - 1") && c.contains("Y \\=")),
            "got {dual:?}"
        );
    }

    #[test]
    fn helper_names_avoid_user_predicates() {
        let dual = dual_of("p_1(z).\np(X) :- q(X).", "p", 1);
        assert!(dual.iter().any(|c| c.starts_with("not p_1_(X)")), "{dual:?}");
    }

    #[test]
    fn nmr_for_single_denial() {
        let prog = parse_program(":- vertex(U), not reachable(U).").unwrap();
        let mut taken = HashSet::new();
        let (clauses, nmr) = synthesize_nmr_check(&prog.denials, &mut taken);
        let rendered: Vec<String> = clauses.iter().map(|c| c.to_string()).collect();
        assert_eq!(
            rendered,
            vec![
                "chk1 :- forall(U, not chk1_1(U)).",
                "not chk1_1(U) :- not vertex(U).",
                "not chk1_1(U) :- vertex(U), reachable(U).",
                "nmr_check :- chk1.",
            ]
        );
        assert_eq!(nmr.as_str(), "nmr_check");
    }

    #[test]
    fn nmr_with_no_denials_is_a_fact() {
        let mut taken = HashSet::new();
        let (clauses, _) = synthesize_nmr_check(&[], &mut taken);
        assert_eq!(clauses.len(), 1);
        assert_eq!(clauses[0].to_string(), "nmr_check.");
    }

    #[test]
    fn nmr_nests_foralls_in_first_appearance_order() {
        let prog = parse_program(":- p(X), q(X, Y).").unwrap();
        let mut taken = HashSet::new();
        let (clauses, _) = synthesize_nmr_check(&prog.denials, &mut taken);
        assert_eq!(
            clauses[0].to_string(),
            "chk1 :- forall(X, forall(Y, not chk1_1(X, Y)))."
        );
    }
}
