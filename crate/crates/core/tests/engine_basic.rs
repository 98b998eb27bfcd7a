//! Engine behavior on the small programs that pin the evaluation semantics:
//! even/odd loops, loop-analysis denials, constructive negation with
//! disequalities and intervals, and universal quantification.

use gasp_core::output::{render_bindings, render_model, RenderOptions};
use gasp_core::{compile, engine, parse_program, parse_query, CompileOptions, RunOptions};

fn run(src: &str, query: &str, dcc: bool) -> (Vec<gasp_core::Answer>, gasp_core::Stats) {
    let prog = parse_program(src).expect("parse");
    let compiled_src = {
        // Make the query's predicates known to the compiler.
        let mut p = prog.clone();
        p.queries.push(parse_query(query).expect("query"));
        p
    };
    let compiled = compile(&compiled_src, &CompileOptions::default());
    let q = parse_query(query).unwrap();
    engine::solve_all(&compiled, &q, &RunOptions { dcc, limit: 0 }).expect("run")
}

fn models(src: &str, query: &str) -> Vec<String> {
    let (answers, _) = run(src, query, false);
    let opts = RenderOptions::default();
    answers
        .iter()
        .map(|a| render_model(a, &[], &opts))
        .collect()
}

#[test]
fn empty_goal_list_yields_one_answer() {
    let (answers, _) = run("p.", "?- p.", false);
    assert_eq!(answers.len(), 1);
}

#[test]
fn even_loop_has_one_answer_for_p() {
    let ms = models("p :- not q.\nq :- not p.", "?- p.");
    assert_eq!(ms, vec!["{ p, not q }"]);
}

#[test]
fn olon_kills_all_queries() {
    let src = "p :- not q.\nq :- not p.\nr :- not r.";
    for q in ["?- p.", "?- q.", "?- r."] {
        let (answers, _) = run(src, q, false);
        assert_eq!(answers.len(), 0, "query {q} should have no models");
    }
    // Removing the odd loop restores the even-loop models.
    let (answers, _) = run("p :- not q.\nq :- not p.", "?- p.", false);
    assert_eq!(answers.len(), 1);
}

#[test]
fn positive_loop_fails_finitely() {
    let (answers, _) = run("p :- p.", "?- p.", false);
    assert_eq!(answers.len(), 0);
}

#[test]
fn negation_of_unfounded_positive_loop_succeeds() {
    let (answers, _) = run("q :- not p.\np :- p.", "?- q.", false);
    assert_eq!(answers.len(), 1);
}

#[test]
fn odd_loop_through_three_clauses_fails() {
    // One intervening negation: evaluation of p fails.
    let (answers, _) = run("p :- q.\nq :- not r.\nr :- p.", "?- p.", false);
    assert_eq!(answers.len(), 0);
}

#[test]
fn even_loop_through_three_clauses_succeeds() {
    let src = "p :- not q.\nq :- r.\nr :- not p.";
    let ms = models(src, "?- p.");
    assert_eq!(ms, vec!["{ p, not q, not r }"]);
}

#[test]
fn constructive_negation_of_a_fact() {
    let src = "d(1).\np(X) :- not d(X).";
    let (answers, _) = run(src, "?- p(X).", false);
    assert_eq!(answers.len(), 1);
    let opts = RenderOptions::default();
    assert_eq!(
        render_model(&answers[0], &[], &opts),
        "{ p(X| {X \\= 1}), not d(X| {X \\= 1}) }"
    );
    assert_eq!(render_bindings(&answers[0]), "X \\= 1");
}

#[test]
fn unsafe_variables_yield_three_answer_sets() {
    let src = "\
p(X) :- q(X, Z), not r(X).
p(Z) :- not q(X, Z), r(X).
q(X, a) :- X #> 5.
r(X) :- X #< 1.";
    let (answers, _) = run(src, "?- p(A).", false);
    let mut bindings: Vec<String> = answers.iter().map(render_bindings).collect();
    bindings.sort();
    assert_eq!(bindings, vec!["A #> 5", "A = a", "A \\= a"]);
    let opts = RenderOptions::default();
    let ms: Vec<String> = answers
        .iter()
        .map(|a| render_model(a, &[], &opts))
        .collect();
    assert!(
        ms.contains(&"{ p(A| {A #> 5}), q(A| {A #> 5}, a), not r(A| {A #> 5}) }".to_string()),
        "got {ms:?}"
    );
    assert!(
        ms.contains(&"{ p(A| {A \\= a}), not q(B| {B #< 1}, A| {A \\= a}), r(B| {B #< 1}) }".to_string()),
        "got {ms:?}"
    );
    assert!(
        ms.contains(&"{ p(a), not q(B| {B #< 1}, a), r(B| {B #< 1}) }".to_string()),
        "got {ms:?}"
    );
}

#[test]
fn list_membership_constraints_accumulate() {
    let src = "\
member(X, [X|Xs]).
member(X, [_|Xs]) :- member(X, Xs).
list([1,2,3,4,5]).";
    let (answers, _) = run(src, "?- list(A), not member(B, A).", false);
    assert!(!answers.is_empty());
    assert_eq!(
        render_bindings(&answers[0]),
        "A = [1,2,3,4,5], B \\= 1, B \\= 2, B \\= 3, B \\= 4, B \\= 5"
    );
}

#[test]
fn forall_requires_full_coverage() {
    // nmr check: every X must satisfy q(X); a lone fact cannot cover the
    // whole domain.
    let (answers, _) = run("q(a).\n:- not q(X).", "?- q(a).", false);
    assert_eq!(answers.len(), 0);

    // Here the denial only requires q-instances to be r-covered.
    let (answers, _) = run("q(a).\nr(a).\n:- q(X), not r(X).", "?- q(a).", false);
    assert_eq!(answers.len(), 1);

    // A missing r-instance breaks it again.
    let (answers, _) = run("q(a).\nq(b).\nr(a).\n:- q(X), not r(X).", "?- q(a).", false);
    assert_eq!(answers.len(), 0);
}

#[test]
fn undefined_predicates() {
    let (answers, _) = run("p :- not missing.", "?- p.", false);
    assert_eq!(answers.len(), 1);
    let (answers, _) = run("", "?- nothing(1).", false);
    assert_eq!(answers.len(), 0);
}

#[test]
fn dcc_agrees_with_baseline_on_small_programs() {
    let cases = [
        ("p :- not q.\nq :- not p.", "?- p."),
        ("d(1).\np(X) :- not d(X).", "?- p(X)."),
        ("q(a).\nr(a).\n:- q(X), not r(X).", "?- q(a)."),
    ];
    let opts = RenderOptions::default();
    for (src, q) in cases {
        let (off, _) = run(src, q, false);
        let (on, _) = run(src, q, true);
        let mut off_r: Vec<String> = off.iter().map(|a| render_model(a, &[], &opts)).collect();
        let mut on_r: Vec<String> = on.iter().map(|a| render_model(a, &[], &opts)).collect();
        off_r.sort();
        on_r.sort();
        assert_eq!(off_r, on_r, "{src} {q}");
    }
}
