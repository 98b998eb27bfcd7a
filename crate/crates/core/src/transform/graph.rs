//! Predicate dependency graph and detection of odd loops over negation.
//!
//! Predicates are collapsed to name/arity nodes, which is exact for
//! propositional programs and a safe over-approximation otherwise. Every
//! rule whose head lies on a cycle with an odd number of negative edges,
//! entered through one of its own body literals, yields the denial
//! `:- Body, not Head`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::syntax::{Clause, Goal, Lit, Program, Sym};

pub type PredKey = (Sym, u32);

/// Dependency graph over name/arity nodes. An edge `(from, to, negative)`
/// records that `to`'s rule body mentions `from`, under NAF iff `negative`.
#[derive(Clone, Default, Debug)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<PredKey>,
    pub edges: BTreeSet<(PredKey, PredKey, bool)>,
}

pub fn build_dependency_graph(program: &Program) -> DependencyGraph {
    let mut g = DependencyGraph::default();
    let note_atom_preds = |g: &mut DependencyGraph, goals: &[Goal]| {
        for goal in goals {
            if let Goal::Lit(l) = goal {
                g.nodes.insert(l.atom.key());
            }
        }
    };
    for clause in &program.clauses {
        let head = clause.head.as_ref().expect("clause has a head");
        let head_key = head.atom.key();
        g.nodes.insert(head_key.clone());
        for goal in &clause.body {
            if let Goal::Lit(l) = goal {
                let body_key = l.atom.key();
                g.nodes.insert(body_key.clone());
                g.edges.insert((body_key, head_key.clone(), l.naf));
            }
        }
    }
    // Denials and queries contribute nodes but no edges (they have no head).
    for denial in &program.denials {
        note_atom_preds(&mut g, &denial.body);
    }
    for query in &program.queries {
        note_atom_preds(&mut g, &query.goals);
    }
    g
}

/// Strongly connected components, one id per node.
fn sccs(graph: &DependencyGraph) -> HashMap<PredKey, usize> {
    let nodes: Vec<PredKey> = graph.nodes.iter().cloned().collect();
    let idx: HashMap<PredKey, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (from, to, _) in &graph.edges {
        adj[idx[from]].push(idx[to]);
    }

    // Iterative Tarjan.
    let n = nodes.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut next_comp = 0usize;

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call_stack: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut child)) = call_stack.last_mut() {
            if *child == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                call_stack.pop();
                if let Some(&mut (parent, _)) = call_stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }

    nodes
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, comp[i]))
        .collect()
}

/// Parity-annotated reachability from `start` restricted to one component:
/// the set of `(node, parity)` pairs reachable along component-internal
/// edges, where parity counts negative edges mod 2.
fn parity_reach(
    graph: &DependencyGraph,
    comp: &HashMap<PredKey, usize>,
    start: &PredKey,
) -> HashSet<(PredKey, bool)> {
    let cid = comp[start];
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((start.clone(), false));
    queue.push_back((start.clone(), false));
    while let Some((node, parity)) = queue.pop_front() {
        for (from, to, neg) in &graph.edges {
            if from != &node || comp.get(to) != Some(&cid) {
                continue;
            }
            let next = (to.clone(), parity ^ neg);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Emits `:- Body, not Head` for every rule whose head predicate lies on an
/// odd loop over negation entered through one of the rule's body literals.
/// Emitted denials are deduplicated structurally, also against `existing`.
pub fn detect_olon_denials(program: &Program, graph: &DependencyGraph) -> Vec<Clause> {
    let comp = sccs(graph);
    let mut reach_cache: HashMap<PredKey, HashSet<(PredKey, bool)>> = HashMap::new();
    let mut seen: HashSet<String> = program.denials.iter().map(canonical_form).collect();
    let mut out = Vec::new();

    for clause in &program.clauses {
        let head = clause.head.as_ref().expect("clause has a head");
        let head_key = head.atom.key();
        let on_odd_cycle = clause.body.iter().any(|goal| {
            let Goal::Lit(l) = goal else { return false };
            let body_key = l.atom.key();
            if comp.get(&body_key) != comp.get(&head_key) {
                return false;
            }
            let reach = reach_cache
                .entry(head_key.clone())
                .or_insert_with(|| parity_reach(graph, &comp, &head_key));
            // Cycle = path head ->* body plus this rule's edge body -> head;
            // total negative-edge count is odd iff the path parity differs
            // from the closing edge's sign.
            reach.contains(&(body_key, !l.naf))
        });
        if !on_odd_cycle {
            continue;
        }
        let mut body = clause.body.clone();
        let closing = Goal::Lit(Lit::naf(head.atom.clone()));
        if !body.contains(&closing) {
            body.push(closing);
        }
        let denial = Clause {
            head: None,
            body,
            nvars: clause.nvars,
            var_names: clause.var_names.clone(),
        };
        if seen.insert(canonical_form(&denial)) {
            out.push(denial);
        }
    }
    out
}

/// Structural fingerprint with variables canonicalized by first occurrence.
fn canonical_form(clause: &Clause) -> String {
    use std::fmt::Write;
    let mut order: Vec<u32> = Vec::new();
    let mut rendered = Clause {
        head: clause.head.clone(),
        body: clause.body.clone(),
        nvars: clause.nvars,
        var_names: Vec::new(),
    };
    let mut collect = |v: crate::syntax::Var| {
        if !order.contains(&v.0) {
            order.push(v.0);
        }
    };
    for g in &clause.body {
        g.visit_vars(&mut collect);
    }
    if let Some(h) = &clause.head {
        for a in &h.atom.args {
            a.visit_vars(&mut collect);
        }
    }
    let mut names = vec![String::new(); clause.nvars as usize];
    for (i, slot) in order.iter().enumerate() {
        names[*slot as usize] = format!("C{i}");
    }
    rendered.var_names = names;
    let mut s = String::new();
    write!(s, "{rendered}").unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn key(name: &str, arity: u32) -> PredKey {
        (Sym::new(name), arity)
    }

    #[test]
    fn graph_of_negative_loops() {
        let prog = parse_program("p :- not q.\nq :- not p.\nr :- not r.").unwrap();
        let g = build_dependency_graph(&prog);
        let expected: BTreeSet<_> = [
            (key("q", 0), key("p", 0), true),
            (key("p", 0), key("q", 0), true),
            (key("r", 0), key("r", 0), true),
        ]
        .into_iter()
        .collect();
        assert_eq!(g.edges, expected);
    }

    #[test]
    fn graph_of_mixed_cycle() {
        let prog = parse_program("p :- q.\nq :- not r.\nr :- p.").unwrap();
        let g = build_dependency_graph(&prog);
        let negs: Vec<_> = g.edges.iter().filter(|(_, _, neg)| *neg).collect();
        assert_eq!(g.edges.len(), 3);
        assert_eq!(negs.len(), 1);
    }

    #[test]
    fn empty_program_empty_graph() {
        let prog = parse_program("").unwrap();
        let g = build_dependency_graph(&prog);
        assert!(g.nodes.is_empty());
        assert!(g.edges.is_empty());
    }

    #[test]
    fn self_negation_emits_denial_and_duplicate_collapses() {
        let prog = parse_program("r :- not r.").unwrap();
        let g = build_dependency_graph(&prog);
        let denials = detect_olon_denials(&prog, &g);
        assert_eq!(denials.len(), 1);
        assert_eq!(denials[0].to_string(), ":- not r.");
    }

    #[test]
    fn even_loop_emits_nothing() {
        let prog = parse_program("p :- not q.\nq :- not p.").unwrap();
        let g = build_dependency_graph(&prog);
        assert!(detect_olon_denials(&prog, &g).is_empty());
    }

    #[test]
    fn odd_loop_with_positive_guard() {
        let prog = parse_program("q.\nr :- q, not r.").unwrap();
        let g = build_dependency_graph(&prog);
        let denials = detect_olon_denials(&prog, &g);
        assert_eq!(denials.len(), 1);
        assert_eq!(denials[0].to_string(), ":- q, not r.");
    }

    #[test]
    fn three_step_odd_loop() {
        let prog = parse_program("p :- q.\nq :- not r.\nr :- p.").unwrap();
        let g = build_dependency_graph(&prog);
        let denials = detect_olon_denials(&prog, &g);
        assert!(!denials.is_empty());
    }

    #[test]
    fn olon_analysis_is_idempotent() {
        let src = "p :- q.\nq :- not r.\nr :- p.\ns :- not s.";
        let mut prog = parse_program(src).unwrap();
        let g = build_dependency_graph(&prog);
        let first = detect_olon_denials(&prog, &g);
        assert!(!first.is_empty());
        prog.denials.extend(first);
        let g2 = build_dependency_graph(&prog);
        let second = detect_olon_denials(&prog, &g2);
        assert!(second.is_empty(), "unexpected new denials: {second:?}");
    }
}
