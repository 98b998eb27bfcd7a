//! Compilation of a parsed program into its executable form: user clauses,
//! the dual program, loop-analysis denials, the `nmr_check` clauses and the
//! DCC rules, indexed by predicate.

mod dual;
mod graph;

pub use graph::{build_dependency_graph, detect_olon_denials, DependencyGraph};

use std::collections::{HashMap, HashSet};

use crate::syntax::{Clause, CmpOp, Goal, Lit, Program, Query, ShowSpec, Sym, Term, Var};

/// Options controlling compilation. `olon` disables the loop analysis when
/// false (the CLI's `--no-olon` debug flag).
#[derive(Clone, Debug)]
pub struct CompileOptions {
    pub olon: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { olon: true }
    }
}

/// A DCC rule: when `trigger` is about to join the tentative model, the
/// denial it came from is violated iff every goal in `residual` already
/// holds. Trigger and residual share the originating denial's variables.
#[derive(Clone, Debug)]
pub struct DccRule {
    pub trigger: Lit,
    pub residual: Vec<Goal>,
    pub nvars: u32,
    pub var_names: Vec<String>,
}

pub type PredId = u32;

/// Reference to a predicate at runtime. Queries may mention predicates the
/// program never defines or calls; those stay symbolic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum PredRef {
    Known(PredId),
    Unknown(Sym, u32),
}

/// Runtime goal, with predicate references resolved.
#[derive(Clone, Debug)]
pub enum RtGoal {
    Lit {
        naf: bool,
        pred: PredRef,
        args: Vec<Term>,
    },
    Cmp(CmpOp, Term, Term),
    Forall(Var, Box<RtGoal>),
}

impl RtGoal {
    /// Shifts clause-local variable slots by `base` for instantiation.
    pub fn instantiate(&self, base: u32) -> RtGoal {
        let mut shift = |v: Var| Term::Var(Var(v.0 + base));
        match self {
            RtGoal::Lit { naf, pred, args } => RtGoal::Lit {
                naf: *naf,
                pred: pred.clone(),
                args: args.iter().map(|a| a.map_vars(&mut shift)).collect(),
            },
            RtGoal::Cmp(op, a, b) => {
                RtGoal::Cmp(*op, a.map_vars(&mut shift), b.map_vars(&mut shift))
            }
            RtGoal::Forall(v, g) => RtGoal::Forall(Var(v.0 + base), Box::new(g.instantiate(base))),
        }
    }

    /// Rewrites one variable to another; used by the forall evaluation.
    pub fn rename_var(&self, from: Var, to: Var) -> RtGoal {
        let mut map = |v: Var| {
            if v == from {
                Term::Var(to)
            } else {
                Term::Var(v)
            }
        };
        match self {
            RtGoal::Lit { naf, pred, args } => RtGoal::Lit {
                naf: *naf,
                pred: pred.clone(),
                args: args.iter().map(|a| a.map_vars(&mut map)).collect(),
            },
            RtGoal::Cmp(op, a, b) => RtGoal::Cmp(*op, a.map_vars(&mut map), b.map_vars(&mut map)),
            RtGoal::Forall(v, g) => {
                let nv = if *v == from { to } else { *v };
                RtGoal::Forall(nv, Box::new(g.rename_var(from, to)))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RtClause {
    pub head_args: Vec<Term>,
    pub body: Vec<RtGoal>,
    pub nvars: u32,
}

/// Predicate definition: positive clauses plus the dual (NAF) clauses.
#[derive(Debug)]
pub struct PredDef {
    pub name: Sym,
    pub arity: u32,
    /// Compiler-generated predicate; invisible to loop checks, models,
    /// `#show` filters and DCC.
    pub helper: bool,
    pub clauses: Vec<RtClause>,
    pub dual: Vec<RtClause>,
}

#[derive(Clone, Debug)]
pub struct RtDccRule {
    pub trigger_naf: bool,
    pub trigger_args: Vec<Term>,
    pub residual: Vec<RtGoal>,
    pub nvars: u32,
}

/// A compiled program. The syntax-level buckets (`user_clauses`,
/// `dual_clauses`, `nmr_clauses`, `dcc_rules`) exist for the `--code` dump
/// and for inspection; the `defs` table is what the engine executes.
pub struct CompiledProgram {
    pub user_clauses: Vec<Clause>,
    pub dual_clauses: Vec<Clause>,
    pub nmr_clauses: Vec<Clause>,
    pub dcc_rules: Vec<DccRule>,
    pub shows: Vec<ShowSpec>,

    pub(crate) defs: Vec<PredDef>,
    pub(crate) index: HashMap<(Sym, u32), PredId>,
    pub(crate) nmr_pred: PredId,
    pub(crate) rt_dcc: Vec<RtDccRule>,
    pub(crate) dcc_index: HashMap<(PredId, bool), Vec<u32>>,
}

impl CompiledProgram {
    pub fn pred(&self, name: &str, arity: u32) -> Option<PredId> {
        self.index.get(&(Sym::new(name), arity)).copied()
    }
}

/// A query lowered against a compiled program.
#[derive(Clone, Debug)]
pub struct RtQuery {
    pub goals: Vec<RtGoal>,
    pub nvars: u32,
    pub var_names: Vec<String>,
}

/// Compiles `program` into its executable form.
pub fn compile(program: &Program, opts: &CompileOptions) -> CompiledProgram {
    // Predicate table in first-appearance order: heads first, then every
    // predicate called anywhere (bodies, denials, queries).
    let mut order: Vec<(Sym, u32)> = Vec::new();
    let mut seen: HashSet<(Sym, u32)> = HashSet::new();
    let note = |key: (Sym, u32), order: &mut Vec<(Sym, u32)>, seen: &mut HashSet<(Sym, u32)>| {
        if seen.insert(key.clone()) {
            order.push(key);
        }
    };
    let note_goals = |goals: &[Goal],
                          order: &mut Vec<(Sym, u32)>,
                          seen: &mut HashSet<(Sym, u32)>| {
        for g in goals {
            if let Goal::Lit(l) = g {
                if seen.insert(l.atom.key()) {
                    order.push(l.atom.key());
                }
            }
        }
    };
    for c in &program.clauses {
        note(c.head.as_ref().unwrap().atom.key(), &mut order, &mut seen);
        note_goals(&c.body, &mut order, &mut seen);
    }
    for d in &program.denials {
        note_goals(&d.body, &mut order, &mut seen);
    }
    for q in &program.queries {
        note_goals(&q.goals, &mut order, &mut seen);
    }

    // Loop analysis.
    let mut denials = program.denials.clone();
    if opts.olon {
        let graph = build_dependency_graph(program);
        denials.extend(detect_olon_denials(program, &graph));
    }

    // Dual program.
    let mut taken: HashSet<Sym> = order.iter().map(|(name, _)| name.clone()).collect();
    let mut dual_clauses = Vec::new();
    for (name, arity) in &order {
        let selected: Vec<&Clause> = program
            .clauses
            .iter()
            .filter(|c| {
                let h = c.head.as_ref().unwrap();
                h.atom.pred == *name && h.atom.arity() == *arity
            })
            .collect();
        dual_clauses.extend(dual::dualize_pred(name, *arity, &selected, &mut taken));
    }

    // NMR check.
    let (nmr_clauses, nmr_name) = dual::synthesize_nmr_check(&denials, &mut taken);

    // DCC rules, for user denials and loop-analysis denials alike.
    let dcc_rules = synthesize_dcc_rules(&denials);

    // Lower everything. Helpers are the predicates introduced above.
    let mut defs: Vec<PredDef> = Vec::new();
    let mut index: HashMap<(Sym, u32), PredId> = HashMap::new();
    let ensure = |key: (Sym, u32),
                      helper: bool,
                      defs: &mut Vec<PredDef>,
                      index: &mut HashMap<(Sym, u32), PredId>| {
        if let Some(id) = index.get(&key) {
            return *id;
        }
        let id = defs.len() as PredId;
        defs.push(PredDef {
            name: key.0.clone(),
            arity: key.1,
            helper,
            clauses: Vec::new(),
            dual: Vec::new(),
        });
        index.insert(key, id);
        id
    };
    for key in &order {
        ensure(key.clone(), false, &mut defs, &mut index);
    }
    for c in dual_clauses.iter().chain(nmr_clauses.iter()) {
        let h = c.head.as_ref().unwrap();
        let key = h.atom.key();
        if !index.contains_key(&key) {
            ensure(key, true, &mut defs, &mut index);
        }
    }

    let attach = |c: &Clause, defs: &mut Vec<PredDef>, index: &HashMap<(Sym, u32), PredId>| {
        let h = c.head.as_ref().unwrap();
        let id = index[&h.atom.key()];
        let rt = RtClause {
            head_args: h.atom.args.clone(),
            body: c.body.iter().map(|g| lower_goal(g, index)).collect(),
            nvars: c.nvars,
        };
        if h.naf {
            defs[id as usize].dual.push(rt);
        } else {
            defs[id as usize].clauses.push(rt);
        }
    };
    for c in &program.clauses {
        attach(c, &mut defs, &index);
    }
    for c in dual_clauses.iter().chain(nmr_clauses.iter()) {
        attach(c, &mut defs, &index);
    }
    let nmr_pred = index[&(nmr_name, 0)];

    // Runtime DCC rules indexed by trigger predicate and polarity.
    let mut rt_dcc = Vec::new();
    let mut dcc_index: HashMap<(PredId, bool), Vec<u32>> = HashMap::new();
    for rule in &dcc_rules {
        let Some(&pid) = index.get(&rule.trigger.atom.key()) else {
            continue;
        };
        let rid = rt_dcc.len() as u32;
        rt_dcc.push(RtDccRule {
            trigger_naf: rule.trigger.naf,
            trigger_args: rule.trigger.atom.args.clone(),
            residual: rule.residual.iter().map(|g| lower_goal(g, &index)).collect(),
            nvars: rule.nvars,
        });
        dcc_index
            .entry((pid, rule.trigger.naf))
            .or_default()
            .push(rid);
    }

    CompiledProgram {
        user_clauses: program.clauses.clone(),
        dual_clauses,
        nmr_clauses,
        dcc_rules,
        shows: program.shows.clone(),
        defs,
        index,
        nmr_pred,
        rt_dcc,
        dcc_index,
    }
}

fn lower_goal(g: &Goal, index: &HashMap<(Sym, u32), PredId>) -> RtGoal {
    match g {
        Goal::Lit(l) => RtGoal::Lit {
            naf: l.naf,
            pred: match index.get(&l.atom.key()) {
                Some(&id) => PredRef::Known(id),
                None => PredRef::Unknown(l.atom.pred.clone(), l.atom.arity()),
            },
            args: l.atom.args.clone(),
        },
        Goal::Cmp(op, a, b) => RtGoal::Cmp(*op, a.clone(), b.clone()),
        Goal::Forall(v, inner) => RtGoal::Forall(*v, Box::new(lower_goal(inner, index))),
    }
}

/// For each denial `:- c_a, b_1, ..., b_n` and each user-defined literal
/// `b_k` (positive or NAF): one rule with `b_k` as trigger and the other
/// goals as residual, in denial order. Constraints are never triggers.
pub fn synthesize_dcc_rules(denials: &[Clause]) -> Vec<DccRule> {
    let mut out = Vec::new();
    for denial in denials {
        for (k, goal) in denial.body.iter().enumerate() {
            let Goal::Lit(trigger) = goal else { continue };
            let residual: Vec<Goal> = denial
                .body
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, g)| g.clone())
                .collect();
            out.push(DccRule {
                trigger: trigger.clone(),
                residual,
                nvars: denial.nvars,
                var_names: denial.var_names.clone(),
            });
        }
    }
    out
}

/// Lowers a query against the compiled predicate table.
pub fn compile_query(prog: &CompiledProgram, query: &Query) -> RtQuery {
    RtQuery {
        goals: query.goals.iter().map(|g| lower_goal(g, &prog.index)).collect(),
        nvars: query.nvars,
        var_names: query.var_names.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn every_called_predicate_has_an_entry() {
        let prog = parse_program("p(X) :- q(X), not r(X).\n?- s(1).").unwrap();
        let compiled = compile(&prog, &CompileOptions::default());
        for name in ["p", "q", "r", "s"] {
            let id = compiled.pred(name, 1).unwrap();
            let def = &compiled.defs[id as usize];
            assert!(
                !def.clauses.is_empty() || !def.dual.is_empty(),
                "{name} has neither clauses nor a dual fact"
            );
        }
    }

    #[test]
    fn nmr_check_has_exactly_one_clause() {
        let prog = parse_program("p :- not q.\n:- p, q.").unwrap();
        let compiled = compile(&prog, &CompileOptions::default());
        let def = &compiled.defs[compiled.nmr_pred as usize];
        assert_eq!(def.clauses.len(), 1);
        assert!(def.helper);
    }

    #[test]
    fn dcc_rules_per_denial_literal() {
        let prog = parse_program(":- p(X), q(X, Y).").unwrap();
        let compiled = compile(&prog, &CompileOptions::default());
        let rendered: Vec<String> = compiled
            .dcc_rules
            .iter()
            .map(|r| {
                let names = r.var_names.clone();
                let namer = move |v: Var| names[v.0 as usize].clone();
                let mut s = String::new();
                use std::fmt::Write;
                write!(
                    s,
                    "dcc({}, [{}])",
                    crate::syntax::WithNames {
                        item: &Goal::Lit(r.trigger.clone()),
                        names: &namer
                    },
                    r.residual
                        .iter()
                        .map(|g| crate::syntax::WithNames { item: g, names: &namer }.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
                .unwrap();
                s
            })
            .collect();
        assert_eq!(
            rendered,
            vec!["dcc(p(X), [q(X, Y)])", "dcc(q(X, Y), [p(X)])"]
        );
    }

    #[test]
    fn dcc_rules_with_constraints_and_naf() {
        let prog =
            parse_program(":- chosen(U, W), U \\= V, chosen(V, W).\n:- vertex(U), not reachable(U).")
                .unwrap();
        let rules = synthesize_dcc_rules(&prog.denials);
        // Constraints are never triggers: 2 + 2 rules.
        assert_eq!(rules.len(), 4);
        assert!(rules[2].trigger.atom.pred.as_str() == "vertex");
        assert!(rules[3].trigger.naf && rules[3].trigger.atom.pred.as_str() == "reachable");
        assert_eq!(rules[3].residual.len(), 1);
    }

    #[test]
    fn hamiltonian_denials_give_six_rules() {
        let src = "\
:- vertex(U), not reachable(U).
:- chosen(U, W), U \\= V, chosen(V, W).
:- chosen(W, U), U \\= V, chosen(W, V).";
        let prog = parse_program(src).unwrap();
        let rules = synthesize_dcc_rules(&prog.denials);
        assert_eq!(rules.len(), 6);
    }
}
