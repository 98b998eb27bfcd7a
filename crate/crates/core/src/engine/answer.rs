//! Materialization of answers: when the consistency check succeeds, the
//! partial model, the query bindings, the per-variable constraints and the
//! justification tree are resolved against the live store into an immutable
//! snapshot. The engine backtracks afterwards; the snapshot stands alone.

use std::collections::HashMap;

use crate::constraints::VarConstraint;
use crate::syntax::{CmpOp, Rat, Sym, Term, Var};
use crate::transform::PredRef;

use super::{Engine, Entry, EntryKind, RawLabel};

/// Resolved term: variables are display ids into [`Answer::vars`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ATerm {
    Num(Rat),
    Const(Sym),
    Var(u32),
    Comp(Sym, Vec<ATerm>),
}

/// Constraint shown with a variable: a disequality or an interval bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ACon {
    Neq(ATerm),
    Lo(Rat, bool),
    Hi(Rat, bool),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnswerVar {
    pub name: String,
    pub cons: Vec<ACon>,
}

/// One literal of the rendered model, in call order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelLit {
    pub kind: EntryKind,
    pub naf: bool,
    pub name: Sym,
    pub args: Vec<ATerm>,
}

impl EntryKind {
    fn order(self) -> u8 {
        match self {
            EntryKind::Fact => 0,
            EntryKind::Chs => 1,
            EntryKind::Proved => 2,
        }
    }
}

impl PartialOrd for EntryKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.order().cmp(&other.order()))
    }
}

impl Ord for EntryKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order().cmp(&other.order())
    }
}

/// A query-variable binding; `value` is `None` for variables that stay free
/// (their constraints live in [`Answer::vars`]).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BindingOut {
    pub name: String,
    pub var: u32,
    pub value: Option<ATerm>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum JustLabel {
    Goal {
        kind: EntryKind,
        naf: bool,
        name: Sym,
        args: Vec<ATerm>,
    },
    Cmp(CmpOp, ATerm, ATerm),
    Forall,
    NmrCheck,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JustTree {
    pub label: JustLabel,
    pub children: Vec<JustTree>,
}

/// One answer: the partial model supporting the query, the bindings of the
/// query variables, the constraints of every displayed variable, and the
/// justification tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Answer {
    pub model: Vec<ModelLit>,
    pub bindings: Vec<BindingOut>,
    pub vars: Vec<AnswerVar>,
    pub just: Vec<JustTree>,
}

struct Materializer<'e, 'p> {
    eng: &'e Engine<'p>,
    var_map: HashMap<Var, u32>,
    vars: Vec<AnswerVar>,
    /// Original store variable behind each display id.
    origins: Vec<Var>,
    taken: Vec<String>,
}

impl<'e, 'p> Materializer<'e, 'p> {
    fn display_var(&mut self, v: Var, preferred: Option<&str>) -> u32 {
        if let Some(&id) = self.var_map.get(&v) {
            return id;
        }
        // Query variables keep their source names (pre-reserved in `taken`);
        // everything else gets the first free capital letter.
        let name = match preferred {
            Some(n) => n.to_string(),
            None => self.fresh_name(),
        };
        let id = self.vars.len() as u32;
        self.vars.push(AnswerVar {
            name: name.clone(),
            cons: Vec::new(),
        });
        self.origins.push(v);
        self.taken.push(name);
        self.var_map.insert(v, id);
        id
    }

    fn fresh_name(&self) -> String {
        for round in 0.. {
            for letter in b'A'..=b'Z' {
                let name = if round == 0 {
                    (letter as char).to_string()
                } else {
                    format!("{}{round}", letter as char)
                };
                if !self.taken.iter().any(|t| t == &name) {
                    return name;
                }
            }
        }
        unreachable!()
    }

    fn term(&mut self, t: &Term) -> ATerm {
        match self.eng.store.deref(t) {
            Term::Var(v) => ATerm::Var(self.display_var(v, None)),
            Term::Const(s) => ATerm::Const(s),
            Term::Num(n) => ATerm::Num(n),
            Term::Comp(c) => ATerm::Comp(
                c.functor.clone(),
                c.args.iter().map(|a| self.term(a)).collect(),
            ),
        }
    }

    /// Converts a term only if every variable in it is already displayed;
    /// constraints mentioning quantified-away scratch variables are omitted.
    fn term_if_displayed(&self, t: &Term) -> Option<ATerm> {
        match self.eng.store.deref(t) {
            Term::Var(v) => self.var_map.get(&v).map(|id| ATerm::Var(*id)),
            Term::Const(s) => Some(ATerm::Const(s)),
            Term::Num(n) => Some(ATerm::Num(n)),
            Term::Comp(c) => {
                let args: Option<Vec<ATerm>> =
                    c.args.iter().map(|a| self.term_if_displayed(a)).collect();
                Some(ATerm::Comp(c.functor.clone(), args?))
            }
        }
    }

    fn pred_name(&self, pred: &PredRef) -> Sym {
        match pred {
            PredRef::Known(id) => self.eng.prog.defs[*id as usize].name.clone(),
            PredRef::Unknown(name, _) => name.clone(),
        }
    }
}

impl<'p> Engine<'p> {
    pub(crate) fn materialize(&mut self, query_vars: &[(String, Var)]) -> Answer {
        let mut m = Materializer {
            eng: self,
            var_map: HashMap::new(),
            vars: Vec::new(),
            origins: Vec::new(),
            taken: query_vars.iter().map(|(n, _)| n.clone()).collect(),
        };
        m.taken.retain(|n| !n.starts_with('_'));

        // Register every query variable first so each keeps its source name,
        // then resolve the values (which may pull in fresh display vars).
        let mut bindings = Vec::new();
        for (name, v) in query_vars {
            if name.starts_with('_') {
                continue;
            }
            match m.eng.store.deref(&Term::Var(*v)) {
                Term::Var(w) => {
                    m.display_var(w, Some(name));
                }
                _ => {}
            }
        }
        for (name, v) in query_vars {
            if name.starts_with('_') {
                continue;
            }
            let (var, value) = match m.eng.store.deref(&Term::Var(*v)) {
                Term::Var(w) => (m.display_var(w, Some(name)), None),
                bound => (m.display_var(*v, Some(name)), Some(m.term(&bound))),
            };
            bindings.push(BindingOut {
                name: name.clone(),
                var,
                value,
            });
        }

        // Model entries in call order.
        let mut entries: Vec<(u64, ModelLit)> = Vec::new();
        for entry in &self.model {
            let Entry::Lit {
                kind,
                naf,
                pred,
                args,
                seq,
            } = entry
            else {
                continue;
            };
            let lit = ModelLit {
                kind: *kind,
                naf: *naf,
                name: m.pred_name(pred),
                args: args.iter().map(|a| m.term(a)).collect(),
            };
            entries.push((*seq, lit));
        }
        entries.sort_by_key(|(seq, _)| *seq);
        let model: Vec<ModelLit> = entries.into_iter().map(|(_, lit)| lit).collect();

        // Constraints of every displayed variable, now that the display set
        // is closed.
        for id in 0..m.origins.len() {
            let origin = m.origins[id];
            let mut cons = Vec::new();
            for c in self.store.constraints_of(origin) {
                match c {
                    VarConstraint::Eq(_) => {}
                    VarConstraint::Pair(a, b) => {
                        let (da, db) = (self.store.deref(&a), self.store.deref(&b));
                        let rhs = match (&da, &db) {
                            (Term::Var(v), _) if *v == origin => &db,
                            (_, Term::Var(v)) if *v == origin => &da,
                            _ => continue, // joint constraint over a tuple
                        };
                        if let Some(at) = m.term_if_displayed(rhs) {
                            cons.push(ACon::Neq(at));
                        }
                    }
                    VarConstraint::Lo(b, strict) => cons.push(ACon::Lo(b, strict)),
                    VarConstraint::Hi(b, strict) => cons.push(ACon::Hi(b, strict)),
                    VarConstraint::Excl(n) => cons.push(ACon::Neq(ATerm::Num(n))),
                }
            }
            cons.sort_by(|a, b| con_order(a).cmp(&con_order(b)));
            cons.dedup();
            m.vars[id].cons = cons;
        }

        let just = self.just[0]
            .children
            .clone()
            .iter()
            .map(|&c| materialize_just(self, &mut m, c))
            .collect();

        Answer {
            model,
            bindings,
            vars: m.vars,
            just,
        }
    }
}

fn con_order(c: &ACon) -> (u8, Option<ATerm>, Option<(Rat, bool)>) {
    match c {
        ACon::Neq(t) => (0, Some(t.clone()), None),
        ACon::Lo(b, s) => (1, None, Some((b.clone(), *s))),
        ACon::Hi(b, s) => (2, None, Some((b.clone(), *s))),
    }
}

fn materialize_just(eng: &Engine, m: &mut Materializer, node: u32) -> JustTree {
    let raw = &eng.just[node as usize];
    let label = match &raw.label {
        RawLabel::Root => JustLabel::NmrCheck, // root never rendered directly
        RawLabel::Goal {
            kind,
            naf,
            pred,
            args,
        } => JustLabel::Goal {
            kind: *kind,
            naf: *naf,
            name: m.pred_name(pred),
            args: args.iter().map(|a| m.term(a)).collect(),
        },
        RawLabel::Cmp(op, a, b) => JustLabel::Cmp(*op, m.term(a), m.term(b)),
        RawLabel::Forall => JustLabel::Forall,
        RawLabel::Nmr => JustLabel::NmrCheck,
    };
    let children = raw
        .children
        .clone()
        .iter()
        .map(|&c| materialize_just(eng, m, c))
        .collect();
    JustTree { label, children }
}
