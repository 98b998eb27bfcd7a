//! The top-down interpreter: goal resolution over user and dual clauses,
//! loop classification with coinductive success, universal quantification,
//! the post-query `nmr_check`, and dynamic consistency checking.
//!
//! Search is chronological depth-first in clause order, goal order left to
//! right, implemented in continuation-passing style: a success continuation
//! returns [`Flow`] — `Continue` asks for more solutions (backtrack),
//! `Break` unwinds the whole search (answer limit hit or an error).
//!
//! The partial model and the call stack are kept separately. A literal joins
//! the model when it *succeeds*; the call stack holds the literals currently
//! being proved and drives loop detection. Inserting a literal imposes
//! disequality constraints against every complement entry it could unify
//! with, so the model stays consistent constructively: ground duplicates of
//! a complement fail outright, non-ground candidates are constrained away.

mod answer;
mod dcc;
mod forall;

pub use answer::{ACon, ATerm, Answer, AnswerVar, BindingOut, JustLabel, JustTree, ModelLit};

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use crate::constraints::{ConstraintError, DiseqSplit, Store};
use crate::syntax::{CmpOp, Query, Term, Var};
use crate::transform::{compile_query, CompiledProgram, PredRef, RtClause, RtGoal};

/// Why a search unwinds early.
pub(crate) enum Stop {
    /// Answer limit reached or the consumer declined more answers.
    Done,
    /// A universal quantifier committed to its first coverage and its
    /// continuation has exhausted; unwinds the quantifier's own choice
    /// points only.
    ForallCut(u64),
    Err(EngineError),
}

pub(crate) type Flow = ControlFlow<Stop>;

pub static LIT_CALLS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub static IN_NMR: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

pub(crate) const MORE: Flow = ControlFlow::Continue(());

/// Runtime failure that aborts a run with a diagnostic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EngineError {
    Constraint(ConstraintError),
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineError::Constraint(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<ConstraintError> for EngineError {
    fn from(e: ConstraintError) -> Self {
        EngineError::Constraint(e)
    }
}

/// Options for one run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Enable dynamic consistency checking. Off by default.
    pub dcc: bool,
    /// Answer limit; 0 enumerates everything.
    pub limit: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            dcc: false,
            limit: 0,
        }
    }
}

/// Run counters. `nmr_discarded` counts query-level successes whose
/// `nmr_check` failed exhaustively; `dcc_detections` counts every DCC
/// violation that forced a backtrack.
#[derive(Clone, Default, Debug)]
pub struct Stats {
    pub models_returned: u64,
    pub nmr_discarded: u64,
    pub dcc_detections: u64,
    pub wall_time: Duration,
}

/// Kind of a model entry.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EntryKind {
    /// Proved by clause resolution.
    Fact,
    /// Assumed coinductively on an even loop.
    Chs,
    /// Re-used: a variant was already in the model.
    Proved,
}

#[derive(Clone, Debug)]
pub(crate) enum Entry {
    Lit {
        kind: EntryKind,
        naf: bool,
        pred: PredRef,
        args: Vec<Term>,
        /// Call-sequence key; models render in call order.
        seq: u64,
    },
    /// Separates the query phase from the consistency-check phase.
    Stage,
}

struct Frame {
    naf: bool,
    pred: PredRef,
    args: Vec<Term>,
    /// Cumulative count of sign changes from the root to this frame.
    flips: u32,
}

/// Justification node under construction; resolved into a tree at answer
/// time.
pub(crate) struct JustNode {
    pub(crate) label: RawLabel,
    pub(crate) children: Vec<u32>,
}

#[derive(Clone)]
pub(crate) enum RawLabel {
    Root,
    Goal {
        kind: EntryKind,
        naf: bool,
        pred: PredRef,
        args: Vec<Term>,
    },
    Cmp(CmpOp, Term, Term),
    Forall,
    Nmr,
}

enum Undo {
    ModelPush(PredRef, bool),
    StagePush,
    JustChild(u32),
}

#[derive(Clone, Copy)]
pub(crate) struct EngineMark {
    store: crate::constraints::Mark,
    undo: usize,
    just: usize,
}

enum LoopType {
    Proved,
    Odd,
    Even,
    Positive,
    NoLoop,
}

pub(crate) struct Engine<'p> {
    pub(crate) prog: &'p CompiledProgram,
    pub(crate) store: Store,
    pub(crate) stats: Stats,
    dcc_enabled: bool,
    model: Vec<Entry>,
    model_index: HashMap<(PredRef, bool), Vec<u32>>,
    frames: Vec<Frame>,
    just: Vec<JustNode>,
    just_path: Vec<u32>,
    undo: Vec<Undo>,
    seq: u64,
    forall_seq: u64,
}

impl<'p> Engine<'p> {
    fn new(prog: &'p CompiledProgram, opts: &RunOptions) -> Self {
        let mut just = Vec::new();
        just.push(JustNode {
            label: RawLabel::Root,
            children: Vec::new(),
        });
        Engine {
            prog,
            store: Store::new(),
            stats: Stats::default(),
            dcc_enabled: opts.dcc,
            model: Vec::new(),
            model_index: HashMap::new(),
            frames: Vec::new(),
            just,
            just_path: vec![0],
            undo: Vec::new(),
            seq: 0,
            forall_seq: 0,
        }
    }

    pub(crate) fn mark(&self) -> EngineMark {
        EngineMark {
            store: self.store.mark(),
            undo: self.undo.len(),
            just: self.just.len(),
        }
    }

    pub(crate) fn undo_to(&mut self, mark: EngineMark) {
        while self.undo.len() > mark.undo {
            match self.undo.pop().unwrap() {
                Undo::ModelPush(pred, naf) => {
                    self.model.pop();
                    if let Some(v) = self.model_index.get_mut(&(pred, naf)) {
                        v.pop();
                    }
                }
                Undo::StagePush => {
                    self.model.pop();
                }
                Undo::JustChild(parent) => {
                    self.just[parent as usize].children.pop();
                }
            }
        }
        self.just.truncate(mark.just);
        self.store.undo_to(mark.store);
    }

    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    // -- justification ------------------------------------------------------

    fn just_leaf(&mut self, label: RawLabel) {
        let id = self.just.len() as u32;
        self.just.push(JustNode {
            label,
            children: Vec::new(),
        });
        let parent = *self.just_path.last().unwrap();
        self.just[parent as usize].children.push(id);
        self.undo.push(Undo::JustChild(parent));
    }

    /// Creates a node, makes it the current parent, runs `f`, restores.
    fn with_just_node(&mut self, label: RawLabel, f: impl FnOnce(&mut Self) -> Flow) -> Flow {
        let id = self.just.len() as u32;
        self.just.push(JustNode {
            label,
            children: Vec::new(),
        });
        let parent = *self.just_path.last().unwrap();
        self.just[parent as usize].children.push(id);
        self.undo.push(Undo::JustChild(parent));
        self.just_path.push(id);
        let r = f(self);
        self.just_path.pop();
        r
    }

    // -- goal solving -------------------------------------------------------

    pub(crate) fn solve_seq(
        &mut self,
        goals: &[RtGoal],
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        match goals.split_first() {
            None => k(self),
            Some((g, rest)) => self.solve_goal(g, &mut |eng| eng.solve_seq(rest, k)),
        }
    }

    pub(crate) fn solve_goal(
        &mut self,
        goal: &RtGoal,
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        match goal {
            RtGoal::Lit { naf, pred, args } => self.solve_lit(*naf, pred, args, k),
            RtGoal::Cmp(op, a, b) => self.solve_cmp(*op, a, b, k),
            RtGoal::Forall(v, body) => {
                self.with_just_node(RawLabel::Forall, |eng| eng.solve_forall(*v, body, k))
            }
        }
    }

    fn is_helper(&self, pred: &PredRef) -> bool {
        match pred {
            PredRef::Known(id) => self.prog.defs[*id as usize].helper,
            PredRef::Unknown(..) => false,
        }
    }

    fn solve_lit(
        &mut self,
        naf: bool,
        pred: &PredRef,
        args: &[Term],
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        LIT_CALLS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        if let PredRef::Unknown(..) = pred {
            // Never defined and never called in the program text: a positive
            // call fails, a negated call holds vacuously.
            if !naf {
                return MORE;
            }
            let seq = self.next_seq();
            let mark = self.mark();
            self.just_leaf(RawLabel::Goal {
                kind: EntryKind::Fact,
                naf,
                pred: pred.clone(),
                args: args.to_vec(),
            });
            let r = self.insert_entry(EntryKind::Fact, naf, pred, args, seq, k);
            self.undo_to(mark);
            return r;
        }
        if self.is_helper(pred) {
            return self.resolve_clauses(naf, pred, args, k);
        }

        let seq = self.next_seq();
        match self.classify(naf, pred, args) {
            LoopType::Odd | LoopType::Positive => MORE,
            LoopType::Proved => {
                let mark = self.mark();
                self.just_leaf(RawLabel::Goal {
                    kind: EntryKind::Proved,
                    naf,
                    pred: pred.clone(),
                    args: args.to_vec(),
                });
                self.push_entry(EntryKind::Proved, naf, pred, args, seq);
                let r = k(self);
                self.undo_to(mark);
                r
            }
            LoopType::Even => {
                if self.dcc_violation(naf, pred, args) {
                    return MORE;
                }
                let mark = self.mark();
                self.just_leaf(RawLabel::Goal {
                    kind: EntryKind::Chs,
                    naf,
                    pred: pred.clone(),
                    args: args.to_vec(),
                });
                let r = self.insert_entry(EntryKind::Chs, naf, pred, args, seq, k);
                self.undo_to(mark);
                r
            }
            LoopType::NoLoop => {
                self.frames.push(Frame {
                    naf,
                    pred: pred.clone(),
                    args: args.to_vec(),
                    flips: self.flips_for(naf),
                });
                let owned_args = args.to_vec();
                let owned_pred = pred.clone();
                let r = self.with_just_node(
                    RawLabel::Goal {
                        kind: EntryKind::Fact,
                        naf,
                        pred: pred.clone(),
                        args: args.to_vec(),
                    },
                    |eng| {
                        eng.resolve_clauses(naf, &owned_pred, &owned_args, &mut |e| {
                            if e.dcc_violation(naf, &owned_pred, &owned_args) {
                                return MORE;
                            }
                            e.insert_entry(EntryKind::Fact, naf, &owned_pred, &owned_args, seq, &mut |e2| {
                                let frame = e2.frames.pop().unwrap();
                                let r = k(e2);
                                e2.frames.push(frame);
                                r
                            })
                        })
                    },
                );
                self.frames.pop();
                r
            }
        }
    }

    /// Cumulative sign-change count if a literal of polarity `naf` were
    /// pushed now.
    fn flips_for(&self, naf: bool) -> u32 {
        match self.frames.last() {
            None => 0,
            Some(f) => f.flips + u32::from(f.naf != naf),
        }
    }

    /// Loop classification against the model (Proved) and the call stack.
    ///
    /// The number of NAF boundaries crossed between an ancestor and the
    /// current call is the number of polarity changes along the stack
    /// between them. Odd means the call contradicts the ancestor; even with
    /// at least two crossings is a coinductive (even-loop) success. A NAF
    /// literal looping onto a variant NAF ancestor with no crossings is also
    /// coinductive: negation is evaluated against the greatest fixpoint, so
    /// `not p` may consistently assume itself. A positive variant call with
    /// no crossings is an unfounded positive loop and fails.
    fn classify(&mut self, naf: bool, pred: &PredRef, args: &[Term]) -> LoopType {
        if self.find_model_variant(naf, pred, args) {
            return LoopType::Proved;
        }
        let v_flips = self.flips_for(naf);
        let mut even = false;
        let mut positive = false;
        for i in (0..self.frames.len()).rev() {
            if self.frames[i].pred != *pred {
                continue;
            }
            let crossings = v_flips - self.frames[i].flips;
            let f_args = self.frames[i].args.clone();
            if crossings % 2 == 1 {
                if self.args_unifiable(args, &f_args) {
                    return LoopType::Odd;
                }
            } else if crossings >= 2 {
                if self.args_unifiable(args, &f_args) {
                    even = true;
                }
            } else if self.args_variant(args, &f_args) {
                if naf {
                    even = true;
                } else {
                    positive = true;
                }
            }
        }
        if even {
            LoopType::Even
        } else if positive {
            LoopType::Positive
        } else {
            LoopType::NoLoop
        }
    }

    fn args_unifiable(&mut self, a: &[Term], b: &[Term]) -> bool {
        self.store.unifiable_seq(a, b)
    }

    /// Variant match: equal up to a bijective renaming of unbound,
    /// unconstrained variables. Constrained variables only match themselves.
    fn args_variant(&self, a: &[Term], b: &[Term]) -> bool {
        let mut fwd: HashMap<Var, Var> = HashMap::new();
        let mut bwd: HashMap<Var, Var> = HashMap::new();
        fn walk(
            eng: &Engine,
            a: &Term,
            b: &Term,
            fwd: &mut HashMap<Var, Var>,
            bwd: &mut HashMap<Var, Var>,
        ) -> bool {
            let da = eng.store.deref(a);
            let db = eng.store.deref(b);
            match (&da, &db) {
                (Term::Var(x), Term::Var(y)) => {
                    if x == y {
                        return true;
                    }
                    if !eng.store.constraints_of(*x).is_empty()
                        || !eng.store.constraints_of(*y).is_empty()
                    {
                        return false;
                    }
                    let ok_f = fwd.entry(*x).or_insert(*y);
                    let ok_b = bwd.entry(*y).or_insert(*x);
                    *ok_f == *y && *ok_b == *x
                }
                (Term::Const(s), Term::Const(t)) => s == t,
                (Term::Num(m), Term::Num(n)) => m == n,
                (Term::Comp(c), Term::Comp(d)) => {
                    c.functor == d.functor
                        && c.args.len() == d.args.len()
                        && c.args
                            .iter()
                            .zip(d.args.iter())
                            .all(|(x, y)| walk(eng, x, y, fwd, bwd))
                }
                _ => false,
            }
        }
        a.len() == b.len()
            && a.iter()
                .zip(b.iter())
                .all(|(x, y)| walk(self, x, y, &mut fwd, &mut bwd))
    }

    fn find_model_variant(&self, naf: bool, pred: &PredRef, args: &[Term]) -> bool {
        let Some(ids) = self.model_index.get(&(pred.clone(), naf)) else {
            return false;
        };
        ids.iter().any(|&i| {
            let Entry::Lit { args: e_args, .. } = &self.model[i as usize] else {
                return false;
            };
            self.args_variant(args, e_args)
        })
    }

    /// Plain clause resolution, used for helper predicates and as the
    /// no-loop branch of user literals. Positive literals resolve against
    /// the predicate's clauses, NAF literals against its dual.
    fn resolve_clauses(
        &mut self,
        naf: bool,
        pred: &PredRef,
        args: &[Term],
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        let PredRef::Known(id) = pred else {
            return MORE;
        };
        let prog: &'p CompiledProgram = self.prog;
        let def = &prog.defs[*id as usize];
        let clauses: &'p [RtClause] = if naf { &def.dual } else { &def.clauses };
        for clause in clauses {
            let mark = self.mark();
            let base = self.store.alloc_n(clause.nvars);
            let mut ok = true;
            for (call_arg, head_arg) in args.iter().zip(clause.head_args.iter()) {
                let mut shift = |v: Var| Term::Var(Var(v.0 + base));
                let head_inst = head_arg.map_vars(&mut shift);
                if !self.store.unify(call_arg, &head_inst) {
                    ok = false;
                    break;
                }
            }
            if ok {
                let body: Vec<RtGoal> = clause.body.iter().map(|g| g.instantiate(base)).collect();
                if let ControlFlow::Break(stop) = self.solve_seq(&body, k) {
                    return ControlFlow::Break(stop);
                }
            }
            self.undo_to(mark);
        }
        MORE
    }

    // -- model insertion ----------------------------------------------------

    fn push_entry(&mut self, kind: EntryKind, naf: bool, pred: &PredRef, args: &[Term], seq: u64) {
        self.model.push(Entry::Lit {
            kind,
            naf,
            pred: pred.clone(),
            args: args.to_vec(),
            seq,
        });
        let idx = (self.model.len() - 1) as u32;
        self.model_index
            .entry((pred.clone(), naf))
            .or_default()
            .push(idx);
        self.undo.push(Undo::ModelPush(pred.clone(), naf));
    }

    /// Adds a literal to the model, constraining it apart from every
    /// complement entry it could unify with. A ground duplicate of a
    /// complement fails; effects persist while `k` runs and unwind with the
    /// caller's mark.
    fn insert_entry(
        &mut self,
        kind: EntryKind,
        naf: bool,
        pred: &PredRef,
        args: &[Term],
        seq: u64,
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        let mark = self.mark();
        let complement_ids = self
            .model_index
            .get(&(pred.clone(), !naf))
            .cloned()
            .unwrap_or_default();
        for id in complement_ids {
            let Entry::Lit { args: e_args, .. } = &self.model[id as usize] else {
                continue;
            };
            let e_args = e_args.clone();
            if !self.store.unifiable_seq(args, &e_args) {
                continue;
            }
            let me = Term::comp("args", args.to_vec());
            let other = Term::comp("args", e_args);
            if !self.store.impose_diseq(&me, &other) {
                self.undo_to(mark);
                return MORE;
            }
        }
        self.push_entry(kind, naf, pred, args, seq);
        let r = k(self);
        self.undo_to(mark);
        r
    }

    // -- constraint goals ---------------------------------------------------

    fn solve_cmp(
        &mut self,
        op: CmpOp,
        a: &Term,
        b: &Term,
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        let mark = self.mark();
        let flow = match op {
            CmpOp::Eq => {
                if self.store.unify(a, b) {
                    self.just_leaf(RawLabel::Cmp(op, a.clone(), b.clone()));
                    k(self)
                } else {
                    MORE
                }
            }
            CmpOp::Neq => {
                match self.store.split_diseq(a, b) {
                    DiseqSplit::True => {
                        self.just_leaf(RawLabel::Cmp(op, a.clone(), b.clone()));
                        k(self)
                    }
                    DiseqSplit::False => MORE,
                    DiseqSplit::Branch(alts) => {
                        // One alternative store per argument position,
                        // enumerated left to right on backtracking.
                        for (l, r) in alts {
                            let m2 = self.mark();
                            if self.store.impose_diseq(&l, &r) {
                                self.just_leaf(RawLabel::Cmp(op, a.clone(), b.clone()));
                                if let ControlFlow::Break(stop) = k(self) {
                                    return ControlFlow::Break(stop);
                                }
                            }
                            self.undo_to(m2);
                        }
                        MORE
                    }
                }
            }
            CmpOp::CLt | CmpOp::CGt | CmpOp::CLe | CmpOp::CGe => {
                match self.store.add_order(op, a, b) {
                    Ok(true) => {
                        self.just_leaf(RawLabel::Cmp(op, a.clone(), b.clone()));
                        k(self)
                    }
                    Ok(false) => MORE,
                    Err(e) => ControlFlow::Break(Stop::Err(e.into())),
                }
            }
            CmpOp::Lt | CmpOp::Gt | CmpOp::Le | CmpOp::Ge => {
                let x = match self.store.eval_arith(a) {
                    Ok(x) => x,
                    Err(e) => return ControlFlow::Break(Stop::Err(e.into())),
                };
                let y = match self.store.eval_arith(b) {
                    Ok(y) => y,
                    Err(e) => return ControlFlow::Break(Stop::Err(e.into())),
                };
                if crate::constraints::compare(op, x.value(), y.value()) {
                    self.just_leaf(RawLabel::Cmp(op, a.clone(), b.clone()));
                    k(self)
                } else {
                    MORE
                }
            }
            CmpOp::Is => {
                match self.store.eval_arith(b) {
                    Ok(n) => {
                        if self.store.unify(a, &Term::Num(n)) {
                            self.just_leaf(RawLabel::Cmp(op, a.clone(), b.clone()));
                            k(self)
                        } else {
                            MORE
                        }
                    }
                    // An unbound subexpression cannot be decided here; the
                    // compiled complement disjunctions may probe `is` under
                    // universal quantification before their arguments are
                    // fixed, and those branches must fail, not abort.
                    Err(ConstraintError::Instantiation(_)) => MORE,
                    Err(e) => ControlFlow::Break(Stop::Err(e.into())),
                }
            }
        };
        if flow.is_continue() {
            self.undo_to(mark);
        }
        flow
    }
}

/// Runs `query` against a compiled program, pushing every answer into
/// `on_answer`. The consumer returns `false` to stop early. Statistics are
/// returned when the search completes, is cut off, or errors out (the error
/// case returns `Err`).
pub fn run_query(
    prog: &CompiledProgram,
    query: &Query,
    opts: &RunOptions,
    on_answer: &mut dyn FnMut(Answer) -> bool,
) -> Result<Stats, EngineError> {
    let rtq = compile_query(prog, query);
    let mut eng = Engine::new(prog, opts);
    let base = eng.store.alloc_n(rtq.nvars);
    let goals: Vec<RtGoal> = rtq.goals.iter().map(|g| g.instantiate(base)).collect();
    let query_vars: Vec<(String, Var)> = rtq
        .var_names
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), Var(base + i as u32)))
        .collect();
    let limit = opts.limit;
    let nmr_goal = RtGoal::Lit {
        naf: false,
        pred: PredRef::Known(prog.nmr_pred),
        args: Vec::new(),
    };

    let started = Instant::now();
    let flow = eng.solve_seq(&goals, &mut |e| {
        // The query phase is complete; check the denials.
        let mark = e.mark();
        e.model.push(Entry::Stage);
        e.undo.push(Undo::StagePush);
        let before = e.stats.models_returned;
        let pre_lits = LIT_CALLS.load(std::sync::atomic::Ordering::Relaxed);
        let flow = e.with_just_node(RawLabel::Nmr, |e| {
            let nmr = nmr_goal.clone();
            e.solve_goal(&nmr, &mut |e2| {
                let answer = e2.materialize(&query_vars);
                e2.stats.models_returned += 1;
                if !on_answer(answer) {
                    return ControlFlow::Break(Stop::Done);
                }
                if limit > 0 && e2.stats.models_returned >= limit as u64 {
                    return ControlFlow::Break(Stop::Done);
                }
                MORE
            })
        });
        IN_NMR.fetch_add(
            LIT_CALLS.load(std::sync::atomic::Ordering::Relaxed) - pre_lits,
            std::sync::atomic::Ordering::Relaxed,
        );
        if flow.is_continue() && e.stats.models_returned == before {
            e.stats.nmr_discarded += 1;
        }
        e.undo_to(mark);
        flow
    });
    eng.stats.wall_time = started.elapsed();
    match flow {
        ControlFlow::Continue(()) | ControlFlow::Break(Stop::Done) => Ok(eng.stats),
        ControlFlow::Break(Stop::Err(e)) => Err(e),
        // Every quantifier catches its own token.
        ControlFlow::Break(Stop::ForallCut(_)) => unreachable!("unmatched forall token"),
    }
}

/// Collects up to `opts.limit` answers (all when 0).
pub fn solve_all(
    prog: &CompiledProgram,
    query: &Query,
    opts: &RunOptions,
) -> Result<(Vec<Answer>, Stats), EngineError> {
    let mut answers = Vec::new();
    let stats = run_query(prog, query, opts, &mut |a| {
        answers.push(a);
        true
    })?;
    Ok((answers, stats))
}

/// Runs `f` on a thread with a large stack; deep derivations nest
/// continuations proportionally to proof depth.
pub fn with_solver_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(scope, f)
            .expect("spawn solver thread")
            .join()
            .expect("solver thread panicked")
    })
}
