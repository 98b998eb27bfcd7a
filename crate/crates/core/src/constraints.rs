//! The binding environment: substitution, disequality constraints and
//! single-variable order constraints over exact rationals, all with
//! backtrackable (trailed) updates.
//!
//! Disequalities are kept as suspended term pairs watched on their unbound
//! variables, dif-style: binding a watched variable re-checks the pair, which
//! either drops (satisfied), fails (violated), or re-suspends on the
//! remaining variables. A disequality between a variable and a rational is
//! folded into the variable's interval as an excluded point whenever an
//! interval exists, so that interval degeneration to a single excluded point
//! is detected.
//!
//! Occurs-check is always on: answers are models over a Herbrand universe and
//! rational trees would be unsound.

use std::cmp::Ordering;
use std::fmt;

use num::BigRational;

use crate::syntax::{CmpOp, Rat, Term, Var};

/// Non-failure errors raised by builtins: instantiation and type errors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConstraintError {
    Instantiation(String),
    Type(String),
}

impl fmt::Display for ConstraintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintError::Instantiation(m) => write!(f, "instantiation error: {m}"),
            ConstraintError::Type(m) => write!(f, "type error: {m}"),
        }
    }
}

impl std::error::Error for ConstraintError {}

/// Inclusive/exclusive endpoint; `None` bound means unbounded.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Interval {
    pub lo: Option<(Rat, bool)>,
    pub hi: Option<(Rat, bool)>,
    pub excluded: Vec<Rat>,
}

impl Interval {
    fn above_lo(&self, v: &BigRational) -> bool {
        match &self.lo {
            None => true,
            Some((b, strict)) => match v.cmp(b.value()) {
                Ordering::Greater => true,
                Ordering::Equal => !strict,
                Ordering::Less => false,
            },
        }
    }

    fn below_hi(&self, v: &BigRational) -> bool {
        match &self.hi {
            None => true,
            Some((b, strict)) => match v.cmp(b.value()) {
                Ordering::Less => true,
                Ordering::Equal => !strict,
                Ordering::Greater => false,
            },
        }
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.above_lo(v) && self.below_hi(v) && !self.excluded.iter().any(|e| e.value() == v)
    }

    /// Empty over the dense rationals: the bounds cross, or they meet at a
    /// point that is excluded or not inclusive on both sides.
    fn is_empty(&self) -> bool {
        let (Some((lo, lo_strict)), Some((hi, hi_strict))) = (&self.lo, &self.hi) else {
            return false;
        };
        match lo.value().cmp(hi.value()) {
            Ordering::Greater => true,
            Ordering::Equal => {
                *lo_strict || *hi_strict || self.excluded.iter().any(|e| e == lo)
            }
            Ordering::Less => false,
        }
    }
}

/// Constraint attached to an unbound variable, in a normalized form usable
/// both for rendering and for the engine's universal-quantifier coverage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VarConstraint {
    /// The variable is bound to this (dereferenced) term.
    Eq(Term),
    /// Suspended disequality between two terms mentioning the variable.
    Pair(Term, Term),
    Lo(Rat, bool),
    Hi(Rat, bool),
    Excl(Rat),
}

#[derive(Clone, Default, Debug)]
struct FreeCell {
    /// Ids into `Store::pairs` for suspended disequalities watching this var.
    watches: Vec<u32>,
    interval: Option<Box<Interval>>,
}

#[derive(Clone, Debug)]
enum Cell {
    Free(FreeCell),
    Bound(Term),
}

#[derive(Clone, Debug)]
struct DiseqPair {
    a: Term,
    b: Term,
    active: bool,
}

enum TrailOp {
    Bind(Var, FreeCell),
    PairPush,
    PairDeactivate(u32),
    Watch(Var),
    SetInterval(Var, Option<Box<Interval>>),
}

/// Rollback point. Captures enough to restore the store exactly.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Mark {
    trail: usize,
    cells: usize,
}

/// Outcome of splitting a disequality goal into alternatives.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DiseqSplit {
    /// Already entailed; nothing to record.
    True,
    /// Unsatisfiable (identical terms).
    False,
    /// One alternative per argument position that can still differ,
    /// enumerated left to right on backtracking.
    Branch(Vec<(Term, Term)>),
}

#[derive(Default)]
pub struct Store {
    cells: Vec<Cell>,
    pairs: Vec<DiseqPair>,
    trail: Vec<TrailOp>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn num_vars(&self) -> usize {
        self.cells.len()
    }

    pub fn alloc(&mut self) -> Var {
        let v = Var(self.cells.len() as u32);
        self.cells.push(Cell::Free(FreeCell::default()));
        v
    }

    /// Allocates `n` consecutive variables and returns the first id, so
    /// clause instantiation is an offset shift.
    pub fn alloc_n(&mut self, n: u32) -> u32 {
        let base = self.cells.len() as u32;
        for _ in 0..n {
            self.cells.push(Cell::Free(FreeCell::default()));
        }
        base
    }

    pub fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            cells: self.cells.len(),
        }
    }

    pub fn undo_to(&mut self, mark: Mark) {
        while self.trail.len() > mark.trail {
            match self.trail.pop().unwrap() {
                TrailOp::Bind(v, cell) => self.cells[v.0 as usize] = Cell::Free(cell),
                TrailOp::PairPush => {
                    self.pairs.pop();
                }
                TrailOp::PairDeactivate(id) => self.pairs[id as usize].active = true,
                TrailOp::Watch(v) => {
                    if let Cell::Free(fc) = &mut self.cells[v.0 as usize] {
                        fc.watches.pop();
                    }
                }
                TrailOp::SetInterval(v, old) => {
                    if let Cell::Free(fc) = &mut self.cells[v.0 as usize] {
                        fc.interval = old;
                    }
                }
            }
        }
        self.cells.truncate(mark.cells);
    }

    pub fn is_bound(&self, v: Var) -> bool {
        matches!(self.cells[v.0 as usize], Cell::Bound(_))
    }

    /// Follows variable chains one step at a time; the result is either a
    /// non-variable term or an unbound variable.
    pub fn deref(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        loop {
            match cur {
                Term::Var(v) => match &self.cells[v.0 as usize] {
                    Cell::Bound(next) => cur = next.clone(),
                    Cell::Free(_) => return cur,
                },
                other => return other,
            }
        }
    }

    /// Deep dereference: rebuilds the term with all bound variables replaced.
    pub fn resolve(&self, t: &Term) -> Term {
        let d = self.deref(t);
        match d {
            Term::Comp(ref c) if c.has_vars => Term::comp(
                c.functor.clone(),
                c.args.iter().map(|a| self.resolve(a)).collect(),
            ),
            other => other,
        }
    }

    pub fn is_ground(&self, t: &Term) -> bool {
        match self.deref(t) {
            Term::Var(_) => false,
            Term::Const(_) | Term::Num(_) => true,
            Term::Comp(c) => !c.has_vars || c.args.iter().all(|a| self.is_ground(a)),
        }
    }

    fn occurs(&self, v: Var, t: &Term) -> bool {
        match self.deref(t) {
            Term::Var(w) => w == v,
            Term::Const(_) | Term::Num(_) => false,
            Term::Comp(c) => c.args.iter().any(|a| self.occurs(v, a)),
        }
    }

    // -- unification --------------------------------------------------------

    /// Unifies two terms. On failure every intermediate change is rolled
    /// back, so the store is exactly as before the call.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.mark();
        if self.unify_inner(a, b) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    fn unify_inner(&mut self, a: &Term, b: &Term) -> bool {
        let da = self.deref(a);
        let db = self.deref(b);
        match (&da, &db) {
            (Term::Var(x), Term::Var(y)) => {
                if x == y {
                    true
                } else if x.0 > y.0 {
                    // Bind the younger variable so low-numbered query
                    // variables survive migrations unbound.
                    self.bind(*x, &db)
                } else {
                    self.bind(*y, &da)
                }
            }
            (Term::Var(x), _) => self.bind(*x, &db),
            (_, Term::Var(y)) => self.bind(*y, &da),
            (Term::Const(s), Term::Const(t)) => s == t,
            (Term::Num(m), Term::Num(n)) => m == n,
            (Term::Comp(c), Term::Comp(d)) => {
                c.functor == d.functor
                    && c.args.len() == d.args.len()
                    && c.args
                        .iter()
                        .zip(d.args.iter())
                        .all(|(x, y)| self.unify_inner(x, y))
            }
            _ => false,
        }
    }

    fn bind(&mut self, v: Var, t: &Term) -> bool {
        debug_assert!(!self.is_bound(v));
        if t.has_vars() && self.occurs(v, t) {
            return false;
        }
        let Cell::Free(fc) = std::mem::replace(&mut self.cells[v.0 as usize], Cell::Bound(t.clone()))
        else {
            unreachable!("bind on bound variable");
        };
        let watches = fc.watches.clone();
        let interval = fc.interval.clone();
        self.trail.push(TrailOp::Bind(v, fc));
        // Enforce the interval against the new value.
        if let Some(iv) = interval {
            match self.deref(t) {
                Term::Num(n) => {
                    if !iv.contains(n.value()) {
                        return false;
                    }
                }
                Term::Var(w) => {
                    if !self.intersect_interval(w, &iv) {
                        return false;
                    }
                }
                _ => return false, // numeric-constrained var bound to non-number
            }
        }
        // Re-check suspended disequalities that watched this variable.
        for id in watches {
            if !self.recheck_pair(id) {
                return false;
            }
        }
        true
    }

    fn recheck_pair(&mut self, id: u32) -> bool {
        if !self.pairs[id as usize].active {
            return true;
        }
        self.pairs[id as usize].active = false;
        self.trail.push(TrailOp::PairDeactivate(id));
        let a = self.pairs[id as usize].a.clone();
        let b = self.pairs[id as usize].b.clone();
        self.suspend_or_decide(&a, &b)
    }

    /// Core dif step: the pair is satisfied (drop), violated (fail), or
    /// suspended again on the unbound variables of its remaining unifier.
    fn suspend_or_decide(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.mark();
        let unifies = self.unify_inner(a, b);
        if !unifies {
            self.undo_to(mark);
            return true; // can never become equal
        }
        let residue = self.trail.len() > mark.trail;
        self.undo_to(mark);
        if !residue {
            return false; // already identical
        }
        let ra = self.resolve(a);
        let rb = self.resolve(b);
        // A plain var-vs-number disequality folds into the interval when
        // the variable carries one.
        if let Some((v, n)) = var_num_pair(&ra, &rb) {
            if self.has_interval(v) {
                return self.exclude_point(v, n);
            }
        }
        let id = self.pairs.len() as u32;
        self.pairs.push(DiseqPair {
            a: ra.clone(),
            b: rb.clone(),
            active: true,
        });
        self.trail.push(TrailOp::PairPush);
        let mut watched = Vec::new();
        let mut watch = |store: &mut Store, v: Var| {
            if watched.contains(&v) {
                return;
            }
            watched.push(v);
            if let Cell::Free(fc) = &mut store.cells[v.0 as usize] {
                fc.watches.push(id);
                store.trail.push(TrailOp::Watch(v));
            }
        };
        let mut vars = Vec::new();
        ra.visit_vars(&mut |v| vars.push(v));
        rb.visit_vars(&mut |v| vars.push(v));
        for v in vars {
            if !self.is_bound(v) {
                watch(self, v);
            }
        }
        true
    }

    // -- disequality --------------------------------------------------------

    /// Splits the goal `a \= b` into its alternatives. Compound pairs with
    /// the same functor and arity become one alternative per argument
    /// position; a ground-different position entails the whole disequality.
    pub fn split_diseq(&self, a: &Term, b: &Term) -> DiseqSplit {
        let da = self.deref(a);
        let db = self.deref(b);
        match (&da, &db) {
            (Term::Var(x), Term::Var(y)) if x == y => DiseqSplit::False,
            (Term::Var(_), _) | (_, Term::Var(_)) => {
                DiseqSplit::Branch(vec![(da.clone(), db.clone())])
            }
            (Term::Const(s), Term::Const(t)) => {
                if s == t {
                    DiseqSplit::False
                } else {
                    DiseqSplit::True
                }
            }
            (Term::Num(m), Term::Num(n)) => {
                if m == n {
                    DiseqSplit::False
                } else {
                    DiseqSplit::True
                }
            }
            (Term::Comp(c), Term::Comp(d)) => {
                if c.functor != d.functor || c.args.len() != d.args.len() {
                    return DiseqSplit::True;
                }
                let mut alts = Vec::new();
                for (x, y) in c.args.iter().zip(d.args.iter()) {
                    match self.split_diseq(x, y) {
                        DiseqSplit::True => return DiseqSplit::True,
                        DiseqSplit::False => {}
                        DiseqSplit::Branch(sub) => alts.extend(sub),
                    }
                }
                if alts.is_empty() {
                    DiseqSplit::False
                } else {
                    DiseqSplit::Branch(alts)
                }
            }
            _ => DiseqSplit::True,
        }
    }

    /// Records `a != b` without branching (dif-style suspension). Fails only
    /// when the two sides are already identical. Rolls itself back on
    /// failure.
    pub fn impose_diseq(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.mark();
        if self.suspend_or_decide(a, b) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    // -- order constraints --------------------------------------------------

    fn has_interval(&self, v: Var) -> bool {
        matches!(&self.cells[v.0 as usize], Cell::Free(fc) if fc.interval.is_some())
    }

    fn set_interval(&mut self, v: Var, new: Option<Box<Interval>>) {
        let Cell::Free(fc) = &mut self.cells[v.0 as usize] else {
            unreachable!("interval on bound variable");
        };
        let old = std::mem::replace(&mut fc.interval, new);
        self.trail.push(TrailOp::SetInterval(v, old));
    }

    fn exclude_point(&mut self, v: Var, n: &Rat) -> bool {
        let Cell::Free(fc) = &self.cells[v.0 as usize] else {
            unreachable!()
        };
        let mut iv = fc.interval.clone().unwrap_or_default();
        if !iv.contains(n.value()) {
            return true; // already outside the domain
        }
        iv.excluded.push(n.clone());
        let empty = iv.is_empty();
        self.set_interval(v, Some(iv));
        !empty
    }

    fn intersect_interval(&mut self, v: Var, other: &Interval) -> bool {
        let Cell::Free(fc) = &self.cells[v.0 as usize] else {
            unreachable!()
        };
        let mut iv = fc.interval.clone().unwrap_or_default();
        if let Some((b, strict)) = &other.lo {
            tighten_lo(&mut iv, b, *strict);
        }
        if let Some((b, strict)) = &other.hi {
            tighten_hi(&mut iv, b, *strict);
        }
        for e in &other.excluded {
            if iv.contains(e.value()) {
                iv.excluded.push(e.clone());
            }
        }
        let empty = iv.is_empty();
        self.set_interval(v, Some(iv));
        if empty {
            return false;
        }
        self.migrate_num_diseqs(v)
    }

    /// Once a variable has an interval, its plain var-vs-number suspensions
    /// move into the excluded-point set.
    fn migrate_num_diseqs(&mut self, v: Var) -> bool {
        let Cell::Free(fc) = &self.cells[v.0 as usize] else {
            unreachable!()
        };
        let watches = fc.watches.clone();
        for id in watches {
            if !self.pairs[id as usize].active {
                continue;
            }
            let a = self.deref(&self.pairs[id as usize].a.clone());
            let b = self.deref(&self.pairs[id as usize].b.clone());
            if let Some((w, n)) = var_num_pair(&a, &b) {
                if w == v {
                    self.pairs[id as usize].active = false;
                    self.trail.push(TrailOp::PairDeactivate(id));
                    let n = n.clone();
                    if !self.exclude_point(v, &n) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Applies an order constraint `t1 op t2` where `op` is one of the
    /// `#`-comparators. At most one side may be an unbound variable; the
    /// other must be a number.
    ///
    /// `Ok(true)` on success, `Ok(false)` on failure (empty domain or false
    /// ground comparison); rolls back on failure.
    pub fn add_order(&mut self, op: CmpOp, t1: &Term, t2: &Term) -> Result<bool, ConstraintError> {
        let a = self.deref(t1);
        let b = self.deref(t2);
        match (&a, &b) {
            (Term::Num(m), Term::Num(n)) => Ok(compare(op, m.value(), n.value())),
            (Term::Var(v), Term::Num(n)) => self.constrain_var(*v, op, n),
            (Term::Num(n), Term::Var(v)) => self.constrain_var(*v, flip(op), n),
            (Term::Var(_), Term::Var(_)) => Err(ConstraintError::Instantiation(
                "order constraint between two unbound variables".to_string(),
            )),
            _ => Err(ConstraintError::Type(
                "order constraint on a non-numeric term".to_string(),
            )),
        }
    }

    fn constrain_var(&mut self, v: Var, op: CmpOp, n: &Rat) -> Result<bool, ConstraintError> {
        let mark = self.mark();
        let mut restriction = Interval::default();
        match op {
            CmpOp::CLt | CmpOp::Lt => restriction.hi = Some((n.clone(), true)),
            CmpOp::CLe | CmpOp::Le => restriction.hi = Some((n.clone(), false)),
            CmpOp::CGt | CmpOp::Gt => restriction.lo = Some((n.clone(), true)),
            CmpOp::CGe | CmpOp::Ge => restriction.lo = Some((n.clone(), false)),
            _ => unreachable!("not an order constraint"),
        }
        if self.intersect_interval(v, &restriction) {
            Ok(true)
        } else {
            self.undo_to(mark);
            Ok(false)
        }
    }

    // -- arithmetic ---------------------------------------------------------

    /// Evaluates a ground arithmetic expression over `+ - * //`.
    pub fn eval_arith(&self, t: &Term) -> Result<Rat, ConstraintError> {
        let d = self.deref(t);
        match &d {
            Term::Num(n) => Ok(n.clone()),
            Term::Var(_) => Err(ConstraintError::Instantiation(
                "unbound variable in arithmetic expression".to_string(),
            )),
            Term::Const(s) => Err(ConstraintError::Type(format!(
                "constant `{s}` in arithmetic expression"
            ))),
            Term::Comp(c) => {
                let op = c.functor.as_str();
                if c.args.len() == 1 && op == "-" {
                    let x = self.eval_arith(&c.args[0])?;
                    return Ok(Rat::new(-x.value().clone()));
                }
                if c.args.len() != 2 {
                    return Err(ConstraintError::Type(format!(
                        "unknown arithmetic function `{op}/{}`",
                        c.args.len()
                    )));
                }
                let x = self.eval_arith(&c.args[0])?;
                let y = self.eval_arith(&c.args[1])?;
                match op {
                    "+" => Ok(Rat::new(x.value() + y.value())),
                    "-" => Ok(Rat::new(x.value() - y.value())),
                    "*" => Ok(Rat::new(x.value() * y.value())),
                    "//" => {
                        if !x.is_integer() || !y.is_integer() {
                            return Err(ConstraintError::Type(
                                "`//` requires integer operands".to_string(),
                            ));
                        }
                        if y.value().numer() == &num::BigInt::from(0) {
                            return Err(ConstraintError::Type("division by zero".to_string()));
                        }
                        Ok(Rat::new(BigRational::from_integer(
                            x.value().to_integer() / y.value().to_integer(),
                        )))
                    }
                    other => Err(ConstraintError::Type(format!(
                        "unknown arithmetic function `{other}/2`"
                    ))),
                }
            }
        }
    }

    // -- entailment ---------------------------------------------------------

    /// True iff unifying the two terms could succeed; leaves no trace.
    pub fn unifiable(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.mark();
        let ok = self.unify_inner(a, b);
        self.undo_to(mark);
        ok
    }

    /// Unifies two argument vectors pairwise; rolls back entirely on failure.
    pub fn unify_seq(&mut self, a: &[Term], b: &[Term]) -> bool {
        let mark = self.mark();
        if a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| self.unify_inner(x, y)) {
            true
        } else {
            self.undo_to(mark);
            false
        }
    }

    /// True iff the two argument vectors could unify; leaves no trace.
    pub fn unifiable_seq(&mut self, a: &[Term], b: &[Term]) -> bool {
        let mark = self.mark();
        let ok =
            a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| self.unify_inner(x, y));
        self.undo_to(mark);
        ok
    }

    /// True iff both terms dereference to the identical term.
    pub fn identical(&self, a: &Term, b: &Term) -> bool {
        let da = self.deref(a);
        let db = self.deref(b);
        match (&da, &db) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::Const(s), Term::Const(t)) => s == t,
            (Term::Num(m), Term::Num(n)) => m == n,
            (Term::Comp(c), Term::Comp(d)) => {
                c.functor == d.functor
                    && c.args.len() == d.args.len()
                    && c.args
                        .iter()
                        .zip(d.args.iter())
                        .all(|(x, y)| self.identical(x, y))
            }
            _ => false,
        }
    }

    /// True iff the constraint is already satisfied in the current store,
    /// without modifying it. Non-ground comparisons report `false` rather
    /// than guessing.
    pub fn entails_ground(&mut self, op: CmpOp, a: &Term, b: &Term) -> bool {
        match op {
            CmpOp::Eq => self.identical(a, b),
            CmpOp::Neq => !self.unifiable(a, b),
            CmpOp::Is => match (self.deref(a), self.eval_arith(b)) {
                (Term::Num(m), Ok(n)) => m == n,
                _ => false,
            },
            _ => {
                let (Ok(x), Ok(y)) = (self.eval_arith(a), self.eval_arith(b)) else {
                    return false;
                };
                compare(op, x.value(), y.value())
            }
        }
    }

    // -- introspection ------------------------------------------------------

    /// All constraints currently attached to `v`, in a stable order:
    /// binding, then suspended pairs (creation order), then interval bounds
    /// and excluded points.
    pub fn constraints_of(&self, v: Var) -> Vec<VarConstraint> {
        match &self.cells[v.0 as usize] {
            Cell::Bound(t) => vec![VarConstraint::Eq(self.resolve(t))],
            Cell::Free(fc) => {
                let mut out = Vec::new();
                let mut seen = Vec::new();
                for &id in &fc.watches {
                    if seen.contains(&id) || !self.pairs[id as usize].active {
                        continue;
                    }
                    seen.push(id);
                    let p = &self.pairs[id as usize];
                    out.push(VarConstraint::Pair(self.resolve(&p.a), self.resolve(&p.b)));
                }
                if let Some(iv) = &fc.interval {
                    if let Some((b, strict)) = &iv.lo {
                        out.push(VarConstraint::Lo(b.clone(), *strict));
                    }
                    if let Some((b, strict)) = &iv.hi {
                        out.push(VarConstraint::Hi(b.clone(), *strict));
                    }
                    for e in &iv.excluded {
                        out.push(VarConstraint::Excl(e.clone()));
                    }
                }
                out
            }
        }
    }

    /// Count of active suspended pairs plus interval shape for `v`; used to
    /// detect whether solving a goal added constraints to a quantified var.
    pub fn constraint_fingerprint(&self, v: Var) -> usize {
        self.constraints_of(v).len()
    }
}

fn var_num_pair<'t>(a: &'t Term, b: &'t Term) -> Option<(Var, &'t Rat)> {
    match (a, b) {
        (Term::Var(v), Term::Num(n)) => Some((*v, n)),
        (Term::Num(n), Term::Var(v)) => Some((*v, n)),
        _ => None,
    }
}

fn tighten_lo(iv: &mut Interval, b: &Rat, strict: bool) {
    let replace = match &iv.lo {
        None => true,
        Some((cur, cur_strict)) => match b.value().cmp(cur.value()) {
            Ordering::Greater => true,
            Ordering::Equal => strict && !cur_strict,
            Ordering::Less => false,
        },
    };
    if replace {
        iv.lo = Some((b.clone(), strict));
    }
}

fn tighten_hi(iv: &mut Interval, b: &Rat, strict: bool) {
    let replace = match &iv.hi {
        None => true,
        Some((cur, cur_strict)) => match b.value().cmp(cur.value()) {
            Ordering::Less => true,
            Ordering::Equal => strict && !cur_strict,
            Ordering::Greater => false,
        },
    };
    if replace {
        iv.hi = Some((b.clone(), strict));
    }
}

pub fn compare(op: CmpOp, x: &BigRational, y: &BigRational) -> bool {
    match op {
        CmpOp::CLt | CmpOp::Lt => x < y,
        CmpOp::CGt | CmpOp::Gt => x > y,
        CmpOp::CLe | CmpOp::Le => x <= y,
        CmpOp::CGe | CmpOp::Ge => x >= y,
        CmpOp::Eq | CmpOp::Is => x == y,
        CmpOp::Neq => x != y,
    }
}

fn flip(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::CLt => CmpOp::CGt,
        CmpOp::CGt => CmpOp::CLt,
        CmpOp::CLe => CmpOp::CGe,
        CmpOp::CGe => CmpOp::CLe,
        CmpOp::Lt => CmpOp::Gt,
        CmpOp::Gt => CmpOp::Lt,
        CmpOp::Le => CmpOp::Ge,
        CmpOp::Ge => CmpOp::Le,
        other => other,
    }
}

/// Negation of a basic constraint as a finite disjunction whose union of
/// solution sets is the complement. Every disjunct is a goal conjunction;
/// all cases are singleton disjunctions, and `not (X is E)` defers the
/// evaluation of `E` to runtime through a fresh intermediate variable.
pub fn negate_constraint(
    op: CmpOp,
    lhs: &Term,
    rhs: &Term,
    fresh: &mut impl FnMut() -> Var,
) -> Vec<Vec<(CmpOp, Term, Term)>> {
    let l = lhs.clone();
    let r = rhs.clone();
    match op {
        CmpOp::Eq => vec![vec![(CmpOp::Neq, l, r)]],
        CmpOp::Neq => vec![vec![(CmpOp::Eq, l, r)]],
        CmpOp::CLt => vec![vec![(CmpOp::CGe, l, r)]],
        CmpOp::CGt => vec![vec![(CmpOp::CLe, l, r)]],
        CmpOp::CLe => vec![vec![(CmpOp::CGt, l, r)]],
        CmpOp::CGe => vec![vec![(CmpOp::CLt, l, r)]],
        CmpOp::Lt => vec![vec![(CmpOp::Ge, l, r)]],
        CmpOp::Gt => vec![vec![(CmpOp::Le, l, r)]],
        CmpOp::Le => vec![vec![(CmpOp::Gt, l, r)]],
        CmpOp::Ge => vec![vec![(CmpOp::Lt, l, r)]],
        CmpOp::Is => {
            let tmp = Term::Var(fresh());
            vec![vec![(CmpOp::Is, tmp.clone(), r), (CmpOp::Neq, l, tmp)]]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;

    fn num(n: i64) -> Term {
        Term::int(n)
    }

    #[test]
    fn unifies_compound_terms() {
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        let y = Term::Var(s.alloc());
        let a = Term::comp("f", vec![x.clone(), Term::constant("b")]);
        let b = Term::comp("f", vec![Term::constant("a"), y.clone()]);
        assert!(s.unify(&a, &b));
        assert_eq!(s.deref(&x), Term::constant("a"));
        assert_eq!(s.deref(&y), Term::constant("b"));
    }

    #[test]
    fn diseq_blocks_binding() {
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        assert!(s.impose_diseq(&x, &num(1)));
        assert!(!s.unify(&x, &num(1)));
        assert!(s.unify(&x, &num(2)));
    }

    #[test]
    fn excluded_points_block_binding() {
        let mut s = Store::new();
        let b = Term::Var(s.alloc());
        for n in 1..=5 {
            assert!(s.impose_diseq(&b, &num(n)));
        }
        assert!(!s.unify(&b, &num(3)));
        assert!(s.unify(&b, &num(6)));
    }

    #[test]
    fn occurs_check_fires() {
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        let fx = Term::comp("f", vec![x.clone()]);
        assert!(!s.unify(&x, &fx));
    }

    #[test]
    fn ground_diseq_splits() {
        let s = Store::new();
        assert_eq!(
            s.split_diseq(&Term::constant("a"), &Term::constant("b")),
            DiseqSplit::True
        );
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        assert_eq!(s.split_diseq(&x, &x), DiseqSplit::False);
    }

    #[test]
    fn compound_diseq_has_one_alternative_per_position() {
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        let y = Term::Var(s.alloc());
        let a = Term::comp("f", vec![x.clone(), num(1)]);
        let b = Term::comp("f", vec![num(2), y.clone()]);
        let DiseqSplit::Branch(alts) = s.split_diseq(&a, &b) else {
            panic!("expected branch");
        };
        assert_eq!(alts, vec![(x.clone(), num(2)), (num(1), y.clone())]);
    }

    /// Brute force over ground instantiations: the union of the two
    /// alternative stores for `f(X,1) \= f(2,Y)` equals the complement of
    /// the unifier on a small domain.
    #[test]
    fn compound_diseq_alternatives_cover_solution_set() {
        let domain: Vec<i64> = vec![1, 2, 3];
        let mut expected = Vec::new();
        for &xv in &domain {
            for &yv in &domain {
                // f(x, 1) != f(2, y)  <=>  x != 2 or y != 1
                if xv != 2 || yv != 1 {
                    expected.push((xv, yv));
                }
            }
        }
        let mut got = Vec::new();
        for &xv in &domain {
            for &yv in &domain {
                let mut s = Store::new();
                let x = Term::Var(s.alloc());
                let y = Term::Var(s.alloc());
                let a = Term::comp("f", vec![x.clone(), num(1)]);
                let b = Term::comp("f", vec![num(2), y.clone()]);
                let DiseqSplit::Branch(alts) = s.split_diseq(&a, &b) else {
                    panic!()
                };
                let mut sat = false;
                for (l, r) in &alts {
                    let mark = s.mark();
                    if s.impose_diseq(l, r) && s.unify(&x, &num(xv)) && s.unify(&y, &num(yv)) {
                        sat = true;
                    }
                    s.undo_to(mark);
                }
                if sat {
                    got.push((xv, yv));
                }
            }
        }
        got.sort_unstable();
        got.dedup();
        expected.sort_unstable();
        assert_eq!(got, expected);
    }

    #[test]
    fn order_constraints_intersect() {
        let mut s = Store::new();
        let x = s.alloc();
        let xt = Term::Var(x);
        assert_eq!(s.add_order(CmpOp::CGt, &xt, &num(5)), Ok(true));
        let cs = s.constraints_of(x);
        assert!(matches!(&cs[0], VarConstraint::Lo(b, true) if b.value() == Rat::from_i64(5).value()));
        // X #> 5 then X #< 1 is an empty interval.
        assert_eq!(s.add_order(CmpOp::CLt, &xt, &num(1)), Ok(false));
        // Rolled back: X #< 9 still fine.
        assert_eq!(s.add_order(CmpOp::CLt, &xt, &num(9)), Ok(true));
        // Binding respects the interval.
        assert!(!s.unify(&xt, &num(5)));
        assert!(s.unify(&xt, &num(7)));
    }

    #[test]
    fn ground_order_comparison() {
        let mut s = Store::new();
        assert_eq!(s.add_order(CmpOp::CLe, &num(3), &num(3)), Ok(true));
        assert_eq!(s.add_order(CmpOp::CLt, &num(3), &num(3)), Ok(false));
        let x = Term::Var(s.alloc());
        let y = Term::Var(s.alloc());
        assert!(s.add_order(CmpOp::CLt, &x, &y).is_err());
    }

    #[test]
    fn interval_plus_diseq_degenerates() {
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        assert_eq!(s.add_order(CmpOp::CGe, &x, &num(3)), Ok(true));
        assert_eq!(s.add_order(CmpOp::CLe, &x, &num(3)), Ok(true));
        // [3,3] minus {3} is empty.
        assert!(!s.impose_diseq(&x, &num(3)));
    }

    #[test]
    fn eval_arith_examples() {
        let s = Store::new();
        let e = Term::comp("-", vec![num(4), num(1)]);
        assert_eq!(s.eval_arith(&e).unwrap(), Rat::from_i64(3));
        let e = Term::comp("+", vec![num(2), num(3)]);
        assert_eq!(s.eval_arith(&e).unwrap(), Rat::from_i64(5));
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        let e = Term::comp("+", vec![x, num(1)]);
        assert!(matches!(
            s.eval_arith(&e),
            Err(ConstraintError::Instantiation(_))
        ));
        let e = Term::comp("//", vec![num(7), num(2)]);
        assert_eq!(s.eval_arith(&e).unwrap(), Rat::from_i64(3));
    }

    #[test]
    fn entailment_examples() {
        let mut s = Store::new();
        assert!(s.entails_ground(CmpOp::Neq, &Term::constant("c"), &Term::constant("b")));
        assert!(!s.entails_ground(CmpOp::Neq, &Term::constant("b"), &Term::constant("b")));
        let x = Term::Var(s.alloc());
        // Not entailed: X could still be 1.
        assert!(!s.entails_ground(CmpOp::Neq, &x, &num(1)));
    }

    #[test]
    fn unify_on_identical_ground_term_is_identity() {
        let mut s = Store::new();
        let t = Term::comp("f", vec![num(1), Term::list(vec![num(2), num(3)])]);
        let mark = s.mark();
        assert!(s.unify(&t, &t));
        assert_eq!(s.mark(), mark);
    }

    #[test]
    fn negation_table() {
        let mut fresh_calls = 0;
        let mut fresh = || {
            fresh_calls += 1;
            Var(100 + fresh_calls)
        };
        let x = Term::Var(Var(0));
        let five = num(5);
        let neg = negate_constraint(CmpOp::CGt, &x, &five, &mut fresh);
        assert_eq!(neg, vec![vec![(CmpOp::CLe, x.clone(), five.clone())]]);
        let neg = negate_constraint(CmpOp::Eq, &x, &num(1), &mut fresh);
        assert_eq!(neg, vec![vec![(CmpOp::Neq, x.clone(), num(1))]]);
        let neg = negate_constraint(CmpOp::Neq, &x, &Term::constant("a"), &mut fresh);
        assert_eq!(neg, vec![vec![(CmpOp::Eq, x.clone(), Term::constant("a"))]]);
    }

    /// Negating twice yields a constraint with the same solution set,
    /// checked by ground enumeration on 0..=10.
    #[test]
    fn negation_is_involutive_on_solution_sets() {
        let ops = [
            CmpOp::Eq,
            CmpOp::Neq,
            CmpOp::CLt,
            CmpOp::CGt,
            CmpOp::CLe,
            CmpOp::CGe,
        ];
        for &op in &ops {
            for rhs in 0..=10i64 {
                let sat =
                    |op: CmpOp, v: i64| compare(op, Rat::from_i64(v).value(), Rat::from_i64(rhs).value());
                let x = Term::Var(Var(0));
                let mut fresh = || Var(1);
                let neg = negate_constraint(op, &x, &num(rhs), &mut fresh);
                let negneg: Vec<_> = neg
                    .iter()
                    .flat_map(|conj| {
                        let (nop, _, nrhs) = &conj[0];
                        negate_constraint(*nop, &x, nrhs, &mut || Var(2))
                    })
                    .collect();
                for v in 0..=10i64 {
                    let orig = sat(op, v);
                    let twice = negneg.iter().any(|conj| {
                        conj.iter().all(|(o, _, r)| {
                            let Term::Num(n) = r else { unreachable!() };
                            compare(*o, Rat::from_i64(v).value(), n.value())
                        })
                    });
                    assert_eq!(orig, twice, "op {op:?} rhs {rhs} v {v}");
                }
            }
        }
    }

    #[test]
    fn backtrack_restores_store() {
        let mut s = Store::new();
        let x = Term::Var(s.alloc());
        let y = Term::Var(s.alloc());
        let mark = s.mark();
        assert!(s.impose_diseq(&x, &y));
        assert!(s.unify(&y, &num(3)));
        assert!(s.add_order(CmpOp::CGt, &x, &num(0)).unwrap());
        s.undo_to(mark);
        assert!(s.constraints_of(Var(0)).is_empty());
        assert!(s.constraints_of(Var(1)).is_empty());
        assert!(s.unify(&x, &num(3)));
    }
}
