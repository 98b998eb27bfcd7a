//! Evaluation of `forall(V, G)`: G must hold for every value of V.
//!
//! The goal is solved with a fresh copy of V (other variables stay shared,
//! so their constraints escape as usual). If a solution leaves the copy
//! unconstrained, it covers the whole current region. Otherwise the solution
//! covers exactly the conjunction `d_1 .. d_m` of constraints it put on the
//! copy, and the remainder splits into the disjoint regions
//!
//! ```text
//! d_1 .. d_{i-1}, not d_i        for i = 1..m
//! ```
//!
//! each of which is verified recursively with the complement constraint
//! imposed up front. An imposition that fails denotes an empty region, which
//! is covered vacuously. The quantifier succeeds when the union of verified
//! regions is the whole domain; solutions found along the way keep their
//! side effects on all other variables.

use crate::constraints::VarConstraint;
use crate::syntax::{CmpOp, Rat, Term, Var};
use crate::transform::RtGoal;

use super::{Engine, Flow};

fn rename_term(t: &Term, from: Var, to: Var) -> Term {
    t.map_vars(&mut |v| Term::Var(if v == from { to } else { v }))
}

/// A variable constraint taken positively or negatively; always expressed
/// over the quantified variable of the level that produced it.
#[derive(Clone)]
struct Region {
    positive: bool,
    con: VarConstraint,
}

impl<'p> Engine<'p> {
    /// The quantifier commits to its first full coverage: alternative ways
    /// of covering the same domain would re-derive the same model, so its
    /// internal choice points are cut once `k` has exhausted. Derivations
    /// *inside* a coverage still backtrack freely while it is being built.
    pub(crate) fn solve_forall(
        &mut self,
        var: Var,
        body: &RtGoal,
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        self.forall_seq += 1;
        let token = self.forall_seq;
        let flow = self.forall_cover(var, body, &[], &mut |eng| match k(eng) {
            std::ops::ControlFlow::Continue(()) => {
                std::ops::ControlFlow::Break(super::Stop::ForallCut(token))
            }
            brk => brk,
        });
        match flow {
            std::ops::ControlFlow::Break(super::Stop::ForallCut(t)) if t == token => {
                std::ops::ControlFlow::Continue(())
            }
            other => other,
        }
    }

    /// Verifies `body` over the region of `template` delimited by `pre`.
    fn forall_cover(
        &mut self,
        template: Var,
        body: &RtGoal,
        pre: &[Region],
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        let mark = self.mark();
        let v = self.store.alloc();
        let body2 = body.rename_var(template, v);
        for region in pre {
            if !self.impose_region(region, template, v) {
                // Empty region: covered vacuously.
                self.undo_to(mark);
                return k(self);
            }
        }
        // The imposed region re-expressed over the fresh copy; deltas found
        // after solving are relative to this snapshot.
        let snapshot = self.store.constraints_of(v);
        let flow = self.solve_goal(&body2, &mut |eng| {
            let current = eng.store.constraints_of(v);
            let delta: Vec<VarConstraint> = current
                .into_iter()
                .filter(|c| !snapshot.contains(c))
                .collect();
            if delta.is_empty() {
                // This solution did not restrict the variable further: the
                // whole region is covered by it.
                k(eng)
            } else {
                let base: Vec<Region> = snapshot
                    .iter()
                    .map(|c| Region {
                        positive: true,
                        con: c.clone(),
                    })
                    .collect();
                eng.cover_rest(v, &body2, &base, &delta, 0, k)
            }
        });
        self.undo_to(mark);
        flow
    }

    /// Verifies the regions complementary to `delta[i..]` of the area
    /// `base ∧ delta[..i]`, then hands over to `k`.
    fn cover_rest(
        &mut self,
        v: Var,
        body: &RtGoal,
        base: &[Region],
        delta: &[VarConstraint],
        i: usize,
        k: &mut dyn FnMut(&mut Self) -> Flow,
    ) -> Flow {
        if i == delta.len() {
            return k(self);
        }
        let mut pre: Vec<Region> = base.to_vec();
        pre.extend(delta[..i].iter().map(|c| Region {
            positive: true,
            con: c.clone(),
        }));
        pre.push(Region {
            positive: false,
            con: delta[i].clone(),
        });
        self.forall_cover(v, body, &pre, &mut |eng| {
            eng.cover_rest(v, body, base, delta, i + 1, k)
        })
    }

    /// Imposes one region constraint on the fresh copy `v` (the constraint
    /// is expressed over `template`). False means the region is empty.
    fn impose_region(&mut self, region: &Region, template: Var, v: Var) -> bool {
        let vt = Term::Var(v);
        match (&region.con, region.positive) {
            (VarConstraint::Eq(t), true) => {
                let t = rename_term(t, template, v);
                self.store.unify(&vt, &t)
            }
            (VarConstraint::Eq(t), false) => {
                let t = rename_term(t, template, v);
                self.store.impose_diseq(&vt, &t)
            }
            (VarConstraint::Pair(a, b), true) => {
                let (a, b) = (rename_term(a, template, v), rename_term(b, template, v));
                self.store.impose_diseq(&a, &b)
            }
            (VarConstraint::Pair(a, b), false) => {
                let (a, b) = (rename_term(a, template, v), rename_term(b, template, v));
                self.store.unify(&a, &b)
            }
            (VarConstraint::Lo(bound, strict), positive) => {
                self.order_region(v, positive, true, bound, *strict)
            }
            (VarConstraint::Hi(bound, strict), positive) => {
                self.order_region(v, positive, false, bound, *strict)
            }
            (VarConstraint::Excl(n), true) => self.store.impose_diseq(&vt, &Term::Num(n.clone())),
            (VarConstraint::Excl(n), false) => self.store.unify(&vt, &Term::Num(n.clone())),
        }
    }

    fn order_region(&mut self, v: Var, positive: bool, lo: bool, bound: &Rat, strict: bool) -> bool {
        let op = match (lo, strict, positive) {
            (true, true, true) => CmpOp::CGt,    // v > b
            (true, false, true) => CmpOp::CGe,   // v >= b
            (true, true, false) => CmpOp::CLe,   // not (v > b)
            (true, false, false) => CmpOp::CLt,  // not (v >= b)
            (false, true, true) => CmpOp::CLt,   // v < b
            (false, false, true) => CmpOp::CLe,  // v =< b
            (false, true, false) => CmpOp::CGe,  // not (v < b)
            (false, false, false) => CmpOp::CGt, // not (v =< b)
        };
        match self
            .store
            .add_order(op, &Term::Var(v), &Term::Num(bound.clone()))
        {
            Ok(ok) => ok,
            Err(_) => false,
        }
    }
}
