//! Dynamic consistency checking: before a literal joins the tentative
//! model, the denials it occurs in are probed. A rule fires (and the branch
//! fails) iff every residual goal already holds against the model.
//!
//! Only fully instantiated candidates are checked, so no degree of freedom
//! of the tentative model is lost; everything else is caught later by
//! `nmr_check`. Residual user literals must unify with a model entry on a
//! scratch copy — bindings stay local to the check and the model is never
//! instantiated. `is` and `=` residuals evaluate with those check-local
//! bindings; pure comparisons must already be entailed.

use crate::syntax::{CmpOp, Term, Var};
use crate::transform::{PredRef, RtGoal};

use super::{Engine, Entry};

impl<'p> Engine<'p> {
    /// True iff adding the candidate literal would violate a denial.
    pub(crate) fn dcc_violation(&mut self, naf: bool, pred: &PredRef, args: &[Term]) -> bool {
        if !self.dcc_enabled {
            return false;
        }
        let PredRef::Known(id) = pred else {
            return false;
        };
        let Some(rule_ids) = self.prog.dcc_index.get(&(*id, naf)) else {
            return false;
        };
        if !args.iter().all(|a| self.store.is_ground(a)) {
            return false;
        }
        let rule_ids = rule_ids.clone();
        let prog = self.prog;
        'rules: for rid in rule_ids {
            let rule = &prog.rt_dcc[rid as usize];
            // A rule can only fire when every residual user literal has at
            // least one model entry of the right polarity.
            for g in &rule.residual {
                if let RtGoal::Lit { naf, pred, .. } = g {
                    let occupied = self
                        .model_index
                        .get(&(pred.clone(), *naf))
                        .is_some_and(|v| !v.is_empty());
                    if !occupied {
                        continue 'rules;
                    }
                }
            }
            let mark = self.mark();
            let base = self.store.alloc_n(rule.nvars);
            let mut shift = |v: Var| Term::Var(Var(v.0 + base));
            let trigger: Vec<Term> = rule
                .trigger_args
                .iter()
                .map(|t| t.map_vars(&mut shift))
                .collect();
            let mut ok = args.len() == trigger.len();
            if ok {
                for (a, t) in args.iter().zip(trigger.iter()) {
                    if !self.store.unify(a, t) {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let residual: Vec<RtGoal> =
                    rule.residual.iter().map(|g| g.instantiate(base)).collect();
                if self.residual_holds(&residual, 0) {
                    self.undo_to(mark);
                    self.stats.dcc_detections += 1;
                    return true;
                }
            }
            self.undo_to(mark);
        }
        false
    }

    /// All residual goals hold simultaneously, with bindings threaded
    /// through model-entry choices on backtracking. Every binding made here
    /// is unwound by the caller's mark.
    fn residual_holds(&mut self, goals: &[RtGoal], i: usize) -> bool {
        let Some(goal) = goals.get(i) else {
            return true;
        };
        match goal {
            RtGoal::Lit { naf, pred, args } => {
                let Some(ids) = self.model_index.get(&(pred.clone(), *naf)) else {
                    return false;
                };
                let ids = ids.clone();
                for id in ids {
                    let Entry::Lit { args: e_args, .. } = &self.model[id as usize] else {
                        continue;
                    };
                    let e_args = e_args.clone();
                    let mark = self.mark();
                    if self.store.unify_seq(args, &e_args) && self.residual_holds(goals, i + 1) {
                        return true;
                    }
                    self.undo_to(mark);
                }
                false
            }
            RtGoal::Cmp(op, a, b) => match op {
                CmpOp::Is => {
                    let Ok(n) = self.store.eval_arith(b) else {
                        return false;
                    };
                    let mark = self.mark();
                    if self.store.unify(a, &Term::Num(n)) && self.residual_holds(goals, i + 1) {
                        return true;
                    }
                    self.undo_to(mark);
                    false
                }
                CmpOp::Eq => {
                    let mark = self.mark();
                    if self.store.unify(a, b) && self.residual_holds(goals, i + 1) {
                        return true;
                    }
                    self.undo_to(mark);
                    false
                }
                _ => self.store.entails_ground(*op, a, b) && self.residual_holds(goals, i + 1),
            },
            RtGoal::Forall(..) => false,
        }
    }
}
