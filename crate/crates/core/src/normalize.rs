//! Big-step cut normalization.
//!
//! Three mutually recursive functions: [`Normalizer::normalize`] (N),
//! [`Normalizer::eval_cut`] (E) and [`Normalizer::proof_subst`] (S). All
//! three take and return terms in normal form; a `Cut` is only built when it
//! cannot be reduced. Rebuilt nodes go through the skipping constructors, so
//! inferences whose auxiliary hypotheses became unused disappear.

use std::fmt;

use thiserror::Error;

use crate::formula::{is_atomic, is_quantifier_free, view, FormulaView};
use crate::lkt::{
    avoid_siblings, fresh_hyp_in, rename_eigen, rename_hyp_unchecked, skip_cut, subst_expr_in_proof, Hyp,
    Polarity, Proof, ProofKind, Scope,
};
use crate::term::{beta_normalize, fresh_variant, instantiate, Expr, Substitution};

/// Which cuts are eliminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Policy {
    #[default]
    Full,
    /// Cuts on atomic formulas are left in place.
    UntilAtomic,
    /// Cuts on quantifier-free formulas are left in place.
    UntilQuantifierFree,
}

impl Policy {
    pub fn keeps(self, formula: &Expr) -> bool {
        match self {
            Policy::Full => false,
            Policy::UntilAtomic => is_atomic(formula),
            Policy::UntilQuantifierFree => is_quantifier_free(formula),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Policy::Full => "full",
            Policy::UntilAtomic => "until-atomic",
            Policy::UntilQuantifierFree => "until-qfree",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Policy, String> {
        match s {
            "full" => Ok(Policy::Full),
            "until-atomic" => Ok(Policy::UntilAtomic),
            "until-qfree" => Ok(Policy::UntilQuantifierFree),
            _ => Err(format!("unknown policy `{s}` (expected full, until-atomic or until-qfree)")),
        }
    }
}

/// Step counter; every call of N, E and S consumes one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    initial: Option<u64>,
    used: u64,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget { initial: None, used: 0 }
    }

    pub fn new(steps: u64) -> Budget {
        Budget {
            initial: Some(steps),
            used: 0,
        }
    }

    pub fn initial(&self) -> Option<u64> {
        self.initial
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> Option<u64> {
        self.initial.map(|i| i.saturating_sub(self.used))
    }

    pub fn tick(&mut self) -> Result<(), BudgetExhausted> {
        if let Some(limit) = self.initial {
            if self.used >= limit {
                return Err(BudgetExhausted { steps: self.used });
            }
        }
        self.used += 1;
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Budget {
        Budget::unlimited()
    }
}

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
#[error("normalization step budget exhausted after {steps} steps")]
pub struct BudgetExhausted {
    pub steps: u64,
}

/// Which evaluator clause applies to a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutClause {
    /// The policy keeps cuts on this formula.
    Kept,
    /// The left cut hypothesis is unused.
    WeakenLeft,
    WeakenRight,
    /// The left side is an axiom on the cut hypothesis.
    AxiomLeft,
    AxiomRight,
    Negation,
    Conjunction,
    /// ∨ or →, both encoded with `AndL` on the right of the cut.
    DisjunctionOrImplication,
    Universal,
    Existential,
    /// The cut hypothesis is not main on the left: push the right side in.
    RankLeft,
    RankRight,
    /// Both cut hypotheses are main but no reduction applies.
    Stuck,
}

/// Dispatches a cut to the clause the evaluator would use.
pub fn classify_cut(formula: &Expr, h1: Hyp, p1: &Proof, h2: Hyp, p2: &Proof, policy: Policy) -> CutClause {
    if policy.keeps(formula) {
        return CutClause::Kept;
    }
    if !p1.has_free_hyp(h1) {
        return CutClause::WeakenLeft;
    }
    if !p2.has_free_hyp(h2) {
        return CutClause::WeakenRight;
    }
    if matches!(p1.kind(), ProofKind::Ax { succ, .. } if *succ == h1) {
        return CutClause::AxiomLeft;
    }
    if matches!(p2.kind(), ProofKind::Ax { ante, .. } if *ante == h2) {
        return CutClause::AxiomRight;
    }
    let v = view(formula);
    match (p1.kind(), p2.kind(), v) {
        (ProofKind::NegR { main: m1, .. }, ProofKind::NegL { main: m2, .. }, FormulaView::Not(_))
            if *m1 == h1 && *m2 == h2 =>
        {
            return CutClause::Negation
        }
        (ProofKind::AndR { main: m1, .. }, ProofKind::AndL { main: m2, .. }, FormulaView::And(..))
            if *m1 == h1 && *m2 == h2 =>
        {
            return CutClause::Conjunction
        }
        (ProofKind::AndL { main: m1, .. }, ProofKind::AndR { main: m2, .. }, FormulaView::Or(..) | FormulaView::Imp(..))
            if *m1 == h1 && *m2 == h2 =>
        {
            return CutClause::DisjunctionOrImplication
        }
        (ProofKind::AllR { main: m1, .. }, ProofKind::AllL { main: m2, .. }, FormulaView::All(_))
            if *m1 == h1 && *m2 == h2 =>
        {
            return CutClause::Universal
        }
        (ProofKind::AllL { main: m1, .. }, ProofKind::AllR { main: m2, .. }, FormulaView::Ex(_))
            if *m1 == h1 && *m2 == h2 =>
        {
            return CutClause::Existential
        }
        _ => {}
    }
    if !p1.is_main(h1) {
        CutClause::RankLeft
    } else if !p2.is_main(h2) {
        CutClause::RankRight
    } else {
        CutClause::Stuck
    }
}

/// The evaluator state: policy and budget.
#[derive(Debug, Clone)]
pub struct Normalizer {
    pub policy: Policy,
    pub budget: Budget,
}

type Res = Result<Proof, BudgetExhausted>;

impl Normalizer {
    pub fn new(policy: Policy, budget: Budget) -> Normalizer {
        Normalizer { policy, budget }
    }

    /// N: normal form of an arbitrary term.
    pub fn normalize(&mut self, p: &Proof) -> Res {
        self.budget.tick()?;
        if p.cut_count() == 0 {
            return Ok(p.clone());
        }
        if let ProofKind::Cut {
            formula,
            left_hyp,
            left,
            right_hyp,
            right,
        } = p.kind()
        {
            let l = self.normalize(left)?;
            let r = self.normalize(right)?;
            return self.eval_cut(formula, *left_hyp, &l, *right_hyp, &r);
        }
        let mut scopes = p.scopes();
        for sc in &mut scopes {
            sc.body = self.normalize(&sc.body)?;
        }
        Ok(p.with_scopes(scopes, true))
    }

    /// E: normal form of `Cut(φ, h1: p1, h2: p2)` for normal `p1`, `p2`.
    pub fn eval_cut(&mut self, formula: &Expr, h1: Hyp, p1: &Proof, h2: Hyp, p2: &Proof) -> Res {
        self.budget.tick()?;
        let formula = if formula.is_beta_normal() {
            formula.clone()
        } else {
            beta_normalize(formula)
        };
        let clause = classify_cut(&formula, h1, p1, h2, p2, self.policy);
        match clause {
            CutClause::Kept | CutClause::Stuck => Ok(skip_cut(formula, h1, p1.clone(), h2, p2.clone())),
            CutClause::WeakenLeft => Ok(p1.clone()),
            CutClause::WeakenRight => Ok(p2.clone()),
            CutClause::AxiomLeft => {
                let ProofKind::Ax { ante, .. } = p1.kind() else { unreachable!() };
                Ok(rename_hyp_unchecked(p2, h2, *ante))
            }
            CutClause::AxiomRight => {
                let ProofKind::Ax { succ, .. } = p2.kind() else { unreachable!() };
                Ok(rename_hyp_unchecked(p1, h1, *succ))
            }
            CutClause::Negation => {
                let FormulaView::Not(inner) = view(&formula) else { unreachable!() };
                let (ProofKind::NegR { aux: a, sub: s1, .. }, ProofKind::NegL { aux: b, sub: s2, .. }) =
                    (p1.kind(), p2.kind())
                else {
                    unreachable!()
                };
                let s1 = self.proof_subst(s1, &formula, h1, h2, p2)?;
                let s2 = self.proof_subst(s2, &formula, h2, h1, p1)?;
                self.eval_cut(inner, *b, &s2, *a, &s1)
            }
            CutClause::Conjunction => {
                let FormulaView::And(phi, psi) = view(&formula) else { unreachable!() };
                let (
                    ProofKind::AndR {
                        aux1: a,
                        left: pa,
                        aux2: b,
                        right: pb,
                        ..
                    },
                    ProofKind::AndL {
                        aux1: c,
                        aux2: d,
                        sub: p3,
                        ..
                    },
                ) = (p1.kind(), p2.kind())
                else {
                    unreachable!()
                };
                let pa = self.proof_subst(pa, &formula, h1, h2, p2)?;
                let pb = self.proof_subst(pb, &formula, h1, h2, p2)?;
                let p3 = self.proof_subst(p3, &formula, h2, h1, p1)?;
                let p3 = self.proof_subst(&p3, phi, *c, *a, &pa)?;
                self.eval_cut(psi, *b, &pb, *d, &p3)
            }
            CutClause::DisjunctionOrImplication => {
                let (FormulaView::Or(phi, psi) | FormulaView::Imp(phi, psi)) = view(&formula) else {
                    unreachable!()
                };
                let (
                    ProofKind::AndL {
                        aux1: a,
                        aux2: b,
                        sub: p1s,
                        ..
                    },
                    ProofKind::AndR {
                        aux1: c,
                        left: pc,
                        aux2: d,
                        right: pd,
                        ..
                    },
                ) = (p1.kind(), p2.kind())
                else {
                    unreachable!()
                };
                let p1s = self.proof_subst(p1s, &formula, h1, h2, p2)?;
                let pc = self.proof_subst(pc, &formula, h2, h1, p1)?;
                let pd = self.proof_subst(pd, &formula, h2, h1, p1)?;
                let x = self.proof_subst(&p1s, psi, *b, *d, &pd)?;
                if a.is_pos() {
                    self.eval_cut(phi, *a, &x, *c, &pc)
                } else {
                    self.eval_cut(phi, *c, &pc, *a, &x)
                }
            }
            CutClause::Universal => {
                let FormulaView::All(pred) = view(&formula) else { unreachable!() };
                let (
                    ProofKind::AllR {
                        eigen, aux: a, sub: s1, ..
                    },
                    ProofKind::AllL {
                        term, aux: b, sub: s2, ..
                    },
                ) = (p1.kind(), p2.kind())
                else {
                    unreachable!()
                };
                let inst_formula = instantiate(pred, term);
                let s1 = instantiate_eigen(s1, eigen, term);
                let s1 = self.proof_subst(&s1, &formula, h1, h2, p2)?;
                let s2 = self.proof_subst(s2, &formula, h2, h1, p1)?;
                self.eval_cut(&inst_formula, *a, &s1, *b, &s2)
            }
            CutClause::Existential => {
                let FormulaView::Ex(pred) = view(&formula) else { unreachable!() };
                let (
                    ProofKind::AllL {
                        term, aux: a, sub: s1, ..
                    },
                    ProofKind::AllR {
                        eigen, aux: b, sub: s2, ..
                    },
                ) = (p1.kind(), p2.kind())
                else {
                    unreachable!()
                };
                let inst_formula = instantiate(pred, term);
                let s1 = self.proof_subst(s1, &formula, h1, h2, p2)?;
                let s2 = instantiate_eigen(s2, eigen, term);
                let s2 = self.proof_subst(&s2, &formula, h2, h1, p1)?;
                self.eval_cut(&inst_formula, *a, &s1, *b, &s2)
            }
            CutClause::RankLeft => self.proof_subst(p1, &formula, h1, h2, p2),
            CutClause::RankRight => self.proof_subst(p2, &formula, h2, h1, p1),
        }
    }

    /// S: replaces the uses of `h` (of type `formula`) in `p` by cuts
    /// against `other`, which proves the opposite side through `h_other`.
    pub fn proof_subst(&mut self, p: &Proof, formula: &Expr, h: Hyp, h_other: Hyp, other: &Proof) -> Res {
        self.budget.tick()?;
        if !p.has_free_hyp(h) {
            return Ok(p.clone());
        }
        match p.kind() {
            ProofKind::Ax { ante, succ } if *ante == h => return Ok(rename_hyp_unchecked(other, h_other, *succ)),
            ProofKind::Ax { ante, succ } if *succ == h => return Ok(rename_hyp_unchecked(other, h_other, *ante)),
            _ => {}
        }
        if p.is_main(h) {
            return match h.polarity() {
                Polarity::Pos => self.eval_cut(formula, h, p, h_other, other),
                Polarity::Neg => self.eval_cut(formula, h_other, other, h, p),
            };
        }
        let other_hyps = other.free_hyps().remove(&h_other);
        let mut scopes = p.scopes();
        for sc in &mut scopes {
            if sc.hyps.contains(&h) || !sc.body.has_free_hyp(h) {
                continue;
            }
            freshen_scope(sc, &other_hyps, other, h);
            sc.body = self.proof_subst(&sc.body, formula, h, h_other, other)?;
        }
        if let ProofKind::Cut { formula: cf, .. } = p.kind() {
            let (l, r) = (&scopes[0], &scopes[1]);
            return self.eval_cut(cf, l.hyps[0], &l.body, r.hyps[0], &r.body);
        }
        Ok(p.with_scopes(scopes, true))
    }
}

/// `p[y\t]`
fn instantiate_eigen(p: &Proof, eigen: &crate::term::Var, t: &Expr) -> Proof {
    let mut s = Substitution::new();
    s.insert_unchecked(eigen.clone(), t.clone());
    subst_expr_in_proof(p, &s)
}

/// Renames the binders of `sc` that would capture free names of `other`.
fn freshen_scope(sc: &mut Scope, other_hyps: &crate::lkt::HypSet, other: &Proof, h: Hyp) {
    for i in 0..sc.hyps.len() {
        let b = sc.hyps[i];
        if other_hyps.contains(&b) {
            let fresh = fresh_hyp_in(b.polarity(), &[sc.body.free_hyps(), other.free_hyps()], &[h]);
            let fresh = avoid_siblings(fresh, &sc.hyps);
            sc.body = rename_hyp_unchecked(&sc.body, b, fresh);
            sc.hyps[i] = fresh;
        }
    }
    if let Some(y) = &sc.eigen {
        if other.free_vars().contains(y) {
            let avoid: Vec<_> = sc.body.free_vars().iter().chain(other.free_vars().iter()).cloned().collect();
            let fresh = fresh_variant(y, &avoid);
            rename_eigen(sc, fresh);
        }
    }
}

/// N under the full policy.
pub fn normalize(p: &Proof, budget: &mut Budget) -> Result<Proof, BudgetExhausted> {
    normalize_with(p, Policy::Full, budget)
}

pub fn normalize_with(p: &Proof, policy: Policy, budget: &mut Budget) -> Result<Proof, BudgetExhausted> {
    let mut n = Normalizer::new(policy, *budget);
    let r = n.normalize(p);
    *budget = n.budget;
    r
}

/// E under the given policy.
pub fn eval_cut(
    formula: &Expr,
    h1: Hyp,
    p1: &Proof,
    h2: Hyp,
    p2: &Proof,
    policy: Policy,
    budget: &mut Budget,
) -> Result<Proof, BudgetExhausted> {
    let mut n = Normalizer::new(policy, *budget);
    let r = n.eval_cut(formula, h1, p1, h2, p2);
    *budget = n.budget;
    r
}

/// S under the given policy.
pub fn proof_subst(
    p: &Proof,
    formula: &Expr,
    h: Hyp,
    h_other: Hyp,
    other: &Proof,
    policy: Policy,
    budget: &mut Budget,
) -> Result<Proof, BudgetExhausted> {
    let mut n = Normalizer::new(policy, *budget);
    let r = n.proof_subst(p, formula, h, h_other, other);
    *budget = n.budget;
    r
}

/// Whether every remaining cut in `p` is irreducible under `policy`.
pub fn cuts_are_stuck(p: &Proof, policy: Policy) -> bool {
    if p.cut_count() == 0 {
        return true;
    }
    if let ProofKind::Cut {
        formula,
        left_hyp,
        left,
        right_hyp,
        right,
    } = p.kind()
    {
        let c = classify_cut(formula, *left_hyp, left, *right_hyp, right, policy);
        if !matches!(c, CutClause::Stuck | CutClause::Kept) {
            return false;
        }
    }
    p.children().into_iter().all(|c| cuts_are_stuck(c, policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Const, Ty, Var};
    use crate::typing::{check_closed, LocalContext};

    fn h(v: i32) -> Hyp {
        Hyp::new(v).unwrap()
    }

    fn atom(name: &str) -> Expr {
        Expr::cnst(Const::new(name, Ty::o()))
    }

    fn full(p: &Proof) -> Proof {
        normalize(p, &mut Budget::unlimited()).unwrap()
    }

    #[test]
    fn axiom_is_normal() {
        let ax = Proof::ax(h(-1), h(1));
        assert!(full(&ax).ptr_eq(&ax));
    }

    #[test]
    fn weakening_and_axiom_clauses() {
        let phi = atom("A");
        let p1 = Proof::ax(h(-5), h(6));
        let r = eval_cut(&phi, h(1), &p1, h(-1), &Proof::ax(h(-1), h(2)), Policy::Full, &mut Budget::unlimited()).unwrap();
        assert!(r.ptr_eq(&p1));
        // E(φ, h1: Ax(h2, h1), h3: π) = π[h3\h2]
        let pi2 = Proof::neg_l(h(-3), h(4), Proof::ax(h(-3), h(4)));
        let r = eval_cut(&phi, h(1), &Proof::ax(h(-2), h(1)), h(-3), &pi2, Policy::Full, &mut Budget::unlimited()).unwrap();
        assert_eq!(r, Proof::neg_l(h(-2), h(4), Proof::ax(h(-2), h(4))));
    }

    #[test]
    fn conjunction_cut_reduces_to_cut_free() {
        let (a, b) = (atom("A"), atom("B"));
        let ab = Expr::and(a.clone(), b.clone());
        // -1:A, -2:B ⊢ +1: A ∧ B   against   -1: A ∧ B ⊢ +2: B
        let left = Proof::and_r(h(1), h(3), Proof::ax(h(-1), h(3)), h(4), Proof::ax(h(-2), h(4)));
        let right = Proof::and_l(h(-3), h(-4), h(-5), Proof::ax(h(-5), h(2)));
        let cut = Proof::cut(ab.clone(), h(1), left, h(-3), right);
        let ctx = LocalContext::new().with(h(-1), a).with(h(-2), b.clone()).with(h(2), b);
        check_closed(&cut, &ctx).unwrap();
        let n = full(&cut);
        assert_eq!(n.cut_count(), 0);
        check_closed(&n, &ctx).unwrap();
        assert_eq!(n, Proof::ax(h(-2), h(2)));
    }

    #[test]
    fn universal_cut_instantiates_eigenvariable() {
        let x = Var::new("x", Ty::i());
        let p = Expr::cnst(Const::new("P", Ty::arrow(Ty::i(), Ty::o())));
        let c = Expr::cnst(Const::new("c", Ty::i()));
        let px = Expr::app(p.clone(), Expr::var(x.clone()));
        let all = Expr::all(x.clone(), px);
        // -1: ∀x P x ⊢ +1: P c  via a cut on ∀x P x.
        let left = Proof::all_r(
            h(2),
            x.clone(),
            h(3),
            Proof::all_l(h(-1), Expr::var(x.clone()), h(-4), Proof::ax(h(-4), h(3))),
        );
        let right = Proof::all_l(h(-2), c.clone(), h(-3), Proof::ax(h(-3), h(1)));
        let cut = Proof::cut(all.clone(), h(2), left, h(-2), right);
        let ctx = LocalContext::new().with(h(-1), all).with(h(1), Expr::app(p, c.clone()));
        check_closed(&cut, &ctx).unwrap();
        let n = full(&cut);
        check_closed(&n, &ctx).unwrap();
        assert_eq!(n.cut_count(), 0);
        let ProofKind::AllL { term, .. } = n.kind() else { panic!("{n}") };
        assert_eq!(term, &c);
    }

    #[test]
    fn budget_exhaustion() {
        let (a, b) = (atom("A"), atom("B"));
        let ab = Expr::and(a, b);
        let left = Proof::and_r(h(1), h(3), Proof::ax(h(-1), h(3)), h(4), Proof::ax(h(-2), h(4)));
        let right = Proof::and_l(h(-3), h(-4), h(-5), Proof::ax(h(-5), h(2)));
        let cut = Proof::cut(ab, h(1), left, h(-3), right);
        let e = normalize(&cut, &mut Budget::new(2)).unwrap_err();
        assert_eq!(e.steps, 2);
    }

    #[test]
    fn atomic_policy_keeps_atomic_cut() {
        let a = atom("A");
        let left = Proof::and_l(h(-7), h(-8), h(-9), Proof::ax(h(-8), h(1)));
        let right = Proof::and_l(h(-6), h(-10), h(-11), Proof::ax(h(-1), h(2)));
        let cut = Proof::cut(a, h(1), left, h(-1), right);
        let r = normalize_with(&cut, Policy::UntilAtomic, &mut Budget::unlimited()).unwrap();
        assert_eq!(r.cut_count(), 1);
        assert!(cuts_are_stuck(&r, Policy::UntilAtomic));
        let r = full(&cut);
        assert_eq!(r.cut_count(), 0);
    }
}
