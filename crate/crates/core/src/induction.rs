//! Induction unfolding and induction elimination.
//!
//! An induction at a numeral `sⁿ(0)` unfolds into `n` cuts on instances of
//! the step case above the base case. Targets that are not numerals are first
//! rewritten with recursive definitions available as universally quantified
//! equations in the antecedent; the rewriting is recorded as a proof with
//! `AllL` and `Eql` inferences and spliced in with a cut.

use thiserror::Error;

use crate::formula::{view, FormulaView, SUCC, ZERO};
use crate::lkt::{fresh_hyp_in, rename_hyp_unchecked, subst_expr_in_proof, Hyp, HypSet, Polarity, Proof, ProofKind};
use crate::normalize::{Budget, BudgetExhausted, Normalizer, Policy};
use crate::term::{fresh_variant, instantiate, subst_apply, Const, Expr, ExprKind, Substitution, Ty, Var};
use crate::typing::LocalContext;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InductionError {
    #[error("induction target {target} is neither 0 nor a successor")]
    NotConstructorForm { target: Expr },
    #[error("term {term} has no constructor normal form under the definitions")]
    StuckTerm { term: Expr },
    #[error("hypothesis {hyp} is not a definition equation: {reason}")]
    BadDefinition { hyp: Hyp, reason: String },
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// One defining equation `∀x̄ (f(p̄) = r)`.
#[derive(Debug, Clone)]
pub struct DefinitionRule {
    /// The antecedent hypothesis carrying the equation.
    pub hyp: Hyp,
    pub head: Const,
    /// The variables of the outermost ∀ block, in order.
    pub vars: Vec<Var>,
    pub lhs: Expr,
    pub rhs: Expr,
}

/// Recursive definitions of function symbols over `0` and `s`.
#[derive(Debug, Clone, Default)]
pub struct RecursiveDefinitions {
    rules: Vec<DefinitionRule>,
}

fn is_constructor(c: &Const) -> bool {
    c.name() == ZERO || c.name() == SUCC
}

/// Constructor patterns: variables, `0` and `s(p)`.
fn is_pattern(e: &Expr) -> bool {
    match e.kind() {
        ExprKind::Var(_) => true,
        ExprKind::Const(c) => c.name() == ZERO,
        ExprKind::App(f, a) => f.as_const().is_some_and(|c| c.name() == SUCC) && is_pattern(a),
        ExprKind::Abs(..) => false,
    }
}

fn is_proper_subterm(small: &Expr, big: &Expr) -> bool {
    match big.kind() {
        ExprKind::App(f, a) => small == a || small == f || is_proper_subterm(small, a) || is_proper_subterm(small, f),
        _ => false,
    }
}

/// All applications of `head` in `e`, as argument lists.
fn calls_of<'a>(e: &'a Expr, head: &Const, out: &mut Vec<Vec<&'a Expr>>) {
    let (h, args) = e.strip_app();
    if h.as_const() == Some(head) {
        out.push(args.clone());
    }
    if let ExprKind::Abs(_, b) = h.kind() {
        calls_of(b, head, out);
    }
    for a in args {
        calls_of(a, head, out);
    }
}

impl RecursiveDefinitions {
    pub fn new() -> RecursiveDefinitions {
        RecursiveDefinitions::default()
    }

    pub fn rules(&self) -> &[DefinitionRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn hyps(&self) -> Vec<Hyp> {
        self.rules.iter().map(|r| r.hyp).collect()
    }

    /// Registers the equation carried by the antecedent hypothesis `hyp`.
    ///
    /// The left-hand side must apply a non-constructor constant to
    /// constructor patterns; recursive calls on the right must be on a
    /// proper subterm of some pattern, and definitions may not be mutually
    /// recursive.
    pub fn add(&mut self, hyp: Hyp, formula: &Expr) -> Result<(), InductionError> {
        let bad = |reason: &str| InductionError::BadDefinition {
            hyp,
            reason: reason.to_string(),
        };
        if hyp.is_pos() {
            return Err(bad("definitions must be antecedent hypotheses"));
        }
        let mut vars = Vec::new();
        let mut body = formula.clone();
        while let FormulaView::All(pred) = view(&body) {
            let ExprKind::Abs(x, b) = pred.kind() else {
                return Err(bad("quantifier without a lambda"));
            };
            vars.push(x.clone());
            let b = b.clone();
            body = b;
        }
        let FormulaView::Eq(lhs, rhs) = view(&body) else {
            return Err(bad("not an equation"));
        };
        let (h, args) = lhs.strip_app();
        let Some(head) = h.as_const() else {
            return Err(bad("left-hand side is not headed by a constant"));
        };
        if is_constructor(head) || args.is_empty() {
            return Err(bad("left-hand side must apply a defined function"));
        }
        if !args.iter().all(|a| is_pattern(a)) {
            return Err(bad("arguments must be constructor patterns"));
        }
        if !rhs.free_vars().iter().all(|v| lhs.free_vars().contains(v)) {
            return Err(bad("right-hand side has variables not bound by the left"));
        }
        let mut calls = Vec::new();
        calls_of(rhs, head, &mut calls);
        for call in &calls {
            let decreasing = call.len() == args.len()
                && call.iter().zip(args.iter()).any(|(c, p)| is_proper_subterm(c, p));
            if !decreasing {
                return Err(bad("recursive call is not on a structurally smaller argument"));
            }
        }
        let mut uses = Vec::new();
        for_each_const(rhs, &mut |c| {
            if c != head && !is_constructor(c) {
                uses.push(c.clone());
            }
        });
        if uses.iter().any(|c| self.depends_on(c, head)) {
            return Err(bad("definitions are mutually recursive"));
        }
        self.rules.push(DefinitionRule {
            hyp,
            head: head.clone(),
            vars,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        });
        Ok(())
    }

    /// Whether the definition of `from` mentions `to`, transitively.
    fn depends_on(&self, from: &Const, to: &Const) -> bool {
        let mut seen = vec![from.clone()];
        let mut stack = vec![from.clone()];
        while let Some(c) = stack.pop() {
            for r in self.rules.iter().filter(|r| r.head == c) {
                let mut found = false;
                for_each_const(&r.rhs, &mut |d| {
                    if d == to {
                        found = true;
                    } else if !seen.contains(d) {
                        seen.push(d.clone());
                        stack.push(d.clone());
                    }
                });
                if found {
                    return true;
                }
            }
        }
        false
    }

    /// Definitions from the given antecedent hypotheses of `ctx`.
    pub fn from_context(ctx: &LocalContext, hyps: &[Hyp]) -> Result<RecursiveDefinitions, InductionError> {
        let mut defs = RecursiveDefinitions::new();
        for &h in hyps {
            let f = ctx.get(h).ok_or_else(|| InductionError::BadDefinition {
                hyp: h,
                reason: "not in the context".to_string(),
            })?;
            defs.add(h, f)?;
        }
        Ok(defs)
    }

    /// One innermost-leftmost rewrite step, with the redex position marked
    /// by `hole` in the returned context.
    fn step_at(&self, t: &Expr, hole: &Var) -> Option<RewriteStep> {
        if let ExprKind::App(f, a) = t.kind() {
            if let Some(mut s) = self.step_at(f, hole) {
                s.context = Expr::app(s.context, a.clone());
                return Some(s);
            }
            if let Some(mut s) = self.step_at(a, hole) {
                s.context = Expr::app(f.clone(), s.context);
                return Some(s);
            }
        }
        for (i, rule) in self.rules.iter().enumerate() {
            let mut m = Substitution::new();
            if match_pattern(&rule.lhs, t, &mut m) {
                let rhs = subst_apply(&rule.rhs, &m);
                return Some(RewriteStep {
                    rule: i,
                    instance: rule.vars.iter().map(|v| m.get(v).cloned().unwrap_or_else(|| Expr::var(v.clone()))).collect(),
                    contractum: rhs,
                    context: Expr::var(hole.clone()),
                    hole: hole.clone(),
                });
            }
        }
        None
    }
}

fn for_each_const(e: &Expr, f: &mut dyn FnMut(&Const)) {
    match e.kind() {
        ExprKind::Const(c) => f(c),
        ExprKind::Var(_) => {}
        ExprKind::App(a, b) => {
            for_each_const(a, f);
            for_each_const(b, f);
        }
        ExprKind::Abs(_, b) => for_each_const(b, f),
    }
}

fn match_pattern(pat: &Expr, t: &Expr, m: &mut Substitution) -> bool {
    match (pat.kind(), t.kind()) {
        (ExprKind::Var(v), _) => match m.get(v) {
            Some(bound) => bound == t,
            None => {
                if v.ty() != t.ty().unwrap_or(v.ty()) || t.ty().is_none() {
                    return false;
                }
                m.insert_unchecked(v.clone(), t.clone());
                true
            }
        },
        (ExprKind::Const(c), ExprKind::Const(d)) => c == d,
        (ExprKind::App(f, a), ExprKind::App(g, b)) => match_pattern(f, g, m) && match_pattern(a, b, m),
        _ => false,
    }
}

struct RewriteStep {
    rule: usize,
    instance: Vec<Expr>,
    contractum: Expr,
    /// `C[z]` with the redex replaced by the hole variable.
    context: Expr,
    hole: Var,
}

/// Rewrites `t` to constructor form.
///
/// Returns `t'` together with `πs :: Γ, from: φ(t') ⊢ goal: φ(t)`, where Γ
/// contains the definition hypotheses and `φ` is `motive`.
pub fn to_constructor_form(
    t: &Expr,
    motive: &Expr,
    defs: &RecursiveDefinitions,
    goal: Hyp,
    from: Hyp,
) -> Result<(Expr, Proof), InductionError> {
    let hole = fresh_variant(
        &Var::new("z", t.ty().cloned().unwrap_or_else(Ty::nat)),
        motive.free_vars().iter().chain(t.free_vars().iter()),
    );
    let mut steps = Vec::new();
    let mut cur = t.clone();
    while !crate::formula::is_constructor_form(&cur) {
        let Some(s) = defs.step_at(&cur, &hole) else {
            return Err(InductionError::StuckTerm { term: cur });
        };
        let next = subst_apply(&s.context, &Substitution::single(s.hole.clone(), s.contractum.clone()).expect("hole type"));
        steps.push(s);
        cur = next;
    }
    let mut next_label = defs.hyps().into_iter().chain([goal, from]).map(|h| h.abs()).max().unwrap_or(0);
    let mut fresh = |pol: Polarity| {
        next_label += 1;
        Hyp::with_polarity(pol, next_label)
    };
    // goals[i] holds φ(t_i); the last one is closed by the axiom.
    let mut goals = vec![goal];
    goals.extend(steps.iter().map(|_| fresh(Polarity::Pos)));
    let mut proof = Proof::ax(from, *goals.last().expect("nonempty"));
    for (i, s) in steps.iter().enumerate().rev() {
        let rule = &defs.rules[s.rule];
        let ctx = Expr::abs(s.hole.clone(), instantiate(motive, &s.context));
        let inst: Vec<Hyp> = rule.vars.iter().map(|_| fresh(Polarity::Neg)).collect();
        let eq = inst.last().copied().unwrap_or(rule.hyp);
        let mut p = Proof::eql(eq, goals[i], true, ctx, goals[i + 1], proof);
        for (j, term) in s.instance.iter().enumerate().rev() {
            let main = if j == 0 { rule.hyp } else { inst[j - 1] };
            p = Proof::all_l(main, term.clone(), inst[j], p);
        }
        proof = p;
    }
    Ok((cur, proof))
}

/// Unfolds an induction whose target is `0` or `s(t)`, once.
pub fn unfold_ind(p: &Proof) -> Result<Proof, InductionError> {
    let ProofKind::Ind {
        main,
        motive,
        target,
        base_aux,
        base,
        eigen,
        step_hyp,
        step_concl,
        step,
    } = p.kind()
    else {
        return Err(InductionError::NotConstructorForm { target: Expr::zero() });
    };
    match target.kind() {
        ExprKind::Const(c) if c.name() == ZERO => Ok(rename_hyp_unchecked(base, *base_aux, *main)),
        ExprKind::App(f, t) if f.as_const().is_some_and(|c| c.name() == SUCC) => {
            let inner_main = fresh_hyp_in(Polarity::Pos, &[p.free_hyps(), base.free_hyps(), step.free_hyps()], &[*main, *base_aux, *step_concl]);
            let inner = Proof::ind(
                inner_main,
                motive.clone(),
                t.clone(),
                *base_aux,
                base.clone(),
                eigen.clone(),
                *step_hyp,
                *step_concl,
                step.clone(),
            );
            let step_inst = subst_expr_in_proof(step, &Substitution::single(eigen.clone(), t.clone()).map_err(|_| {
                InductionError::NotConstructorForm { target: target.clone() }
            })?);
            let right = rename_hyp_unchecked(&step_inst, *step_concl, *main);
            Ok(Proof::cut(instantiate(motive, t), inner_main, inner, *step_hyp, right))
        }
        _ => Err(InductionError::NotConstructorForm { target: target.clone() }),
    }
}

/// Unfolds an induction at a numeral completely.
pub fn unfold_ind_fully(p: &Proof, budget: &mut Budget) -> Result<Proof, InductionError> {
    let once = unfold_ind(p)?;
    budget.tick()?;
    if let ProofKind::Cut {
        formula,
        left_hyp,
        left,
        right_hyp,
        right,
    } = once.kind()
    {
        if matches!(left.kind(), ProofKind::Ind { .. }) {
            let inner = unfold_ind_fully(left, budget)?;
            return Ok(Proof::cut(formula.clone(), *left_hyp, inner, *right_hyp, right.clone()));
        }
    }
    Ok(once)
}

/// One bottom-up pass unfolding every induction that can be brought into
/// constructor form. Returns `None` if nothing changed.
fn unfold_pass(p: &Proof, defs: &RecursiveDefinitions, budget: &mut Budget) -> Result<Option<Proof>, InductionError> {
    let mut changed = false;
    let mut scopes = p.scopes();
    for sc in &mut scopes {
        if let Some(b) = unfold_pass(&sc.body, defs, budget)? {
            sc.body = b;
            changed = true;
        }
    }
    let node = if changed { p.with_scopes(scopes, false) } else { p.clone() };
    let ProofKind::Ind { main, motive, target, .. } = node.kind() else {
        return Ok(changed.then_some(node));
    };
    if crate::formula::is_constructor_form(target) {
        return Ok(Some(unfold_ind_fully(&node, budget)?));
    }
    if defs.is_empty() {
        return Ok(changed.then_some(node));
    }
    let (main, motive, target) = (*main, motive.clone(), target.clone());
    let avoid: HypSet = node.free_hyps().union(&defs.hyps().into_iter().collect());
    let k = fresh_hyp_in(Polarity::Pos, &[&avoid], &[main]);
    let from = fresh_hyp_in(Polarity::Neg, &[&avoid], &[main, k]);
    match to_constructor_form(&target, &motive, defs, main, from) {
        Ok((t_prime, ps)) => {
            let ProofKind::Ind {
                base_aux,
                base,
                eigen,
                step_hyp,
                step_concl,
                step,
                ..
            } = node.kind()
            else {
                unreachable!()
            };
            let ind = Proof::ind(
                k,
                motive.clone(),
                t_prime.clone(),
                *base_aux,
                base.clone(),
                eigen.clone(),
                *step_hyp,
                *step_concl,
                step.clone(),
            );
            let ind = unfold_ind_fully(&ind, budget)?;
            Ok(Some(Proof::cut(instantiate(&motive, &t_prime), k, ind, from, ps)))
        }
        Err(InductionError::StuckTerm { .. }) => Ok(changed.then_some(node)),
        Err(e) => Err(e),
    }
}

/// Alternates normalization and unfolding until no induction changes.
pub fn eliminate_inductions(p: &Proof, defs: &RecursiveDefinitions, budget: &mut Budget) -> Result<Proof, InductionError> {
    let mut cur = p.clone();
    loop {
        let mut n = Normalizer::new(Policy::Full, *budget);
        let r = n.normalize(&cur);
        *budget = n.budget;
        cur = r?;
        match unfold_pass(&cur, defs, budget)? {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
}

/// Whether `p` contains an `Ind` node.
pub fn contains_ind(p: &Proof) -> bool {
    matches!(p.kind(), ProofKind::Ind { .. }) || p.children().into_iter().any(contains_ind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{add_axioms, add_definitions, ind_linear_proof, plus};
    use crate::typing::check_closed;

    fn h(v: i32) -> Hyp {
        Hyp::new(v).unwrap()
    }

    fn count(p: &Proof, pred: &dyn Fn(&Proof) -> bool) -> usize {
        usize::from(pred(p)) + p.children().into_iter().map(|c| count(c, pred)).sum::<usize>()
    }

    #[test]
    fn unfold_zero_renames_base() {
        let g = ind_linear_proof(0);
        let u = unfold_ind(&g.proof).unwrap();
        assert_eq!(u, Proof::ax(h(-1), h(1)));
        check_closed(&u, &g.ctx).unwrap();
    }

    #[test]
    fn unfold_successor_is_cut() {
        let g = ind_linear_proof(1);
        let u = unfold_ind(&g.proof).unwrap();
        let ProofKind::Cut { formula, left, .. } = u.kind() else { panic!() };
        assert_eq!(formula.to_string(), "(P 0)");
        assert!(matches!(left.kind(), ProofKind::Ind { .. }));
        check_closed(&u, &g.ctx).unwrap();
    }

    #[test]
    fn unfold_variable_target_fails() {
        let x = Var::new("x", Ty::nat());
        let z = Var::new("z", Ty::nat());
        let p = Proof::ind(
            h(1),
            Expr::abs(z.clone(), Expr::eq(Expr::var(z.clone()), Expr::var(z))),
            Expr::var(x),
            h(2),
            Proof::rfl(h(2)),
            Var::new("y", Ty::nat()),
            h(-3),
            h(4),
            Proof::rfl(h(4)),
        );
        assert!(matches!(unfold_ind(&p), Err(InductionError::NotConstructorForm { .. })));
    }

    #[test]
    fn constructor_form_of_numeral_is_axiom() {
        let defs = add_definitions();
        let z = Var::new("z", Ty::nat());
        let motive = Expr::abs(z.clone(), Expr::eq(Expr::var(z.clone()), Expr::var(z)));
        let (t, p) = to_constructor_form(&Expr::numeral(2), &motive, &defs, h(1), h(-9)).unwrap();
        assert_eq!(t, Expr::numeral(2));
        assert_eq!(p, Proof::ax(h(-9), h(1)));
    }

    #[test]
    fn constructor_form_of_sum() {
        let defs = add_definitions();
        let z = Var::new("z", Ty::nat());
        let pr = Expr::cnst(Const::new("Q", Ty::arrow(Ty::nat(), Ty::o())));
        let motive = Expr::abs(z.clone(), Expr::app(pr.clone(), Expr::var(z)));
        let t = Expr::apps(plus(), [Expr::zero(), Expr::numeral(1)]);
        let (tp, p) = to_constructor_form(&t, &motive, &defs, h(1), h(-9)).unwrap();
        assert_eq!(tp, Expr::numeral(1));
        assert_eq!(count(&p, &|q| matches!(q.kind(), ProofKind::Eql { .. })), 2);
        assert_eq!(count(&p, &|q| matches!(q.kind(), ProofKind::AllL { .. })), 3);
        let ctx = add_axioms()
            .with(h(-9), Expr::app(pr.clone(), tp))
            .with(h(1), Expr::app(pr, t));
        check_closed(&p, &ctx).unwrap();
    }

    #[test]
    fn undefined_function_is_stuck() {
        let defs = add_definitions();
        let f = Expr::cnst(Const::new("f", Ty::arrow(Ty::nat(), Ty::nat())));
        let z = Var::new("z", Ty::nat());
        let motive = Expr::abs(z.clone(), Expr::eq(Expr::var(z.clone()), Expr::var(z)));
        let r = to_constructor_form(&Expr::app(f, Expr::zero()), &motive, &defs, h(1), h(-9));
        assert!(matches!(r, Err(InductionError::StuckTerm { .. })));
    }

    #[test]
    fn non_terminating_definition_rejected() {
        let x = Var::new("x", Ty::nat());
        let f = Expr::cnst(Const::new("f", Ty::arrow(Ty::nat(), Ty::nat())));
        let eq = Expr::all(
            x.clone(),
            Expr::eq(Expr::app(f.clone(), Expr::var(x.clone())), Expr::app(f, Expr::succ(Expr::var(x)))),
        );
        let mut defs = RecursiveDefinitions::new();
        assert!(matches!(defs.add(h(-1), &eq), Err(InductionError::BadDefinition { .. })));
    }

    #[test]
    fn eliminate_ind_linear() {
        for n in [0, 1, 2, 5] {
            let g = ind_linear_proof(n);
            let out = eliminate_inductions(&g.proof, &RecursiveDefinitions::new(), &mut Budget::unlimited()).unwrap();
            check_closed(&out, &g.ctx).unwrap();
            assert!(!contains_ind(&out));
            assert_eq!(out.cut_count(), 0);
            assert_eq!(count(&out, &|q| matches!(q.kind(), ProofKind::AllL { .. })), n);
        }
    }
}
