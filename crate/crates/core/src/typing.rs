//! The typing judgment `π ::σ Γ ⊢ Δ` as a checker.
//!
//! Context formulas are concrete; the substitution applies to the
//! expressions stored in the proof term (cut formulas, instance terms,
//! motives and rewrite contexts). Formulas are compared up to αβ-equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::{view, FormulaView};
use crate::lkt::{Hyp, Polarity, Proof, ProofKind};
use crate::term::{alpha_eq, beta_normalize, fresh_variant, instantiate, subst_apply, Expr, Substitution, Ty, Var, VarSet};

/// A finite map from hypotheses to formulas.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct LocalContext {
    entries: BTreeMap<Hyp, Expr>,
}

impl LocalContext {
    pub fn new() -> LocalContext {
        LocalContext::default()
    }

    /// Adds `h: φ`, replacing any previous entry for `h`.
    pub fn insert(&mut self, h: Hyp, formula: Expr) -> Option<Expr> {
        self.entries.insert(h, formula)
    }

    pub fn with(mut self, h: Hyp, formula: Expr) -> LocalContext {
        self.insert(h, formula);
        self
    }

    pub fn get(&self, h: Hyp) -> Option<&Expr> {
        self.entries.get(&h)
    }

    pub fn remove(&mut self, h: Hyp) -> Option<Expr> {
        self.entries.remove(&h)
    }

    pub fn contains(&self, h: Hyp) -> bool {
        self.entries.contains_key(&h)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Hyp, &Expr)> {
        self.entries.iter().map(|(h, e)| (*h, e))
    }

    pub fn hyps(&self) -> impl Iterator<Item = Hyp> + '_ {
        self.entries.keys().copied()
    }

    pub fn free_vars(&self) -> VarSet {
        self.entries
            .values()
            .fold(VarSet::empty(), |acc, e| acc.union(e.free_vars()))
    }

    /// Forgets labels.
    pub fn end_sequent(&self) -> Sequent {
        end_sequent(self)
    }

    /// Applies an expression substitution to every formula.
    pub fn subst(&self, s: &Substitution) -> LocalContext {
        LocalContext {
            entries: self
                .entries
                .iter()
                .map(|(h, e)| (*h, beta_normalize(&subst_apply(e, s))))
                .collect(),
        }
    }
}

impl FromIterator<(Hyp, Expr)> for LocalContext {
    fn from_iter<I: IntoIterator<Item = (Hyp, Expr)>>(iter: I) -> Self {
        LocalContext {
            entries: iter.into_iter().collect(),
        }
    }
}

impl fmt::Debug for LocalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// An unlabelled sequent; both sides are multisets.
#[derive(Clone, Default)]
pub struct Sequent {
    pub antecedent: Vec<Expr>,
    pub succedent: Vec<Expr>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Expr>, succedent: Vec<Expr>) -> Sequent {
        Sequent {
            antecedent,
            succedent,
        }
    }

    /// Multiset equality up to αβ-equivalence.
    pub fn same_as(&self, other: &Sequent) -> bool {
        multiset_eq(&self.antecedent, &other.antecedent) && multiset_eq(&self.succedent, &other.succedent)
    }

    /// Every formula of `self` occurs in `other` (as sets).
    pub fn is_subsumed_by(&self, other: &Sequent) -> bool {
        let within = |xs: &[Expr], ys: &[Expr]| {
            xs.iter()
                .all(|x| ys.iter().any(|y| alpha_eq(&beta_normalize(x), &beta_normalize(y))))
        };
        within(&self.antecedent, &other.antecedent) && within(&self.succedent, &other.succedent)
    }
}

fn multiset_eq(a: &[Expr], b: &[Expr]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let b: Vec<Expr> = b.iter().map(beta_normalize).collect();
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let x = beta_normalize(x);
        match (0..b.len()).find(|&i| !used[i] && alpha_eq(&x, &b[i])) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

impl PartialEq for Sequent {
    fn eq(&self, other: &Sequent) -> bool {
        self.same_as(other)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |xs: &[Expr]| xs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ");
        let (l, r) = (side(&self.antecedent), side(&self.succedent));
        match (l.is_empty(), r.is_empty()) {
            (true, true) => f.write_str("⊢"),
            (true, false) => write!(f, "⊢ {r}"),
            (false, true) => write!(f, "{l} ⊢"),
            (false, false) => write!(f, "{l} ⊢ {r}"),
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Forgets the labels of a context, preserving side and multiplicity.
pub fn end_sequent(ctx: &LocalContext) -> Sequent {
    let mut s = Sequent::default();
    for (h, e) in ctx.iter() {
        match h.polarity() {
            Polarity::Neg => s.antecedent.push(e.clone()),
            Polarity::Pos => s.succedent.push(e.clone()),
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnknownHyp { hyp: Hyp },
    Polarity { hyp: Hyp, expected: Polarity },
    Connective { hyp: Hyp, expected: &'static str, found: Expr },
    FormulaMismatch { expected: Expr, found: Expr },
    CutFormula { formula: Expr },
    Eigenvariable { var: Var },
    EqualityShape { hyp: Hyp, found: Expr },
    IndTarget { found: Option<Ty> },
    IllTypedExpr { expr: Expr, expected: Option<Ty> },
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::UnknownHyp { hyp } => write!(f, "unknown hypothesis {hyp}"),
            TypeErrorKind::Polarity { hyp, expected } => {
                let side = match expected {
                    Polarity::Neg => "antecedent (negative)",
                    Polarity::Pos => "succedent (positive)",
                };
                write!(f, "hypothesis {hyp} must be an {side} hypothesis")
            }
            TypeErrorKind::Connective { hyp, expected, found } => {
                write!(f, "hypothesis {hyp}: expected {expected}, found {found}")
            }
            TypeErrorKind::FormulaMismatch { expected, found } => {
                write!(f, "formula mismatch: expected {expected}, found {found}")
            }
            TypeErrorKind::CutFormula { formula } => write!(f, "cut formula {formula} is not a formula"),
            TypeErrorKind::Eigenvariable { var } => {
                write!(f, "eigenvariable {var} occurs free in the context")
            }
            TypeErrorKind::EqualityShape { hyp, found } => {
                write!(f, "hypothesis {hyp} must be an equation, found {found}")
            }
            TypeErrorKind::IndTarget { found } => match found {
                Some(t) => write!(f, "induction target has type {t}, expected nat"),
                None => f.write_str("induction target is ill-typed"),
            },
            TypeErrorKind::IllTypedExpr { expr, expected } => match expected {
                Some(t) => write!(f, "expression {expr} does not have type {t}"),
                None => write!(f, "expression {expr} is ill-typed"),
            },
        }
    }
}

/// A failed typing check, pointing at the offending node.
#[derive(Debug, Clone, Error)]
#[error("{kind} (at {})", node.label())]
pub struct TypeError {
    pub node: Proof,
    pub kind: TypeErrorKind,
}

/// Checks `π ::σ ctx`.
pub fn check(p: &Proof, sigma: &Substitution, ctx: &LocalContext) -> Result<(), TypeError> {
    let mut c = Checker::new(ctx);
    c.check(p, sigma)
}

/// Checks `π :: ctx` under the identity substitution.
pub fn check_closed(p: &Proof, ctx: &LocalContext) -> Result<(), TypeError> {
    check(p, &Substitution::new(), ctx)
}

/// A local context with scoped extension and cheap free-variable queries.
#[derive(Debug, Default)]
pub struct ContextStack {
    ctx: HashMap<Hyp, Expr>,
    fv: HashMap<Var, usize>,
    undo: Vec<(Hyp, Option<Expr>)>,
}

impl ContextStack {
    pub fn new(ctx: &LocalContext) -> ContextStack {
        let mut c = ContextStack::default();
        for (h, e) in ctx.iter() {
            c.bind(h, beta_normalize(e));
        }
        c.undo.clear();
        c
    }

    pub fn get(&self, h: Hyp) -> Option<&Expr> {
        self.ctx.get(&h)
    }

    /// Whether `v` occurs free in some formula of the context.
    pub fn mentions(&self, v: &Var) -> bool {
        self.fv.contains_key(v)
    }

    pub fn free_vars(&self) -> VarSet {
        self.fv.keys().cloned().collect()
    }

    pub fn to_local_context(&self) -> LocalContext {
        self.ctx.iter().map(|(h, e)| (*h, e.clone())).collect()
    }

    /// Current scope depth, to be handed back to [`ContextStack::pop_to`].
    pub fn mark(&self) -> usize {
        self.undo.len()
    }

    pub fn push(&mut self, h: Hyp, e: Expr) {
        let old = self.bind(h, e);
        self.undo.push((h, old));
    }

    pub fn pop_to(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let (h, old) = self.undo.pop().expect("nonempty");
            self.unbind(h, old);
        }
    }

    fn bind(&mut self, h: Hyp, e: Expr) -> Option<Expr> {
        for v in e.free_vars() {
            *self.fv.entry(v.clone()).or_default() += 1;
        }
        let old = self.ctx.insert(h, e);
        if let Some(o) = &old {
            self.forget_vars(o);
        }
        old
    }

    fn unbind(&mut self, h: Hyp, old: Option<Expr>) {
        let cur = match old {
            Some(o) => {
                for v in o.free_vars() {
                    *self.fv.entry(v.clone()).or_default() += 1;
                }
                self.ctx.insert(h, o)
            }
            None => self.ctx.remove(&h),
        };
        if let Some(c) = cur {
            self.forget_vars(&c);
        }
    }

    fn forget_vars(&mut self, e: &Expr) {
        for v in e.free_vars() {
            if let Some(n) = self.fv.get_mut(v) {
                *n -= 1;
                if *n == 0 {
                    self.fv.remove(v);
                }
            }
        }
    }
}

/// The formulas bound by each scope of `p`, assuming `p` is well-typed
/// under the identity substitution; `None` if the main formulas do not
/// have the required shape.
pub fn scope_bindings(p: &Proof, ctx: &ContextStack) -> Option<Vec<Vec<(Hyp, Expr)>>> {
    let get = |h: &Hyp| ctx.get(*h);
    Some(match p.kind() {
        ProofKind::Ax { .. } | ProofKind::TopR { .. } | ProofKind::Rfl { .. } => vec![],
        ProofKind::Cut {
            formula,
            left_hyp,
            right_hyp,
            ..
        } => {
            let f = beta_normalize(formula);
            vec![vec![(*left_hyp, f.clone())], vec![(*right_hyp, f)]]
        }
        ProofKind::NegL { main, aux, .. } | ProofKind::NegR { main, aux, .. } => {
            let FormulaView::Not(a) = view(get(main)?) else { return None };
            vec![vec![(*aux, a.clone())]]
        }
        ProofKind::AndL { main, aux1, aux2, .. } => {
            let (FormulaView::And(a, b) | FormulaView::Or(a, b) | FormulaView::Imp(a, b)) = view(get(main)?) else {
                return None;
            };
            vec![vec![(*aux1, a.clone()), (*aux2, b.clone())]]
        }
        ProofKind::AndR { main, aux1, aux2, .. } => {
            let (FormulaView::And(a, b) | FormulaView::Or(a, b) | FormulaView::Imp(a, b)) = view(get(main)?) else {
                return None;
            };
            vec![vec![(*aux1, a.clone())], vec![(*aux2, b.clone())]]
        }
        ProofKind::AllL { main, term, aux, .. } => {
            let (FormulaView::All(pred) | FormulaView::Ex(pred)) = view(get(main)?) else { return None };
            vec![vec![(*aux, instantiate(pred, term))]]
        }
        ProofKind::AllR { main, eigen, aux, .. } => {
            let (FormulaView::All(pred) | FormulaView::Ex(pred)) = view(get(main)?) else { return None };
            vec![vec![(*aux, instantiate(pred, &Expr::var(eigen.clone())))]]
        }
        ProofKind::Eql {
            eq,
            left_to_right,
            context,
            aux,
            ..
        } => {
            let FormulaView::Eq(t, s) = view(get(eq)?) else { return None };
            let tgt = if *left_to_right { s } else { t };
            vec![vec![(*aux, instantiate(context, tgt))]]
        }
        ProofKind::Ind {
            motive,
            base_aux,
            eigen,
            step_hyp,
            step_concl,
            ..
        } => {
            let y = Expr::var(eigen.clone());
            vec![
                vec![(*base_aux, instantiate(motive, &Expr::zero()))],
                vec![
                    (*step_hyp, instantiate(motive, &y)),
                    (*step_concl, instantiate(motive, &Expr::succ(y))),
                ],
            ]
        }
    })
}

struct Checker {
    ctx: ContextStack,
}

type Res = Result<(), TypeError>;

fn err(node: &Proof, kind: TypeErrorKind) -> TypeError {
    TypeError {
        node: node.clone(),
        kind,
    }
}

fn inst(e: &Expr, sigma: &Substitution) -> Expr {
    if sigma.is_empty() {
        beta_normalize(e)
    } else {
        beta_normalize(&subst_apply(e, sigma))
    }
}

impl Checker {
    fn new(ctx: &LocalContext) -> Checker {
        Checker {
            ctx: ContextStack::new(ctx),
        }
    }

    /// Runs `f` with the given hypotheses temporarily bound.
    fn with_bound(&mut self, binds: Vec<(Hyp, Expr)>, f: impl FnOnce(&mut Checker) -> Res) -> Res {
        let mark = self.ctx.mark();
        for (h, e) in binds {
            self.ctx.push(h, e);
        }
        let r = f(self);
        self.ctx.pop_to(mark);
        r
    }

    fn lookup(&self, node: &Proof, h: Hyp) -> Result<Expr, TypeError> {
        self.ctx
            .get(h)
            .cloned()
            .ok_or_else(|| err(node, TypeErrorKind::UnknownHyp { hyp: h }))
    }

    fn polarity(node: &Proof, h: Hyp, expected: Polarity) -> Res {
        if h.polarity() == expected {
            Ok(())
        } else {
            Err(err(node, TypeErrorKind::Polarity { hyp: h, expected }))
        }
    }

    fn same(node: &Proof, expected: &Expr, found: &Expr) -> Res {
        if alpha_eq(expected, found) {
            Ok(())
        } else {
            Err(err(
                node,
                TypeErrorKind::FormulaMismatch {
                    expected: expected.clone(),
                    found: found.clone(),
                },
            ))
        }
    }

    fn connective(node: &Proof, h: Hyp, expected: &'static str, found: &Expr) -> TypeError {
        err(
            node,
            TypeErrorKind::Connective {
                hyp: h,
                expected,
                found: found.clone(),
            },
        )
    }

    fn well_typed(node: &Proof, e: &Expr, expected: &Ty) -> Res {
        if e.ty() == Some(expected) {
            Ok(())
        } else {
            Err(err(
                node,
                TypeErrorKind::IllTypedExpr {
                    expr: e.clone(),
                    expected: Some(expected.clone()),
                },
            ))
        }
    }

    /// Chooses the eigenvariable instance `y` for binder `x` under `σ`.
    fn eigen(&self, node: &Proof, x: &Var, sigma: &Substitution, extra: &VarSet) -> Result<(Var, Substitution), TypeError> {
        let range = sigma.range_vars();
        let mut inner = sigma.clone();
        if range.contains(x) {
            let avoid: Vec<Var> = range
                .iter()
                .chain(self.ctx.fv.keys())
                .chain(extra.iter())
                .cloned()
                .collect();
            let y = fresh_variant(x, &avoid);
            inner.insert_unchecked(x.clone(), Expr::var(y.clone()));
            Ok((y, inner))
        } else {
            if self.ctx.mentions(x) || extra.contains(x) {
                return Err(err(node, TypeErrorKind::Eigenvariable { var: x.clone() }));
            }
            inner.remove(x);
            Ok((x.clone(), inner))
        }
    }

    fn check(&mut self, p: &Proof, sigma: &Substitution) -> Res {
        match p.kind() {
            ProofKind::Ax { ante, succ } => {
                Self::polarity(p, *ante, Polarity::Neg)?;
                Self::polarity(p, *succ, Polarity::Pos)?;
                let a = self.lookup(p, *ante)?;
                let b = self.lookup(p, *succ)?;
                Self::same(p, &a, &b)
            }
            ProofKind::TopR { main } => {
                let f = self.lookup(p, *main)?;
                match (main.polarity(), view(&f)) {
                    (Polarity::Pos, FormulaView::Top) | (Polarity::Neg, FormulaView::Bot) => Ok(()),
                    (Polarity::Pos, _) => Err(Self::connective(p, *main, "⊤", &f)),
                    (Polarity::Neg, _) => Err(Self::connective(p, *main, "⊥", &f)),
                }
            }
            ProofKind::Rfl { main } => {
                Self::polarity(p, *main, Polarity::Pos)?;
                let f = self.lookup(p, *main)?;
                match view(&f) {
                    FormulaView::Eq(l, r) if alpha_eq(l, r) => Ok(()),
                    FormulaView::Eq(l, r) => Err(err(
                        p,
                        TypeErrorKind::FormulaMismatch {
                            expected: l.clone(),
                            found: r.clone(),
                        },
                    )),
                    _ => Err(Self::connective(p, *main, "t = t", &f)),
                }
            }
            ProofKind::Cut {
                formula,
                left_hyp,
                left,
                right_hyp,
                right,
            } => {
                Self::polarity(p, *left_hyp, Polarity::Pos)?;
                Self::polarity(p, *right_hyp, Polarity::Neg)?;
                let phi = inst(formula, sigma);
                if !phi.ty().is_some_and(Ty::is_o) {
                    return Err(err(p, TypeErrorKind::CutFormula { formula: formula.clone() }));
                }
                self.with_bound(vec![(*left_hyp, phi.clone())], |c| c.check(left, sigma))?;
                self.with_bound(vec![(*right_hyp, phi)], |c| c.check(right, sigma))
            }
            ProofKind::NegL { main, aux, sub } | ProofKind::NegR { main, aux, sub } => {
                let left = matches!(p.kind(), ProofKind::NegL { .. });
                let pol = if left { Polarity::Neg } else { Polarity::Pos };
                Self::polarity(p, *main, pol)?;
                Self::polarity(p, *aux, pol.flip())?;
                let f = self.lookup(p, *main)?;
                let FormulaView::Not(a) = view(&f) else {
                    return Err(Self::connective(p, *main, "¬", &f));
                };
                self.with_bound(vec![(*aux, a.clone())], |c| c.check(sub, sigma))
            }
            ProofKind::AndL { main, aux1, aux2, sub } => {
                let f = self.lookup(p, *main)?;
                let (a, b, pa, pb) = match (main.polarity(), view(&f)) {
                    (Polarity::Neg, FormulaView::And(a, b)) => (a, b, Polarity::Neg, Polarity::Neg),
                    (Polarity::Pos, FormulaView::Or(a, b)) => (a, b, Polarity::Pos, Polarity::Pos),
                    (Polarity::Pos, FormulaView::Imp(a, b)) => (a, b, Polarity::Neg, Polarity::Pos),
                    (Polarity::Neg, _) => return Err(Self::connective(p, *main, "∧", &f)),
                    (Polarity::Pos, _) => return Err(Self::connective(p, *main, "∨ or →", &f)),
                };
                Self::polarity(p, *aux1, pa)?;
                Self::polarity(p, *aux2, pb)?;
                let binds = vec![(*aux1, a.clone()), (*aux2, b.clone())];
                self.with_bound(binds, |c| c.check(sub, sigma))
            }
            ProofKind::AndR {
                main,
                aux1,
                left,
                aux2,
                right,
            } => {
                let f = self.lookup(p, *main)?;
                let (a, b, pa, pb) = match (main.polarity(), view(&f)) {
                    (Polarity::Pos, FormulaView::And(a, b)) => (a, b, Polarity::Pos, Polarity::Pos),
                    (Polarity::Neg, FormulaView::Or(a, b)) => (a, b, Polarity::Neg, Polarity::Neg),
                    (Polarity::Neg, FormulaView::Imp(a, b)) => (a, b, Polarity::Pos, Polarity::Neg),
                    (Polarity::Pos, _) => return Err(Self::connective(p, *main, "∧", &f)),
                    (Polarity::Neg, _) => return Err(Self::connective(p, *main, "∨ or →", &f)),
                };
                Self::polarity(p, *aux1, pa)?;
                Self::polarity(p, *aux2, pb)?;
                self.with_bound(vec![(*aux1, a.clone())], |c| c.check(left, sigma))?;
                self.with_bound(vec![(*aux2, b.clone())], |c| c.check(right, sigma))
            }
            ProofKind::AllL { main, term, aux, sub } => {
                Self::polarity(p, *aux, main.polarity())?;
                let f = self.lookup(p, *main)?;
                let pred = match (main.polarity(), view(&f)) {
                    (Polarity::Neg, FormulaView::All(pred)) | (Polarity::Pos, FormulaView::Ex(pred)) => pred.clone(),
                    (Polarity::Neg, _) => return Err(Self::connective(p, *main, "∀", &f)),
                    (Polarity::Pos, _) => return Err(Self::connective(p, *main, "∃", &f)),
                };
                let t = inst(term, sigma);
                let dom = pred.ty().and_then(|t| t.as_arrow()).map(|(a, _)| a.clone());
                if t.ty().is_none() || t.ty() != dom.as_ref() {
                    return Err(err(
                        p,
                        TypeErrorKind::IllTypedExpr {
                            expr: term.clone(),
                            expected: dom,
                        },
                    ));
                }
                let body = instantiate(&pred, &t);
                self.with_bound(vec![(*aux, body)], |c| c.check(sub, sigma))
            }
            ProofKind::AllR { main, eigen, aux, sub } => {
                Self::polarity(p, *aux, main.polarity())?;
                let f = self.lookup(p, *main)?;
                let pred = match (main.polarity(), view(&f)) {
                    (Polarity::Pos, FormulaView::All(pred)) | (Polarity::Neg, FormulaView::Ex(pred)) => pred.clone(),
                    (Polarity::Pos, _) => return Err(Self::connective(p, *main, "∀", &f)),
                    (Polarity::Neg, _) => return Err(Self::connective(p, *main, "∃", &f)),
                };
                let dom = pred.ty().and_then(|t| t.as_arrow()).map(|(a, _)| a.clone());
                if dom.as_ref() != Some(eigen.ty()) {
                    return Err(err(
                        p,
                        TypeErrorKind::IllTypedExpr {
                            expr: Expr::var(eigen.clone()),
                            expected: dom,
                        },
                    ));
                }
                let (y, inner) = self.eigen(p, eigen, sigma, &VarSet::empty())?;
                let body = instantiate(&pred, &Expr::var(y));
                self.with_bound(vec![(*aux, body)], |c| c.check(sub, &inner))
            }
            ProofKind::Eql {
                eq,
                main,
                left_to_right,
                context,
                aux,
                sub,
            } => {
                Self::polarity(p, *eq, Polarity::Neg)?;
                Self::polarity(p, *aux, main.polarity())?;
                let e = self.lookup(p, *eq)?;
                let FormulaView::Eq(t, s) = view(&e) else {
                    return Err(err(p, TypeErrorKind::EqualityShape { hyp: *eq, found: e.clone() }));
                };
                let (src, tgt) = if *left_to_right { (t, s) } else { (s, t) };
                let ctx_expr = inst(context, sigma);
                let expected_ty = t.ty().map(|a| Ty::arrow(a.clone(), Ty::o()));
                if ctx_expr.ty().is_none() || ctx_expr.ty() != expected_ty.as_ref() {
                    return Err(err(
                        p,
                        TypeErrorKind::IllTypedExpr {
                            expr: context.clone(),
                            expected: expected_ty,
                        },
                    ));
                }
                let f = self.lookup(p, *main)?;
                Self::same(p, &instantiate(&ctx_expr, src), &f)?;
                let premise = instantiate(&ctx_expr, tgt);
                self.with_bound(vec![(*aux, premise)], |c| c.check(sub, sigma))
            }
            ProofKind::Ind {
                main,
                motive,
                target,
                base_aux,
                base,
                eigen,
                step_hyp,
                step_concl,
                step,
            } => {
                Self::polarity(p, *main, Polarity::Pos)?;
                Self::polarity(p, *base_aux, Polarity::Pos)?;
                Self::polarity(p, *step_hyp, Polarity::Neg)?;
                Self::polarity(p, *step_concl, Polarity::Pos)?;
                let t = inst(target, sigma);
                if !t.ty().is_some_and(Ty::is_nat) {
                    return Err(err(p, TypeErrorKind::IndTarget { found: t.ty().cloned() }));
                }
                if !eigen.ty().is_nat() {
                    return Err(err(
                        p,
                        TypeErrorKind::IllTypedExpr {
                            expr: Expr::var(eigen.clone()),
                            expected: Some(Ty::nat()),
                        },
                    ));
                }
                let phi = inst(motive, sigma);
                Self::well_typed(p, &phi, &Ty::arrow(Ty::nat(), Ty::o()))?;
                let f = self.lookup(p, *main)?;
                Self::same(p, &instantiate(&phi, &t), &f)?;
                let zero = instantiate(&phi, &Expr::zero());
                self.with_bound(vec![(*base_aux, zero)], |c| c.check(base, sigma))?;
                let (y, inner) = self.eigen(p, eigen, sigma, phi.free_vars())?;
                let yv = Expr::var(y);
                let binds = vec![
                    (*step_hyp, instantiate(&phi, &yv)),
                    (*step_concl, instantiate(&phi, &Expr::succ(yv))),
                ];
                self.with_bound(binds, |c| c.check(step, &inner))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Const;

    fn h(v: i32) -> Hyp {
        Hyp::new(v).unwrap()
    }

    fn pred(name: &str, ty: Ty) -> Expr {
        Expr::cnst(Const::new(name, Ty::arrow(ty, Ty::o())))
    }

    fn a(name: &str) -> Expr {
        Expr::cnst(Const::new(name, Ty::i()))
    }

    #[test]
    fn axiom_and_top() {
        let p = pred("P", Ty::i());
        let pa = Expr::app(p.clone(), a("a"));
        let ctx = LocalContext::new().with(h(-1), pa.clone()).with(h(1), pa.clone());
        assert!(check_closed(&Proof::ax(h(-1), h(1)), &ctx).is_ok());
        let top = LocalContext::new().with(h(1), Expr::top());
        assert!(check_closed(&Proof::top_r(h(1)), &top).is_ok());
        let bot = LocalContext::new().with(h(-1), Expr::bot());
        assert!(check_closed(&Proof::top_r(h(-1)), &bot).is_ok());
        let bad = LocalContext::new()
            .with(h(-1), pa)
            .with(h(1), Expr::app(p, a("b")));
        let e = check_closed(&Proof::ax(h(-1), h(1)), &bad).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::FormulaMismatch { .. }));
    }

    #[test]
    fn eigenvariable_violation() {
        let x = Var::new("x", Ty::i());
        let p = pred("P", Ty::i());
        let px = Expr::app(p.clone(), Expr::var(x.clone()));
        let all = Expr::all(x.clone(), px.clone());
        let ctx = LocalContext::new().with(h(1), all.clone()).with(h(-1), px.clone());
        let pr = Proof::all_r(h(1), x.clone(), h(2), Proof::ax(h(-1), h(2)));
        let e = check_closed(&pr, &ctx).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::Eigenvariable { var: x.clone() });
        // Without x free in the context it checks.
        let ctx = LocalContext::new().with(h(1), all.clone()).with(h(-1), all);
        let pr = Proof::all_r(h(1), x.clone(), h(2), Proof::all_l(h(-1), Expr::var(x), h(-2), Proof::ax(h(-2), h(2))));
        assert!(check_closed(&pr, &ctx).is_ok());
    }

    #[test]
    fn eql_variants() {
        let p = pred("P", Ty::i());
        let z = Var::new("z", Ty::i());
        let ctxe = Expr::abs(z.clone(), Expr::app(p.clone(), Expr::var(z)));
        let (t, s) = (a("t"), a("s"));
        let eq = Expr::eq(t.clone(), s.clone());
        let (pt, ps) = (Expr::app(p.clone(), t.clone()), Expr::app(p.clone(), s.clone()));
        // Succedent, left-to-right: h2: P(t), premise h3: P(s).
        let ctx = LocalContext::new().with(h(-1), eq.clone()).with(h(2), pt.clone()).with(h(-4), ps.clone());
        let pr = Proof::eql(h(-1), h(2), true, ctxe.clone(), h(3), Proof::ax(h(-4), h(3)));
        assert!(check_closed(&pr, &ctx).is_ok());
        // Antecedent, right-to-left on P(s): premise aux: P(t).
        let ctx = LocalContext::new().with(h(-1), eq.clone()).with(h(-2), ps.clone()).with(h(4), pt.clone());
        let pr = Proof::eql(h(-1), h(-2), false, ctxe.clone(), h(-3), Proof::ax(h(-3), h(4)));
        assert!(check_closed(&pr, &ctx).is_ok());
        // Wrong direction fails.
        let pr = Proof::eql(h(-1), h(-2), true, ctxe.clone(), h(-3), Proof::ax(h(-3), h(4)));
        assert!(check_closed(&pr, &ctx).is_err());
        // Non-equation.
        let ctx = LocalContext::new().with(h(-1), pt.clone()).with(h(2), pt);
        let pr = Proof::eql(h(-1), h(2), true, ctxe, h(3), Proof::ax(h(-1), h(3)));
        let e = check_closed(&pr, &ctx).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::EqualityShape { .. }));
    }

    #[test]
    fn end_sequent_examples() {
        let (f, g) = (Expr::top(), Expr::bot());
        let s = end_sequent(&LocalContext::new().with(h(-1), f.clone()).with(h(1), g.clone()));
        assert!(s.same_as(&Sequent::new(vec![f.clone()], vec![g])));
        assert_eq!(end_sequent(&LocalContext::new()).to_string(), "⊢");
        let s = end_sequent(&LocalContext::new().with(h(-1), f.clone()).with(h(-2), f.clone()));
        assert_eq!(s.antecedent.len(), 2);
        assert!(!s.same_as(&Sequent::new(vec![f], vec![])));
    }

    #[test]
    fn substitution_parameter_renames_eigenvariable() {
        // AllR(+1, x, +2: AllL(-1, y, -3: Ax(-3, +2)))  under σ = [y\x]
        // against ∀x P(x) ⊢ ∀x P(x) is ill-typed (y instantiated to x is
        // not the eigenvariable), but the binder itself must not capture.
        let x = Var::new("x", Ty::i());
        let y = Var::new("y", Ty::i());
        let p = pred("P", Ty::i());
        let all = Expr::all(x.clone(), Expr::app(p.clone(), Expr::var(x.clone())));
        let pr = Proof::all_r(
            h(1),
            x.clone(),
            h(2),
            Proof::all_l(h(-1), Expr::var(x.clone()), h(-3), Proof::ax(h(-3), h(2))),
        );
        let ctx = LocalContext::new().with(h(-1), all.clone()).with(h(1), all);
        let sigma = Substitution::single(y.clone(), Expr::var(x.clone())).unwrap();
        assert!(check(&pr, &sigma, &ctx).is_ok());
        let pr2 = Proof::all_r(
            h(1),
            x.clone(),
            h(2),
            Proof::all_l(h(-1), Expr::var(y), h(-3), Proof::ax(h(-3), h(2))),
        );
        assert!(check(&pr2, &sigma, &ctx).is_err());
    }
}
