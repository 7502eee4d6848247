//! Sequent trees with explicit structural rules.

use std::fmt;

use crate::formula::{view, FormulaView};
use crate::lkt::Hyp;
use crate::term::{alpha_beta_eq, beta_normalize, fresh_variant, instantiate, subst_apply, Expr, Substitution, Var, VarSet};
use crate::typing::LocalContext;

/// An inference of the tree calculus.
///
/// Formula occurrences are labelled like hypotheses: negative labels are
/// in the antecedent, positive ones in the succedent. Two-premise logical
/// rules share their context; the cut is context-splitting, so its
/// premises have disjoint labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Axiom { ante: Hyp, succ: Hyp },
    TopR { main: Hyp },
    BotL { main: Hyp },
    Weaken { occ: Hyp },
    /// The premise has `keep` and `drop` with the same formula.
    Contract { keep: Hyp, drop: Hyp },
    NotL { main: Hyp, aux: Hyp },
    NotR { main: Hyp, aux: Hyp },
    AndL { main: Hyp, aux1: Hyp, aux2: Hyp },
    AndR { main: Hyp, aux1: Hyp, aux2: Hyp },
    OrL { main: Hyp, aux1: Hyp, aux2: Hyp },
    OrR { main: Hyp, aux1: Hyp, aux2: Hyp },
    ImpL { main: Hyp, aux1: Hyp, aux2: Hyp },
    ImpR { main: Hyp, aux1: Hyp, aux2: Hyp },
    AllL { main: Hyp, term: Expr, aux: Hyp },
    AllR { main: Hyp, eigen: Var, aux: Hyp },
    ExL { main: Hyp, eigen: Var, aux: Hyp },
    ExR { main: Hyp, term: Expr, aux: Hyp },
    Cut { formula: Expr, left: Hyp, right: Hyp },
}

impl Rule {
    /// The principal occurrence in the conclusion.
    pub fn main(&self) -> Option<Hyp> {
        use Rule::*;
        match self {
            Axiom { .. } | Cut { .. } | Contract { .. } => None,
            Weaken { occ } => Some(*occ),
            TopR { main }
            | BotL { main }
            | NotL { main, .. }
            | NotR { main, .. }
            | AndL { main, .. }
            | AndR { main, .. }
            | OrL { main, .. }
            | OrR { main, .. }
            | ImpL { main, .. }
            | ImpR { main, .. }
            | AllL { main, .. }
            | AllR { main, .. }
            | ExL { main, .. }
            | ExR { main, .. } => Some(*main),
        }
    }

    /// Occurrences of premise `i` that do not reach the conclusion.
    pub fn bound(&self, i: usize) -> Vec<Hyp> {
        use Rule::*;
        match (self, i) {
            (Contract { drop, .. }, 0) => vec![*drop],
            (NotL { aux, .. } | NotR { aux, .. }, 0) => vec![*aux],
            (AndL { aux1, aux2, .. } | OrR { aux1, aux2, .. } | ImpR { aux1, aux2, .. }, 0) => vec![*aux1, *aux2],
            (AndR { aux1, .. } | OrL { aux1, .. } | ImpL { aux1, .. }, 0) => vec![*aux1],
            (AndR { aux2, .. } | OrL { aux2, .. } | ImpL { aux2, .. }, 1) => vec![*aux2],
            (AllL { aux, .. } | AllR { aux, .. } | ExL { aux, .. } | ExR { aux, .. }, 0) => vec![*aux],
            (Cut { left, .. }, 0) => vec![*left],
            (Cut { right, .. }, 1) => vec![*right],
            _ => vec![],
        }
    }

    pub fn arity(&self) -> usize {
        use Rule::*;
        match self {
            Axiom { .. } | TopR { .. } | BotL { .. } => 0,
            AndR { .. } | OrL { .. } | ImpL { .. } | Cut { .. } => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        use Rule::*;
        match self {
            Axiom { .. } => "ax",
            TopR { .. } => "⊤R",
            BotL { .. } => "⊥L",
            Weaken { .. } => "w",
            Contract { .. } => "c",
            NotL { .. } => "¬L",
            NotR { .. } => "¬R",
            AndL { .. } => "∧L",
            AndR { .. } => "∧R",
            OrL { .. } => "∨L",
            OrR { .. } => "∨R",
            ImpL { .. } => "→L",
            ImpR { .. } => "→R",
            AllL { .. } => "∀L",
            AllR { .. } => "∀R",
            ExL { .. } => "∃L",
            ExR { .. } => "∃R",
            Cut { .. } => "cut",
        }
    }

    pub fn eigen(&self) -> Option<&Var> {
        match self {
            Rule::AllR { eigen, .. } | Rule::ExL { eigen, .. } => Some(eigen),
            _ => None,
        }
    }

    /// Applies `f` to every label the rule mentions in its conclusion.
    pub(crate) fn map_main(&self, f: &dyn Fn(Hyp) -> Hyp) -> Rule {
        use Rule::*;
        let mut r = self.clone();
        match &mut r {
            Axiom { ante, succ } => {
                *ante = f(*ante);
                *succ = f(*succ);
            }
            Contract { keep, .. } => *keep = f(*keep),
            Cut { .. } => {}
            Weaken { occ } => *occ = f(*occ),
            TopR { main }
            | BotL { main }
            | NotL { main, .. }
            | NotR { main, .. }
            | AndL { main, .. }
            | AndR { main, .. }
            | OrL { main, .. }
            | OrR { main, .. }
            | ImpL { main, .. }
            | ImpR { main, .. }
            | AllL { main, .. }
            | AllR { main, .. }
            | ExL { main, .. }
            | ExR { main, .. } => *main = f(*main),
        }
        r
    }

    /// Applies `f` to the labels bound in the premises.
    pub(crate) fn map_bound(&self, f: &dyn Fn(Hyp) -> Hyp) -> Rule {
        use Rule::*;
        let mut r = self.clone();
        match &mut r {
            Axiom { .. } | TopR { .. } | BotL { .. } | Weaken { .. } => {}
            Contract { drop, .. } => *drop = f(*drop),
            NotL { aux, .. }
            | NotR { aux, .. }
            | AllL { aux, .. }
            | AllR { aux, .. }
            | ExL { aux, .. }
            | ExR { aux, .. } => *aux = f(*aux),
            AndL { aux1, aux2, .. }
            | AndR { aux1, aux2, .. }
            | OrL { aux1, aux2, .. }
            | OrR { aux1, aux2, .. }
            | ImpL { aux1, aux2, .. }
            | ImpR { aux1, aux2, .. } => {
                *aux1 = f(*aux1);
                *aux2 = f(*aux2);
            }
            Cut { left, right, .. } => {
                *left = f(*left);
                *right = f(*right);
            }
        }
        r
    }

    pub(crate) fn with_eigen(&self, v: Var) -> Rule {
        let mut r = self.clone();
        if let Rule::AllR { eigen, .. } | Rule::ExL { eigen, .. } = &mut r {
            *eigen = v;
        }
        r
    }
}

/// A sequent proof tree with the full conclusion at every node.
#[derive(Clone, PartialEq)]
pub struct LKTree {
    pub rule: Rule,
    pub concl: LocalContext,
    pub prems: Vec<LKTree>,
}

impl LKTree {
    /// `A ⊢ A`
    pub fn axiom(ante: Hyp, succ: Hyp, formula: Expr) -> LKTree {
        LKTree {
            rule: Rule::Axiom { ante, succ },
            concl: LocalContext::new().with(ante, formula.clone()).with(succ, formula),
            prems: vec![],
        }
    }

    /// Builds a node whose conclusion is computed from the premises; `main`
    /// supplies the principal formula (for weakening, the added formula).
    pub fn infer(rule: Rule, main: Option<Expr>, prems: Vec<LKTree>) -> LKTree {
        let mut concl = LocalContext::new();
        if let Rule::Cut { .. } = rule {
            for (i, p) in prems.iter().enumerate() {
                let bound = rule.bound(i);
                for (h, e) in p.concl.iter() {
                    if !bound.contains(&h) {
                        concl.insert(h, e.clone());
                    }
                }
            }
        } else if let Some(p) = prems.first() {
            let bound = rule.bound(0);
            for (h, e) in p.concl.iter() {
                if !bound.contains(&h) {
                    concl.insert(h, e.clone());
                }
            }
        }
        if let (Some(h), Some(e)) = (rule.main(), main) {
            concl.insert(h, e);
        }
        LKTree { rule, concl, prems }
    }

    pub fn weaken(self, occ: Hyp, formula: Expr) -> LKTree {
        LKTree::infer(Rule::Weaken { occ }, Some(formula), vec![self])
    }

    /// Weakens with every occurrence of `extra` not already present.
    pub fn weaken_to(mut self, extra: &LocalContext) -> LKTree {
        for (h, e) in extra.iter() {
            if !self.concl.contains(h) {
                self = self.weaken(h, e.clone());
            }
        }
        self
    }

    pub fn contract(self, keep: Hyp, drop: Hyp) -> LKTree {
        LKTree::infer(Rule::Contract { keep, drop }, None, vec![self])
    }

    pub fn size(&self) -> usize {
        1 + self.prems.iter().map(LKTree::size).sum::<usize>()
    }

    pub fn count(&self, pred: &dyn Fn(&Rule) -> bool) -> usize {
        usize::from(pred(&self.rule)) + self.prems.iter().map(|p| p.count(pred)).sum::<usize>()
    }

    pub fn cut_count(&self) -> usize {
        self.count(&|r| matches!(r, Rule::Cut { .. }))
    }

    pub fn max_label(&self) -> u32 {
        let here = self.concl.hyps().map(Hyp::abs).max().unwrap_or(0);
        let below = self.prems.iter().map(LKTree::max_label).max().unwrap_or(0);
        here.max(below)
    }

    /// Checks every inference; returns the first offending rule.
    pub fn verify(&self) -> Result<(), String> {
        for p in &self.prems {
            p.verify()?;
        }
        verify_node(self).map_err(|m| format!("{}: {m}", self.rule.name()))
    }
}

fn verify_node(t: &LKTree) -> Result<(), String> {
    use Rule::*;
    if t.prems.len() != t.rule.arity() {
        return Err("wrong number of premises".into());
    }
    let get = |ctx: &LocalContext, h: Hyp| ctx.get(h).cloned().ok_or_else(|| format!("missing occurrence {h}"));
    let same = |a: &Expr, b: &Expr| {
        if alpha_beta_eq(a, b) {
            Ok(())
        } else {
            Err(format!("{a} differs from {b}"))
        }
    };
    // Context agreement between conclusion and premises.
    let main = t.rule.main();
    for (i, p) in t.prems.iter().enumerate() {
        let bound = t.rule.bound(i);
        for b in &bound {
            get(&p.concl, *b)?;
        }
        for (h, e) in p.concl.iter() {
            if bound.contains(&h) {
                continue;
            }
            if Some(h) == main {
                return Err(format!("principal {h} also in premise"));
            }
            same(&get(&t.concl, h)?, e)?;
        }
    }
    let expected = match &t.rule {
        Cut { .. } => t.prems.iter().enumerate().map(|(i, p)| p.concl.len() - t.rule.bound(i).len()).sum(),
        Axiom { .. } => 2,
        TopR { .. } | BotL { .. } => 1,
        _ => t.prems[0].concl.len() - t.rule.bound(0).len() + usize::from(main.is_some()),
    };
    if t.concl.len() != expected {
        return Err("conclusion has extra occurrences".into());
    }
    if t.rule.arity() == 2 && !matches!(t.rule, Cut { .. }) {
        let ctx = |i: usize| {
            let bound = t.rule.bound(i);
            t.prems[i].concl.hyps().filter(|h| !bound.contains(h)).collect::<Vec<_>>()
        };
        if ctx(0) != ctx(1) {
            return Err("premise contexts differ".into());
        }
    }
    let pol = |h: Hyp, neg: bool| {
        if h.is_neg() == neg {
            Ok(())
        } else {
            Err(format!("occurrence {h} on the wrong side"))
        }
    };
    let prem = |i: usize, h: Hyp| get(&t.prems[i].concl, h);
    match &t.rule {
        Axiom { ante, succ } => {
            pol(*ante, true)?;
            pol(*succ, false)?;
            same(&get(&t.concl, *ante)?, &get(&t.concl, *succ)?)
        }
        TopR { main } => {
            pol(*main, false)?;
            matches!(view(&get(&t.concl, *main)?), FormulaView::Top).then_some(()).ok_or("not ⊤".into())
        }
        BotL { main } => {
            pol(*main, true)?;
            matches!(view(&get(&t.concl, *main)?), FormulaView::Bot).then_some(()).ok_or("not ⊥".into())
        }
        Weaken { occ } => get(&t.concl, *occ).map(|_| ()),
        Contract { keep, drop } => {
            pol(*drop, keep.is_neg())?;
            same(&prem(0, *keep)?, &prem(0, *drop)?)
        }
        NotL { main, aux } | NotR { main, aux } => {
            let left = matches!(t.rule, NotL { .. });
            pol(*main, left)?;
            pol(*aux, !left)?;
            same(&get(&t.concl, *main)?, &Expr::not(prem(0, *aux)?))
        }
        AndL { main, aux1, aux2 } | OrR { main, aux1, aux2 } | ImpR { main, aux1, aux2 } => {
            let (build, neg1, neg2): (fn(Expr, Expr) -> Expr, bool, bool) = match t.rule {
                AndL { .. } => (Expr::and, true, true),
                OrR { .. } => (Expr::or, false, false),
                _ => (Expr::imp, true, false),
            };
            pol(*main, matches!(t.rule, AndL { .. }))?;
            pol(*aux1, neg1)?;
            pol(*aux2, neg2)?;
            same(&get(&t.concl, *main)?, &build(prem(0, *aux1)?, prem(0, *aux2)?))
        }
        AndR { main, aux1, aux2 } | OrL { main, aux1, aux2 } | ImpL { main, aux1, aux2 } => {
            let (build, neg1, neg2): (fn(Expr, Expr) -> Expr, bool, bool) = match t.rule {
                AndR { .. } => (Expr::and, false, false),
                OrL { .. } => (Expr::or, true, true),
                _ => (Expr::imp, false, true),
            };
            pol(*main, !matches!(t.rule, AndR { .. }))?;
            pol(*aux1, neg1)?;
            pol(*aux2, neg2)?;
            same(&get(&t.concl, *main)?, &build(prem(0, *aux1)?, prem(1, *aux2)?))
        }
        AllL { main, term, aux } | ExR { main, term, aux } => {
            let left = matches!(t.rule, AllL { .. });
            pol(*main, left)?;
            pol(*aux, left)?;
            let f = get(&t.concl, *main)?;
            let pred = match (view(&f), left) {
                (FormulaView::All(p), true) | (FormulaView::Ex(p), false) => p.clone(),
                _ => return Err(format!("{f} has the wrong quantifier")),
            };
            same(&instantiate(&pred, term), &prem(0, *aux)?)
        }
        AllR { main, eigen, aux } | ExL { main, eigen, aux } => {
            let left = matches!(t.rule, ExL { .. });
            pol(*main, left)?;
            pol(*aux, left)?;
            let f = get(&t.concl, *main)?;
            let pred = match (view(&f), left) {
                (FormulaView::Ex(p), true) | (FormulaView::All(p), false) => p.clone(),
                _ => return Err(format!("{f} has the wrong quantifier")),
            };
            if t.concl.iter().any(|(_, e)| e.free_vars().contains(eigen)) {
                return Err(format!("eigenvariable {eigen} free in conclusion"));
            }
            same(&instantiate(&pred, &Expr::var(eigen.clone())), &prem(0, *aux)?)
        }
        Cut { formula, left, right } => {
            pol(*left, false)?;
            pol(*right, true)?;
            same(&prem(0, *left)?, formula)?;
            same(&prem(1, *right)?, formula)?;
            let l: Vec<Hyp> = t.prems[0].concl.hyps().filter(|h| h != left).collect();
            if t.prems[1].concl.hyps().any(|h| h != *right && l.contains(&h)) {
                return Err("cut premises share an occurrence".into());
            }
            Ok(())
        }
    }
}

/// Capture-avoiding substitution in every formula and term of a tree.
pub fn subst_tree(t: &LKTree, s: &Substitution) -> LKTree {
    if s.is_empty() {
        return t.clone();
    }
    let concl: LocalContext = t.concl.iter().map(|(h, e)| (h, beta_normalize(&subst_apply(e, s)))).collect();
    let mut rule = t.rule.clone();
    let mut inner = s.clone();
    match &mut rule {
        Rule::AllL { term, .. } | Rule::ExR { term, .. } => *term = subst_apply(term, s),
        Rule::Cut { formula, .. } => *formula = beta_normalize(&subst_apply(formula, s)),
        Rule::AllR { eigen, .. } | Rule::ExL { eigen, .. } => {
            inner.remove(eigen);
            let range = inner.range_vars();
            if range.contains(eigen) {
                let avoid: VarSet = range.union(&t.concl.free_vars());
                let fresh = fresh_variant(eigen, avoid.iter());
                inner.insert_unchecked(eigen.clone(), Expr::var(fresh.clone()));
                *eigen = fresh;
            }
        }
        _ => {}
    }
    LKTree {
        rule,
        concl,
        prems: t.prems.iter().map(|p| subst_tree(p, &inner)).collect(),
    }
}

impl fmt::Display for LKTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &LKTree, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let labelled: Vec<String> = t.concl.iter().map(|(h, e)| format!("{h}:{e}")).collect();
            writeln!(f, "{:indent$}{} {}", "", t.rule.name(), labelled.join(", "), indent = 2 * depth)?;
            for p in &t.prems {
                go(p, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

impl fmt::Debug for LKTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
