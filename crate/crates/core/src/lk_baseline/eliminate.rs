//! Reductive cut-elimination on sequent trees.
//!
//! Cuts are removed uppermost first. A cut on `A` between cut-free premises
//! is pushed up the left premise along every ancestor of the cut formula
//! (through contractions, which is where the other premise gets copied);
//! at each place where `A` is introduced it is pushed up the right premise
//! the same way, and a pair of principal occurrences is replaced by cuts on
//! the immediate subformulas. A copied premise keeps the labels of the
//! context it shares with the tree it is grafted onto, so the two copies of
//! that context are identified as in Gentzen's mix; explicit contractions
//! appear only where an inference introduces an occurrence that is already
//! there.

use std::collections::HashMap;

use crate::lkt::Hyp;
use crate::normalize::{Budget, BudgetExhausted};
use crate::term::{fresh_variant, Expr, Substitution, VarSet};
use crate::typing::LocalContext;

use super::translate::Labels;
use super::tree::{subst_tree, LKTree, Rule};

/// Renames occurrences of the conclusion, following them up to where they
/// are introduced.
pub(crate) fn relabel(mut t: LKTree, map: &HashMap<Hyp, Hyp>) -> LKTree {
    let pairs: Vec<(Hyp, Hyp)> = map.iter().map(|(k, v)| (*k, *v)).collect();
    relabel_in(&mut t, &pairs);
    t
}

fn lookup(pairs: &[(Hyp, Hyp)], h: Hyp) -> Option<Hyp> {
    pairs.iter().find(|(k, _)| *k == h).map(|(_, v)| *v)
}

fn rename_concl(concl: &mut LocalContext, pairs: &[(Hyp, Hyp)]) {
    let moved: Vec<(Hyp, crate::term::Expr)> = pairs
        .iter()
        .filter_map(|(k, v)| concl.remove(*k).map(|e| (*v, e)))
        .collect();
    for (h, e) in moved {
        concl.insert(h, e);
    }
}

/// The part of `pairs` that passes from `t`'s conclusion to premise `i`.
fn passed_up(t: &LKTree, i: usize, pairs: &[(Hyp, Hyp)]) -> Vec<(Hyp, Hyp)> {
    let main = t.rule.main();
    let bound = t.rule.bound(i);
    pairs
        .iter()
        .copied()
        .filter(|(k, _)| Some(*k) != main && !bound.contains(k) && t.prems[i].concl.contains(*k))
        .collect()
}

fn relabel_in(t: &mut LKTree, pairs: &[(Hyp, Hyp)]) {
    let pairs: Vec<(Hyp, Hyp)> = pairs.iter().copied().filter(|(k, _)| t.concl.contains(*k)).collect();
    if pairs.is_empty() {
        return;
    }
    for i in 0..t.prems.len() {
        let sub = passed_up(t, i, &pairs);
        relabel_in(&mut t.prems[i], &sub);
    }
    t.rule = t.rule.map_main(&|h| lookup(&pairs, h).unwrap_or(h));
    rename_concl(&mut t.concl, &pairs);
}

fn without(ctx: &LocalContext, h: Hyp) -> LocalContext {
    let mut c = ctx.clone();
    c.remove(h);
    c
}

fn formula_vars(ctx: &LocalContext) -> VarSet {
    ctx.free_vars()
}

pub(crate) struct Engine<'b> {
    labels: Labels,
    budget: &'b mut Budget,
}

type Res = Result<LKTree, BudgetExhausted>;

impl<'b> Engine<'b> {
    pub(crate) fn new(t: &LKTree, budget: &'b mut Budget) -> Engine<'b> {
        Engine {
            labels: Labels::above(t.max_label()),
            budget,
        }
    }

    pub(crate) fn eliminate(&mut self, t: LKTree) -> Res {
        self.budget.tick()?;
        let LKTree { rule, concl, prems } = t;
        let prems = prems.into_iter().map(|p| self.eliminate(p)).collect::<Result<Vec<_>, _>>()?;
        if let Rule::Cut { left, right, .. } = rule {
            return self.cut_merge(&prems[0], left, &prems[1], right);
        }
        Ok(LKTree { rule, concl, prems })
    }

    /// Cut-free proof of `(l - lh) ∪ (r - rh)`. Occurrences with the same
    /// label in both stay identified, as in a mix.
    fn cut_merge(&mut self, l: &LKTree, lh: Hyp, r: &LKTree, rh: Hyp) -> Res {
        let mut l = l.clone();
        let mut r = r.clone();
        let mut lh = lh;
        let mut rh = rh;
        if r.concl.contains(lh) {
            let f = self.labels.fresh(lh.polarity());
            relabel_in(&mut l, &[(lh, f)]);
            lh = f;
        }
        if l.concl.contains(rh) {
            let f = self.labels.fresh(rh.polarity());
            relabel_in(&mut r, &[(rh, f)]);
            rh = f;
        }
        debug_assert!(l.concl.iter().all(|(h, e)| r.concl.get(h).is_none_or(|f| f == e)));
        self.reduce_cut(l, lh, &r, rh)
    }

    /// `t` with `from` renamed to `to`; if `to` already occurs, the two
    /// occurrences are contracted.
    fn rename_into(&mut self, t: LKTree, from: Hyp, to: Hyp) -> LKTree {
        if t.concl.contains(to) {
            let f = self.labels.fresh(to.polarity());
            let t = self.relabel_safe(t, &HashMap::from([(from, f)]));
            t.contract(to, f)
        } else {
            self.relabel_safe(t, &HashMap::from([(from, to)]))
        }
    }

    /// [`relabel`] to labels that may be bound further up: such bindings are
    /// renamed first.
    fn relabel_safe(&mut self, mut t: LKTree, map: &HashMap<Hyp, Hyp>) -> LKTree {
        let pairs: Vec<(Hyp, Hyp)> = map.iter().map(|(k, v)| (*k, *v)).collect();
        self.relabel_safe_in(&mut t, &pairs);
        t
    }

    fn relabel_safe_in(&mut self, t: &mut LKTree, pairs: &[(Hyp, Hyp)]) {
        let pairs: Vec<(Hyp, Hyp)> = pairs.iter().copied().filter(|(k, _)| t.concl.contains(*k)).collect();
        if pairs.is_empty() {
            return;
        }
        for i in 0..t.prems.len() {
            let bound = t.rule.bound(i);
            let clashing: Vec<(Hyp, Hyp)> = bound
                .iter()
                .filter(|b| pairs.iter().any(|(_, v)| v == *b))
                .map(|b| (*b, self.labels.fresh(b.polarity())))
                .collect();
            if !clashing.is_empty() {
                relabel_in(&mut t.prems[i], &clashing);
                t.rule = t.rule.map_bound(&|h| if bound.contains(&h) { lookup(&clashing, h).unwrap_or(h) } else { h });
            }
            let sub = passed_up(t, i, &pairs);
            self.relabel_safe_in(&mut t.prems[i], &sub);
        }
        t.rule = t.rule.map_main(&|h| lookup(&pairs, h).unwrap_or(h));
        rename_concl(&mut t.concl, &pairs);
    }

    /// Requires `lh` not to occur in `r` and `rh` not in `l`.
    fn reduce_cut(&mut self, l: LKTree, lh: Hyp, r: &LKTree, rh: Hyp) -> Res {
        let ctx2 = without(&r.concl, rh);
        self.elim_left(l, vec![lh], &ctx2, r, rh)
    }

    /// Renames bound labels of `t`'s premises that occur in `forbidden`, and
    /// its eigenvariable if it occurs free in `ctx`.
    fn separate(&mut self, t: LKTree, forbidden: &LocalContext, ctx: &LocalContext) -> LKTree {
        let mut t = t;
        if let Some(y) = t.rule.eigen().cloned() {
            let fv = formula_vars(ctx);
            if fv.contains(&y) {
                let avoid = fv.union(&formula_vars(&t.concl)).insert(y.clone());
                let fresh = fresh_variant(&y, avoid.iter());
                let mut s = Substitution::new();
                s.insert_unchecked(y.clone(), Expr::var(fresh.clone()));
                t = LKTree {
                    rule: t.rule.with_eigen(fresh),
                    concl: t.concl,
                    prems: vec![subst_tree(&t.prems[0], &s)],
                };
            }
        }
        let clashing: Vec<Hyp> = (0..t.prems.len())
            .flat_map(|i| t.rule.bound(i))
            .filter(|h| forbidden.contains(*h))
            .collect();
        if clashing.is_empty() {
            return t;
        }
        let map: HashMap<Hyp, Hyp> = clashing.iter().map(|h| (*h, self.labels.fresh(h.polarity()))).collect();
        let prems = t.prems.into_iter().map(|p| relabel(p, &map)).collect();
        LKTree {
            rule: t.rule.map_bound(&|h| map.get(&h).copied().unwrap_or(h)),
            concl: t.concl,
            prems,
        }
    }

    /// Rebuilds an inference over premises that may have gained occurrences
    /// of its main formula: a weakening becomes redundant, and a logical rule
    /// introduces a fresh occurrence that is contracted with the old one.
    fn rebuild(&mut self, rule: Rule, concl: &LocalContext, prems: Vec<LKTree>) -> LKTree {
        let main = rule.main();
        let clash = main.filter(|m| {
            prems
                .iter()
                .enumerate()
                .any(|(i, p)| p.concl.contains(*m) && !rule.bound(i).contains(m))
        });
        let formula = main.and_then(|h| concl.get(h).cloned());
        match (clash, &rule) {
            (None, _) => LKTree::infer(rule, formula, prems),
            (Some(_), Rule::Weaken { .. }) => prems.into_iter().next().expect("one premise"),
            (Some(m), _) => {
                let f = self.labels.fresh(m.polarity());
                let rule = rule.map_main(&|h| if h == m { f } else { h });
                LKTree::infer(rule, formula, prems).contract(m, f)
            }
        }
    }

    /// Replaces the `tracked` succedent occurrences of the cut formula in
    /// `t` by cuts against `r` on `rh`; concludes `t - tracked ∪ ctx2`.
    fn elim_left(&mut self, t: LKTree, tracked: Vec<Hyp>, ctx2: &LocalContext, r: &LKTree, rh: Hyp) -> Res {
        self.budget.tick()?;
        let tracked: Vec<Hyp> = tracked.into_iter().filter(|h| t.concl.contains(*h)).collect();
        if tracked.is_empty() {
            return Ok(t.weaken_to(ctx2));
        }
        match &t.rule {
            Rule::Weaken { occ } if tracked.contains(occ) => {
                let rest = tracked.iter().copied().filter(|h| h != occ).collect();
                let prem = t.prems.into_iter().next().expect("one premise");
                return self.elim_left(prem, rest, ctx2, r, rh);
            }
            Rule::Contract { keep, drop } if tracked.contains(keep) => {
                let drop = *drop;
                let t = self.separate(t, &r.concl, ctx2);
                let drop = match &t.rule {
                    Rule::Contract { drop: d, .. } => *d,
                    _ => drop,
                };
                let mut more = tracked.clone();
                more.push(drop);
                let prem = t.prems.into_iter().next().expect("one premise");
                return self.elim_left(prem, more, ctx2, r, rh);
            }
            Rule::Axiom { ante, succ } if tracked.contains(succ) => {
                return Ok(self.rename_into(r.clone(), rh, *ante));
            }
            _ => {}
        }
        let t = self.separate(t, &r.concl, ctx2);
        let main = t.rule.main().filter(|m| tracked.contains(m));
        let prem_tracked: Vec<Hyp> = tracked.iter().copied().filter(|h| Some(*h) != main).collect();
        let LKTree { rule, concl, prems } = t;
        let prems = prems
            .into_iter()
            .map(|p| self.elim_left(p, prem_tracked.clone(), ctx2, r, rh))
            .collect::<Result<Vec<_>, _>>()?;
        let t2 = self.rebuild(rule, &concl, prems);
        let Some(m) = main else {
            return Ok(t2);
        };
        // `m` is principal: continue on the right with a copy of `r`.
        self.elim_right(r.clone(), vec![rh], &t2, m)
    }

    /// Replaces the `tracked` antecedent occurrences of the cut formula in
    /// `t` by cuts against `l`, whose last inference introduces it at `m`;
    /// concludes `t - tracked ∪ (l - m)`.
    fn elim_right(&mut self, t: LKTree, tracked: Vec<Hyp>, l: &LKTree, m: Hyp) -> Res {
        self.budget.tick()?;
        let ctx1 = without(&l.concl, m);
        let tracked: Vec<Hyp> = tracked.into_iter().filter(|h| t.concl.contains(*h)).collect();
        if tracked.is_empty() {
            return Ok(t.weaken_to(&ctx1));
        }
        match &t.rule {
            Rule::Weaken { occ } if tracked.contains(occ) => {
                let rest = tracked.iter().copied().filter(|h| h != occ).collect();
                let prem = t.prems.into_iter().next().expect("one premise");
                return self.elim_right(prem, rest, l, m);
            }
            Rule::Contract { keep, drop } if tracked.contains(keep) => {
                let drop = *drop;
                let t = self.separate(t, &l.concl, &ctx1);
                let drop = match &t.rule {
                    Rule::Contract { drop: d, .. } => *d,
                    _ => drop,
                };
                let mut more = tracked.clone();
                more.push(drop);
                let prem = t.prems.into_iter().next().expect("one premise");
                return self.elim_right(prem, more, l, m);
            }
            Rule::Axiom { ante, succ } if tracked.contains(ante) => {
                return Ok(self.rename_into(l.clone(), m, *succ));
            }
            _ => {}
        }
        let t = self.separate(t, &l.concl, &ctx1);
        let main = t.rule.main().filter(|h| tracked.contains(h));
        let prem_tracked: Vec<Hyp> = tracked.iter().copied().filter(|h| Some(*h) != main).collect();
        let LKTree { rule, concl, prems } = t;
        let prems = prems
            .into_iter()
            .map(|p| self.elim_right(p, prem_tracked.clone(), l, m))
            .collect::<Result<Vec<_>, _>>()?;
        let t2 = self.rebuild(rule, &concl, prems);
        let Some(rm) = main else {
            return Ok(t2);
        };
        self.principal(l, m, &t2, rm)
    }

    /// Both cut occurrences are principal; concludes `(l - m) ∪ (r - rm)`.
    fn principal(&mut self, l: &LKTree, m: Hyp, r: &LKTree, rm: Hyp) -> Res {
        self.budget.tick()?;
        match (&l.rule, &r.rule) {
            (Rule::Axiom { ante, .. }, _) => Ok(self.rename_into(r.clone(), rm, *ante)),
            (_, Rule::Axiom { succ, .. }) => Ok(self.rename_into(l.clone(), m, *succ)),
            (Rule::NotR { aux: a, .. }, Rule::NotL { aux: b, .. }) => {
                self.cut_merge(&r.prems[0], *b, &l.prems[0], *a)
            }
            (
                Rule::AndR { aux1: a1, aux2: a2, .. },
                Rule::AndL {
                    aux1: b1, aux2: b2, ..
                },
            ) => {
                let x = self.cut_merge(&l.prems[0], *a1, &r.prems[0], *b1)?;
                self.cut_merge(&l.prems[1], *a2, &x, *b2)
            }
            (
                Rule::OrR { aux1: a1, aux2: a2, .. },
                Rule::OrL {
                    aux1: b1, aux2: b2, ..
                },
            ) => {
                let x = self.cut_merge(&l.prems[0], *a1, &r.prems[0], *b1)?;
                self.cut_merge(&x, *a2, &r.prems[1], *b2)
            }
            (
                Rule::ImpR { aux1: a1, aux2: a2, .. },
                Rule::ImpL {
                    aux1: b1, aux2: b2, ..
                },
            ) => {
                // a1: A on the left of l's premise, b1: A on the right of r's first premise.
                let x = self.cut_merge(&l.prems[0], *a2, &r.prems[1], *b2)?;
                self.cut_merge(&r.prems[0], *b1, &x, *a1)
            }
            (Rule::AllR { eigen, aux: a, .. }, Rule::AllL { term, aux: b, .. }) => {
                let s = Substitution::single(eigen.clone(), term.clone()).expect("instance term has the bound type");
                let p = subst_tree(&l.prems[0], &s);
                self.cut_merge(&p, *a, &r.prems[0], *b)
            }
            (Rule::ExR { term, aux: a, .. }, Rule::ExL { eigen, aux: b, .. }) => {
                let s = Substitution::single(eigen.clone(), term.clone()).expect("instance term has the bound type");
                let q = subst_tree(&r.prems[0], &s);
                self.cut_merge(&l.prems[0], *a, &q, *b)
            }
            (lr, rr) => panic!("no principal reduction for {} against {}", lr.name(), rr.name()),
        }
    }
}

/// Cut-free tree with the same conclusion, by reductive cut-elimination.
pub fn gentzen_eliminate(t: &LKTree, budget: &mut Budget) -> Result<LKTree, BudgetExhausted> {
    Engine::new(t, budget).eliminate(t.clone())
}
