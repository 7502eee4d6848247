use std::collections::HashMap;

use crate::formula::{view, FormulaView};
use crate::lkt::{Hyp, Polarity, Proof, ProofKind};
use crate::typing::{scope_bindings, ContextStack, LocalContext};

use super::tree::{LKTree, Rule};
use super::LkError;

/// Hands out labels above every label seen so far.
#[derive(Debug, Clone)]
pub(crate) struct Labels {
    next: u32,
}

impl Labels {
    pub(crate) fn above(max: u32) -> Labels {
        Labels { next: max }
    }

    pub(crate) fn fresh(&mut self, pol: Polarity) -> Hyp {
        self.next += 1;
        Hyp::with_polarity(pol, self.next)
    }
}

fn max_hyp(p: &Proof, memo: &mut HashMap<usize, u32>) -> u32 {
    if let Some(m) = memo.get(&p.addr()) {
        return *m;
    }
    let mut m = p.main_hyps().into_iter().map(Hyp::abs).max().unwrap_or(0);
    for sc in p.scopes() {
        m = m.max(sc.hyps.iter().map(|h| h.abs()).max().unwrap_or(0));
        m = m.max(max_hyp(&sc.body, memo));
    }
    memo.insert(p.addr(), m);
    m
}

struct Translator {
    stack: ContextStack,
    labels: Labels,
}

/// Elaborates a proof term into a tree with explicit weakening and
/// contraction. The root concludes exactly `ctx`.
pub fn to_tree(p: &Proof, ctx: &LocalContext) -> Result<LKTree, LkError> {
    let max = max_hyp(p, &mut HashMap::new()).max(ctx.hyps().map(Hyp::abs).max().unwrap_or(0));
    let mut t = Translator {
        stack: ContextStack::new(ctx),
        labels: Labels::above(max),
    };
    let tree = t.build(p)?;
    Ok(tree.weaken_to(ctx))
}

impl Translator {
    fn formula(&self, p: &Proof, h: Hyp) -> Result<crate::term::Expr, LkError> {
        self.stack.get(h).cloned().ok_or_else(|| LkError::IllTyped { node: p.label() })
    }

    /// Concludes exactly the free hypotheses of `p`.
    fn build(&mut self, p: &Proof) -> Result<LKTree, LkError> {
        let ill_typed = || LkError::IllTyped { node: p.label() };
        match p.kind() {
            ProofKind::Ax { ante, succ } => return Ok(LKTree::axiom(*ante, *succ, self.formula(p, *ante)?)),
            ProofKind::TopR { main } => {
                let rule = match main.polarity() {
                    Polarity::Pos => Rule::TopR { main: *main },
                    Polarity::Neg => Rule::BotL { main: *main },
                };
                return Ok(LKTree::infer(rule, Some(self.formula(p, *main)?), vec![]));
            }
            ProofKind::Rfl { .. } | ProofKind::Eql { .. } | ProofKind::Ind { .. } => {
                return Err(LkError::UnsupportedNode { node: p.label() });
            }
            _ => {}
        }
        let bindings = scope_bindings(p, &self.stack).ok_or_else(ill_typed)?;
        let mut prems = Vec::new();
        for (sc, binds) in p.scopes().into_iter().zip(bindings) {
            let mark = self.stack.mark();
            for (h, e) in &binds {
                self.stack.push(*h, e.clone());
            }
            let sub = self.build(&sc.body);
            self.stack.pop_to(mark);
            // Unused auxiliary formulas are weakened in.
            let mut sub = sub?;
            for (h, e) in binds {
                if !sub.concl.contains(h) {
                    sub = sub.weaken(h, e);
                }
            }
            prems.push(sub);
        }
        if let ProofKind::Cut {
            formula,
            left_hyp,
            right_hyp,
            ..
        } = p.kind()
        {
            return Ok(self.cut(formula.clone(), *left_hyp, *right_hyp, prems));
        }
        let main = p.main_hyps()[0];
        let main_formula = self.formula(p, main)?;
        let rule = self.rule(p, &main_formula).ok_or_else(ill_typed)?;
        if prems.len() == 2 {
            let ctx = |t: &LKTree, i: usize| {
                let bound = rule.bound(i);
                t.concl
                    .iter()
                    .filter(|(h, _)| !bound.contains(h))
                    .map(|(h, e)| (h, e.clone()))
                    .collect::<LocalContext>()
            };
            let (c0, c1) = (ctx(&prems[0], 0), ctx(&prems[1], 1));
            let right = prems.pop().expect("two premises").weaken_to(&c0);
            let left = prems.pop().expect("two premises").weaken_to(&c1);
            prems = vec![left, right];
        }
        // A main formula that is still used above gets contracted.
        let reused = prems
            .iter()
            .enumerate()
            .any(|(i, t)| t.concl.contains(main) && !rule.bound(i).contains(&main));
        if reused {
            let fresh = self.labels.fresh(main.polarity());
            let rule = rule.map_main(&|h| if h == main { fresh } else { h });
            Ok(LKTree::infer(rule, Some(main_formula), prems).contract(main, fresh))
        } else {
            Ok(LKTree::infer(rule, Some(main_formula), prems))
        }
    }

    fn rule(&self, p: &Proof, main_formula: &crate::term::Expr) -> Option<Rule> {
        let v = view(main_formula);
        Some(match p.kind() {
            ProofKind::NegL { main, aux, .. } => Rule::NotL { main: *main, aux: *aux },
            ProofKind::NegR { main, aux, .. } => Rule::NotR { main: *main, aux: *aux },
            ProofKind::AndL { main, aux1, aux2, .. } => {
                let (main, aux1, aux2) = (*main, *aux1, *aux2);
                match (main.polarity(), v) {
                    (Polarity::Neg, FormulaView::And(..)) => Rule::AndL { main, aux1, aux2 },
                    (Polarity::Pos, FormulaView::Or(..)) => Rule::OrR { main, aux1, aux2 },
                    (Polarity::Pos, FormulaView::Imp(..)) => Rule::ImpR { main, aux1, aux2 },
                    _ => return None,
                }
            }
            ProofKind::AndR { main, aux1, aux2, .. } => {
                let (main, aux1, aux2) = (*main, *aux1, *aux2);
                match (main.polarity(), v) {
                    (Polarity::Pos, FormulaView::And(..)) => Rule::AndR { main, aux1, aux2 },
                    (Polarity::Neg, FormulaView::Or(..)) => Rule::OrL { main, aux1, aux2 },
                    (Polarity::Neg, FormulaView::Imp(..)) => Rule::ImpL { main, aux1, aux2 },
                    _ => return None,
                }
            }
            ProofKind::AllL { main, term, aux, .. } => match main.polarity() {
                Polarity::Neg => Rule::AllL {
                    main: *main,
                    term: term.clone(),
                    aux: *aux,
                },
                Polarity::Pos => Rule::ExR {
                    main: *main,
                    term: term.clone(),
                    aux: *aux,
                },
            },
            ProofKind::AllR { main, eigen, aux, .. } => match main.polarity() {
                Polarity::Pos => Rule::AllR {
                    main: *main,
                    eigen: eigen.clone(),
                    aux: *aux,
                },
                Polarity::Neg => Rule::ExL {
                    main: *main,
                    eigen: eigen.clone(),
                    aux: *aux,
                },
            },
            _ => return None,
        })
    }

    /// Context-splitting cut followed by contractions of the shared context.
    fn cut(&mut self, formula: crate::term::Expr, lh: Hyp, rh: Hyp, mut prems: Vec<LKTree>) -> LKTree {
        let right = prems.pop().expect("two premises");
        let left = prems.pop().expect("two premises");
        let shared: Vec<Hyp> = right
            .concl
            .hyps()
            .filter(|h| *h != rh && *h != lh && left.concl.contains(*h))
            .collect();
        let mut map = HashMap::new();
        for h in &shared {
            map.insert(*h, self.labels.fresh(h.polarity()));
        }
        let right = super::eliminate::relabel(right, &map);
        let mut t = LKTree::infer(
            Rule::Cut {
                formula: crate::term::beta_normalize(&formula),
                left: lh,
                right: rh,
            },
            None,
            vec![left, right],
        );
        for h in shared {
            t = t.contract(h, map[&h]);
        }
        t
    }
}
