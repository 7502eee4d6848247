//! A Gentzen-style baseline: proofs as trees of sequents with explicit
//! weakening and contraction, and reductive cut-elimination on them.
//!
//! Only the fragment without equality and induction is supported.

mod eliminate;
mod translate;
mod tree;

use std::collections::HashMap;

use thiserror::Error;

use crate::herbrand::InstanceMap;
use crate::lkt::Hyp;
use crate::term::Expr;
use crate::typing::{LocalContext, Sequent};

pub use eliminate::gentzen_eliminate;
pub use translate::to_tree;
pub use tree::{subst_tree, LKTree, Rule};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LkError {
    #[error("{node} has no counterpart in the tree calculus")]
    UnsupportedNode { node: String },
    #[error("proof is not well-typed at {node}")]
    IllTyped { node: String },
}

impl LKTree {
    pub fn end_sequent(&self) -> Sequent {
        self.concl.end_sequent()
    }
}

#[derive(Clone)]
struct Origin {
    root: Hyp,
    prefix: Vec<Expr>,
    remaining: usize,
}

/// Instance vectors of the root's quantifier blocks, as for proof terms.
pub fn tree_instances(t: &LKTree) -> InstanceMap {
    let mut out = InstanceMap::new();
    let mut origins = HashMap::new();
    for (h, f) in t.concl.iter() {
        let n = crate::herbrand::block_len(f);
        if n > 0 {
            out.insert(h, Default::default());
            origins.insert(
                h,
                Origin {
                    root: h,
                    prefix: vec![],
                    remaining: n,
                },
            );
        }
    }
    collect(t, &origins, &mut out);
    out
}

fn collect(t: &LKTree, origins: &HashMap<Hyp, Origin>, out: &mut InstanceMap) {
    let record = |o: &Origin, out: &mut InstanceMap| {
        out.entry(o.root).or_default().insert(o.prefix.clone());
    };
    let step = match &t.rule {
        Rule::AllL { main, term, aux } | Rule::ExR { main, term, aux } => Some((*main, term.clone(), *aux)),
        Rule::AllR { main, eigen, aux } | Rule::ExL { main, eigen, aux } => Some((*main, Expr::var(eigen.clone()), *aux)),
        _ => None,
    };
    let main = t.rule.main();
    let mut aux_origin: Vec<(Hyp, Origin)> = Vec::new();
    match step.and_then(|(m, term, aux)| origins.get(&m).filter(|o| o.remaining > 0).map(|o| (o.clone(), term, aux))) {
        Some((mut o, term, aux)) => {
            o.prefix.push(term);
            o.remaining -= 1;
            if o.remaining == 0 {
                record(&o, out);
            } else {
                aux_origin.push((aux, o));
            }
        }
        None => {
            let used: Vec<Hyp> = match &t.rule {
                Rule::Axiom { ante, succ } => vec![*ante, *succ],
                Rule::Weaken { .. } | Rule::Contract { .. } => vec![],
                _ => main.into_iter().collect(),
            };
            for h in used {
                if let Some(o) = origins.get(&h).filter(|o| o.remaining > 0) {
                    record(o, out);
                }
            }
        }
    }
    if let Rule::Contract { keep, drop } = &t.rule {
        if let Some(o) = origins.get(keep) {
            aux_origin.push((*drop, o.clone()));
        }
    }
    for (i, p) in t.prems.iter().enumerate() {
        let bound = t.rule.bound(i);
        let mut sub: HashMap<Hyp, Origin> = origins
            .iter()
            .filter(|(h, _)| Some(**h) != main && !bound.contains(h) && p.concl.contains(**h))
            .map(|(h, o)| (*h, o.clone()))
            .collect();
        for (h, o) in &aux_origin {
            if p.concl.contains(*h) {
                sub.insert(*h, o.clone());
            }
        }
        collect(p, &sub, out);
    }
}

/// The conclusion of a tree as a labelled context.
pub fn conclusion(t: &LKTree) -> &LocalContext {
    &t.concl
}

#[cfg(test)]
mod tests;
