//! Quantifier instances and Herbrand sequents of proofs with
//! quantifier-free cuts, and a propositional validity check for ground
//! sequents.

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexSet;
use thiserror::Error;

use crate::formula::{is_quantifier_free, view, FormulaView, EQ};
use crate::lkt::{Hyp, Polarity, Proof, ProofKind};
use crate::term::{alpha_eq, beta_normalize, instantiate, Expr};
use crate::typing::{LocalContext, Sequent};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HerbrandError {
    #[error("cut formula {formula} contains quantifiers")]
    QuantifiedCut { formula: Expr },
    #[error("formula {formula} contains an equation")]
    EqualityPresent { formula: Expr },
}

/// For every end-sequent hypothesis whose formula starts with a quantifier,
/// the instance vectors of its outermost quantifier block.
///
/// Weak blocks (`∀` on the left, `∃` on the right) are instantiated by
/// `AllL`, strong blocks by the eigenvariables of `AllR`. A vector shorter
/// than the block records an occurrence used before the block was fully
/// instantiated, for example in an axiom.
pub type InstanceMap = BTreeMap<Hyp, IndexSet<Vec<Expr>>>;

/// Length of the outermost block of identical quantifiers.
pub(crate) fn block_len(formula: &Expr) -> usize {
    let universal = match view(formula) {
        FormulaView::All(_) => true,
        FormulaView::Ex(_) => false,
        _ => return 0,
    };
    let mut n = 0;
    let mut cur = beta_normalize(formula);
    loop {
        let pred = match (view(&cur), universal) {
            (FormulaView::All(p), true) | (FormulaView::Ex(p), false) => p.clone(),
            _ => return n,
        };
        n += 1;
        cur = match pred.kind() {
            crate::term::ExprKind::Abs(_, body) => body.clone(),
            _ => return n,
        };
    }
}

/// Strips `terms.len()` quantifiers off `formula`.
pub fn instantiate_block(formula: &Expr, terms: &[Expr]) -> Expr {
    let mut cur = beta_normalize(formula);
    for t in terms {
        cur = match view(&cur) {
            FormulaView::All(p) | FormulaView::Ex(p) => beta_normalize(&instantiate(p, t)),
            _ => panic!("instance vector longer than quantifier block of {formula}"),
        };
    }
    cur
}

#[derive(Clone)]
struct Origin {
    root: Hyp,
    prefix: Vec<Expr>,
    remaining: usize,
}

struct Extractor {
    origins: HashMap<Hyp, Origin>,
    undo: Vec<(Hyp, Option<Origin>)>,
    out: InstanceMap,
}

impl Extractor {
    fn set(&mut self, h: Hyp, o: Option<Origin>) {
        let old = match o {
            Some(o) => self.origins.insert(h, o),
            None => self.origins.remove(&h),
        };
        self.undo.push((h, old));
    }

    fn pop_to(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let (h, old) = self.undo.pop().expect("nonempty");
            match old {
                Some(o) => self.origins.insert(h, o),
                None => self.origins.remove(&h),
            };
        }
    }

    fn record(&mut self, o: &Origin) {
        self.out.entry(o.root).or_default().insert(o.prefix.clone());
    }

    fn walk(&mut self, p: &Proof) -> Result<(), HerbrandError> {
        let quantifier_step = match p.kind() {
            ProofKind::AllL { main, term, aux, sub } => Some((*main, term.clone(), *aux, sub)),
            ProofKind::AllR { main, eigen, aux, sub } => Some((*main, Expr::var(eigen.clone()), *aux, sub)),
            _ => None,
        };
        if let Some((main, t, aux, sub)) = quantifier_step {
            if let Some(o) = self.origins.get(&main).filter(|o| o.remaining > 0).cloned() {
                let mut next = o;
                next.prefix.push(t);
                next.remaining -= 1;
                let mark = self.undo.len();
                if next.remaining == 0 {
                    self.record(&next);
                    self.set(aux, None);
                } else {
                    self.set(aux, Some(next));
                }
                let r = self.walk(sub);
                self.pop_to(mark);
                return r;
            }
        }
        if let ProofKind::Cut { formula, .. } = p.kind() {
            if !is_quantifier_free(formula) {
                return Err(HerbrandError::QuantifiedCut {
                    formula: formula.clone(),
                });
            }
        }
        for h in p.main_hyps() {
            if let Some(o) = self.origins.get(&h).filter(|o| o.remaining > 0).cloned() {
                self.record(&o);
            }
        }
        for sc in p.scopes() {
            let mark = self.undo.len();
            for h in &sc.hyps {
                self.set(*h, None);
            }
            let r = self.walk(&sc.body);
            self.pop_to(mark);
            r?;
        }
        Ok(())
    }
}

/// Collects the instance vectors of the end-sequent quantifier blocks.
/// All cut formulas must be quantifier-free.
pub fn extract_instances(p: &Proof, ctx: &LocalContext) -> Result<InstanceMap, HerbrandError> {
    let mut ex = Extractor {
        origins: HashMap::new(),
        undo: Vec::new(),
        out: InstanceMap::new(),
    };
    for (h, f) in ctx.iter() {
        let n = block_len(f);
        if n > 0 {
            ex.out.insert(h, IndexSet::new());
            ex.origins.insert(
                h,
                Origin {
                    root: h,
                    prefix: vec![],
                    remaining: n,
                },
            );
        }
    }
    ex.walk(p)?;
    Ok(ex.out)
}

/// Replaces each quantified end-sequent formula by its instances; formulas
/// without an entry in `inst` are kept.
pub fn herbrand_sequent(inst: &InstanceMap, ctx: &LocalContext) -> Sequent {
    let mut s = Sequent::default();
    for (h, f) in ctx.iter() {
        let side = match h.polarity() {
            Polarity::Neg => &mut s.antecedent,
            Polarity::Pos => &mut s.succedent,
        };
        match inst.get(&h) {
            Some(vectors) => side.extend(vectors.iter().map(|v| instantiate_block(f, v))),
            None => side.push(f.clone()),
        }
    }
    s
}

/// Propositional formula over atom indices.
#[derive(Debug, Clone)]
enum Prop {
    Const(bool),
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    fn eval(&self, v: &[bool]) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Atom(i) => v[*i],
            Prop::Not(a) => !a.eval(v),
            Prop::And(a, b) => a.eval(v) && b.eval(v),
            Prop::Or(a, b) => a.eval(v) || b.eval(v),
        }
    }
}

#[derive(Default)]
struct Atoms {
    by_hash: HashMap<Expr, usize>,
    list: Vec<Expr>,
}

impl Atoms {
    fn index(&mut self, e: &Expr) -> usize {
        if let Some(&i) = self.by_hash.get(e) {
            return i;
        }
        let i = match self.list.iter().position(|a| alpha_eq(a, e)) {
            Some(i) => i,
            None => {
                self.list.push(e.clone());
                self.list.len() - 1
            }
        };
        self.by_hash.insert(e.clone(), i);
        i
    }

    /// Quantified subformulas are treated as atoms.
    fn translate(&mut self, e: &Expr) -> Result<Prop, HerbrandError> {
        Ok(match view(e) {
            FormulaView::Top => Prop::Const(true),
            FormulaView::Bot => Prop::Const(false),
            FormulaView::Not(a) => Prop::Not(Box::new(self.translate(a)?)),
            FormulaView::And(a, b) => Prop::And(Box::new(self.translate(a)?), Box::new(self.translate(b)?)),
            FormulaView::Or(a, b) => Prop::Or(Box::new(self.translate(a)?), Box::new(self.translate(b)?)),
            FormulaView::Imp(a, b) => Prop::Or(
                Box::new(Prop::Not(Box::new(self.translate(a)?))),
                Box::new(self.translate(b)?),
            ),
            FormulaView::Eq(..) => {
                return Err(HerbrandError::EqualityPresent { formula: e.clone() });
            }
            FormulaView::All(_) | FormulaView::Ex(_) | FormulaView::Atom => {
                if e.contains_const(EQ) {
                    return Err(HerbrandError::EqualityPresent { formula: e.clone() });
                }
                Prop::Atom(self.index(e))
            }
        })
    }
}

/// Atom count up to which validity is decided by enumerating assignments.
pub const TRUTH_TABLE_LIMIT: usize = 20;

/// Whether the sequent is propositionally valid, atoms being opaque.
pub fn validate_ground(seq: &Sequent) -> Result<bool, HerbrandError> {
    let mut atoms = Atoms::default();
    let ante = seq
        .antecedent
        .iter()
        .map(|f| atoms.translate(&beta_normalize(f)))
        .collect::<Result<Vec<_>, _>>()?;
    let succ = seq
        .succedent
        .iter()
        .map(|f| atoms.translate(&beta_normalize(f)))
        .collect::<Result<Vec<_>, _>>()?;
    let n = atoms.list.len();
    if n <= TRUTH_TABLE_LIMIT {
        Ok(truth_table(n, &ante, &succ))
    } else {
        let mut sat = Cnf::new(n);
        for a in &ante {
            let l = sat.encode(a);
            sat.clauses.push(vec![l]);
        }
        for s in &succ {
            let l = sat.encode(s);
            sat.clauses.push(vec![-l]);
        }
        Ok(!sat.satisfiable())
    }
}

fn truth_table(n: usize, ante: &[Prop], succ: &[Prop]) -> bool {
    let mut v = vec![false; n];
    for bits in 0u64..(1u64 << n) {
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = bits >> i & 1 == 1;
        }
        if ante.iter().all(|a| a.eval(&v)) && !succ.iter().any(|s| s.eval(&v)) {
            return false;
        }
    }
    true
}

/// Clauses over variables `1..=vars`; literals are signed.
struct Cnf {
    vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    fn new(atoms: usize) -> Cnf {
        Cnf {
            vars: atoms,
            clauses: Vec::new(),
        }
    }

    fn fresh(&mut self) -> i32 {
        self.vars += 1;
        self.vars as i32
    }

    /// Tseitin encoding; returns a literal equivalent to `p`.
    fn encode(&mut self, p: &Prop) -> i32 {
        match p {
            Prop::Atom(i) => *i as i32 + 1,
            Prop::Const(b) => {
                let v = self.fresh();
                self.clauses.push(vec![if *b { v } else { -v }]);
                v
            }
            Prop::Not(a) => -self.encode(a),
            Prop::And(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let v = self.fresh();
                self.clauses.extend([vec![-v, a], vec![-v, b], vec![v, -a, -b]]);
                v
            }
            Prop::Or(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let v = self.fresh();
                self.clauses.extend([vec![-v, a, b], vec![v, -a], vec![v, -b]]);
                v
            }
        }
    }

    fn satisfiable(self) -> bool {
        let mut s = Dpll::new(self);
        s.solve()
    }
}

struct Dpll {
    clauses: Vec<Vec<i32>>,
    /// Clause indices by literal, indexed with [`Dpll::slot`].
    occurs: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl Dpll {
    fn new(cnf: Cnf) -> Dpll {
        let mut occurs = vec![Vec::new(); 2 * (cnf.vars + 1)];
        for (i, c) in cnf.clauses.iter().enumerate() {
            for &l in c {
                occurs[Self::slot(l)].push(i);
            }
        }
        Dpll {
            clauses: cnf.clauses,
            occurs,
            value: vec![None; cnf.vars + 1],
            trail: Vec::new(),
        }
    }

    fn slot(l: i32) -> usize {
        2 * l.unsigned_abs() as usize + usize::from(l < 0)
    }

    fn lit_value(&self, l: i32) -> Option<bool> {
        self.value[l.unsigned_abs() as usize].map(|b| b == (l > 0))
    }

    fn assign(&mut self, l: i32, queue: &mut Vec<i32>) -> bool {
        match self.lit_value(l) {
            Some(b) => b,
            None => {
                let v = l.unsigned_abs() as usize;
                self.value[v] = Some(l > 0);
                self.trail.push(v);
                queue.push(l);
                true
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v] = None;
        }
    }

    /// Unit propagation from the literals in `queue`; false on conflict.
    fn propagate(&mut self, mut queue: Vec<i32>) -> bool {
        while let Some(l) = queue.pop() {
            let falsified = Self::slot(-l);
            for k in 0..self.occurs[falsified].len() {
                let ci = self.occurs[falsified][k];
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &m in &self.clauses[ci] {
                    match self.lit_value(m) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(m);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, unassigned) {
                    (0, _) => return false,
                    (1, Some(m)) => {
                        if !self.assign(m, &mut queue) {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn solve(&mut self) -> bool {
        let mut queue = Vec::new();
        for ci in 0..self.clauses.len() {
            match self.clauses[ci].as_slice() {
                [] => return false,
                [l] => {
                    if !self.assign(*l, &mut queue) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        self.propagate(queue) && self.search()
    }

    fn search(&mut self) -> bool {
        let Some(v) = (1..self.value.len()).find(|&v| self.value[v].is_none()) else {
            return true;
        };
        for l in [v as i32, -(v as i32)] {
            let mark = self.trail.len();
            let mut queue = Vec::new();
            self.assign(l, &mut queue);
            if self.propagate(queue) && self.search() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{linear_proof, pred_p};
    use crate::term::{Const, Ty};

    fn atom(name: &str) -> Expr {
        Expr::cnst(Const::new(name, Ty::o()))
    }

    fn p(t: Expr) -> Expr {
        Expr::app(pred_p(), t)
    }

    #[test]
    fn trivial_sequents() {
        let (a, b) = (atom("P"), atom("Q"));
        assert!(validate_ground(&Sequent::new(vec![a.clone()], vec![a.clone()])).unwrap());
        assert!(!validate_ground(&Sequent::new(vec![], vec![a.clone()])).unwrap());
        assert!(validate_ground(&Sequent::new(vec![], vec![Expr::or(a.clone(), Expr::not(a.clone()))])).unwrap());
        assert!(!validate_ground(&Sequent::new(vec![Expr::or(a.clone(), b.clone())], vec![a.clone()])).unwrap());
        assert!(validate_ground(&Sequent::new(vec![Expr::bot()], vec![])).unwrap());
    }

    #[test]
    fn equality_rejected() {
        let s = Sequent::new(vec![], vec![Expr::eq(Expr::zero(), Expr::zero())]);
        assert!(matches!(validate_ground(&s), Err(HerbrandError::EqualityPresent { .. })));
    }

    #[test]
    fn sat_search_agrees_with_truth_table() {
        // A chain of 30 implications exceeds the truth-table limit.
        let atoms: Vec<Expr> = (0..30).map(|k| p(Expr::numeral(k))).collect();
        let mut ante = vec![atoms[0].clone()];
        ante.extend(atoms.windows(2).map(|w| Expr::imp(w[0].clone(), w[1].clone())));
        assert!(validate_ground(&Sequent::new(ante.clone(), vec![atoms[29].clone()])).unwrap());
        ante.remove(10);
        assert!(!validate_ground(&Sequent::new(ante, vec![atoms[29].clone()])).unwrap());
    }

    #[test]
    fn linear_instances() {
        let g = linear_proof(3);
        let inst = extract_instances(&g.proof, &g.ctx).unwrap();
        let h2 = Hyp::neg(2);
        let got: Vec<_> = inst[&h2].iter().cloned().collect();
        assert_eq!(got, (0..3).map(|k| vec![Expr::numeral(k)]).collect::<Vec<_>>());
        let seq = herbrand_sequent(&inst, &g.ctx);
        assert_eq!(seq.antecedent.len(), 4);
        assert!(validate_ground(&seq).unwrap());
    }

    #[test]
    fn herbrand_sequent_of_linear_two() {
        let g = linear_proof(2);
        let seq = herbrand_sequent(&extract_instances(&g.proof, &g.ctx).unwrap(), &g.ctx);
        let n = |k| p(Expr::numeral(k));
        let expected = Sequent::new(
            vec![n(0), Expr::imp(n(0), n(1)), Expr::imp(n(1), n(2))],
            vec![n(2)],
        );
        assert_eq!(seq, expected);
    }

    #[test]
    fn quantifier_free_proof_has_empty_map() {
        let ctx = LocalContext::new().with(Hyp::neg(1), atom("A")).with(Hyp::pos(1), atom("A"));
        let inst = extract_instances(&Proof::ax(Hyp::neg(1), Hyp::pos(1)), &ctx).unwrap();
        assert!(inst.is_empty());
        assert_eq!(herbrand_sequent(&inst, &ctx), ctx.end_sequent());
    }

    #[test]
    fn quantified_cut_rejected() {
        let g = crate::generators::linear_cut_proof(2);
        assert!(matches!(
            extract_instances(&g.proof, &g.ctx),
            Err(HerbrandError::QuantifiedCut { .. })
        ));
    }

    #[test]
    fn axiom_on_quantified_formula_keeps_it() {
        let x = crate::term::Var::new("x", Ty::nat());
        let f = Expr::all(x.clone(), p(Expr::var(x)));
        let ctx = LocalContext::new().with(Hyp::neg(1), f.clone()).with(Hyp::pos(1), f);
        let inst = extract_instances(&Proof::ax(Hyp::neg(1), Hyp::pos(1)), &ctx).unwrap();
        let seq = herbrand_sequent(&inst, &ctx);
        assert_eq!(seq, ctx.end_sequent());
        assert!(validate_ground(&seq).unwrap());
    }
}
