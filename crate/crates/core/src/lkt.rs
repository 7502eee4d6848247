//! Proof terms.
//!
//! Hypotheses are nonzero machine integers: negative ones name antecedent
//! formulas, positive ones succedent formulas. Every node caches its free
//! hypotheses, free expression variables, size and number of cuts, so
//! freeness checks during normalization do not traverse the term.
//!
//! There are no weakening or contraction terms: a hypothesis may be used any
//! number of times, including zero. The derived connectives ∨, →, ⊥ and ∃
//! reuse the constructors of ∧, ⊤ and ∀; which connective is meant follows
//! from the polarities of the hypotheses.

use std::fmt;
use std::num::NonZeroI32;
use std::sync::Arc;

use thiserror::Error;

use crate::set::FrozenSet;
use crate::term::{fresh_variant, subst_apply, Expr, Substitution, Var, VarSet};

/// Which side of the sequent a hypothesis lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Antecedent.
    Neg,
    /// Succedent.
    Pos,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Neg => Polarity::Pos,
            Polarity::Pos => Polarity::Neg,
        }
    }
}

/// A hypothesis label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyp(NonZeroI32);

impl Hyp {
    pub fn new(value: i32) -> Option<Hyp> {
        NonZeroI32::new(value).map(Hyp)
    }

    /// `-n`; panics on zero.
    pub fn neg(n: u32) -> Hyp {
        Hyp::new(-(n as i32)).expect("hypothesis index must be nonzero")
    }

    /// `+n`; panics on zero.
    pub fn pos(n: u32) -> Hyp {
        Hyp::new(n as i32).expect("hypothesis index must be nonzero")
    }

    pub fn value(self) -> i32 {
        self.0.get()
    }

    pub fn abs(self) -> u32 {
        self.0.get().unsigned_abs()
    }

    pub fn polarity(self) -> Polarity {
        if self.0.get() < 0 {
            Polarity::Neg
        } else {
            Polarity::Pos
        }
    }

    pub fn is_neg(self) -> bool {
        self.0.get() < 0
    }

    pub fn is_pos(self) -> bool {
        self.0.get() > 0
    }

    pub fn with_polarity(pol: Polarity, n: u32) -> Hyp {
        match pol {
            Polarity::Neg => Hyp::neg(n),
            Polarity::Pos => Hyp::pos(n),
        }
    }
}

impl fmt::Display for Hyp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0.get())
    }
}

impl fmt::Debug for Hyp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0.get())
    }
}

pub type HypSet = FrozenSet<Hyp>;

impl HypSet {
    /// Largest absolute value in the set, 0 if empty.
    pub fn max_abs(&self) -> u32 {
        let lo = self.first().map_or(0, |h| h.abs());
        let hi = self.last().map_or(0, |h| h.abs());
        lo.max(hi)
    }
}

/// A hypothesis of polarity `pol` not occurring (in absolute value) in `avoid`.
///
/// Chooses one more than the largest absolute value present.
pub fn fresh_hyp<'a>(pol: Polarity, avoid: impl IntoIterator<Item = &'a Hyp>) -> Hyp {
    let m = avoid.into_iter().map(|h| h.abs()).max().unwrap_or(0);
    Hyp::with_polarity(pol, m + 1)
}

/// Like [`fresh_hyp`], over several cached sets plus loose hypotheses.
pub(crate) fn fresh_hyp_in(pol: Polarity, sets: &[&HypSet], extra: &[Hyp]) -> Hyp {
    let m = sets
        .iter()
        .map(|s| s.max_abs())
        .chain(extra.iter().map(|h| h.abs()))
        .max()
        .unwrap_or(0);
    Hyp::with_polarity(pol, m + 1)
}

#[derive(Clone, PartialEq, Eq)]
pub enum ProofKind {
    /// `Ax(h1, h2) :: h1: φ ⊢ h2: φ`
    Ax { ante: Hyp, succ: Hyp },
    /// `⊢ h: ⊤`, or `h: ⊥ ⊢` for a negative hypothesis.
    TopR { main: Hyp },
    Cut {
        formula: Expr,
        left_hyp: Hyp,
        left: Proof,
        right_hyp: Hyp,
        right: Proof,
    },
    NegL { main: Hyp, aux: Hyp, sub: Proof },
    NegR { main: Hyp, aux: Hyp, sub: Proof },
    /// ∧-left, ∨-right and →-right.
    AndL {
        main: Hyp,
        aux1: Hyp,
        aux2: Hyp,
        sub: Proof,
    },
    /// ∧-right, ∨-left and →-left.
    AndR {
        main: Hyp,
        aux1: Hyp,
        left: Proof,
        aux2: Hyp,
        right: Proof,
    },
    /// ∀-left and ∃-right.
    AllL {
        main: Hyp,
        term: Expr,
        aux: Hyp,
        sub: Proof,
    },
    /// ∀-right and ∃-left; `eigen` is bound in `sub`.
    AllR {
        main: Hyp,
        eigen: Var,
        aux: Hyp,
        sub: Proof,
    },
    Rfl { main: Hyp },
    Eql {
        eq: Hyp,
        main: Hyp,
        left_to_right: bool,
        context: Expr,
        aux: Hyp,
        sub: Proof,
    },
    Ind {
        main: Hyp,
        motive: Expr,
        target: Expr,
        base_aux: Hyp,
        base: Proof,
        eigen: Var,
        step_hyp: Hyp,
        step_concl: Hyp,
        step: Proof,
    },
}

struct ProofNode {
    kind: ProofKind,
    free_hyps: HypSet,
    free_vars: VarSet,
    size: usize,
    cuts: usize,
}

/// An immutable, shared proof term.
#[derive(Clone)]
pub struct Proof(Arc<ProofNode>);

/// A subproof together with the hypotheses (and eigenvariable) it binds.
#[derive(Clone, Debug)]
pub struct Scope {
    pub hyps: Vec<Hyp>,
    pub eigen: Option<Var>,
    pub body: Proof,
}

impl Scope {
    fn new(hyps: Vec<Hyp>, eigen: Option<Var>, body: Proof) -> Scope {
        Scope { hyps, eigen, body }
    }

    /// Whether none of the bound names occur free in the body.
    pub fn is_vacuous(&self) -> bool {
        self.hyps.iter().all(|h| !self.body.has_free_hyp(*h))
            && self
                .eigen
                .as_ref()
                .is_none_or(|v| !self.body.free_vars().contains(v))
    }
}

fn bound_minus(set: &HypSet, hyps: &[Hyp]) -> HypSet {
    hyps.iter().fold(set.clone(), |s, h| s.remove(h))
}

impl Proof {
    fn mk(kind: ProofKind) -> Proof {
        let (free_hyps, free_vars, size, cuts) = {
            let mut fh = HypSet::empty();
            let mut fv = VarSet::empty();
            let mut size = 1;
            let mut cuts = 0;
            for h in kind_main_hyps(&kind) {
                fh = fh.insert(h);
            }
            for e in kind_exprs(&kind) {
                fv = fv.union(e.free_vars());
            }
            for sc in kind_scopes_ref(&kind) {
                fh = fh.union(&bound_minus(sc.1.free_hyps(), sc.0.as_slice()));
                let v = match sc.2 {
                    Some(x) => sc.1.free_vars().remove(x),
                    None => sc.1.free_vars().clone(),
                };
                fv = fv.union(&v);
                size += sc.1.size();
                cuts += sc.1.cut_count();
            }
            if matches!(kind, ProofKind::Cut { .. }) {
                cuts += 1;
            }
            (fh, fv, size, cuts)
        };
        Proof(Arc::new(ProofNode {
            kind,
            free_hyps,
            free_vars,
            size,
            cuts,
        }))
    }

    pub fn ax(ante: Hyp, succ: Hyp) -> Proof {
        Proof::mk(ProofKind::Ax { ante, succ })
    }

    pub fn top_r(main: Hyp) -> Proof {
        Proof::mk(ProofKind::TopR { main })
    }

    pub fn cut(formula: Expr, left_hyp: Hyp, left: Proof, right_hyp: Hyp, right: Proof) -> Proof {
        Proof::mk(ProofKind::Cut {
            formula,
            left_hyp,
            left,
            right_hyp,
            right,
        })
    }

    pub fn neg_l(main: Hyp, aux: Hyp, sub: Proof) -> Proof {
        Proof::mk(ProofKind::NegL { main, aux, sub })
    }

    pub fn neg_r(main: Hyp, aux: Hyp, sub: Proof) -> Proof {
        Proof::mk(ProofKind::NegR { main, aux, sub })
    }

    pub fn and_l(main: Hyp, aux1: Hyp, aux2: Hyp, sub: Proof) -> Proof {
        Proof::mk(ProofKind::AndL {
            main,
            aux1,
            aux2,
            sub,
        })
    }

    pub fn and_r(main: Hyp, aux1: Hyp, left: Proof, aux2: Hyp, right: Proof) -> Proof {
        Proof::mk(ProofKind::AndR {
            main,
            aux1,
            left,
            aux2,
            right,
        })
    }

    pub fn all_l(main: Hyp, term: Expr, aux: Hyp, sub: Proof) -> Proof {
        Proof::mk(ProofKind::AllL {
            main,
            term,
            aux,
            sub,
        })
    }

    pub fn all_r(main: Hyp, eigen: Var, aux: Hyp, sub: Proof) -> Proof {
        Proof::mk(ProofKind::AllR {
            main,
            eigen,
            aux,
            sub,
        })
    }

    pub fn rfl(main: Hyp) -> Proof {
        Proof::mk(ProofKind::Rfl { main })
    }

    pub fn eql(eq: Hyp, main: Hyp, left_to_right: bool, context: Expr, aux: Hyp, sub: Proof) -> Proof {
        Proof::mk(ProofKind::Eql {
            eq,
            main,
            left_to_right,
            context,
            aux,
            sub,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn ind(
        main: Hyp,
        motive: Expr,
        target: Expr,
        base_aux: Hyp,
        base: Proof,
        eigen: Var,
        step_hyp: Hyp,
        step_concl: Hyp,
        step: Proof,
    ) -> Proof {
        Proof::mk(ProofKind::Ind {
            main,
            motive,
            target,
            base_aux,
            base,
            eigen,
            step_hyp,
            step_concl,
            step,
        })
    }

    pub fn kind(&self) -> &ProofKind {
        &self.0.kind
    }

    pub fn free_hyps(&self) -> &HypSet {
        &self.0.free_hyps
    }

    pub fn has_free_hyp(&self, h: Hyp) -> bool {
        self.0.free_hyps.contains(&h)
    }

    pub fn free_vars(&self) -> &VarSet {
        &self.0.free_vars
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// Number of `Cut` nodes.
    pub fn cut_count(&self) -> usize {
        self.0.cuts
    }

    pub fn ptr_eq(&self, other: &Proof) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Node identity, stable while any clone of this node is alive.
    pub fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Short constructor name with the main hypothesis, for error messages.
    pub fn label(&self) -> String {
        match self.kind() {
            ProofKind::Ax { ante, succ } => format!("Ax({ante}, {succ})"),
            ProofKind::TopR { main } => format!("TopR({main})"),
            ProofKind::Cut { left_hyp, right_hyp, .. } => format!("Cut({left_hyp}, {right_hyp})"),
            ProofKind::NegL { main, .. } => format!("NegL({main})"),
            ProofKind::NegR { main, .. } => format!("NegR({main})"),
            ProofKind::AndL { main, .. } => format!("AndL({main})"),
            ProofKind::AndR { main, .. } => format!("AndR({main})"),
            ProofKind::AllL { main, .. } => format!("AllL({main})"),
            ProofKind::AllR { main, .. } => format!("AllR({main})"),
            ProofKind::Rfl { main } => format!("Rfl({main})"),
            ProofKind::Eql { eq, main, .. } => format!("Eql({eq}, {main})"),
            ProofKind::Ind { main, .. } => format!("Ind({main})"),
        }
    }

    /// Hypotheses occurring as main formulas at the root.
    pub fn main_hyps(&self) -> Vec<Hyp> {
        kind_main_hyps(self.kind())
    }

    pub fn is_main(&self, h: Hyp) -> bool {
        match self.kind() {
            ProofKind::Ax { ante, succ } => *ante == h || *succ == h,
            ProofKind::Cut { .. } => false,
            ProofKind::Eql { eq, main, .. } => *eq == h || *main == h,
            ProofKind::TopR { main }
            | ProofKind::Rfl { main }
            | ProofKind::NegL { main, .. }
            | ProofKind::NegR { main, .. }
            | ProofKind::AndL { main, .. }
            | ProofKind::AndR { main, .. }
            | ProofKind::AllL { main, .. }
            | ProofKind::AllR { main, .. }
            | ProofKind::Ind { main, .. } => *main == h,
        }
    }

    /// Embedded expressions outside of any binder.
    pub fn exprs(&self) -> Vec<&Expr> {
        kind_exprs(self.kind())
    }

    /// Subproofs with their binders, in constructor order.
    pub fn scopes(&self) -> Vec<Scope> {
        kind_scopes_ref(self.kind())
            .into_iter()
            .map(|(h, p, v)| Scope::new(h.as_slice().to_vec(), v.cloned(), p.clone()))
            .collect()
    }

    pub fn children(&self) -> Vec<&Proof> {
        kind_scopes_ref(self.kind()).into_iter().map(|s| s.1).collect()
    }

    /// Rebuilds this node with mapped non-binding hypotheses and expressions
    /// and the given scopes. With `skipping`, inferences whose bound names
    /// are all unused are dropped in favour of the subproof.
    pub fn rebuild(
        &self,
        hyp_map: &dyn Fn(Hyp) -> Hyp,
        expr_map: &dyn Fn(&Expr) -> Expr,
        scopes: Vec<Scope>,
        skipping: bool,
    ) -> Proof {
        let mut it = scopes.into_iter();
        let mut next = || it.next().expect("scope count matches constructor");
        if skipping {
            match self.kind() {
                ProofKind::Cut { formula, .. } => {
                    let (l, r) = (next(), next());
                    return skip_cut(expr_map(formula), l.hyps[0], l.body, r.hyps[0], r.body);
                }
                ProofKind::AndR { main, .. } => {
                    let (l, r) = (next(), next());
                    return skip_and_r(hyp_map(*main), l.hyps[0], l.body, r.hyps[0], r.body);
                }
                ProofKind::Ind {
                    main, motive, target, ..
                } => {
                    let (b, s) = (next(), next());
                    return skip_ind(
                        hyp_map(*main),
                        expr_map(motive),
                        expr_map(target),
                        b,
                        s,
                    );
                }
                ProofKind::Ax { .. } | ProofKind::TopR { .. } | ProofKind::Rfl { .. } => {}
                _ => {
                    let sc = next();
                    if sc.is_vacuous() {
                        return sc.body;
                    }
                    return self.rebuild(hyp_map, expr_map, vec![sc], false);
                }
            }
        }
        match self.kind() {
            ProofKind::Ax { ante, succ } => Proof::ax(hyp_map(*ante), hyp_map(*succ)),
            ProofKind::TopR { main } => Proof::top_r(hyp_map(*main)),
            ProofKind::Rfl { main } => Proof::rfl(hyp_map(*main)),
            ProofKind::Cut { formula, .. } => {
                let (l, r) = (next(), next());
                Proof::cut(expr_map(formula), l.hyps[0], l.body, r.hyps[0], r.body)
            }
            ProofKind::NegL { main, .. } => {
                let s = next();
                Proof::neg_l(hyp_map(*main), s.hyps[0], s.body)
            }
            ProofKind::NegR { main, .. } => {
                let s = next();
                Proof::neg_r(hyp_map(*main), s.hyps[0], s.body)
            }
            ProofKind::AndL { main, .. } => {
                let s = next();
                Proof::and_l(hyp_map(*main), s.hyps[0], s.hyps[1], s.body)
            }
            ProofKind::AndR { main, .. } => {
                let (l, r) = (next(), next());
                Proof::and_r(hyp_map(*main), l.hyps[0], l.body, r.hyps[0], r.body)
            }
            ProofKind::AllL { main, term, .. } => {
                let s = next();
                Proof::all_l(hyp_map(*main), expr_map(term), s.hyps[0], s.body)
            }
            ProofKind::AllR { main, .. } => {
                let s = next();
                Proof::all_r(hyp_map(*main), s.eigen.expect("AllR binds a variable"), s.hyps[0], s.body)
            }
            ProofKind::Eql {
                eq,
                main,
                left_to_right,
                context,
                ..
            } => {
                let s = next();
                Proof::eql(
                    hyp_map(*eq),
                    hyp_map(*main),
                    *left_to_right,
                    expr_map(context),
                    s.hyps[0],
                    s.body,
                )
            }
            ProofKind::Ind {
                main, motive, target, ..
            } => {
                let (b, s) = (next(), next());
                Proof::ind(
                    hyp_map(*main),
                    expr_map(motive),
                    expr_map(target),
                    b.hyps[0],
                    b.body,
                    s.eigen.expect("Ind binds a variable"),
                    s.hyps[0],
                    s.hyps[1],
                    s.body,
                )
            }
        }
    }

    /// Same node with new scopes.
    pub fn with_scopes(&self, scopes: Vec<Scope>, skipping: bool) -> Proof {
        self.rebuild(&|h| h, &|e| e.clone(), scopes, skipping)
    }

    /// Recomputes the cached sets from scratch and compares them.
    pub fn audit(&self) -> bool {
        fn go(p: &Proof) -> (HypSet, VarSet, bool) {
            let mut fh: HypSet = p.main_hyps().into_iter().collect();
            let mut fv = VarSet::empty();
            for e in p.exprs() {
                fv = fv.union(e.free_vars());
            }
            let mut ok = true;
            for sc in p.scopes() {
                let (cfh, cfv, cok) = go(&sc.body);
                ok &= cok;
                fh = fh.union(&bound_minus(&cfh, &sc.hyps));
                fv = fv.union(&match &sc.eigen {
                    Some(x) => cfv.remove(x),
                    None => cfv,
                });
            }
            ok &= fh == *p.free_hyps() && fv == *p.free_vars();
            (fh, fv, ok)
        }
        go(self).2
    }
}

fn kind_main_hyps(kind: &ProofKind) -> Vec<Hyp> {
    match kind {
        ProofKind::Ax { ante, succ } => vec![*ante, *succ],
        ProofKind::Cut { .. } => vec![],
        ProofKind::Eql { eq, main, .. } => vec![*eq, *main],
        ProofKind::TopR { main }
        | ProofKind::Rfl { main }
        | ProofKind::NegL { main, .. }
        | ProofKind::NegR { main, .. }
        | ProofKind::AndL { main, .. }
        | ProofKind::AndR { main, .. }
        | ProofKind::AllL { main, .. }
        | ProofKind::AllR { main, .. }
        | ProofKind::Ind { main, .. } => vec![*main],
    }
}

fn kind_exprs(kind: &ProofKind) -> Vec<&Expr> {
    match kind {
        ProofKind::Cut { formula, .. } => vec![formula],
        ProofKind::AllL { term, .. } => vec![term],
        ProofKind::Eql { context, .. } => vec![context],
        ProofKind::Ind { motive, target, .. } => vec![motive, target],
        _ => vec![],
    }
}

/// Up to two bound hypotheses, stored inline.
#[derive(Clone, Copy)]
struct Bound {
    hyps: [Hyp; 2],
    len: usize,
}

impl Bound {
    fn one(h: Hyp) -> Bound {
        Bound { hyps: [h, h], len: 1 }
    }

    fn two(a: Hyp, b: Hyp) -> Bound {
        Bound { hyps: [a, b], len: 2 }
    }

    fn as_slice(&self) -> &[Hyp] {
        &self.hyps[..self.len]
    }
}

type ScopeRef<'a> = (Bound, &'a Proof, Option<&'a Var>);

fn kind_scopes_ref(kind: &ProofKind) -> Vec<ScopeRef<'_>> {
    match kind {
        ProofKind::Ax { .. } | ProofKind::TopR { .. } | ProofKind::Rfl { .. } => vec![],
        ProofKind::Cut {
            left_hyp,
            left,
            right_hyp,
            right,
            ..
        } => vec![(Bound::one(*left_hyp), left, None), (Bound::one(*right_hyp), right, None)],
        ProofKind::NegL { aux, sub, .. }
        | ProofKind::NegR { aux, sub, .. }
        | ProofKind::AllL { aux, sub, .. }
        | ProofKind::Eql { aux, sub, .. } => vec![(Bound::one(*aux), sub, None)],
        ProofKind::AndL { aux1, aux2, sub, .. } => vec![(Bound::two(*aux1, *aux2), sub, None)],
        ProofKind::AndR {
            aux1,
            left,
            aux2,
            right,
            ..
        } => vec![(Bound::one(*aux1), left, None), (Bound::one(*aux2), right, None)],
        ProofKind::AllR { aux, sub, eigen, .. } => vec![(Bound::one(*aux), sub, Some(eigen))],
        ProofKind::Ind {
            base_aux,
            base,
            eigen,
            step_hyp,
            step_concl,
            step,
            ..
        } => vec![
            (Bound::one(*base_aux), base, None),
            (Bound::two(*step_hyp, *step_concl), step, Some(eigen)),
        ],
    }
}

/// `Cut?`
pub fn skip_cut(formula: Expr, left_hyp: Hyp, left: Proof, right_hyp: Hyp, right: Proof) -> Proof {
    if !left.has_free_hyp(left_hyp) {
        left
    } else if !right.has_free_hyp(right_hyp) {
        right
    } else {
        Proof::cut(formula, left_hyp, left, right_hyp, right)
    }
}

/// `NegL?`
pub fn skip_neg_l(main: Hyp, aux: Hyp, sub: Proof) -> Proof {
    if sub.has_free_hyp(aux) {
        Proof::neg_l(main, aux, sub)
    } else {
        sub
    }
}

/// `NegR?`
pub fn skip_neg_r(main: Hyp, aux: Hyp, sub: Proof) -> Proof {
    if sub.has_free_hyp(aux) {
        Proof::neg_r(main, aux, sub)
    } else {
        sub
    }
}

/// `AndL?`
pub fn skip_and_l(main: Hyp, aux1: Hyp, aux2: Hyp, sub: Proof) -> Proof {
    if sub.has_free_hyp(aux1) || sub.has_free_hyp(aux2) {
        Proof::and_l(main, aux1, aux2, sub)
    } else {
        sub
    }
}

/// `AndR?`
pub fn skip_and_r(main: Hyp, aux1: Hyp, left: Proof, aux2: Hyp, right: Proof) -> Proof {
    if !left.has_free_hyp(aux1) {
        left
    } else if !right.has_free_hyp(aux2) {
        right
    } else {
        Proof::and_r(main, aux1, left, aux2, right)
    }
}

/// `AllL?`
pub fn skip_all_l(main: Hyp, term: Expr, aux: Hyp, sub: Proof) -> Proof {
    if sub.has_free_hyp(aux) {
        Proof::all_l(main, term, aux, sub)
    } else {
        sub
    }
}

/// `AllR?`
pub fn skip_all_r(main: Hyp, eigen: Var, aux: Hyp, sub: Proof) -> Proof {
    if sub.has_free_hyp(aux) || sub.free_vars().contains(&eigen) {
        Proof::all_r(main, eigen, aux, sub)
    } else {
        sub
    }
}

/// `Eql?`
pub fn skip_eql(eq: Hyp, main: Hyp, left_to_right: bool, context: Expr, aux: Hyp, sub: Proof) -> Proof {
    if sub.has_free_hyp(aux) {
        Proof::eql(eq, main, left_to_right, context, aux, sub)
    } else {
        sub
    }
}

fn skip_ind(main: Hyp, motive: Expr, target: Expr, base: Scope, step: Scope) -> Proof {
    if !base.body.has_free_hyp(base.hyps[0]) {
        return base.body;
    }
    if step.is_vacuous() {
        return step.body;
    }
    Proof::ind(
        main,
        motive,
        target,
        base.hyps[0],
        base.body,
        step.eigen.expect("Ind binds a variable"),
        step.hyps[0],
        step.hyps[1],
        step.body,
    )
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProofError {
    #[error("cannot rename {old} to {new}: hypotheses of different polarity")]
    SignMismatch { old: Hyp, new: Hyp },
}

/// Free hypotheses of `p`.
pub fn free_hyps(p: &Proof) -> &HypSet {
    p.free_hyps()
}

/// Hypotheses that are main formulas at the root of `p`.
pub fn main_hyps(p: &Proof) -> Vec<Hyp> {
    p.main_hyps()
}

/// Replaces free occurrences of `old` by `new`, renaming binders that would
/// capture `new`.
pub fn rename_hyp(p: &Proof, old: Hyp, new: Hyp) -> Result<Proof, ProofError> {
    if old.polarity() != new.polarity() {
        return Err(ProofError::SignMismatch { old, new });
    }
    Ok(rename_hyp_unchecked(p, old, new))
}

pub(crate) fn rename_hyp_unchecked(p: &Proof, old: Hyp, new: Hyp) -> Proof {
    if old == new || !p.has_free_hyp(old) {
        return p.clone();
    }
    let scopes = p
        .scopes()
        .into_iter()
        .map(|mut sc| {
            if sc.hyps.contains(&old) || !sc.body.has_free_hyp(old) {
                return sc;
            }
            if let Some(i) = sc.hyps.iter().position(|h| *h == new) {
                let fresh = fresh_hyp_in(new.polarity(), &[sc.body.free_hyps()], &[old, new]);
                let fresh = avoid_siblings(fresh, &sc.hyps);
                sc.body = rename_hyp_unchecked(&sc.body, new, fresh);
                sc.hyps[i] = fresh;
            }
            sc.body = rename_hyp_unchecked(&sc.body, old, new);
            sc
        })
        .collect();
    p.rebuild(&|h| if h == old { new } else { h }, &|e| e.clone(), scopes, false)
}

/// Bumps `h` away from hypotheses bound alongside it.
pub(crate) fn avoid_siblings(h: Hyp, siblings: &[Hyp]) -> Hyp {
    let m = siblings.iter().map(|s| s.abs()).max().unwrap_or(0);
    if siblings.iter().any(|s| s.abs() == h.abs()) {
        Hyp::with_polarity(h.polarity(), m.max(h.abs()) + 1)
    } else {
        h
    }
}

/// Applies an expression substitution to every embedded expression, renaming
/// eigenvariables that would capture variables of the substitution's range.
pub fn subst_expr_in_proof(p: &Proof, s: &Substitution) -> Proof {
    if s.is_empty() || !s.touches(p.free_vars()) {
        return p.clone();
    }
    let scopes = p
        .scopes()
        .into_iter()
        .map(|mut sc| match sc.eigen.clone() {
            None => {
                sc.body = subst_expr_in_proof(&sc.body, s);
                sc
            }
            Some(x) => {
                let mut inner = s.restrict(sc.body.free_vars(), &x);
                if inner.is_empty() {
                    return sc;
                }
                let range = inner.range_vars();
                if range.contains(&x) {
                    let taken: Vec<Var> = range
                        .iter()
                        .chain(sc.body.free_vars().iter())
                        .chain(inner.domain())
                        .cloned()
                        .collect();
                    let x2 = fresh_variant(&x, &taken);
                    inner.insert_unchecked(x, Expr::var(x2.clone()));
                    sc.eigen = Some(x2);
                }
                sc.body = subst_expr_in_proof(&sc.body, &inner);
                sc
            }
        })
        .collect();
    p.rebuild(&|h| h, &|e| subst_apply(e, s), scopes, false)
}

/// Renames the eigenvariable of a scope to `fresh` inside its body.
pub(crate) fn rename_eigen(sc: &mut Scope, fresh: Var) {
    let old = sc.eigen.clone().expect("scope binds a variable");
    let mut s = Substitution::new();
    s.insert_unchecked(old, Expr::var(fresh.clone()));
    sc.body = subst_expr_in_proof(&sc.body, &s);
    sc.eigen = Some(fresh);
}

fn fmt_proof(p: &Proof, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let h = |h: &Hyp| h.value();
    match p.kind() {
        ProofKind::Ax { ante, succ } => write!(f, "(Ax {} {})", h(ante), h(succ)),
        ProofKind::TopR { main } => write!(f, "(TopR {})", h(main)),
        ProofKind::Rfl { main } => write!(f, "(Rfl {})", h(main)),
        ProofKind::Cut {
            formula,
            left_hyp,
            left,
            right_hyp,
            right,
        } => {
            write!(f, "(Cut {formula} {} ", h(left_hyp))?;
            fmt_proof(left, f)?;
            write!(f, " {} ", h(right_hyp))?;
            fmt_proof(right, f)?;
            f.write_str(")")
        }
        ProofKind::NegL { main, aux, sub } | ProofKind::NegR { main, aux, sub } => {
            let name = if matches!(p.kind(), ProofKind::NegL { .. }) { "NegL" } else { "NegR" };
            write!(f, "({name} {} {} ", h(main), h(aux))?;
            fmt_proof(sub, f)?;
            f.write_str(")")
        }
        ProofKind::AndL { main, aux1, aux2, sub } => {
            write!(f, "(AndL {} {} {} ", h(main), h(aux1), h(aux2))?;
            fmt_proof(sub, f)?;
            f.write_str(")")
        }
        ProofKind::AndR {
            main,
            aux1,
            left,
            aux2,
            right,
        } => {
            write!(f, "(AndR {} {} ", h(main), h(aux1))?;
            fmt_proof(left, f)?;
            write!(f, " {} ", h(aux2))?;
            fmt_proof(right, f)?;
            f.write_str(")")
        }
        ProofKind::AllL { main, term, aux, sub } => {
            write!(f, "(AllL {} {term} {} ", h(main), h(aux))?;
            fmt_proof(sub, f)?;
            f.write_str(")")
        }
        ProofKind::AllR { main, eigen, aux, sub } => {
            write!(f, "(AllR {} {} {} {} ", h(main), eigen.name(), eigen.ty(), h(aux))?;
            fmt_proof(sub, f)?;
            f.write_str(")")
        }
        ProofKind::Eql {
            eq,
            main,
            left_to_right,
            context,
            aux,
            sub,
        } => {
            write!(f, "(Eql {} {} {left_to_right} {context} {} ", h(eq), h(main), h(aux))?;
            fmt_proof(sub, f)?;
            f.write_str(")")
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
            write!(f, "(Ind {} {motive} {target} {} ", h(main), h(base_aux))?;
            fmt_proof(base, f)?;
            write!(
                f,
                " {} {} {} {} ",
                eigen.name(),
                eigen.ty(),
                h(step_hyp),
                h(step_concl)
            )?;
            fmt_proof(step, f)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_proof(self, f)
    }
}

impl fmt::Debug for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_proof(self, f)
    }
}

impl PartialEq for Proof {
    fn eq(&self, other: &Proof) -> bool {
        self.ptr_eq(other)
            || (self.0.size == other.0.size
                && self.0.free_hyps == other.0.free_hyps
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Proof {}
