//! Atomization of equational inferences.
//!
//! `sim_eq(φ, h1, h2, h3)` proves `h1: l = r, h2: φ(l) ⊢ h3: φ(r)` for any
//! `l`, `r` by recursion on the body of `φ`, rewriting only inside atoms.
//! [`atomize_eqls`] replaces every `Eql` whose context is not an atom by a
//! cut against such a proof.

use thiserror::Error;

use crate::formula::{is_atomic, view, FormulaView};
use crate::lkt::{fresh_hyp_in, rename_hyp_unchecked, Hyp, Polarity, Proof, ProofKind};
use crate::term::{beta_normalize, fresh_variant, instantiate, Expr, ExprKind, Var, VarSet};
use crate::typing::{scope_bindings, ContextStack, LocalContext};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EqElimError {
    #[error("cannot rewrite under {context}: the hole is not in a term position")]
    UnsupportedShape { context: Expr },
    #[error("equation {equation} relates predicates or functions")]
    PredicateEquation { equation: Expr },
    #[error("proof is not well-typed at {node}")]
    IllTyped { node: String },
}

/// Which way the proof rewrites along `l = r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// `φ(l) ⊢ φ(r)`
    Forward,
    /// `φ(r) ⊢ φ(l)`
    Backward,
}

impl Dir {
    fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

struct SimEq<'a> {
    eq: Hyp,
    avoid: &'a VarSet,
    next: u32,
}

impl SimEq<'_> {
    fn hyp(&mut self, pol: Polarity) -> Hyp {
        self.next += 1;
        Hyp::with_polarity(pol, self.next)
    }

    fn eigen(&self, v: &Var, hole: &Var, pred: &Expr) -> Var {
        fresh_variant(v, self.avoid.iter().chain(pred.free_vars().iter()).chain([hole]))
    }

    /// `from: φ(a) ⊢ to: φ(b)` where `(a, b)` is `(l, r)` or `(r, l)` by `dir`.
    fn build(&mut self, pred: &Expr, dir: Dir, from: Hyp, to: Hyp) -> Result<Proof, EqElimError> {
        let unsupported = || EqElimError::UnsupportedShape { context: pred.clone() };
        let ExprKind::Abs(x, body) = pred.kind() else {
            return Err(unsupported());
        };
        if !body.free_vars().contains(x) {
            return Ok(Proof::ax(from, to));
        }
        if x.ty().result().is_o() {
            return Err(unsupported());
        }
        let lam = |b: &Expr| Expr::abs(x.clone(), b.clone());
        match view(body) {
            FormulaView::Atom | FormulaView::Eq(..) => {
                if body.as_var().is_some() {
                    return Err(unsupported());
                }
                let aux = self.hyp(Polarity::Pos);
                Ok(Proof::eql(self.eq, to, dir == Dir::Backward, pred.clone(), aux, Proof::ax(from, aux)))
            }
            FormulaView::Top | FormulaView::Bot => Ok(Proof::ax(from, to)),
            FormulaView::Not(a) => {
                let (ca, fa) = (self.hyp(Polarity::Neg), self.hyp(Polarity::Pos));
                let inner = self.build(&lam(a), dir.flip(), ca, fa)?;
                Ok(Proof::neg_r(to, ca, Proof::neg_l(from, fa, inner)))
            }
            FormulaView::And(a, b) => {
                let (h4, h5) = (self.hyp(Polarity::Neg), self.hyp(Polarity::Neg));
                let (h6, h7) = (self.hyp(Polarity::Pos), self.hyp(Polarity::Pos));
                let left = self.build(&lam(a), dir, h4, h6)?;
                let right = self.build(&lam(b), dir, h5, h7)?;
                Ok(Proof::and_l(from, h4, h5, Proof::and_r(to, h6, left, h7, right)))
            }
            FormulaView::Or(a, b) => {
                let (c, d) = (self.hyp(Polarity::Pos), self.hyp(Polarity::Pos));
                let (fa, fb) = (self.hyp(Polarity::Neg), self.hyp(Polarity::Neg));
                let left = self.build(&lam(a), dir, fa, c)?;
                let right = self.build(&lam(b), dir, fb, d)?;
                Ok(Proof::and_l(to, c, d, Proof::and_r(from, fa, left, fb, right)))
            }
            FormulaView::Imp(a, b) => {
                let (c, d) = (self.hyp(Polarity::Neg), self.hyp(Polarity::Pos));
                let (fa, fb) = (self.hyp(Polarity::Pos), self.hyp(Polarity::Neg));
                let left = self.build(&lam(a), dir.flip(), c, fa)?;
                let right = self.build(&lam(b), dir, fb, d)?;
                Ok(Proof::and_l(to, c, d, Proof::and_r(from, fa, left, fb, right)))
            }
            FormulaView::All(q) | FormulaView::Ex(q) => {
                let universal = matches!(view(body), FormulaView::All(_));
                let ExprKind::Abs(y, _) = q.kind() else {
                    return Err(unsupported());
                };
                let y2 = self.eigen(y, x, pred);
                let yv = Expr::var(y2.clone());
                let inner_pred = lam(&beta_normalize(&instantiate(q, &yv)));
                let (a, c) = (self.hyp(Polarity::Neg), self.hyp(Polarity::Pos));
                let inner = self.build(&inner_pred, dir, a, c)?;
                // ∀: eigenvariable on the goal, instance on the premise; ∃ dually.
                Ok(if universal {
                    Proof::all_r(to, y2, c, Proof::all_l(from, yv, a, inner))
                } else {
                    Proof::all_r(from, y2, a, Proof::all_l(to, yv, c, inner))
                })
            }
        }
    }
}

/// `h1: l = r, h2: φ(l) ⊢ h3: φ(r)` for every `l` and `r`.
pub fn sim_eq(phi: &Expr, h1: Hyp, h2: Hyp, h3: Hyp) -> Result<Proof, EqElimError> {
    sim_eq_avoiding(phi, h1, h2, h3, &VarSet::empty())
}

/// [`sim_eq`] whose eigenvariables also avoid `avoid`, which should contain
/// the free variables of the context the proof is used in.
pub fn sim_eq_avoiding(phi: &Expr, h1: Hyp, h2: Hyp, h3: Hyp, avoid: &VarSet) -> Result<Proof, EqElimError> {
    sim(phi, h1, Dir::Forward, h2, h3, avoid)
}

fn sim(phi: &Expr, eq: Hyp, dir: Dir, from: Hyp, to: Hyp, avoid: &VarSet) -> Result<Proof, EqElimError> {
    let mut s = SimEq {
        eq,
        avoid,
        next: eq.abs().max(from.abs()).max(to.abs()),
    };
    s.build(&beta_normalize(phi), dir, from, to)
}

fn context_is_atomic(context: &Expr) -> bool {
    match beta_normalize(context).kind() {
        ExprKind::Abs(_, body) => is_atomic(body),
        _ => false,
    }
}

/// Replaces every `Eql` with a non-atomic context by a cut against
/// [`sim_eq`]; the result only rewrites inside atoms.
pub fn atomize_eqls(p: &Proof, ctx: &LocalContext) -> Result<Proof, EqElimError> {
    if !has_complex_eql(p) {
        return Ok(p.clone());
    }
    let mut stack = ContextStack::new(ctx);
    walk(p, &mut stack)
}

/// Whether some `Eql` in `p` rewrites under a connective or quantifier.
pub fn has_complex_eql(p: &Proof) -> bool {
    match p.kind() {
        ProofKind::Eql { context, sub, .. } => !context_is_atomic(context) || has_complex_eql(sub),
        _ => p.children().into_iter().any(has_complex_eql),
    }
}

/// Every `Eql` context is an atom.
pub fn eqls_are_atomic(p: &Proof) -> bool {
    !has_complex_eql(p)
}

fn walk(p: &Proof, stack: &mut ContextStack) -> Result<Proof, EqElimError> {
    if !has_complex_eql(p) {
        return Ok(p.clone());
    }
    let ill_typed = || EqElimError::IllTyped { node: p.label() };
    let bindings = scope_bindings(p, stack).ok_or_else(ill_typed)?;
    let mut scopes = p.scopes();
    for (sc, binds) in scopes.iter_mut().zip(bindings) {
        let mark = stack.mark();
        for (h, e) in binds {
            stack.push(h, e);
        }
        let body = walk(&sc.body, stack);
        stack.pop_to(mark);
        sc.body = body?;
    }
    let ProofKind::Eql {
        eq,
        main,
        left_to_right,
        context,
        ..
    } = p.kind()
    else {
        return Ok(p.with_scopes(scopes, false));
    };
    if context_is_atomic(context) {
        return Ok(p.with_scopes(scopes, false));
    }
    let sc = scopes.pop().expect("Eql has one scope");
    let (aux, sub) = (sc.hyps[0], sc.body);
    let equation = stack.get(*eq).ok_or_else(ill_typed)?.clone();
    let FormulaView::Eq(t, s) = view(&equation) else {
        return Err(ill_typed());
    };
    if t.ty().is_none_or(|ty| ty.is_o() || ty.as_arrow().is_some()) {
        return Err(EqElimError::PredicateEquation { equation });
    }
    let context = beta_normalize(context);
    let ExprKind::Abs(x, body) = context.kind() else {
        return Err(ill_typed());
    };
    if !body.free_vars().contains(x) {
        return Ok(rename_hyp_unchecked(&sub, aux, *main));
    }
    let tgt = if *left_to_right { s } else { t };
    let cut_formula = beta_normalize(&instantiate(&context, tgt));
    let k = fresh_hyp_in(main.polarity().flip(), &[sub.free_hyps()], &[*eq, *main, aux]);
    let avoid = stack.free_vars().union(sub.free_vars());
    // The equation `t = s` read forward rewrites `φ(t)` into `φ(s)`.
    Ok(match main.polarity() {
        Polarity::Pos => {
            // φ(tgt) ⊢ φ(src)
            let dir = if *left_to_right { Dir::Backward } else { Dir::Forward };
            let right = sim(&context, *eq, dir, k, *main, &avoid)?;
            Proof::cut(cut_formula, aux, sub, k, right)
        }
        Polarity::Neg => {
            // φ(src) ⊢ φ(tgt)
            let dir = if *left_to_right { Dir::Forward } else { Dir::Backward };
            let left = sim(&context, *eq, dir, *main, k, &avoid)?;
            Proof::cut(cut_formula, k, left, aux, sub)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Const, Ty};
    use crate::typing::check_closed;

    fn h(v: i32) -> Hyp {
        Hyp::new(v).unwrap()
    }

    fn i() -> Ty {
        Ty::i()
    }

    fn pred(name: &str, arity: usize) -> Expr {
        Expr::cnst(Const::new(name, Ty::arrows(vec![i(); arity], Ty::o())))
    }

    fn x() -> Var {
        Var::new("x", i())
    }

    fn cst(name: &str) -> Expr {
        Expr::cnst(Const::new(name, i()))
    }

    fn seq(phi: &Expr, l: &Expr, r: &Expr) -> LocalContext {
        LocalContext::new()
            .with(h(-1), Expr::eq(l.clone(), r.clone()))
            .with(h(-2), beta_normalize(&instantiate(phi, l)))
            .with(h(3), beta_normalize(&instantiate(phi, r)))
    }

    #[test]
    fn constant_context_is_axiom() {
        let phi = Expr::abs(x(), Expr::app(pred("Q", 1), cst("c")));
        assert_eq!(sim_eq(&phi, h(-1), h(-2), h(3)).unwrap(), Proof::ax(h(-2), h(3)));
    }

    #[test]
    fn atom_context_is_eql_then_axiom() {
        let phi = Expr::abs(x(), Expr::app(pred("P", 1), Expr::var(x())));
        let p = sim_eq(&phi, h(-1), h(-2), h(3)).unwrap();
        assert!(matches!(p.kind(), ProofKind::Eql { main, .. } if *main == h(3)));
        check_closed(&p, &seq(&phi, &cst("a"), &cst("b"))).unwrap();
    }

    #[test]
    fn conjunction_case_shape() {
        let xv = Expr::var(x());
        let phi = Expr::abs(
            x(),
            Expr::and(Expr::app(pred("P", 1), xv.clone()), Expr::app(pred("R", 1), xv)),
        );
        let p = sim_eq(&phi, h(-1), h(-2), h(3)).unwrap();
        let ProofKind::AndL { main, aux1, aux2, sub } = p.kind() else { panic!("{p}") };
        assert_eq!((*main, *aux1, *aux2), (h(-2), h(-4), h(-5)));
        let ProofKind::AndR { main, aux1, aux2, .. } = sub.kind() else { panic!("{p}") };
        assert_eq!((*main, *aux1, *aux2), (h(3), h(6), h(7)));
        check_closed(&p, &seq(&phi, &cst("a"), &cst("b"))).unwrap();
    }

    #[test]
    fn all_connectives_type_check() {
        let xv = Expr::var(x());
        let y = Var::new("y", i());
        let yv = Expr::var(y.clone());
        let p = |a: &Expr| Expr::app(pred("P", 1), a.clone());
        let r = |a: &Expr, b: &Expr| Expr::apps(pred("R", 2), [a.clone(), b.clone()]);
        let bodies = [
            Expr::not(p(&xv)),
            Expr::or(p(&xv), Expr::top()),
            Expr::imp(p(&xv), Expr::not(p(&xv))),
            Expr::all(y.clone(), r(&xv, &yv)),
            Expr::ex(y.clone(), Expr::and(r(&yv, &xv), Expr::bot())),
            Expr::eq(xv.clone(), cst("c")),
        ];
        // `y` free in the equation forces a fresh eigenvariable.
        for (l, rr) in [(cst("a"), cst("b")), (yv.clone(), cst("b"))] {
            for body in &bodies {
                let phi = Expr::abs(x(), body.clone());
                let ctx = seq(&phi, &l, &rr);
                let q = sim_eq_avoiding(&phi, h(-1), h(-2), h(3), &ctx.free_vars()).unwrap();
                check_closed(&q, &ctx).unwrap_or_else(|e| panic!("{phi}: {e}\n{q}"));
                assert!(eqls_are_atomic(&q));
            }
        }
    }

    #[test]
    fn predicate_hole_is_unsupported() {
        let b = Var::new("b", Ty::o());
        let phi = Expr::abs(b.clone(), Expr::and(Expr::var(b), Expr::top()));
        assert!(matches!(
            sim_eq(&phi, h(-1), h(-2), h(3)),
            Err(EqElimError::UnsupportedShape { .. })
        ));
    }

    fn quantified_context() -> (Expr, LocalContext) {
        let nat = Ty::nat();
        let (xv, y, z) = (Var::new("x", nat.clone()), Var::new("y", nat.clone()), Var::new("z", nat.clone()));
        let q = Expr::cnst(Const::new("Q", Ty::arrows([nat.clone(), nat], Ty::o())));
        let context = Expr::abs(
            y.clone(),
            Expr::all(xv.clone(), Expr::apps(q, [Expr::var(xv), Expr::var(y)])),
        );
        let ctx = LocalContext::new()
            .with(h(-1), Expr::eq(Expr::zero(), Expr::var(z.clone())))
            .with(h(-2), instantiate(&context, &Expr::var(z)))
            .with(h(3), instantiate(&context, &Expr::zero()));
        (context, ctx)
    }

    #[test]
    fn atomizes_quantified_context_all_orientations() {
        let (context, ctx) = quantified_context();
        // main +3: φ(0), rewritten with 0 = z left to right to φ(z).
        let proofs = [
            Proof::eql(h(-1), h(3), true, context.clone(), h(4), Proof::ax(h(-2), h(4))),
            Proof::eql(h(-1), h(-2), false, context.clone(), h(-4), Proof::ax(h(-4), h(3))),
        ];
        for p in proofs {
            check_closed(&p, &ctx).unwrap();
            let q = atomize_eqls(&p, &ctx).unwrap();
            assert!(eqls_are_atomic(&q), "{q}");
            assert!(matches!(q.kind(), ProofKind::Cut { .. }));
            check_closed(&q, &ctx).unwrap_or_else(|e| panic!("{e}\n{q}"));
        }
        // The flipped equation covers the other two orientations.
        let flipped = ctx.clone().with(h(-1), Expr::eq(Expr::var(Var::new("z", Ty::nat())), Expr::zero()));
        let proofs = [
            Proof::eql(h(-1), h(3), false, context.clone(), h(4), Proof::ax(h(-2), h(4))),
            Proof::eql(h(-1), h(-2), true, context.clone(), h(-4), Proof::ax(h(-4), h(3))),
        ];
        for p in proofs {
            check_closed(&p, &flipped).unwrap();
            let q = atomize_eqls(&p, &flipped).unwrap();
            assert!(eqls_are_atomic(&q));
            check_closed(&q, &flipped).unwrap_or_else(|e| panic!("{e}\n{q}"));
        }
    }

    #[test]
    fn atomic_eql_unchanged() {
        let g = crate::generators::add_defs_proof();
        assert!(atomize_eqls(&g.proof, &g.ctx).unwrap().ptr_eq(&g.proof));
    }

    #[test]
    fn predicate_equation_rejected() {
        let (a, b) = (Var::new("A", Ty::o()), Var::new("B", Ty::o()));
        let w = Var::new("w", Ty::o());
        let context = Expr::abs(w.clone(), Expr::and(Expr::var(w), Expr::top()));
        let ctx = LocalContext::new()
            .with(h(-1), Expr::eq(Expr::var(a.clone()), Expr::var(b.clone())))
            .with(h(-2), Expr::and(Expr::var(b), Expr::top()))
            .with(h(3), Expr::and(Expr::var(a), Expr::top()));
        let p = Proof::eql(h(-1), h(3), true, context, h(4), Proof::ax(h(-2), h(4)));
        check_closed(&p, &ctx).unwrap();
        assert!(matches!(
            atomize_eqls(&p, &ctx),
            Err(EqElimError::PredicateEquation { .. })
        ));
    }
}
