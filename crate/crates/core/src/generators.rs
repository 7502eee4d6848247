//! Benchmark proof families.
//!
//! The linear families prove `P(0), ∀x (P(x) → P(s(x))) ⊢ P(sⁿ(0))` in the
//! context `-1: P(0)`, `-2: ∀x (P(x) → P(s(x)))`, `+1: P(sⁿ(0))`; the square
//! families prove `P(0,0), ∀x∀y (P(x,y) → P(s(x),y)), ∀x∀y (P(x,y) → P(x,s(y)))
//! ⊢ P(sⁿ(0), sⁿ(0))` with the hypotheses `-1`, `-2`, `-3`, `+1`.

use std::fmt;
use std::str::FromStr;

use crate::induction::RecursiveDefinitions;
use crate::lkt::{Hyp, Proof};
use crate::term::{Const, Expr, Ty, Var};
use crate::typing::LocalContext;

/// A generated proof with the context it is typed in.
#[derive(Debug, Clone)]
pub struct Generated {
    pub proof: Proof,
    pub ctx: LocalContext,
    pub defs: Option<RecursiveDefinitions>,
}

impl Generated {
    fn plain(proof: Proof, ctx: LocalContext) -> Generated {
        Generated { proof, ctx, defs: None }
    }
}

/// The named families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Linear,
    LinearCut,
    LinearAcnf,
    SquareDiagonal,
    SquareCut,
    IndLinear,
    /// The `0 + x = x` induction proof instantiated at the numeral `n`.
    AddDefs,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Linear,
        Family::LinearCut,
        Family::LinearAcnf,
        Family::SquareDiagonal,
        Family::SquareCut,
        Family::IndLinear,
        Family::AddDefs,
    ];

    /// Families without `Rfl`, `Eql` or `Ind`.
    pub const EQUALITY_FREE: [Family; 5] = [
        Family::Linear,
        Family::LinearCut,
        Family::LinearAcnf,
        Family::SquareDiagonal,
        Family::SquareCut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::LinearCut => "linear_cut",
            Family::LinearAcnf => "linear_acnf",
            Family::SquareDiagonal => "square_diagonal",
            Family::SquareCut => "square_cut",
            Family::IndLinear => "ind_linear",
            Family::AddDefs => "add_defs",
        }
    }

    pub fn generate(self, n: usize) -> Generated {
        match self {
            Family::Linear => linear_proof(n),
            Family::LinearCut => linear_cut_proof(n),
            Family::LinearAcnf => linear_acnf(n),
            Family::SquareDiagonal => square_diagonal_proof(n),
            Family::SquareCut => square_cut_proof(n),
            Family::IndLinear => ind_linear_proof(n),
            Family::AddDefs => add_defs_instance(n),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Family, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                format!("unknown family `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Hands out hypothesis labels above the ones used by the end-sequent.
struct Labels(u32);

impl Labels {
    fn new() -> Labels {
        Labels(10)
    }

    fn neg(&mut self) -> Hyp {
        self.0 += 1;
        Hyp::neg(self.0)
    }

    fn pos(&mut self) -> Hyp {
        self.0 += 1;
        Hyp::pos(self.0)
    }
}

fn h(v: i32) -> Hyp {
    Hyp::new(v).expect("nonzero")
}

pub fn pred_p() -> Expr {
    Expr::cnst(Const::new("P", Ty::arrow(Ty::nat(), Ty::o())))
}

pub fn pred_p2() -> Expr {
    Expr::cnst(Const::new("P", Ty::arrows([Ty::nat(), Ty::nat()], Ty::o())))
}

fn p(t: Expr) -> Expr {
    Expr::app(pred_p(), t)
}

fn p2(a: Expr, b: Expr) -> Expr {
    Expr::apps(pred_p2(), [a, b])
}

fn var(name: &str) -> Var {
    Var::new(name, Ty::nat())
}

/// `∀x (P(x) → P(s^m(x)))`
pub fn linear_lemma(m: usize) -> Expr {
    let x = var("x");
    let xv = Expr::var(x.clone());
    Expr::all(x, Expr::imp(p(xv.clone()), p(Expr::succ_n(m, xv))))
}

/// `∀x ∀y (P(x,y) → P(s^m(x), s^m(y)))`
pub fn square_lemma(m: usize) -> Expr {
    let (x, y) = (var("x"), var("y"));
    let (xv, yv) = (Expr::var(x.clone()), Expr::var(y.clone()));
    let body = Expr::imp(p2(xv.clone(), yv.clone()), p2(Expr::succ_n(m, xv), Expr::succ_n(m, yv)));
    Expr::all(x, Expr::all(y, body))
}

/// The linear end-sequent at `P(s^k(0))`.
pub fn linear_context(k: usize) -> LocalContext {
    LocalContext::new()
        .with(h(-1), p(Expr::zero()))
        .with(h(-2), linear_lemma(1))
        .with(h(1), p(Expr::numeral(k)))
}

/// The square end-sequent at `P(s^k(0), s^k(0))`.
pub fn square_context(k: usize) -> LocalContext {
    let (x, y) = (var("x"), var("y"));
    let (xv, yv) = (Expr::var(x.clone()), Expr::var(y.clone()));
    let step_x = Expr::all(
        x.clone(),
        Expr::all(
            y.clone(),
            Expr::imp(p2(xv.clone(), yv.clone()), p2(Expr::succ(xv.clone()), yv.clone())),
        ),
    );
    let step_y = Expr::all(
        x,
        Expr::all(y, Expr::imp(p2(xv.clone(), yv.clone()), p2(xv, Expr::succ(yv)))),
    );
    LocalContext::new()
        .with(h(-1), p2(Expr::zero(), Expr::zero()))
        .with(h(-2), step_x)
        .with(h(-3), step_y)
        .with(h(1), p2(Expr::numeral(k), Expr::numeral(k)))
}

/// Uses the implication `imp` (negative, `A → B`): proves `A` by `Ax(from, ·)`
/// and continues with `B` bound to a fresh hypothesis handed to `rest`.
fn modus_ponens(l: &mut Labels, imp: Hyp, from: Hyp, rest: impl FnOnce(&mut Labels, Hyp) -> Proof) -> Proof {
    let a = l.pos();
    let b = l.neg();
    let right = rest(l, b);
    Proof::and_r(imp, a, Proof::ax(from, a), b, right)
}

/// From `lemma: ∀x (P(x) → P(s^m(x)))` and `from: P(t)`, continues with
/// `P(s^m(t))`.
fn apply_linear(
    l: &mut Labels,
    lemma: Hyp,
    t: Expr,
    from: Hyp,
    rest: impl FnOnce(&mut Labels, Hyp) -> Proof,
) -> Proof {
    let inst = l.neg();
    let body = modus_ponens(l, inst, from, rest);
    Proof::all_l(lemma, t, inst, body)
}

/// From `lemma: ∀x∀y (P(x,y) → Q(x,y))` and `from: P(a,b)`, continues with `Q(a,b)`.
fn apply_square(
    l: &mut Labels,
    lemma: Hyp,
    a: Expr,
    b: Expr,
    from: Hyp,
    rest: impl FnOnce(&mut Labels, Hyp) -> Proof,
) -> Proof {
    let i1 = l.neg();
    let i2 = l.neg();
    let body = modus_ponens(l, i2, from, rest);
    Proof::all_l(lemma, a, i1, Proof::all_l(i1, b, i2, body))
}

/// Applies the step lemma `lemma` (stepping by `m`) `count` times starting
/// from `P(s^start(0))` at `from`, ending in `Ax(·, goal)`.
fn linear_chain(l: &mut Labels, lemma: Hyp, m: usize, start: Expr, count: usize, from: Hyp, goal: Hyp) -> Proof {
    if count == 0 {
        return Proof::ax(from, goal);
    }
    let next = Expr::succ_n(m, start.clone());
    apply_linear(l, lemma, start, from, |l, g| linear_chain(l, lemma, m, next, count - 1, g, goal))
}

/// Cut-free proof with `n` instances of the step axiom.
pub fn linear_proof(n: usize) -> Generated {
    let mut l = Labels::new();
    let proof = linear_chain(&mut l, h(-2), 1, Expr::zero(), n, h(-1), h(1));
    Generated::plain(proof, linear_context(n))
}

/// Proof of the linear sequent at `2ⁿ` with cuts on `∀x (P(x) → P(s^{2^k}(x)))`
/// for `1 ≤ k < n`; `n = 0` gives `Ax` on `P(0) ⊢ P(0)`.
pub fn linear_cut_proof(n: usize) -> Generated {
    if n == 0 {
        return Generated::plain(Proof::ax(h(-1), h(1)), linear_context(0));
    }
    let mut l = Labels::new();
    let proof = linear_cut_from(&mut l, h(-2), 0, n);
    Generated::plain(proof, linear_context(1 << n))
}

/// Given `lemma` for step `2^k`, proves the goal at `2^n`.
fn linear_cut_from(l: &mut Labels, lemma: Hyp, k: usize, n: usize) -> Proof {
    let m = 1usize << k;
    if k + 1 == n {
        return linear_chain(l, lemma, m, Expr::zero(), 2, h(-1), h(1));
    }
    // Lemma for 2^(k+1), proved from the lemma for 2^k.
    let main = l.pos();
    let x = var("x");
    let imp = l.pos();
    let (prem, concl) = (l.neg(), l.pos());
    let body = linear_chain(l, lemma, m, Expr::var(x.clone()), 2, prem, concl);
    let left = Proof::all_r(main, x, imp, Proof::and_l(imp, prem, concl, body));
    let next = l.neg();
    let right = linear_cut_from(l, next, k + 1, n);
    Proof::cut(linear_lemma(2 * m), main, left, next, right)
}

/// `n` atomic cuts on `P(s^k(0))`, `1 ≤ k ≤ n`, below all quantifier inferences.
pub fn linear_acnf(n: usize) -> Generated {
    let mut l = Labels::new();
    let proof = acnf_from(&mut l, 0, n, h(-1));
    Generated::plain(proof, linear_context(n))
}

fn acnf_from(l: &mut Labels, k: usize, n: usize, from: Hyp) -> Proof {
    if k == n {
        return Proof::ax(from, h(1));
    }
    let a = l.pos();
    let left = apply_linear(l, h(-2), Expr::numeral(k), from, |_, g| Proof::ax(g, a));
    let b = l.neg();
    let right = acnf_from(l, k + 1, n, b);
    Proof::cut(p(Expr::numeral(k + 1)), a, left, b, right)
}

/// Alternating x- and y-steps along the diagonal, `count` diagonal steps
/// from `(start, start)`, using `sx` and `sy` as the step axioms.
fn diagonal_chain(l: &mut Labels, start: Expr, count: usize, from: Hyp, goal: Hyp) -> Proof {
    if count == 0 {
        return Proof::ax(from, goal);
    }
    let next = Expr::succ(start.clone());
    let (a, b) = (start.clone(), start);
    let next2 = next.clone();
    apply_square(l, h(-2), a, b.clone(), from, move |l, g| {
        apply_square(l, h(-3), next2.clone(), b, g, move |l, g2| diagonal_chain(l, next2, count - 1, g2, goal))
    })
}

/// Cut-free diagonal proof with `2n` instance pairs.
pub fn square_diagonal_proof(n: usize) -> Generated {
    let mut l = Labels::new();
    let proof = diagonal_chain(&mut l, Expr::zero(), n, h(-1), h(1));
    Generated::plain(proof, square_context(n))
}

/// Square sequent at `2ⁿ` with cuts on `∀x∀y (P(x,y) → P(s^{2^k}(x), s^{2^k}(y)))`
/// for `1 ≤ k < n`; the lemma for `k = 1` is proved by four alternating steps.
pub fn square_cut_proof(n: usize) -> Generated {
    if n == 0 {
        return Generated::plain(Proof::ax(h(-1), h(1)), square_context(0));
    }
    let mut l = Labels::new();
    let proof = if n == 1 {
        diagonal_chain(&mut l, Expr::zero(), 2, h(-1), h(1))
    } else {
        square_cut_from(&mut l, None, 1, n)
    };
    Generated::plain(proof, square_context(1 << n))
}

/// Proves the lemma for `2^k` (from the lemma for `2^(k-1)` at `prev`, or
/// from the step axioms when `prev` is `None`), then continues.
fn square_cut_from(l: &mut Labels, prev: Option<Hyp>, k: usize, n: usize) -> Proof {
    let m = 1usize << k;
    let main = l.pos();
    let (x, y) = (var("x"), var("y"));
    let (xv, yv) = (Expr::var(x.clone()), Expr::var(y.clone()));
    let inner = l.pos();
    let imp = l.pos();
    let (prem, concl) = (l.neg(), l.pos());
    let body = match prev {
        None => square_steps(l, xv, yv, prem, concl),
        Some(lemma) => {
            let half = m / 2;
            let (x1, y1) = (Expr::succ_n(half, xv.clone()), Expr::succ_n(half, yv.clone()));
            apply_square(l, lemma, xv, yv, prem, move |l, g| {
                apply_square(l, lemma, x1, y1, g, move |_, g2| Proof::ax(g2, concl))
            })
        }
    };
    let left = Proof::all_r(
        main,
        x,
        inner,
        Proof::all_r(inner, y, imp, Proof::and_l(imp, prem, concl, body)),
    );
    let next = l.neg();
    let right = if k + 1 == n {
        let half = m;
        let z = Expr::zero();
        let z1 = Expr::numeral(half);
        apply_square(l, next, z.clone(), z, h(-1), move |l, g| {
            apply_square(l, next, z1.clone(), z1, g, |_, g2| Proof::ax(g2, h(1)))
        })
    } else {
        square_cut_from(l, Some(next), k + 1, n)
    };
    Proof::cut(square_lemma(m), main, left, next, right)
}

/// Four alternating steps from `P(x,y)` to `P(s²x, s²y)`.
fn square_steps(l: &mut Labels, x: Expr, y: Expr, from: Hyp, goal: Hyp) -> Proof {
    let (x1, y1) = (Expr::succ(x.clone()), Expr::succ(y.clone()));
    let (x1b, y1b) = (x1.clone(), y1.clone());
    apply_square(l, h(-2), x, y.clone(), from, move |l, g| {
        apply_square(l, h(-3), x1.clone(), y, g, move |l, g| {
            apply_square(l, h(-2), x1, y1.clone(), g, move |l, g| {
                apply_square(l, h(-3), Expr::succ(x1b), y1b, g, move |_, g| Proof::ax(g, goal))
            })
        })
    })
}

/// One `Ind` with motive `λz P(z)` and target `sⁿ(0)`.
pub fn ind_linear_proof(n: usize) -> Generated {
    let z = var("z");
    let motive = Expr::abs(z.clone(), p(Expr::var(z)));
    let x = var("x");
    let (inst, a, b) = (h(-5), h(6), h(-7));
    let step = Proof::all_l(
        h(-2),
        Expr::var(x.clone()),
        inst,
        Proof::and_r(inst, a, Proof::ax(h(-3), a), b, Proof::ax(b, h(4))),
    );
    let proof = Proof::ind(
        h(1),
        motive,
        Expr::numeral(n),
        h(2),
        Proof::ax(h(-1), h(2)),
        x,
        h(-3),
        h(4),
        step,
    );
    Generated::plain(proof, linear_context(n))
}

pub fn plus() -> Expr {
    Expr::cnst(Const::new("+", Ty::arrows([Ty::nat(), Ty::nat()], Ty::nat())))
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::apps(plus(), [a, b])
}

/// Recursive definition of `+` by recursion on the second argument.
pub fn add_definitions() -> RecursiveDefinitions {
    RecursiveDefinitions::from_context(&add_axioms(), &[h(-1), h(-2)]).expect("addition axioms are definitions")
}

/// `∀x (x + 0 = x)` and `∀x ∀y (x + s(y) = s(x + y))` as `-1` and `-2`.
pub fn add_axioms() -> LocalContext {
    let (x, y) = (var("x"), var("y"));
    let (xv, yv) = (Expr::var(x.clone()), Expr::var(y.clone()));
    LocalContext::new()
        .with(h(-1), Expr::all(x.clone(), Expr::eq(add(xv.clone(), Expr::zero()), xv.clone())))
        .with(
            h(-2),
            Expr::all(
                x,
                Expr::all(y, Expr::eq(add(xv.clone(), Expr::succ(yv.clone())), Expr::succ(add(xv, yv)))),
            ),
        )
}

/// `∀x (0 + x = x)`
pub fn add_goal() -> Expr {
    let x = var("x");
    let xv = Expr::var(x.clone());
    Expr::all(x, Expr::eq(add(Expr::zero(), xv.clone()), xv))
}

/// Proof of `main: ∀x (0 + x = x)` from the addition axioms by induction.
fn add_defs_body(main: Hyp) -> Proof {
    let x = var("x");
    let y = var("y");
    let z = var("z");
    let (xv, yv, zv) = (Expr::var(x.clone()), Expr::var(y.clone()), Expr::var(z.clone()));
    let motive = Expr::abs(z.clone(), Expr::eq(add(Expr::zero(), zv.clone()), zv.clone()));
    let base = Proof::all_l(h(-1), Expr::zero(), h(-4), Proof::ax(h(-4), h(3)));
    // 0 + s(y) = s(0 + y) rewrites the goal to s(0 + y) = s(y), then the
    // hypothesis 0 + y = y closes it by reflexivity.
    let rewrite_inner = Proof::eql(
        h(-5),
        h(9),
        true,
        Expr::abs(z.clone(), Expr::eq(Expr::succ(zv.clone()), Expr::succ(yv.clone()))),
        h(10),
        Proof::rfl(h(10)),
    );
    let rewrite_outer = Proof::eql(
        h(-8),
        h(6),
        true,
        Expr::abs(z, Expr::eq(zv, Expr::succ(yv.clone()))),
        h(9),
        rewrite_inner,
    );
    let step = Proof::all_l(
        h(-2),
        Expr::zero(),
        h(-7),
        Proof::all_l(h(-7), yv, h(-8), rewrite_outer),
    );
    let ind = Proof::ind(h(2), motive, xv, h(3), base, y, h(-5), h(6), step);
    Proof::all_r(main, x, h(2), ind)
}

/// The induction proof of `∀x (0 + x = x)`, with `+1` as the goal.
pub fn add_defs_proof() -> Generated {
    Generated {
        proof: add_defs_body(h(1)),
        ctx: add_axioms().with(h(1), add_goal()),
        defs: Some(add_definitions()),
    }
}

/// `0 + sᵏ(0) = sᵏ(0)` by a cut on `∀x (0 + x = x)`.
pub fn add_defs_instance(k: usize) -> Generated {
    let goal = add_goal();
    let t = Expr::numeral(k);
    let right = Proof::all_l(h(-11), t.clone(), h(-12), Proof::ax(h(-12), h(1)));
    let proof = Proof::cut(goal, h(11), add_defs_body(h(11)), h(-11), right);
    Generated {
        proof,
        ctx: add_axioms().with(h(1), Expr::eq(add(Expr::zero(), t.clone()), t)),
        defs: Some(add_definitions()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lkt::ProofKind;
    use crate::typing::check_closed;

    fn count(p: &Proof, pred: &dyn Fn(&Proof) -> bool) -> usize {
        usize::from(pred(p)) + p.children().into_iter().map(|c| count(c, pred)).sum::<usize>()
    }

    fn all_l(p: &Proof) -> bool {
        matches!(p.kind(), ProofKind::AllL { .. })
    }

    #[test]
    fn every_family_type_checks() {
        for fam in Family::ALL {
            for n in 0..=6 {
                let g = fam.generate(n);
                check_closed(&g.proof, &g.ctx).unwrap_or_else(|e| panic!("{fam}({n}): {e}\n{}", g.proof));
                assert!(g.proof.audit());
            }
        }
    }

    #[test]
    fn linear_shapes() {
        assert_eq!(linear_proof(0).proof, Proof::ax(h(-1), h(1)));
        let g = linear_proof(1);
        assert_eq!(count(&g.proof, &all_l), 1);
        assert_eq!(count(&g.proof, &|p| matches!(p.kind(), ProofKind::AndR { .. })), 1);
        assert_eq!(count(&g.proof, &|p| matches!(p.kind(), ProofKind::Ax { .. })), 2);
        assert_eq!(count(&linear_proof(5).proof, &all_l), 5);
    }

    #[test]
    fn cut_counts() {
        assert_eq!(linear_cut_proof(0).proof.size(), 1);
        assert_eq!(linear_cut_proof(1).proof.cut_count(), 0);
        assert_eq!(linear_cut_proof(2).proof.cut_count(), 1);
        let ProofKind::Cut { formula, .. } = linear_cut_proof(2).proof.kind().clone() else { panic!() };
        assert_eq!(formula, linear_lemma(2));
        assert_eq!(linear_cut_proof(3).proof.cut_count(), 2);
        assert_eq!(linear_acnf(2).proof.cut_count(), 2);
        assert_eq!(linear_acnf(0).proof.cut_count(), 0);
        assert_eq!(square_cut_proof(2).proof.cut_count(), 1);
        assert_eq!(square_cut_proof(4).proof.cut_count(), 3);
        assert_eq!(count(&square_diagonal_proof(3).proof, &all_l), 12);
    }

    #[test]
    fn ind_linear_checks_up_to_fifty() {
        for n in [0, 1, 7, 50] {
            let g = ind_linear_proof(n);
            check_closed(&g.proof, &g.ctx).unwrap();
        }
    }

    #[test]
    fn add_defs_checks() {
        let g = add_defs_proof();
        check_closed(&g.proof, &g.ctx).unwrap();
    }
}
