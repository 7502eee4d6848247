use super::*;
use crate::generators::{linear_cut_proof, linear_proof, Family};
use crate::herbrand::{extract_instances, herbrand_sequent, validate_ground};
use crate::lkt::Proof;
use crate::normalize::{normalize, Budget};
use crate::term::{Const, Ty};

fn atom(name: &str) -> Expr {
    Expr::cnst(Const::new(name, Ty::o()))
}

fn h(v: i32) -> Hyp {
    Hyp::new(v).unwrap()
}

#[test]
fn axiom_with_weakening() {
    let ctx = LocalContext::new()
        .with(h(-1), atom("A"))
        .with(h(-2), atom("B"))
        .with(h(1), atom("A"));
    let t = to_tree(&Proof::ax(h(-1), h(1)), &ctx).unwrap();
    t.verify().unwrap();
    assert_eq!(t.count(&|r| matches!(r, Rule::Weaken { .. })), 1);
    assert_eq!(t.end_sequent(), ctx.end_sequent());
}

#[test]
fn linear_two_has_two_forall_left() {
    let g = linear_proof(2);
    let t = to_tree(&g.proof, &g.ctx).unwrap();
    t.verify().unwrap();
    assert_eq!(t.count(&|r| matches!(r, Rule::AllL { .. })), 2);
    assert!(t.count(&|r| matches!(r, Rule::Contract { .. })) >= 1);
}

#[test]
fn cut_gets_contractions() {
    let g = linear_cut_proof(2);
    let t = to_tree(&g.proof, &g.ctx).unwrap();
    t.verify().unwrap();
    assert_eq!(t.cut_count(), 1);
    assert_eq!(t.end_sequent(), g.ctx.end_sequent());
}

#[test]
fn unsupported_nodes() {
    let g = Family::AddDefs.generate(1);
    assert!(matches!(to_tree(&g.proof, &g.ctx), Err(LkError::UnsupportedNode { .. })));
}

#[test]
fn cut_free_input_unchanged() {
    let g = linear_proof(3);
    let t = to_tree(&g.proof, &g.ctx).unwrap();
    assert_eq!(gentzen_eliminate(&t, &mut Budget::unlimited()).unwrap(), t);
}

#[test]
fn conjunction_grade_reduction() {
    // A ∧ B ⊢ A ∧ B by a cut on A ∧ B.
    let (a, b) = (atom("A"), atom("B"));
    let ab = Expr::and(a.clone(), b.clone());
    let ctx = LocalContext::new().with(h(-1), a.clone()).with(h(-2), b.clone()).with(h(1), ab.clone());
    let left = Proof::and_r(h(3), h(4), Proof::ax(h(-1), h(4)), h(5), Proof::ax(h(-2), h(5)));
    let right = Proof::and_l(h(-3), h(-4), h(-5), Proof::and_r(h(1), h(6), Proof::ax(h(-4), h(6)), h(7), Proof::ax(h(-5), h(7))));
    let p = Proof::cut(ab, h(3), left, h(-3), right);
    crate::typing::check_closed(&p, &ctx).unwrap();
    let t = to_tree(&p, &ctx).unwrap();
    t.verify().unwrap();
    let e = gentzen_eliminate(&t, &mut Budget::unlimited()).unwrap();
    e.verify().unwrap_or_else(|m| panic!("{m}\n{e}"));
    assert_eq!(e.cut_count(), 0);
    assert_eq!(e.end_sequent(), ctx.end_sequent());
}

#[test]
fn equality_free_families_agree_with_normalize() {
    for fam in Family::EQUALITY_FREE {
        for n in 0..=4 {
            let g = fam.generate(n);
            let t = to_tree(&g.proof, &g.ctx).unwrap();
            t.verify().unwrap_or_else(|m| panic!("{fam}({n}) translation: {m}"));
            let e = gentzen_eliminate(&t, &mut Budget::unlimited()).unwrap();
            e.verify().unwrap_or_else(|m| panic!("{fam}({n}) elimination: {m}"));
            assert_eq!(e.cut_count(), 0, "{fam}({n})");
            assert_eq!(e.end_sequent(), g.ctx.end_sequent());
            let seq = herbrand_sequent(&tree_instances(&e), &e.concl);
            assert!(validate_ground(&seq).unwrap(), "{fam}({n}): {seq}");
            let q = normalize(&g.proof, &mut Budget::unlimited()).unwrap();
            let seq2 = herbrand_sequent(&extract_instances(&q, &g.ctx).unwrap(), &g.ctx);
            assert!(validate_ground(&seq2).unwrap());
        }
    }
}

#[test]
fn budget_is_respected() {
    let g = linear_cut_proof(4);
    let t = to_tree(&g.proof, &g.ctx).unwrap();
    assert!(gentzen_eliminate(&t, &mut Budget::new(10)).is_err());
}

