use lkt_core::eqelim::sim_eq_avoiding;
use lkt_core::formula::{is_quantifier_free, view, FormulaView};
use lkt_core::lk_baseline::tree_instances;
use lkt_core::random::{random_formula, random_proof, RandomConfig};
use lkt_core::term::{beta_normalize, instantiate, ExprKind};
use lkt_core::*;
use proptest::prelude::*;

fn h(v: i32) -> Hyp {
    Hyp::new(v).unwrap()
}

fn config(depth: usize) -> RandomConfig {
    RandomConfig {
        depth,
        ..RandomConfig::default()
    }
}

fn equality_free(depth: usize) -> RandomConfig {
    RandomConfig {
        equality: false,
        ..config(depth)
    }
}

fn valid_herbrand(p: &Proof, ctx: &LocalContext) -> bool {
    let inst = extract_instances(p, ctx).unwrap();
    validate_ground(&herbrand_sequent(&inst, ctx)).unwrap()
}

/// Quantifier-free, or one block of like quantifiers over a quantifier-free
/// matrix: the end-sequents Herbrand extraction is defined for.
fn single_block(f: &Expr) -> bool {
    let universal = matches!(view(f), FormulaView::All(_));
    let mut cur = f.clone();
    loop {
        let next = match (view(&cur), universal) {
            (FormulaView::All(p), true) | (FormulaView::Ex(p), false) => {
                let ExprKind::Abs(_, body) = p.kind() else { return false };
                beta_normalize(body)
            }
            _ => return is_quantifier_free(&cur),
        };
        cur = next;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_preserves_typing(seed in any::<u64>(), depth in 1usize..=6) {
        let g = random_proof(seed, config(depth));
        check_closed(&g.proof, &g.ctx).unwrap();
        for policy in [Policy::Full, Policy::UntilAtomic, Policy::UntilQuantifierFree] {
            let out = normalize_with(&g.proof, policy, &mut Budget::unlimited()).unwrap();
            prop_assert!(check_closed(&out, &g.ctx).is_ok(), "{policy}: {:?}", check_closed(&out, &g.ctx));
        }
    }

    #[test]
    fn full_normal_forms_are_cut_free(seed in any::<u64>()) {
        let g = random_proof(seed, config(6));
        let out = normalize(&g.proof, &mut Budget::unlimited()).unwrap();
        prop_assert_eq!(out.cut_count(), 0);
        let again = normalize(&out, &mut Budget::unlimited()).unwrap();
        prop_assert_eq!(again, out);
    }

    #[test]
    fn weaker_policies_keep_only_their_cuts(seed in any::<u64>()) {
        let g = random_proof(seed, equality_free(6));
        let out = normalize_with(&g.proof, Policy::UntilQuantifierFree, &mut Budget::unlimited()).unwrap();
        prop_assert!(lkt_core::normalize::cuts_are_stuck(&out, Policy::UntilQuantifierFree));
        let out = normalize_with(&g.proof, Policy::UntilAtomic, &mut Budget::unlimited()).unwrap();
        prop_assert!(lkt_core::normalize::cuts_are_stuck(&out, Policy::UntilAtomic));
    }

    #[test]
    fn tree_engine_agrees(seed in any::<u64>(), depth in 1usize..=5) {
        let g = random_proof(seed, equality_free(depth));
        let t = to_tree(&g.proof, &g.ctx).unwrap();
        prop_assert!(t.verify().is_ok());
        let e = gentzen_eliminate(&t, &mut Budget::unlimited()).unwrap();
        prop_assert!(e.verify().is_ok(), "{:?}", e.verify());
        prop_assert_eq!(e.cut_count(), 0);
        prop_assert_eq!(e.end_sequent(), g.ctx.end_sequent());
    }

    #[test]
    fn sim_eq_proves_rewriting(seed in any::<u64>(), depth in 0usize..=4, k in 0usize..3) {
        let x = Var::new("x", Ty::nat());
        let phi = Expr::abs(x, random_formula(seed, depth));
        let l = Expr::numeral(k);
        let r = Expr::cnst(Const::new("c", Ty::nat()));
        let ctx = LocalContext::new()
            .with(h(-1), Expr::eq(l.clone(), r.clone()))
            .with(h(-2), beta_normalize(&instantiate(&phi, &l)))
            .with(h(3), beta_normalize(&instantiate(&phi, &r)));
        let p = sim_eq_avoiding(&phi, h(-1), h(-2), h(3), &ctx.free_vars()).unwrap();
        prop_assert!(check_closed(&p, &ctx).is_ok(), "{}: {:?}", phi, check_closed(&p, &ctx));
        prop_assert!(lkt_core::eqelim::eqls_are_atomic(&p));
    }
}

#[test]
fn herbrand_sequents_of_random_proofs_are_valid() {
    let mut checked = 0;
    for seed in 0..3000 {
        let g = random_proof(seed, equality_free(2 + seed as usize % 4));
        if g.proof.cut_count() == 0 || !g.ctx.iter().all(|(_, f)| single_block(f)) {
            continue;
        }
        for policy in [Policy::Full, Policy::UntilQuantifierFree] {
            let out = normalize_with(&g.proof, policy, &mut Budget::unlimited()).unwrap();
            assert!(valid_herbrand(&out, &g.ctx), "seed {seed} {policy}");
        }
        let t = gentzen_eliminate(&to_tree(&g.proof, &g.ctx).unwrap(), &mut Budget::unlimited()).unwrap();
        let seq = herbrand_sequent(&tree_instances(&t), &t.concl);
        assert!(validate_ground(&seq).unwrap(), "seed {seed} tree: {seq}");
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} proofs had single-block end-sequents");
}

#[test]
fn families_round_trip_through_tree() {
    for fam in Family::EQUALITY_FREE {
        let g = fam.generate(3);
        let t = to_tree(&g.proof, &g.ctx).unwrap();
        assert_eq!(t.end_sequent(), g.ctx.end_sequent());
        assert_eq!(t.cut_count(), g.proof.cut_count(), "{fam}");
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let g = Family::LinearCut.generate(6);
    let mut b = Budget::new(5);
    assert!(normalize(&g.proof, &mut b).is_err());
    let mut b = Budget::new(1_000_000);
    normalize(&g.proof, &mut b).unwrap();
    assert!(b.used() > 0);
}

#[test]
fn add_defs_normalizes_after_induction_elimination() {
    for k in 0..=3 {
        let g = Family::AddDefs.generate(k);
        let defs = g.defs.clone().unwrap();
        let p = eliminate_inductions(&g.proof, &defs, &mut Budget::unlimited()).unwrap();
        let p = atomize_eqls(&p, &g.ctx).unwrap();
        let out = normalize(&p, &mut Budget::unlimited()).unwrap();
        check_closed(&out, &g.ctx).unwrap();
        assert!(lkt_core::normalize::cuts_are_stuck(&out, Policy::Full));
    }
}
