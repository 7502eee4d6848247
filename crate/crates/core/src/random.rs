//! Seeded generator of random well-typed proofs.
//!
//! Proofs are built bottom-up: every inference picks its auxiliary
//! hypotheses from the free hypotheses of its premises (inventing unused ones
//! when none fit) and gets a fresh main label. Cuts are made non-trivial by
//! reserving the cut hypothesis in both premises, so that some axiom above
//! actually uses it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::is_quantifier_free;
use crate::generators::Generated;
use crate::lkt::{rename_hyp, subst_expr_in_proof, Hyp, Polarity, Proof};
use crate::term::{Const, Expr, Substitution, Ty, Var, VarSet};
use crate::typing::LocalContext;

/// Shape parameters of the generator.
#[derive(Debug, Clone, Copy)]
pub struct RandomConfig {
    /// Maximal height of the proof tree.
    pub depth: usize,
    /// Maximal nesting of connectives in invented formulas.
    pub formula_depth: usize,
    /// Chance of stopping at a leaf before the depth limit.
    pub leaf_chance: f64,
    /// Whether `Rfl` leaves may occur.
    pub equality: bool,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            depth: 6,
            formula_depth: 2,
            leaf_chance: 0.15,
            equality: true,
        }
    }
}

/// A random well-typed proof, deterministic in `seed`.
pub fn random_proof(seed: u64, config: RandomConfig) -> Generated {
    let mut g = ProofGen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        config,
        next_hyp: 0,
        next_eigen: 0,
    };
    let (proof, ctx) = g.proof(config.depth, &[]);
    Generated {
        proof,
        ctx,
        defs: None,
    }
}

/// A random formula over the generator's signature.
pub fn random_formula(seed: u64, depth: usize) -> Expr {
    let mut g = ProofGen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        config: RandomConfig::default(),
        next_hyp: 0,
        next_eigen: 0,
    };
    g.formula(depth)
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn nat_var(name: &str) -> Var {
    Var::new(name, Ty::nat())
}

fn pred(name: &str) -> Expr {
    Expr::cnst(Const::new(name, Ty::arrow(Ty::nat(), Ty::o())))
}

/// A hypothesis the caller will bind: it may be used by an axiom but is never
/// consumed, renamed, or changed by substitution.
type Reserved = (Hyp, Expr);

struct ProofGen {
    rng: ChaCha8Rng,
    config: RandomConfig,
    next_hyp: u32,
    next_eigen: u32,
}

type Built = (Proof, LocalContext);

impl ProofGen {
    fn hyp(&mut self, pol: Polarity) -> Hyp {
        self.next_hyp += 1;
        Hyp::with_polarity(pol, self.next_hyp)
    }

    fn term(&mut self) -> Expr {
        match self.rng.gen_range(0..6) {
            0 => Expr::zero(),
            1 => Expr::numeral(1),
            2 => Expr::succ(Expr::var(nat_var("x"))),
            _ => Expr::var(nat_var(VARS.choose(&mut self.rng).expect("nonempty"))),
        }
    }

    fn atom(&mut self) -> Expr {
        match self.rng.gen_range(0..5) {
            0 => Expr::cnst(Const::new("R", Ty::o())),
            1 | 2 => Expr::app(pred("P"), self.term()),
            _ => Expr::app(pred("Q"), self.term()),
        }
    }

    pub(crate) fn formula(&mut self, depth: usize) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..12) {
                0 => Expr::top(),
                1 => Expr::bot(),
                _ => self.atom(),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0 => Expr::not(self.formula(d)),
            1 => Expr::and(self.formula(d), self.formula(d)),
            2 => Expr::or(self.formula(d), self.formula(d)),
            3 => Expr::imp(self.formula(d), self.formula(d)),
            4 => {
                let v = nat_var(VARS.choose(&mut self.rng).expect("nonempty"));
                Expr::all(v, self.formula(d))
            }
            _ => {
                let v = nat_var(VARS.choose(&mut self.rng).expect("nonempty"));
                Expr::ex(v, self.formula(d))
            }
        }
    }

    fn proof(&mut self, depth: usize, reserved: &[Reserved]) -> Built {
        if depth == 0 || self.rng.gen_bool(self.config.leaf_chance) {
            return self.leaf(reserved);
        }
        for _ in 0..8 {
            let built = match self.rng.gen_range(0..14) {
                0..=7 => self.unary(depth, reserved),
                8..=10 => Some(self.binary(depth, reserved)),
                11 | 12 => Some(self.cut(depth, reserved)),
                _ => self.contraction(depth, reserved),
            };
            if let Some(b) = built {
                return b;
            }
        }
        self.leaf(reserved)
    }

    fn leaf(&mut self, reserved: &[Reserved]) -> Built {
        if !reserved.is_empty() && self.rng.gen_bool(0.8) {
            let (h, f) = reserved.choose(&mut self.rng).expect("nonempty").clone();
            let other = self.hyp(h.polarity().flip());
            let (ante, succ) = if h.is_neg() { (h, other) } else { (other, h) };
            let ctx = LocalContext::new().with(h, f.clone()).with(other, f);
            return (Proof::ax(ante, succ), ctx);
        }
        match self.rng.gen_range(0..8) {
            0 => {
                let h = self.hyp(Polarity::Pos);
                (Proof::top_r(h), LocalContext::new().with(h, Expr::top()))
            }
            1 => {
                let h = self.hyp(Polarity::Neg);
                (Proof::top_r(h), LocalContext::new().with(h, Expr::bot()))
            }
            2 if self.config.equality => {
                let h = self.hyp(Polarity::Pos);
                let t = self.term();
                (Proof::rfl(h), LocalContext::new().with(h, Expr::eq(t.clone(), t)))
            }
            _ => {
                let f = self.formula(self.config.formula_depth);
                let (a, s) = (self.hyp(Polarity::Neg), self.hyp(Polarity::Pos));
                (Proof::ax(a, s), LocalContext::new().with(a, f.clone()).with(s, f))
            }
        }
    }

    /// A free hypothesis of `ctx` with polarity `pol` that is not reserved,
    /// or a fresh one with an invented formula.
    fn aux(&mut self, ctx: &LocalContext, pol: Polarity, reserved: &[Reserved], taken: &[Hyp]) -> (Hyp, Expr) {
        let candidates: Vec<(Hyp, Expr)> = ctx
            .iter()
            .filter(|(h, _)| h.polarity() == pol && !taken.contains(h) && !reserved.iter().any(|(r, _)| r == h))
            .map(|(h, e)| (h, e.clone()))
            .collect();
        if candidates.is_empty() || self.rng.gen_bool(0.1) {
            let f = self.formula(self.config.formula_depth);
            return (self.hyp(pol), f);
        }
        candidates.choose(&mut self.rng).expect("nonempty").clone()
    }

    /// Variables no later substitution or eigenvariable may touch.
    fn frozen(reserved: &[Reserved]) -> VarSet {
        reserved
            .iter()
            .fold(VarSet::empty(), |acc, (_, f)| acc.union(f.free_vars()))
    }

    fn unary(&mut self, depth: usize, reserved: &[Reserved]) -> Option<Built> {
        let (sub, ctx) = self.proof(depth - 1, reserved);
        let rule = self.rng.gen_range(0..7);
        let built = match rule {
            // ¬L and ¬R
            0 | 1 => {
                let pol = if rule == 0 { Polarity::Neg } else { Polarity::Pos };
                let (a, f) = self.aux(&ctx, pol.flip(), reserved, &[]);
                let m = self.hyp(pol);
                let p = if pol == Polarity::Neg {
                    Proof::neg_l(m, a, sub)
                } else {
                    Proof::neg_r(m, a, sub)
                };
                (p, Self::replace(&ctx, &[a], m, Expr::not(f)))
            }
            // ∧L, ∨R and →R
            2..=4 => {
                let (p1, p2, pol) = match rule {
                    2 => (Polarity::Neg, Polarity::Neg, Polarity::Neg),
                    3 => (Polarity::Pos, Polarity::Pos, Polarity::Pos),
                    _ => (Polarity::Neg, Polarity::Pos, Polarity::Pos),
                };
                let (a, fa) = self.aux(&ctx, p1, reserved, &[]);
                let (b, fb) = self.aux(&ctx, p2, reserved, &[a]);
                let main = match rule {
                    2 => Expr::and(fa, fb),
                    3 => Expr::or(fa, fb),
                    _ => Expr::imp(fa, fb),
                };
                let m = self.hyp(pol);
                (Proof::and_l(m, a, b, sub), Self::replace(&ctx, &[a, b], m, main))
            }
            // ∀L and ∃R
            5 => {
                let pol = if self.rng.gen_bool(0.5) { Polarity::Neg } else { Polarity::Pos };
                return self.weak_quantifier(pol, sub, ctx, reserved);
            }
            // ∀R and ∃L
            _ => {
                let pol = if self.rng.gen_bool(0.5) { Polarity::Pos } else { Polarity::Neg };
                return self.strong_quantifier(pol, sub, ctx, reserved);
            }
        };
        Some(built)
    }

    fn replace(ctx: &LocalContext, aux: &[Hyp], main: Hyp, formula: Expr) -> LocalContext {
        let mut out = ctx.clone();
        for a in aux {
            out.remove(*a);
        }
        out.insert(main, formula);
        out
    }

    /// `∀v G` on the left (or `∃v G` on the right) from `G[v:=t]`, obtained by
    /// substituting `t` for a free variable of an auxiliary formula.
    fn weak_quantifier(&mut self, pol: Polarity, sub: Proof, ctx: LocalContext, reserved: &[Reserved]) -> Option<Built> {
        let (a, g) = self.aux(&ctx, pol, reserved, &[]);
        let frozen = Self::frozen(reserved);
        let v = nat_var(VARS.choose(&mut self.rng).expect("nonempty"));
        if frozen.contains(&v) {
            return None;
        }
        let t = self.term();
        let s = Substitution::single(v.clone(), t.clone()).ok()?;
        let sub = subst_expr_in_proof(&sub, &s);
        let ctx = ctx.subst(&s);
        let main = Expr::quant(pol == Polarity::Neg, Expr::abs(v, g));
        let m = self.hyp(pol);
        Some((Proof::all_l(m, t, a, sub), Self::replace(&ctx, &[a], m, main)))
    }

    /// `∀v G` on the right (or `∃v G` on the left) from `G` with a fresh
    /// eigenvariable standing for `v`.
    fn strong_quantifier(&mut self, pol: Polarity, sub: Proof, ctx: LocalContext, reserved: &[Reserved]) -> Option<Built> {
        let (a, g) = self.aux(&ctx, pol, reserved, &[]);
        let frozen = Self::frozen(reserved);
        let rest = ctx
            .iter()
            .filter(|(h, _)| *h != a)
            .fold(VarSet::empty(), |acc, (_, f)| acc.union(f.free_vars()));
        let v = nat_var(VARS.choose(&mut self.rng).expect("nonempty"));
        if frozen.contains(&v) || rest.contains(&v) {
            return None;
        }
        self.next_eigen += 1;
        let eigen = nat_var(&format!("e{}", self.next_eigen));
        let s = Substitution::single(v.clone(), Expr::var(eigen.clone())).ok()?;
        let sub = subst_expr_in_proof(&sub, &s);
        let ctx = ctx.subst(&s);
        let main = Expr::quant(pol == Polarity::Pos, Expr::abs(v, g));
        let m = self.hyp(pol);
        Some((Proof::all_r(m, eigen, a, sub), Self::replace(&ctx, &[a], m, main)))
    }

    fn split(&mut self, reserved: &[Reserved]) -> (Vec<Reserved>, Vec<Reserved>) {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for x in reserved {
            if self.rng.gen_bool(0.5) {
                l.push(x.clone());
            } else {
                r.push(x.clone());
            }
        }
        (l, r)
    }

    fn merge(l: &LocalContext, r: &LocalContext) -> LocalContext {
        l.iter().chain(r.iter()).map(|(h, e)| (h, e.clone())).collect()
    }

    /// ∧R, ∨L and →L.
    fn binary(&mut self, depth: usize, reserved: &[Reserved]) -> Built {
        let (rl, rr) = self.split(reserved);
        let (left, lctx) = self.proof(depth - 1, &rl);
        let (right, rctx) = self.proof(depth - 1, &rr);
        let rule = self.rng.gen_range(0..3);
        let (p1, p2, pol) = match rule {
            0 => (Polarity::Pos, Polarity::Pos, Polarity::Pos),
            1 => (Polarity::Neg, Polarity::Neg, Polarity::Neg),
            _ => (Polarity::Pos, Polarity::Neg, Polarity::Neg),
        };
        let (a, fa) = self.aux(&lctx, p1, &rl, &[]);
        let (b, fb) = self.aux(&rctx, p2, &rr, &[]);
        let main = match rule {
            0 => Expr::and(fa, fb),
            1 => Expr::or(fa, fb),
            _ => Expr::imp(fa, fb),
        };
        let m = self.hyp(pol);
        let mut ctx = Self::merge(&lctx, &rctx);
        ctx.remove(a);
        ctx.remove(b);
        ctx.insert(m, main);
        (Proof::and_r(m, a, left, b, right), ctx)
    }

    fn cut(&mut self, depth: usize, reserved: &[Reserved]) -> Built {
        let f = loop {
            let f = self.formula(self.config.formula_depth);
            // Quantified cut formulas are fine, but keep some cuts propositional.
            if !is_quantifier_free(&f) || self.rng.gen_bool(0.7) {
                break f;
            }
        };
        let (a, b) = (self.hyp(Polarity::Pos), self.hyp(Polarity::Neg));
        let (mut rl, mut rr) = self.split(reserved);
        rl.push((a, f.clone()));
        rr.push((b, f.clone()));
        let (left, lctx) = self.proof(depth - 1, &rl);
        let (right, rctx) = self.proof(depth - 1, &rr);
        let mut ctx = Self::merge(&lctx, &rctx);
        ctx.remove(a);
        ctx.remove(b);
        (Proof::cut(f, a, left, b, right), ctx)
    }

    /// Identifies two free hypotheses with the same formula.
    fn contraction(&mut self, depth: usize, reserved: &[Reserved]) -> Option<Built> {
        let (p, ctx) = self.proof(depth - 1, reserved);
        let hyps: Vec<(Hyp, Expr)> = ctx.iter().map(|(h, e)| (h, e.clone())).collect();
        let pairs: Vec<(Hyp, Hyp)> = hyps
            .iter()
            .flat_map(|(h, e)| {
                hyps.iter()
                    .filter(move |(k, f)| k != h && k.polarity() == h.polarity() && f == e)
                    .map(move |(k, _)| (*h, *k))
            })
            .filter(|(old, _)| !reserved.iter().any(|(r, _)| r == old))
            .collect();
        let (old, new) = *pairs.choose(&mut self.rng)?;
        let p = rename_hyp(&p, old, new).ok()?;
        let mut ctx = ctx;
        ctx.remove(old);
        Some((p, ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::check_closed;

    #[test]
    fn deterministic_in_seed() {
        let a = random_proof(7, RandomConfig::default());
        let b = random_proof(7, RandomConfig::default());
        assert_eq!(a.proof, b.proof);
        assert_eq!(a.ctx, b.ctx);
    }

    #[test]
    fn random_proofs_type_check() {
        for seed in 0..300 {
            let g = random_proof(seed, RandomConfig::default());
            if let Err(e) = check_closed(&g.proof, &g.ctx) {
                panic!("seed {seed}: {e:?}\n{}\n{:?}", g.proof, g.ctx);
            }
        }
    }

    #[test]
    fn some_proofs_have_cuts() {
        let with_cuts = (0..100)
            .filter(|s| random_proof(*s, RandomConfig::default()).proof.cut_count() > 0)
            .count();
        assert!(with_cuts > 20, "{with_cuts}");
    }
}
