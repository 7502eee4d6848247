//! Proof terms for classical first-order sequent calculus.
//!
//! Hypotheses are signed integers (negative for the antecedent, positive for
//! the succedent), weakening and contraction are implicit, and cut
//! normalization is a small evaluator over the terms. Besides the kernel the
//! crate has induction unfolding, equality atomization, Herbrand sequent
//! extraction, the benchmark proof families and a tree-based sequent calculus
//! used as a baseline.

pub mod formula;
pub mod lkt;
pub mod set;
pub mod term;
pub mod typing;
pub mod normalize;
pub mod generators;
pub mod induction;
pub mod eqelim;
pub mod herbrand;
pub mod lk_baseline;
pub mod random;
pub mod timing;

pub use eqelim::{atomize_eqls, sim_eq, EqElimError};
pub use generators::{Family, Generated};
pub use herbrand::{extract_instances, herbrand_sequent, validate_ground, HerbrandError, InstanceMap};
pub use induction::{eliminate_inductions, unfold_ind, InductionError, RecursiveDefinitions};
pub use lk_baseline::{gentzen_eliminate, to_tree, LKTree, LkError};
pub use lkt::{Hyp, Polarity, Proof, ProofKind};
pub use normalize::{normalize, normalize_with, Budget, BudgetExhausted, Policy};
pub use term::{Const, Expr, Substitution, Ty, Var};
pub use typing::{check, check_closed, LocalContext, Sequent, TypeError};
