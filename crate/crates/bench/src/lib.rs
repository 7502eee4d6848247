//! Benchmark fixtures shared by the criterion targets.

use lkt_core::{to_tree, Family, Generated, LKTree};

/// One generated proof per parameter.
pub fn family_inputs(family: Family, ns: &[usize]) -> Vec<(usize, Generated)> {
    ns.iter().map(|&n| (n, family.generate(n))).collect()
}

/// Tree translations of an equality-free family.
pub fn tree_inputs(family: Family, ns: &[usize]) -> Vec<(usize, LKTree)> {
    family_inputs(family, ns)
        .into_iter()
        .map(|(n, g)| (n, to_tree(&g.proof, &g.ctx).expect("equality-free family")))
        .collect()
}
