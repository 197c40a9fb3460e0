//! A fixed corpus of small groups and lattices over them, for self-tests and
//! property checks. Lattice draws are seeded, so a seed names a corpus.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::glattice::{self, GLattice};
use crate::groups::{FiniteGroup, GroupSpec};

const EXPLICIT: [&str; 6] = [
    // Klein four, A4, S4, Q8, C2^3, C3 x S3
    "perms:a=(1 2)(3 4);b=(1 3)(2 4)",
    "perms:a=(1 2 3);b=(1 2)(3 4)",
    "perms:a=(1 2 3 4);b=(1 2)",
    "perms:i=(1 2 3 4)(5 6 7 8);j=(1 5 3 7)(2 8 4 6)",
    "perms:a=(1 2);b=(3 4);c=(5 6)",
    "perms:a=(1 2 3);b=(4 5 6);c=(5 6)",
];

/// Group specs of order at most `max_order`, smallest first.
pub fn group_specs(max_order: usize) -> Vec<GroupSpec> {
    let mut out: Vec<(usize, GroupSpec)> = Vec::new();
    for n in 2..=max_order.min(12) {
        out.push((n, GroupSpec::Cyclic { n }));
    }
    for n in 3..=max_order / 2 {
        out.push((2 * n, GroupSpec::Dihedral { n }));
    }
    for n in (3..=max_order / 2).step_by(2).take(5) {
        out.push((2 * n, GroupSpec::DihedralRegular { n }));
    }
    for s in EXPLICIT {
        let spec = GroupSpec::parse(s).expect("corpus spec");
        let order = spec.build().expect("corpus group").order();
        out.push((order, spec));
    }
    out.retain(|(o, _)| *o <= max_order);
    out.sort_by_key(|(o, _)| *o);
    out.into_iter().map(|(_, s)| s).collect()
}

pub fn groups(max_order: usize) -> Result<Vec<Arc<FiniteGroup>>> {
    group_specs(max_order).iter().map(|s| s.build().map(Arc::new)).collect()
}

/// `count` lattices drawn from coset, augmentation, Chevalley and summed
/// coset lattices over corpus groups of order at most `max_order`.
pub fn lattices(count: usize, seed: u64, max_order: usize, enum_bound: usize) -> Result<Vec<GLattice>> {
    let groups = groups(max_order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = groups.choose(&mut rng).expect("nonempty corpus");
        let classes = g.subgroup_classes(enum_bound)?;
        let u = classes.choose(&mut rng).expect("trivial subgroup");
        let lat = match rng.random_range(0..5) {
            0 => glattice::coset_lattice(g, u)?,
            1 if g.index(u) > 1 => glattice::augmentation_ideal(g, u)?,
            2 if g.index(u) > 1 => glattice::chevalley_module(g, u)?,
            3 => {
                let v = classes.choose(&mut rng).expect("trivial subgroup");
                glattice::permutation_lattice(g, &[u.clone(), v.clone()])?
            }
            _ => glattice::dual(&glattice::coset_lattice(g, u)?),
        };
        out.push(lat);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_groups_have_expected_orders() {
        let orders: Vec<usize> = EXPLICIT
            .iter()
            .map(|s| GroupSpec::parse(s).unwrap().build().unwrap().order())
            .collect();
        assert_eq!(orders, vec![4, 12, 24, 8, 8, 18]);
    }

    #[test]
    fn draws_are_reproducible() {
        let a = lattices(8, 7, 24, 400).unwrap();
        let b = lattices(8, 7, 24, 400).unwrap();
        let key = |v: &[GLattice]| v.iter().map(|l| l.to_json()).collect::<Vec<_>>();
        assert_eq!(key(&a), key(&b));
    }
}
