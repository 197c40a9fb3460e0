use std::sync::Arc;

use norm1lat::cohomology::{self, Degree};
use norm1lat::groups::{self, FiniteGroup, Subgroup};
use norm1lat::intmat::{self, IntMatrix};
use norm1lat::{certify, corpus, glattice, resolution, AbelianInvariants, Int};
use proptest::prelude::*;

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|ch| ch.to_vec()).collect();
            IntMatrix::from_i64_rows(&rows)
        })
    })
}

fn square_pair(max: usize) -> impl Strategy<Value = (IntMatrix, IntMatrix)> {
    (1..=max).prop_flat_map(|n| {
        let one = prop::collection::vec(-5i64..=5, n * n);
        (one.clone(), one).prop_map(move |(a, b)| {
            let to = |v: Vec<i64>| IntMatrix::from_i64_rows(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>());
            (to(a), to(b))
        })
    })
}

/// A corpus group (order ≤ 24) and a few of its element indices.
fn group_and_elements() -> impl Strategy<Value = (Arc<FiniteGroup>, Vec<usize>)> {
    let specs = corpus::group_specs(24);
    (0..specs.len(), prop::collection::vec(any::<prop::sample::Index>(), 1..3)).prop_map(move |(i, idx)| {
        let g = Arc::new(specs[i].build().unwrap());
        let els = idx.iter().map(|x| x.index(g.order())).collect();
        (g, els)
    })
}

fn is_unimodular(m: &IntMatrix) -> bool {
    intmat::determinant(m).map(|d| d.abs().is_one()).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_reconstructs(a in small_matrix(5, 5)) {
        let s = intmat::smith_normal_form(&a);
        let d = IntMatrix::diagonal(&s.d, a.rows(), a.cols());
        prop_assert_eq!(s.left.mul(&a).mul(&s.right), d);
        prop_assert!(is_unimodular(&s.left));
        prop_assert!(is_unimodular(&s.right));
        for w in s.d.windows(2) {
            if !w[1].is_zero() {
                prop_assert!(w[0].divides(&w[1]));
            }
        }
    }

    #[test]
    fn rank_nullity(a in small_matrix(5, 6)) {
        let k = intmat::kernel_basis(&a);
        prop_assert_eq!(intmat::rank(&a) + k.cols(), a.cols());
        prop_assert!(a.mul(&k).is_zero());
        if k.cols() > 0 {
            let s = intmat::smith_normal_form(&k);
            prop_assert!(s.d.iter().all(|x| x.is_one()));
        }
    }

    #[test]
    fn determinant_is_multiplicative((a, b) in square_pair(4)) {
        let lhs = intmat::determinant(&a.mul(&b)).unwrap();
        let rhs = &intmat::determinant(&a).unwrap() * &intmat::determinant(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn generated_subgroups_and_cosets((g, els) in group_and_elements()) {
        let h = g.generated(&els);
        g.check_subgroup(&h).unwrap();
        prop_assert_eq!(g.order() % h.order(), 0);
        let cos = g.cosets(&h);
        prop_assert_eq!(cos.len(), g.index(&h));
        let mut sizes = vec![0usize; cos.len()];
        for &c in &cos.of_element {
            sizes[c] += 1;
        }
        prop_assert!(sizes.iter().all(|&s| s == h.order()));
        for (i, &r) in cos.reps.iter().enumerate() {
            prop_assert_eq!(cos.of_element[r], i);
        }
    }

    #[test]
    fn core_is_intersection_of_conjugates((g, els) in group_and_elements()) {
        let h = g.generated(&els);
        let brute: Vec<usize> = (0..g.order())
            .filter(|&e| (0..g.order()).all(|s| g.conjugate(&h, s).contains(e)))
            .collect();
        let core = g.core(&h);
        prop_assert_eq!(core.members(), &brute[..]);
        prop_assert_eq!(g.core_is_trivial(&h), brute.len() == 1);
    }

    #[test]
    fn tate_is_conjugation_invariant((g, els) in group_and_elements(), s in any::<prop::sample::Index>()) {
        let u = g.generated(&els);
        let sigma = s.index(g.order());
        let classes = g.subgroup_classes(400).unwrap();
        let m = glattice::augmentation_ideal(&g, &classes[classes.len() / 2]).unwrap_or_else(|_| glattice::trivial(&g, 1));
        let us = g.conjugate(&u, sigma);
        for d in Degree::ALL {
            prop_assert_eq!(cohomology::tate(d, &u, &m).unwrap(), cohomology::tate(d, &us, &m).unwrap());
        }
    }

    #[test]
    fn tate_is_additive((g, els) in group_and_elements()) {
        let u = g.generated(&els);
        let classes = g.subgroup_classes(400).unwrap();
        let a = glattice::coset_lattice(&g, &classes[0]).unwrap();
        let b = glattice::chevalley_module(&g, classes.last().unwrap()).unwrap_or_else(|_| glattice::trivial(&g, 2));
        let sum = glattice::direct_sum(&a, &b).unwrap();
        for d in Degree::ALL {
            let lhs = cohomology::tate(d, &u, &sum).unwrap();
            let rhs = cohomology::tate(d, &u, &a).unwrap().direct_sum(&cohomology::tate(d, &u, &b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn trivial_subgroup_and_periodicity((g, els) in group_and_elements()) {
        let u = g.generated(&els);
        let m = glattice::chevalley_module(&g, &u).unwrap_or_else(|_| glattice::trivial(&g, 1));
        let one = g.trivial_subgroup();
        for d in Degree::ALL {
            prop_assert!(cohomology::tate(d, &one, &m).unwrap().is_trivial());
        }
        // every element generates a cyclic subgroup
        let c = g.generated(&els[..1]);
        prop_assert_eq!(cohomology::h_minus1(&c, &m).unwrap(), cohomology::h1(&c, &m).unwrap());
        // annihilated by |U|
        for d in Degree::ALL {
            let t = cohomology::tate(d, &u, &m).unwrap();
            prop_assert!(t.exponent().divides(&Int::from(u.order())));
        }
    }

    #[test]
    fn restriction_commutes_with_dual_and_sum((g, els) in group_and_elements()) {
        let u = g.generated(&els);
        let classes = g.subgroup_classes(400).unwrap();
        let a = glattice::coset_lattice(&g, classes.last().unwrap()).unwrap();
        let b = glattice::augmentation_ideal(&g, &classes[0]).unwrap_or_else(|_| glattice::trivial(&g, 1));
        let sub = Arc::new(g.subgroup_as_group(&u).unwrap());
        let r = |m: &glattice::GLattice| glattice::restriction_to(m, &u, &sub).unwrap();
        let (rd, dr) = (r(&glattice::dual(&a)), glattice::dual(&r(&a)));
        prop_assert_eq!(rd.generator_matrices(), dr.generator_matrices());
        let lhs = r(&glattice::direct_sum(&a, &b).unwrap());
        let rhs = glattice::direct_sum(&r(&a), &r(&b)).unwrap();
        prop_assert_eq!(lhs.generator_matrices(), rhs.generator_matrices());
    }
}

#[test]
fn dihedral_relations_hold() {
    for n in 3..=24 {
        let g = groups::dihedral_on_cosets(n).unwrap();
        for rel in g.relations() {
            assert_eq!(g.eval_word(rel), g.identity(), "D_{n}");
        }
        assert_eq!(g.order(), 2 * n);
    }
    for n in (3..=15).step_by(2) {
        let g = groups::dihedral_regular(n).unwrap();
        assert!(g.relations().iter().all(|r| g.eval_word(r) == g.identity()));
    }
}

/// Brute-force subgroup count: closure of every subset of up to three generators.
fn brute_force_subgroups(g: &FiniteGroup) -> usize {
    let mut seen: std::collections::BTreeSet<Vec<usize>> = Default::default();
    let n = g.order();
    for a in 0..n {
        for b in a..n {
            seen.insert(g.generated(&[a, b]).members().to_vec());
        }
    }
    // corpus groups need at most three generators; add a third only where it can matter
    let two: Vec<Vec<usize>> = seen.iter().cloned().collect();
    for s in &two {
        let h = g.generated(s);
        for c in 0..n {
            if !h.contains(c) {
                let mut gens = h.gens().to_vec();
                gens.push(c);
                seen.insert(g.generated(&gens).members().to_vec());
            }
        }
    }
    seen.len()
}

#[test]
fn class_sizes_sum_to_subgroup_count() {
    for g in corpus::groups(48).unwrap() {
        let classes = g.subgroup_classes(400).unwrap();
        let total: usize = classes.iter().map(|c| g.class_size(c)).sum();
        assert_eq!(total, g.all_subgroups(400).unwrap().len(), "{}", g.spec());
        if g.order() <= 24 {
            assert_eq!(total, brute_force_subgroups(&g), "{}", g.spec());
        }
    }
}

#[test]
fn augmentation_sequences_are_exact() {
    for g in corpus::groups(48).unwrap() {
        for h in g.subgroup_classes(400).unwrap() {
            if g.index(h) == 1 {
                continue;
            }
            let s = glattice::augmentation_sequence(&g, h).unwrap();
            let k = intmat::kernel_basis(&s.eps.matrix);
            assert!(s.eps.matrix.mul(&s.incl.matrix).is_zero());
            assert!(intmat::is_saturated(&s.incl.matrix));
            assert_eq!(k.cols(), s.incl.matrix.cols());
            assert!(intmat::cokernel_invariants(&s.eps.matrix).is_trivial());
        }
    }
}

#[test]
fn coset_lattices_of_conjugates_match() {
    for g in corpus::groups(24).unwrap() {
        for h in g.subgroup_classes(400).unwrap() {
            for sigma in 0..g.order() {
                let p = glattice::conjugation_iso(&g, h, sigma);
                let src = glattice::coset_lattice(&g, h).unwrap();
                let dst = glattice::coset_lattice(&g, &g.conjugate(h, sigma)).unwrap();
                certify::IsoCertificate {
                    source: src,
                    target: dst,
                    matrix: p,
                }
                .verify()
                .unwrap();
            }
        }
    }
}

#[test]
fn shapiro_on_small_corpus() {
    for g in corpus::groups(24).unwrap() {
        let classes: Vec<Subgroup> = g.subgroup_classes(400).unwrap().to_vec();
        for u in &classes {
            let p = glattice::coset_lattice(&g, u).unwrap();
            let whole = g.whole();
            assert_eq!(
                cohomology::h0(&whole, &p).unwrap(),
                AbelianInvariants::cyclic(u.order() as i64),
                "{} {:?}",
                g.spec(),
                u.members()
            );
            for v in &classes {
                assert!(cohomology::h_minus1(v, &p).unwrap().is_trivial());
                assert!(cohomology::h1(v, &p).unwrap().is_trivial());
            }
        }
    }
}

#[test]
fn resolutions_are_deterministic() {
    for m in corpus::lattices(6, 11, 16, 400).unwrap() {
        let a = resolution::flabby_resolution(&m, 400).unwrap().triple.to_json();
        let b = resolution::flabby_resolution(&m, 400).unwrap().triple.to_json();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let q = resolution::coflabby_resolution(&m, 400).unwrap();
        assert!(certify::verify_exact(&q.triple).unwrap().ok);
    }
}

#[test]
fn find_iso_on_self_and_invariants() {
    for m in corpus::lattices(8, 3, 12, 400).unwrap() {
        let out = certify::find_iso(&m, &m, certify::SearchOptions::default()).unwrap();
        let c = out.certificate().expect("self isomorphism");
        c.verify().unwrap();
        assert!(c.matrix.is_identity());
    }
}
