use std::sync::Arc;

use norm1lat::certify::{self, Certificate, SearchOptions};
use norm1lat::classify::{self, ClassifyOptions, Rule, Verdict};
use norm1lat::cohomology;
use norm1lat::glattice::{self, GLattice};
use norm1lat::groups::{self, FiniteGroup, Subgroup};
use norm1lat::intmat::{self, IntMatrix};
use norm1lat::paperdihedral::{self, BuildOptions, CaseId, PaperCase};
use norm1lat::{resolution, AbelianInvariants, Int};

fn built(case: CaseId, n: usize) -> PaperCase {
    let c = paperdihedral::build(case, n, &BuildOptions::new()).unwrap();
    for cl in &c.claims {
        assert!(cl.passed, "{case} n={n} claim {} failed: {}", cl.name, cl.detail);
    }
    c
}

fn lat<'a>(c: &'a PaperCase, name: &str) -> &'a GLattice {
    c.lattice(name).unwrap_or_else(|| panic!("missing lattice {name}"))
}

/// Brute-force oracle for `(u, v)`: smallest `|u|`, positive on ties.
fn uv_oracle(k: i64) -> (i64, i64) {
    let mut best: Option<(i64, i64)> = None;
    for u in -k..=k {
        if (1 - 2 * u) % k == 0 {
            let cand = (u, (1 - 2 * u) / k);
            best = match best {
                Some(b) if b.0.abs() < u.abs() || (b.0.abs() == u.abs() && b.0 > 0) => Some(b),
                _ => Some(cand),
            };
        }
    }
    best.unwrap()
}

#[test]
fn canonical_uv_matches_oracle() {
    for k in (1..60).step_by(2) {
        assert_eq!(paperdihedral::canonical_uv(k).unwrap(), uv_oracle(k), "k={k}");
    }
}

#[test]
fn main_ii_small_values_rechecked_independently() {
    for n in [6, 10] {
        let m = n / 2;
        let c = built(CaseId::MainIi, n);
        let phi = c.map("phi").unwrap();
        assert!(intmat::cokernel_invariants(phi).is_trivial());
        assert_eq!(intmat::rank(phi), n - 1);
        let cc = lat(&c, "C");
        assert_eq!(cc.rank(), 2 * m + 1);
        assert_eq!(cc.rank(), n + 1);
        // printed completion matrix: determinant -2u - mv = -1
        let (u, v) = (c.u.unwrap(), c.v.unwrap());
        assert_eq!(2 * u + m as i64 * v, 1);
        let det = intmat::determinant(c.map("completion_printed").unwrap()).unwrap();
        assert_eq!(det, Int::from(-1));
        let cbar = lat(&c, "C_over_Dm");
        assert_eq!(cohomology::h0(&cbar.group().whole(), cbar).unwrap(), AbelianInvariants::cyclic(2));
        for (name, cert) in &c.certificates {
            assert!(cert.verify().unwrap(), "{name}");
        }
        let Some(Certificate::Isomorphism(iso)) = c.certificate("c_plus_z_over_dm") else {
            panic!("no certificate");
        };
        iso.verify().unwrap();
        assert_eq!(iso.source.rank, 2 * m + 2);
    }
}

#[test]
fn main_ii_printed_basis_is_x_translate() {
    // b_{i+1} = x b_i inside P
    let c = built(CaseId::MainIi, 6);
    let b = c.map("c_basis").unwrap();
    let x = &lat(&c, "P").generator_matrices()[0];
    for i in 3..5 {
        assert_eq!(x.mul_vec(&b.column(i)), b.column(i + 1));
    }
}

#[test]
fn dimension_identities_match_printed_values() {
    let r = |case, n| paperdihedral::dimension_report(&built(case, n)).unwrap();
    assert_eq!(r(CaseId::MainIi, 6).rendered, "5 + 3 + 3 + 2 = 13 = 6 + 6 + 1");
    assert_eq!(r(CaseId::AppendixC2, 3).rendered, "2 + 3 + 2 = 7 = 6 + 1");
    assert_eq!(r(CaseId::AppendixGalois, 3).rendered, "5 + 3 + 3 + 2 = 13 = 6 + 6 + 1");
    for n in [3, 5, 7] {
        assert_eq!(r(CaseId::AppendixGalois, n).lhs_total, 4 * n + 1);
        assert_eq!(r(CaseId::AppendixC2, n).lhs_total, 2 * n + 1);
    }
    assert!(paperdihedral::dimension_report(&built(CaseId::MainI, 4)).is_err());
}

#[test]
fn appendix_ranks() {
    for n in [3, 5] {
        assert_eq!(lat(&built(CaseId::AppendixGalois, n), "C").rank(), 2 * n + 1);
        assert_eq!(lat(&built(CaseId::AppendixC2, n), "C").rank(), n + 1);
    }
}

#[test]
fn c2_findings_report_the_index_shift() {
    for n in [3, 5, 7, 9] {
        let c = built(CaseId::AppendixC2, n);
        let s = (n - 1) / 2;
        assert!(
            c.findings.iter().any(|f| f.contains(&format!("a_i ↦ a_{{i+{s}}}"))),
            "n={n}: {:?}",
            c.findings
        );
        // 2s ≡ -1 mod n turns a_i ↔ a_{n-i} into a_i ↔ a_{n+1-i}
        assert_eq!((2 * s + 1) % n, 0);
    }
}

#[test]
fn perturbed_gamma_images_fail_loudly() {
    let opts = BuildOptions {
        perturb_gamma: true,
        ..BuildOptions::new()
    };
    let c = paperdihedral::build(CaseId::MainIi, 6, &opts).unwrap();
    let phi = c.claim("phi_surjective").unwrap();
    assert!(!phi.passed);
    assert!(c.claims.iter().skip_while(|cl| cl.name != "phi_surjective").skip(1).all(|cl| !cl.passed));
    assert!(c.verdict.is_none());
    assert!(!c.all_passed());
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(paperdihedral::build(CaseId::MainIi, 7, &BuildOptions::new()).is_err());
    assert!(paperdihedral::build(CaseId::MainIi, 8, &BuildOptions::new()).is_err());
    assert!(paperdihedral::build(CaseId::MainI, 6, &BuildOptions::new()).is_err());
    assert!(paperdihedral::build(CaseId::AppendixC2, 4, &BuildOptions::new()).is_err());
}

#[test]
fn main_i_records_both_strategies() {
    let c = built(CaseId::MainI, 8);
    assert_eq!(c.verdict, Some(Verdict::NotRetractRational));
    assert!(c.strategies.iter().any(|(k, v)| k == "sylow" && *v));
    assert!(c.strategies.iter().any(|(k, _)| k == "h1"));
    for (name, cert) in &c.certificates {
        assert!(cert.verify().unwrap(), "{name}");
    }
}

#[test]
fn flabby_fingerprints_agree_with_generic_resolution() {
    for (case, n) in [(CaseId::MainIi, 6), (CaseId::AppendixC2, 5), (CaseId::AppendixGalois, 3)] {
        let c = built(case, n);
        let explicit = resolution::fingerprint_of(lat(&c, "C_dual"), 400).unwrap();
        let generic = resolution::flabby_class_invariants(lat(&c, "J"), 400).unwrap();
        assert_eq!(explicit.h1(), generic.h1(), "{case} n={n}");
        assert!(explicit.h1().iter().all(|(_, v)| v.is_trivial()));
    }
}

/// Induced isomorphism `J_{G/H} → J_{G/H^σ}` from the coset permutation.
fn conjugate_j_iso(g: &Arc<FiniteGroup>, h: &Subgroup, sigma: usize) -> certify::IsoCertificate {
    let hs = g.conjugate(h, sigma);
    let p = glattice::conjugation_iso(g, h, sigma);
    let k = p.rows();
    let src = glattice::augmentation_sequence(g, h).unwrap();
    let coords = IntMatrix::from_fn(k - 1, k, |r, c| if c <= r { Int::ONE } else { Int::ZERO });
    let a = coords.mul(&p.mul(&src.incl.matrix));
    certify::IsoCertificate {
        source: glattice::chevalley_module(g, h).unwrap(),
        target: glattice::chevalley_module(g, &hs).unwrap(),
        matrix: intmat::inverse_unimodular(&a).unwrap().transpose(),
    }
}

#[test]
fn chevalley_modules_of_conjugates_are_isomorphic() {
    for n in [4, 5, 6] {
        let g = Arc::new(groups::dihedral_on_cosets(n).unwrap());
        for h in ["<y>", "<x*y>", "1"] {
            let h = g.parse_subgroup(h).unwrap();
            for sigma in 0..g.order() {
                conjugate_j_iso(&g, &h, sigma).verify().unwrap();
            }
        }
    }
}

#[test]
fn automorphism_swaps_reflection_classes_for_j() {
    for n in [6, 10] {
        let g = Arc::new(groups::dihedral_on_cosets(n).unwrap());
        let aut = groups::dihedral_automorphism(&g).unwrap();
        let jy = glattice::chevalley_module(&g, &g.parse_subgroup("<y>").unwrap()).unwrap();
        let jxy = glattice::chevalley_module(&g, &g.parse_subgroup("<x*y>").unwrap()).unwrap();
        let twisted = jy.twist(&aut, "J_y twisted");
        let out = certify::find_iso(&twisted, &jxy, SearchOptions::default()).unwrap();
        let cert = out.certificate().expect("isomorphism found");
        cert.verify().unwrap();
        // isomorphic lattices have equal cohomology
        for u in g.subgroup_classes(400).unwrap() {
            assert_eq!(cohomology::h1(u, &twisted).unwrap(), cohomology::h1(u, &jxy).unwrap());
        }
        // both classes give the same verdict
        let v = |h: &str| classify::classify(&g, &g.parse_subgroup(h).unwrap(), &ClassifyOptions::default()).unwrap();
        assert_eq!(v("<y>").verdict, v("<x*y>").verdict);
    }
}

#[test]
fn classify_examples() {
    let c = |g: &str, h: &str| classify::classify_str(g, h, &ClassifyOptions::default()).unwrap();
    let a = c("dihedral:n=4", "<x*y>");
    assert_eq!((a.verdict, a.rule), (Verdict::NotRetractRational, Rule::DihedralReflection0Mod4));
    let b = c("dihedral:n=6", "<x*y>");
    assert_eq!((b.verdict, b.rule), (Verdict::StablyRational, Rule::DihedralReflection2Mod4));
    assert!(b.certificates.iter().any(|x| x.certificate.kind() == "flabby_class_zero"));
    let d = c("dihedral:n=3", "1");
    assert_eq!(d.verdict, Verdict::StablyRational);
    let e = c("dihedral:n=6", "1");
    assert_eq!((e.verdict, e.rule), (Verdict::NotRetractRational, Rule::GaloisNoncyclicSylow));
    let f = c("perms:a=(1 2 3);b=(1 2)(3 4)", "<a>");
    assert_eq!(f.verdict, Verdict::Unsupported);
    for x in [a, b, d, e] {
        assert!(x.verify_certificates().unwrap());
    }
}

#[test]
fn classify_is_invariant_under_conjugation() {
    for n in [5, 6, 8] {
        let g = Arc::new(groups::dihedral_on_cosets(n).unwrap());
        let h = g.parse_subgroup("<y>").unwrap();
        let base = classify::classify(&g, &h, &ClassifyOptions::default()).unwrap();
        for sigma in 0..g.order() {
            let hs = g.conjugate(&h, sigma);
            let o = classify::classify(
                &g,
                &hs,
                &ClassifyOptions {
                    with_certificates: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!((o.verdict, o.rule), (base.verdict, base.rule));
        }
    }
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let c = paperdihedral::build(CaseId::MainIi, 6, &BuildOptions::new()).unwrap();
            serde_json::to_string(&c.to_report(false)).unwrap()
        })
    };
    let a = run(1);
    assert_eq!(a, run(4));
    assert_eq!(a, run(1));
}

#[test]
fn report_round_trips_through_json() {
    let c = built(CaseId::AppendixC2, 3);
    let r = c.to_report(false);
    let s = serde_json::to_string(&r).unwrap();
    let back: paperdihedral::PaperReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back, r);
    for nc in &back.certificates {
        assert!(nc.certificate.verify().unwrap(), "{}", nc.name);
    }
    assert!(c.to_report(true).timings_ms.is_some());
}
