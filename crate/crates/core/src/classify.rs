//! Rationality verdicts for norm one tori `R^(1)_{K/k}(G_m)`, given the Galois
//! group `G` of the Galois closure and the stabilizer `H` of `K`.
//!
//! Dihedral groups are first identified with the standard model (`D_n` on `n`
//! points with `H = <xy>`, or on `2n` points with `H = 1`) through an explicit
//! isomorphism, and certificates built for the model are carried back along it.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::certify::{self, Certificate, LatticeOrigin};
use crate::error::{Error, Result};
use crate::glattice::{self, GLattice, LatticeMap};
use crate::groups::{self, FiniteGroup, GroupSpec, Subgroup, DEFAULT_MAX_GROUP_ORDER};
use crate::paperdihedral::{self, BuildOptions, CaseId, NamedCertificate};
use crate::resolution::ExactTriple;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StablyRational,
    NotRetractRational,
    /// Retract rational with stable rationality undecided; no rule here produces it.
    RetractNotKnownStable,
    Unsupported,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::StablyRational => "stably rational",
            Verdict::NotRetractRational => "not retract rational",
            Verdict::RetractNotKnownStable => "retract rational, stable rationality unknown",
            Verdict::Unsupported => "unsupported",
        })
    }
}

/// Which argument decided the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `K/k` cyclic Galois.
    CyclicGalois,
    /// `K/k` Galois with a noncyclic Sylow subgroup.
    GaloisNoncyclicSylow,
    /// `K/k` Galois with group `D_n`, `n` odd.
    DihedralGaloisOdd,
    /// `[K:k] = n` odd, Galois closure `D_n`.
    DihedralReflectionOdd,
    /// `[K:k] = n ≡ 2 mod 4`, Galois closure `D_n`.
    DihedralReflection2Mod4,
    /// `[K:k] = n ≡ 0 mod 4`, Galois closure `D_n`.
    DihedralReflection0Mod4,
    /// `H` contains a nontrivial normal subgroup of `G`.
    NotCoreFree,
    Unsupported,
}

/// `G ≅ D_n` via `r^a s^b ↦ x^a y^b` with `H = <rs>` (or `H = 1`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NormalForm {
    pub n: usize,
    pub rotation: String,
    pub reflection: String,
    pub model: GroupSpec,
    pub model_subgroup: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Classification {
    pub schema: u32,
    pub group: GroupSpec,
    pub group_order: usize,
    pub subgroup: String,
    pub subgroup_order: usize,
    /// `[K:k] = [G:H]`
    pub degree: usize,
    pub verdict: Verdict,
    pub rule: Rule,
    pub explanation: String,
    pub normal_form: Option<NormalForm>,
    pub certificates: Vec<NamedCertificate>,
}

impl Classification {
    /// Re-checks every attached certificate from its serialized form.
    pub fn verify_certificates(&self) -> Result<bool> {
        for c in &self.certificates {
            if !c.certificate.verify()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub max_group_order: usize,
    pub with_certificates: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            max_group_order: DEFAULT_MAX_GROUP_ORDER,
            with_certificates: true,
        }
    }
}

pub fn classify(g: &Arc<FiniteGroup>, h: &Subgroup, opts: &ClassifyOptions) -> Result<Classification> {
    g.check_subgroup(h)?;
    if g.order() > opts.max_group_order {
        return Err(Error::ResourceBound {
            what: format!("group order {}", g.order()),
            bound: opts.max_group_order,
        });
    }
    let mut out = Classification {
        schema: 1,
        group: g.spec().clone(),
        group_order: g.order(),
        subgroup: glattice::subgroup_name(g, h),
        subgroup_order: h.order(),
        degree: g.index(h),
        verdict: Verdict::Unsupported,
        rule: Rule::Unsupported,
        explanation: String::new(),
        normal_form: None,
        certificates: Vec::new(),
    };

    if !g.core_is_trivial(h) {
        out.rule = Rule::NotCoreFree;
        out.explanation = format!(
            "the core of H has order {}, so G does not act faithfully on G/H and is not the Galois group of the closure of K",
            g.core(h).order()
        );
        return Ok(out);
    }

    if h.is_trivial() {
        if let Some(gen) = g.cyclic_generator() {
            out.verdict = Verdict::StablyRational;
            out.rule = Rule::CyclicGalois;
            out.explanation = "K/k is cyclic, so the norm one torus is stably rational".into();
            if opts.with_certificates {
                out.certificates.push(NamedCertificate {
                    name: "cyclic_group".into(),
                    certificate: Certificate::CyclicGroup {
                        group: g.spec().clone(),
                        generator: g.element_name(gen),
                        order: g.order(),
                    },
                });
            }
            return Ok(out);
        }
        let origin = LatticeOrigin::ChevalleyFlabbyClass { stabilizer: h.clone() };
        if let Some(o) = certify::sylow_strategy(g, &origin, opts.max_group_order)? {
            out.verdict = Verdict::NotRetractRational;
            out.rule = Rule::GaloisNoncyclicSylow;
            out.explanation = "K/k is Galois with a noncyclic Sylow subgroup, so [J_G]^fl is not invertible".into();
            if opts.with_certificates {
                out.certificates.push(NamedCertificate {
                    name: "noncyclic_sylow".into(),
                    certificate: Certificate::Obstruction {
                        group: g.spec().clone(),
                        lattice: None,
                        max_group_order: opts.max_group_order,
                        obstruction: o,
                    },
                });
            }
            return Ok(out);
        }
    }

    let Some(id) = identify_dihedral(g, h)? else {
        out.explanation = "only cyclic Galois groups, groups with a noncyclic Sylow subgroup, and dihedral Galois closures are handled".into();
        return Ok(out);
    };
    let n = id.n;
    out.normal_form = Some(NormalForm {
        n,
        rotation: g.element_name(id.r),
        reflection: g.element_name(id.s),
        model: id.model.spec().clone(),
        model_subgroup: glattice::subgroup_name(&id.model, &id.model_h),
    });

    let (case, rule) = match (h.is_trivial(), n % 2, n % 4) {
        (true, 1, _) => (Some(CaseId::AppendixGalois), Rule::DihedralGaloisOdd),
        (false, 1, _) => (Some(CaseId::AppendixC2), Rule::DihedralReflectionOdd),
        (false, 0, 2) => (Some(CaseId::MainIi), Rule::DihedralReflection2Mod4),
        (false, 0, 0) => (None, Rule::DihedralReflection0Mod4),
        _ => {
            out.explanation = "dihedral group with an unexpected core-free subgroup".into();
            return Ok(out);
        }
    };
    out.rule = rule;

    match case {
        Some(case) => {
            out.verdict = Verdict::StablyRational;
            out.explanation = match rule {
                Rule::DihedralGaloisOdd => format!(
                    "K/k is Galois with group D_{n}, n odd: [J_G]^fl = 0, so the torus is stably rational"
                ),
                Rule::DihedralReflectionOdd => format!(
                    "[K:k] = {n} is odd and the Galois closure has group D_{n}: [J_{{G/H}}]^fl = 0, so the torus is stably rational"
                ),
                _ => format!(
                    "[K:k] = {n} ≡ 2 mod 4 and the Galois closure has group D_{n}: [J_{{G/H}}]^fl = 0, so the torus is stably rational"
                ),
            };
            if opts.with_certificates {
                let built = paperdihedral::build(
                    case,
                    n,
                    &BuildOptions {
                        max_group_order: opts.max_group_order,
                        perturb_gamma: false,
                        certificate_only: true,
                    },
                )?;
                let cert = built
                    .certificate("flabby_class_zero")
                    .ok_or_else(|| Error::Internal(format!("construction for n = {n} produced no certificate")))?;
                let moved = transport_flabby_certificate(cert, g, h, &id)?;
                if !moved.verify()? {
                    return Err(Error::Internal("transported certificate does not verify".into()));
                }
                out.certificates.push(NamedCertificate {
                    name: "flabby_class_zero".into(),
                    certificate: moved,
                });
            }
        }
        None => {
            out.verdict = Verdict::NotRetractRational;
            out.explanation = format!(
                "[K:k] = {n} ≡ 0 mod 4: G' = <r^2, s> ≅ D_{} meets H trivially and acts transitively, so J_{{G/H}}|G' ≅ J_{{G'}}, and G' has a noncyclic Sylow 2-subgroup",
                n / 2
            );
            if opts.with_certificates {
                let gp = g.generated(&[g.pow(id.r, 2), id.s]);
                let sub = Arc::new(g.subgroup_as_group(&gp)?);
                let iso = paperdihedral::restricted_chevalley_iso(g, h, &gp, &sub)?
                    .ok_or_else(|| Error::Internal("restriction to G' is not regular".into()))?;
                out.certificates.push(NamedCertificate {
                    name: "j_restricted_to_g_prime".into(),
                    certificate: Certificate::Isomorphism(iso.to_json()),
                });
                let origin = LatticeOrigin::ChevalleyFlabbyClass {
                    stabilizer: sub.trivial_subgroup(),
                };
                let o = certify::sylow_strategy(&sub, &origin, opts.max_group_order)?
                    .ok_or_else(|| Error::Internal("G' has cyclic Sylow subgroups".into()))?;
                out.certificates.push(NamedCertificate {
                    name: "noncyclic_sylow".into(),
                    certificate: Certificate::Obstruction {
                        group: sub.spec().clone(),
                        lattice: None,
                        max_group_order: opts.max_group_order,
                        obstruction: o,
                    },
                });
            }
        }
    }
    Ok(out)
}

/// Parses `--group` / `--subgroup` strings and classifies.
pub fn classify_str(group: &str, subgroup: &str, opts: &ClassifyOptions) -> Result<Classification> {
    let spec = GroupSpec::parse(group)?;
    let g = Arc::new(spec.build()?);
    let h = g.parse_subgroup(subgroup)?;
    classify(&g, &h, opts)
}

/// An isomorphism from `G` onto the standard dihedral model carrying `H` to the model subgroup.
#[derive(Clone, Debug)]
pub struct DihedralIdentification {
    pub n: usize,
    /// rotation `r` and reflection `s` of `G` with `H = <rs>` (or `H = 1`)
    pub r: usize,
    pub s: usize,
    pub model: Arc<FiniteGroup>,
    pub model_h: Subgroup,
    /// `psi[g]` is the image of `g` in the model
    pub psi: Vec<usize>,
}

pub fn identify_dihedral(g: &Arc<FiniteGroup>, h: &Subgroup) -> Result<Option<DihedralIdentification>> {
    let Some((n, r, s0)) = g.dihedral_structure() else {
        return Ok(None);
    };
    let (s, model, model_h) = if h.is_trivial() {
        if n % 2 == 0 {
            return Ok(None);
        }
        let m = Arc::new(groups::dihedral_regular(n)?);
        let t = m.trivial_subgroup();
        (s0, m, t)
    } else {
        if h.order() != 2 {
            return Ok(None);
        }
        let hgen = h.members().iter().copied().find(|&e| e != g.identity()).expect("order 2");
        let rotations: Vec<usize> = (0..n as i64).map(|a| g.pow(r, a)).collect();
        if rotations.contains(&hgen) {
            return Ok(None);
        }
        let m = Arc::new(groups::dihedral_on_cosets(n)?);
        let mh = m.parse_subgroup("<x*y>")?;
        (g.mul(g.inv(r), hgen), m, mh)
    };
    let (x, y) = (model.gen_element(0), model.gen_element(1));
    let mut psi = vec![usize::MAX; g.order()];
    for a in 0..n as i64 {
        for b in 0..2 {
            let e = g.mul(g.pow(r, a), g.pow(s, b));
            psi[e] = model.mul(model.pow(x, a), model.pow(y, b));
        }
    }
    if psi.contains(&usize::MAX) {
        return Err(Error::Internal("dihedral normal form incomplete".into()));
    }
    Ok(Some(DihedralIdentification {
        n,
        r,
        s,
        model,
        model_h,
        psi,
    }))
}

/// Pulls a flabby-class certificate for the model back to `G` and
/// precomposes the inclusion with `J_{G/H} ≅ ψ*J_{model}`.
pub fn transport_flabby_certificate(
    cert: &Certificate,
    g: &Arc<FiniteGroup>,
    h: &Subgroup,
    id: &DihedralIdentification,
) -> Result<Certificate> {
    let Certificate::FlabbyClassZero { resolution, pad, iso } = cert else {
        return Err(Error::Internal("expected a flabby class certificate".into()));
    };
    let pull = |j: &glattice::LatticeJson| -> Result<GLattice> {
        glattice::pullback(&GLattice::from_json(j)?, g, &id.psi)
    };
    let j_iso = certify::chevalley_iso_along(g, h, &id.model, &id.model_h, &id.psi)?
        .ok_or_else(|| Error::Internal("identification does not match cosets".into()))?;
    let mid = pull(&resolution.mid)?;
    let right = pull(&resolution.right)?;
    let left = j_iso.source.clone();
    let inj = LatticeMap::new(&left, &mid, resolution.inj.mul(&j_iso.matrix))?;
    let surj = LatticeMap::new(&mid, &right, resolution.surj.clone())?;
    let triple = ExactTriple {
        left,
        mid,
        right,
        inj,
        surj,
        kind: resolution.kind,
    };
    let moved_iso = certify::IsoCertificate {
        source: pull(&iso.source)?,
        target: pull(&iso.target)?,
        matrix: iso.matrix.clone(),
    };
    moved_iso.verify()?;
    Ok(Certificate::FlabbyClassZero {
        resolution: triple.to_json(),
        pad: *pad,
        iso: moved_iso.to_json(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(group: &str, sub: &str) -> Classification {
        classify_str(group, sub, &ClassifyOptions::default()).unwrap()
    }

    #[test]
    fn standard_cases() {
        assert_eq!(run("dihedral:n=3", "<x*y>").verdict, Verdict::StablyRational);
        assert_eq!(run("dihedral:n=6", "<x*y>").rule, Rule::DihedralReflection2Mod4);
        assert_eq!(run("dihedral:n=4", "<y>").verdict, Verdict::NotRetractRational);
        assert_eq!(run("dihedral-regular:n=3", "1").rule, Rule::DihedralGaloisOdd);
        assert_eq!(run("cyclic:n=6", "1").rule, Rule::CyclicGalois);
        assert_eq!(run("dihedral:n=6", "<x^3>").rule, Rule::NotCoreFree);
    }

    #[test]
    fn certificates_reverify() {
        for (g, h) in [("dihedral:n=5", "<y>"), ("dihedral:n=6", "<x^2*y>"), ("dihedral:n=8", "<x*y>")] {
            let c = run(g, h);
            assert!(!c.certificates.is_empty(), "{g} {h}");
            assert!(c.verify_certificates().unwrap(), "{g} {h}");
        }
    }

    #[test]
    fn relabelled_dihedral_group() {
        // D_3 on 3 points with swapped generator names
        let c = run("perms:a=(1 2);b=(1 2 3)", "<a>");
        assert_eq!(c.verdict, Verdict::StablyRational);
        assert_eq!(c.normal_form.as_ref().unwrap().n, 3);
        assert!(c.verify_certificates().unwrap());
    }
}
